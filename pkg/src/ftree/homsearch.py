"""Enumerate homomorphisms Presentation -> FiniteGroup by pruned backtracking.

The search assigns generator images in a planned order and evaluates every
relator at the first prefix where all its generators are assigned.  Output
is complete, duplicate-free and sorted, independent of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FtreeError, ResourceLimitError
from .groups import automorphism_group, inner_automorphisms, subgroup_closure

DEFAULT_NODE_BUDGET = 10 ** 9


@dataclass(frozen=True)
class Homomorphism:
    images: tuple           # element id per generator
    source: object          # Presentation
    target: object          # FiniteGroup

    def evaluate(self, word):
        return self.target.evaluate(word, self.images)


@dataclass(frozen=True)
class HomOrbit:
    representative: Homomorphism
    size: int
    mode: str


@dataclass(frozen=True)
class SearchPlan:
    order: tuple      # generator ids (0-based) in assignment order
    checkable: tuple  # per prefix length 1..n, tuple of relator indices


def plan_search(p):
    """Greedy assignment order: next is the generator occurring in the most
    not-yet-checkable relators; ties by lowest generator id."""
    n = p.num_generators
    supports = [frozenset(abs(x) - 1 for x in r) for r in p.relators]
    remaining = set(range(len(supports)))
    assigned = set()
    order = []
    checkable = []
    while len(order) < n:
        counts = [0] * n
        for ri in remaining:
            for gid in supports[ri]:
                if gid not in assigned:
                    counts[gid] += 1
        best = max((g for g in range(n) if g not in assigned),
                   key=lambda g: (counts[g], -g))
        order.append(best)
        assigned.add(best)
        now = tuple(sorted(ri for ri in remaining if supports[ri] <= assigned))
        remaining -= set(now)
        checkable.append(now)
    # relators with empty support (impossible after reduction, but harmless)
    if remaining:
        if not checkable:
            checkable.append(tuple(sorted(remaining)))
        else:
            checkable[-1] = tuple(sorted(set(checkable[-1]) | remaining))
    return SearchPlan(tuple(order), tuple(checkable))


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n):
        self.left = n


def _search_block(p, g, plan, first_images, budget):
    """Backtracking enumeration with the first planned generator's image
    restricted to ``first_images``."""
    n = p.num_generators
    order = plan.order
    mul = g.mul
    inv = g.inv
    size = g.order
    # relator letters rewritten to (position in assignment order unused) plain ids
    relators = [tuple(r) for r in p.relators]
    found = []
    if n == 0:
        if all(g.evaluate(r, ()) == 0 for r in relators):
            found.append(())
        return found
    images = [0] * n
    check_at = plan.checkable

    def relator_holds(rel):
        acc = 0
        for x in rel:
            im = images[x - 1] if x > 0 else inv[images[-x - 1]]
            acc = mul[acc][im]
        return acc == 0

    def descend(depth):
        if depth == n:
            found.append(tuple(images))
            return
        gid = order[depth]
        choices = first_images if depth == 0 else range(size)
        for val in choices:
            if budget.left <= 0:
                raise ResourceLimitError(
                    f"node budget exhausted; partial count {len(found)} is not valid")
            budget.left -= 1
            images[gid] = val
            ok = True
            for ri in check_at[depth]:
                if not relator_holds(relators[ri]):
                    ok = False
                    break
            if ok:
                descend(depth + 1)
        images[gid] = 0

    descend(0)
    return found


def enumerate_homomorphisms(p, g, plan=None, threads=1, node_budget=DEFAULT_NODE_BUDGET):
    """All homomorphisms p -> g, sorted lexicographically by image vector."""
    if plan is None:
        plan = plan_search(p)
    if tuple(sorted(plan.order)) != tuple(range(p.num_generators)):
        raise FtreeError("search plan does not cover the generators")
    budget = _Budget(node_budget)
    if p.num_generators == 0 or threads <= 1 or g.order == 1:
        blocks = [_search_block(p, g, plan, range(g.order), budget)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        parts = [[] for _ in range(min(threads, g.order))]
        for v in range(g.order):
            parts[v % len(parts)].append(v)
        with ThreadPoolExecutor(max_workers=len(parts)) as ex:
            futures = [ex.submit(_search_block, p, g, plan, part, budget) for part in parts]
            blocks = [f.result() for f in futures]
    images = sorted(im for block in blocks for im in block)
    return [Homomorphism(im, p, g) for im in images]


def count_homomorphisms(p, g, **kw):
    return len(enumerate_homomorphisms(p, g, **kw))


def naive_enumerate(p, g):
    """|G|^n filter oracle; exponential, for tests and verification only."""
    from itertools import product

    out = []
    for images in product(range(g.order), repeat=p.num_generators):
        if all(g.evaluate(r, images) == 0 for r in p.relators):
            out.append(Homomorphism(tuple(images), p, g))
    return out


def is_surjective(h):
    return subgroup_closure(h.target, set(h.images)).order == h.target.order


def restrict_along(h, words):
    """Evaluate each word under h."""
    return [h.evaluate(w) for w in words]


def classify(homs, g, mode):
    """Group homomorphisms into orbits under post-composition with
    automorphisms of g ('automorphism'), inner automorphisms ('conjugation'),
    or nothing ('none')."""
    if mode in ("none", None):
        return [HomOrbit(h, 1, "none") for h in homs]
    if mode in ("conjugation", "conj"):
        maps = inner_automorphisms(g)
        mode = "conjugation"
    elif mode in ("automorphism", "aut"):
        maps = automorphism_group(g)
        mode = "automorphism"
    else:
        raise FtreeError(f"unknown classification mode {mode!r}")
    index = {h.images: h for h in homs}
    seen = set()
    orbits = []
    for h in homs:
        if h.images in seen:
            continue
        orbit = {tuple(phi[x] for x in h.images) for phi in maps}
        for im in orbit:
            if im not in index:
                raise FtreeError("orbit left the homomorphism set; input not closed")
            seen.add(im)
        rep = min(orbit)
        orbits.append(HomOrbit(index[rep], len(orbit), mode))
    orbits.sort(key=lambda o: o.representative.images)
    return orbits
