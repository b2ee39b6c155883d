"""Concrete finite groups as multiplication tables.

Groups are built from permutation generators (or built-in families that
reduce to them) with a canonical element numbering: identity is 0 and the
remaining elements appear in BFS order from the generators, ties broken
lexicographically on permutation images.  This makes every downstream
output byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd

from .errors import FtreeError, ResourceLimitError

MAX_CLOSURE_ORDER = 20160
MAX_TABLE_ORDER = 4096
MAX_AUT_ORDER = 256
MAX_ISO_ORDER = 32


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    mul: tuple       # order x order table of element ids
    inv: tuple
    name: str
    generators: tuple  # element ids generating the group
    perms: tuple = None  # underlying permutation of each element, when known

    def __post_init__(self):
        n = self.order
        if n < 1 or len(self.mul) != n or any(len(r) != n for r in self.mul):
            raise FtreeError("bad multiplication table shape")
        if any(self.mul[0][j] != j or self.mul[j][0] != j for j in range(n)):
            raise FtreeError("element 0 must be the identity")
        if len(self.inv) != n or any(self.mul[i][self.inv[i]] != 0 for i in range(n)):
            raise FtreeError("inverse table inconsistent with multiplication")

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def multiply(self, a, b):
        return self.mul[a][b]

    def inverse(self, a):
        return self.inv[a]

    def conjugate(self, a, by):
        return self.mul[self.mul[by][a]][self.inv[by]]

    def element_order(self, a):
        k, x = 1, a
        while x != 0:
            x = self.mul[x][a]
            k += 1
        return k

    def evaluate(self, word, images):
        """Evaluate a signed word at the given generator images."""
        acc = 0
        for x in word:
            g = images[abs(x) - 1]
            acc = self.mul[acc][g if x > 0 else self.inv[g]]
        return acc


def _perm_mul(p, q):
    # apply q first, then p
    return tuple(p[x] for x in q)


def _perm_inv(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _closure(perm_gens, degree):
    identity = tuple(range(degree))
    elements = [identity]
    index = {identity: 0}
    frontier = [identity]
    while frontier:
        new = []
        for p in frontier:
            for g in perm_gens:
                q = _perm_mul(p, g)
                if q not in index:
                    new.append(q)
                    index[q] = -1  # placeholder
        new = sorted(set(new))
        for q in new:
            index[q] = len(elements)
            elements.append(q)
            if len(elements) > MAX_CLOSURE_ORDER:
                raise ResourceLimitError(f"permutation closure exceeds {MAX_CLOSURE_ORDER}")
        frontier = new
    return elements, index


def from_permutations(perm_gens, name, degree=None):
    """Build a group from permutation generators (0-based image tuples)."""
    if not perm_gens:
        perm_gens, degree = [tuple()], 1
    if degree is None:
        degree = len(perm_gens[0])
    perm_gens = [tuple(p) for p in perm_gens]
    for p in perm_gens:
        if sorted(p) != list(range(degree)):
            raise FtreeError(f"not a permutation of 0..{degree - 1}: {p!r}")
    if degree > 12:
        raise FtreeError("permutation degree capped at 12 points")
    elements, index = _closure(perm_gens, degree)
    n = len(elements)
    if n > MAX_TABLE_ORDER:
        raise ResourceLimitError(f"order {n} too large to materialize a table")
    mul = tuple(tuple(index[_perm_mul(a, b)] for b in elements) for a in elements)
    inv = tuple(index[_perm_inv(a)] for a in elements)
    gens = tuple(sorted(index[g] for g in set(perm_gens) if index[g] != 0))
    if not gens:
        gens = (0,)
    return FiniteGroup(n, mul, inv, name, gens, tuple(elements))


def from_table(mul_rows, name="table"):
    """Build a group from an explicit multiplication table (ids 0..n-1)."""
    n = len(mul_rows)
    mul = tuple(tuple(r) for r in mul_rows)
    ident = None
    for e in range(n):
        if all(mul[e][j] == j and mul[j][e] == j for j in range(n)):
            ident = e
            break
    if ident is None:
        raise FtreeError("table has no identity")
    if ident != 0:
        order = [ident] + [x for x in range(n) if x != ident]
        pos = {x: i for i, x in enumerate(order)}
        mul = tuple(tuple(pos[mul[order[i]][order[j]]] for j in range(n)) for i in range(n))
    inv = []
    for i in range(n):
        for j in range(n):
            if mul[i][j] == 0:
                inv.append(j)
                break
        else:
            raise FtreeError(f"element {i} has no inverse")
    # spot-check associativity exhaustively for small tables
    if n <= 64:
        rng = range(n)
        for a in rng:
            for b in rng:
                ab = mul[a][b]
                for c in rng:
                    if mul[ab][c] != mul[a][mul[b][c]]:
                        raise FtreeError("table is not associative")
    gens = _find_generators(mul, n)
    return FiniteGroup(n, mul, inv, name, gens)


def _find_generators(mul, n):
    found = {0}
    gens = []
    for x in range(1, n):
        if x in found:
            continue
        gens.append(x)
        found = _closure_ids(mul, gens, n)
        if len(found) == n:
            break
    return tuple(gens) if gens else (0,)


def _closure_ids(mul, seed, n):
    members = {0}
    frontier = [0]
    seed = list(seed)
    while frontier:
        new = []
        for a in frontier:
            for g in seed:
                for x in (mul[a][g],):
                    if x not in members:
                        members.add(x)
                        new.append(x)
        frontier = new
    return members


def _cycles_to_perm(cycles, degree):
    img = list(range(degree))
    for cyc in cycles:
        for i, x in enumerate(cyc):
            img[x] = cyc[(i + 1) % len(cyc)]
    return tuple(img)


_PERM_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text, degree=None):
    """Parse cycle notation like '(1 2 3)(4 5)'; points are 1-based."""
    cycles = []
    maxpt = 0
    rest = text.replace(",", " ")
    if not _PERM_RE.search(rest):
        raise FtreeError(f"cannot parse permutation {text!r}")
    for m in _PERM_RE.finditer(rest):
        pts = [int(t) for t in m.group(1).split()]
        if len(pts) != len(set(pts)) or any(p < 1 for p in pts):
            raise FtreeError(f"bad cycle {m.group(0)!r}")
        maxpt = max(maxpt, *pts) if pts else maxpt
        if len(pts) > 1:
            cycles.append([p - 1 for p in pts])
    if degree is None:
        degree = maxpt
    return _cycles_to_perm(cycles, degree)


def build_group(spec):
    """Build a group from a CLI spec: A4, S5, Z6, D5, or perm:(1 2 3),(1 2)."""
    spec = spec.strip()
    m = re.fullmatch(r"[Zz](\d+)", spec)
    if m:
        n = int(m.group(1))
        if n < 1 or n > MAX_TABLE_ORDER:
            raise FtreeError(f"Z{n} out of range")
        if n == 1:
            return from_permutations([], f"Z{n}", degree=1)
        return from_permutations([_cycles_to_perm([list(range(n))], n)], f"Z{n}")
    m = re.fullmatch(r"[Dd](\d+)", spec)
    if m:
        n = int(m.group(1))
        if n < 2 or 2 * n > MAX_TABLE_ORDER:
            raise FtreeError(f"D{n} out of range")
        rot = _cycles_to_perm([list(range(n))], n)
        refl = tuple((n - i) % n for i in range(n))
        return from_permutations([rot, refl], f"D{n}")
    m = re.fullmatch(r"[Aa](\d+)", spec)
    if m:
        n = int(m.group(1))
        if not 3 <= n <= 6:
            raise FtreeError("A_n supported for 3 <= n <= 6")
        gens = [_cycles_to_perm([[0, 1, 2]], n)]
        if n > 3:
            cyc = list(range(n)) if n % 2 == 1 else list(range(1, n))
            gens.append(_cycles_to_perm([cyc], n))
        return from_permutations(gens, f"A{n}")
    m = re.fullmatch(r"[Ss](\d+)", spec)
    if m:
        n = int(m.group(1))
        if not 2 <= n <= 5:
            raise FtreeError("S_n supported for 2 <= n <= 5")
        gens = [_cycles_to_perm([[0, 1]], n)]
        if n > 2:
            gens.append(_cycles_to_perm([list(range(n))], n))
        return from_permutations(gens, f"S{n}")
    if spec.startswith("perm:"):
        body = spec[len("perm:"):]
        parts = _split_perm_list(body)
        perms = [parse_permutation(p) for p in parts]
        degree = max(len(p) for p in perms)
        perms = [parse_permutation(p, degree) for p in parts]
        return from_permutations(perms, spec)
    raise FtreeError(f"unknown group spec {spec!r}")


def _split_perm_list(body):
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p for p in (s.strip() for s in parts) if p]


# ---------------------------------------------------------------------------
# Subgroups


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: frozenset

    def __post_init__(self):
        if 0 not in self.members:
            raise FtreeError("subgroup must contain the identity")

    @property
    def order(self):
        return len(self.members)

    def sorted_members(self):
        return sorted(self.members)


def subgroup_closure(g, seed):
    seed = sorted(set(seed))
    for x in seed:
        if not 0 <= x < g.order:
            raise FtreeError(f"element id {x} out of range")
    members = {0}
    frontier = [0]
    mul = g.mul
    while frontier:
        new = []
        for a in frontier:
            row = mul[a]
            for s in seed:
                x = row[s]
                if x not in members:
                    members.add(x)
                    new.append(x)
        frontier = new
    return Subgroup(g, frozenset(members))


def normal_closure_within(g, seeds, ambient):
    """Smallest subgroup of ``ambient`` containing ``seeds`` and closed under
    conjugation by ``ambient``."""
    seeds = set(seeds)
    if not seeds <= ambient.members:
        raise FtreeError("seed lies outside the ambient subgroup")
    conjugates = {g.conjugate(s, a) for s in seeds for a in ambient.members}
    sub = subgroup_closure(g, conjugates)
    if not sub.members <= ambient.members:
        raise FtreeError("closure escaped the ambient subgroup")  # cannot happen
    return sub


def is_subgroup(g, members):
    return all(g.mul[a][b] in members for a in members for b in members)


# ---------------------------------------------------------------------------
# Automorphisms


def _element_words(g):
    """A word in g.generators for every element, from BFS."""
    words = {0: ()}
    frontier = [0]
    while frontier:
        new = []
        for a in frontier:
            for gi, gen in enumerate(g.generators):
                b = g.mul[a][gen]
                if b not in words:
                    words[b] = words[a] + (gi,)
                    new.append(b)
        frontier = new
    if len(words) != g.order:
        raise FtreeError("generator_set does not generate the group")
    return words


def automorphism_group(g):
    """All automorphisms of g, each as a permutation tuple of element ids."""
    if g.order > MAX_AUT_ORDER:
        raise ResourceLimitError(f"automorphism search capped at order {MAX_AUT_ORDER}")
    gens = list(g.generators)
    words = _element_words(g)
    orders = [g.element_order(x) for x in range(g.order)]
    candidates = [sorted(x for x in range(g.order) if orders[x] == orders[gen]) for gen in gens]
    autos = []

    def induced_map(images):
        out = [0] * g.order
        for x in range(g.order):
            acc = 0
            for gi in words[x]:
                acc = g.mul[acc][images[gi]]
            out[x] = acc
        return out

    def is_automorphism(phi):
        if len(set(phi)) != g.order:
            return False
        mul = g.mul
        for a in range(g.order):
            pa = phi[a]
            ra = mul[a]
            for gen in gens:
                if phi[ra[gen]] != mul[pa][phi[gen]]:
                    return False
        return True

    prefix_orders = [subgroup_closure(g, gens[: i + 1]).order for i in range(len(gens))]

    def backtrack(i, chosen):
        if i == len(gens):
            phi = induced_map(chosen)
            if is_automorphism(phi):
                autos.append(tuple(phi))
            return
        for cand in candidates[i]:
            # an automorphism preserves the order of every generated prefix subgroup
            if subgroup_closure(g, chosen + [cand]).order != prefix_orders[i]:
                continue
            backtrack(i + 1, chosen + [cand])

    backtrack(0, [])
    autos = sorted(set(autos))
    return autos


def inner_automorphisms(g):
    seen = set()
    for c in range(g.order):
        phi = tuple(g.conjugate(x, c) for x in range(g.order))
        seen.add(phi)
    return sorted(seen)


# ---------------------------------------------------------------------------
# Isomorphism classes of small subgroups


def subgroup_as_group(h):
    """Materialize a Subgroup as its own FiniteGroup (fresh numbering)."""
    g = h.parent
    members = [0] + [x for x in h.sorted_members() if x != 0]
    pos = {x: i for i, x in enumerate(members)}
    n = len(members)
    mul = tuple(tuple(pos[g.mul[a][b]] for b in members) for a in members)
    inv = tuple(pos[g.inv[a]] for a in members)
    return FiniteGroup(n, mul, inv, f"sub{n}", _find_generators(mul, n))


def _order_multiset(g):
    counts = {}
    for x in range(g.order):
        o = g.element_order(x)
        counts[o] = counts.get(o, 0) + 1
    return tuple(sorted(counts.items()))


_SMALL_BY_PROFILE = {
    (1, ()): "0",
    # order: {order-multiset: label}; covers all groups of order <= 12
    (4, ((1, 1), (2, 3))): "Z2xZ2",
    (4, ((1, 1), (2, 1), (4, 2))): "Z4",
    (6, ((1, 1), (2, 3), (3, 2))): "S3",
    (6, ((1, 1), (2, 1), (3, 2), (6, 2))): "Z6",
    (8, ((1, 1), (2, 7),)): "Z2xZ2xZ2",
    (8, ((1, 1), (2, 3), (4, 4))): "Z2xZ4",
    (8, ((1, 1), (2, 5), (4, 2))): "D4",
    (8, ((1, 1), (2, 1), (4, 6))): "Q8",
    (8, ((1, 1), (2, 1), (4, 2), (8, 4))): "Z8",
    (9, ((1, 1), (3, 8))): "Z3xZ3",
    (9, ((1, 1), (3, 2), (9, 6))): "Z9",
    (10, ((1, 1), (2, 5), (5, 4))): "D5",
    (10, ((1, 1), (2, 1), (5, 4), (10, 4))): "Z10",
    (12, ((1, 1), (2, 3), (3, 8))): "A4",
    (12, ((1, 1), (2, 7), (3, 2), (6, 2))): "D6",
    (12, ((1, 1), (2, 1), (3, 2), (4, 6), (6, 2))): "Dic3",
    (12, ((1, 1), (2, 3), (3, 2), (6, 6))): "Z2xZ6",
    (12, ((1, 1), (2, 1), (3, 2), (4, 2), (6, 2), (12, 4))): "Z12",
}


def _abelian_label(g):
    """Invariant-factor decomposition label for an abelian group, exact."""
    n = g.order
    orders = [g.element_order(x) for x in range(n)]

    def count_dividing(m, factors):
        prod = 1
        for d in factors:
            prod *= gcd(d, m)
        return prod

    actual = {m: sum(1 for o in orders if m % o == 0) for m in range(1, n + 1)}

    def chains(total, minimum):
        if total == 1:
            yield ()
            return
        d = minimum
        while d <= total:
            if total % d == 0:
                for rest in chains(total // d, d):
                    yield (d,) + rest
            d += 1

    for chain in chains(n, 2):
        ok = all(b % a == 0 for a, b in zip(chain, chain[1:]))
        if not ok:
            continue
        if all(count_dividing(m, chain) == actual[m] for m in actual):
            return "x".join(f"Z{d}" for d in chain)
    raise FtreeError("abelian decomposition failed")  # unreachable for true groups


def _named_catalogue(order):
    """Candidate named groups of a given order, for the exhaustive fallback."""
    out = []
    if order % 2 == 0 and order >= 6:
        n = order // 2
        if 2 <= n:
            try:
                out.append(build_group(f"D{n}"))
            except FtreeError:
                pass
    if order % 4 == 0:
        n = order // 4
        if n >= 2:
            out.append(_dicyclic(n))
    if order == 12:
        out.append(build_group("A4"))
    if order == 24:
        out.append(build_group("S4"))
        out.append(_direct_product(build_group("A4"), build_group("Z2"), "A4xZ2"))
        out.append(_sl23())
    if order == 18:
        out.append(_direct_product(build_group("Z3"), build_group("S3"), "Z3xS3"))
    if order == 20:
        out.append(_frobenius20())
    if order == 16:
        out.append(_direct_product(build_group("D4"), build_group("Z2"), "D4xZ2"))
        out.append(_direct_product(_dicyclic(2), build_group("Z2"), "Q8xZ2"))
    return out


def _direct_product(g1, g2, name):
    n = g1.order * g2.order
    if n > MAX_TABLE_ORDER:
        raise ResourceLimitError("direct product too large")

    def pid(a, b):
        return a * g2.order + b

    mul = [[0] * n for _ in range(n)]
    for a1 in range(g1.order):
        for b1 in range(g2.order):
            for a2 in range(g1.order):
                for b2 in range(g2.order):
                    mul[pid(a1, b1)][pid(a2, b2)] = pid(g1.mul[a1][a2], g2.mul[b1][b2])
    return from_table(mul, name)


def _dicyclic(n):
    """Dicyclic group of order 4n: <a, b | a^(2n)=1, b^2=a^n, b a b^-1 = a^-1>."""
    m = 4 * n
    # elements: a^i (i < 2n) and a^i b (i < 2n)
    def eid(i, j):
        return i + 2 * n * j

    mul = [[0] * m for _ in range(m)]
    for i in range(2 * n):
        for j in (0, 1):
            for k in range(2 * n):
                for l in (0, 1):
                    if j == 0:
                        i2, j2 = (i + k) % (2 * n), l
                    else:
                        # (a^i b)(a^k b^l) = a^(i-k) b^(1+l)
                        if l == 0:
                            i2, j2 = (i - k) % (2 * n), 1
                        else:
                            i2, j2 = (i - k + n) % (2 * n), 0
                    mul[eid(i, j)][eid(k, l)] = eid(i2, j2)
    name = "Q8" if n == 2 else f"Dic{n}"
    return from_table(mul, name)


def _sl23():
    # SL(2,3) as 2x2 matrices over GF(3)
    mats = []
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    if (a * d - b * c) % 3 == 1:
                        mats.append((a, b, c, d))
    idx = {m: i for i, m in enumerate(mats)}

    def mmul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % 3, (a * f + b * h) % 3,
                (c * e + d * g) % 3, (c * f + d * h) % 3)

    mul = [[idx[mmul(x, y)] for y in mats] for x in mats]
    return from_table(mul, "SL(2,3)")


def _frobenius20():
    # Z5 : Z4 acting faithfully, as permutations of 5 points
    a = _cycles_to_perm([[0, 1, 2, 3, 4]], 5)
    b = _cycles_to_perm([[1, 2, 4, 3]], 5)
    return from_permutations([a, b], "F20")


def are_isomorphic_groups(g1, g2):
    """Exhaustive isomorphism test for small groups."""
    if g1.order != g2.order:
        return False
    if _order_multiset(g1) != _order_multiset(g2):
        return False
    gens = list(g1.generators)
    words = _element_words(g1)
    orders2 = [g2.element_order(x) for x in range(g2.order)]
    cand = [sorted(x for x in range(g2.order) if orders2[x] == g1.element_order(gen))
            for gen in gens]

    def extend(images):
        out = [0] * g1.order
        for x in range(g1.order):
            acc = 0
            for gi in words[x]:
                acc = g2.mul[acc][images[gi]]
            out[x] = acc
        if len(set(out)) != g1.order:
            return None
        for a in range(g1.order):
            for gen in gens:
                if out[g1.mul[a][gen]] != g2.mul[out[a]][out[gen]]:
                    return None
        return out

    def backtrack(i, chosen):
        if i == len(gens):
            return extend(chosen) is not None
        for c in cand[i]:
            if backtrack(i + 1, chosen + [c]):
                return True
        return False

    return backtrack(0, [])


def _is_abelian(g):
    return all(g.mul[a][b] == g.mul[b][a] for a in range(g.order) for b in range(a))


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def iso_class(h):
    """Canonical label of a subgroup's abstract isomorphism type."""
    n = h.order
    if n > MAX_ISO_ORDER:
        raise ResourceLimitError(f"iso_class capped at order {MAX_ISO_ORDER}")
    if n == 1:
        return "0"
    g = subgroup_as_group(h)
    if _is_prime(n):
        return f"Z{n}"
    profile = (n, _order_multiset(g))
    if n <= 12:
        label = _SMALL_BY_PROFILE.get(profile)
        if label is not None:
            return label
    if _is_abelian(g):
        return _abelian_label(g)
    for named in _named_catalogue(n):
        if are_isomorphic_groups(g, named):
            return named.name
    multis = ",".join(f"{o}^{c}" for o, c in profile[1])
    return f"G{n}[{multis}]"
