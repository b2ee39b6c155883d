"""Handlebody links, fundamental trees, and the finite-group image invariants.

For a handlebody link with complement group pi_1(F0) and a finite group G,
the invariants enumerate homomorphisms pi_1(F0) -> G, classify them up to a
chosen notion of equivalence (nothing, conjugation, or automorphisms of G),
filter to the proper ones with respect to a component subset, and tabulate
the boundary-surface image together with the image of the handlebody-disk
kernel for every selected component.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace

from .abelian import PairingForm, abelian_invariants, standard_symplectic
from .errors import FtreeError
from .groups import Subgroup, iso_class, normal_closure_within, subgroup_closure
from .homsearch import (DEFAULT_NODE_BUDGET, classify, enumerate_homomorphisms,
                        is_surjective, plan_search)
from .trees import BasedTree, canonical_code, join
from .words import (Presentation, free_group, free_product, presentation_from_json,
                    presentation_to_json, shift_word, simplify_with_map, substitute)


@dataclass(frozen=True)
class PeripheralComponent:
    id: int
    genus: int
    meridians: tuple    # words in the ambient generators; duals first
    longitudes: tuple   # length == genus, or empty if unavailable
    label: str = ""

    def __post_init__(self):
        if self.genus < 0:
            raise FtreeError("negative genus")
        if self.genus >= 1 and not self.meridians:
            raise FtreeError(f"component {self.label or self.id}: no meridians")
        if self.longitudes and len(self.longitudes) != self.genus:
            raise FtreeError(
                f"component {self.label or self.id}: expected {self.genus} longitudes")
        object.__setattr__(self, "meridians", tuple(tuple(w) for w in self.meridians))
        object.__setattr__(self, "longitudes", tuple(tuple(w) for w in self.longitudes))


@dataclass(frozen=True)
class HandlebodyLink:
    ambient: Presentation
    components: tuple
    name: str = ""

    def __post_init__(self):
        ids = [c.id for c in self.components]
        if ids != sorted(set(ids)) or (ids and ids != list(range(1, len(ids) + 1))):
            raise FtreeError("component ids must be 1..n, distinct and increasing")
        for c in self.components:
            for w in c.meridians + c.longitudes:
                for x in w:
                    if not 1 <= abs(x) <= self.ambient.num_generators:
                        raise FtreeError(
                            f"component {c.label or c.id}: word letter {x} out of range")

    def component(self, cid):
        for c in self.components:
            if c.id == cid:
                return c
        raise FtreeError(f"unknown component id {cid}")


def link_from_diagram(code):
    from .diagram import wirtinger

    pres, extraction = wirtinger(code)
    comps = []
    for i, cp in enumerate(extraction.components, start=1):
        comps.append(PeripheralComponent(i, cp.genus, cp.meridians, cp.longitudes, cp.label))
    return HandlebodyLink(pres, tuple(comps), code.name)


def link_to_json(link):
    return {
        "name": link.name,
        "ambient": presentation_to_json(link.ambient),
        "components": [
            {
                "id": c.id,
                "label": c.label,
                "genus": c.genus,
                "meridians": [list(w) for w in c.meridians],
                "longitudes": [list(w) for w in c.longitudes],
            }
            for c in link.components
        ],
    }


def link_from_json(obj):
    pres = presentation_from_json(obj["ambient"])
    comps = []
    for c in obj["components"]:
        comps.append(PeripheralComponent(
            c["id"], c["genus"],
            tuple(tuple(w) for w in c["meridians"]),
            tuple(tuple(w) for w in c.get("longitudes", [])),
            c.get("label", "")))
    return HandlebodyLink(pres, tuple(comps), obj.get("name", ""))


def load_link(path):
    text = open(path).read()
    if path.endswith(".hld"):
        from .diagram import parse_diagram

        return link_from_diagram(parse_diagram(text))
    return link_from_json(json.loads(text))


# ---------------------------------------------------------------------------
# Peripheral subgroups under a homomorphism


def peripheral_image(h, comp):
    """Image in G of the boundary surface of one component."""
    g = h.target
    images = [h.evaluate(w) for w in comp.meridians + comp.longitudes]
    return subgroup_closure(g, images)


def kernel_image(h, comp, peripheral=None):
    """Image of Ker(pi_1(Sigma) -> pi_1(handlebody)): the normal closure of
    the meridian images inside the peripheral image."""
    g = h.target
    if peripheral is None:
        peripheral = peripheral_image(h, comp)
    seeds = {h.evaluate(w) for w in comp.meridians}
    return normal_closure_within(g, seeds, peripheral)


def is_proper(h, link, component_ids):
    """Surjective, but non-surjective on every selected boundary surface."""
    if not component_ids:
        raise FtreeError("component subset must be non-empty")
    if not is_surjective(h):
        return False
    for cid in component_ids:
        comp = link.component(cid)
        if peripheral_image(h, comp).order == h.target.order:
            return False
    return True


# ---------------------------------------------------------------------------
# G-image reports


@dataclass(frozen=True)
class ReportEntry:
    peripheral: tuple   # iso-class label per selected component
    kernels: tuple      # iso-class label per selected component
    count: int


@dataclass(frozen=True)
class GImageReport:
    link_name: str
    group_name: str
    mode: str
    component_ids: tuple
    component_labels: tuple
    total_proper: int
    entries: tuple

    def kernel_multiset(self):
        out = []
        for e in self.entries:
            out += [e.kernels] * e.count
        return sorted(out)

    def to_json(self):
        return {
            "link": self.link_name,
            "group": self.group_name,
            "mode": self.mode,
            "components": list(self.component_ids),
            "component_labels": list(self.component_labels),
            "proper_total": self.total_proper,
            "entries": [
                {"peripheral": list(e.peripheral), "kernels": list(e.kernels),
                 "count": e.count}
                for e in self.entries
            ],
        }


def _prepare_search(link, do_simplify):
    """Optionally simplify the ambient presentation, rewriting all
    peripheral words through the simplifying isomorphism."""
    if not do_simplify:
        return link
    simp, images = simplify_with_map(link.ambient)
    if simp.num_generators == link.ambient.num_generators:
        return link
    comps = []
    for c in link.components:
        comps.append(replace(
            c,
            meridians=tuple(substitute(w, images) for w in c.meridians),
            longitudes=tuple(substitute(w, images) for w in c.longitudes)))
    return HandlebodyLink(simp, tuple(comps), link.name)


def proper_orbits(link, g, component_ids, mode="automorphism", threads=1,
                  node_budget=DEFAULT_NODE_BUDGET, simplify=True):
    """Classify all homomorphisms and keep the proper orbits w.r.t. the
    selected components.  Returns (link_used, orbits)."""
    link = _prepare_search(link, simplify)
    homs = enumerate_homomorphisms(link.ambient, g, plan_search(link.ambient),
                                   threads=threads, node_budget=node_budget)
    orbits = classify(homs, g, mode)
    kept = [o for o in orbits if is_proper(o.representative, link, component_ids)]
    return link, kept


def g_image(link, g, component_ids, mode="automorphism", threads=1,
            node_budget=DEFAULT_NODE_BUDGET, simplify=True):
    """The G-image report of a handlebody link w.r.t. a component subset."""
    component_ids = tuple(sorted(set(component_ids)))
    for cid in component_ids:
        link.component(cid)
    slink, kept = proper_orbits(link, g, component_ids, mode, threads,
                                node_budget, simplify)
    counts = {}
    for o in kept:
        h = o.representative
        periph, kern = [], []
        for cid in component_ids:
            comp = slink.component(cid)
            p = peripheral_image(h, comp)
            k = kernel_image(h, comp, p)
            periph.append(iso_class(p))
            kern.append(iso_class(k))
        key = (tuple(periph), tuple(kern))
        counts[key] = counts.get(key, 0) + 1
    entries = tuple(ReportEntry(p, k, c)
                    for (p, k), c in sorted(counts.items()))
    labels = tuple(link.component(cid).label for cid in component_ids)
    return GImageReport(link.name, g.name, mode, component_ids, labels,
                        len(kept), entries)


def compare_g_images(report_a, report_b):
    """'distinguished' unless some relabeling of the components matches the
    two reports exactly."""
    k = len(report_a.component_ids)
    if k != len(report_b.component_ids):
        return "distinguished"
    if report_a.total_proper != report_b.total_proper:
        return "distinguished"
    a_entries = sorted((e.peripheral, e.kernels, e.count) for e in report_a.entries)
    for perm in itertools.permutations(range(k)):
        b_entries = sorted(
            (tuple(e.peripheral[i] for i in perm), tuple(e.kernels[i] for i in perm), e.count)
            for e in report_b.entries)
        if a_entries == b_entries:
            return "indistinguishable-at-this-invariant"
    return "distinguished"


def compare_k_fold(link_a, link_b, g, fold, mode="automorphism", threads=1,
                   node_budget=DEFAULT_NODE_BUDGET, simplify=True):
    """Compare the k-fold G-images: a single component relabeling must match
    the reports of all k-subsets simultaneously."""
    n_a, n_b = len(link_a.components), len(link_b.components)
    if n_a != n_b:
        return "distinguished"
    n = n_a
    ids = [c.id for c in link_a.components]
    reports_a = {}
    reports_b = {}
    for subset in itertools.combinations(ids, fold):
        reports_a[subset] = g_image(link_a, g, subset, mode, threads, node_budget, simplify)
        reports_b[subset] = g_image(link_b, g, subset, mode, threads, node_budget, simplify)

    def entries_of(report, positions):
        return sorted(
            (tuple(e.peripheral[i] for i in positions),
             tuple(e.kernels[i] for i in positions), e.count)
            for e in report.entries)

    for sigma in itertools.permutations(ids):
        to_b = {i: sigma[idx] for idx, i in enumerate(ids)}
        ok = True
        for subset in itertools.combinations(ids, fold):
            image = tuple(sorted(to_b[i] for i in subset))
            ra = reports_a[subset]
            rb = reports_b[image]
            # position p of component i in `subset` maps to the position of
            # to_b[i] in the sorted image subset
            positions = [image.index(to_b[i]) for i in subset]
            if (ra.total_proper != rb.total_proper
                    or entries_of(ra, range(fold)) != entries_of(rb, positions)):
                ok = False
                break
        if ok:
            return "indistinguishable-at-this-invariant"
    return "distinguished"


# ---------------------------------------------------------------------------
# Fundamental trees


@dataclass(frozen=True)
class FundTreeEdge:
    genus: int
    pairing: PairingForm
    to_parent: tuple   # image words of a1,b1,...,ag,bg in the parent group
    to_child: tuple

    def __post_init__(self):
        if self.pairing.size != 2 * self.genus:
            raise FtreeError("pairing size must be 2*genus")
        if len(self.to_parent) != 2 * self.genus or len(self.to_child) != 2 * self.genus:
            raise FtreeError("edge maps must list images of the 2g surface generators")


@dataclass(frozen=True)
class FundTree:
    shape: BasedTree
    node_groups: tuple   # Presentation per node
    edges: tuple         # FundTreeEdge per non-base node (index i-1 for node i)

    def __post_init__(self):
        if len(self.node_groups) != self.shape.node_count:
            raise FtreeError("one group per node required")
        if len(self.edges) != self.shape.node_count - 1:
            raise FtreeError("one edge record per non-base node required")
        for i in range(1, self.shape.node_count):
            e = self.edges[i - 1]
            if e.genus != self.shape.labels[i]:
                raise FtreeError("edge genus must match the tree label")
            parent = self.node_groups[self.shape.parents[i]]
            child = self.node_groups[i]
            for w in e.to_parent:
                for x in w:
                    if abs(x) > parent.num_generators:
                        raise FtreeError("edge word invalid in parent group")
            for w in e.to_child:
                for x in w:
                    if abs(x) > child.num_generators:
                        raise FtreeError("edge word invalid in child group")


def link_to_fundtree(link, handlebody_presentations=None):
    """Star-shaped fundamental tree of a handlebody link: ambient group at
    the base, a free group at each leaf, surface data on the edges."""
    n = len(link.components)
    parents = tuple([None] + [0] * n)
    labels = tuple([None] + [c.genus for c in link.components])
    shape = BasedTree(parents, labels)
    groups = [link.ambient]
    edges = []
    for idx, c in enumerate(link.components):
        if handlebody_presentations is not None:
            hp = handlebody_presentations[idx]
            if hp.num_generators != c.genus or hp.relators:
                raise FtreeError(
                    f"component {c.label or c.id}: handlebody group must be free of rank g")
        else:
            hp = free_group(c.genus)
        groups.append(hp)
        if len(c.longitudes) != c.genus or len(c.meridians) < c.genus:
            raise FtreeError(
                f"component {c.label or c.id}: need {c.genus} longitudes and dual meridians")
        to_parent = []
        to_child = []
        for i in range(c.genus):
            to_parent.append(c.longitudes[i])
            to_parent.append(c.meridians[i])
            to_child.append((i + 1,))   # a_i -> i-th free generator
            to_child.append(())         # b_i -> identity
        edges.append(FundTreeEdge(c.genus, standard_symplectic(c.genus),
                                  tuple(to_parent), tuple(to_child)))
    return FundTree(shape, tuple(groups), tuple(edges))


def graft_fundtree(t1, at, t2):
    """Graft t2 onto t1 at a node: join the shapes and take the free product
    at the merged node, re-indexing edge words through the injections."""
    if not 0 <= at < t1.shape.node_count:
        raise FtreeError(f"invalid node {at}")
    shape = join(t1.shape, at, t2.shape)
    merged = free_product(t1.node_groups[at], t2.node_groups[0])
    offset = merged.right_offset
    groups = list(t1.node_groups)
    groups[at] = merged.presentation
    groups += list(t2.node_groups[1:])
    edges = list(t1.edges)
    for i in range(1, t2.shape.node_count):
        e = t2.edges[i - 1]
        if t2.shape.parents[i] == 0:
            e = FundTreeEdge(e.genus, e.pairing,
                             tuple(shift_word(w, offset) for w in e.to_parent),
                             e.to_child)
        edges.append(e)
    return FundTree(shape, tuple(groups), tuple(edges))


def fundtree_fingerprint(t):
    """Necessary-condition fingerprint: tree shape with genus labels plus
    abelian invariants of every node group, AHU-canonicalized."""
    children = [[] for _ in range(t.shape.node_count)]
    for i in range(1, t.shape.node_count):
        children[t.shape.parents[i]].append(i)

    def code(v):
        inv = abelian_invariants(t.node_groups[v])
        head = f"[{inv}]".encode()
        parts = sorted(b"%d:" % t.shape.labels[c] + code(c) for c in children[v])
        return head + b"(" + b"".join(parts) + b")"

    return code(0)
