"""Based, edge-labeled trees: canonical codes, subdivision, join, stars.

A tree is stored as parent pointers with node 0 the base; every non-base
node carries the integer label (genus) of the edge to its parent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import FtreeError


@dataclass(frozen=True)
class BasedTree:
    parents: tuple   # parents[0] is None
    labels: tuple    # labels[0] is None; labels[i] >= 0 labels edge i--parent
    payloads: tuple = None  # optional opaque annotation per node

    def __post_init__(self):
        n = len(self.parents)
        if n < 1 or self.parents[0] is not None or self.labels[0] is not None:
            raise FtreeError("node 0 must be the base with no parent/label")
        if len(self.labels) != n:
            raise FtreeError("labels length mismatch")
        for i in range(1, n):
            p = self.parents[i]
            if not isinstance(p, int) or not 0 <= p < n or p == i:
                raise FtreeError(f"bad parent for node {i}")
            if not isinstance(self.labels[i], int) or self.labels[i] < 0:
                raise FtreeError(f"bad label for node {i}")
        # connectivity/acyclicity: every node must reach the base
        for i in range(1, n):
            seen, j = set(), i
            while j != 0:
                if j in seen:
                    raise FtreeError("parent pointers contain a cycle")
                seen.add(j)
                j = self.parents[j]
        if self.payloads is not None and len(self.payloads) != n:
            raise FtreeError("payloads length mismatch")

    @property
    def node_count(self):
        return len(self.parents)

    @property
    def edge_count(self):
        return len(self.parents) - 1

    def children(self, v):
        return [i for i in range(1, self.node_count) if self.parents[i] == v]

    def edges(self):
        """(child, parent, label) triples; the edge id is the child node."""
        return [(i, self.parents[i], self.labels[i]) for i in range(1, self.node_count)]


def depth(t, node):
    d, j = 0, node
    while j != 0:
        j = t.parents[j]
        d += 1
    return d


def canonical_code(t):
    """AHU-style code: equal iff trees are isomorphic as based labeled trees."""
    children = [[] for _ in range(t.node_count)]
    for i in range(1, t.node_count):
        children[t.parents[i]].append(i)

    def code(v):
        parts = sorted(b"%d:" % t.labels[c] + code(c) for c in children[v])
        return b"(" + b"".join(parts) + b")"

    return code(0)


def are_isomorphic(a, b):
    return canonical_code(a) == canonical_code(b)


def reroot(t, new_base):
    """The same unbased labeled tree, re-rooted at ``new_base``."""
    n = t.node_count
    adj = [[] for _ in range(n)]
    for i in range(1, n):
        adj[i].append((t.parents[i], t.labels[i]))
        adj[t.parents[i]].append((i, t.labels[i]))
    order = [new_base]
    parent = {new_base: None}
    lab = {new_base: None}
    queue = [new_base]
    while queue:
        v = queue.pop(0)
        for w, l in sorted(adj[v]):
            if w not in parent:
                parent[w] = v
                lab[w] = l
                order.append(w)
                queue.append(w)
    pos = {v: i for i, v in enumerate(order)}
    parents = tuple(None if parent[v] is None else pos[parent[v]] for v in order)
    labels = tuple(lab[v] for v in order)
    payloads = None
    if t.payloads is not None:
        payloads = tuple(t.payloads[v] for v in order)
    return BasedTree(parents, labels, payloads)


def unbased_equal(a, b):
    """Equality after forgetting the base: try all re-rootings."""
    if a.node_count != b.node_count:
        return False
    code_a = min(canonical_code(reroot(a, v)) for v in range(a.node_count))
    code_b = min(canonical_code(reroot(b, v)) for v in range(b.node_count))
    return code_a == code_b


@dataclass(frozen=True)
class BaryDiagram:
    """Barycentric subdivision: one new node per edge, spanning two arrows."""

    original: BasedTree
    barycenters: tuple  # barycenter id (in the subdivided numbering) per edge
    arrows: tuple       # (barycenter, endpoint) pairs

    @property
    def node_count(self):
        return self.original.node_count + self.original.edge_count


def subdivision(t):
    n = t.node_count
    barys = tuple(n + k for k in range(t.edge_count))
    arrows = []
    for k, (child, parent, _label) in enumerate(t.edges()):
        arrows.append((barys[k], child))
        arrows.append((barys[k], parent))
    return BaryDiagram(t, barys, tuple(arrows))


def join(t1, at, t2):
    """Identify t2's base with node ``at`` of t1; base of the result is t1's."""
    if not 0 <= at < t1.node_count:
        raise FtreeError(f"invalid attachment node {at}")
    n1 = t1.node_count
    parents = list(t1.parents)
    labels = list(t1.labels)
    payloads = list(t1.payloads) if t1.payloads is not None else None
    mapping = {0: at}
    for i in range(1, t2.node_count):
        mapping[i] = n1 + i - 1
    for i in range(1, t2.node_count):
        parents.append(mapping[t2.parents[i]])
        labels.append(t2.labels[i])
        if payloads is not None:
            payloads.append(t2.payloads[i] if t2.payloads is not None else None)
    return BasedTree(tuple(parents), tuple(labels),
                     tuple(payloads) if payloads is not None else None)


def star_decomposition(t):
    """One star per node: the node with its incident edges only."""
    out = []
    for v in range(t.node_count):
        labels = [None]
        if v != 0:
            labels.append(t.labels[v])
        for c in t.children(v):
            labels.append(t.labels[c])
        parents = tuple([None] + [0] * (len(labels) - 1))
        out.append((v, BasedTree(parents, tuple(labels))))
    return out


def tree_to_json(t):
    return {"parents": list(t.parents), "labels": list(t.labels)}


def tree_from_json(obj):
    parents = tuple(obj["parents"])
    labels = tuple(obj["labels"])
    return BasedTree(parents, labels)


def load_tree(path):
    with open(path) as fh:
        return tree_from_json(json.load(fh))
