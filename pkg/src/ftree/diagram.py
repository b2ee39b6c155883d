"""Diagram codes for links and trivalent spatial graphs -> Wirtinger data.

File format (one object per ``.hld`` file, ``#`` starts a comment):

    component K1: a1 a2 a3
    component K2: loop b
    X: o=a3 u=a1>a2 s=+
    V: a1> a2< a3>

* ``component`` declares the arcs of one link component (``loop`` marks an
  arc that closes up with no endpoints).
* ``X:`` is a crossing: over-arc, under-in > under-out, sign.
* ``V:`` is a trivalent vertex; the written order is the counterclockwise
  cyclic order in the plane; ``>`` means the arc leaves the vertex, ``<``
  that it enters.

Wirtinger: one generator per arc; per crossing the relation
out = over^s * in * over^-s; per vertex the relation reading the cyclic
order with incoming arcs as the generator and outgoing as its inverse.

Peripheral data per component: one meridian per spine edge and one
longitude per independent spine cycle, all based at a common point on the
lowest-numbered arc, so that the generated subgroup is an honest conjugate
of the boundary-surface image.  Framings are left unnormalized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DiagramError
from .words import Presentation, concat, free_reduce, invert


@dataclass(frozen=True)
class Crossing:
    over: int
    under_in: int
    under_out: int
    sign: int
    line: int


@dataclass(frozen=True)
class Vertex:
    ends: tuple  # ((arc, outgoing?), ...) in counterclockwise order
    line: int


@dataclass(frozen=True)
class DiagramCode:
    arc_names: tuple
    component_of: tuple      # arc id -> component index (0-based)
    component_labels: tuple
    loops: frozenset         # arc ids declared as free loops
    crossings: tuple
    vertices: tuple
    name: str = ""

    @property
    def num_arcs(self):
        return len(self.arc_names)

    def arcs_of_component(self, comp):
        return [a for a in range(self.num_arcs) if self.component_of[a] == comp]


_ARC_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*")


def parse_diagram(text, name=""):
    arc_names = []
    arc_ids = {}
    component_of = []
    component_labels = []
    loops = set()
    crossings = []
    vertices = []

    def arc_lookup(tok, lineno):
        if tok not in arc_ids:
            raise DiagramError(f"unknown arc {tok!r}", lineno)
        return arc_ids[tok]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("name:"):
            name = line[len("name:"):].strip()
            continue
        if line.startswith("component"):
            body = line[len("component"):].strip()
            if ":" not in body:
                raise DiagramError("component line needs ':'", lineno)
            label, arcs_part = body.split(":", 1)
            label = label.strip()
            if not label:
                label = f"K{len(component_labels) + 1}"
            component_labels.append(label)
            comp = len(component_labels) - 1
            tokens = arcs_part.split()
            expect_loop = False
            for tok in tokens:
                if tok == "loop":
                    expect_loop = True
                    continue
                if not _ARC_RE.fullmatch(tok):
                    raise DiagramError(f"bad arc name {tok!r}", lineno)
                if tok in arc_ids:
                    raise DiagramError(f"arc {tok!r} declared twice", lineno)
                arc_ids[tok] = len(arc_names)
                arc_names.append(tok)
                component_of.append(comp)
                if expect_loop:
                    loops.add(arc_ids[tok])
                    expect_loop = False
            if expect_loop:
                raise DiagramError("dangling 'loop' keyword", lineno)
            if not tokens:
                raise DiagramError("component with no arcs", lineno)
        elif line.startswith("X:"):
            body = line[2:].strip()
            m = re.fullmatch(
                r"o=(\S+)\s+u=(\S+)>(\S+)\s+s=([+-])", body)
            if not m:
                raise DiagramError(f"cannot parse crossing {body!r}", lineno)
            over = arc_lookup(m.group(1), lineno)
            uin = arc_lookup(m.group(2), lineno)
            uout = arc_lookup(m.group(3), lineno)
            sign = 1 if m.group(4) == "+" else -1
            crossings.append(Crossing(over, uin, uout, sign, lineno))
        elif line.startswith("V:"):
            body = line[2:].split()
            ends = []
            for tok in body:
                m = re.fullmatch(r"(\S+?)([<>])", tok)
                if not m:
                    raise DiagramError(f"bad vertex end {tok!r} (need arc> or arc<)", lineno,
                                       column=line.index(tok) + 1)
                ends.append((arc_lookup(m.group(1), lineno), m.group(2) == ">"))
            if len(ends) != 3:
                raise DiagramError(f"vertex must be trivalent, got {len(ends)} ends", lineno)
            vertices.append(Vertex(tuple(ends), lineno))
        else:
            raise DiagramError(f"unrecognized line {line.split()[0]!r}", lineno)

    if not component_labels:
        raise DiagramError("no components declared", 0)

    code = DiagramCode(tuple(arc_names), tuple(component_of), tuple(component_labels),
                       frozenset(loops), tuple(crossings), tuple(vertices), name)
    _validate(code)
    return code


def _endpoints(code):
    """starts[a]/ends[a]: where arc a begins and finishes.

    Entries are ('X', crossing index) or ('V', vertex index) or None.
    """
    starts = [None] * code.num_arcs
    ends = [None] * code.num_arcs

    def set_once(table, arc, what, line):
        if table[arc] is not None:
            kind = "start" if table is starts else "end"
            raise DiagramError(
                f"arc {code.arc_names[arc]!r} has two {kind}s", line)
        table[arc] = what

    for ci, x in enumerate(code.crossings):
        set_once(ends, x.under_in, ("X", ci), x.line)
        set_once(starts, x.under_out, ("X", ci), x.line)
    for vi, v in enumerate(code.vertices):
        for arc, outgoing in v.ends:
            if outgoing:
                set_once(starts, arc, ("V", vi), v.line)
            else:
                set_once(ends, arc, ("V", vi), v.line)
    return starts, ends


def _validate(code):
    starts, ends = _endpoints(code)
    for a in range(code.num_arcs):
        if a in code.loops:
            if starts[a] is not None or ends[a] is not None:
                raise DiagramError(
                    f"arc {code.arc_names[a]!r} is marked loop but has endpoints", 0)
        else:
            if (starts[a] is None) != (ends[a] is None):
                raise DiagramError(
                    f"arc {code.arc_names[a]!r} is dangling (one endpoint)", 0)
            if starts[a] is None and ends[a] is None:
                raise DiagramError(
                    f"arc {code.arc_names[a]!r} has no endpoints; mark it 'loop'", 0)
    for x in code.crossings:
        if code.component_of[x.under_in] != code.component_of[x.under_out]:
            raise DiagramError("under-strand changes component", x.line)
    for v in code.vertices:
        comps = {code.component_of[a] for a, _ in v.ends}
        if len(comps) != 1:
            raise DiagramError("vertex joins arcs of different components", v.line)
    # spine connectivity per component is checked during extraction
    for comp in range(len(code.component_labels)):
        spine_of_component(code, comp)


# ---------------------------------------------------------------------------
# Spine structure


@dataclass(frozen=True)
class SpineEdge:
    arcs: tuple          # ordered arc chain
    letters: tuple       # per internal under-crossing: signed over-arc letter
    start: object        # vertex index or None (closed chain)
    end: object

    @property
    def closed(self):
        return self.start is None and self.end is None


def spine_of_component(code, comp):
    """Spine edges and vertex set of one component; raises if disconnected."""
    arcs = code.arcs_of_component(comp)
    starts, ends = _endpoints(code)
    successor = {}
    for x in code.crossings:
        if code.component_of[x.under_in] == comp:
            successor[x.under_in] = (x.under_out, x.over, x.sign)
    chains = []
    used = set()
    # open chains start at vertices
    for a in sorted(arcs):
        if a in used or a in code.loops:
            continue
        if starts[a] is not None and starts[a][0] == "V":
            chain = [a]
            letters = []
            used.add(a)
            cur = a
            while ends[cur][0] == "X":
                nxt, over, sign = successor[cur]
                letters.append(sign * (over + 1))
                cur = nxt
                if cur in used:
                    raise DiagramError("under-strand chain loops through a used arc",
                                       code.crossings[0].line if code.crossings else 0)
                used.add(cur)
                chain.append(cur)
            chains.append(SpineEdge(tuple(chain), tuple(letters),
                                    starts[a][1], ends[cur][1]))
    # closed chains (knot-style cycles and marked loops)
    for a in sorted(arcs):
        if a in used:
            continue
        if a in code.loops:
            used.add(a)
            chains.append(SpineEdge((a,), (), None, None))
            continue
        chain = [a]
        letters = []
        used.add(a)
        cur = a
        while True:
            if ends[cur][0] != "X":
                raise DiagramError(
                    f"arc {code.arc_names[cur]!r}: inconsistent chain", 0)
            nxt, over, sign = successor[cur]
            letters.append(sign * (over + 1))
            if nxt == a:
                break
            if nxt in used:
                raise DiagramError("under-strand chains tangled", 0)
            used.add(nxt)
            chain.append(nxt)
            cur = nxt
        chains.append(SpineEdge(tuple(chain), tuple(letters), None, None))

    vertex_ids = sorted({v for v in range(len(code.vertices))
                         if code.component_of[code.vertices[v].ends[0][0]] == comp})
    closed = [c for c in chains if c.closed]
    if closed and (vertex_ids or len(chains) > 1):
        raise DiagramError(
            f"component {code.component_labels[comp]!r} has a disconnected spine", 0)
    if not closed:
        # connectivity of the vertex graph
        adj = {v: set() for v in vertex_ids}
        for c in chains:
            adj[c.start].add(c.end)
            adj[c.end].add(c.start)
        if vertex_ids:
            seen = {vertex_ids[0]}
            stack = [vertex_ids[0]]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if seen != set(vertex_ids):
                raise DiagramError(
                    f"component {code.component_labels[comp]!r} has a disconnected spine", 0)
        elif not chains:
            raise DiagramError(
                f"component {code.component_labels[comp]!r} has no spine", 0)
    return chains, vertex_ids


def component_genus(code, comp):
    chains, vertex_ids = spine_of_component(code, comp)
    if len(vertex_ids) == 0:
        return 1  # a single closed chain
    return len(chains) - len(vertex_ids) + 1


def validate_against_link(code, expected_genera):
    """Check spine cycle ranks against expected per-component genera."""
    actual = [component_genus(code, c) for c in range(len(code.component_labels))]
    report = {
        "expected": list(expected_genera),
        "actual": actual,
        "ok": list(expected_genera) == actual,
    }
    return report


# ---------------------------------------------------------------------------
# Wirtinger presentation and peripheral extraction


@dataclass(frozen=True)
class ComponentPeripheral:
    label: str
    genus: int
    meridians: tuple   # first `genus` entries are dual to the longitudes
    longitudes: tuple


@dataclass(frozen=True)
class PeripheralExtraction:
    components: tuple


def _walk_word(letters):
    """Word of a forward walk: later under-passages multiply on the left."""
    out = ()
    for letter in letters:
        out = concat((letter,), out)
    return out


def wirtinger(code):
    """(Presentation, PeripheralExtraction) for a diagram."""
    n = code.num_arcs
    relators = []
    for x in code.crossings:
        o, s = x.over + 1, x.sign
        rel = free_reduce((s * o, x.under_in + 1, -s * o, -(x.under_out + 1)), n)
        relators.append(rel)
    for v in code.vertices:
        rel = []
        for arc, outgoing in v.ends:
            rel.append(-(arc + 1) if outgoing else (arc + 1))
        relators.append(free_reduce(tuple(rel), n))
    pres = Presentation(n, tuple(relators), tuple(code.arc_names),
                        metadata=code.name or None)

    comps = []
    for comp in range(len(code.component_labels)):
        comps.append(_extract_component(code, comp))
    return pres, PeripheralExtraction(tuple(comps))


def _extract_component(code, comp):
    chains, vertex_ids = spine_of_component(code, comp)
    label = code.component_labels[comp]
    base_arc = min(code.arcs_of_component(comp))

    if not vertex_ids:
        # single closed chain: genus-1 component
        edge = chains[0]
        k = edge.arcs.index(base_arc)
        rotated_letters = edge.letters[k:] + edge.letters[:k]
        longitude = _walk_word(rotated_letters)
        meridian = (base_arc + 1,)
        return ComponentPeripheral(label, 1, (meridian,), (longitude,))

    # locate the base arc's edge and split it at the basepoint
    base_edge = next(c for c in chains if base_arc in c.arcs)
    p = base_edge.arcs.index(base_arc)
    # walk-graph nodes: vertex ids plus the virtual basepoint node "beta"
    BETA = "beta"
    walk_edges = []  # (key, start_node, end_node, forward word, dual meridian info)
    for c in chains:
        if c is base_edge:
            pre_letters, post_letters = c.letters[:p], c.letters[p:]
            walk_edges.append(("post", BETA, c.end, _walk_word(post_letters), None))
            walk_edges.append(("pre", c.start, BETA, _walk_word(pre_letters), None))
        else:
            walk_edges.append((c.arcs[0], c.start, c.end, _walk_word(c.letters), c))

    def edge_sort_key(entry):
        key = entry[0]
        if key == "post":
            return (-2,)
        if key == "pre":
            return (-1,)
        return (key,)

    walk_edges.sort(key=edge_sort_key)

    # BFS spanning tree from beta; R[node] = word of the walk beta -> node
    reach = {BETA: ()}
    order = [BETA]
    tree = set()
    queue = [BETA]
    while queue:
        node = queue.pop(0)
        for idx, (key, s, t, fwd, _c) in enumerate(walk_edges):
            if idx in tree:
                continue
            if s == node and t not in reach:
                reach[t] = concat(fwd, reach[node])
                tree.add(idx)
                order.append(t)
                queue.append(t)
            elif t == node and s not in reach:
                reach[s] = concat(invert(fwd), reach[node])
                tree.add(idx)
                order.append(s)
                queue.append(s)

    if set(reach) != {BETA, *vertex_ids}:
        raise DiagramError(f"component {label!r} walk graph is disconnected", 0)

    longitudes = []
    dual_meridians = []
    for idx, (key, s, t, fwd, chain) in enumerate(walk_edges):
        if idx in tree:
            continue
        # cycle beta ->tree-> s ->edge-> t ->tree-> beta
        longitude = concat(invert(reach[t]), fwd, reach[s])
        longitudes.append(longitude)
        if chain is None:
            # the split base edge closed up: its dual meridian is the base arc
            dual_meridians.append((base_arc + 1,))
        else:
            m = concat(invert(reach[s]), (chain.arcs[0] + 1,), reach[s])
            dual_meridians.append(m)

    nontree = [idx for idx in range(len(walk_edges)) if idx not in tree]
    dual_chain_ids = {id(walk_edges[idx][4]) for idx in nontree
                      if walk_edges[idx][4] is not None}
    base_is_dual = any(walk_edges[idx][4] is None for idx in nontree)

    other_meridians = []
    if not base_is_dual:
        other_meridians.append((base_arc + 1,))
    for key, s, t, fwd, chain in walk_edges:
        if chain is None or id(chain) in dual_chain_ids:
            continue
        m = concat(invert(reach[s]), (chain.arcs[0] + 1,), reach[s])
        other_meridians.append(m)

    genus = len(longitudes)
    meridians = tuple(dual_meridians) + tuple(other_meridians)
    return ComponentPeripheral(label, genus, meridians, tuple(longitudes))
