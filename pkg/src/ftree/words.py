"""Words and finitely presented groups.

A word is a tuple of nonzero signed integers: letter ``+k`` is generator
``k-1``, letter ``-k`` its inverse.  Words are kept freely reduced, the
empty tuple is the identity.  Relators are additionally cyclically reduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FtreeError, MalformedWordError, ResourceLimitError

Word = tuple  # tuple of nonzero signed ints

MAX_WORD_LETTERS = 1 << 20


def free_reduce(letters, num_generators=None):
    """Freely reduce a raw letter sequence with a single stack scan."""
    if len(letters) > MAX_WORD_LETTERS:
        raise ResourceLimitError(f"word length {len(letters)} exceeds cap {MAX_WORD_LETTERS}")
    out = []
    for x in letters:
        if not isinstance(x, int) or x == 0:
            raise MalformedWordError(f"bad letter {x!r}")
        if num_generators is not None and abs(x) > num_generators:
            raise MalformedWordError(f"letter {x} outside generator range 1..{num_generators}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word):
    """Cyclically reduce an already freely reduced word."""
    w = list(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def invert(word):
    return tuple(-x for x in reversed(word))


def concat(*words):
    out = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    if len(out) > MAX_WORD_LETTERS:
        raise ResourceLimitError("word length cap exceeded")
    return tuple(out)


def conjugate(word, by):
    """by * word * by^-1"""
    return concat(by, word, invert(by))


def commutator(a, b):
    return concat(a, b, invert(a), invert(b))


def substitute(word, images):
    """Rewrite ``word`` through ``images``, the target word for each generator."""
    out = []
    for x in word:
        img = images[abs(x) - 1] if x > 0 else invert(images[abs(x) - 1])
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    if len(out) > MAX_WORD_LETTERS:
        raise ResourceLimitError("word length cap exceeded during substitution")
    return tuple(out)


@dataclass(frozen=True)
class Presentation:
    """A finitely presented group; relators freely and cyclically reduced."""

    num_generators: int
    relators: tuple = ()
    names: tuple = None
    metadata: str = None

    def __post_init__(self):
        if self.num_generators < 0:
            raise FtreeError("negative generator count")
        rels = tuple(cyclic_reduce(free_reduce(r, self.num_generators)) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.num_generators:
                raise FtreeError("name count does not match generator count")
            if len(set(names)) != len(names):
                raise FtreeError("duplicate generator names")
            object.__setattr__(self, "names", names)

    def generator_name(self, gid):
        if self.names is not None:
            return self.names[gid]
        return default_names(self.num_generators)[gid]

    def word_str(self, word):
        """Render a word with uppercase letters for inverses."""
        if not word:
            return "1"
        parts = []
        for x in word:
            name = self.generator_name(abs(x) - 1)
            parts.append(name if x > 0 else name.upper())
        return " ".join(parts)


def default_names(n):
    base = "abcdefghijklmnopqrstuvwxyz"
    if n <= len(base):
        return tuple(base[:n])
    return tuple(f"g{i}" for i in range(n))


def free_group(rank, names=None):
    return Presentation(rank, (), names)


def surface_group(genus):
    """Standard genus-g surface group <a1,b1,...,ag,bg | prod [ai,bi]>."""
    if genus < 0:
        raise FtreeError("genus must be >= 0")
    rel = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        rel += [a, b, -a, -b]
    names = []
    for i in range(genus):
        suffix = str(i + 1) if genus > 1 else ""
        names += [f"a{suffix}", f"b{suffix}"]
    relators = (tuple(rel),) if genus > 0 else ()
    return Presentation(2 * genus, relators, tuple(names) if names else None)


@dataclass(frozen=True)
class FreeProductResult:
    presentation: Presentation
    left_offset: int
    right_offset: int


def free_product(p, q):
    """Free product P * Q; Q's generators are shifted up by P's count."""
    off = p.num_generators
    shifted = tuple(tuple(x + off if x > 0 else x - off for x in r) for r in q.relators)
    names = None
    if p.names is not None and q.names is not None and not set(p.names) & set(q.names):
        names = p.names + q.names
    pres = Presentation(off + q.num_generators, p.relators + shifted, names)
    return FreeProductResult(pres, 0, off)


def shift_word(word, offset):
    return tuple(x + offset if x > 0 else x - offset for x in word)


# ---------------------------------------------------------------------------
# Tietze transformations


def tietze_move(p, move, seed=0):
    """Apply one Tietze move; returns (presentation, applied?).

    Inapplicable moves return the input presentation unchanged with
    ``applied`` False.  ``seed`` deterministically selects among choices.
    """
    if move == "add-redundant-relator":
        if not p.relators:
            # a trivially redundant relator: empty consequence -> nothing to add
            return p, False
        r = p.relators[seed % len(p.relators)]
        conj = _seed_word(p, seed)
        new = cyclic_reduce(conjugate(r, conj))
        return Presentation(p.num_generators, p.relators + (new,), p.names, p.metadata), True
    if move == "remove-redundant-relator":
        # only remove an exact duplicate (up to cyclic rotation / inversion)
        for i, r in enumerate(p.relators):
            rest = p.relators[:i] + p.relators[i + 1:]
            if any(_same_relator(r, s) for s in rest):
                return Presentation(p.num_generators, rest, p.names, p.metadata), True
        return p, False
    if move == "add-generator-with-definition":
        g = p.num_generators + 1
        w = _seed_word(p, seed)
        # relator g * w^-1 defines g := w
        rel = (g,) + invert(w)
        names = p.names + (f"t{g}",) if p.names is not None else None
        try:
            return Presentation(g, p.relators + (rel,), names, p.metadata), True
        except FtreeError:
            return p, False
    if move == "remove-defined-generator":
        q = _eliminate_one(p)
        if q is None:
            return p, False
        return q, True
    raise FtreeError(f"unknown Tietze move {move!r}")


def _seed_word(p, seed):
    """Small deterministic word in p's generators derived from seed."""
    if p.num_generators == 0:
        return ()
    letters = []
    s = seed & 0xFFFF
    for _ in range(1 + (seed % 3)):
        gid = (s % p.num_generators) + 1
        sign = 1 if (s >> 4) % 2 == 0 else -1
        letters.append(sign * gid)
        s = (s * 2654435761 + 1) & 0xFFFFFFFF
    return free_reduce(letters)


def _same_relator(r, s):
    if len(r) != len(s):
        return False
    for cand in (s, invert(s)):
        for k in range(max(1, len(cand))):
            if r == cand[k:] + cand[:k]:
                return True
    return len(r) == 0 and len(s) == 0


def _find_defining_relator(p):
    """Lowest eliminable generator: a relator using some generator exactly once."""
    best = None  # (gid, relator index, position)
    for ri, r in enumerate(p.relators):
        counts = {}
        for x in r:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        for pos, x in enumerate(r):
            g = abs(x)
            if counts[g] == 1:
                if best is None or g < best[0]:
                    best = (g, ri, pos)
    return best


def _eliminate_one(p):
    found = _find_defining_relator(p)
    if found is None:
        return None
    gid, ri, pos = found
    r = p.relators[ri]
    # rotate so the single occurrence is first: r = g^e * w  =>  g^e = w^-1
    rot = r[pos:] + r[:pos]
    head, tail = rot[0], rot[1:]
    value = invert(tail) if head > 0 else tail  # word equal to generator gid
    images = []
    for g in range(1, p.num_generators + 1):
        if g < gid:
            images.append((g,))
        elif g == gid:
            images.append(tuple(x if abs(x) < gid else (x - 1 if x > 0 else x + 1) for x in value))
        else:
            images.append((g - 1,))
    # value may itself mention gid only if counts were wrong; it cannot by construction
    new_rels = []
    for i, rel in enumerate(p.relators):
        if i == ri:
            continue
        sub = cyclic_reduce(substitute(rel, images))
        if sub:
            new_rels.append(sub)
    names = None
    if p.names is not None:
        names = tuple(n for i, n in enumerate(p.names) if i != gid - 1)
    return Presentation(p.num_generators - 1, tuple(new_rels), names, p.metadata)


def simplify_with_map(p):
    """Greedy defined-generator elimination until fixpoint.

    Returns (q, images) with ``images[i]`` the word in q's generators that the
    i-th original generator maps to under the simplifying isomorphism.
    """
    images = [(g,) for g in range(1, p.num_generators + 1)]
    cur = _dedup_relators(p)
    while True:
        found = _find_defining_relator(cur)
        if found is None:
            break
        gid = found[0]
        nxt = _eliminate_one(cur)
        # elimination map for this step on the current presentation
        step = _elimination_images(cur, found)
        images = [substitute(w, step) for w in images]
        cur = _dedup_relators(nxt)
    return cur, tuple(images)


def _elimination_images(p, found):
    gid, ri, pos = found
    r = p.relators[ri]
    rot = r[pos:] + r[:pos]
    head, tail = rot[0], rot[1:]
    value = invert(tail) if head > 0 else tail
    step = []
    for g in range(1, p.num_generators + 1):
        if g < gid:
            step.append((g,))
        elif g == gid:
            step.append(tuple(x if abs(x) < gid else (x - 1 if x > 0 else x + 1) for x in value))
        else:
            step.append((g - 1,))
    return step


def _dedup_relators(p):
    seen = []
    for r in p.relators:
        if not r:
            continue
        if any(_same_relator(r, s) for s in seen):
            continue
        seen.append(r)
    if len(seen) == len(p.relators):
        return p
    return Presentation(p.num_generators, tuple(seen), p.names, p.metadata)


def simplify(p):
    return simplify_with_map(p)[0]


# ---------------------------------------------------------------------------
# Text and JSON formats


def parse_presentation(text):
    """Parse the text format: 'gens: x, y' then 'rel: x y X Y' lines."""
    names = None
    rels = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("gens:"):
            body = line[len("gens:"):].strip()
            names = tuple(t.strip() for t in body.replace(",", " ").split()) if body else ()
        elif line.startswith("rel:"):
            if names is None:
                raise FtreeError(f"line {lineno}: rel before gens")
            body = line[len("rel:"):].split()
            word = []
            for tok in body:
                low = tok.lower()
                if low not in names:
                    raise MalformedWordError(f"line {lineno}: unknown generator {tok!r}")
                gid = names.index(low) + 1
                word.append(gid if tok == low else -gid)
            rels.append(tuple(word))
        else:
            raise FtreeError(f"line {lineno}: unrecognized line {line!r}")
    if names is None:
        raise FtreeError("missing gens: line")
    return Presentation(len(names), tuple(rels), names if names else None)


def format_presentation(p):
    lines = ["gens: " + ", ".join(p.generator_name(i) for i in range(p.num_generators))]
    for r in p.relators:
        toks = []
        for x in r:
            name = p.generator_name(abs(x) - 1)
            toks.append(name if x > 0 else name.upper())
        lines.append("rel: " + " ".join(toks))
    return "\n".join(lines) + "\n"


def presentation_to_json(p):
    return {
        "generators": [p.generator_name(i) for i in range(p.num_generators)],
        "relators": [list(r) for r in p.relators],
    }


def presentation_from_json(obj):
    gens = obj["generators"]
    if isinstance(gens, int):
        n, names = gens, None
    else:
        n, names = len(gens), tuple(gens)
    rels = tuple(tuple(r) for r in obj.get("relators", []))
    return Presentation(n, rels, names)
