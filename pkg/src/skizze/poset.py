"""Generic strata as non-crossing chord diagrams, and the degeneration
poset: closure of the generic codes under contracting moves, with cover
relations and the unique most-degenerate element (the 4n-star)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapExceeded, TraceFailure
from .graph import BLUE, RED, GaussGraph, Vertex, canonical_code, decode, validate
from .moves import apply_contract, enumerate_moves

POSET_CAP = 4


def star_graph(n: int) -> GaussGraph:
    """One root of multiplicity n with rays to every slot."""
    vs = [Vertex(0, "root", mult=n)]
    rot = {0: []}
    colors = {}
    for k in range(4 * n):
        vs.append(Vertex(1 + k, "leaf", slot=k))
        rot[0].append(1 + k)
        rot[1 + k] = [0]
        colors[frozenset((0, 1 + k))] = RED if k % 2 == 0 else BLUE
    return GaussGraph(n, vs, rot, colors)


def maximal_element(n: int) -> str:
    return canonical_code(star_graph(n))


def noncrossing_matchings(points):
    """All non-crossing perfect matchings of cyclically ordered points."""
    pts = list(points)
    if not pts:
        return [[]]
    out = []
    first = pts[0]
    for i in range(1, len(pts), 2):
        inside = pts[1:i]
        outside = pts[i + 1:]
        for m1 in noncrossing_matchings(inside):
            for m2 in noncrossing_matchings(outside):
                out.append([(first, pts[i])] + m1 + m2)
    return out


def chords_cross(a, b, c, d, modulus):
    """Do chords {a,b} and {c,d} interleave on the circle of slots?"""
    span = (b - a) % modulus
    inside_c = 0 < (c - a) % modulus < span
    inside_d = 0 < (d - a) % modulus < span
    return inside_c != inside_d


def x_forest(n, red_chords, blue_chords) -> GaussGraph:
    """Forest of n X-trees from matched (crossing) red/blue chord pairs."""
    modulus = 4 * n
    pairs = []
    for r in red_chords:
        partners = [b for b in blue_chords if chords_cross(*r, *b, modulus)]
        if len(partners) != 1:
            raise TraceFailure(f"red chord {r} crosses {len(partners)} blue chords")
        pairs.append((r, partners[0]))
    vertices = []
    rotations = {}
    colors = {}
    leaf_id = {}
    for slot in range(modulus):
        v = Vertex(n + slot, "leaf", slot=slot)
        vertices.append(v)
        leaf_id[slot] = v.id
    for i, (r, b) in enumerate(pairs):
        root = Vertex(i, "root", mult=1)
        vertices.append(root)
        slots = sorted(list(r) + list(b))
        rotations[i] = [leaf_id[s] for s in slots]
        for s in slots:
            rotations[leaf_id[s]] = [i]
            colors[frozenset((i, leaf_id[s]))] = RED if s % 2 == 0 else BLUE
    return GaussGraph(n, vertices, rotations, colors)


def enumerate_generic(n: int) -> set:
    """Codes of all forests of n X-trees: non-crossing matchings of even
    and odd slots whose chord interleaving is a red/blue bijection."""
    modulus = 4 * n
    evens = list(range(0, modulus, 2))
    odds = list(range(1, modulus, 2))
    out = set()
    for red in noncrossing_matchings(evens):
        for blue in noncrossing_matchings(odds):
            ok = all(
                sum(chords_cross(*r, *b, modulus) for b in blue) == 1 for r in red
            ) and all(
                sum(chords_cross(*r, *b, modulus) for r in red) == 1 for b in blue
            )
            if not ok:
                continue
            g = x_forest(n, red, blue)
            rep = validate(g)
            if not rep.ok:
                raise TraceFailure(f"generic construction invalid: {rep}")
            out.add(canonical_code(g))
    return out


@dataclass
class Poset:
    """Degeneration order on canonical codes with recorded covers."""

    n: int
    parents: dict = field(default_factory=dict)  # code -> {parent code}
    children: dict = field(default_factory=dict)
    cover_kinds: dict = field(default_factory=dict)  # (child, parent) -> {kind}

    @property
    def codes(self):
        return sorted(self.parents)

    def maximal_nodes(self):
        return sorted(c for c in self.parents if not self.parents[c])

    def minimal_nodes(self):
        return sorted(c for c in self.parents if not self.children[c])

    def is_below(self, a, b):
        """Reflexive-transitive reachability a ≼ b along covers."""
        if a == b:
            return True
        seen = {a}
        queue = [a]
        while queue:
            x = queue.pop()
            for p in self.parents.get(x, ()):
                if p == b:
                    return True
                if p not in seen:
                    seen.add(p)
                    queue.append(p)
        return False

    def neighbors(self, code):
        return {
            "parents": sorted(self.parents.get(code, ())),
            "children": sorted(self.children.get(code, ())),
            "kinds": {p: sorted(self.cover_kinds[(code, p)])
                      for p in self.parents.get(code, ())},
        }


def build_poset(n: int, cap: int = POSET_CAP) -> Poset:
    """Close the generic codes under contracting moves (BFS, deduplicated
    by code); verify the unique maximal element is the 4n-star."""
    if n > cap:
        raise CapExceeded(f"poset cap is {cap}, requested n={n}",
                          estimate=4 ** (2 * n))
    poset = Poset(n=n)
    frontier = sorted(enumerate_generic(n))
    for code in frontier:
        poset.parents.setdefault(code, set())
        poset.children.setdefault(code, set())
    queue = list(frontier)
    while queue:
        code = queue.pop(0)
        g = decode(code)
        for mv in enumerate_moves(g):
            h = apply_contract(g, mv)
            pcode = canonical_code(h)
            if pcode not in poset.parents:
                poset.parents[pcode] = set()
                poset.children[pcode] = set()
                queue.append(pcode)
            poset.parents[code].add(pcode)
            poset.children[pcode].add(code)
            poset.cover_kinds.setdefault((code, pcode), set()).add(mv.kind)
    tops = poset.maximal_nodes()
    star = maximal_element(n)
    if tops != [star]:
        raise TraceFailure(f"maximal nodes {tops} != [{star}]")
    return poset


def to_catalog(poset: Poset) -> str:
    """One node per line: code TAB parent-codes TAB move-kinds (sorted)."""
    lines = []
    for code in poset.codes:
        ps = sorted(poset.parents[code])
        kinds = [
            "+".join(sorted(poset.cover_kinds[(code, p)])) for p in ps
        ]
        lines.append("\t".join([code, ",".join(ps), ",".join(kinds)]))
    return "\n".join(lines) + "\n"


def from_catalog(text: str) -> Poset:
    parents = {}
    children = {}
    kinds = {}
    n = None
    for line in text.strip().splitlines():
        code, ps, ks = (line.split("\t") + ["", ""])[:3]
        n = int(code[1:code.index("|")])
        parents.setdefault(code, set())
        children.setdefault(code, set())
        plist = [p for p in ps.split(",") if p]
        klist = [k for k in ks.split(",") if k]
        for p, k in zip(plist, klist):
            parents[code].add(p)
            children.setdefault(p, set()).add(code)
            kinds[(code, p)] = set(k.split("+"))
    return Poset(n=n, parents=parents, children=children, cover_kinds=kinds)
