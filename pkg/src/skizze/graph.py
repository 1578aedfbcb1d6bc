"""Decorated planar forests: rotation systems, quadrant-colored faces,
validation against the decoration rules, and canonical text codes.

A graph is built from neighbor-list rotations (counterclockwise order of
adjacent vertices at every vertex); darts (half-edges) are derived.  Since
valid graphs are loopless simple forests, a dart is identified by its
(origin, head) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ColoringContradiction, InvalidInput, StructuralError

RED = "R"
BLUE = "B"
FACE_COLORS = ("A", "B", "C", "D")

# crossing a Blue edge swaps A<->B and C<->D; crossing Red swaps A<->D, B<->C
_SWAP = {
    BLUE: {"A": "B", "B": "A", "C": "D", "D": "C"},
    RED: {"A": "D", "D": "A", "B": "C", "C": "B"},
}


def slot_color(k: int) -> str:
    """Asymptotic slot parity: even slots carry the Im P = 0 (red) rays."""
    return RED if k % 2 == 0 else BLUE


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str  # "root" | "crit" | "leaf"
    mult: int = 1  # root multiplicity
    slot: int = -1  # leaf slot
    position: complex | None = None


@dataclass(frozen=True)
class Face:
    id: int
    color: str
    darts: tuple  # dart ids around the face (face lies to the right)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    def add(self, rule: str, where, message: str):
        self.violations.append((rule, where, message))

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "valid"
        return "; ".join(f"{r}@{w}: {m}" for r, w, m in self.violations)


class GaussGraph:
    """Immutable decorated planar forest with computed faces."""

    def __init__(self, n, vertices, rotations, edge_colors, compute=True):
        """``rotations`` maps vertex id -> CCW list of neighbor ids;
        ``edge_colors`` maps frozenset({u, v}) -> color."""
        self.n = n
        self.vertices = {v.id: v for v in vertices}
        if len(self.vertices) != len(vertices):
            raise StructuralError("duplicate vertex ids")
        self.rotations = {vid: list(nbrs) for vid, nbrs in rotations.items()}

        # derive darts: one per (origin, position-in-rotation)
        self.dart_vertex = []
        self.dart_head = []
        self._dart_at = {}  # (origin, head) -> dart id
        for vid in self.vertices:
            for w in self.rotations.get(vid, []):
                if w == vid:
                    raise StructuralError(f"loop at vertex {vid}")
                key = (vid, w)
                if key in self._dart_at:
                    raise StructuralError(f"parallel edge {vid}-{w}")
                self._dart_at[key] = len(self.dart_vertex)
                self.dart_vertex.append(vid)
                self.dart_head.append(w)
        self.dart_twin = []
        for d in range(len(self.dart_vertex)):
            key = (self.dart_head[d], self.dart_vertex[d])
            if key not in self._dart_at:
                raise StructuralError(f"unpaired dart {self.dart_vertex[d]}->{self.dart_head[d]}")
            self.dart_twin.append(self._dart_at[key])
        self.dart_color = []
        for d in range(len(self.dart_vertex)):
            key = frozenset((self.dart_vertex[d], self.dart_head[d]))
            if key not in edge_colors:
                raise StructuralError(f"missing color for edge {set(key)}")
            self.dart_color.append(edge_colors[key])
        self.edge_colors = dict(edge_colors)

        self._rot_index = {}
        for vid, nbrs in self.rotations.items():
            for i, w in enumerate(nbrs):
                self._rot_index[(vid, w)] = i

        self._leaf_dart = {}
        for v in self.vertices.values():
            if v.kind == "leaf":
                nbrs = self.rotations.get(v.id, [])
                if len(nbrs) != 1:
                    raise StructuralError(f"leaf {v.id} has valency {len(nbrs)}")
                self._leaf_dart[v.slot] = self._dart_at[(v.id, nbrs[0])]

        self.faces = []
        self.dart_face = []
        if compute:
            compute_faces(self)

    # --- basic accessors -------------------------------------------------
    def dart(self, origin, head):
        return self._dart_at[(origin, head)]

    def sigma(self, d):
        """Next dart counterclockwise around the origin of d."""
        v = self.dart_vertex[d]
        nbrs = self.rotations[v]
        i = self._rot_index[(v, self.dart_head[d])]
        return self._dart_at[(v, nbrs[(i + 1) % len(nbrs)])]

    def alpha(self, d):
        return self.dart_twin[d]

    def valency(self, vid):
        return len(self.rotations.get(vid, []))

    def edges(self):
        seen = set()
        for d in range(len(self.dart_vertex)):
            key = frozenset((self.dart_vertex[d], self.dart_head[d]))
            if key not in seen:
                seen.add(key)
                yield self.dart_vertex[d], self.dart_head[d], self.dart_color[d]

    def leaf_dart(self, slot):
        return self._leaf_dart[slot]

    def internal_vertices(self):
        return [v for v in self.vertices.values() if v.kind != "leaf"]

    def roots(self):
        return [v for v in self.vertices.values() if v.kind == "root"]

    def crits(self):
        return [v for v in self.vertices.values() if v.kind == "crit"]

    def trees(self):
        """Connected components as lists of vertex ids."""
        parent = {vid: vid for vid in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in self.edges():
            parent[find(u)] = find(v)
        comps = {}
        for vid in self.vertices:
            comps.setdefault(find(vid), []).append(vid)
        return list(comps.values())

    def tree_of(self):
        """Map vertex id -> tree index (stable across calls)."""
        out = {}
        for i, comp in enumerate(sorted(self.trees(), key=min)):
            for vid in comp:
                out[vid] = i
        return out

    def face_next(self, d):
        """Face traversal successor (face lies to the right of each dart).

        At a leaf the walk jumps along the boundary circle to the previous
        slot, which realizes the gluing of all leaves at infinity.
        """
        e = self.dart_twin[d]
        v = self.vertices[self.dart_vertex[e]]
        if v.kind == "leaf":
            return self._leaf_dart[(v.slot - 1) % (4 * self.n)]
        return self.sigma(e)

    def face_of(self, d):
        return self.dart_face[d]


def compute_faces(g: GaussGraph):
    """Fill g.faces/g.dart_face and color them.

    Every face of a forest is unbounded, so each face orbit crosses the
    boundary circle: the outer sector between slots k and k+1 belongs to the
    orbit of the slot-k leaf dart and its color is forced to ABCD[k mod 4]
    (sector (0,1) is A).  Edge-crossing swap rules are then verified.
    """
    for slot in range(4 * g.n):
        if slot not in g._leaf_dart:
            raise StructuralError(f"missing leaf slot {slot}")
    nd = len(g.dart_vertex)
    g.dart_face = [-1] * nd
    g.faces = []
    for d0 in range(nd):
        if g.dart_face[d0] >= 0:
            continue
        orbit = []
        d = d0
        while True:
            if g.dart_face[d] >= 0:
                raise StructuralError("face orbits are not a partition")
            g.dart_face[d] = len(g.faces)
            orbit.append(d)
            d = g.face_next(d)
            if d == d0:
                break
        g.faces.append(Face(id=len(g.faces), color="?", darts=tuple(orbit)))

    # color from the boundary sectors
    colored = {}
    for slot in range(4 * g.n):
        fid = g.dart_face[g._leaf_dart[slot]]
        want = FACE_COLORS[slot % 4]
        if fid in colored and colored[fid] != want:
            raise ColoringContradiction(
                f"face {fid} pinned to {colored[fid]} and {want} by boundary sectors")
        colored[fid] = want
    if len(colored) != len(g.faces):
        raise ColoringContradiction("face without boundary sector (cycle present?)")
    g.faces = [Face(id=f.id, color=colored[f.id], darts=f.darts) for f in g.faces]

    # every edge must separate colors per the swap rule of its own color
    for d in range(nd):
        c1 = g.faces[g.dart_face[d]].color
        c2 = g.faces[g.dart_face[g.dart_twin[d]]].color
        if _SWAP[g.dart_color[d]][c1] != c2:
            u, v = g.dart_vertex[d], g.dart_head[d]
            raise ColoringContradiction(
                f"edge {u}-{v} ({g.dart_color[d]}) separates {c1}|{c2}")
    return g


def validate(g: GaussGraph) -> ValidationReport:
    """Check every decoration rule; empty report iff the graph is valid."""
    rep = ValidationReport()
    n = g.n

    # forest: acyclicity via edge/vertex/component count
    comps = g.trees()
    ne = sum(1 for _ in g.edges())
    if ne != len(g.vertices) - len(comps):
        rep.add("forest", "-", "underlying graph contains a cycle")

    leaves = [v for v in g.vertices.values() if v.kind == "leaf"]
    if len(leaves) != 4 * n:
        rep.add("leaf-count", "-", f"{len(leaves)} leaves, expected {4 * n}")
    slots = sorted(v.slot for v in leaves)
    if slots != list(range(4 * n)):
        rep.add("leaf-slots", "-", f"slots {slots} are not 0..{4 * n - 1}")
    for v in leaves:
        if g.valency(v.id) != 1:
            rep.add("leaf-valency", v.id, f"valency {g.valency(v.id)}")
            continue
        d = g.rotations[v.id][0]
        col = g.edge_colors[frozenset((v.id, d))]
        if col != slot_color(v.slot):
            rep.add("leaf-parity", v.id,
                    f"slot {v.slot} carries {col}, expected {slot_color(v.slot)}")

    total_mult = 0
    for v in g.roots():
        total_mult += v.mult
        val = g.valency(v.id)
        if v.mult < 1 or val != 4 * v.mult:
            rep.add("root-valency", v.id, f"valency {val} != 4*{v.mult}")
        nbrs = g.rotations[v.id]
        for i, w in enumerate(nbrs):
            c1 = g.edge_colors[frozenset((v.id, w))]
            c2 = g.edge_colors[frozenset((v.id, nbrs[(i + 1) % len(nbrs)]))]
            if c1 == c2:
                rep.add("root-alternation", v.id, "incident colors fail to alternate")
                break
    if total_mult != n:
        rep.add("root-mass", "-", f"total root multiplicity {total_mult} != {n}")
    if len(g.roots()) > n:
        rep.add("root-count", "-", f"{len(g.roots())} roots > {n}")

    if len(g.crits()) > max(n - 1, 0):
        rep.add("crit-count", "-", f"{len(g.crits())} critical vertices > {n - 1}")
    for v in g.crits():
        val = g.valency(v.id)
        if val % 2 != 0:
            rep.add("crit-valency", v.id, f"odd monochromatic valency {val}")
        if not (4 <= val <= 2 * n):
            rep.add("crit-valency", v.id, f"valency {val} outside [4, {2 * n}]")
        cols = {g.edge_colors[frozenset((v.id, w))] for w in g.rotations[v.id]}
        if len(cols) != 1:
            rep.add("crit-monochrome", v.id, f"mixed colors {sorted(cols)}")

    if not g.faces:
        try:
            compute_faces(g)
        except (StructuralError, ColoringContradiction) as exc:
            rep.add("faces", "-", str(exc))
            return rep

    # red edges separate {A,D} or {B,C}; blue separate {A,B} or {C,D}
    for u, v, col in g.edges():
        d = g.dart(u, v)
        pair = {g.faces[g.dart_face[d]].color, g.faces[g.dart_face[g.dart_twin[d]]].color}
        good = ({"A", "D"}, {"B", "C"}) if col == RED else ({"A", "B"}, {"C", "D"})
        if pair not in good:
            rep.add("edge-face-pair", f"{u}-{v}", f"{col} edge with faces {sorted(pair)}")

    # faces around a root cycle A,B,C,D counterclockwise
    for v in g.roots():
        nbrs = g.rotations[v.id]
        cols = [g.faces[g.dart_face[g.dart(v.id, w)]].color for w in nbrs]
        for i in range(len(cols)):
            a = FACE_COLORS.index(cols[i])
            b = FACE_COLORS.index(cols[(i + 1) % len(cols)])
            if (a + 1) % 4 != b:
                rep.add("root-face-cycle", v.id, f"faces {cols} not an ABCD cycle")
                break

    # faces around a crit alternate within the monochromatic pair
    for v in g.crits():
        nbrs = g.rotations[v.id]
        cols = [g.faces[g.dart_face[g.dart(v.id, w)]].color for w in nbrs]
        if len(set(cols)) > 2 or any(cols[i] == cols[(i + 1) % len(cols)] for i in range(len(cols))):
            rep.add("crit-face-alternation", v.id, f"faces {cols}")
    return rep


# --- canonical codes -----------------------------------------------------

def canonical_code(g: GaussGraph) -> str:
    """Deterministic text code: trees in increasing order of minimal leaf
    slot, each serialized by a depth-first walk from the minimal leaf
    following rotation order.  Equal codes iff the decorated rotation
    systems are isomorphic with fixed leaf slots."""
    tree_ix = g.tree_of()
    min_slot = {}
    for v in g.vertices.values():
        if v.kind == "leaf":
            t = tree_ix[v.id]
            if t not in min_slot or v.slot < min_slot[t]:
                min_slot[t] = v.slot
    parts = []
    for t in sorted(min_slot, key=lambda t: min_slot[t]):
        tokens = [f"L{min_slot[t]}"]
        start = g.leaf_dart(min_slot[t])
        _walk_code(g, start, 0, tokens)
        parts.append("T[" + " ".join(tokens) + "]")
    return f"n{g.n}|" + "|".join(parts)


def _walk_code(g, d, depth, tokens):
    head = g.vertices[g.dart_head[d]]
    if head.kind == "leaf":
        tokens.append(f"L{head.slot}")
        return
    col = g.dart_color[d]
    val = g.valency(head.id)
    tag = "r" if head.kind == "root" else "c"
    tokens.append(f"{tag}:{col}{val}")
    e = g.dart_twin[d]
    child = e
    for _ in range(val - 1):
        child = g.sigma(child)
        _walk_code(g, child, depth + 1, tokens)
    if depth > 0:
        tokens.append("^")


def decode(code: str) -> GaussGraph:
    """Rebuild a graph from its canonical code (positions are dropped)."""
    if not code.startswith("n"):
        raise InvalidInput(f"bad code header: {code!r}")
    head, _, rest = code.partition("|")
    try:
        n = int(head[1:])
    except ValueError as exc:
        raise InvalidInput(f"bad code header: {head!r}") from exc
    trees = rest.split("|") if rest else []

    vertices = []
    rotations = {}
    colors = {}
    next_id = [0]

    def new_vertex(kind, mult=1, slot=-1):
        v = Vertex(id=next_id[0], kind=kind, mult=mult, slot=slot)
        next_id[0] += 1
        vertices.append(v)
        rotations[v.id] = []
        return v

    def add_edge(u, v, color):
        rotations[u].append(v)
        rotations[v].append(u)
        colors[frozenset((u, v))] = color

    for tree in trees:
        if not (tree.startswith("T[") and tree.endswith("]")):
            raise InvalidInput(f"bad tree block: {tree!r}")
        tokens = tree[2:-1].split()
        pos = [0]

        def take():
            if pos[0] >= len(tokens):
                raise InvalidInput("truncated code")
            tok = tokens[pos[0]]
            pos[0] += 1
            return tok

        first = take()
        if not first.startswith("L"):
            raise InvalidInput("tree must start at a leaf")
        leaf = new_vertex("leaf", slot=int(first[1:]))

        def parse_vertex(parent_id, arrival_color, depth):
            tok = take()
            if tok.startswith("L"):
                child = new_vertex("leaf", slot=int(tok[1:]))
                add_edge(parent_id, child.id, arrival_color)
                return
            tag, _, spec = tok.partition(":")
            if tag not in ("r", "c") or not spec or spec[0] not in (RED, BLUE):
                raise InvalidInput(f"bad vertex token {tok!r}")
            col = spec[0]
            val = int(spec[1:])
            if col != arrival_color:
                raise InvalidInput(f"token {tok!r} disagrees with arrival color {arrival_color}")
            if tag == "r":
                if val % 4 != 0:
                    raise InvalidInput(f"root valency {val} not a multiple of 4")
                v = new_vertex("root", mult=val // 4)
            else:
                v = new_vertex("crit")
            add_edge(parent_id, v.id, arrival_color)
            for i in range(1, val):
                if tag == "r":
                    child_col = arrival_color if i % 2 == 0 else _other(arrival_color)
                else:
                    child_col = arrival_color
                parse_vertex(v.id, child_col, depth + 1)
            if depth > 0:
                tok = take()
                if tok != "^":
                    raise InvalidInput(f"expected backtrack mark, got {tok!r}")

        parse_vertex(leaf.id, slot_color(leaf.slot), 0)
        if pos[0] != len(tokens):
            raise InvalidInput(f"trailing tokens in {tree!r}")

    return GaussGraph(n, vertices, rotations, colors)


def _other(color):
    return BLUE if color == RED else RED


def graph_record(g: GaussGraph) -> dict:
    """JSON-ready record: vertices, rotations, colors, faces, code and the
    infinity marker gluing all leaves."""
    return {
        "n": g.n,
        "code": canonical_code(g),
        "vertices": [
            {
                "id": v.id,
                "kind": v.kind,
                **({"mult": v.mult} if v.kind == "root" else {}),
                **({"slot": v.slot} if v.kind == "leaf" else {}),
                **({"position": [v.position.real, v.position.imag]}
                   if v.position is not None else {}),
            }
            for v in sorted(g.vertices.values(), key=lambda v: v.id)
        ],
        "rotations": {str(vid): list(nbrs) for vid, nbrs in sorted(g.rotations.items())},
        "edges": [
            {"v1": u, "v2": v, "color": c} for u, v, c in sorted(g.edges())
        ],
        "faces": [
            {
                "id": f.id,
                "color": f.color,
                "vertices": sorted({g.dart_vertex[d] for d in f.darts}),
                "edges": sorted({tuple(sorted((g.dart_vertex[d], g.dart_head[d])))
                                 for d in f.darts}),
            }
            for f in g.faces
        ],
        "infinity": {"glues_slots": list(range(4 * g.n))},
    }
