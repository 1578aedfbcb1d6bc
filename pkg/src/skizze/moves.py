"""Whitehead contractions on decorated forests.

Three families, matching the degeneration geometry:

* gon: a ghost k-gon inside one face touching k same-colored edges of k
  distinct trees collapses to a new monochromatic critical vertex that
  splits those edges (curves of k trees pinch together),
* edge: the edge joining two critical vertices of one color contracts,
  merging them,
* roots: k roots merge into one multiple root.  Across distinct trees the
  ghost polygon runs through corners of a shared face; inside one tree the
  whole path between the two roots (interior vertices must be critical)
  collapses with them, which is how a wall stratum degenerates onto the
  star.

Every candidate is validated by actually applying it: descriptors
returned by :func:`enumerate_moves` are exactly the applicable ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .errors import ColoringContradiction, RefusedMove, StructuralError
from .graph import GaussGraph, Vertex, validate


@dataclass(frozen=True)
class MoveDescriptor:
    kind: str  # "gon" | "edge" | "roots" | "roots-path"
    face: int | None = None
    darts: tuple = ()  # gon: (origin, head) per touched edge, in face-walk order
    edge: tuple | None = None  # edge: (crit, crit)
    corners: tuple = ()  # roots: (root id, corner head id) in face-walk order
    roots: tuple = ()  # roots / roots-path: the merged root ids

    def sort_key(self):
        return (self.kind, self.face if self.face is not None else -1,
                self.darts, self.edge or (), self.corners, self.roots)


def codim(g: GaussGraph) -> int:
    """Stratum-codimension proxy: strictly increases under gon and root
    merges, stays flat under crit-edge contraction."""
    return sum(g.valency(v.id) // 2 - 1 for v in g.crits()) + \
        2 * sum(v.mult - 1 for v in g.roots())


def _neighbor_rotations(g: GaussGraph):
    return {vid: list(nbrs) for vid, nbrs in g.rotations.items()}


def _rebuild(g, vertices, rotations, colors):
    try:
        h = GaussGraph(g.n, vertices, rotations, colors)
    except (StructuralError, ColoringContradiction) as exc:
        raise RefusedMove(str(exc)) from exc
    rep = validate(h)
    if not rep.ok:
        raise RefusedMove(str(rep))
    return h


def _fresh_id(g):
    return max(g.vertices) + 1


def apply_contract(g: GaussGraph, d: MoveDescriptor) -> GaussGraph:
    if d.kind == "gon":
        return _apply_gon(g, d)
    if d.kind == "edge":
        return _apply_edge(g, d)
    if d.kind == "roots":
        return _apply_roots(g, d)
    if d.kind == "roots-path":
        return _apply_roots_path(g, d)
    raise RefusedMove(f"unknown move kind {d.kind!r}")


def _apply_gon(g, d):
    color = g.edge_colors.get(frozenset(d.darts[0]))
    for a, b in d.darts:
        if g.edge_colors.get(frozenset((a, b))) != color:
            raise RefusedMove("gon edges must share one color")
    rot = _neighbor_rotations(g)
    colors = dict(g.edge_colors)
    w = _fresh_id(g)
    # the new crit splits each touched edge; around it, the fan runs in
    # reversed face-walk order with the head end first (ccw)
    rot_w = []
    for a, b in reversed(d.darts):
        rot_w.append(b)
        rot_w.append(a)
    for a, b in d.darts:
        rot[a][rot[a].index(b)] = w
        rot[b][rot[b].index(a)] = w
        del colors[frozenset((a, b))]
        colors[frozenset((a, w))] = color
        colors[frozenset((b, w))] = color
    rot[w] = rot_w
    vertices = list(g.vertices.values()) + [Vertex(w, "crit")]
    return _rebuild(g, vertices, rot, colors)


def _apply_edge(g, d):
    u, v = d.edge
    if g.vertices[u].kind != "crit" or g.vertices[v].kind != "crit":
        raise RefusedMove("edge contraction needs two critical endpoints")
    rot = _neighbor_rotations(g)
    colors = dict(g.edge_colors)
    w = _fresh_id(g)
    ru, rv = rot[u], rot[v]
    iu, iv = ru.index(v), rv.index(u)
    merged = [ru[(iu + 1 + i) % len(ru)] for i in range(len(ru) - 1)] + \
             [rv[(iv + 1 + i) % len(rv)] for i in range(len(rv) - 1)]
    del colors[frozenset((u, v))]
    for x in merged:
        colors[frozenset((w, x))] = colors.pop(frozenset((u if x in ru else v, x)))
        rot[x] = [w if y in (u, v) else y for y in rot[x]]
    rot[w] = merged
    del rot[u], rot[v]
    vertices = [vv for vv in g.vertices.values() if vv.id not in (u, v)]
    vertices.append(Vertex(w, "crit"))
    return _rebuild(g, vertices, rot, colors)


def _apply_roots(g, d):
    """Cross-tree total contraction through corners of one face."""
    rot = _neighbor_rotations(g)
    colors = dict(g.edge_colors)
    w = _fresh_id(g)
    rot_w = []
    mult = 0
    for rid, corner_head in reversed(d.corners):
        r = rot[rid]
        i = r.index(corner_head)
        rot_w += [r[(i + 1 + j) % len(r)] for j in range(len(r))]
        mult += g.vertices[rid].mult
    merged_ids = {rid for rid, _ in d.corners}
    for rid, _ in d.corners:
        for x in rot[rid]:
            if x in merged_ids:
                raise RefusedMove("chosen roots are adjacent")
        del rot[rid]
    for vid in list(rot):
        rot[vid] = [w if x in merged_ids else x for x in rot[vid]]
    for key in list(colors):
        inside = key & merged_ids
        if inside:
            (a,) = inside
            (b,) = key - inside
            colors[frozenset((w, b))] = colors.pop(key)
    vertices = [vv for vv in g.vertices.values() if vv.id not in merged_ids]
    vertices.append(Vertex(w, "root", mult=mult))
    rot[w] = rot_w
    return _rebuild(g, vertices, rot, colors)


def _tree_path(g, u, v):
    """Unique path between two vertices of one tree (list of vertex ids)."""
    prev = {u: None}
    queue = [u]
    while queue:
        x = queue.pop(0)
        if x == v:
            break
        for y in g.rotations[x]:
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if v not in prev:
        return None
    path = [v]
    while path[-1] != u:
        path.append(prev[path[-1]])
    return path[::-1]


def _steiner_subtree(g, roots):
    """Vertices and edges of the minimal subtree spanning the given roots."""
    base = roots[0]
    kv = {base}
    ke = set()
    for r in roots[1:]:
        path = _tree_path(g, base, r)
        if path is None:
            return None, None
        for i in range(len(path) - 1):
            kv.add(path[i + 1])
            ke.add(frozenset((path[i], path[i + 1])))
    return kv, ke


def _apply_roots_path(g, d):
    """Same-tree total contraction: the minimal subtree spanning the chosen
    roots collapses to one multiple root (its interior vertices must all be
    critical; they are absorbed)."""
    kv, ke = _steiner_subtree(g, list(d.roots))
    if kv is None:
        raise RefusedMove("roots are not connected")
    interior = kv - set(d.roots)
    if any(g.vertices[x].kind != "crit" for x in interior):
        raise RefusedMove("subtree interior must consist of critical vertices")

    # boundary tour around the collapsing subtree collects the surviving
    # darts in ccw order
    start = None
    for x in sorted(kv):
        for y in g.rotations[x]:
            if frozenset((x, y)) not in ke:
                start = (x, y)
                break
        if start:
            break
    if start is None:
        raise RefusedMove("nothing survives the collapse")
    order = []
    cur = start
    while True:
        order.append(cur)
        x, y = cur
        i = g.rotations[x].index(y)
        while True:
            i = (i + 1) % len(g.rotations[x])
            y2 = g.rotations[x][i]
            if frozenset((x, y2)) in ke:
                i = g.rotations[y2].index(x)
                x = y2
                continue
            cur = (x, y2)
            break
        if cur == start:
            break

    rot = _neighbor_rotations(g)
    colors = dict(g.edge_colors)
    w = _fresh_id(g)
    if any(y in kv for _, y in order):
        raise RefusedMove("collapse would create a loop")
    rot[w] = [y for _, y in order]
    for x in kv:
        del rot[x]
    for vid in list(rot):
        rot[vid] = [w if x in kv else x for x in rot[vid]]
    for key in list(colors):
        if key in ke:
            del colors[key]
            continue
        inside = key & kv
        if inside:
            (a,) = inside
            (b,) = key - inside
            colors[frozenset((w, b))] = colors.pop(key)
    mult = sum(g.vertices[x].mult for x in kv if g.vertices[x].kind == "root")
    vertices = [vv for vv in g.vertices.values() if vv.id not in kv]
    vertices.append(Vertex(w, "root", mult=mult))
    return _rebuild(g, vertices, rot, colors)


def _candidates(g: GaussGraph):
    tree_ix = g.tree_of()
    ncrit_cap = g.n  # new crit valency 2k <= 2n
    for f in g.faces:
        # gon moves: same-colored darts of distinct trees on this face
        by_color = {}
        for dart in f.darts:
            a, b = g.dart_vertex[dart], g.dart_head[dart]
            by_color.setdefault(g.dart_color[dart], []).append((a, b))
        for color, darts in sorted(by_color.items()):
            by_tree = {}
            for i, (a, b) in enumerate(darts):
                by_tree.setdefault(tree_ix[a], []).append((i, (a, b)))
            trees = sorted(by_tree)
            for k in range(2, min(len(trees), ncrit_cap) + 1):
                for tsub in combinations(trees, k):
                    for pick in product(*(by_tree[t] for t in tsub)):
                        ordered = tuple(p[1] for p in sorted(pick))
                        yield MoveDescriptor(kind="gon", face=f.id, darts=ordered)
        # cross-tree root merges: root corners on this face
        corners = []
        for dart in f.darts:
            head = g.dart_head[dart]
            if g.vertices[head].kind == "root":
                # corner of `head` inside this face, between the reversed
                # dart and its rotation successor
                corners.append((head, g.dart_vertex[dart]))
        for k in range(2, len(corners) + 1):
            for sub in combinations(range(len(corners)), k):
                chosen = [corners[i] for i in sub]
                rids = [c[0] for c in chosen]
                if len({tree_ix[r] for r in rids}) != k or len(set(rids)) != k:
                    continue
                yield MoveDescriptor(kind="roots", face=f.id, corners=tuple(chosen),
                                     roots=tuple(sorted(rids)))
    # crit-crit edge contractions
    for u, v, _c in g.edges():
        if g.vertices[u].kind == "crit" and g.vertices[v].kind == "crit":
            yield MoveDescriptor(kind="edge", edge=tuple(sorted((u, v))))
    # same-tree root merges: collapse the spanning subtree of any root
    # subset whose interior is purely critical
    by_tree = {}
    for r in g.roots():
        by_tree.setdefault(tree_ix[r.id], []).append(r.id)
    for tree_roots in by_tree.values():
        tree_roots.sort()
        for k in range(2, len(tree_roots) + 1):
            for sub in combinations(tree_roots, k):
                kv, _ke = _steiner_subtree(g, list(sub))
                if kv is None:
                    continue
                if all(g.vertices[x].kind == "crit" for x in kv - set(sub)):
                    yield MoveDescriptor(kind="roots-path", roots=sub)


def enumerate_moves(g: GaussGraph) -> list:
    """All applicable contracting moves, deduplicated and sorted."""
    out = []
    seen = set()
    for cand in _candidates(g):
        if cand in seen:
            continue
        seen.add(cand)
        try:
            apply_contract(g, cand)
        except RefusedMove:
            continue
        out.append(cand)
    out.sort(key=lambda d: d.sort_key())
    return out
