"""Hand-built reference graphs and an independent isomorphism oracle."""

from skizze.graph import BLUE, RED, GaussGraph, Vertex


def x_tree_graph():
    """The degree-1 picture: one root, four axis rays."""
    vs = [Vertex(0, "root", mult=1)]
    for k in range(4):
        vs.append(Vertex(1 + k, "leaf", slot=k))
    rot = {0: [1, 2, 3, 4], 1: [0], 2: [0], 3: [0], 4: [0]}
    colors = {
        frozenset((0, 1)): RED,
        frozenset((0, 2)): BLUE,
        frozenset((0, 3)): RED,
        frozenset((0, 4)): BLUE,
    }
    return GaussGraph(1, vs, rot, colors)


def axis_chain_graph(shuffle_ids=False):
    """The z^2-1 picture: roots at +-1 joined through a red crit at 0,
    blue hyperbola branches through the roots."""
    ids = list(range(11))
    if shuffle_ids:
        ids = [7, 2, 9, 0, 1, 3, 4, 5, 6, 8, 10]
    rp, rm, c0 = ids[0], ids[1], ids[2]
    L = {k: ids[3 + k] for k in range(8)}
    vs = [
        Vertex(rp, "root", mult=1),
        Vertex(rm, "root", mult=1),
        Vertex(c0, "crit"),
    ] + [Vertex(L[k], "leaf", slot=k) for k in range(8)]
    rot = {
        rp: [L[0], L[1], c0, L[7]],
        c0: [rp, L[2], rm, L[6]],
        rm: [c0, L[3], L[4], L[5]],
    }
    for k in range(8):
        rot[L[k]] = [{0: rp, 1: rp, 2: c0, 3: rm, 4: rm, 5: rm, 6: c0, 7: rp}[k]]
    colors = {
        frozenset((rp, L[0])): RED,
        frozenset((rp, L[1])): BLUE,
        frozenset((rp, c0)): RED,
        frozenset((rp, L[7])): BLUE,
        frozenset((c0, L[2])): RED,
        frozenset((c0, rm)): RED,
        frozenset((c0, L[6])): RED,
        frozenset((rm, L[3])): BLUE,
        frozenset((rm, L[4])): RED,
        frozenset((rm, L[5])): BLUE,
    }
    return GaussGraph(2, vs, rot, colors)


def star_graph(n):
    """4n-star: one root of multiplicity n, leaves at every slot."""
    vs = [Vertex(0, "root", mult=n)]
    rot = {0: []}
    colors = {}
    for k in range(4 * n):
        vs.append(Vertex(1 + k, "leaf", slot=k))
        rot[0].append(1 + k)
        rot[1 + k] = [0]
        colors[frozenset((0, 1 + k))] = RED if k % 2 == 0 else BLUE
    return GaussGraph(n, vs, rot, colors)


def slot_preserving_isomorphic(g1, g2):
    """Independent oracle: the fixed leaf slots force the vertex bijection,
    which is grown by aligning rotations; succeed iff it closes without
    conflict and covers both graphs."""
    if g1.n != g2.n or len(g1.vertices) != len(g2.vertices):
        return False
    slots1 = {v.slot: v.id for v in g1.vertices.values() if v.kind == "leaf"}
    slots2 = {v.slot: v.id for v in g2.vertices.values() if v.kind == "leaf"}
    if set(slots1) != set(slots2):
        return False
    mapping = {slots1[s]: slots2[s] for s in slots1}
    queue = list(mapping.items())
    processed = set()
    while queue:
        v1, v2 = queue.pop(0)
        if v1 in processed:
            if mapping[v1] != v2:
                return False
            continue
        processed.add(v1)
        a, b = g1.vertices[v1], g2.vertices[v2]
        if a.kind != b.kind or (a.kind == "root" and a.mult != b.mult):
            return False
        if a.kind == "leaf" and a.slot != b.slot:
            return False
        r1, r2 = g1.rotations[v1], g2.rotations[v2]
        if len(r1) != len(r2):
            return False
        if len(r1) == 1:
            aligned = [(r1[0], r2[0])]
        else:
            anchor = None
            for i, w in enumerate(r1):
                if w in mapping and mapping[w] in r2:
                    anchor = (i, r2.index(mapping[w]))
                    break
            if anchor is None:
                return False  # internal vertices are always reached anchored
            i0, j0 = anchor
            aligned = [(r1[(i0 + k) % len(r1)], r2[(j0 + k) % len(r2)])
                       for k in range(len(r1))]
        for w1, w2 in aligned:
            if g1.edge_colors[frozenset((v1, w1))] != g2.edge_colors[frozenset((v2, w2))]:
                return False
            if w1 in mapping:
                if mapping[w1] != w2:
                    return False
            else:
                mapping[w1] = w2
                queue.append((w1, w2))
    if len(mapping) != len(g1.vertices) or len(set(mapping.values())) != len(mapping):
        return False
    for u, v, c in g1.edges():
        if g2.edge_colors.get(frozenset((mapping[u], mapping[v]))) != c:
            return False
    return True
