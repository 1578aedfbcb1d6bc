import pytest

from skizze.errors import ColoringContradiction, InvalidInput, StructuralError
from skizze.graph import (
    BLUE,
    RED,
    GaussGraph,
    Vertex,
    canonical_code,
    compute_faces,
    decode,
    graph_record,
    validate,
)

from helpers import axis_chain_graph, slot_preserving_isomorphic, star_graph, x_tree_graph


def test_x_tree_faces_are_quadrants():
    g = x_tree_graph()
    assert len(g.faces) == 4
    assert sorted(f.color for f in g.faces) == ["A", "B", "C", "D"]
    # sector between slots 0 and 1 is A
    f = g.faces[g.dart_face[g.leaf_dart(0)]]
    assert f.color == "A"


def test_x_tree_code_exact():
    assert canonical_code(x_tree_graph()) == "n1|T[L0 r:R4 L1 L2 L3]"


def test_x_tree_validates():
    assert validate(x_tree_graph()).ok


def test_axis_chain_structure():
    g = axis_chain_graph()
    assert validate(g).ok
    assert len(g.faces) == 8
    assert canonical_code(g) == "n2|T[L0 r:R4 L1 c:R4 L2 r:R4 L3 L4 L5 ^ L6 ^ L7]"


def test_face_count_euler_relation():
    # faces = edges - internal vertices + 1 for the compactified forest
    for g in (x_tree_graph(), axis_chain_graph(), star_graph(2), star_graph(3)):
        ne = sum(1 for _ in g.edges())
        ni = len(g.internal_vertices())
        assert len(g.faces) == ne - ni + 1


def test_code_is_id_independent():
    assert canonical_code(axis_chain_graph()) == canonical_code(axis_chain_graph(shuffle_ids=True))


def test_decode_roundtrip():
    for g in (x_tree_graph(), axis_chain_graph(), star_graph(2), star_graph(3)):
        code = canonical_code(g)
        h = decode(code)
        assert validate(h).ok
        assert canonical_code(h) == code
        assert slot_preserving_isomorphic(g, h)


def test_decode_rejects_garbage():
    with pytest.raises(InvalidInput):
        decode("garbage")
    with pytest.raises(InvalidInput):
        decode("n1|T[r:R4 L1 L2 L3]")


def test_missing_leaf_reported():
    g = axis_chain_graph()
    vs = [v for v in g.vertices.values() if not (v.kind == "leaf" and v.slot == 7)]
    rot = {v.id: [w for w in g.rotations[v.id] if g.vertices[w].slot != 7] for v in vs}
    colors = {k: c for k, c in g.edge_colors.items()
              if all(g.vertices[v].slot != 7 for v in k)}
    broken = GaussGraph(2, vs, rot, colors, compute=False)
    rep = validate(broken)
    assert not rep.ok
    assert any(rule == "leaf-count" for rule, _, _ in rep.violations)


def test_odd_crit_valency_reported():
    vs = [Vertex(0, "crit")] + [Vertex(1 + k, "leaf", slot=k) for k in range(3)]
    rot = {0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}
    colors = {frozenset((0, 1 + k)): RED for k in range(3)}
    broken = GaussGraph(1, vs, rot, colors, compute=False)
    rep = validate(broken)
    assert any(rule == "crit-valency" for rule, _, _ in rep.violations)


def test_miscolored_edge_contradiction():
    g = x_tree_graph()
    colors = dict(g.edge_colors)
    colors[frozenset((0, 1))] = BLUE  # slot-0 ray recolored
    with pytest.raises(ColoringContradiction):
        GaussGraph(1, list(g.vertices.values()), g.rotations, colors)


def test_crossing_chords_rejected():
    # two crossing bare chords cannot be drawn: one face sees all sectors
    vs = [Vertex(k, "leaf", slot=k) for k in range(4)]
    rot = {0: [2], 2: [0], 1: [3], 3: [1]}
    colors = {frozenset((0, 2)): RED, frozenset((1, 3)): BLUE}
    with pytest.raises((ColoringContradiction, StructuralError)):
        GaussGraph(1, vs, rot, colors)


def test_loops_and_parallel_edges_rejected():
    with pytest.raises(StructuralError):
        GaussGraph(1, [Vertex(0, "crit")], {0: [0, 0]}, {})
    vs = [Vertex(0, "crit"), Vertex(1, "crit")]
    with pytest.raises(StructuralError):
        GaussGraph(1, vs, {0: [1, 1], 1: [0, 0]}, {frozenset((0, 1)): RED})


def test_graph_record_shape():
    g = axis_chain_graph()
    rec = graph_record(g)
    assert rec["n"] == 2
    assert rec["code"].startswith("n2|")
    assert len(rec["vertices"]) == 11
    assert len(rec["faces"]) == 8
    assert rec["infinity"]["glues_slots"] == list(range(8))
    kinds = {v["kind"] for v in rec["vertices"]}
    assert kinds == {"root", "crit", "leaf"}


def test_star_codes():
    assert canonical_code(star_graph(1)) == "n1|T[L0 r:R4 L1 L2 L3]"
    code2 = canonical_code(star_graph(2))
    assert code2 == "n2|T[L0 r:R8 L1 L2 L3 L4 L5 L6 L7]"


def test_isomorphism_oracle_distinguishes():
    assert slot_preserving_isomorphic(x_tree_graph(), x_tree_graph())
    assert not slot_preserving_isomorphic(star_graph(2), axis_chain_graph())
