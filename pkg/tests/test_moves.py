import numpy as np
import pytest

from skizze.errors import RefusedMove
from skizze.graph import canonical_code, decode, validate
from skizze.moves import MoveDescriptor, apply_contract, codim, enumerate_moves
from skizze.poly import Polynomial
from skizze.poset import build_poset, maximal_element, star_graph
from skizze.tracer import classify

from helpers import axis_chain_graph, x_tree_graph


def test_no_moves_on_single_x_tree():
    assert enumerate_moves(x_tree_graph()) == []


def generic_q1_graph():
    g, _ = classify(Polynomial([1, 0, -np.exp(1j * np.pi / 4)]))
    return g


def test_generic_n2_moves():
    g = generic_q1_graph()
    moves = enumerate_moves(g)
    kinds = {}
    for m in moves:
        kinds.setdefault(m.kind, []).append(m)
    # total contraction of both roots, and same-color pinches
    assert len(kinds.get("roots", [])) >= 1
    assert all(len(m.roots) == 2 for m in kinds["roots"])
    assert len(kinds.get("gon", [])) >= 2
    assert "edge" not in kinds
    assert all(len(m.darts) == 2 for m in kinds["gon"])


def test_roots_contraction_gives_star():
    g = generic_q1_graph()
    for m in enumerate_moves(g):
        if m.kind == "roots":
            h = apply_contract(g, m)
            assert canonical_code(h) == maximal_element(2)


def test_gon_reaches_axis_chain():
    g = generic_q1_graph()
    wall = classify(Polynomial([1, 0, -1]))[1]
    results = set()
    for m in enumerate_moves(g):
        if m.kind == "gon":
            results.add(canonical_code(apply_contract(g, m)))
    assert wall in results


def test_axis_chain_moves():
    g = axis_chain_graph()
    moves = enumerate_moves(g)
    kinds = {m.kind for m in moves}
    assert "edge" not in kinds  # single crit
    assert "gon" not in kinds  # single tree
    # the two roots merge through the critical path onto the 8-star
    path_moves = [m for m in moves if m.kind == "roots-path"]
    assert len(path_moves) == 1
    h = apply_contract(g, path_moves[0])
    assert canonical_code(h) == maximal_element(2)


def test_crit_edge_contraction_valency():
    # find a poset(3) node with two adjacent critical vertices
    p3 = build_poset(3)
    for code in p3.codes:
        g = decode(code)
        for m in enumerate_moves(g):
            if m.kind == "edge":
                u, v = m.edge
                a, b = g.valency(u), g.valency(v)
                h = apply_contract(g, m)
                w = max(h.vertices)
                assert h.valency(w) == a + b - 2  # 2(a'+b'-1) in half-valencies
                assert validate(h).ok
                return
    pytest.fail("no crit-crit edge found in poset(3)")


def test_refused_moves():
    g = axis_chain_graph()
    # contraction across one tree creates a cycle
    darts = []
    for f in g.faces:
        for d in f.darts:
            if g.dart_color[d] == "B":
                darts.append((g.dart_vertex[d], g.dart_head[d]))
        if len(darts) >= 2:
            break
    with pytest.raises(RefusedMove):
        apply_contract(g, MoveDescriptor(kind="gon", face=0, darts=tuple(darts[:2])))
    with pytest.raises(RefusedMove):
        apply_contract(g, MoveDescriptor(kind="edge", edge=(0, 1)))


def test_codim_rank():
    assert codim(x_tree_graph()) == 0
    assert codim(axis_chain_graph()) == 1
    assert codim(star_graph(2)) == 2
    assert codim(star_graph(3)) == 4


def test_moves_strictly_increase_rank():
    for n in (2, 3):
        poset = build_poset(n)
        for code in poset.codes:
            g = decode(code)
            ne = sum(1 for _ in g.edges())
            for m in enumerate_moves(g):
                h = apply_contract(g, m)
                nh = sum(1 for _ in h.edges())
                if m.kind == "edge":
                    assert codim(h) == codim(g) and nh == ne - 1
                else:
                    assert codim(h) > codim(g)


def test_generic_iff_codim_zero():
    p2 = build_poset(2)
    for code in p2.codes:
        g = decode(code)
        is_generic = not g.crits() and all(v.mult == 1 for v in g.roots())
        assert (codim(g) == 0) == is_generic
