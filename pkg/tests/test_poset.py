from graphlib import TopologicalSorter
from itertools import combinations

import numpy as np
import pytest

from skizze.errors import CapExceeded
from skizze.graph import canonical_code, decode
from skizze.moves import codim
from skizze.poly import Polynomial
from skizze.poset import (
    Poset,
    build_poset,
    enumerate_generic,
    from_catalog,
    maximal_element,
    to_catalog,
    x_forest,
)
from skizze.tracer import classify

from helpers import slot_preserving_isomorphic


def all_pairings(points):
    """Independent oracle: every perfect matching, by recursive pairing."""
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        for sub in all_pairings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + sub


def crossing_oracle(c1, c2, modulus):
    a, b = sorted(c1)
    c, d = sorted(c2)
    return (a < c < b < d) or (c < a < d < b)


def oracle_generic_count(n):
    modulus = 4 * n
    evens = list(range(0, modulus, 2))
    odds = list(range(1, modulus, 2))

    def noncrossing(matchings):
        return [m for m in matchings
                if not any(crossing_oracle(c1, c2, modulus)
                           for c1, c2 in combinations(m, 2))]

    count = 0
    for red in noncrossing(list(all_pairings(evens))):
        for blue in noncrossing(list(all_pairings(odds))):
            ok = all(sum(crossing_oracle(r, b, modulus) for b in blue) == 1
                     for r in red)
            ok = ok and all(sum(crossing_oracle(r, b, modulus) for r in red) == 1
                            for b in blue)
            if ok:
                count += 1
    return count


def test_generic_counts():
    assert len(enumerate_generic(1)) == 1
    assert len(enumerate_generic(2)) == 4


def test_generic_n3_matches_bruteforce_oracle():
    assert len(enumerate_generic(3)) == oracle_generic_count(3)


def test_generic_codes_are_x_forests():
    for code in enumerate_generic(2):
        g = decode(code)
        assert not g.crits()
        assert all(v.mult == 1 for v in g.roots())


def test_poset_n1():
    p = build_poset(1)
    assert len(p.codes) == 1
    assert p.maximal_nodes() == p.minimal_nodes() == [maximal_element(1)]


def test_poset_n2_structure():
    p = build_poset(2)
    assert len(p.codes) == 9
    assert set(p.minimal_nodes()) == enumerate_generic(2)
    assert p.maximal_nodes() == [maximal_element(2)]
    # the four wall codes sit strictly between generic codes and the star
    walls = [c for c in p.codes
             if c not in p.minimal_nodes() and c != maximal_element(2)]
    assert len(walls) == 4
    for w in walls:
        assert p.is_below(w, maximal_element(2))
        assert any(p.is_below(gc, w) for gc in p.minimal_nodes())


def test_poset_classify_cross_check():
    p = build_poset(2)
    cs = [np.exp(1j * np.pi * k / 4) for k in (1, 3, 5, 7)] + [1, 1j, -1, -1j, 0]
    hit = set()
    for c in cs:
        code = classify(Polynomial([1, 0, -c]))[1]
        assert code in p.parents
        hit.add(code)
    assert hit == set(p.codes)  # every stratum realized by a polynomial


def test_maximal_equals_power_classify():
    for n in (1, 2, 3):
        assert maximal_element(n) == classify(Polynomial([1] + [0] * n))[1]


def test_poset_is_dag_with_monotone_rank():
    for n in (2, 3):
        p = build_poset(n)
        ts = TopologicalSorter({c: p.children[c] for c in p.codes})
        order = list(ts.static_order())
        assert len(order) == len(p.codes)
        for child, parents in p.parents.items():
            g = decode(child)
            for parent in parents:
                h = decode(parent)
                assert (codim(h), -sum(1 for _ in h.edges())) > \
                       (codim(g), -sum(1 for _ in g.edges()))


def test_antisymmetry_exhaustive_n2():
    p = build_poset(2)
    for a in p.codes:
        for b in p.codes:
            if a != b and p.is_below(a, b):
                assert not p.is_below(b, a)


def test_catalog_roundtrip_and_determinism():
    p = build_poset(2)
    text = to_catalog(p)
    assert text == to_catalog(build_poset(2))  # deterministic
    q = from_catalog(text)
    assert q.n == 2
    assert set(q.codes) == set(p.codes)
    assert q.parents == p.parents
    assert {k: v for k, v in q.cover_kinds.items()} == p.cover_kinds


def test_cap_refusal():
    with pytest.raises(CapExceeded):
        build_poset(5)


def test_code_equality_iff_isomorphism_n2():
    p = build_poset(2)
    graphs = {code: decode(code) for code in p.codes}
    for a in p.codes:
        for b in p.codes:
            iso = slot_preserving_isomorphic(graphs[a], graphs[b])
            assert iso == (a == b)


def test_x_forest_matches_classify():
    # QI configuration: red chords (0,2),(4,6), blue (1,7),(3,5)
    g = x_forest(2, [(0, 2), (4, 6)], [(1, 7), (3, 5)])
    expect = classify(Polynomial([1, 0, -np.exp(1j * np.pi / 4)]))[1]
    assert canonical_code(g) == expect
