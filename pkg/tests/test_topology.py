import itertools

import pytest

from persfiber.contraction import (contractibility_report, homotopy_witness, poset_dot,
                                   retraction_depth, retraction_step, verify_downset_product)
from persfiber.errors import DomainError
from persfiber.order_complex import SimplicialComplex, gf2_betti, gf2_rank, order_complex
from persfiber.strings import CellularString, string_leq, string_poset


def test_order_complex_singleton():
    c = order_complex(string_poset(3, 2))
    assert c.counts() == (1,)
    assert c.euler == 1


def test_order_complex_4_2_is_a_path():
    c = order_complex(string_poset(4, 2))
    assert c.counts() == (7, 6)
    # a path: two endpoints of degree 1, the rest of degree 2, connected
    degree = [0] * 7
    for a, b in c.simplices[1]:
        degree[a] += 1
        degree[b] += 1
    assert sorted(degree) == [1, 1, 2, 2, 2, 2, 2]


def test_order_complex_euler_5_2():
    c = order_complex(string_poset(5, 2))
    assert c.euler == 1
    c.validate()


def test_order_complex_restriction():
    poset = string_poset(5, 2)
    c = order_complex(poset, restrict_to=CellularString("X010X"))
    assert c.counts()[0] == 4  # the down-set is a 2 x 2 grid
    assert gf2_betti(c).trivial


def test_boundary_squares_to_zero():
    poset = string_poset(5, 2)
    c = order_complex(poset)
    for k in range(2, len(c.simplices)):
        idx1 = {s: i for i, s in enumerate(c.simplices[k - 1])}
        idx0 = {s: i for i, s in enumerate(c.simplices[k - 2])}
        for simplex in c.simplices[k]:
            acc = 0
            for drop in range(len(simplex)):
                face = simplex[:drop] + simplex[drop + 1:]
                for drop2 in range(len(face)):
                    face2 = face[:drop2] + face[drop2 + 1:]
                    acc ^= 1 << idx0[face2]
                _ = idx1[face]
            assert acc == 0


def test_gf2_rank_basics():
    assert gf2_rank([]) == 0
    assert gf2_rank([0b01, 0b10, 0b11]) == 2
    assert gf2_rank([0b111, 0b111]) == 1


def test_homology_point_and_circle():
    point = SimplicialComplex(vertex_labels=("a",), simplices=(((0,),),))
    assert gf2_betti(point).betti == (0,)
    triangle = SimplicialComplex(
        vertex_labels=("a", "b", "c"),
        simplices=(((0,), (1,), (2,)), ((0, 1), (0, 2), (1, 2))),
    )
    r = gf2_betti(triangle)
    assert r.betti == (0, 1)
    assert r.euler == 0
    sphere = SimplicialComplex(  # boundary of a tetrahedron
        vertex_labels=("a", "b", "c", "d"),
        simplices=(
            tuple((i,) for i in range(4)),
            tuple(itertools.combinations(range(4), 2)),
            tuple(itertools.combinations(range(4), 3)),
        ),
    )
    assert gf2_betti(sphere).betti == (0, 0, 1)


def test_homology_of_string_poset_is_trivial():
    r = gf2_betti(order_complex(string_poset(5, 2)))
    assert r.trivial and r.euler == 1


def test_retraction_step_worked_examples():
    assert retraction_step("01100").word == "00100"
    assert retraction_step("00100").word == "X0100"
    assert retraction_step("X0010", level=2).word == "XX010"
    assert retraction_step("XX010", level=2).word == "XX010"
    assert retraction_step("X010X").word == "X010X"
    assert retraction_step("010XX").word == "01X0X"
    assert retraction_step("0100X").word == "0110X"
    assert retraction_step("010").word == "010"


def test_retraction_level_requires_prefix():
    with pytest.raises(DomainError):
        retraction_step("01000", level=2)
    with pytest.raises(DomainError):
        retraction_step("X0100", level=0)


def test_retraction_depth_examples():
    assert retraction_depth("X0100") == 0
    assert retraction_depth("00100") == 1
    assert retraction_depth("01100") == 2
    # bounded by the number of bit blocks
    for e in string_poset(6, 2).elements:
        assert retraction_depth(e) <= 3


def test_depth_decreases_under_step():
    for n, m in [(5, 2), (6, 2), (6, 3)]:
        for e in string_poset(n, m).elements:
            d = retraction_depth(e)
            if d > 0:
                assert retraction_depth(retraction_step(e)) <= d - 1


def test_homotopy_witness_examples():
    w = homotopy_witness("01X0X")
    assert (w.witness.word, w.shape) == ("0110X", "glb")
    w = homotopy_witness("00100")
    assert (w.witness.word, w.shape) == ("00100", "comparable")
    w = homotopy_witness("01100")
    assert (w.witness.word, w.shape) == ("0X100", "lub")


def test_witness_total_and_linked():
    for n, m in [(5, 2), (6, 2), (7, 3), (6, 1)]:
        for e in string_poset(n, m).elements:
            w = homotopy_witness(e)
            f = retraction_step(e)
            if w.shape == "lub":
                assert string_leq(e, w.witness) and string_leq(f, w.witness)
            else:
                assert string_leq(w.witness, e) and string_leq(w.witness, f)


def test_downset_products():
    # a single interior X resolves three ways
    assert verify_downset_product("01X00")
    down = string_poset(5, 2).down_set("01X00")
    assert len(down) == 3
    # zero-dimensional strings are singletons
    assert verify_downset_product("01000")
    assert len(string_poset(5, 2).down_set("01000")) == 1
    # two boundary rays give a 2 x 2 grid
    assert verify_downset_product("X010X")
    assert len(string_poset(5, 2).down_set("X010X")) == 4


def test_downset_products_exhaustive_small():
    for n, m in [(5, 2), (6, 2), (6, 3), (6, 1)]:
        for e in string_poset(n, m).elements:
            assert verify_downset_product(e), e.word


def test_contractibility_reports():
    for n, m in [(3, 2), (5, 2), (6, 3)]:
        r = contractibility_report(n, m)
        assert r.contractible, (n, m)
        assert r.all_audits_pass, r.failures


def test_dot_export_mentions_every_cover():
    poset = string_poset(5, 2)
    text = poset_dot(poset)
    assert text.startswith("digraph")
    assert text.count("->") == len(poset.covers)
    assert '"01000" -> "01X00";' in text or '"01000" -> "010X0";' in text
