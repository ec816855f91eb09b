import json

import numpy as np
import pytest

from persfiber.diagrams import (INF, CriticalValueSequence, PersistenceDiagram,
                                collapsed_critical_values, critical_value_sequence,
                                extrema_pairing_check, is_typical, negate_diagram,
                                sublevel_diagram, superlevel_diagram)
from persfiber.errors import InvalidDiagramError, InvalidInputError, TieError

from _oracles import diagram_pairs, elder_diagram_pairs, rank_diagram_pairs


def pairs(*pts):
    return sorted(pts, key=lambda p: (p[0], p[1] is None, p[1] or 0.0))


def test_monotone_vector_single_component():
    assert diagram_pairs(sublevel_diagram((1, 2, 3))) == [(1.0, None)]


def test_five_point_wave():
    # hand elder rule: minima -0.9 and 1.4, interior max 2.1 kills the younger
    d = sublevel_diagram((1.5, -0.9, 1.1, 2.1, 1.4))
    assert diagram_pairs(d) == pairs((-0.9, None), (1.4, 2.1))


def test_three_feature_vector():
    d = sublevel_diagram((3, 4.5, 1, 3.5, 2))
    assert diagram_pairs(d) == pairs((1.0, None), (2.0, 3.5), (3.0, 4.5))


def test_invalid_inputs():
    with pytest.raises(InvalidInputError):
        sublevel_diagram(())
    with pytest.raises(InvalidInputError):
        sublevel_diagram((1.0, float("nan")))
    with pytest.raises(InvalidInputError):
        sublevel_diagram((1.0, float("inf")))


def test_matches_union_find_oracle_random():
    rng = np.random.default_rng(7)
    for _ in range(400):
        n = int(rng.integers(1, 13))
        z = tuple(rng.uniform(-5, 5, size=n))
        got = diagram_pairs(sublevel_diagram(z))
        assert got == elder_diagram_pairs(z)
        assert got == rank_diagram_pairs(z)


def test_matches_oracles_with_ties():
    rng = np.random.default_rng(11)
    for _ in range(400):
        n = int(rng.integers(1, 11))
        z = tuple(float(v) for v in rng.integers(0, 4, size=n))
        assert diagram_pairs(sublevel_diagram(z)) == rank_diagram_pairs(z)


def test_plateaus_collapse():
    assert diagram_pairs(sublevel_diagram((1.0, 1.0))) == [(1.0, None)]
    assert diagram_pairs(sublevel_diagram((0, 2, 2, 0))) == pairs((0.0, None), (0.0, 2.0))
    # a repeated maximum yields a repeated death, multiset preserved
    assert diagram_pairs(sublevel_diagram((0, 2, 1, 2, 0))) == pairs(
        (0.0, None), (0.0, 2.0), (1.0, 2.0))


def test_superlevel_is_reflected_negation():
    assert diagram_pairs(superlevel_diagram((1, 2, 3))) == [(3.0, None)]
    assert diagram_pairs(superlevel_diagram((0, 5, 1))) == [(5.0, None)]
    z = (1.5, -0.9, 1.1, 2.1, 1.4)
    assert superlevel_diagram(z) == negate_diagram(sublevel_diagram([-v for v in z]))


def test_critical_value_sequence_examples():
    assert critical_value_sequence((1.5, -0.9, 1.1, 2.1, 1.4)).values == (-0.9, 2.1, 1.4)
    assert critical_value_sequence((1, 2, 3)).values == (1.0,)
    assert critical_value_sequence((3, 4.5, 1, 3.5, 2)).values == (3.0, 4.5, 1.0, 3.5, 2.0)


def test_tie_error_carries_first_pair():
    with pytest.raises(TieError) as info:
        critical_value_sequence((1.0, 2.0, 1.0, 2.0))
    assert (info.value.i, info.value.j) == (0, 2)
    assert not is_typical((1.0, 2.0, 1.0))
    assert is_typical((1.0, 2.0, 3.0))


def test_collapsed_critical_values_on_plateau():
    assert collapsed_critical_values((0, 2, 2, 2, 1)).values == (0.0, 2.0, 1.0)


def test_cv_length_matches_diagram_size():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 13))
        z = tuple(rng.uniform(0, 1, size=n))
        cv = critical_value_sequence(z)
        assert cv.k == 2 * len(sublevel_diagram(z)) - 1


def test_cv_alternation_validation():
    with pytest.raises(InvalidInputError):
        CriticalValueSequence((1.0, 1.0, 0.0))
    with pytest.raises(InvalidInputError):
        CriticalValueSequence((1.0, 2.0))
    CriticalValueSequence((2.0, 1.0, 3.0), parity="101")
    with pytest.raises(InvalidInputError):
        CriticalValueSequence((1.0, 2.0, 0.5), parity="101")


def test_extrema_pairing_check_examples():
    r = extrema_pairing_check((1.5, -0.9, 1.1, 2.1, 1.4))
    assert r.passed and (r.m, r.k) == (2, 3)
    r = extrema_pairing_check((1, 2, 3))
    assert r.passed and (r.m, r.k) == (1, 1)
    with pytest.raises(TieError):
        extrema_pairing_check((1.0, 1.0))


def test_exactly_one_infinite_point():
    rng = np.random.default_rng(5)
    for _ in range(200):
        z = tuple(rng.uniform(-1, 1, size=int(rng.integers(1, 10))))
        assert len(sublevel_diagram(z).infinite_points()) == 1


def test_canonical_order_and_serialization_roundtrip():
    d = PersistenceDiagram([(2.0, 3.5), (1.0, INF), (3.0, 4.5)])
    assert [p.birth for p in d.points] == [1.0, 2.0, 3.0]
    blob = json.dumps(d.to_dict())
    assert d == PersistenceDiagram.from_dict(json.loads(blob))
    # infinite death sorts after finite at equal birth
    d2 = PersistenceDiagram([(1.0, INF), (1.0, 2.0)])
    assert [(p.birth, p.death) for p in d2.points][0] == (1.0, 2.0)


def test_from_dict_rejects_bad_points():
    with pytest.raises(InvalidDiagramError):
        PersistenceDiagram.from_dict({"points": [{"b": 3, "d": 1}]})
    with pytest.raises(InvalidDiagramError):
        PersistenceDiagram.from_dict({"points": [{"b": 1, "d": 1}]})
    with pytest.raises(InvalidDiagramError):
        PersistenceDiagram.from_dict({"points": [{"b": "x", "d": 2}]})
    with pytest.raises(InvalidDiagramError):
        PersistenceDiagram.from_dict({"nope": []})
    # superlevel-oriented points parse when asked
    d = PersistenceDiagram.from_dict({"points": [{"b": 3, "d": 1}]}, require_sublevel=False)
    assert d.points[0].death == 1.0


def test_diagram_multiset_equality():
    a = PersistenceDiagram([(0, 2), (0, 2), (1, INF)])
    b = PersistenceDiagram([(0, 2), (1, INF)])
    assert a != b
    assert a == PersistenceDiagram([(0, 2), (1, INF), (0, 2)])
