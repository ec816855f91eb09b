import itertools

import numpy as np
import pytest

from persfiber.bottleneck import bottleneck_distance
from persfiber.components import (containment_count, enumerate_components, fiber_membership,
                                  nonconvexity_witness)
from persfiber.diagrams import (INF, CriticalValueSequence, PersistenceDiagram,
                                sublevel_diagram)
from persfiber.errors import InvalidDiagramError

from _oracles import rank_diagram_pairs

Q = PersistenceDiagram([(1, INF), (2, 3.5), (3, 4.5)])


def test_membership_accepts_fiber_points():
    ok, cv = fiber_membership((3, 4.5, 1, 3.5, 2), Q)
    assert ok and cv.values == (3.0, 4.5, 1.0, 3.5, 2.0)
    ok, cv = fiber_membership((1, 2, 3), PersistenceDiagram([(1, INF)]))
    assert ok and cv.values == (1.0,)


def test_membership_rejects_other_vectors():
    ok, cv = fiber_membership((0, 1, 2), Q)
    assert not ok and cv is None


def test_single_point_diagram_has_one_component():
    enum = enumerate_components(PersistenceDiagram([(4.25, INF)]))
    assert [c.values for c in enum.components] == [(4.25,)]
    assert enum.formula_count == enum.enumerated_count == 1


def test_enumeration_requires_one_essential_point():
    with pytest.raises(InvalidDiagramError):
        enumerate_components(PersistenceDiagram([(0, 1)]))
    with pytest.raises(InvalidDiagramError):
        enumerate_components(PersistenceDiagram([(0, INF), (1, INF)]))


def test_three_point_diagram_components():
    enum = enumerate_components(Q)
    got = [c.values for c in enum.components]
    assert len(got) == 4
    assert (3.0, 4.5, 1.0, 3.5, 2.0) in got
    assert (1.0, 3.5, 2.0, 4.5, 3.0) in got
    assert enum.formula_count == 4
    assert enum.counts_agree


def _interleaving_oracle(diagram):
    """All alternating layouts of births and deaths whose diagram equals the input.

    Candidate sequences are checked with the rank-function oracle, not the
    implementation's elder rule.
    """
    from _oracles import diagram_pairs

    births = [p.birth for p in diagram.points]
    deaths = [p.death for p in diagram.finite_points()]
    target_pairs = diagram_pairs(diagram)
    out = set()
    for bperm in itertools.permutations(births):
        for dperm in itertools.permutations(deaths):
            seq = []
            for i, b in enumerate(bperm):
                seq.append(b)
                if i < len(dperm):
                    seq.append(dperm[i])
            if any(not (seq[i] < seq[i + 1] if i % 2 == 0 else seq[i] > seq[i + 1])
                   for i in range(len(seq) - 1)):
                continue
            if rank_diagram_pairs(tuple(seq)) == target_pairs:
                out.add(tuple(seq))
    return out


def test_enumeration_matches_interleaving_oracle():
    rng = np.random.default_rng(19)
    for _ in range(25):
        m = int(rng.integers(1, 5))
        births = sorted(rng.uniform(0, 4, size=m))
        pts = [(births[0], INF)]
        for b in births[1:]:
            pts.append((b, b + float(rng.uniform(0.2, 4.0))))
        diagram = PersistenceDiagram(pts)
        enum = enumerate_components(diagram)
        assert set(c.values for c in enum.components) == _interleaving_oracle(diagram)


def test_formula_agrees_on_random_distinct_diagrams():
    rng = np.random.default_rng(29)
    for _ in range(25):
        m = int(rng.integers(1, 5))
        births = sorted(rng.uniform(0, 4, size=m))
        pts = [(births[0], INF)]
        for b in births[1:]:
            pts.append((b, b + float(rng.uniform(0.2, 4.0))))
        diagram = PersistenceDiagram(pts)
        enum = enumerate_components(diagram)
        assert enum.counts_agree, diagram


def test_containment_count_example():
    assert containment_count(Q) == 4
    nested = PersistenceDiagram([(0, INF), (1, 10), (2, 9)])
    # the bar (2, 9) sits inside both others, (1, 10) inside the essential bar
    assert containment_count(nested) == 4 * 2 * 1


def test_nonconvexity_witness_found():
    w = nonconvexity_witness()
    assert w is not None
    target = sublevel_diagram(w.v)
    assert sublevel_diagram(w.w) == target
    assert w.midpoint == tuple((a + b) / 2 for a, b in zip(w.v, w.w))
    assert w.gap > 0.1
    ok, _ = fiber_membership(w.midpoint, target)
    assert not ok


def test_nonconvexity_witness_on_given_component():
    cv = CriticalValueSequence((3.0, 4.5, 1.0, 3.5, 2.0))
    w = nonconvexity_witness(cv, n=6)
    assert w is not None
    assert bottleneck_distance(w.midpoint_diagram, sublevel_diagram(cv.values)) == w.gap
