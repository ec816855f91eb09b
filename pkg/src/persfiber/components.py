"""Membership and component enumeration for preimages of the persistence map.

The preimage of a diagram P splits into finitely many components, one per
admissible ordering of P's births and deaths into an alternating critical
value sequence.  Enumeration interleaves every permutation of births with
every permutation of finite deaths and keeps the sequences whose own diagram
reproduces P; a closed-form count from bar-containment multiplicities is
evaluated alongside as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bottleneck import bottleneck_distance
from .diagrams import (CriticalValueSequence, PersistenceDiagram, as_vector,
                       collapsed_critical_values, is_inf, sublevel_diagram)
from .errors import InvalidDiagramError
from .polytopes import generic_cell_point
from .strings import string_poset

__all__ = [
    "fiber_membership",
    "enumerate_components",
    "ComponentEnumeration",
    "containment_count",
    "nonconvexity_witness",
    "NonconvexityWitness",
]


def fiber_membership(z, diagram: PersistenceDiagram):
    """(True, component label) when ``dgm(z)`` equals ``diagram`` exactly, else (False, None).

    The label is the critical value sequence of ``z``, computed with plateau
    collapse so that non-typical vectors are handled too.
    """
    vals = as_vector(z)
    if sublevel_diagram(vals) != diagram:
        return False, None
    return True, collapsed_critical_values(vals)


def containment_count(diagram: PersistenceDiagram) -> int:
    """Closed-form component count from bar containments.

    Evaluates ``2**(M-1) * prod(mu_j)`` over the finite bars, where ``mu_j``
    counts the other bars of the diagram containing bar j (an infinite death
    contains every finite one).
    """
    pts = diagram.points
    m = len(pts)

    def contains(outer, inner) -> bool:
        if outer is inner:
            return False
        if outer.birth > inner.birth:
            return False
        if is_inf(outer.death):
            return True
        if is_inf(inner.death):
            return False
        return inner.death <= outer.death

    result = 2 ** (m - 1)
    for p in pts:
        if is_inf(p.death):
            continue
        result *= sum(1 for q in pts if contains(q, p))
    return result


@dataclass(frozen=True)
class ComponentEnumeration:
    """Component labels of a diagram's preimage plus the count cross-check."""

    diagram: PersistenceDiagram
    components: tuple[CriticalValueSequence, ...]
    formula_count: int
    enumerated_count: int

    @property
    def counts_agree(self) -> bool:
        return self.formula_count == self.enumerated_count

    def to_dict(self) -> dict:
        return {
            "diagram": self.diagram.to_dict(),
            "components": [
                {
                    "cv": list(cv.values),
                    "formula_count": self.formula_count,
                    "enumerated_count": self.enumerated_count,
                }
                for cv in self.components
            ],
            "formula_count": self.formula_count,
            "enumerated_count": self.enumerated_count,
            "counts_agree": self.counts_agree,
        }


def enumerate_components(diagram: PersistenceDiagram) -> ComponentEnumeration:
    """All critical value sequences labelling a component of the preimage.

    Requires exactly one infinite-death point.  Duplicate points are treated
    as distinguishable, so a diagram with repeated points yields repeated
    labels; this matches the closed-form count, which also distinguishes them.
    """
    n_inf = len(diagram.infinite_points())
    if n_inf != 1:
        raise InvalidDiagramError(
            f"component enumeration needs exactly one infinite-death point, found {n_inf}")
    births = [p.birth for p in diagram.points]
    deaths = [p.death for p in diagram.finite_points()]
    labels = []
    for bperm in itertools.permutations(births):
        for dperm in itertools.permutations(deaths):
            seq: list[float] = []
            for i, b in enumerate(bperm):
                seq.append(b)
                if i < len(dperm):
                    seq.append(dperm[i])
            ok = all(seq[i] < seq[i + 1] if i % 2 == 0 else seq[i] > seq[i + 1]
                     for i in range(len(seq) - 1))
            if not ok:
                continue
            if sublevel_diagram(seq) == diagram:
                labels.append(tuple(seq))
    labels.sort()
    components = tuple(CriticalValueSequence(v) for v in labels)
    return ComponentEnumeration(
        diagram=diagram,
        components=components,
        formula_count=containment_count(diagram),
        enumerated_count=len(components),
    )


@dataclass(frozen=True)
class NonconvexityWitness:
    """Two points of one component whose midpoint leaves the preimage."""

    v: tuple[float, ...]
    w: tuple[float, ...]
    midpoint: tuple[float, ...]
    midpoint_diagram: PersistenceDiagram
    gap: float  # bottleneck distance from the midpoint's diagram to the target


def nonconvexity_witness(cv=None, n: int | None = None,
                         min_gap: float = 0.1) -> NonconvexityWitness | None:
    """Search one component for a pair whose midpoint exits the preimage.

    Scans ordered pairs of maximal cells, takes a canonical interior point of
    each, and returns the first pair whose midpoint diagram sits farther than
    ``min_gap`` (bottleneck) from the component's diagram.  The default
    component (critical values 0, 3, 1 in R^4) mirrors the classic picture of
    a non-convex preimage.
    """
    if cv is None:
        cv = CriticalValueSequence((0.0, 3.0, 1.0))
    elif not isinstance(cv, CriticalValueSequence):
        cv = CriticalValueSequence(tuple(float(x) for x in cv))
    if n is None:
        n = cv.k + 1
    target = sublevel_diagram(cv.values)
    maximal = string_poset(n, cv.m).maximal()
    points = {s.word: generic_cell_point(s, cv) for s in maximal}
    for s1, s2 in itertools.combinations(maximal, 2):
        v = points[s1.word]
        w = points[s2.word]
        if sublevel_diagram(v) != target or sublevel_diagram(w) != target:
            continue
        mid = tuple((a + b) / 2.0 for a, b in zip(v, w))
        mid_dgm = sublevel_diagram(mid)
        gap = bottleneck_distance(mid_dgm, target)
        if not is_inf(gap) and gap > min_gap:
            return NonconvexityWitness(v=v, w=w, midpoint=mid,
                                       midpoint_diagram=mid_dgm, gap=gap)
        if is_inf(gap):
            return NonconvexityWitness(v=v, w=w, midpoint=mid,
                                       midpoint_diagram=mid_dgm, gap=float("inf"))
    return None
