import math

import numpy as np
import pytest

from persfiber.bottleneck import bottleneck_distance
from persfiber.diagrams import INF, PersistenceDiagram, is_inf, sublevel_diagram
from persfiber.dynamics import (DiagramNeighborhood, fixed_point_search, in_neighborhood,
                                integrate, monitor_invariance, rk4_order_study,
                                sparsity_margin)
from persfiber.errors import DivergenceError, InvalidInputError
from persfiber.fields import (LinearField, Periodic3Field, PolynomialField,
                              field_from_config)

from _oracles import brute_in_neighborhood, diagram_pairs

Q = PersistenceDiagram([(1, INF), (2, 3.5), (3, 4.5)])
ZHAT = (3.0, 4.5, 1.0, 3.5, 2.0)


def test_sparsity_margin_of_q():
    m = sparsity_margin(Q)
    assert m.is_sparse
    assert m.mu_max == 0.25
    assert m.mu == 0.25


def test_duplicate_point_not_sparse():
    m = sparsity_margin(PersistenceDiagram([(1, INF), (2, 3.5), (2, 3.5)]))
    assert not m.is_sparse


def test_single_essential_point_unbounded():
    m = sparsity_margin(PersistenceDiagram([(0, INF)]))
    assert m.is_sparse and m.mu_max is None and m.mu == 1.0
    assert m.admits(123.0)


def test_neighborhood_membership_examples():
    nb = DiagramNeighborhood(Q, 0.25)
    assert in_neighborhood(Q, nb)
    extra = PersistenceDiagram([(1, INF), (2, 3.5), (3, 4.5), (2.9, 3.0)])
    assert in_neighborhood(extra, nb)
    moved = PersistenceDiagram([(1, INF), (2.3, 3.5), (3, 4.5)])
    assert not in_neighborhood(moved, nb)


def test_neighborhood_rejects_oversized_mu():
    with pytest.raises(InvalidInputError):
        DiagramNeighborhood(Q, 0.3)


def test_neighborhood_matches_assignment_oracle():
    nb = DiagramNeighborhood(Q, 0.25)
    centers = [(p.birth, None if is_inf(p.death) else p.death) for p in Q.points]
    rng = np.random.default_rng(41)
    for _ in range(300):
        n_pts = int(rng.integers(1, 6))
        pts = []
        for _ in range(n_pts):
            b = float(rng.uniform(0, 5))
            if rng.uniform() < 0.25:
                pts.append((b, None))
            else:
                pts.append((b, b + float(rng.uniform(0.01, 4.0))))
        diagram = PersistenceDiagram([(b, INF if d is None else d) for b, d in pts])
        want = brute_in_neighborhood(diagram_pairs(diagram), centers, 0.25,
                                     nb.strip_lo, nb.strip_hi)
        assert in_neighborhood(diagram, nb) == want


def test_integrate_equilibrium_stays_put():
    obs = integrate(LinearField(ZHAT), ZHAT, 0.01, 0.5)
    assert np.allclose(obs.states, np.asarray(ZHAT))
    assert all(d == Q for d in obs.diagrams)


def test_integrate_matches_closed_form():
    z0 = np.array([4.0, 5.0, 2.0, 4.0, 3.0])
    obs = integrate(LinearField(ZHAT), tuple(z0), 1e-3, 5.0)
    exact = np.asarray(ZHAT) + math.exp(-5.0) * (z0 - np.asarray(ZHAT))
    assert float(np.max(np.abs(obs.states[-1] - exact))) < 1e-6


def test_integrate_diverges_with_error():
    cubic = PolynomialField((((1.0, (3,)),),))  # dz/dt = z^3 blows up
    with pytest.raises(DivergenceError) as info:
        integrate(cubic, (3.0,), 0.05, 50.0)
    assert info.value.last_time >= 0.0


def test_integrate_validates():
    with pytest.raises(InvalidInputError):
        integrate(LinearField(ZHAT), (1.0, 2.0), 0.01, 1.0)
    with pytest.raises(InvalidInputError):
        integrate(LinearField(ZHAT), ZHAT, -0.1, 1.0)
    with pytest.raises(InvalidInputError):
        integrate(LinearField(ZHAT), ZHAT, 0.5, 0.1)


def test_periodic_orbit_returns_and_keeps_diagram():
    field = Periodic3Field()
    start = field.orbit_start()
    obs = integrate(field, tuple(start), 1e-3, float(field.period()))
    assert float(np.max(np.abs(obs.states[-1] - start))) < 1e-6
    assert np.allclose(obs.states[:, 0], 0.0)
    target = PersistenceDiagram([(0.0, INF)])
    assert all(d == target for d in obs.diagrams)
    displacement = float(np.max(np.abs(obs.states - start)))
    assert displacement > 0.5


def test_stability_along_trajectory():
    obs = integrate(LinearField(ZHAT), (4.0, 5.0, 2.0, 4.0, 3.0), 0.05, 2.0)
    for i in range(len(obs) - 1):
        d = bottleneck_distance(obs.diagrams[i], obs.diagrams[i + 1])
        step = float(np.max(np.abs(obs.states[i + 1] - obs.states[i])))
        assert not is_inf(d)
        assert d <= step + 1e-12


def _seeds_near(zhat, count, spread, seed=0):
    rng = np.random.default_rng(seed)
    base = np.asarray(zhat)
    return [tuple(base + rng.uniform(-spread, spread, size=base.size))
            for _ in range(count)]


def test_monitor_contraction_is_invariant():
    seeds = _seeds_near(ZHAT, 5, 0.125)
    report = monitor_invariance(LinearField(ZHAT), Q, 0.25, seeds, 1e-3, 2.0)
    assert report.all_invariant
    assert report.proof_chain_ok
    for r in report.records:
        assert r.started_in_np and r.stayed_in_np
        assert r.initial_component == (3.0, 4.5, 1.0, 3.5, 2.0)
        assert r.max_distance <= 0.25


def test_monitor_detects_exit_toward_other_component():
    other = (1.0, 3.5, 2.0, 4.5, 3.0)
    seeds = _seeds_near(ZHAT, 3, 0.1, seed=2)
    report = monitor_invariance(LinearField(other), Q, 0.25, seeds, 1e-3, 8.0)
    assert not report.all_invariant
    for r in report.records:
        assert r.started_in_np and not r.stayed_in_np
        assert r.first_exit_time is not None
        assert r.exit_diagram is not None
        assert not in_neighborhood(r.exit_diagram, DiagramNeighborhood(Q, 0.25))
        # the diagram exits no later than the state leaves the component tube
        assert r.proof_chain_ok


def test_monitor_periodic_constant_diagram():
    field = Periodic3Field()
    P = PersistenceDiagram([(0.0, INF)])
    report = monitor_invariance(field, P, 1.0, [tuple(field.orbit_start())],
                                1e-2, float(field.period()))
    r = report.records[0]
    assert r.started_in_np and r.stayed_in_np
    assert r.max_distance == 0.0  # the orbit stays inside the component


def test_monitor_skips_seeds_outside():
    report = monitor_invariance(LinearField(ZHAT), Q, 0.25, [(9.0, 9.0, 9.0, 9.0, 9.0)],
                                0.01, 0.1)
    assert not report.records[0].started_in_np


def test_monitor_validates_margin():
    with pytest.raises(InvalidInputError):
        monitor_invariance(LinearField(ZHAT), Q, 0.5, [ZHAT], 0.01, 0.1)


def test_fixed_point_linear():
    z = fixed_point_search(LinearField(ZHAT), (9.0, -4.0, 7.0, 0.0, 1.0), 1e-9)
    assert z is not None
    assert float(np.max(np.abs(np.asarray(z) - np.asarray(ZHAT)))) < 1e-9


def test_fixed_point_certificate():
    field = LinearField(ZHAT)
    z = fixed_point_search(field, (0.0, 0.0, 0.0, 0.0, 0.0), 1e-10)
    assert float(np.max(np.abs(field(np.asarray(z))))) < 1e-10
    ok, _ = (sublevel_diagram(tuple(z)) == Q, None)
    assert ok


def test_fixed_point_periodic_orbit_is_not_certified():
    field = Periodic3Field()
    z = fixed_point_search(field, tuple(field.orbit_start()), 1e-9)
    if z is not None:
        # off the observed orbit: the orbit has radius 0.5 around the center
        radius = math.hypot(z[1] - 2.0, z[2] - 3.0)
        assert abs(radius - 0.5) > 0.25
    else:
        assert z is None


def test_field_config_roundtrip():
    for field in (LinearField(ZHAT), Periodic3Field(),
                  PolynomialField((((1.0, (0, 1)), (-0.5, (1, 0))), ((2.0, (0, 0)),)))):
        again = field_from_config(field.to_config())
        z = np.linspace(0.5, 1.5, field.n)
        assert np.allclose(field(z), again(z))
    with pytest.raises(InvalidInputError):
        field_from_config({"kind": "nope"})
    with pytest.raises(InvalidInputError):
        field_from_config({})


def test_rk4_order():
    study = rk4_order_study(dts=(1e-1, 1e-2), horizon=20.0)
    assert study.orders[0] > 3.8
    assert study.errors[0] > study.errors[1]
