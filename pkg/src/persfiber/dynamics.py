"""Observation of ODE trajectories through the persistence map.

Provides the sparsity margin of a diagram, the diagram neighborhood it
induces, a fixed-step RK4 integrator that records the diagram at every step,
an invariance monitor for that neighborhood along trajectories, and a
Newton-refined fixed point search.  Everything is deterministic: fixed steps,
no adaptive control, seeds processed in order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .components import enumerate_components
from .diagrams import (INF, PersistenceDiagram, as_vector, is_inf, raw_sublevel_pairs,
                       sublevel_diagram)
from .errors import DivergenceError, InvalidInputError
from .fields import VectorField
from .polytopes import cell_polytope, _cell_distance
from .strings import string_poset

logger = logging.getLogger(__name__)

__all__ = [
    "SparsityMargin",
    "sparsity_margin",
    "DiagramNeighborhood",
    "in_neighborhood",
    "TrajectoryObservation",
    "integrate",
    "InvarianceRecord",
    "InvarianceReport",
    "monitor_invariance",
    "fixed_point_search",
    "OrderStudy",
    "rk4_order_study",
]

DEFAULT_MU_CAP = 1.0


@dataclass(frozen=True)
class SparsityMargin:
    """Separation data of a diagram: a quarter of the smallest gap.

    ``mu_max`` is None when both the pairwise point gaps and the persistences
    are infinite (a single essential point); ``mu`` is then the default cap.
    """

    is_sparse: bool
    mu_max: float | None
    mu: float

    def admits(self, mu: float) -> bool:
        return mu > 0 and (self.mu_max is None or mu <= self.mu_max + 1e-12)


def sparsity_margin(diagram: PersistenceDiagram, mu_cap: float = DEFAULT_MU_CAP) -> SparsityMargin:
    """Margin mu with 4*mu below every point gap (sup norm) and every persistence."""
    pts = diagram.points
    is_sparse = len(set((p.birth, id(p.death) if is_inf(p.death) else p.death)
                        for p in pts)) == len(pts)
    gap = math.inf
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if is_inf(p.death) != is_inf(q.death):
                continue  # infinite sup distance, never the minimum
            if is_inf(p.death):
                d = abs(p.birth - q.birth)
            else:
                d = max(abs(p.birth - q.birth), abs(p.death - q.death))
            gap = min(gap, d)
    pers = min((abs(p.persistence) for p in pts), default=math.inf)
    bound = min(gap, pers)
    if math.isinf(bound):
        return SparsityMargin(is_sparse=is_sparse, mu_max=None, mu=mu_cap)
    return SparsityMargin(is_sparse=is_sparse, mu_max=bound / 4.0, mu=bound / 4.0)


class DiagramNeighborhood:
    """The set of diagrams with one point near each point of a sparse target.

    A diagram belongs when every target point has exactly one point of the
    diagram within L1 distance ``mu`` and every remaining point is
    near-diagonal: persistence at most ``mu`` with birth inside the target's
    birth range widened by ``mu``.  The 4*mu margin keeps the boxes pairwise
    disjoint and disjoint from the near-diagonal strip.
    """

    def __init__(self, diagram: PersistenceDiagram, mu: float):
        margin = sparsity_margin(diagram)
        if not margin.is_sparse:
            raise InvalidInputError("neighborhood requires a sparse diagram")
        if not margin.admits(mu):
            raise InvalidInputError(
                f"mu={mu} exceeds the admissible margin {margin.mu_max}")
        self.diagram = diagram
        self.mu = float(mu)
        births = [p.birth for p in diagram.points]
        self.strip_lo = min(births) - self.mu
        self.strip_hi = max(births) + self.mu
        self._boxes = tuple((p.birth, None if is_inf(p.death) else p.death)
                            for p in diagram.points)

    def to_dict(self) -> dict:
        return {
            "diagram": self.diagram.to_dict(),
            "mu": self.mu,
            "strip_birth_range": [self.strip_lo, self.strip_hi],
        }


def _in_neighborhood_raw(pairs, nbhd: DiagramNeighborhood) -> bool:
    """Membership test on raw (birth, death-or-None) pairs."""
    mu = nbhd.mu
    counts = [0] * len(nbhd._boxes)
    for b, d in pairs:
        hit = -1
        for m, (cb, cd) in enumerate(nbhd._boxes):
            if cd is None:
                if d is None and abs(b - cb) <= mu:
                    hit = m
                    break
            elif d is not None and abs(b - cb) + abs(d - cd) <= mu:
                hit = m
                break
        if hit >= 0:
            counts[hit] += 1
            continue
        if d is None:
            return False
        if not (nbhd.strip_lo <= b <= nbhd.strip_hi and 0.0 <= d - b <= mu):
            return False
    return all(c == 1 for c in counts)


def in_neighborhood(diagram: PersistenceDiagram, nbhd: DiagramNeighborhood) -> bool:
    """Exact membership of a diagram in the neighborhood."""
    pairs = [(p.birth, None if is_inf(p.death) else p.death) for p in diagram.points]
    return _in_neighborhood_raw(pairs, nbhd)


def _rk4_step(f: VectorField, z: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(z)
    k2 = f(z + 0.5 * dt * k1)
    k3 = f(z + 0.5 * dt * k2)
    k4 = f(z + dt * k3)
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_args(field: VectorField, z0, dt: float, horizon: float) -> np.ndarray:
    z = np.asarray(as_vector(z0), dtype=float)
    if len(z) != field.n:
        raise InvalidInputError(f"field acts on R^{field.n}, got a vector of length {len(z)}")
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if horizon < dt:
        raise InvalidInputError(f"horizon must be at least dt, got {horizon} < {dt}")
    return z


@dataclass(frozen=True)
class TrajectoryObservation:
    """A trajectory sampled at a fixed step, with the diagram at every sample."""

    times: np.ndarray
    states: np.ndarray
    diagrams: tuple[PersistenceDiagram, ...]
    dt: float
    in_np: tuple[bool, ...] | None = None
    component_distance: np.ndarray | None = None

    def __post_init__(self):
        assert len(self.times) == len(self.states) == len(self.diagrams)

    def __len__(self):
        return len(self.times)

    def csv_rows(self):
        """Rows (t, z_1..z_N, in_np, dist); the last two empty when not tracked."""
        n = self.states.shape[1]
        yield ["t"] + [f"z{i + 1}" for i in range(n)] + ["in_np", "dist"]
        for i, t in enumerate(self.times):
            row = [repr(float(t))] + [repr(float(v)) for v in self.states[i]]
            row.append("" if self.in_np is None else str(int(self.in_np[i])))
            row.append("" if self.component_distance is None
                       else repr(float(self.component_distance[i])))
            yield row


def integrate(field: VectorField, z0, dt: float, horizon: float) -> TrajectoryObservation:
    """Classical fixed-step RK4 with the diagram recorded at every step.

    Raises :class:`DivergenceError` carrying the last finite time when the
    state blows up.
    """
    z = _check_args(field, z0, dt, horizon)
    steps = int(round(horizon / dt))
    states = np.empty((steps + 1, len(z)))
    states[0] = z
    diagrams = [sublevel_diagram(tuple(z))]
    for i in range(1, steps + 1):
        z = _rk4_step(field, z, dt)
        if not np.isfinite(z).all():
            raise DivergenceError((i - 1) * dt)
        states[i] = z
        diagrams.append(sublevel_diagram(tuple(z)))
    times = np.arange(steps + 1) * dt
    return TrajectoryObservation(times=times, states=states,
                                 diagrams=tuple(diagrams), dt=dt)


class _ComponentDistance:
    """Precompiled sup-norm distance to one component (fixed N)."""

    def __init__(self, cv, n: int):
        self.cv = cv
        self._cells = [cell_polytope(s, cv) for s in string_poset(n, cv.m).maximal()]

    def __call__(self, vals) -> float:
        best = None
        for blocks in self._cells:
            d = _cell_distance(vals, blocks, self.cv)
            if best is None or d < best:
                best = d
                if best == 0.0:
                    break
        return best


@dataclass(frozen=True)
class InvarianceRecord:
    """Per-seed outcome of the neighborhood invariance monitor."""

    seed_index: int
    started_in_np: bool
    stayed_in_np: bool
    first_exit_time: float | None
    exit_diagram: PersistenceDiagram | None
    initial_component: tuple[float, ...] | None
    initial_distance: float | None
    max_distance: float | None          # to the initial component, over time
    state_exit_time: float | None       # first time that distance exceeds mu
    proof_chain_ok: bool
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "seed_index": self.seed_index,
            "started_in_np": self.started_in_np,
            "stayed_in_np": self.stayed_in_np,
            "first_exit_time": self.first_exit_time,
            "exit_diagram": None if self.exit_diagram is None else self.exit_diagram.to_dict(),
            "initial_component": None if self.initial_component is None
            else list(self.initial_component),
            "initial_distance": self.initial_distance,
            "max_distance": self.max_distance,
            "state_exit_time": self.state_exit_time,
            "proof_chain_ok": self.proof_chain_ok,
            "error": self.error,
        }


@dataclass(frozen=True)
class InvarianceReport:
    """Monitor outcome over all seeds, merged in seed order.

    Membership is certified at sample times only; ``dt`` is the sampling
    cadence as well as the integration step.
    """

    mu: float
    dt: float
    horizon: float
    components: tuple[tuple[float, ...], ...]
    records: tuple[InvarianceRecord, ...]

    @property
    def all_invariant(self) -> bool:
        applicable = [r for r in self.records if r.started_in_np and r.error is None]
        return bool(applicable) and all(r.stayed_in_np for r in applicable)

    @property
    def proof_chain_ok(self) -> bool:
        return all(r.proof_chain_ok for r in self.records if r.error is None)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "dt": self.dt,
            "horizon": self.horizon,
            "certified_at": "sample times only",
            "components": [list(c) for c in self.components],
            "all_invariant": self.all_invariant,
            "proof_chain_ok": self.proof_chain_ok,
            "records": [r.to_dict() for r in self.records],
        }


def monitor_invariance(field: VectorField, diagram: PersistenceDiagram, mu: float,
                       seeds, dt: float, horizon: float) -> InvarianceReport:
    """Track neighborhood membership of the diagram along each seed's trajectory.

    For every seed whose initial diagram lies in the neighborhood, records
    whether each sampled diagram stays inside, the first exit otherwise, and
    the sup distance to the seed's initial component.  When the state leaves
    the mu-tube of that component, the diagram must already have left the
    neighborhood at some earlier or equal sample time; ``proof_chain_ok``
    records that implication.
    """
    margin = sparsity_margin(diagram)
    if not margin.is_sparse:
        raise InvalidInputError("invariance monitoring requires a sparse diagram")
    if not margin.admits(mu):
        raise InvalidInputError(f"mu={mu} exceeds the admissible margin {margin.mu_max}")
    nbhd = DiagramNeighborhood(diagram, mu)
    components = enumerate_components(diagram).components
    records = []
    for idx, seed in enumerate(seeds):
        try:
            records.append(_monitor_one(field, nbhd, components, idx, seed, dt, horizon))
        except DivergenceError as exc:
            records.append(InvarianceRecord(
                seed_index=idx, started_in_np=False, stayed_in_np=False,
                first_exit_time=None, exit_diagram=None, initial_component=None,
                initial_distance=None, max_distance=None, state_exit_time=None,
                proof_chain_ok=True, error=str(exc)))
    return InvarianceReport(mu=mu, dt=dt, horizon=horizon,
                            components=tuple(c.values for c in components),
                            records=tuple(records))


def _monitor_one(field, nbhd, components, idx, seed, dt, horizon) -> InvarianceRecord:
    z = _check_args(field, seed, dt, horizon)
    steps = int(round(horizon / dt))
    mu = nbhd.mu
    n = len(z)
    distances = [_ComponentDistance(c, n) for c in components]
    vals = tuple(z)
    started = _in_neighborhood_raw(raw_sublevel_pairs(vals), nbhd)
    if not started:
        return InvarianceRecord(
            seed_index=idx, started_in_np=False, stayed_in_np=False,
            first_exit_time=None, exit_diagram=None, initial_component=None,
            initial_distance=None, max_distance=None, state_exit_time=None,
            proof_chain_ok=True)
    init_vals = [dist(vals) for dist in distances]
    comp_idx = min(range(len(components)), key=lambda i: init_vals[i])
    comp_dist = distances[comp_idx]
    initial_distance = init_vals[comp_idx]
    max_distance = initial_distance
    state_exit_time = None if initial_distance <= mu else 0.0
    first_exit_time = None
    exit_diagram = None
    for i in range(1, steps + 1):
        z = _rk4_step(field, z, dt)
        if not np.isfinite(z).all():
            raise DivergenceError((i - 1) * dt)
        vals = tuple(z)
        pairs = raw_sublevel_pairs(vals)
        t = i * dt
        if first_exit_time is None and not _in_neighborhood_raw(pairs, nbhd):
            first_exit_time = t
            exit_diagram = PersistenceDiagram(
                (b, INF if d is None else d) for b, d in pairs)
        d = comp_dist(vals)
        if d > max_distance:
            max_distance = d
        if state_exit_time is None and d > mu:
            state_exit_time = t
    proof_chain_ok = True
    if state_exit_time is not None:
        proof_chain_ok = first_exit_time is not None and first_exit_time <= state_exit_time
    return InvarianceRecord(
        seed_index=idx, started_in_np=True, stayed_in_np=first_exit_time is None,
        first_exit_time=first_exit_time, exit_diagram=exit_diagram,
        initial_component=components[comp_idx].values,
        initial_distance=initial_distance, max_distance=max_distance,
        state_exit_time=state_exit_time, proof_chain_ok=proof_chain_ok)


def _states_only(field: VectorField, z: np.ndarray, dt: float, steps: int) -> np.ndarray:
    for i in range(steps):
        z = _rk4_step(field, z, dt)
        if not np.isfinite(z).all():
            raise DivergenceError(i * dt)
    return z


def fixed_point_search(field: VectorField, start, tol: float, *,
                       dt: float = 1e-2, horizon: float = 10.0,
                       max_newton: int = 50, max_extensions: int = 3):
    """Integrate to a candidate, then refine by damped Newton on the field.

    Returns a state with sup-norm residual below ``tol``, or None when the
    iteration budget runs out.  A singular Jacobian falls back to a longer
    integration before retrying.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    z = _check_args(field, start, dt, horizon)
    n = field.n
    extensions = 0
    z = _states_only(field, z, dt, int(round(horizon / dt)))
    for _ in range(max_newton):
        f0 = field(z)
        res = float(np.max(np.abs(f0)))
        if res < tol:
            return z.copy()
        jac = np.empty((n, n))
        for j in range(n):
            h = 1e-6 * max(1.0, abs(float(z[j])))
            zp = z.copy()
            zm = z.copy()
            zp[j] += h
            zm[j] -= h
            jac[:, j] = (field(zp) - field(zm)) / (2.0 * h)
        try:
            delta = np.linalg.solve(jac, -f0)
        except np.linalg.LinAlgError:
            logger.debug("singular Jacobian at residual %.3g; integrating further", res)
            if extensions >= max_extensions:
                return None
            extensions += 1
            z = _states_only(field, z, dt, int(round(horizon / dt)))
            continue
        lam = 1.0
        accepted = False
        while lam >= 1.0 / 1024.0:
            z_new = z + lam * delta
            res_new = float(np.max(np.abs(field(z_new))))
            if res_new < res or res_new < tol:
                z = z_new
                accepted = True
                break
            lam /= 2.0
        if not accepted:
            if extensions >= max_extensions:
                return None
            extensions += 1
            z = _states_only(field, z, dt, int(round(horizon / dt)))
    if float(np.max(np.abs(field(z)))) < tol:
        return z.copy()
    return None


@dataclass(frozen=True)
class OrderStudy:
    """Global-error decay of the integrator on the contraction field."""

    dts: tuple[float, ...]
    errors: tuple[float, ...]
    orders: tuple[float, ...]  # slopes between consecutive step sizes

    def to_dict(self) -> dict:
        return {"dts": list(self.dts), "errors": list(self.errors),
                "orders": list(self.orders)}


def rk4_order_study(dts=(1e-1, 1e-2, 1e-3), horizon: float = 100.0,
                    z0=(3.0, 4.5, 1.0, 3.5, 2.0)) -> OrderStudy:
    """Measure the integrator's convergence order on the closed-form contraction.

    Uses the contraction toward the origin, whose solution is exp(-t) * z0,
    and compares relative sup errors at the final time across step sizes.
    The long horizon keeps the smallest step's truncation error above the
    rounding floor so the fitted order is meaningful.
    """
    from .fields import LinearField

    z0 = np.asarray(as_vector(z0), dtype=float)
    field = LinearField(tuple(0.0 for _ in z0))
    exact = math.exp(-horizon) * z0
    scale = float(np.max(np.abs(exact)))
    errors = []
    for dt in dts:
        z = _states_only(field, z0.copy(), dt, int(round(horizon / dt)))
        errors.append(float(np.max(np.abs(z - exact))) / scale)
    orders = tuple(
        math.log(errors[i] / errors[i + 1]) / math.log(dts[i] / dts[i + 1])
        for i in range(len(dts) - 1)
    )
    return OrderStudy(dts=tuple(dts), errors=tuple(errors), orders=orders)
