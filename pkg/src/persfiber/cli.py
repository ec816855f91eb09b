"""Command-line interface exposing every operation of the package.

Each subcommand prints one JSON payload to stdout; diagnostics go to stderr.
Exit codes: 0 success, 1 domain or validation error, 2 usage error.  All
randomness flows from ``--seed`` and identical invocations produce identical
bytes.  Report-style commands (``dyn run``, ``plot diagram``) render a
matplotlib figure next to their delimited output.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bottleneck import bottleneck_distance
from .components import enumerate_components, fiber_membership, nonconvexity_witness
from .contraction import contractibility_report, poset_dot
from .diagrams import (CriticalValueSequence, PersistenceDiagram, critical_value_sequence,
                       is_inf, sublevel_diagram, superlevel_diagram)
from .dynamics import (DiagramNeighborhood, in_neighborhood, integrate, monitor_invariance,
                       fixed_point_search, sparsity_margin, _ComponentDistance)
from .errors import FiberError, InvalidDiagramError, InvalidInputError
from .fields import field_from_config
from .order_complex import gf2_betti, order_complex
from .polytopes import sample_component, sup_distance_to_component
from .strings import string_poset


def parse_vector(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse vector {text!r}: {exc}") from None


def load_diagram(path: str) -> PersistenceDiagram:
    """Read a diagram JSON file; 'inf' marks an infinite death."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidDiagramError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno} (char {exc.pos})"
        ) from None
    return PersistenceDiagram.from_dict(obj)


def _load_field(path: str):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from None
    return field_from_config(obj)


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _number_or_inf(value):
    return "inf" if is_inf(value) else value


# --- subcommand handlers ----------------------------------------------------


def _cmd_dgm(args) -> dict:
    vec = parse_vector(args.vector)
    dgm = superlevel_diagram(vec) if args.superlevel else sublevel_diagram(vec)
    return dgm.to_dict()


def _cmd_cv(args) -> dict:
    cv = critical_value_sequence(parse_vector(args.vector))
    return {"cv": list(cv.values), "parity": cv.parity}


def _cmd_bottleneck(args) -> dict:
    paths = args.diagram or []
    if len(paths) != 2:
        raise InvalidInputError("bottleneck needs exactly two --diagram files")
    d = bottleneck_distance(load_diagram(paths[0]), load_diagram(paths[1]))
    return {"distance": _number_or_inf(d)}


def _cmd_fiber_enumerate(args) -> dict:
    payload = enumerate_components(load_diagram(args.diagram[0])).to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
        payload = dict(payload, out=args.out)
    return payload


def _cmd_fiber_contains(args) -> dict:
    ok, cv = fiber_membership(parse_vector(args.vector), load_diagram(args.diagram[0]))
    return {"contains": ok, "cv": None if cv is None else list(cv.values)}


def _cmd_fiber_sample(args) -> dict:
    cv = CriticalValueSequence(parse_vector(args.cv))
    samples = sample_component(cv, args.n, args.count, cap=args.cap, seed=args.seed)
    target = cv.diagram()
    all_in = all(sublevel_diagram(s) == target for s in samples)
    payload = {
        "cv": list(cv.values),
        "n": args.n,
        "count": args.count,
        "seed": args.seed,
        "all_in_fiber": all_in,
        "samples": [list(s) for s in samples],
    }
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
        payload = {k: v for k, v in payload.items() if k != "samples"}
        payload["out"] = args.out
    return payload


def _cmd_fiber_distance(args) -> dict:
    cv = CriticalValueSequence(parse_vector(args.cv))
    d = sup_distance_to_component(parse_vector(args.vector), cv)
    return {"distance": d}


def _cmd_fiber_nonconvexity(args) -> dict:
    cv = CriticalValueSequence(parse_vector(args.cv)) if args.cv else None
    witness = nonconvexity_witness(cv, n=args.n)
    if witness is None:
        return {"found": False}
    return {
        "found": True,
        "v": list(witness.v),
        "w": list(witness.w),
        "midpoint": list(witness.midpoint),
        "midpoint_diagram": witness.midpoint_diagram.to_dict(),
        "gap": witness.gap,
    }


def _cmd_poset_list(args) -> dict:
    poset = string_poset(args.n, args.m)
    return {
        "n": args.n,
        "m": args.m,
        "count": len(poset),
        "strings": [e.word for e in poset.elements],
    }


def _cmd_poset_export_dot(args) -> dict:
    poset = string_poset(args.n, args.m)
    text = poset_dot(poset)
    Path(args.out).write_text(text)
    return {"out": args.out, "nodes": len(poset), "edges": len(poset.covers)}


def _cmd_poset_homology(args) -> dict:
    poset = string_poset(args.n, args.m)
    report = gf2_betti(order_complex(poset), reduced=True)
    return {"n": args.n, "m": args.m, **report.to_dict()}


def _cmd_poset_verify(args) -> dict:
    return contractibility_report(args.n, args.m).to_dict()


def _annotated_observation(obs, diagram, mu):
    nbhd = DiagramNeighborhood(diagram, mu)
    components = enumerate_components(diagram).components
    dists = [_ComponentDistance(c, obs.states.shape[1]) for c in components]
    in_np = tuple(in_neighborhood(d, nbhd) for d in obs.diagrams)
    dist = np.array([min(f(tuple(row)) for f in dists) for row in obs.states])
    return obs.__class__(times=obs.times, states=obs.states, diagrams=obs.diagrams,
                         dt=obs.dt, in_np=in_np, component_distance=dist)


def _cmd_dyn_run(args) -> dict:
    field = _load_field(args.field)
    obs = integrate(field, parse_vector(args.vector), args.dt, args.horizon)
    if args.diagram:
        diagram = load_diagram(args.diagram[0])
        mu = args.mu if args.mu is not None else sparsity_margin(diagram).mu
        obs = _annotated_observation(obs, diagram, mu)
    payload = {
        "steps": len(obs) - 1,
        "dt": args.dt,
        "horizon": args.horizon,
        "final_state": [float(v) for v in obs.states[-1]],
        "final_diagram": obs.diagrams[-1].to_dict(),
    }
    if obs.in_np is not None:
        payload["always_in_np"] = all(obs.in_np)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerows(obs.csv_rows())
        figure = str(Path(args.out).with_suffix(".svg"))
        from .plotting import plot_trajectory

        plot_trajectory(obs, figure)
        payload["out"] = args.out
        payload["figure"] = figure
    return payload


def _monitor_seeds(args, field, diagram, mu):
    if args.seeds:
        with open(args.seeds) as fh:
            data = json.load(fh)
        return [tuple(float(v) for v in row) for row in data]
    if args.cv:
        cv = CriticalValueSequence(parse_vector(args.cv))
    else:
        cv = enumerate_components(diagram).components[0]
    base = sample_component(cv, field.n, args.count, seed=args.seed)
    rng = np.random.default_rng(args.seed + 1)
    return [tuple(np.asarray(s) + rng.uniform(-mu / 4, mu / 4, size=field.n))
            for s in base]


def _cmd_dyn_monitor(args) -> dict:
    field = _load_field(args.field)
    diagram = load_diagram(args.diagram[0])
    mu = args.mu if args.mu is not None else sparsity_margin(diagram).mu
    seeds = _monitor_seeds(args, field, diagram, mu)
    report = monitor_invariance(field, diagram, mu, seeds, args.dt, args.horizon)
    payload = report.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
        payload = {"out": args.out, "all_invariant": report.all_invariant,
                   "proof_chain_ok": report.proof_chain_ok}
    return payload


def _cmd_dyn_fixpoint(args) -> dict:
    field = _load_field(args.field)
    z = fixed_point_search(field, parse_vector(args.vector), args.tol,
                           dt=args.dt, horizon=args.horizon)
    if z is None:
        return {"found": False, "z": None, "residual": None}
    residual = float(np.max(np.abs(field(z))))
    return {"found": True, "z": [float(v) for v in z], "residual": residual}


def _cmd_plot_diagram(args) -> dict:
    diagram = load_diagram(args.diagram[0])
    from .plotting import plot_diagram

    plot_diagram(diagram, args.out, mu=args.mu)
    return {"out": args.out}


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persfiber",
        description="Persistence diagrams of path-complex vectors, the geometry "
                    "of their preimages, and diagram-observed dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *names):
        if "vector" in names:
            p.add_argument("--vector", required=True, help="comma-separated coordinates")
        if "diagram" in names:
            p.add_argument("--diagram", action="append", help="diagram JSON file")
        if "nm" in names:
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--m", type=int, required=True)
        if "seed" in names:
            p.add_argument("--seed", type=int, default=0)
        if "out" in names:
            p.add_argument("--out", help="output file path")

    p = sub.add_parser("dgm", help="persistence diagram of a vector")
    add_common(p, "vector")
    p.add_argument("--superlevel", action="store_true")
    p.set_defaults(func=_cmd_dgm)

    p = sub.add_parser("cv", help="critical value sequence of a typical vector")
    add_common(p, "vector")
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("bottleneck", help="bottleneck distance of two diagram files")
    add_common(p, "diagram")
    p.set_defaults(func=_cmd_bottleneck)

    fiber = sub.add_parser("fiber", help="preimage component queries")
    fsub = fiber.add_subparsers(dest="subcommand", required=True)

    p = fsub.add_parser("enumerate", help="component labels of a diagram's preimage")
    add_common(p, "diagram", "out")
    p.set_defaults(func=_cmd_fiber_enumerate)

    p = fsub.add_parser("contains", help="exact preimage membership of a vector")
    add_common(p, "vector", "diagram")
    p.set_defaults(func=_cmd_fiber_contains)

    p = fsub.add_parser("sample", help="random points of one component")
    p.add_argument("--cv", required=True, help="comma-separated critical values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--cap", type=float, default=None, help="ray truncation length")
    add_common(p, "seed", "out")
    p.set_defaults(func=_cmd_fiber_sample)

    p = fsub.add_parser("distance", help="sup-norm distance of a vector to a component")
    add_common(p, "vector")
    p.add_argument("--cv", required=True, help="comma-separated critical values")
    p.set_defaults(func=_cmd_fiber_distance)

    p = fsub.add_parser("nonconvexity", help="midpoint witness that a component is not convex")
    p.add_argument("--cv", default=None, help="comma-separated critical values")
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=_cmd_fiber_nonconvexity)

    poset = sub.add_parser("poset", help="cellular string poset queries")
    psub = poset.add_subparsers(dest="subcommand", required=True)

    p = psub.add_parser("list", help="all strings in lexicographic order")
    add_common(p, "nm")
    p.set_defaults(func=_cmd_poset_list)

    p = psub.add_parser("export-dot", help="covering relations as Graphviz DOT")
    add_common(p, "nm")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_poset_export_dot)

    p = psub.add_parser("homology", help="GF(2) Betti numbers of the order complex")
    add_common(p, "nm")
    p.set_defaults(func=_cmd_poset_homology)

    p = psub.add_parser("verify", help="contractibility evidence plus morphism audits")
    add_common(p, "nm")
    p.set_defaults(func=_cmd_poset_verify)

    dyn = sub.add_parser("dyn", help="trajectory observation and fixed points")
    dsub = dyn.add_subparsers(dest="subcommand", required=True)

    p = dsub.add_parser("run", help="integrate and record diagrams (CSV + figure with --out)")
    p.add_argument("--field", required=True, help="field config JSON file")
    add_common(p, "vector", "diagram", "out")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=5.0)
    p.set_defaults(func=_cmd_dyn_run)

    p = dsub.add_parser("monitor", help="neighborhood invariance along seed trajectories")
    p.add_argument("--field", required=True)
    add_common(p, "diagram", "seed", "out")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--seeds", help="JSON file with a list of seed vectors")
    p.add_argument("--count", type=int, default=10, help="generated seeds when --seeds absent")
    p.add_argument("--cv", default=None,
                   help="component (critical values) to generate seeds near; default: first")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=5.0)
    p.set_defaults(func=_cmd_dyn_monitor)

    p = dsub.add_parser("fixpoint", help="Newton-refined fixed point search")
    p.add_argument("--field", required=True)
    add_common(p, "vector")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--horizon", type=float, default=10.0)
    p.set_defaults(func=_cmd_dyn_fixpoint)

    plot = sub.add_parser("plot", help="figure emission")
    plsub = plot.add_subparsers(dest="subcommand", required=True)

    p = plsub.add_parser("diagram", help="diagram figure with diagonal and neighborhood boxes")
    add_common(p, "diagram")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot_diagram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        payload = args.func(args)
    except FiberError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(payload)
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
