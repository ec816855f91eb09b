"""Built-in vector fields observed through the persistence map.

Three kinds are supported, all total on R^N and JSON-configurable:

* ``linear`` -- contraction toward a target: dz/dt = target - z;
* ``periodic3`` -- a rigid rotation in R^3 whose diagram stays constant on
  the built-in circular orbit while the state keeps moving;
* ``poly`` -- per-coordinate polynomial right-hand sides given as monomial
  tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = ["VectorField", "LinearField", "Periodic3Field", "PolynomialField",
           "field_from_config"]


class VectorField:
    """Callable right-hand side of an autonomous ODE on R^n."""

    n: int

    def __call__(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearField(VectorField):
    """dz/dt = target - z; every trajectory contracts to ``target`` like exp(-t)."""

    target: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "target", tuple(float(v) for v in self.target))
        if not self.target:
            raise InvalidInputError("linear field needs a nonempty target")
        object.__setattr__(self, "_target_arr", np.asarray(self.target, dtype=float))

    @property
    def n(self) -> int:
        return len(self.target)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return self._target_arr - z

    def to_config(self) -> dict:
        return {"kind": "linear", "target": list(self.target)}


@dataclass(frozen=True)
class Periodic3Field(VectorField):
    """Rotation of (z2, z3) about (2, 3) with z1 frozen.

    On the circle of radius 0.5 through (2.5, 3) the orbit keeps
    1 <= z2 <= z3, so the observed diagram is the constant single-point
    diagram born at z1 while the state traverses a loop of diameter 1.
    """

    center: tuple[float, float] = (2.0, 3.0)
    omega: float = 1.0

    n: int = field(default=3, init=False)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        u = z[1] - self.center[0]
        v = z[2] - self.center[1]
        return np.array([0.0, -self.omega * v, self.omega * u])

    def orbit_start(self) -> np.ndarray:
        return np.array([0.0, self.center[0] + 0.5, self.center[1]])

    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def to_config(self) -> dict:
        return {"kind": "periodic3", "center": list(self.center), "omega": self.omega}


@dataclass(frozen=True)
class PolynomialField(VectorField):
    """Each coordinate's derivative is a sum of monomials c * prod(z_j ** e_j).

    ``coeffs[i]`` is the monomial list for coordinate i; each monomial is a
    mapping with a coefficient ``c`` and an exponent list ``exps`` of length n.
    """

    coeffs: tuple[tuple[tuple[float, tuple[int, ...]], ...], ...]

    def __post_init__(self):
        norm = []
        for terms in self.coeffs:
            row = []
            for c, exps in terms:
                row.append((float(c), tuple(int(e) for e in exps)))
            norm.append(tuple(row))
        object.__setattr__(self, "coeffs", tuple(norm))
        n = len(self.coeffs)
        for i, terms in enumerate(self.coeffs):
            for _, exps in terms:
                if len(exps) != n:
                    raise InvalidInputError(
                        f"coordinate {i}: exponent list must have length {n}")

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n)
        for i, terms in enumerate(self.coeffs):
            total = 0.0
            for c, exps in terms:
                term = c
                for zj, e in zip(z, exps):
                    if e:
                        term *= zj ** e
                total += term
            out[i] = total
        return out

    def to_config(self) -> dict:
        return {
            "kind": "poly",
            "coeffs": [
                [{"c": c, "exps": list(exps)} for c, exps in terms]
                for terms in self.coeffs
            ],
        }


def field_from_config(config: dict) -> VectorField:
    """Build a field from its JSON configuration object."""
    if not isinstance(config, dict) or "kind" not in config:
        raise InvalidInputError("field config must be an object with a 'kind' key")
    kind = config["kind"]
    if kind == "linear":
        if "target" not in config:
            raise InvalidInputError("linear field config needs a 'target' array")
        return LinearField(tuple(config["target"]))
    if kind == "periodic3":
        center = tuple(config.get("center", (2.0, 3.0)))
        omega = float(config.get("omega", 1.0))
        if len(center) != 2:
            raise InvalidInputError("periodic3 'center' must have two entries")
        return Periodic3Field(center=center, omega=omega)
    if kind == "poly":
        if "coeffs" not in config:
            raise InvalidInputError("poly field config needs a 'coeffs' table")
        coeffs = tuple(
            tuple((term["c"], tuple(term["exps"])) for term in terms)
            for terms in config["coeffs"]
        )
        return PolynomialField(coeffs)
    raise InvalidInputError(f"unknown field kind {kind!r}")
