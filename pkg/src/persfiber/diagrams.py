"""Zeroth persistence of real vectors filtered on a path complex.

A vector ``z`` in R^N induces a sublevel filtration of the path complex on N
vertices: vertex ``j`` enters at value ``z[j]``, the edge ``{j, j+1}`` at
``max(z[j], z[j+1])``.  Connected components are born at local minima and die
at interior local maxima under the elder rule (the component with the smaller
birth survives a merge).  The global minimum never dies; its death is the
tagged value :data:`INF`.

The module also extracts the ordered sequence of critical values of a vector
(local extrema with boundary maxima removed), which labels the connected
component of the preimage of the persistence map that the vector lies in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import InvalidDiagramError, InvalidInputError, TieError

__all__ = [
    "INF",
    "InfiniteDeath",
    "PersistencePoint",
    "PersistenceDiagram",
    "CriticalValueSequence",
    "ExtremaPairingReport",
    "sublevel_diagram",
    "superlevel_diagram",
    "negate_diagram",
    "critical_value_sequence",
    "collapsed_critical_values",
    "extrema_pairing_check",
    "is_typical",
    "as_vector",
]


class InfiniteDeath:
    """Tagged death value for the component that never dies.

    A first-class singleton rather than ``float('inf')`` so that diagrams
    serialize bit-exactly and arithmetic never mixes it with real deaths.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (InfiniteDeath, ())


INF = InfiniteDeath()

Death = Union[float, InfiniteDeath]


def is_inf(value) -> bool:
    return isinstance(value, InfiniteDeath)


def _death_key(death: Death) -> tuple:
    return (1, 0.0) if is_inf(death) else (0, death)


def as_vector(values) -> tuple[float, ...]:
    """Validate and normalize a coordinate sequence to a tuple of floats."""
    try:
        vals = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"vector entries must be real numbers: {exc}") from None
    if not vals:
        raise InvalidInputError("vector must have at least one coordinate")
    for i, v in enumerate(vals):
        if not math.isfinite(v):
            raise InvalidInputError(f"vector entry {i} is not finite: {v!r}")
    return vals


def is_typical(values) -> bool:
    """True when all coordinates are pairwise distinct."""
    vals = as_vector(values)
    return len(set(vals)) == len(vals)


def _require_typical(vals: tuple[float, ...]) -> None:
    seen: dict[float, int] = {}
    for j, v in enumerate(vals):
        if v in seen:
            raise TieError(seen[v], j)
        seen[v] = j


@dataclass(frozen=True, slots=True)
class PersistencePoint:
    """A single birth/death pair; ``death`` is a float or :data:`INF`."""

    birth: float
    death: Death

    def __post_init__(self):
        if not (isinstance(self.birth, float) and math.isfinite(self.birth)):
            object.__setattr__(self, "birth", float(self.birth))
            if not math.isfinite(self.birth):
                raise InvalidInputError(f"birth must be finite, got {self.birth!r}")
        if not is_inf(self.death):
            object.__setattr__(self, "death", float(self.death))
            if not math.isfinite(self.death):
                raise InvalidInputError(f"death must be finite or INF, got {self.death!r}")

    @property
    def persistence(self) -> float:
        return math.inf if is_inf(self.death) else self.death - self.birth

    def sort_key(self) -> tuple:
        return (self.birth,) + _death_key(self.death)


class PersistenceDiagram:
    """A multiset of persistence points in canonical order.

    Canonical order is lexicographic in (birth, death) with an infinite death
    sorting after every finite one.  Equality is exact multiset equality.
    """

    __slots__ = ("_points",)

    def __init__(self, points: Iterable = ()):
        pts = []
        for p in points:
            if isinstance(p, PersistencePoint):
                pts.append(p)
            else:
                b, d = p
                pts.append(PersistencePoint(float(b), d if is_inf(d) else float(d)))
        pts.sort(key=PersistencePoint.sort_key)
        self._points = tuple(pts)

    @property
    def points(self) -> tuple[PersistencePoint, ...]:
        return self._points

    def __len__(self):
        return len(self._points)

    def __iter__(self):
        return iter(self._points)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self._points == other._points

    def __hash__(self):
        return hash(self._points)

    def __repr__(self):
        inner = ", ".join(f"({p.birth:g}, {p.death!r})" if is_inf(p.death)
                          else f"({p.birth:g}, {p.death:g})" for p in self._points)
        return f"PersistenceDiagram([{inner}])"

    def finite_points(self) -> tuple[PersistencePoint, ...]:
        return tuple(p for p in self._points if not is_inf(p.death))

    def infinite_points(self) -> tuple[PersistencePoint, ...]:
        return tuple(p for p in self._points if is_inf(p.death))

    def births(self) -> tuple[float, ...]:
        return tuple(sorted(p.birth for p in self._points))

    def finite_deaths(self) -> tuple[float, ...]:
        return tuple(sorted(p.death for p in self.finite_points()))

    def to_dict(self) -> dict:
        return {
            "points": [
                {"b": p.birth, "d": "inf" if is_inf(p.death) else p.death}
                for p in self._points
            ]
        }

    @classmethod
    def from_dict(cls, obj, require_sublevel: bool = True) -> "PersistenceDiagram":
        if not isinstance(obj, dict) or "points" not in obj:
            raise InvalidDiagramError("diagram JSON must be an object with a 'points' array")
        raw = obj["points"]
        if not isinstance(raw, list):
            raise InvalidDiagramError("'points' must be an array")
        pts = []
        for k, entry in enumerate(raw):
            if not isinstance(entry, dict) or "b" not in entry or "d" not in entry:
                raise InvalidDiagramError(f"point {k}: expected an object with keys 'b' and 'd'")
            b = entry["b"]
            d = entry["d"]
            if not isinstance(b, (int, float)) or isinstance(b, bool):
                raise InvalidDiagramError(f"point {k}: birth must be a number")
            if d == "inf":
                death: Death = INF
            elif isinstance(d, (int, float)) and not isinstance(d, bool):
                death = float(d)
            else:
                raise InvalidDiagramError(f"point {k}: death must be a number or \"inf\"")
            if not is_inf(death):
                if death == b:
                    raise InvalidDiagramError(f"point {k}: death equals birth (empty feature)")
                if require_sublevel and death < b:
                    raise InvalidDiagramError(
                        f"point {k}: death {d} is below birth {b} (negative persistence)")
            pts.append(PersistencePoint(float(b), death))
        return cls(pts)


@dataclass(frozen=True)
class CriticalValueSequence:
    """Ordered local extrema of a vector, boundary maxima removed.

    For the sublevel parity ``"010"`` the values alternate
    min < max > min < ... > min and the length is odd; ``"101"`` is the
    mirrored pattern used for superlevel filtrations.
    """

    values: tuple[float, ...]
    parity: str = "010"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.parity not in ("010", "101"):
            raise InvalidInputError(f"parity must be '010' or '101', got {self.parity!r}")
        if len(vals) % 2 != 1:
            raise InvalidInputError(f"critical value sequence must have odd length, got {len(vals)}")
        up_first = self.parity == "010"
        for i in range(len(vals) - 1):
            ascending = (i % 2 == 0) == up_first
            if ascending and not vals[i] < vals[i + 1]:
                raise InvalidInputError(
                    f"values must strictly alternate ({self.parity}); "
                    f"positions {i},{i + 1} violate it: {vals[i]} !< {vals[i + 1]}")
            if not ascending and not vals[i] > vals[i + 1]:
                raise InvalidInputError(
                    f"values must strictly alternate ({self.parity}); "
                    f"positions {i},{i + 1} violate it: {vals[i]} !> {vals[i + 1]}")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return (len(self.values) + 1) // 2

    def minima(self) -> tuple[float, ...]:
        return self.values[0::2] if self.parity == "010" else self.values[1::2]

    def interior_maxima(self) -> tuple[float, ...]:
        return self.values[1::2] if self.parity == "010" else self.values[0::2]

    def diagram(self) -> PersistenceDiagram:
        """Diagram of the component this sequence labels (the sequence is itself a vector)."""
        if self.parity != "010":
            raise InvalidInputError("diagram() is defined for sublevel ('010') sequences")
        return sublevel_diagram(self.values)


def _collapse_plateaus(vals: tuple[float, ...]) -> tuple[float, ...]:
    # consecutive equal values act as a single extremum of that value
    out = [vals[0]]
    for v in vals[1:]:
        if v != out[-1]:
            out.append(v)
    return tuple(out)


def _extrema(vals: Sequence[float]) -> list[tuple[float, int]]:
    """Alternating extrema (value, index) of a plateau-free vector.

    Boundary maxima are dropped, so the result starts and ends with a minimum
    and has odd length.
    """
    n = len(vals)
    if n == 1:
        return [(vals[0], 0)]
    ext: list[tuple[float, int]] = []
    if vals[0] < vals[1]:
        ext.append((vals[0], 0))
    for i in range(1, n - 1):
        if vals[i - 1] > vals[i] < vals[i + 1]:
            ext.append((vals[i], i))
        elif vals[i - 1] < vals[i] > vals[i + 1]:
            ext.append((vals[i], i))
    if vals[-1] < vals[-2]:
        ext.append((vals[-1], n - 1))
    return ext


def _elder_pairs(ext: list[tuple[float, int]]):
    """Elder-rule pairing of an alternating extrema sequence.

    Minima occupy the even slots.  Interior maxima are processed in increasing
    (value, index) order; each merges its two flanking components and the one
    with the larger (birth, index) dies at the maximum's value.
    """
    mins = ext[0::2]
    maxs = ext[1::2]
    n_min = len(mins)
    parent = list(range(n_min))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    birth = list(mins)
    finite = []
    for j in sorted(range(len(maxs)), key=lambda t: (maxs[t][0], maxs[t][1])):
        a = find(j)
        b = find(j + 1)
        keep, kill = (a, b) if birth[a] <= birth[b] else (b, a)
        finite.append((birth[kill][0], maxs[j][0]))
        parent[kill] = keep
    survivor = find(0)
    return finite, birth[survivor][0]


def raw_sublevel_pairs(vals) -> list[tuple[float, float | None]]:
    """Unvalidated fast path: (birth, death) pairs with None as infinite death.

    Input must be a nonempty sequence of finite floats.  Used by trajectory
    monitoring, where a full diagram object per step would dominate the cost.
    """
    collapsed = _collapse_plateaus(tuple(vals))
    ext = _extrema(collapsed)
    finite, essential_birth = _elder_pairs(ext)
    pairs: list[tuple[float, float | None]] = [(b, d) for b, d in finite]
    pairs.append((essential_birth, None))
    return pairs


def sublevel_diagram(z) -> PersistenceDiagram:
    """Zeroth persistence diagram of the sublevel filtration at ``z``.

    Each local minimum births a component; at each interior local maximum the
    component with the larger birth dies; the global minimum's point has an
    infinite death.  Consecutive equal coordinates are treated as a single
    extremum, and zero-persistence pairs are never emitted.
    """
    pairs = raw_sublevel_pairs(as_vector(z))
    return PersistenceDiagram((b, INF if d is None else d) for b, d in pairs)


def negate_diagram(diagram: PersistenceDiagram) -> PersistenceDiagram:
    """Map every point (b, d) to (-b, -d), preserving infinite deaths."""
    return PersistenceDiagram(
        (-p.birth, INF if is_inf(p.death) else -p.death) for p in diagram
    )


def superlevel_diagram(z) -> PersistenceDiagram:
    """Zeroth persistence of the superlevel filtration, via negation.

    Equals ``negate_diagram(sublevel_diagram(-z))``: births are local maxima,
    deaths are interior local minima, so finite points have death < birth.
    """
    vals = as_vector(z)
    return negate_diagram(sublevel_diagram(tuple(-v for v in vals)))


def critical_value_sequence(z) -> CriticalValueSequence:
    """Ordered local extrema of a typical vector, boundary maxima removed.

    Raises :class:`TieError` with the first offending index pair when two
    coordinates coincide.
    """
    vals = as_vector(z)
    _require_typical(vals)
    ext = _extrema(vals)
    return CriticalValueSequence(tuple(v for v, _ in ext))


def collapsed_critical_values(z) -> CriticalValueSequence:
    """Critical values of an arbitrary vector, collapsing plateaus first.

    Extends :func:`critical_value_sequence` to non-typical vectors: runs of
    equal coordinates count as one extremum.  Non-adjacent repeats are kept.
    """
    vals = _collapse_plateaus(as_vector(z))
    ext = _extrema(vals)
    return CriticalValueSequence(tuple(v for v, _ in ext))


@dataclass(frozen=True)
class ExtremaPairingReport:
    """Pass/fail record tying a vector's extrema to its diagram."""

    m: int
    k: int
    count_ok: bool      # K == 2M - 1
    births_ok: bool     # multiset of local minima == multiset of births
    deaths_ok: bool     # multiset of interior maxima == multiset of finite deaths

    @property
    def passed(self) -> bool:
        return self.count_ok and self.births_ok and self.deaths_ok


def extrema_pairing_check(z) -> ExtremaPairingReport:
    """Check the extrema/diagram consistency identities for a typical vector."""
    vals = as_vector(z)
    _require_typical(vals)
    cv = critical_value_sequence(vals)
    dgm = sublevel_diagram(vals)
    m = len(dgm)
    k = cv.k
    count_ok = k == 2 * m - 1
    births_ok = tuple(sorted(cv.minima())) == dgm.births()
    deaths_ok = tuple(sorted(cv.interior_maxima())) == dgm.finite_deaths()
    return ExtremaPairingReport(m=m, k=k, count_ok=count_ok,
                                births_ok=births_ok, deaths_ok=deaths_ok)
