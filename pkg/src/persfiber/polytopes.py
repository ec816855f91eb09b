"""Cell polytopes of a preimage component and geometric queries on them.

Fix a critical value sequence cv of odd length K.  A cellular string s of
length N describes a product polytope T(s) in R^N, one factor per block of s:

* the k-th bit block pins its coordinates to cv[k];
* a leading X block descends freely from +infinity to cv[1];
* a trailing X block ascends freely from cv[K] to +infinity;
* an interior X block after the k-th bit block is a monotone chain between
  cv[k] and cv[k+1] (ascending when cv[k] is a minimum, else descending).

The component of the preimage labelled by cv is the union of the T(s) over
all strings, so every query here reduces to per-block work plus a sweep over
the maximal strings.  For inclusion and intersection tests the unbounded ray
blocks are truncated at a cap larger than the critical value range, which
leaves every combinatorial answer unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diagrams import CriticalValueSequence, as_vector
from .errors import InfeasibleError, InvalidInputError, InvalidPairError
from .strings import CellularString, string_poset

__all__ = [
    "BlockConstraint",
    "cell_polytope",
    "cell_contains",
    "locate_string",
    "generic_cell_point",
    "sample_component",
    "sup_distance_to_component",
    "default_cap",
    "cell_subset",
    "cells_intersection_empty",
    "cell_intersection_equals",
]

_IMPL_TOL = 1e-9  # slack for difference-constraint implication checks


@dataclass(frozen=True)
class BlockConstraint:
    """Constraint on one block of coordinates of a cell polytope.

    ``kind`` is one of ``fixed``, ``chain``, ``ray_head``, ``ray_tail``.
    ``start``/``length`` locate the block inside the vector.  For ``fixed``
    the coordinates equal ``cv[index]``; for ``chain`` they run monotonically
    from ``cv[index]`` to ``cv[index + 1]`` (``ascending`` gives the sense);
    rays anchor at the first or last critical value.  Indices are 0-based.
    """

    kind: str
    start: int
    length: int
    index: int | None = None
    ascending: bool | None = None

    def value_bounds(self, cv: Sequence[float], cap: float | None = None):
        """(lo, hi) value bounds; ``None`` marks an unbounded side unless capped."""
        if self.kind == "fixed":
            v = cv[self.index]
            return v, v
        if self.kind == "chain":
            a, b = cv[self.index], cv[self.index + 1]
            return min(a, b), max(a, b)
        if self.kind == "ray_head":
            return cv[0], (None if cap is None else cv[0] + cap)
        if self.kind == "ray_tail":
            return cv[-1], (None if cap is None else cv[-1] + cap)
        raise InvalidInputError(f"unknown block kind {self.kind!r}")

    def descending(self) -> bool:
        """True when coordinates run downward left to right."""
        if self.kind == "fixed":
            return False
        if self.kind == "chain":
            return not self.ascending
        return self.kind == "ray_head"


def _coerce_cv(cv) -> CriticalValueSequence:
    if isinstance(cv, CriticalValueSequence):
        return cv
    return CriticalValueSequence(tuple(float(v) for v in cv))


def _coerce_string(s) -> CellularString:
    return s if isinstance(s, CellularString) else CellularString(str(s))


def default_cap(cv, slack: float = 1.0) -> float:
    """Ray truncation length: critical value range plus a slack margin."""
    vals = _coerce_cv(cv).values
    if slack <= 0:
        raise InvalidInputError(f"slack must be positive, got {slack}")
    return (max(vals) - min(vals)) + slack


def cell_polytope(s, cv) -> tuple[BlockConstraint, ...]:
    """Per-block constraints defining T(s) for the given critical values."""
    s = _coerce_string(s)
    cv = _coerce_cv(cv)
    if cv.k != 2 * s.m - 1:
        raise InvalidPairError(
            f"string with {s.m} zero-blocks needs {2 * s.m - 1} critical values, got {cv.k}")
    out = []
    pos = 0
    bit_index = -1  # 0-based index of the last bit block seen
    blocks = s.blocks()
    for j, (sym, length) in enumerate(blocks):
        if sym != "X":
            bit_index += 1
            out.append(BlockConstraint("fixed", pos, length, index=bit_index))
        elif j == 0:
            out.append(BlockConstraint("ray_head", pos, length))
        elif j == len(blocks) - 1:
            out.append(BlockConstraint("ray_tail", pos, length))
        else:
            # cv alternates min, max, ...: after an even (0-based) bit block the
            # chain climbs toward the following maximum, after an odd one it falls
            out.append(BlockConstraint("chain", pos, length, index=bit_index,
                                       ascending=bit_index % 2 == 0))
        pos += length
    return tuple(out)


def cell_contains(z, s, cv, eps: float = 0.0) -> bool:
    """Exact (or eps-slack) membership of a vector in T(s)."""
    cv = _coerce_cv(cv)
    s = _coerce_string(s)
    vals = as_vector(z)
    if len(vals) != s.n:
        return False
    for blk in cell_polytope(s, cv):
        seg = vals[blk.start: blk.start + blk.length]
        lo, hi = blk.value_bounds(cv.values)
        if blk.kind == "fixed":
            if any(abs(v - lo) > eps for v in seg):
                return False
            continue
        run = seg[::-1] if blk.descending() else seg
        if lo is not None and run[0] < lo - eps:
            return False
        if hi is not None and run[-1] > hi + eps:
            return False
        if any(run[i] > run[i + 1] + eps for i in range(len(run) - 1)):
            return False
    return True


def locate_string(z, cv, eps: float = 1e-9) -> CellularString | None:
    """Minimal string whose cell contains ``z``, or None when no cell does.

    Coordinates within ``eps`` of the expected critical value become bits,
    strictly intermediate ones become X.  The parse walks the vector once:
    an optional descent onto cv[0], then for each critical value a nonempty
    bit run followed by a monotone run toward the next value, and finally an
    optional ascent away from cv[-1].
    """
    cv = _coerce_cv(cv)
    vals = as_vector(z)
    k_total = cv.k
    n = len(vals)
    if n < k_total:
        return None
    syms: list[str] = []
    i = 0
    prev = None
    while i < n and vals[i] > cv.values[0] + eps:
        if prev is not None and vals[i] > prev + eps:
            return None
        prev = vals[i]
        syms.append("X")
        i += 1
    for k in range(k_total):
        target = cv.values[k]
        if i >= n or abs(vals[i] - target) > eps:
            return None
        bit = "0" if k % 2 == 0 else "1"
        while i < n and abs(vals[i] - target) <= eps:
            syms.append(bit)
            i += 1
        if k == k_total - 1:
            break
        nxt = cv.values[k + 1]
        ascending = nxt > target
        prev = target
        while i < n and abs(vals[i] - nxt) > eps:
            v = vals[i]
            if ascending:
                if not (target + eps < v < nxt) or v < prev - eps:
                    return None
            else:
                if not (nxt < v < target - eps) or v > prev + eps:
                    return None
            prev = v
            syms.append("X")
            i += 1
    prev = cv.values[-1]
    while i < n:
        v = vals[i]
        if v < prev - eps:
            return None
        prev = v
        syms.append("X")
        i += 1
    return CellularString("".join(syms))


def _block_values_generic(blk: BlockConstraint, cv: CriticalValueSequence, cap: float):
    lo, hi = blk.value_bounds(cv.values, cap)
    if blk.kind == "fixed":
        return [lo] * blk.length
    vals = [lo + (hi - lo) * (t + 1) / (blk.length + 1) for t in range(blk.length)]
    return vals[::-1] if blk.descending() else vals


def generic_cell_point(s, cv, cap: float | None = None) -> tuple[float, ...]:
    """A deterministic point in the relative interior of T(s)."""
    cv = _coerce_cv(cv)
    if cap is None:
        cap = default_cap(cv)
    out: list[float] = []
    for blk in cell_polytope(s, cv):
        out.extend(_block_values_generic(blk, cv, cap))
    return tuple(out)


def sample_component(cv, n: int, count: int, cap: float | None = None,
                     seed: int = 0) -> list[tuple[float, ...]]:
    """Random points of the component labelled by ``cv`` inside R^n.

    Each draw picks a maximal string uniformly, then fills chain blocks with
    sorted uniforms between their bounds and ray blocks with sorted uniforms
    within ``cap`` of the anchor value.  Deterministic for a fixed seed.
    """
    cv = _coerce_cv(cv)
    if n < cv.k:
        raise InfeasibleError(f"need n >= {cv.k} coordinates to realize {cv.k} critical values")
    if count < 0:
        raise InvalidInputError("count must be nonnegative")
    if cap is None:
        cap = default_cap(cv)
    if cap <= 0:
        raise InvalidInputError(f"cap must be positive, got {cap}")
    maximal = string_poset(n, cv.m).maximal()
    polys = {s.word: cell_polytope(s, cv) for s in maximal}
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        s = maximal[int(rng.integers(len(maximal)))]
        coords: list[float] = []
        for blk in polys[s.word]:
            lo, hi = blk.value_bounds(cv.values, cap)
            if blk.kind == "fixed":
                coords.extend([lo] * blk.length)
                continue
            draws = np.sort(rng.uniform(lo, hi, size=blk.length))
            if blk.descending():
                draws = draws[::-1]
            coords.extend(float(v) for v in draws)
        out.append(tuple(coords))
    return out


def _chain_chebyshev(seg: Sequence[float], lo: float | None, hi: float | None) -> float:
    """Sup-norm distance from ``seg`` to the nondecreasing sequences within [lo, hi].

    The unconstrained part is half the largest drop max_{i<=j}(y_i - y_j);
    the bounds contribute max(y - hi) and max(lo - y).
    """
    best = 0.0
    run_max = seg[0]
    for v in seg:
        if v > run_max:
            run_max = v
        drop = (run_max - v) / 2.0
        if drop > best:
            best = drop
    if hi is not None:
        over = max(seg) - hi
        if over > best:
            best = over
    if lo is not None:
        under = lo - min(seg)
        if under > best:
            best = under
    return best


def _cell_distance(vals: Sequence[float], blocks, cv: CriticalValueSequence) -> float:
    dist = 0.0
    for blk in blocks:
        seg = vals[blk.start: blk.start + blk.length]
        lo, hi = blk.value_bounds(cv.values)
        if blk.kind == "fixed":
            d = max(abs(v - lo) for v in seg)
        else:
            run = seg[::-1] if blk.descending() else seg
            d = _chain_chebyshev(run, lo, hi)
        if d > dist:
            dist = d
    return dist


def sup_distance_to_component(z, cv) -> float:
    """Sup-norm distance from ``z`` to the component labelled by ``cv``.

    Minimum over maximal strings of the distance to T(s); each cell distance
    is the max over blocks of an exact per-block Chebyshev distance.
    """
    cv = _coerce_cv(cv)
    vals = as_vector(z)
    if len(vals) < cv.k:
        raise InfeasibleError(f"vector of length {len(vals)} cannot meet {cv.k} critical values")
    best = None
    for s in string_poset(len(vals), cv.m).maximal():
        d = _cell_distance(vals, cell_polytope(s, cv), cv)
        if best is None or d < best:
            best = d
            if best == 0.0:
                break
    return best


# ---------------------------------------------------------------------------
# Difference-constraint systems for exact inclusion / intersection tests.
# Every cell inequality has the form x_u - x_v <= w (with a ground node for
# constants), so implication and emptiness are decidable by shortest paths.
# ---------------------------------------------------------------------------


def _cell_system(s, cv, cap: float) -> list[tuple[int, int, float]]:
    """Constraints of the truncated T(s) as (u, v, w): x_u - x_v <= w; node n = 0."""
    cv = _coerce_cv(cv)
    s = _coerce_string(s)
    ground = s.n
    cons: list[tuple[int, int, float]] = []
    for blk in cell_polytope(s, cv):
        lo, hi = blk.value_bounds(cv.values, cap)
        idx = list(range(blk.start, blk.start + blk.length))
        if blk.kind == "fixed":
            for i in idx:
                cons.append((i, ground, lo))
                cons.append((ground, i, -lo))
            continue
        order = idx[::-1] if blk.descending() else idx
        for a, b in zip(order, order[1:]):
            cons.append((a, b, 0.0))  # x_a <= x_b along the run
        cons.append((ground, order[0], -lo))  # x_first >= lo
        if hi is not None:
            cons.append((order[-1], ground, hi))  # x_last <= hi
    return cons


def _closure(n_nodes: int, cons) -> list[list[float]]:
    inf = float("inf")
    dist = [[inf] * n_nodes for _ in range(n_nodes)]
    for v in range(n_nodes):
        dist[v][v] = 0.0
    for u, v, w in cons:
        # edge v -> u with weight w encodes x_u - x_v <= w
        if w < dist[v][u]:
            dist[v][u] = w
    for k in range(n_nodes):
        dk = dist[k]
        for i in range(n_nodes):
            dik = dist[i][k]
            if dik == inf:
                continue
            di = dist[i]
            for j in range(n_nodes):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return dist


def _is_feasible(dist) -> bool:
    return all(dist[v][v] >= -_IMPL_TOL for v in range(len(dist)))


def _implies(dist, cons) -> bool:
    return all(dist[v][u] <= w + _IMPL_TOL for u, v, w in cons)


def cell_subset(s_inner, s_outer, cv, cap: float | None = None) -> bool:
    """True iff the truncated T(s_inner) is contained in the truncated T(s_outer)."""
    cv = _coerce_cv(cv)
    if cap is None:
        cap = default_cap(cv)
    inner = _coerce_string(s_inner)
    outer = _coerce_string(s_outer)
    if inner.n != outer.n:
        raise InvalidPairError("cells live in different dimensions")
    dist = _closure(inner.n + 1, _cell_system(inner, cv, cap))
    return _implies(dist, _cell_system(outer, cv, cap))


def cells_intersection_empty(s1, s2, cv, cap: float | None = None) -> bool:
    """True iff the truncated cells of s1 and s2 do not meet."""
    cv = _coerce_cv(cv)
    if cap is None:
        cap = default_cap(cv)
    a = _coerce_string(s1)
    b = _coerce_string(s2)
    cons = _cell_system(a, cv, cap) + _cell_system(b, cv, cap)
    return not _is_feasible(_closure(a.n + 1, cons))


def cell_intersection_equals(s1, s2, target, cv, cap: float | None = None) -> bool:
    """True iff trunc T(s1) meet trunc T(s2) equals trunc T(target)."""
    cv = _coerce_cv(cv)
    if cap is None:
        cap = default_cap(cv)
    a = _coerce_string(s1)
    b = _coerce_string(s2)
    t = _coerce_string(target)
    joint = _cell_system(a, cv, cap) + _cell_system(b, cv, cap)
    dist = _closure(a.n + 1, joint)
    if not _is_feasible(dist):
        return False
    if not _implies(dist, _cell_system(t, cv, cap)):
        return False
    tdist = _closure(t.n + 1, _cell_system(t, cv, cap))
    return _implies(tdist, joint)
