"""Exact bottleneck distance between zeroth persistence diagrams.

Points with infinite death can only be matched to each other; their part of
the cost is a minimax matching on birth values, solved by sorting.  Finite
points are matched by a threshold search: the optimum is one of finitely many
candidate values (pairwise sup-distances and half-persistences), and each
candidate is tested with a bipartite perfect-matching feasibility check in
which diagonal proxies absorb unmatched points.
"""

from __future__ import annotations

from .diagrams import INF, Death, PersistenceDiagram, is_inf

__all__ = ["bottleneck_distance"]


def _sup_dist(p: tuple[float, float], q: tuple[float, float]) -> float:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _half_persistence(p: tuple[float, float]) -> float:
    return abs(p[1] - p[0]) / 2.0


def _feasible(pf, qf, t: float) -> bool:
    """Perfect matching test at threshold t.

    Left side: points of P then one diagonal proxy per point of Q.
    Right side: points of Q then one diagonal proxy per point of P.
    A real point may use any diagonal proxy at its half-persistence cost;
    proxies pair with each other for free.
    """
    m, n = len(pf), len(qf)
    size = m + n
    p_half = [_half_persistence(p) <= t for p in pf]
    q_half = [_half_persistence(q) <= t for q in qf]

    def neighbors(left: int):
        if left < m:
            p = pf[left]
            for j in range(n):
                if _sup_dist(p, qf[j]) <= t:
                    yield j
            if p_half[left]:
                yield from range(n, n + m)
        else:
            j = left - m
            if q_half[j]:
                yield j
            yield from range(n, n + m)

    match_right = [-1] * size

    def augment(left: int, seen: list[bool]) -> bool:
        for right in neighbors(left):
            if seen[right]:
                continue
            seen[right] = True
            if match_right[right] == -1 or augment(match_right[right], seen):
                match_right[right] = left
                return True
        return False

    matched = 0
    for left in range(size):
        if augment(left, [False] * size):
            matched += 1
        else:
            return False
    return matched == size


def _finite_part(pf, qf) -> float:
    if not pf and not qf:
        return 0.0
    candidates = {0.0}
    for p in pf:
        candidates.add(_half_persistence(p))
    for q in qf:
        candidates.add(_half_persistence(q))
    for p in pf:
        for q in qf:
            candidates.add(_sup_dist(p, q))
    levels = sorted(candidates)
    lo, hi = 0, len(levels) - 1
    if _feasible(pf, qf, levels[lo]):
        return levels[lo]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible(pf, qf, levels[mid]):
            hi = mid
        else:
            lo = mid
    return levels[hi]


def bottleneck_distance(p: PersistenceDiagram, q: PersistenceDiagram) -> Death:
    """Bottleneck distance; returns :data:`INF` when the essential-point counts differ."""
    p_inf = sorted(pt.birth for pt in p.infinite_points())
    q_inf = sorted(pt.birth for pt in q.infinite_points())
    if len(p_inf) != len(q_inf):
        return INF
    inf_part = max((abs(a - b) for a, b in zip(p_inf, q_inf)), default=0.0)
    pf = [(pt.birth, pt.death) for pt in p.finite_points()]
    qf = [(pt.birth, pt.death) for pt in q.finite_points()]
    return max(inf_part, _finite_part(pf, qf))
