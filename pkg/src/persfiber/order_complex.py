"""Order complexes of string posets and their homology over GF(2).

The order complex has one k-simplex per strict chain of k+1 poset elements.
Betti numbers are computed from boundary-matrix ranks over the two-element
field; ranks use column reduction with integer bitmasks (XOR row sets), which
is exact and fast at the sizes that arise here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .strings import StringPoset, string_leq

__all__ = ["SimplicialComplex", "BettiReport", "order_complex", "gf2_rank", "gf2_betti"]


@dataclass(frozen=True)
class SimplicialComplex:
    """Simplices grouped by dimension; every face of every simplex is present.

    ``simplices[k]`` is a sorted tuple of k-simplices, each a sorted tuple of
    vertex indices into ``vertex_labels``.
    """

    vertex_labels: tuple[str, ...]
    simplices: tuple[tuple[tuple[int, ...], ...], ...]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.simplices)

    @property
    def euler(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts()))

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def validate(self) -> None:
        """Check closure under faces and absence of duplicates."""
        for k, level in enumerate(self.simplices):
            if len(set(level)) != len(level):
                raise InvalidInputError(f"duplicate {k}-simplices present")
            if k == 0:
                continue
            below = set(self.simplices[k - 1])
            for simplex in level:
                for drop in range(len(simplex)):
                    face = simplex[:drop] + simplex[drop + 1:]
                    if face not in below:
                        raise InvalidInputError(f"face {face} of {simplex} is missing")


def order_complex(poset: StringPoset, restrict_to=None) -> SimplicialComplex:
    """Complex of strict chains of ``poset`` (or of a down-set of it).

    Args:
        poset: the string poset to realize.
        restrict_to: optional element; when given, only strings below it
            (inclusive) become vertices.

    Returns:
        A :class:`SimplicialComplex` whose vertex order matches the poset's
        lexicographic element order.
    """
    if restrict_to is not None:
        elements = [e for e in poset.elements if string_leq(e, restrict_to)]
    else:
        elements = list(poset.elements)
    n = len(elements)
    labels = tuple(e.word for e in elements)
    # successor lists under the strict order, by local vertex index
    succ: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and string_leq(elements[i], elements[j]):
                succ[i].append(j)
    by_dim: list[list[tuple[int, ...]]] = [[(i,) for i in range(n)]]
    frontier = by_dim[0]
    while frontier:
        nxt = []
        for chain in frontier:
            for j in succ[chain[-1]]:
                nxt.append(chain + (j,))
        if not nxt:
            break
        by_dim.append(nxt)
        frontier = nxt
    return SimplicialComplex(
        vertex_labels=labels,
        simplices=tuple(tuple(sorted(level)) for level in by_dim),
    )


def gf2_rank(columns: list[int]) -> int:
    """Rank over GF(2) of a matrix given as integer column bitmasks."""
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                rank += 1
                break
            col ^= other
    return rank


@dataclass(frozen=True)
class BettiReport:
    """GF(2) Betti numbers of a complex together with its Euler characteristic.

    When ``reduced`` is true, ``betti`` holds reduced numbers (degree zero is
    one less than the component count) and contractibility evidence is
    ``all(b == 0 for b in betti)``.
    """

    betti: tuple[int, ...]
    euler: int
    reduced: bool
    simplex_counts: tuple[int, ...]

    @property
    def trivial(self) -> bool:
        return all(b == 0 for b in self.betti)

    def to_dict(self) -> dict:
        return {
            "betti": list(self.betti),
            "euler": self.euler,
            "reduced": self.reduced,
            "simplex_counts": list(self.simplex_counts),
        }


def gf2_betti(complex: SimplicialComplex, reduced: bool = True) -> BettiReport:
    """Betti numbers over GF(2) via boundary ranks.

    Args:
        complex: a face-closed simplicial complex.
        reduced: report reduced Betti numbers (subtract one in degree zero).

    Returns:
        :class:`BettiReport`; the alternating sums of simplex counts and of
        unreduced Betti numbers are asserted to agree.
    """
    counts = complex.counts()
    top = len(counts) - 1
    ranks = [0] * (top + 2)  # ranks[k] = rank of the boundary map from degree k
    for k in range(1, top + 1):
        index = {simplex: i for i, simplex in enumerate(complex.simplices[k - 1])}
        cols = []
        for simplex in complex.simplices[k]:
            mask = 0
            for drop in range(len(simplex)):
                face = simplex[:drop] + simplex[drop + 1:]
                mask ^= 1 << index[face]
            cols.append(mask)
        ranks[k] = gf2_rank(cols)
    betti = [counts[k] - ranks[k] - ranks[k + 1] for k in range(top + 1)]
    euler = complex.euler
    assert euler == sum((-1) ** k * b for k, b in enumerate(betti))
    if reduced and betti:
        betti[0] -= 1
    return BettiReport(betti=tuple(betti), euler=euler, reduced=reduced,
                       simplex_counts=counts)
