"""Cellular strings over {0, 1, X} and the poset they form.

A cellular string of length N with M zero-blocks indexes a cell in one
component of a persistence-map preimage: bits pin coordinates to critical
values, X marks coordinates that move freely between them.  Strings are
ordered by bit-to-X replacement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import InfeasibleError, InvalidInputError, InvalidPairError, StringValidationError, StructuralError

__all__ = [
    "CellularString",
    "StringPoset",
    "canonical_blocks",
    "string_leq",
    "greatest_lower_bound",
    "enumerate_strings",
    "string_poset",
]

_BITS = ("0", "1")


def _blocks_of(word: str) -> tuple[tuple[str, int], ...]:
    return tuple((sym, len(list(run))) for sym, run in itertools.groupby(word))


def _validate_word(word: str) -> tuple[tuple[str, int], ...]:
    if not word:
        raise StringValidationError(word, "symbols", "word must be nonempty")
    for ch in word:
        if ch not in "01X":
            raise StringValidationError(word, "symbols", f"symbol {ch!r} is not one of 0, 1, X")
    blocks = _blocks_of(word)
    if blocks[0][0] == "1" or blocks[-1][0] == "1":
        raise StringValidationError(word, "boundary-blocks",
                                    "first and last blocks must consist of 0 or X")
    for j in range(1, len(blocks) - 1):
        if blocks[j][0] == "X" and blocks[j - 1][0] == blocks[j + 1][0]:
            raise StringValidationError(word, "interior-x",
                                        "an interior X block must separate different bits")
    bit_syms = [sym for sym, _ in blocks if sym != "X"]
    expected = ["0" if i % 2 == 0 else "1" for i in range(len(bit_syms))]
    if not bit_syms or len(bit_syms) % 2 == 0 or bit_syms != expected:
        raise StringValidationError(word, "bit-alternation",
                                    "bit blocks must read 0, 1, 0, ..., 0")
    return blocks


@dataclass(frozen=True, slots=True)
class CellularString:
    """A validated word over {0, 1, X}."""

    word: str

    def __post_init__(self):
        _validate_word(self.word)

    def __str__(self):
        return self.word

    def __len__(self):
        return len(self.word)

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def m(self) -> int:
        """Number of zero-blocks."""
        return sum(1 for sym, _ in self.blocks() if sym == "0")

    @property
    def dimension(self) -> int:
        """Number of X symbols (the dimension of the indexed cell)."""
        return self.word.count("X")

    def blocks(self) -> tuple[tuple[str, int], ...]:
        return _blocks_of(self.word)

    def __le__(self, other: "CellularString") -> bool:
        return string_leq(self, other)


def _coerce(s) -> CellularString:
    return s if isinstance(s, CellularString) else CellularString(str(s))


def canonical_blocks(s) -> tuple[tuple[str, int], ...]:
    """Maximal runs of equal symbols as (symbol, length) pairs, left to right."""
    return _coerce(s).blocks()


def string_leq(a, b) -> bool:
    """True iff ``b`` is obtained from ``a`` by replacing bits with X."""
    a = _coerce(a)
    b = _coerce(b)
    if a.n != b.n:
        raise InvalidPairError(f"strings have different lengths: {a.n} vs {b.n}")
    if a.m != b.m:
        raise InvalidPairError(f"strings have different zero-block counts: {a.m} vs {b.m}")
    return all(cb == "X" or ca == cb for ca, cb in zip(a.word, b.word))


def _merge_word(a: CellularString, b: CellularString) -> str | None:
    """Positionwise bit union; None on a bit conflict."""
    out = []
    for ca, cb in zip(a.word, b.word):
        if ca == "X":
            out.append(cb)
        elif cb == "X" or cb == ca:
            out.append(ca)
        else:
            return None
    return "".join(out)


def greatest_lower_bound(a, b) -> CellularString | None:
    """Greatest lower bound in the string poset, or None when no lower bound exists.

    The bit-merge of the two words is the glb whenever it is itself valid;
    otherwise the finite poset is searched for the unique maximal lower bound.
    """
    a = _coerce(a)
    b = _coerce(b)
    if a.n != b.n or a.m != b.m:
        raise InvalidPairError("glb requires strings of the same length and zero-block count")
    merged = _merge_word(a, b)
    if merged is None:
        return None
    try:
        candidate = CellularString(merged)
        if candidate.m == a.m:
            return candidate
    except StringValidationError:
        pass
    poset = string_poset(a.n, a.m)
    lower = [e for e in poset.elements if string_leq(e, a) and string_leq(e, b)]
    if not lower:
        return None
    maximal = [e for e in lower if not any(e is not f and string_leq(e, f) for f in lower)]
    if len(maximal) != 1:
        raise StructuralError(
            f"lower bounds of {a.word} and {b.word} have {len(maximal)} maximal elements")
    return maximal[0]


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _generate_words(n: int, m: int) -> list[str]:
    k = 2 * m - 1
    spare = n - k
    words = []
    # lengths: k bit blocks (>=1 each) interleaved with k+1 optional X runs
    for lengths in _compositions(spare, 2 * k + 1):
        x_runs = lengths[: k + 1]
        bit_extra = lengths[k + 1:]
        parts = []
        for i in range(k):
            parts.append("X" * x_runs[i])
            parts.append(("0" if i % 2 == 0 else "1") * (1 + bit_extra[i]))
        parts.append("X" * x_runs[k])
        words.append("".join(parts))
    words.sort()
    return words


@dataclass(frozen=True)
class StringPoset:
    """All cellular strings for fixed (N, M), with order and covering data."""

    n: int
    m: int
    elements: tuple[CellularString, ...]
    covers: tuple[tuple[int, int], ...]  # (lower index, upper index), dim gap exactly 1

    def index(self, s) -> int:
        return self._index_map()[_coerce(s).word]

    def _index_map(self) -> dict:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {e.word: i for i, e in enumerate(self.elements)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def leq(self, a, b) -> bool:
        return string_leq(_coerce(a), _coerce(b))

    def maximal(self) -> tuple[CellularString, ...]:
        top = self.n - (2 * self.m - 1)
        return tuple(e for e in self.elements if e.dimension == top)

    def zero_dimensional(self) -> tuple[CellularString, ...]:
        return tuple(e for e in self.elements if e.dimension == 0)

    def down_set(self, s) -> tuple[CellularString, ...]:
        s = _coerce(s)
        return tuple(e for e in self.elements if string_leq(e, s))

    def up_set(self, s) -> tuple[CellularString, ...]:
        s = _coerce(s)
        return tuple(e for e in self.elements if string_leq(s, e))

    def __len__(self):
        return len(self.elements)


@lru_cache(maxsize=None)
def _build_poset(n: int, m: int) -> StringPoset:
    words = _generate_words(n, m)
    elements = tuple(CellularString(w) for w in words)
    index = {w: i for i, w in enumerate(words)}
    covers = []
    for i, e in enumerate(elements):
        for pos, ch in enumerate(e.word):
            if ch == "X":
                continue
            upper = e.word[:pos] + "X" + e.word[pos + 1:]
            j = index.get(upper)
            if j is not None:
                covers.append((i, j))
    covers.sort()
    return StringPoset(n=n, m=m, elements=elements, covers=tuple(covers))


def string_poset(n: int, m: int) -> StringPoset:
    """Cached poset accessor; see :func:`enumerate_strings`."""
    if not (isinstance(n, int) and isinstance(m, int)):
        raise InvalidInputError("n and m must be integers")
    if m < 1:
        raise InvalidInputError(f"m must be at least 1, got {m}")
    if n < 2 * m - 1:
        raise InfeasibleError(f"no strings of length {n} with {m} zero-blocks (need n >= {2 * m - 1})")
    return _build_poset(n, m)


def enumerate_strings(n: int, m: int) -> StringPoset:
    """All cellular strings of length ``n`` with ``m`` zero-blocks, in lexicographic order."""
    return string_poset(n, m)
