"""Deformation machinery that contracts a string poset onto a point.

``retraction_step`` rewrites a string one step toward the sub-poset of
strings that start with X; iterating it sweeps the whole poset into that
sub-poset, and the recursion over prefix levels contracts everything to the
single fully-shifted string.  ``homotopy_witness`` exhibits, for every
string, a common bound connecting it to its image in at most two order
relations, which is the combinatorial core of the homotopy argument.
``contractibility_report`` bundles the homology computation with exhaustive
audits of these facts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, StructuralError
from .order_complex import BettiReport, gf2_betti, order_complex
from .strings import CellularString, StringPoset, greatest_lower_bound, string_leq, string_poset

__all__ = [
    "retraction_step",
    "retraction_depth",
    "homotopy_witness",
    "verify_downset_product",
    "contractibility_report",
    "ContractibilityReport",
    "poset_dot",
]


def _coerce(s) -> CellularString:
    return s if isinstance(s, CellularString) else CellularString(str(s))


def _step_word(word: str) -> str:
    """One rewrite step toward an X-initial word.

    Rules, in order of precedence:
    * if the prefix before the first X is an alternating bitstring, transpose
      that X with the bit before it (identity when X is initial or absent);
    * else if the word begins with a repeated 0, turn the first 0 into X;
    * else locate the first repeated bit pair ``a b b`` and rewrite to ``a a b``.
    """
    first_x = word.find("X")
    prefix_end = len(word) if first_x == -1 else first_x
    repeat = -1
    for i in range(prefix_end - 1):
        if word[i] == word[i + 1]:
            repeat = i
            break
    if repeat == -1:
        if first_x <= 0:
            return word
        return word[: first_x - 1] + "X" + word[first_x - 1] + word[first_x + 1:]
    if repeat == 0:
        return "X" + word[1:]
    return word[:repeat] + word[repeat - 1] + word[repeat + 1:]


def retraction_step(s, level: int = 1) -> CellularString:
    """Apply the rewrite step after a frozen X prefix of ``level - 1`` symbols.

    Raises :class:`DomainError` when the string does not carry the required
    prefix.
    """
    s = _coerce(s)
    if level < 1:
        raise DomainError(f"level must be at least 1, got {level}")
    keep = level - 1
    if keep > s.n or any(ch != "X" for ch in s.word[:keep]):
        raise DomainError(
            f"retraction at level {level} needs {keep} leading X symbols, got {s.word!r}")
    return CellularString(s.word[:keep] + _step_word(s.word[keep:]))


def retraction_depth(s) -> int:
    """Number of rewrite steps until the word starts with X.

    Zero for X-initial strings.  A poset with no X-initial strings at all is
    a single point; its sole element is already terminal and gets depth 0.
    """
    s = _coerce(s)
    word = s.word
    depth = 0
    while word[0] != "X":
        nxt = _step_word(word)
        if nxt == word:
            break
        word = nxt
        depth += 1
    return depth


@dataclass(frozen=True)
class HomotopyWitness:
    witness: CellularString
    shape: str  # "comparable" | "glb" | "lub"


def homotopy_witness(s) -> HomotopyWitness:
    """A string one order relation away from both ``s`` and its rewrite image.

    Prefers the greatest lower bound; when the two strings are comparable the
    smaller one serves directly, and when no lower bound exists the minimal
    common upper bound (bitwise agreement word) is used instead.  Existence
    is a structural guarantee: failure raises :class:`StructuralError`.
    """
    s = _coerce(s)
    image = retraction_step(s)
    if s == image or string_leq(s, image):
        return HomotopyWitness(witness=s, shape="comparable")
    if string_leq(image, s):
        return HomotopyWitness(witness=image, shape="comparable")
    glb = greatest_lower_bound(s, image)
    if glb is not None:
        return HomotopyWitness(witness=glb, shape="glb")
    agree = "".join(a if a == b else "X" for a, b in zip(s.word, image.word))
    try:
        lub = CellularString(agree)
        if lub.m == s.m:
            return HomotopyWitness(witness=lub, shape="lub")
    except Exception:
        pass
    raise StructuralError(f"no homotopy witness for {s.word} vs {image.word}")


def verify_downset_product(s) -> bool:
    """Check that the down-set of ``s`` factors over its X blocks.

    Each interior X block of length n contributes an interval-poset factor
    (resolve i symbols to the left bit and j to the right bit, i + j <= n);
    each boundary X block contributes a chain (it resolves in one direction
    only).  Verifies the factor-size product and that comparison in the
    down-set is exactly blockwise comparison of resolution coordinates.
    """
    s = _coerce(s)
    poset = string_poset(s.n, s.m)
    down = [e for e in poset.elements if string_leq(e, s)]

    blocks = s.blocks()
    spans = []  # (start, length, left neighbour bit or None, right neighbour bit or None)
    pos = 0
    for j, (sym, length) in enumerate(blocks):
        if sym == "X":
            left_sym = blocks[j - 1][0] if j > 0 else None
            right_sym = blocks[j + 1][0] if j < len(blocks) - 1 else None
            spans.append((pos, length, left_sym, right_sym))
        pos += length

    expected = 1
    for _, length, left_sym, right_sym in spans:
        if left_sym is None or right_sym is None:
            expected *= length + 1
        else:
            expected *= (length + 1) * (length + 2) // 2
    if len(down) != expected:
        return False

    def coords(e: CellularString):
        out = []
        for start, length, left_sym, right_sym in spans:
            seg = e.word[start: start + length]
            i = 0
            if left_sym is not None:
                while i < len(seg) and seg[i] == left_sym:
                    i += 1
            j = 0
            if right_sym is not None:
                while j < len(seg) - i and seg[len(seg) - 1 - j] == right_sym:
                    j += 1
            middle = seg[i: len(seg) - j] if j else seg[i:]
            if middle != "X" * len(middle):
                return None  # bits not flush with the block ends
            out.append((i, j))
        return tuple(out)

    table = {}
    for e in down:
        c = coords(e)
        if c is None:
            return False
        table[e.word] = c
    if len(set(table.values())) != len(down):
        return False
    for a in down:
        for b in down:
            product_leq = all(
                ca[0] >= cb[0] and ca[1] >= cb[1]
                for ca, cb in zip(table[a.word], table[b.word])
            )
            if product_leq != string_leq(a, b):
                return False
    return True


@dataclass(frozen=True)
class ContractibilityReport:
    """Homology of the order complex plus audits of the contraction data."""

    n: int
    m: int
    betti: BettiReport
    morphism_ok: bool            # rewrite step preserves order
    fixes_terminal_ok: bool      # rewrite step is the identity on X-initial strings
    reaches_terminal_ok: bool    # enough iterations land every string in the X-initial set
    witness_ok: bool
    level_morphism_ok: bool      # the prefix-level variants preserve order too
    failures: tuple[str, ...]

    @property
    def contractible(self) -> bool:
        return self.betti.trivial and self.betti.euler == 1

    @property
    def all_audits_pass(self) -> bool:
        return (self.morphism_ok and self.fixes_terminal_ok and
                self.reaches_terminal_ok and self.witness_ok and self.level_morphism_ok)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "betti": self.betti.to_dict(),
            "contractible": self.contractible,
            "morphism_ok": self.morphism_ok,
            "fixes_terminal_ok": self.fixes_terminal_ok,
            "reaches_terminal_ok": self.reaches_terminal_ok,
            "witness_ok": self.witness_ok,
            "level_morphism_ok": self.level_morphism_ok,
            "failures": list(self.failures),
        }


def contractibility_report(n: int, m: int) -> ContractibilityReport:
    """Homology of the order complex of the (n, m) string poset plus audits.

    Audits, each exhaustive over the poset: the rewrite step is a poset
    morphism, fixes X-initial strings pointwise, lands every string in the
    X-initial set after K = 2m - 1 iterations (skipped as vacuous when the
    poset has no X to shift), and admits a homotopy witness everywhere.
    """
    poset = string_poset(n, m)
    k = 2 * m - 1
    top_dim = n - k
    failures: list[str] = []

    image = {e.word: retraction_step(e) for e in poset.elements}

    morphism_ok = True
    for a in poset.elements:
        for b in poset.elements:
            if a is not b and string_leq(a, b) and not string_leq(image[a.word], image[b.word]):
                morphism_ok = False
                failures.append(f"order not preserved: {a.word} <= {b.word}")

    fixes_terminal_ok = True
    for e in poset.elements:
        if e.word[0] == "X" and image[e.word] != e:
            fixes_terminal_ok = False
            failures.append(f"terminal string moved: {e.word}")

    reaches_terminal_ok = True
    if top_dim > 0:
        for e in poset.elements:
            w = e
            for _ in range(k):
                w = retraction_step(w)
            if w.word[0] != "X":
                reaches_terminal_ok = False
                failures.append(f"{e.word} not terminal after {k} steps (got {w.word})")

    witness_ok = True
    for e in poset.elements:
        try:
            hw = homotopy_witness(e)
        except StructuralError as exc:
            witness_ok = False
            failures.append(str(exc))
            continue
        f = image[e.word]
        if hw.shape == "lub":
            linked = string_leq(e, hw.witness) and string_leq(f, hw.witness)
        else:
            linked = string_leq(hw.witness, e) and string_leq(hw.witness, f)
        if not linked:
            witness_ok = False
            failures.append(f"witness {hw.witness.word} not linked to {e.word}/{f.word}")

    level_morphism_ok = True
    for level in range(2, top_dim + 2):
        sub = [e for e in poset.elements
               if all(ch == "X" for ch in e.word[: level - 1])]
        img = {e.word: retraction_step(e, level) for e in sub}
        for a in sub:
            for b in sub:
                if a is not b and string_leq(a, b) and not string_leq(img[a.word], img[b.word]):
                    level_morphism_ok = False
                    failures.append(f"level {level} order not preserved: {a.word} <= {b.word}")

    betti = gf2_betti(order_complex(poset), reduced=True)
    return ContractibilityReport(
        n=n, m=m, betti=betti,
        morphism_ok=morphism_ok,
        fixes_terminal_ok=fixes_terminal_ok,
        reaches_terminal_ok=reaches_terminal_ok,
        witness_ok=witness_ok,
        level_morphism_ok=level_morphism_ok,
        failures=tuple(failures),
    )


def poset_dot(poset: StringPoset) -> str:
    """Graphviz DOT text: nodes are strings, edges are covering relations.

    Strings of equal dimension share a rank.
    """
    lines = ["digraph strings {", "  rankdir=BT;", "  node [shape=box];"]
    by_dim: dict[int, list[str]] = {}
    for e in poset.elements:
        by_dim.setdefault(e.dimension, []).append(e.word)
    for dim in sorted(by_dim):
        members = " ".join(f'"{w}";' for w in by_dim[dim])
        lines.append(f"  {{ rank=same; {members} }}")
    for lo, hi in poset.covers:
        lines.append(f'  "{poset.elements[lo].word}" -> "{poset.elements[hi].word}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
