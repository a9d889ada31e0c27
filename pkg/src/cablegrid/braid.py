"""Closed braid words, Markov and exchange moves, and the Alexander polynomial."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from sympy import Poly, symbols
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from .laurent import LaurentPoly

_T = symbols("t")
_FIELD = ZZ.frac_field(_T)


class NotAKnotError(ValueError):
    """Raised when a closed braid has more than one component."""


@dataclass(frozen=True)
class BraidWord:
    """A closed braid on ``n`` strands.

    ``letters`` holds signed generator indices: ``+i`` is the positive
    crossing sigma_i and ``-i`` its inverse. The word is read cyclically,
    so equality and hashing go through :meth:`canonical`.
    """

    n: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"strand count must be positive, got {self.n}")
        object.__setattr__(self, "letters", tuple(int(g) for g in self.letters))
        for g in self.letters:
            if g == 0 or abs(g) >= self.n:
                raise ValueError(f"letter {g} is out of range for {self.n} strands")

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BraidWord):
            return NotImplemented
        return self.n == other.n and self.canonical_letters() == other.canonical_letters()

    def __hash__(self) -> int:
        return hash((self.n, self.canonical_letters()))

    def canonical_letters(self) -> tuple[int, ...]:
        return _canonical(self.letters)

    def canonical(self) -> BraidWord:
        return BraidWord(self.n, self.canonical_letters())

    def rotate(self, k: int) -> BraidWord:
        if not self.letters:
            return self
        k %= len(self.letters)
        return BraidWord(self.n, self.letters[k:] + self.letters[:k])

    def permutation(self) -> tuple[int, ...]:
        """Image of each strand position (0-based) after one pass through the word."""
        perm = list(range(self.n))
        for g in self.letters:
            i = abs(g) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        image = [0] * self.n
        for pos, strand in enumerate(perm):
            image[strand] = pos
        return tuple(image)

    def component_count(self) -> int:
        image = self.permutation()
        seen = [False] * self.n
        count = 0
        for start in range(self.n):
            if not seen[start]:
                count += 1
                j = start
                while not seen[j]:
                    seen[j] = True
                    j = image[j]
        return count

    def is_knot(self) -> bool:
        return self.component_count() == 1

    def to_json(self) -> dict:
        return {"n": self.n, "letters": list(self.letters)}

    @classmethod
    def from_json(cls, data: Mapping) -> BraidWord:
        return cls(int(data["n"]), tuple(int(g) for g in data["letters"]))

    def __str__(self) -> str:
        if not self.letters:
            return f"1 in B{self.n}"
        return " ".join(f"s{g}" if g > 0 else f"s{-g}^-1" for g in self.letters) + f" in B{self.n}"


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Cancel adjacent inverse pairs, including across the cyclic seam."""
    stack: list[int] = []
    for g in letters:
        if stack and stack[-1] == -g:
            stack.pop()
        else:
            stack.append(g)
    lo, hi = 0, len(stack) - 1
    while lo < hi and stack[lo] == -stack[hi]:
        lo += 1
        hi -= 1
    return tuple(stack[lo : hi + 1])


def _canonical(letters: tuple[int, ...]) -> tuple[int, ...]:
    reduced = free_reduce(letters)
    if not reduced:
        return reduced
    return min(reduced[k:] + reduced[:k] for k in range(len(reduced)))


def exponent_sum(w: BraidWord) -> int:
    return sum(1 if g > 0 else -1 for g in w.letters)


def self_linking(w: BraidWord) -> int:
    return exponent_sum(w) - w.n


def stabilize(w: BraidWord, sign: int, position: int | None = None) -> BraidWord:
    """Markov stabilization: add strand ``n+1`` and a letter ``sign * n``.

    ``position`` is the insertion index in the letter list (default: the end).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    letters = list(w.letters)
    pos = len(letters) if position is None else position
    letters.insert(pos, sign * w.n)
    return BraidWord(w.n + 1, tuple(letters))


def destabilize(w: BraidWord) -> tuple[BraidWord, int] | None:
    """Remove a lone ``sigma_{n-1}^{+-1}`` and the last strand, if possible."""
    top = w.n - 1
    if top < 1:
        return None
    hits = [idx for idx, g in enumerate(w.letters) if abs(g) == top]
    if len(hits) != 1:
        return None
    idx = hits[0]
    sign = 1 if w.letters[idx] > 0 else -1
    rest = w.letters[idx + 1 :] + w.letters[:idx]
    return BraidWord(w.n - 1, rest), sign


def exchange_move(w: BraidWord, split: tuple[int, int]) -> BraidWord | None:
    """Exchange move at the two top-generator letters ``split``.

    The word must read ``A s^e B s^-e`` cyclically, with ``s = sigma_{n-1}``
    appearing nowhere else. Returns ``A s^-e B s^e`` or ``None``.
    """
    top = w.n - 1
    if top < 1:
        return None
    i, j = split
    size = len(w.letters)
    if not (0 <= i < size and 0 <= j < size) or i == j:
        return None
    hits = [idx for idx, g in enumerate(w.letters) if abs(g) == top]
    if sorted(hits) != sorted((i, j)):
        return None
    if w.letters[i] != -w.letters[j]:
        return None
    letters = list(w.letters)
    letters[i], letters[j] = -letters[i], -letters[j]
    return BraidWord(w.n, tuple(letters))


def exchange_splits(w: BraidWord) -> list[tuple[int, int]]:
    top = w.n - 1
    hits = [idx for idx, g in enumerate(w.letters) if abs(g) == top] if top >= 1 else []
    if len(hits) == 2 and w.letters[hits[0]] == -w.letters[hits[1]]:
        return [(hits[0], hits[1])]
    return []


def _isotopy_rewrites(letters: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    size = len(letters)
    for k in range(1, size):
        yield letters[k:] + letters[:k]
    for k in range(size - 1):
        a, b = letters[k], letters[k + 1]
        if a == -b:
            yield letters[:k] + letters[k + 2 :]
        elif abs(abs(a) - abs(b)) >= 2:
            yield letters[:k] + (b, a) + letters[k + 2 :]
    for k in range(size - 2):
        a, b, c = letters[k : k + 3]
        if a == c and abs(abs(a) - abs(b)) == 1 and (a > 0) == (b > 0):
            yield letters[:k] + (b, a, b) + letters[k + 3 :]


def isotopy_words(w: BraidWord, budget: int) -> list[tuple[int, ...]]:
    """Letter lists reachable by at most ``budget`` elementary isotopy rewrites.

    Rewrites are cyclic rotation, free cancellation, far commutation and the
    braid relation between same-sign letters. Rotations cost nothing, so every
    rotation of every reached word is included. Words never grow. The result
    is ordered deterministically by discovery.
    """
    start = w.letters
    seen: dict[tuple[int, ...], int] = {}
    queue: deque[tuple[tuple[int, ...], int]] = deque()
    for rot in [start[k:] + start[:k] for k in range(len(start))] or [start]:
        if rot not in seen:
            seen[rot] = 0
            queue.append((rot, 0))
    while queue:
        cur, depth = queue.popleft()
        if seen[cur] < depth:
            continue
        rotations = _rotations(cur)
        for nxt in _isotopy_rewrites(cur):
            cost = depth if nxt in rotations else depth + 1
            if cost > budget:
                continue
            if nxt not in seen or seen[nxt] > cost:
                seen[nxt] = cost
                queue.append((nxt, cost))
    return list(seen)


def isotopy_closure(w: BraidWord, budget: int) -> set[BraidWord]:
    """Budgeted braid-isotopy class of ``w``; see :func:`isotopy_words`.

    Members compare by canonical form, so rotations collapse to one element.
    """
    return {BraidWord(w.n, letters) for letters in isotopy_words(w, budget)}


def _rotations(letters: tuple[int, ...]) -> set[tuple[int, ...]]:
    return {letters[k:] + letters[:k] for k in range(len(letters))}


def _burau_minor(w: BraidWord) -> DomainMatrix:
    n = w.n
    one, zero, t = _FIELD.one, _FIELD.zero, _FIELD.from_sympy(_T)
    mat = [[one if r == c else zero for c in range(n)] for r in range(n)]
    for g in w.letters:
        i = abs(g) - 1
        if g > 0:
            block = ((one - t, t), (one, zero))
        else:
            block = ((zero, one), (one / t, one - one / t))
        row_i, row_j = mat[i], mat[i + 1]
        mat[i] = [block[0][0] * x + block[0][1] * y for x, y in zip(row_i, row_j)]
        mat[i + 1] = [block[1][0] * x + block[1][1] * y for x, y in zip(row_i, row_j)]
    size = n - 1
    rows = [[(one if r == c else zero) - mat[r][c] for c in range(size)] for r in range(size)]
    return DomainMatrix(rows, (size, size), _FIELD)


def alexander_polynomial(w: BraidWord) -> LaurentPoly:
    """Normalized Alexander polynomial of the closure of ``w``.

    Uses the principal ``(n-1)``-minor of ``I - B(w)`` with ``B`` the
    unreduced Burau matrix, which equals the reduced-Burau determinant divided
    by ``1 + t + ... + t^(n-1)`` up to a unit.
    """
    if not w.is_knot():
        raise NotAKnotError("not a knot: closure has %d components" % w.component_count())
    return _alexander_cached(w.n, w.letters)


@lru_cache(maxsize=4096)
def _alexander_cached(n: int, letters: tuple[int, ...]) -> LaurentPoly:
    if n == 1:
        return LaurentPoly.from_map({0: 1})
    det = _burau_minor(BraidWord(n, letters)).det()
    expr = _FIELD.to_sympy(det)
    num, den = expr.as_numer_denom()
    num_poly = Poly(num, _T)
    den_poly = Poly(den, _T)
    den_terms = den_poly.terms()
    if len(den_terms) != 1:
        raise ArithmeticError("unexpected non-monomial denominator")
    shift = den_terms[0][0][0]
    coeffs = {m[0] - shift: int(c) for m, c in num_poly.terms()}
    return LaurentPoly.from_map(coeffs).normalized()
