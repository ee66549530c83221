"""Signatures, partitions and Young-diagram statistics.

A *signature* is a weakly decreasing tuple of integers with an explicit
length N (trailing zeros matter).  A *partition* is the nonnegative case
with trailing zeros dropped.  Everything here is immutable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

__all__ = [
    "Signature",
    "Partition",
    "FrobeniusCoords",
    "conjugate",
    "diagram_stats",
    "frobenius",
    "split_signature",
    "interlaces",
    "shift",
    "parse_signature",
    "format_signature",
    "partitions_of",
    "signatures_in_box",
    "interlacing_below",
]


@dataclass(frozen=True)
class Signature:
    parts: tuple[int, ...]

    def __init__(self, parts: Iterable[int]):
        p = tuple(int(v) for v in parts)
        if not p:
            raise DomainError("signature must have length >= 1")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise DomainError(f"signature parts not weakly decreasing: {p}")
        object.__setattr__(self, "parts", p)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def N(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def is_partition(self) -> bool:
        return self.parts[-1] >= 0

    def to_partition(self) -> "Partition":
        return Partition(self.parts)

    def __str__(self) -> str:
        return format_signature(self)


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __init__(self, parts: Iterable[int] = ()):
        p = [int(v) for v in parts]
        if any(v < 0 for v in p):
            raise DomainError(f"partition parts must be >= 0: {tuple(p)}")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise DomainError(f"partition parts not weakly decreasing: {tuple(p)}")
        while p and p[-1] == 0:
            p.pop()
        object.__setattr__(self, "parts", tuple(p))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def padded(self, N: int) -> Signature:
        if len(self.parts) > N:
            raise DomainError(f"partition of length {len(self.parts)} does not fit in N={N}")
        return Signature(self.parts + (0,) * (N - len(self.parts)))


@dataclass(frozen=True)
class FrobeniusCoords:
    """Modified Frobenius coordinates a_i = lam_i - i + 1/2, b_i = lam'_i - i + 1/2.

    Stored doubled (odd positive integers) so the half-integers stay exact.
    """

    a2: tuple[int, ...]
    b2: tuple[int, ...]

    @property
    def a(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.a2)

    @property
    def b(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.b2)

    @property
    def d(self) -> int:
        return len(self.a2)

    def total(self) -> Fraction:
        return Fraction(sum(self.a2) + sum(self.b2), 2)


def _as_partition(lam) -> Partition:
    if isinstance(lam, Partition):
        return lam
    if isinstance(lam, Signature):
        return Partition(lam.parts)
    return Partition(lam)


def conjugate(lam) -> Partition:
    lam = _as_partition(lam)
    if not lam.parts:
        return Partition()
    return Partition(sum(1 for v in lam.parts if v >= j) for j in range(1, lam.parts[0] + 1))


def diagram_stats(lam, cell: tuple[int, int]) -> tuple[int, int, int, int]:
    """Return (arm, arm-colength, leg, leg-colength) of a 1-indexed cell."""
    lam = _as_partition(lam)
    i, j = cell
    if not (1 <= i <= len(lam.parts) and 1 <= j <= lam.parts[i - 1]):
        raise DomainError(f"cell {cell} is not in the diagram of {lam.parts}")
    col = sum(1 for v in lam.parts if v >= j)
    return lam.parts[i - 1] - j, j - 1, col - i, i - 1


def frobenius(lam) -> FrobeniusCoords:
    lam = _as_partition(lam)
    conj = conjugate(lam).parts
    d = sum(1 for i, v in enumerate(lam.parts, start=1) if v >= i)
    a2 = tuple(2 * (lam.parts[i] - i - 1) + 1 for i in range(d))
    b2 = tuple(2 * (conj[i] - i - 1) + 1 for i in range(d))
    return FrobeniusCoords(a2, b2)


def split_signature(lam: Signature) -> tuple[Partition, Partition]:
    plus = Partition(v for v in lam.parts if v >= 0)
    minus = Partition(-v for v in reversed(lam.parts) if v <= 0)
    return plus, minus


def interlaces(mu: Signature, lam: Signature) -> bool:
    """True iff lam_{i+1} <= mu_i <= lam_i for all i (mu has one fewer part)."""
    m, l = tuple(mu), tuple(lam)
    if len(l) != len(m) + 1:
        raise DomainError(f"interlacing needs len(lam) = len(mu) + 1, got {len(l)} and {len(m)}")
    return all(l[i + 1] <= m[i] <= l[i] for i in range(len(m)))


def shift(lam: Signature, M: int) -> Signature:
    return Signature(v + M for v in lam.parts)


_SIG_RE = re.compile(r"^\s*\[\s*(-?\d+(\s*,\s*-?\d+)*)?\s*\]\s*$")


def parse_signature(text: str) -> Signature:
    """Parse the text form ``[3,1,0,-2]``."""
    if not _SIG_RE.match(text):
        raise DomainError(f"malformed signature text: {text!r}")
    body = text.strip()[1:-1].strip()
    if not body:
        raise DomainError("signature must have length >= 1")
    return Signature(int(t) for t in body.split(","))


def format_signature(lam) -> str:
    return "[" + ",".join(str(v) for v in tuple(lam)) + "]"


# enumeration helpers used by tests and verification suites

def partitions_of(n: int, max_part: int | None = None, max_len: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        rest_len = None if max_len is None else max_len - 1
        for rest in partitions_of(n - first, first, rest_len):
            yield (first,) + rest


def signatures_in_box(N: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """All weakly decreasing N-tuples with entries in [lo, hi]."""
    if N == 0:
        yield ()
        return
    for first in range(hi, lo - 1, -1):
        for rest in signatures_in_box(N - 1, lo, first):
            yield (first,) + rest


def interlacing_below(lam: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All mu with mu interlacing lam (len(mu) = len(lam) - 1)."""
    lam = tuple(lam)
    n = len(lam) - 1
    if n < 0:
        return

    def rec(i: int, acc: tuple[int, ...]):
        if i == n:
            yield acc
            return
        for v in range(lam[i], lam[i + 1] - 1, -1):
            yield from rec(i + 1, acc + (v,))

    yield from rec(0, ())
