"""GF(2) linear algebra on bit-packed rows.

Rows are Python ints holding an ``n``-bit string MSB-left, so string column
``j`` lives at bit ``n - 1 - j``.  XOR of two rows is a single int op.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import Gf2Error, NoPeriodError, RankError


def pack(bits: str) -> int:
    if set(bits) - {"0", "1"}:
        raise Gf2Error(f"not a bitstring: {bits!r}")
    return int(bits, 2) if bits else 0


def unpack(value: int, n: int) -> str:
    return format(value, f"0{n}b") if n else ""


def dot_mod2(a: str, b: str) -> int:
    if len(a) != len(b):
        raise Gf2Error(f"length mismatch: {len(a)} vs {len(b)}")
    return (pack(a) & pack(b)).bit_count() & 1


@dataclass(frozen=True)
class Gf2Matrix:
    rows: tuple[int, ...]
    n: int

    @classmethod
    def from_strings(cls, rows: Sequence[str], n: int | None = None) -> "Gf2Matrix":
        if n is None:
            n = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != n:
                raise Gf2Error(f"row {r!r} is not {n} bits wide")
        return cls(tuple(pack(r) for r in rows), n)

    def rank(self) -> int:
        basis = Basis.empty(self.n)
        for row in self.rows:
            basis, _ = basis.add_row(row)
        return basis.rank


@dataclass(frozen=True)
class Basis:
    """Reduced row-echelon basis.

    Every row has its leading 1 in a pivot column and zeros in all the other
    pivot columns; rows are ordered by pivot column.
    """

    n: int
    rows: tuple[int, ...] = ()
    pivots: tuple[int, ...] = ()

    @classmethod
    def empty(cls, n: int) -> "Basis":
        return cls(n)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: int) -> int:
        for row, p in zip(self.rows, self.pivots):
            if (v >> (self.n - 1 - p)) & 1:
                v ^= row
        return v

    def contains(self, v: str) -> bool:
        return self.reduce(pack(v)) == 0

    def add_row(self, v: int) -> tuple["Basis", bool]:
        v = self.reduce(v)
        if v == 0:
            return self, False
        p = self.n - v.bit_length()
        bit = 1 << (self.n - 1 - p)
        rows = [r ^ v if r & bit else r for r in self.rows]
        pairs = sorted(zip(self.pivots + (p,), rows + [v]))
        return Basis(self.n, tuple(r for _, r in pairs), tuple(c for c, _ in pairs)), True

    def as_strings(self) -> list[str]:
        return [unpack(r, self.n) for r in self.rows]


def add_if_independent(basis: Basis, v: str) -> tuple[Basis, bool]:
    """Add ``v`` if it is outside the span of ``basis``; returns (basis', accepted)."""
    if len(v) != basis.n:
        raise Gf2Error(f"expected {basis.n} bits, got {len(v)}")
    return basis.add_row(pack(v))


def solve_secret(basis: Basis, n: int | None = None) -> str:
    """Unique nonzero vector orthogonal to every row of a rank ``n-1`` basis."""
    n = basis.n if n is None else n
    if n != basis.n:
        raise Gf2Error(f"basis is {basis.n} bits wide, asked for n={n}")
    if basis.rank != n - 1:
        kind = "insufficient" if basis.rank < n - 1 else "overdetermined"
        raise RankError(f"{kind} rank: need {n - 1} independent rows, have {basis.rank}")
    free = next(c for c in range(n) if c not in basis.pivots)
    s = 1 << (n - 1 - free)
    for row, p in zip(basis.rows, basis.pivots):
        if (row >> (n - 1 - free)) & 1:
            s |= 1 << (n - 1 - p)
    return unpack(s, n)


def brute_force_secret(f: Callable[[str], str], n: int) -> str:
    """Find the period of ``f`` by enumerating all ``2^n`` inputs."""
    if n > 16:
        raise Gf2Error(f"brute force limited to n <= 16, got {n}")
    seen: dict[str, int] = {}
    for x in range(1 << n):
        y = f(unpack(x, n))
        if y in seen:
            return unpack(seen[y] ^ x, n)
        seen[y] = x
    raise NoPeriodError(f"f is one-to-one on {n} bits; no period")
