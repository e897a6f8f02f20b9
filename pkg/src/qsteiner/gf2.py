"""Bit-level linear algebra over GF(2).

Vectors are plain Python ints: coordinate ``i`` is bit ``i`` (bit 0 is the
first coordinate).  Matrices act on row vectors from the right, ``x -> xA``,
so row ``i`` of ``A`` is the image of the unit vector ``e_i``.

A subspace is identified with its reduced row echelon basis.  The pivot of a
row is its first nonzero coordinate (lowest set bit), rows are ordered by
pivot, and every pivot column is zero outside its own row.  Subspaces compare
lexicographically on the tuple of basis ints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class DimensionMismatch(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


def lowbit(x: int) -> int:
    return (x & -x).bit_length() - 1


def popcount(x: int) -> int:
    return bin(x).count("1")


def vec(bits: Sequence[int]) -> int:
    """Pack a coordinate sequence, e.g. ``(1, 0, 1)``, into an int."""
    out = 0
    for i, b in enumerate(bits):
        if b & 1:
            out |= 1 << i
    return out


def unvec(x: int, v: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(v))


def vecmul(x: int, rows: Sequence[int]) -> int:
    """Row vector times matrix: XOR of the rows selected by the bits of ``x``."""
    out = 0
    i = 0
    while x:
        if x & 1:
            out ^= rows[i]
        x >>= 1
        i += 1
    return out


def rref_rows(rows: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis of the span of ``rows`` (zero rows dropped)."""
    basis: list[int] = []
    for x in rows:
        for b in basis:
            if x & (b & -b):
                x ^= b
        if not x:
            continue
        p = x & -x
        basis = [b ^ x if b & p else b for b in basis]
        basis.append(x)
    basis.sort(key=lambda b: b & -b)
    return tuple(basis)


def reduce_by(x: int, basis: Sequence[int]) -> int:
    """Reduce ``x`` modulo an RREF basis; zero iff ``x`` lies in the span."""
    for b in basis:
        if x & (b & -b):
            x ^= b
    return x


def span_elements(basis: Sequence[int]) -> list[int]:
    """All 2^k vectors in the span of ``basis`` (including zero)."""
    elems = [0]
    for b in basis:
        elems += [e ^ b for e in elems]
    return elems


@dataclass(frozen=True)
class Gf2Matrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise DimensionMismatch(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]]) -> "Gf2Matrix":
        ncols = len(bits[0]) if bits else 0
        if any(len(r) != ncols for r in bits):
            raise DimensionMismatch("ragged matrix")
        return cls(tuple(vec(r) for r in bits), ncols)

    @classmethod
    def identity(cls, v: int) -> "Gf2Matrix":
        return cls(tuple(1 << i for i in range(v)), v)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def to_bits(self) -> list[list[int]]:
        return [list(unvec(r, self.ncols)) for r in self.rows]

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        o = other.rows
        return Gf2Matrix(tuple(vecmul(r, o) for r in self.rows), other.ncols)

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Gf2Matrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.ncols)

    def apply(self, x: int) -> int:
        return vecmul(x, self.rows)

    def transpose(self) -> "Gf2Matrix":
        cols = tuple(
            sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)) for j in range(self.ncols)
        )
        return Gf2Matrix(cols, self.nrows)

    def rank(self) -> int:
        return len(rref_rows(self.rows))

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.ncols

    def inverse(self) -> "Gf2Matrix":
        return Gf2Matrix(invert_rows(self.rows, self.ncols), self.ncols)

    def __pow__(self, n: int) -> "Gf2Matrix":
        if n < 0:
            return self.inverse() ** (-n)
        result = Gf2Matrix.identity(self.ncols)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def __str__(self) -> str:
        return "\n".join("".join(str(b) for b in unvec(r, self.ncols)) for r in self.rows)


def invert_rows(rows: Sequence[int], v: int) -> tuple[int, ...]:
    """Gauss-Jordan inverse of a square matrix given as row ints."""
    if len(rows) != v:
        raise DimensionMismatch("inverse needs a square matrix")
    work = [r | (1 << (v + i)) for i, r in enumerate(rows)]
    for col in range(v):
        bit = 1 << col
        piv = next((i for i in range(col, v) if work[i] & bit), None)
        if piv is None:
            raise SingularMatrix("matrix is singular over GF(2)")
        work[col], work[piv] = work[piv], work[col]
        pr = work[col]
        for i in range(v):
            if i != col and work[i] & bit:
                work[i] ^= pr
    mask = (1 << v) - 1
    return tuple((w >> v) & mask for w in work)


def mul_rows(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Product of square matrices given as row-int tuples (no checks)."""
    return tuple(vecmul(r, b) for r in a)


@dataclass(frozen=True, order=True)
class Subspace:
    """A subspace of GF(2)^v, stored as its RREF basis."""

    basis: tuple[int, ...]
    v: int

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, x: int) -> bool:
        return reduce_by(x, self.basis) == 0

    def vectors(self) -> list[int]:
        return span_elements(self.basis)

    def points(self) -> list[int]:
        """The nonzero vectors, i.e. the 1-subspaces, in ascending order."""
        return sorted(span_elements(self.basis)[1:])

    def matrix(self) -> Gf2Matrix:
        return Gf2Matrix(self.basis, self.v)

    def __repr__(self) -> str:
        return f"Subspace(v={self.v}, basis=[{', '.join(format(b, 'x') for b in self.basis)}])"


def rref(m: Gf2Matrix) -> Gf2Matrix:
    return Gf2Matrix(rref_rows(m.rows), m.ncols)


def span(vectors: Iterable[int], v: int) -> Subspace:
    vectors = list(vectors)
    limit = 1 << v
    for x in vectors:
        if x < 0 or x >= limit:
            raise DimensionMismatch(f"vector {x:#x} is not in GF(2)^{v}")
    return Subspace(rref_rows(vectors), v)


def _check_same(S: Subspace, T: Subspace) -> None:
    if S.v != T.v:
        raise DimensionMismatch(f"ambient dimensions differ: {S.v} != {T.v}")


def contains(S: Subspace, T: Subspace) -> bool:
    """True iff T is a subspace of S."""
    _check_same(S, T)
    return all(reduce_by(b, S.basis) == 0 for b in T.basis)


def subspace_sum(S: Subspace, T: Subspace) -> Subspace:
    _check_same(S, T)
    return Subspace(rref_rows(S.basis + T.basis), S.v)


def intersect(S: Subspace, T: Subspace) -> Subspace:
    """Meet of two subspaces (Zassenhaus: reduce [s|s] and [t|0])."""
    _check_same(S, T)
    v = S.v
    mask = (1 << v) - 1
    rows = [s | (s << v) for s in S.basis] + list(T.basis)
    # pivots sit in the low half first, so rows whose low half vanishes span S ∩ T
    red = rref_rows(rows)
    return Subspace(rref_rows(r >> v for r in red if not (r & mask)), v)


def act(S: Subspace, A: Gf2Matrix) -> Subspace:
    """Image of ``S`` under ``x -> xA``."""
    if A.nrows != S.v or A.ncols != S.v:
        raise DimensionMismatch(f"matrix shape {A.shape} does not act on GF(2)^{S.v}")
    img = rref_rows(vecmul(b, A.rows) for b in S.basis)
    if len(img) != len(S.basis):
        raise SingularMatrix("singular matrix does not act on subspaces")
    return Subspace(img, S.v)


def act_rows(basis: Sequence[int], rows: Sequence[int]) -> tuple[int, ...]:
    """Unchecked fast path of :func:`act` on raw bases."""
    return rref_rows([vecmul(b, rows) for b in basis])


@lru_cache(maxsize=None)
def gaussian_binomial(v: int, k: int) -> int:
    """Number of k-subspaces of GF(2)^v, in exact integer arithmetic."""
    if v < 0 or k < 0 or k > v:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= (1 << (v - i)) - 1
        den *= (1 << (k - i)) - 1
    q, r = divmod(num, den)
    assert r == 0
    return q


def _rref_bases(v: int, k: int) -> Iterator[tuple[int, ...]]:
    for pivots in itertools.combinations(range(v), k):
        pset = set(pivots)
        free = [[j for j in range(p + 1, v) if j not in pset] for p in pivots]
        slots = [(i, j) for i, fr in enumerate(free) for j in fr]
        for bits in itertools.product((0, 1), repeat=len(slots)):
            rows = [1 << p for p in pivots]
            for (i, j), b in zip(slots, bits):
                if b:
                    rows[i] |= 1 << j
            yield tuple(rows)


@lru_cache(maxsize=8)
def grassmannian_bases(v: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All RREF bases of k-subspaces of GF(2)^v in lexicographic order."""
    if not 0 <= k <= v:
        raise ValueError(f"need 0 <= k <= v, got v={v}, k={k}")
    return tuple(sorted(_rref_bases(v, k)))


def enumerate_subspaces(v: int, k: int) -> Iterator[Subspace]:
    """Every k-subspace of GF(2)^v exactly once, lexicographic on the RREF basis."""
    for b in grassmannian_bases(v, k):
        yield Subspace(b, v)


def subspaces_of(S: Subspace, t: int) -> list[Subspace]:
    """All t-subspaces of S, obtained by pushing GF(2)^k coordinates through the basis."""
    out = []
    for coeffs in grassmannian_bases(S.k, t):
        out.append(Subspace(rref_rows(vecmul(c, S.basis) for c in coeffs), S.v))
    return out


# ---------------------------------------------------------------- hex format


def hex_width(v: int) -> int:
    return max(1, (v + 3) // 4)


def format_matrix(m: Gf2Matrix) -> str:
    w = hex_width(m.ncols)
    lines = [f"matrix v={m.ncols} rows={m.nrows}"]
    lines += [format(r, f"0{w}x") for r in m.rows]
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> dict[str, str]:
    out = {}
    for tok in line.split():
        if "=" in tok:
            key, _, val = tok.partition("=")
            out[key] = val
    return out


def parse_matrix_lines(lines: list[str], pos: int = 0) -> tuple[Gf2Matrix, int]:
    """Parse one hex matrix block starting at ``lines[pos]``; return it and the next position."""
    head = lines[pos].strip()
    if not head.startswith("matrix"):
        raise ValueError(f"line {pos + 1}: expected 'matrix v=<v> rows=<r>', got {head!r}")
    kv = _parse_header(head)
    try:
        v = int(kv["v"])
        r = int(kv["rows"])
    except (KeyError, ValueError):
        raise ValueError(f"line {pos + 1}: malformed matrix header {head!r}") from None
    body = lines[pos + 1 : pos + 1 + r]
    if len(body) != r:
        raise ValueError(f"line {pos + 1}: matrix block truncated, expected {r} rows")
    rows = tuple(int(x.strip(), 16) for x in body)
    return Gf2Matrix(rows, v), pos + 1 + r


def parse_matrix(text: str) -> Gf2Matrix:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    m, _ = parse_matrix_lines(lines)
    return m
