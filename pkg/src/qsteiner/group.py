"""Finite matrix groups over GF(2).

Elements are :class:`Gf2Matrix` values acting on row vectors from the right.
Groups are enumerated by breadth-first product closure; normalizers are
supplied as generator lists and checked here rather than computed.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .gf2 import (
    DimensionMismatch,
    Gf2Matrix,
    _parse_header,
    format_matrix,
    invert_rows,
    mul_rows,
    parse_matrix_lines,
)

DEFAULT_CAP = 1 << 20


class GroupTooLarge(RuntimeError):
    pass


class NotNormalizing(ValueError):
    pass


@dataclass(frozen=True)
class Order3Type:
    v: int
    f: int

    def __post_init__(self):
        if not 0 <= self.f <= self.v - 1 or (self.v - self.f) % 2:
            raise ValueError(f"no order-3 type A_{{{self.v},{self.f}}}: need v-f even and 0 <= f < v")

    def __str__(self) -> str:
        return f"A_{{{self.v},{self.f}}}"


@dataclass(eq=False)
class MatrixGroup:
    generators: tuple[Gf2Matrix, ...]
    v: int
    elements: tuple[Gf2Matrix, ...] | None = None
    # BFS tree from closure: element i == elements[parent[i]] @ generators[via[i]]
    parent: tuple[int, ...] | None = field(default=None, repr=False)
    via: tuple[int, ...] | None = field(default=None, repr=False)
    _index: dict | None = field(default=None, repr=False)

    @property
    def order(self) -> int | None:
        return None if self.elements is None else len(self.elements)

    @property
    def enumerated(self) -> bool:
        return self.elements is not None

    def __len__(self) -> int:
        if self.elements is None:
            raise ValueError("group has not been enumerated")
        return len(self.elements)

    def __iter__(self):
        if self.elements is None:
            raise ValueError("group has not been enumerated")
        return iter(self.elements)

    def index(self) -> dict:
        """Map from raw row tuples to element positions."""
        if self._index is None:
            if self.elements is None:
                raise ValueError("membership test needs an enumerated group")
            self._index = {e.rows: i for i, e in enumerate(self.elements)}
        return self._index

    def __contains__(self, g: Gf2Matrix) -> bool:
        return g.rows in self.index()

    def index_of(self, g: Gf2Matrix) -> int:
        return self.index()[g.rows]


def identity(v: int) -> Gf2Matrix:
    return Gf2Matrix.identity(v)


def _check_generators(gens: Sequence[Gf2Matrix]) -> int:
    if not gens:
        raise ValueError("need at least one generator (pass the identity for the trivial group)")
    v = gens[0].ncols
    for g in gens:
        if g.nrows != v or g.ncols != v:
            raise DimensionMismatch(f"generator of shape {g.shape} in a group on GF(2)^{v}")
        if not g.is_invertible():
            raise ValueError("generator is singular")
    return v


def closure(generators: Sequence[Gf2Matrix], cap: int = DEFAULT_CAP) -> MatrixGroup:
    """Enumerate the group generated by ``generators``.

    Elements appear in BFS order from the identity, multiplying on the right
    by generators in list order.  Raises :class:`GroupTooLarge` past ``cap``.
    """
    gens = tuple(generators)
    v = _check_generators(gens)
    graw = [g.rows for g in gens]
    ident = tuple(1 << i for i in range(v))
    seen = {ident}
    order = [ident]
    parent = [-1]
    via = [-1]
    head = 0
    while head < len(order):
        x = order[head]
        for gi, s in enumerate(graw):
            y = mul_rows(x, s)
            if y not in seen:
                seen.add(y)
                order.append(y)
                parent.append(head)
                via.append(gi)
                if len(order) > cap:
                    raise GroupTooLarge(f"group exceeds element cap {cap}")
        head += 1
    elements = tuple(Gf2Matrix(r, v) for r in order)
    return MatrixGroup(gens, v, elements, tuple(parent), tuple(via))


def cyclic(g: Gf2Matrix) -> MatrixGroup:
    return closure([g])


def trivial_group(v: int) -> MatrixGroup:
    return closure([identity(v)])


def element_order(g: Gf2Matrix, limit: int = 1 << 24) -> int:
    ident = tuple(1 << i for i in range(g.ncols))
    x = g.rows
    n = 1
    while x != ident:
        x = mul_rows(x, g.rows)
        n += 1
        if n > limit:
            raise ValueError("element order exceeds limit; is the matrix invertible?")
    return n


def representative_A(v: int, f: int) -> Gf2Matrix:
    """Block-diagonal order-3 matrix: (v-f)/2 blocks [[0,1],[1,1]] then I_f."""
    Order3Type(v, f)
    rows = []
    for b in range((v - f) // 2):
        i = 2 * b
        rows.append(1 << (i + 1))
        rows.append((1 << i) | (1 << (i + 1)))
    rows += [1 << i for i in range(v - f, v)]
    return Gf2Matrix(tuple(rows), v)


def fixed_space_dim(g: Gf2Matrix) -> int:
    """Dimension of the eigenspace for eigenvalue 1, i.e. ker(g + I)."""
    return g.ncols - (g + identity(g.ncols)).rank()


def order3_type(g: Gf2Matrix) -> Order3Type:
    if g.nrows != g.ncols or element_order(g) != 3:
        raise ValueError("order3_type needs an element of order 3")
    return Order3Type(g.ncols, fixed_space_dim(g))


def conjugate(g: Gf2Matrix, n: Gf2Matrix) -> Gf2Matrix:
    """n^-1 g n."""
    return Gf2Matrix(mul_rows(mul_rows(invert_rows(n.rows, n.ncols), g.rows), n.rows), g.ncols)


def is_normalizing(n: Gf2Matrix, G: MatrixGroup) -> bool:
    """True iff n^-1 g n lies in G for every g in G."""
    if G.elements is None:
        raise ValueError("is_normalizing needs an enumerated group")
    if n.ncols != G.v:
        raise DimensionMismatch("dimension mismatch")
    ninv = invert_rows(n.rows, n.ncols)
    index = G.index()
    return all(mul_rows(mul_rows(ninv, g.rows), n.rows) in index for g in G.elements)


def check_normalizer(N: MatrixGroup, G: MatrixGroup) -> None:
    bad = [i for i, n in enumerate(N.generators) if not is_normalizing(n, G)]
    if bad:
        raise NotNormalizing(f"generators {bad} do not normalize the prescribed group")


# ---------------------------------------------------------- desk-scale GL(v,2)


def general_linear(v: int) -> list[Gf2Matrix]:
    """All of GL(v,2) by brute force over v*v bit patterns (v <= 4)."""
    if v > 4:
        raise ValueError("brute-force GL(v,2) is limited to v <= 4")
    out = []
    for rows in itertools.product(range(1 << v), repeat=v):
        m = Gf2Matrix(tuple(rows), v)
        if m.is_invertible():
            out.append(m)
    return out


def transvections(v: int) -> list[Gf2Matrix]:
    """Elementary matrices I + E_ij, which generate GL(v,2)."""
    out = []
    for i in range(v):
        for j in range(v):
            if i != j:
                rows = [1 << r for r in range(v)]
                rows[i] |= 1 << j
                out.append(Gf2Matrix(tuple(rows), v))
    return out


def conjugacy_classes(elements: Iterable[Gf2Matrix], generators: Sequence[Gf2Matrix]) -> list[list[Gf2Matrix]]:
    """Partition ``elements`` (a conjugation-closed set) into classes under conjugation by ``generators``."""
    pool = {e.rows: e for e in elements}
    gens = [(invert_rows(s.rows, s.ncols), s.rows) for s in generators]
    classes = []
    seen: set = set()
    for key in sorted(pool):
        if key in seen:
            continue
        seen.add(key)
        cls = [key]
        queue = deque([key])
        while queue:
            x = queue.popleft()
            for sinv, s in gens:
                y = mul_rows(mul_rows(sinv, x), s)
                if y not in seen:
                    if y not in pool:
                        raise ValueError("element set is not closed under conjugation")
                    seen.add(y)
                    cls.append(y)
                    queue.append(y)
        classes.append([pool[k] for k in sorted(cls)])
    return classes


# ----------------------------------------------------------------- group file


def format_group(gens: Sequence[Gf2Matrix]) -> str:
    v = gens[0].ncols
    return f"v={v} gens={len(gens)}\n" + "".join(format_matrix(g) for g in gens)


def parse_group(text: str) -> list[Gf2Matrix]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty group file")
    kv = _parse_header(lines[0])
    try:
        v = int(kv["v"])
        n = int(kv["gens"])
    except (KeyError, ValueError):
        raise ValueError(f"malformed group header {lines[0]!r}; expected 'v=<int> gens=<n>'") from None
    gens = []
    pos = 1
    for _ in range(n):
        m, pos = parse_matrix_lines(lines, pos)
        if m.nrows != v or m.ncols != v:
            raise DimensionMismatch(f"group file declares v={v} but contains a {m.shape} matrix")
        gens.append(m)
    return gens


def load_group(path) -> list[Gf2Matrix]:
    with open(path) as fh:
        return parse_group(fh.read())


def save_group(path, gens: Sequence[Gf2Matrix]) -> None:
    with open(path, "w") as fh:
        fh.write(format_group(gens))
