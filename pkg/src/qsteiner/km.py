"""Kramer-Mesner matrices for prescribed groups.

Rows are indexed by G-orbits on t-subspaces, columns by G-orbits on
k-subspaces, both in canonical orbit order.  The entry at (T^G, K^G) counts
the members of K^G containing the stored representative T.  A 0/1 vector x
with Mx = lambda*1 selects the orbits whose union is a G-invariant design.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .action import Orbit, orbit, orbit_lookup, orbit_partition, parse_orbits
from .gf2 import Subspace, _parse_header, format_matrix, grassmannian_bases, rref_rows, vecmul
from .group import MatrixGroup
from .theory import DesignParams


@dataclass
class KMMatrix:
    rows: list[Orbit]
    cols: list[Orbit]
    # one sparse column per entry of cols: row index -> entry
    columns: list[dict[int, int]]
    params: DesignParams
    group: MatrixGroup | None = None
    group_order: int = 1
    filtered: bool = False
    # original (unfiltered) column index of every column
    col_origin: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.col_origin:
            self.col_origin = list(range(len(self.cols)))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def entry(self, r: int, c: int) -> int:
        return self.columns[c].get(r, 0)

    def entries(self) -> dict[tuple[int, int], int]:
        return {(r, c): val for c, col in enumerate(self.columns) for r, val in col.items()}

    def row_sums(self) -> list[int]:
        sums = [0] * len(self.rows)
        for col in self.columns:
            for r, val in col.items():
                sums[r] += val
        return sums

    def mul(self, x: Sequence[int]) -> list[int]:
        """M x for an integer column vector x."""
        out = [0] * len(self.rows)
        for c, xc in enumerate(x):
            if xc:
                for r, val in self.columns[c].items():
                    out[r] += val * xc
        return out


def _sub_bases(basis: tuple[int, ...], t: int) -> list[tuple[int, ...]]:
    return [rref_rows([vecmul(c, basis) for c in coeffs]) for coeffs in grassmannian_bases(len(basis), t)]


def build_km_matrix(G: MatrixGroup, p: DesignParams, check_samples: int = 0, seed: int = 0) -> KMMatrix:
    """Kramer-Mesner matrix M_{t,k}^G.

    With ``check_samples`` > 0, that many nonzero cells are recomputed with a
    random member of the row orbit in place of the representative; a
    mismatch raises ``AssertionError``.
    """
    rows = orbit_partition(p.v, p.t, G)
    cols = orbit_partition(p.v, p.k, G)
    rlook = orbit_lookup(rows)
    rep = [o.representative.basis for o in rows]
    columns = []
    for o in cols:
        col: dict[int, int] = {}
        for K in o.members:
            for T in _sub_bases(K.basis, p.t):
                i = rlook[T]
                if rep[i] == T:
                    col[i] = col.get(i, 0) + 1
        columns.append(col)
    m = KMMatrix(rows, cols, columns, p, G, G.order or 1)
    if check_samples:
        rng = random.Random(seed)
        cells = [(r, c) for c, col in enumerate(columns) for r in col]
        for r, c in rng.sample(cells, min(check_samples, len(cells))):
            T = rng.choice(rows[r].members)
            count = sum(1 for K in cols[c].members if all(_in(b, K) for b in T.basis))
            assert count == columns[c][r], f"entry ({r},{c}) depends on the row representative"
    return m


def _in(x: int, K: Subspace) -> bool:
    return x in K


def filter_lambda1(m: KMMatrix) -> KMMatrix:
    """Drop every column holding an entry > 1; such orbits cannot occur when lambda = 1."""
    if m.params.lam != 1:
        raise ValueError("column filtering only applies to lambda = 1")
    keep = [c for c, col in enumerate(m.columns) if all(v <= 1 for v in col.values())]
    return KMMatrix(
        rows=m.rows,
        cols=[m.cols[c] for c in keep],
        columns=[m.columns[c] for c in keep],
        params=m.params,
        group=m.group,
        group_order=m.group_order,
        filtered=True,
        col_origin=[m.col_origin[c] for c in keep],
    )


# ------------------------------------------------------------------ designs


@dataclass(frozen=True)
class DesignCandidate:
    blocks: frozenset[Subspace]
    params: DesignParams

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass
class CoverageReport:
    ok: bool
    histogram: dict[int, int]  # coverage count -> number of t-subspaces
    violations: list[tuple[Subspace, int]]

    def __bool__(self) -> bool:
        return self.ok


def _members(m: KMMatrix, c: int) -> tuple[Subspace, ...]:
    o = m.cols[c]
    if o.members is not None:
        return o.members
    if m.group is None:
        raise ValueError("column orbit members unknown and no group to regenerate them")
    return orbit(o.representative, m.group).members


def assemble_design(m: KMMatrix, x: Sequence[int]) -> DesignCandidate:
    if len(x) != len(m.cols):
        raise ValueError(f"selection has length {len(x)}, matrix has {len(m.cols)} columns")
    blocks: set[Subspace] = set()
    for c, xc in enumerate(x):
        if xc:
            blocks.update(_members(m, c))
    return DesignCandidate(frozenset(blocks), m.params)


def selection_from_columns(m: KMMatrix, chosen: Sequence[int]) -> list[int]:
    x = [0] * len(m.cols)
    for c in chosen:
        x[c] = 1
    return x


def verify_design(d: DesignCandidate, max_violations: int = 50) -> CoverageReport:
    """Check that every t-subspace lies in exactly lambda blocks."""
    p = d.params
    counts: dict[tuple[int, ...], int] = {}
    for B in d.blocks:
        if B.v != p.v or B.k != p.k:
            raise ValueError(f"block {B} is not a {p.k}-subspace of GF(2)^{p.v}")
        for T in _sub_bases(B.basis, p.t):
            counts[T] = counts.get(T, 0) + 1
    hist: dict[int, int] = {}
    violations = []
    for T in grassmannian_bases(p.v, p.t):
        n = counts.get(T, 0)
        hist[n] = hist.get(n, 0) + 1
        if n != p.lam and len(violations) < max_violations:
            violations.append((Subspace(T, p.v), n))
    ok = set(hist) == {p.lam}
    return CoverageReport(ok, dict(sorted(hist.items())), violations)


def design_is_invariant(d: DesignCandidate, G: MatrixGroup) -> bool:
    keys = {B.basis for B in d.blocks}
    return all(rref_rows([vecmul(b, g.rows) for b in B.basis]) in keys for B in d.blocks for g in G.generators)


# -------------------------------------------------------------------- files


def format_km(m: KMMatrix) -> str:
    p = m.params
    r, c = m.shape
    lines = [f"v={p.v} t={p.t} k={p.k} group_order={m.group_order} rows={r} cols={c} filtered={int(m.filtered)}"]
    for j, col in enumerate(m.columns):
        for i in sorted(col):
            lines.append(f"{i} {j} {col[i]}")
    return "\n".join(lines) + "\n"


def format_km_orbits(orbits: Sequence[Orbit], origin: Sequence[int] | None = None) -> str:
    parts = [f"#orbits={len(orbits)}\n"]
    for i, o in enumerate(orbits):
        extra = f" orig={origin[i]}" if origin is not None else ""
        parts.append(f"orbit {i} size={o.size}{extra}\n")
        parts.append(format_matrix(o.representative.matrix()))
    return "".join(parts)


def save_km(path, m: KMMatrix) -> None:
    """Write the triplet file plus ``<path>.rows`` and ``<path>.cols`` orbit files."""
    path = str(path)
    with open(path, "w") as fh:
        fh.write(format_km(m))
    with open(path + ".rows", "w") as fh:
        fh.write(format_km_orbits(m.rows))
    with open(path + ".cols", "w") as fh:
        fh.write(format_km_orbits(m.cols, m.col_origin))


def parse_km_header(line: str) -> dict[str, int]:
    kv = _parse_header(line)
    need = ("v", "t", "k", "group_order", "rows", "cols", "filtered")
    try:
        return {key: int(kv[key]) for key in need}
    except (KeyError, ValueError):
        raise ValueError(f"malformed KM header {line!r}; expected " + " ".join(f"{k}=<int>" for k in need)) from None


def parse_km(text: str, lam: int = 1) -> tuple[dict[str, int], list[dict[int, int]]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = parse_km_header(lines[0])
    columns: list[dict[int, int]] = [dict() for _ in range(head["cols"])]
    for n, line in enumerate(lines[1:], start=2):
        try:
            r, c, val = (int(x) for x in line.split())
        except ValueError:
            raise ValueError(f"line {n}: expected 'row col value', got {line!r}") from None
        if not (0 <= r < head["rows"] and 0 <= c < head["cols"]):
            raise ValueError(f"line {n}: cell ({r},{c}) outside a {head['rows']}x{head['cols']} matrix")
        columns[c][r] = val
    return head, columns


def load_km(path, group: MatrixGroup | None = None, lam: int = 1) -> KMMatrix:
    """Load a KM triplet file and its companion orbit files (representatives only)."""
    path = str(path)
    with open(path) as fh:
        head, columns = parse_km(fh.read())

    def read_orbits(suffix):
        try:
            with open(path + suffix) as fh:
                text = fh.read()
        except FileNotFoundError:
            return None, None
        origin = []
        for line in text.splitlines():
            if line.startswith("orbit "):
                tok = [t for t in line.split() if t.startswith("orig=")]
                origin.append(int(tok[0][5:]) if tok else len(origin))
        return [Orbit(S, size) for size, S in parse_orbits(text)], origin

    rows, _ = read_orbits(".rows")
    cols, origin = read_orbits(".cols")
    if rows is None:
        rows = [Orbit(Subspace((), head["v"]), 0) for _ in range(head["rows"])]
    if cols is None:
        cols = [Orbit(Subspace((), head["v"]), 0) for _ in range(head["cols"])]
        origin = list(range(head["cols"]))
    if len(rows) != head["rows"] or len(cols) != head["cols"]:
        raise ValueError("orbit files disagree with the KM header")
    params = DesignParams(head["t"], head["v"], head["k"], lam)
    return KMMatrix(rows, cols, columns, params, group, head["group_order"], bool(head["filtered"]), list(origin))


def format_design(blocks: Sequence[Subspace]) -> str:
    """Block file: header ``v=<v> k=<k> blocks=<n>``, then one hex matrix block per design block."""
    blocks = sorted(blocks)
    if not blocks:
        raise ValueError("cannot write an empty design")
    v, k = blocks[0].v, blocks[0].k
    parts = [f"v={v} k={k} blocks={len(blocks)}\n"]
    for B in blocks:
        if B.v != v or B.k != k:
            raise ValueError("all blocks must share v and k")
        parts.append(format_matrix(B.matrix()))
    return "".join(parts)


def parse_design(text: str) -> tuple[int, int, list[Subspace]]:
    from .gf2 import parse_matrix_lines

    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty block file")
    kv = _parse_header(lines[0])
    try:
        v, k, n = int(kv["v"]), int(kv["k"]), int(kv["blocks"])
    except (KeyError, ValueError):
        raise ValueError("block file must start with 'v=<v> k=<k> blocks=<n>'") from None
    blocks = []
    pos = 1
    for i in range(n):
        if pos >= len(lines):
            raise ValueError(f"block file ends after {i} of {n} blocks")
        m, pos = parse_matrix_lines(lines, pos)
        B = Subspace(rref_rows(m.rows), m.ncols)
        if B.v != v or B.k != k:
            raise ValueError(f"block {i} is not a {k}-subspace of GF(2)^{v}")
        blocks.append(B)
    if pos != len(lines):
        raise ValueError("trailing lines after the last block")
    if len(set(blocks)) != len(blocks):
        raise ValueError("block file lists a block twice")
    return v, k, blocks
