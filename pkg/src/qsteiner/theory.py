"""Closed-form parameter arithmetic for binary q-Steiner triple systems.

Covers the derived lambda values, admissibility, the point/plane census of an
order-3 automorphism A_{v,f}, the exclusion rule for order-3 types and the
forced fixed blocks of type A_{v,1}.  Everything is exact integer or
``Fraction`` arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gf2 import Subspace, gaussian_binomial, rref_rows, span, vecmul
from .group import Order3Type, representative_A


@dataclass(frozen=True)
class DesignParams:
    t: int
    v: int
    k: int
    lam: int = 1

    def __post_init__(self):
        if not 0 <= self.t <= self.k <= self.v:
            raise ValueError(f"need 0 <= t <= k <= v, got t={self.t} k={self.k} v={self.v}")
        if self.lam < 1:
            raise ValueError("lambda must be positive")

    @classmethod
    def sts(cls, v: int) -> "DesignParams":
        return cls(2, v, 3, 1)


def lambda_s(p: DesignParams, s: int) -> Fraction:
    """lambda * [v-s, t-s] / [k-s, t-s]; the number of blocks through an s-subspace."""
    if not 0 <= s <= p.t:
        raise ValueError(f"s must lie in 0..{p.t}")
    return Fraction(p.lam * gaussian_binomial(p.v - s, p.t - s), gaussian_binomial(p.k - s, p.t - s))


def is_admissible(p: DesignParams) -> bool:
    return all(lambda_s(p, s).denominator == 1 for s in range(p.t + 1))


def is_admissible_sts(v: int) -> bool:
    return v >= 3 and v % 6 in (1, 3)


def _exact_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"{num} is not divisible by {den}")
    return q


@dataclass(frozen=True)
class FixedStructureCounts:
    v: int
    f: int
    fixed_points: int
    orbit_lines: int
    orbit_triangles: int
    fixed_planes_type7: int
    fixed_planes_type1: int
    # None when the count is not an integer, i.e. no STS can carry this type
    F7: int | None
    F1: int


def o3_counts(v: int, f: int) -> FixedStructureCounts:
    Order3Type(v, f)
    fixed = (1 << f) - 1
    moving = (1 << (v - f)) - 1
    lines = _exact_div(moving, 3)
    triangles = _exact_div(moving * fixed, 3)
    if f <= 1:
        F7: int | None = 0
    else:
        num = fixed * ((1 << (f - 1)) - 1)
        F7 = num // 21 if num % 21 == 0 else None
    return FixedStructureCounts(
        v=v,
        f=f,
        fixed_points=fixed,
        orbit_lines=lines,
        orbit_triangles=triangles,
        fixed_planes_type7=gaussian_binomial(f, 3),
        fixed_planes_type1=triangles,
        F7=F7,
        F1=lines,
    )


@dataclass(frozen=True)
class ExclusionVerdict:
    excluded: bool
    reason: str  # admissibility | corollary-f≡2 | lemma-f-large | not-excluded


def o3_type_excluded(v: int, f: int) -> ExclusionVerdict:
    """Can an STS_2(v) have an automorphism of order 3 and type A_{v,f}?

    Excluded when f = 2 (mod 3), since the fixed blocks of type 7 would form
    an STS_2(f), and when v >= 7, f != v (mod 3) and f > (v-3)/2, where every
    fixed point would need its own type-1 fixed block.
    """
    Order3Type(v, f)
    if not is_admissible_sts(v):
        return ExclusionVerdict(True, "admissibility")
    if f % 3 == 2:
        return ExclusionVerdict(True, "corollary-f≡2")
    if v >= 7 and f % 3 != v % 3 and 2 * f > v - 3:
        return ExclusionVerdict(True, "lemma-f-large")
    return ExclusionVerdict(False, "not-excluded")


def order3_types(v: int) -> list[int]:
    """All fixed-space dimensions f with an order-3 type A_{v,f}."""
    return [f for f in range(v % 2, v, 2)]


def surviving_types(vs) -> list[tuple[int, int]]:
    return [(v, f) for v in vs for f in order3_types(v) if not o3_type_excluded(v, f).excluded]


TABLE_FIELDS = (
    "fixed_points",
    "orbit_lines",
    "orbit_triangles",
    "fixed_planes_type7",
    "fixed_planes_type1",
    "F7",
    "F1",
)


def theory_rows(vs, include_excluded: bool = True) -> list[dict]:
    rows = []
    for v in vs:
        for f in order3_types(v):
            verdict = o3_type_excluded(v, f)
            if verdict.excluded and not include_excluded:
                continue
            c = o3_counts(v, f)
            row = {"v": v, "f": f}
            row.update({name: getattr(c, name) for name in TABLE_FIELDS})
            row["excluded"] = verdict.excluded
            row["reason"] = verdict.reason
            rows.append(row)
    return rows


def format_theory_table(rows: list[dict]) -> str:
    """Aligned table (types as columns) followed by machine-readable rows."""
    labels = {
        "fixed_points": "#fixed points",
        "orbit_lines": "#orbit lines",
        "orbit_triangles": "#orbit triangles",
        "fixed_planes_type7": "#fixed planes of type 7",
        "fixed_planes_type1": "#fixed planes of type 1",
        "F7": "#F7",
        "F1": "#F1",
    }
    heads = [f"A_{{{r['v']},{r['f']}}}" for r in rows]

    def cell(x):
        return "-" if x is None else str(x)

    w0 = max(len(s) for s in labels.values())
    widths = [max(len(h), *(len(cell(r[k])) for k in TABLE_FIELDS), len(r["reason"])) for h, r in zip(heads, rows)]
    out = [" " * w0 + " | " + " ".join(h.rjust(w) for h, w in zip(heads, widths))]
    out.append("-" * len(out[0]))
    for key in TABLE_FIELDS:
        out.append(labels[key].ljust(w0) + " | " + " ".join(cell(r[key]).rjust(w) for r, w in zip(rows, widths)))
    out.append("status".ljust(w0) + " | " + " ".join(r["reason"].rjust(w) for r, w in zip(rows, widths)))
    out.append("")
    out.append("# v f fixed_points orbit_lines orbit_triangles planes7 planes1 F7 F1 excluded reason")
    for r in rows:
        vals = [r["v"], r["f"]] + [cell(r[k]) for k in TABLE_FIELDS] + [int(r["excluded"]), r["reason"]]
        out.append(" ".join(str(x) for x in vals))
    return "\n".join(out) + "\n"


def parse_theory_rows(text: str) -> list[dict]:
    rows = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) != 11 or not parts[0].isdigit():
            continue
        row = {"v": int(parts[0]), "f": int(parts[1])}
        for key, val in zip(TABLE_FIELDS, parts[2:9]):
            row[key] = None if val == "-" else int(val)
        row["excluded"] = parts[9] == "1"
        row["reason"] = parts[10]
        rows.append(row)
    return rows


# ------------------------------------------------------------ forced blocks


def forced_fixed_blocks_f1(v: int) -> list[Subspace]:
    """Type-1 fixed planes of A_{v,1}: each orbit line joined with the fixed point.

    In an STS_2(v) admitting A_{v,1} every one of these planes is a block.
    """
    if not is_admissible_sts(v):
        raise ValueError(f"STS_2({v}) is not admissible")
    A = representative_A(v, 1)
    fixed = 1 << (v - 1)
    seen: set[int] = set()
    planes = set()
    for x in range(1, 1 << (v - 1)):
        if x in seen:
            continue
        y = vecmul(x, A.rows)
        z = vecmul(y, A.rows)
        seen.update((x, y, z))
        # inside the moving subspace every point orbit is a line: x + xA + xA^2 = 0
        assert x ^ y ^ z == 0
        planes.add(rref_rows([x, y, fixed]))
    out = sorted(Subspace(b, v) for b in planes)
    assert len(out) == _exact_div((1 << (v - 1)) - 1, 3)
    return out


class SpreadModel:
    """GF(2^{v-1}) x GF(2) with multiplication by a primitive cube root of unity.

    The lines {0, w, zeta*w, zeta^2*w} form a Desarguesian line spread of W;
    joined with the 1-dimensional complement X they give the type-1 fixed
    planes of x -> (zeta*w, x).
    """

    PRIMITIVE = {6: 0b1000011, 12: 0b1000001010011}  # x^6+x+1, x^12+x^6+x^4+x+1

    def __init__(self, v: int, poly: int | None = None):
        n = v - 1
        if n % 2:
            raise ValueError("W = GF(2^(v-1)) needs v-1 even to contain cube roots of unity")
        self.v = v
        self.n = n
        self.poly = poly if poly is not None else self.PRIMITIVE[n]
        order = (1 << n) - 1
        self.zeta = self.power(0b10, order // 3)
        assert self.zeta != 1 and self.power(self.zeta, 3) == 1

    def mul(self, a: int, b: int) -> int:
        n, poly = self.n, self.poly
        out = 0
        while b:
            if b & 1:
                out ^= a
            b >>= 1
            a <<= 1
            if a >> n:
                a ^= poly
        return out

    def power(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def zeta_matrix_rows(self) -> tuple[int, ...]:
        """Multiplication by zeta on W in the polynomial basis (row convention)."""
        return tuple(self.mul(1 << i, self.zeta) for i in range(self.n))

    def spread_lines(self) -> list[tuple[int, ...]]:
        lines = set()
        for w in range(1, 1 << self.n):
            lines.add(rref_rows([w, self.mul(w, self.zeta)]))
        return sorted(lines)

    def fixed_planes(self) -> list[tuple[int, ...]]:
        """Planes L + X in field coordinates (X spanned by bit n)."""
        x = 1 << self.n
        return sorted(rref_rows(list(L) + [x]) for L in self.spread_lines())

    def standard_basis_change(self) -> tuple[int, ...]:
        """Rows expressing field coordinates in the standard basis of A_{v,1}.

        Picks a GF(4)-basis w_1, w_2, ... of W; the pairs (w_i, zeta w_i)
        become (e_{2i-1}, e_{2i}), which turns multiplication by zeta into the
        2x2 blocks [[0,1],[1,1]].  X maps to e_v.
        """
        chosen: list[int] = []
        for w in range(1, 1 << self.n):
            cand = chosen + [w, self.mul(w, self.zeta)]
            if len(rref_rows(cand)) == len(cand):
                chosen = cand
            if len(chosen) == self.n:
                break
        # chosen[j] (a field element) must map to e_j: invert the basis matrix
        from .gf2 import invert_rows

        inv = invert_rows(chosen, self.n)
        return inv + (1 << self.n,)

    def planes_in_standard_basis(self) -> list[Subspace]:
        P = self.standard_basis_change()
        out = []
        for plane in self.fixed_planes():
            out.append(span([vecmul(b, P) for b in plane], self.v))
        return sorted(out)
