"""Group orbits on Grassmannians and the order-3 point/plane census.

Orbits are computed by generator BFS on raw RREF bases.  Because the
Grassmannian is scanned in lexicographic order, the first unvisited subspace
met is the least member of its orbit and becomes the representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .gf2 import (
    Gf2Matrix,
    Subspace,
    act,
    act_rows,
    grassmannian_bases,
    rref_rows,
    span,
    vecmul,
)
from .group import MatrixGroup, check_normalizer, representative_A


class PointOrbitClass(str, Enum):
    FIXED_POINT = "fixed-point"
    ORBIT_LINE = "orbit-line"
    ORBIT_TRIANGLE = "orbit-triangle"


class FixedPlaneClass(str, Enum):
    TYPE7 = "type7"
    TYPE1 = "type1"


@dataclass(frozen=True)
class Orbit:
    representative: Subspace
    size: int
    members: tuple[Subspace, ...] | None = None

    @property
    def k(self) -> int:
        return self.representative.k


def _orbit_bases(start: tuple[int, ...], gens: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    seen = {start}
    out = [start]
    i = 0
    while i < len(out):
        b = out[i]
        for g in gens:
            c = act_rows(b, g)
            if c not in seen:
                seen.add(c)
                out.append(c)
        i += 1
    return out


def orbit(S: Subspace, G: MatrixGroup) -> Orbit:
    """Orbit of ``S`` under the group generated by ``G.generators``."""
    bases = sorted(_orbit_bases(S.basis, [g.rows for g in G.generators]))
    members = tuple(Subspace(b, S.v) for b in bases)
    return Orbit(members[0], len(members), members)


def orbit_partition(v: int, k: int, G: MatrixGroup) -> list[Orbit]:
    """All G-orbits on k-subspaces, sorted by (least) representative."""
    gens = [g.rows for g in G.generators]
    seen: set = set()
    out = []
    for b in grassmannian_bases(v, k):
        if b in seen:
            continue
        bases = _orbit_bases(b, gens)
        seen.update(bases)
        bases.sort()
        members = tuple(Subspace(x, v) for x in bases)
        out.append(Orbit(members[0], len(members), members))
    return out


def orbit_lookup(orbits: Sequence[Orbit]) -> dict[tuple[int, ...], int]:
    """Map each member basis to the index of its orbit."""
    out = {}
    for i, o in enumerate(orbits):
        if o.members is None:
            raise ValueError("orbit lookup needs enumerated members")
        for m in o.members:
            out[m.basis] = i
    return out


# ------------------------------------------------------------ order-3 census


def classify_point_orbit(o: Orbit, A: Gf2Matrix) -> PointOrbitClass:
    if o.k != 1:
        raise ValueError("not an orbit of points")
    if o.size == 1:
        return PointOrbitClass.FIXED_POINT
    if o.size != 3:
        raise ValueError(f"point orbit of size {o.size} under an element of order 3")
    members = o.members or orbit(o.representative, MatrixGroup((A,), A.ncols)).members
    dim = span([m.basis[0] for m in members], o.representative.v).k
    return PointOrbitClass.ORBIT_LINE if dim == 2 else PointOrbitClass.ORBIT_TRIANGLE


def classify_fixed_plane(E: Subspace, A: Gf2Matrix) -> FixedPlaneClass:
    if E.k != 3:
        raise ValueError("not a plane")
    if act(E, A) != E:
        raise ValueError("plane is not fixed by the matrix")
    pts = E.points()
    fixed = [p for p in pts if vecmul(p, A.rows) == p]
    if len(fixed) == 7:
        return FixedPlaneClass.TYPE7
    moving = sorted(set(pts) - set(fixed))
    orbits = []
    while moving:
        p = moving[0]
        o = {p, vecmul(p, A.rows), vecmul(vecmul(p, A.rows), A.rows)}
        orbits.append(o)
        moving = [q for q in moving if q not in o]
    dims = sorted(len(rref_rows(o)) for o in orbits)
    if len(fixed) != 1 or dims != [2, 3]:
        raise ValueError(f"fixed plane with {len(fixed)} fixed points and orbit spans {dims}")
    return FixedPlaneClass.TYPE1


@dataclass(frozen=True)
class O3Census:
    fixed_points: int
    orbit_lines: int
    orbit_triangles: int
    fixed_planes_type7: int
    fixed_planes_type1: int


def _image_table(A: Gf2Matrix) -> np.ndarray:
    return np.array([vecmul(x, A.rows) for x in range(1 << A.ncols)], dtype=np.int64)


def fixed_planes(A: Gf2Matrix) -> list[Subspace]:
    """Every plane E with EA = E, by a vectorized scan of the whole Grassmannian."""
    v = A.ncols
    if v < 3:
        return []
    img = _image_table(A)
    B = np.array(grassmannian_bases(v, 3), dtype=np.int64)
    b0, b1, b2 = B[:, 0], B[:, 1], B[:, 2]
    elems = np.stack([b0, b1, b0 ^ b1, b2, b0 ^ b2, b1 ^ b2, b0 ^ b1 ^ b2], axis=1)
    ok = np.ones(len(B), dtype=bool)
    for col in (b0, b1, b2):
        ok &= (img[col][:, None] == elems).any(axis=1)
    return [Subspace(tuple(int(x) for x in row), v) for row in B[ok]]


def o3_census(A: Gf2Matrix) -> O3Census:
    """Count point orbits and fixed planes of <A> by direct enumeration."""
    v = A.ncols
    cyc = MatrixGroup((A,), v)
    kinds = {c: 0 for c in PointOrbitClass}
    for o in orbit_partition(v, 1, cyc):
        kinds[classify_point_orbit(o, A)] += 1
    planes = {c: 0 for c in FixedPlaneClass}
    for E in fixed_planes(A):
        planes[classify_fixed_plane(E, A)] += 1
    return O3Census(
        kinds[PointOrbitClass.FIXED_POINT],
        kinds[PointOrbitClass.ORBIT_LINE],
        kinds[PointOrbitClass.ORBIT_TRIANGLE],
        planes[FixedPlaneClass.TYPE7],
        planes[FixedPlaneClass.TYPE1],
    )


def o3_census_type(v: int, f: int) -> O3Census:
    return o3_census(representative_A(v, f))


# --------------------------------------------------- normalizer on G-orbits


def induced_permutations(N: MatrixGroup, orbits: Sequence[Orbit], lookup: dict | None = None) -> list[list[int]]:
    """For each generator of N, the permutation it induces on ``orbits``.

    Raises if an image falls outside ``orbits`` (the set is not N-invariant).
    """
    if lookup is None:
        lookup = orbit_lookup(orbits)
    perms = []
    for g in N.generators:
        perm = []
        for i, o in enumerate(orbits):
            img = act_rows(o.representative.basis, g.rows)
            j = lookup.get(img)
            if j is None:
                raise ValueError(f"orbit {i} is mapped outside the given orbit set")
            perm.append(j)
        perms.append(perm)
    return perms


def _classes_from_perms(n: int, perms: Sequence[Sequence[int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in perms:
        for i, j in enumerate(perm):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def induced_orbits_on_orbits(N: MatrixGroup, orbits: Sequence[Orbit], G: MatrixGroup) -> list[list[int]]:
    """Partition of orbit indices into classes under the induced action of N.

    N must normalize G (checked on its generators against an enumerated G).
    Classes are sorted by their least index.
    """
    check_normalizer(N, G)
    return _classes_from_perms(len(orbits), induced_permutations(N, orbits))


def propagate_index(N: MatrixGroup, perms: Sequence[Sequence[int]], i: int) -> list[int]:
    """Image of orbit index ``i`` under every element of N, in N's element order.

    Uses the BFS tree recorded by :func:`closure`, so the cost is O(#N).
    """
    if N.parent is None:
        raise ValueError("group must come from closure() to propagate along its BFS tree")
    parent, via = N.parent, N.via
    img = [0] * len(parent)
    img[0] = i
    for e in range(1, len(parent)):
        img[e] = perms[via[e]][img[parent[e]]]
    return img


def stabilizer_of_orbit(
    N: MatrixGroup,
    K_index: int,
    orbits: Sequence[Orbit],
    G: MatrixGroup,
    perms: Sequence[Sequence[int]] | None = None,
) -> MatrixGroup:
    """Setwise stabilizer in N of the G-orbit ``orbits[K_index]``."""
    check_normalizer(N, G)
    if perms is None:
        perms = induced_permutations(N, orbits)
    img = propagate_index(N, perms, K_index)
    keep = [e for e, j in enumerate(img) if j == K_index]
    elements = tuple(N.elements[e] for e in keep)
    gens = elements[1:] if len(elements) > 1 else elements
    return MatrixGroup(gens, N.v, elements)


def subgroup_classes(
    N: MatrixGroup,
    members: Sequence[int],
    perms: Sequence[Sequence[int]],
    indices: Sequence[int],
) -> list[list[int]]:
    """Orbits on ``indices`` of the subgroup of N given by element positions ``members``."""
    todo = set(indices)
    out = []
    for c in sorted(indices):
        if c not in todo:
            continue
        img = propagate_index(N, perms, c)
        cls = sorted({img[e] for e in members})
        if not set(cls) <= set(indices):
            raise ValueError("index set is not invariant under the subgroup")
        todo.difference_update(cls)
        out.append(cls)
    return out


# -------------------------------------------------------------- orbit files


def format_orbits(orbits: Sequence[Orbit]) -> str:
    from .gf2 import format_matrix

    parts = [f"#orbits={len(orbits)}\n"]
    for i, o in enumerate(orbits):
        parts.append(f"orbit {i} size={o.size}\n")
        parts.append(format_matrix(o.representative.matrix()))
    return "".join(parts)


def parse_orbits(text: str) -> list[tuple[int, Subspace]]:
    """Return ``(size, representative)`` pairs; members are not stored on disk."""
    from .gf2 import parse_matrix_lines

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#orbits="):
        raise ValueError("orbit file must start with '#orbits=<n>'")
    n = int(lines[0].split("=", 1)[1])
    out = []
    pos = 1
    for i in range(n):
        head = lines[pos].split()
        if head[0] != "orbit" or int(head[1]) != i:
            raise ValueError(f"expected 'orbit {i} size=<s>', got {lines[pos]!r}")
        size = int(head[2].split("=", 1)[1])
        m, pos = parse_matrix_lines(lines, pos + 1)
        out.append((size, Subspace(rref_rows(m.rows), m.ncols)))
    return out
