"""Exact cover by dancing links, with tree-size estimation and prefix splitting.

Terminology follows the Kramer-Mesner system: *rows* are the constraints
(t-orbits, each to be covered exactly once) and *columns* are the candidate
k-orbits.  In dancing-links terms the rows are the items and the columns the
options.

Branching rule: choose the uncovered row with the fewest live columns, ties
to the lowest row index; try its columns in ascending column id.  Every
entry into the recursive search counts as one node, the root included, so a
tree-size estimate and a node count describe the same tree.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

EXHAUSTED = "exhausted-no-solution"
FOUND = "solutions-found"
BUDGET = "budget-exhausted"


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class ExactCoverInstance:
    n_rows: int
    # (column id, sorted row indices); ids need not be contiguous
    columns: tuple[tuple[int, tuple[int, ...]], ...]
    forced: frozenset[int] = frozenset()
    excluded: frozenset[int] = frozenset()

    def __post_init__(self):
        ids = [c for c, _ in self.columns]
        if len(set(ids)) != len(ids):
            raise InstanceError("duplicate column ids")
        for c, rows in self.columns:
            if not rows:
                raise InstanceError(f"column {c} is empty")
            if any(not 0 <= r < self.n_rows for r in rows):
                raise InstanceError(f"column {c} touches a row outside 0..{self.n_rows - 1}")
            if len(set(rows)) != len(rows):
                raise InstanceError(f"column {c} repeats a row (entries must be 0/1)")
        known = set(ids)
        if not self.forced <= known or not self.excluded <= known:
            raise InstanceError("forced/excluded columns must exist")
        if self.forced & self.excluded:
            raise InstanceError("a column is both forced and excluded")

    @classmethod
    def from_sets(cls, n_rows: int, cols: Sequence[Iterable[int]], forced=(), excluded=()) -> "ExactCoverInstance":
        return cls(n_rows, tuple((i, tuple(sorted(set(r)))) for i, r in enumerate(cols)), frozenset(forced), frozenset(excluded))

    def with_constraints(self, forced=(), excluded=()) -> "ExactCoverInstance":
        return ExactCoverInstance(self.n_rows, self.columns, self.forced | frozenset(forced), self.excluded | frozenset(excluded))

    def column_rows(self) -> dict[int, tuple[int, ...]]:
        return dict(self.columns)

    def is_exact_cover(self, chosen: Iterable[int]) -> bool:
        """Independent check: every row covered exactly once by ``chosen``."""
        rows_of = self.column_rows()
        hits = [0] * self.n_rows
        for c in chosen:
            for r in rows_of[c]:
                hits[r] += 1
        return all(h == 1 for h in hits)


@dataclass
class SolveOutcome:
    status: str
    solutions: list[tuple[int, ...]]
    nodes_visited: int
    wall_time: float
    diagnostic: str = ""

    @property
    def has_solution(self) -> bool:
        return bool(self.solutions)


@dataclass(frozen=True)
class Budget:
    nodes: int | None = None
    seconds: float | None = None


@dataclass(frozen=True)
class PrefixJob:
    job_id: int
    # (row chosen for branching, column chosen) from the root down
    path: tuple[tuple[int, int], ...]
    excluded: frozenset[int] = frozenset()


class _Budget(Exception):
    pass


class _Conflict(Exception):
    pass


class DancingLinks:
    """Index-array dancing links over an :class:`ExactCoverInstance`.

    Node 0 is the row-list header, nodes 1..n_rows are row headers, and the
    nodes of each column are stored contiguously after that.
    """

    def __init__(self, inst: ExactCoverInstance):
        self.inst = inst
        R = inst.n_rows
        n = R + 1
        self.L = [(i - 1) % n for i in range(n)]
        self.R = [(i + 1) % n for i in range(n)]
        self.U = list(range(n))
        self.D = list(range(n))
        self.TOP = [0] * n
        self.OPT = [-1] * n
        self.LEN = [0] * n
        self.START: list[int] = []
        self.END: list[int] = []
        self.COL: list[int] = []  # option index -> column id
        self.covered = [False] * n
        for cid, rows in sorted(inst.columns):
            if cid in inst.excluded:
                continue
            o = len(self.COL)
            self.COL.append(cid)
            self.START.append(len(self.U))
            for r in rows:
                item = r + 1
                p = len(self.U)
                self.TOP.append(item)
                self.OPT.append(o)
                self.U.append(self.U[item])
                self.D.append(item)
                self.D[self.U[item]] = p
                self.U[item] = p
                self.LEN[item] += 1
            self.END.append(len(self.U))
        self.option_of = {cid: o for o, cid in enumerate(self.COL)}
        self.chosen: list[int] = []  # option indices selected so far (forced + path)
        self.nodes = 0
        self.found: list[tuple[int, ...]] = []

    # ----------------------------------------------------------- primitives

    def cover(self, i: int) -> None:
        L, R, U, D, TOP, OPT, LEN, START, END = self.L, self.R, self.U, self.D, self.TOP, self.OPT, self.LEN, self.START, self.END
        self.covered[i] = True
        L[R[i]] = L[i]
        R[L[i]] = R[i]
        p = D[i]
        while p != i:
            o = OPT[p]
            for q in range(START[o], END[o]):
                if q != p:
                    uq, dq = U[q], D[q]
                    D[uq] = dq
                    U[dq] = uq
                    LEN[TOP[q]] -= 1
            p = D[p]

    def uncover(self, i: int) -> None:
        L, R, U, D, TOP, OPT, LEN, START, END = self.L, self.R, self.U, self.D, self.TOP, self.OPT, self.LEN, self.START, self.END
        p = U[i]
        while p != i:
            o = OPT[p]
            for q in range(END[o] - 1, START[o] - 1, -1):
                if q != p:
                    LEN[TOP[q]] += 1
                    U[D[q]] = q
                    D[U[q]] = q
            p = U[p]
        L[R[i]] = i
        R[L[i]] = i
        self.covered[i] = False

    def select(self, p: int) -> None:
        """Commit the option through node p, whose own row is already covered."""
        o = self.OPT[p]
        TOP = self.TOP
        for q in range(self.START[o], self.END[o]):
            if q != p:
                self.cover(TOP[q])

    def unselect(self, p: int) -> None:
        o = self.OPT[p]
        TOP = self.TOP
        for q in range(self.END[o] - 1, self.START[o] - 1, -1):
            if q != p:
                self.uncover(TOP[q])

    def choose(self) -> int:
        """Uncovered row header with the fewest live columns (lowest index on ties); 0 if none."""
        R, LEN = self.R, self.LEN
        i = R[0]
        best, best_len = i, LEN[i] if i else 0
        i = R[i]
        while i:
            if LEN[i] < best_len:
                best, best_len = i, LEN[i]
                if best_len == 0:
                    break
            i = R[i]
        return best

    def force(self, cid: int) -> None:
        """Select a column outside the search; raises _Conflict if it clashes."""
        o = self.option_of.get(cid)
        if o is None:
            raise _Conflict(f"forced column {cid} is excluded or empty")
        first = self.START[o]
        if any(self.covered[self.TOP[q]] for q in range(first, self.END[o])):
            raise _Conflict(f"forced column {cid} shares a row with an earlier choice")
        self.cover(self.TOP[first])
        self.select(first)
        self.chosen.append(o)

    def apply_forced(self) -> None:
        for cid in sorted(self.inst.forced):
            self.force(cid)

    def replay(self, path: Sequence[tuple[int, int]]) -> None:
        """Re-enter the search tree along a stored decision path.

        A path that does not follow the search tree raises InstanceError: it
        must never be mistaken for an exhausted subtree.
        """
        for row, cid in path:
            i = self.choose()
            if i == 0 or i - 1 != row:
                raise InstanceError(f"path expects branching on row {row}, search chooses {i - 1}")
            o = self.option_of.get(cid)
            if o is None:
                raise InstanceError(f"path column {cid} is not in the instance")
            p = self.D[i]
            while p != i and self.OPT[p] != o:
                p = self.D[p]
            if p == i:
                raise InstanceError(f"column {cid} is not live under row {row}")
            self.cover(i)
            self.select(p)
            self.chosen.append(o)

    def solution_ids(self, extra: Sequence[int] = ()) -> tuple[int, ...]:
        return tuple(sorted(self.COL[o] for o in list(self.chosen) + list(extra)))

    # ---------------------------------------------------------------- search

    def search(self, want_all: bool = True, max_nodes: int | None = None, deadline: float | None = None) -> list[tuple[int, ...]]:
        """Backtrack from the current state; raises _Budget when a limit is hit.

        Solutions accumulate in ``self.found`` so they survive a budget stop.
        """
        R, D, OPT, LEN = self.R, self.D, self.OPT, self.LEN
        solutions = self.found
        picks: list[int] = []  # node chosen at each depth
        items: list[int] = []  # row header branched on at each depth
        entering = True
        p = 0
        while True:
            if entering:
                self.nodes += 1
                if max_nodes is not None and self.nodes > max_nodes:
                    self.nodes -= 1
                    raise _Budget
                if deadline is not None and not self.nodes & 1023 and time.perf_counter() > deadline:
                    raise _Budget
                if R[0] == 0:
                    solutions.append(self.solution_ids([OPT[q] for q in picks]))
                    if not want_all:
                        return solutions
                    entering = False
                    continue
                i = self.choose()
                if LEN[i] == 0:
                    entering = False
                    continue
                self.cover(i)
                items.append(i)
                p = D[i]
            else:
                if not picks:
                    return solutions
                p = picks.pop()
                self.unselect(p)
                i = items[-1]
                p = D[p]
            if p == i:
                self.uncover(i)
                items.pop()
                entering = False
                continue
            self.select(p)
            picks.append(p)
            entering = True


def solve(
    inst: ExactCoverInstance,
    budget: Budget | None = None,
    want_all: bool = True,
    path: Sequence[tuple[int, int]] = (),
) -> SolveOutcome:
    """Search for exact covers.

    Without a budget the search is exhaustive, so an empty result certifies
    that no solution exists.  ``path`` starts the search at a stored prefix
    (see :func:`split_prefixes`); node counts then cover that subtree only.
    """
    budget = budget or Budget()
    t0 = time.perf_counter()
    dl = DancingLinks(inst)
    try:
        dl.apply_forced()
        dl.replay(path)
    except _Conflict as exc:
        return SolveOutcome(EXHAUSTED, [], 0, time.perf_counter() - t0, diagnostic=str(exc))
    deadline = None if budget.seconds is None else t0 + budget.seconds
    diagnostic = ""
    try:
        dl.search(want_all, budget.nodes, deadline)
        status = FOUND if dl.found else EXHAUSTED
    except _Budget:
        # solutions always win over the budget flag: they must never be hidden
        status = FOUND if dl.found else BUDGET
        diagnostic = "budget exhausted before the search completed"
    return SolveOutcome(status, list(dl.found), dl.nodes, time.perf_counter() - t0, diagnostic)


def solve_job(inst: ExactCoverInstance, job: PrefixJob, budget: Budget | None = None, want_all: bool = True) -> SolveOutcome:
    return solve(inst.with_constraints(excluded=job.excluded), budget, want_all, job.path)


# ----------------------------------------------------------- tree estimation


@dataclass(frozen=True)
class TreeEstimate:
    mean: float
    stderr: float
    probes: int
    seed: int


def estimate_tree_size(inst: ExactCoverInstance, probes: int = 1000, seed: int = 0) -> TreeEstimate:
    """Knuth's random-descent estimate of the number of search-tree nodes.

    Each probe walks from the root choosing uniformly among the live columns
    of the branching row, and scores 1 + d1 + d1*d2 + ... over the branching
    factors d met on the way.  The mean is unbiased for the full tree size.
    """
    if probes < 1:
        raise ValueError("need at least one probe")
    rng = random.Random(seed)
    dl = DancingLinks(inst)
    try:
        dl.apply_forced()
    except _Conflict:
        return TreeEstimate(0.0, 0.0, probes, seed)
    R, D, LEN = dl.R, dl.D, dl.LEN
    total = 0.0
    total_sq = 0.0
    for _ in range(probes):
        est = 1
        weight = 1
        trail = []
        while R[0]:
            i = dl.choose()
            d = LEN[i]
            if d == 0:
                break
            p = D[i]
            for _ in range(rng.randrange(d)):
                p = D[p]
            dl.cover(i)
            dl.select(p)
            trail.append((i, p))
            weight *= d
            est += weight
        for i, p in reversed(trail):
            dl.unselect(p)
            dl.uncover(i)
        total += est
        total_sq += est * est
    mean = total / probes
    if probes > 1:
        var = max(total_sq - probes * mean * mean, 0.0) / (probes - 1)
        stderr = math.sqrt(var / probes)
    else:
        stderr = float("inf")
    return TreeEstimate(mean, stderr, probes, seed)


# --------------------------------------------------------------- splitting


@dataclass
class Split:
    jobs: list[PrefixJob]
    prefix_nodes: int
    level: int

    def __iter__(self):
        return iter(self.jobs)

    def __len__(self) -> int:
        return len(self.jobs)


class _PrefixWalk:
    """Lazy depth-first walk of the search tree down to a fixed depth."""

    def __init__(self, inst: ExactCoverInstance, level: int, root: Sequence[tuple[int, int]] = ()):
        if level < 1:
            raise ValueError("level must be at least 1")
        self.inst = inst
        self.level = level
        self.root = tuple(root)
        self.prefix_nodes = 0

    def __iter__(self):
        dl = DancingLinks(self.inst)
        try:
            dl.apply_forced()
            dl.replay(self.root)
        except _Conflict:
            self.prefix_nodes = 0
            return
        R, D, OPT, LEN, COL = dl.R, dl.D, dl.OPT, dl.LEN, dl.COL
        path = list(self.root)
        excluded = self.inst.excluded
        n_jobs = 0
        # explicit stack of (row header, current node) so deep levels cannot overflow recursion
        stack: list[list[int]] = []
        depth = 0
        entering = True
        while True:
            if entering:
                if depth == self.level or R[0] == 0:
                    yield PrefixJob(n_jobs, tuple(path), excluded)
                    n_jobs += 1
                    entering = False
                    continue
                self.prefix_nodes += 1
                i = dl.choose()
                if LEN[i] == 0:
                    entering = False
                    continue
                dl.cover(i)
                p = D[i]
                stack.append([i, p])
            else:
                if not stack:
                    return
                i, p = stack[-1]
                dl.unselect(p)
                path.pop()
                depth -= 1
                p = D[p]
                stack[-1][1] = p
            if p == i:
                dl.uncover(i)
                stack.pop()
                entering = False
                continue
            dl.select(p)
            path.append((i - 1, COL[OPT[p]]))
            depth += 1
            entering = True


def iter_prefixes(inst: ExactCoverInstance, level: int, root: Sequence[tuple[int, int]] = ()) -> _PrefixWalk:
    """Lazily yield the jobs of :func:`split_prefixes`; ``prefix_nodes`` is final once exhausted."""
    return _PrefixWalk(inst, level, root)


def split_prefixes(inst: ExactCoverInstance, level: int, root: Sequence[tuple[int, int]] = ()) -> Split:
    """Enumerate the search tree down to depth ``level`` and cut it into jobs.

    Every node at depth ``level`` becomes a job, and so does every solution
    leaf above it; dead ends above the cut are absorbed into
    ``prefix_nodes``.  Solving all jobs visits exactly the nodes of the
    monolithic search minus ``prefix_nodes``.  With ``root`` the walk starts
    at that stored path and ``level`` counts from there.
    """
    walk = _PrefixWalk(inst, level, root)
    jobs = list(walk)
    return Split(jobs, walk.prefix_nodes, level)


# --------------------------------------------------------------- job files


def format_jobs(jobs: Iterable[PrefixJob]) -> str:
    lines = []
    for j in jobs:
        path = ",".join(f"{r}:{c}" for r, c in j.path)
        excl = ",".join(str(c) for c in sorted(j.excluded))
        lines.append(f"job {j.job_id} path {path or '-'} exclude {excl or '-'}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_jobs(text: str) -> list[PrefixJob]:
    jobs = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6 or parts[0] != "job" or parts[2] != "path" or parts[4] != "exclude":
            raise ValueError(f"line {n}: expected 'job <id> path <r:c,...> exclude <c,...>'")
        path = () if parts[3] == "-" else tuple(tuple(int(x) for x in step.split(":")) for step in parts[3].split(","))
        excl = frozenset() if parts[5] == "-" else frozenset(int(x) for x in parts[5].split(","))
        jobs.append(PrefixJob(int(parts[1]), path, excl))
    return jobs


def format_outcome(job_id: int, out: SolveOutcome) -> str:
    lines = [f"job {job_id} status {out.status} nodes {out.nodes_visited} solutions {len(out.solutions)}"]
    lines += [" ".join(str(c) for c in sol) for sol in out.solutions]
    return "\n".join(lines) + "\n"


def parse_outcomes(text: str) -> dict[int, SolveOutcome]:
    out: dict[int, SolveOutcome] = {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    pos = 0
    while pos < len(lines):
        parts = lines[pos].split()
        if len(parts) != 8 or parts[0] != "job":
            raise ValueError(f"malformed outcome line {lines[pos]!r}")
        jid, status, nodes, k = int(parts[1]), parts[3], int(parts[5]), int(parts[7])
        sols = [tuple(int(c) for c in ln.split()) for ln in lines[pos + 1 : pos + 1 + k]]
        if jid in out:
            raise ValueError(f"job {jid} completed twice")
        out[jid] = SolveOutcome(status, sols, nodes, 0.0)
        pos += 1 + k
    return out


# ---------------------------------------------------------- random instances


def random_instance(rng: random.Random, n_rows: int, n_cols: int, density: float = 0.25, planted: bool = True) -> ExactCoverInstance:
    """Random 0/1 instance; ``planted`` seeds it with one exact cover."""
    cols: list[set[int]] = []
    if planted and n_rows:
        order = list(range(n_rows))
        rng.shuffle(order)
        k = rng.randint(1, min(n_rows, max(1, n_cols // 3)))
        cuts = sorted(rng.sample(range(1, n_rows), k - 1)) if k > 1 else []
        bounds = [0] + cuts + [n_rows]
        for a, b in zip(bounds, bounds[1:]):
            cols.append(set(order[a:b]))
    while len(cols) < n_cols:
        c = {r for r in range(n_rows) if rng.random() < density}
        if not c:
            c = {rng.randrange(n_rows)}
        cols.append(c)
    rng.shuffle(cols)
    return ExactCoverInstance.from_sets(n_rows, cols[:n_cols])
