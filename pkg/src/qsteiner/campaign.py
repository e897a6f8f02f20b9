"""Symmetry-broken search campaign over a filtered Kramer-Mesner system.

The normalizer N of the prescribed group G permutes the G-orbits, hence the
columns, and maps solutions to solutions.  So when forcing one column of an
N-class admits no solution, the whole class can be deleted.  Classes that do
not resolve within the probe budget are attacked by fixing pairs (anchor,
partner), where partners are taken up to the stabilizer of the anchor in N.
Pair problems that still do not resolve are split into prefix jobs.
"""

from __future__ import annotations

import datetime as _dt
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from typing import Sequence

from .action import (
    FixedPlaneClass,
    _classes_from_perms,
    classify_fixed_plane,
    induced_permutations,
    orbit_lookup,
    propagate_index,
    subgroup_classes,
)
from .group import MatrixGroup, check_normalizer, element_order, fixed_space_dim
from .km import KMMatrix
from .solver import (
    BUDGET,
    EXHAUSTED,
    FOUND,
    Budget,
    ExactCoverInstance,
    PrefixJob,
    SolveOutcome,
    format_outcome,
    parse_outcomes,
    solve,
    solve_job,
    split_prefixes,
)

log = logging.getLogger(__name__)

COLUMN_STATES = ("forced", "excluded-by-class", "excluded-by-pair", "covered-by-hard-split", "open")


# -------------------------------------------------------------------- ledger


class Ledger:
    """Append-only, timestamped decision log.  Only the coordinating process writes."""

    def __init__(self, path=None):
        self.path = path
        self.entries: list[str] = []
        if path is not None:
            open(path, "w").close()

    def add(self, entry: str) -> None:
        stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")
        self.entries.append(entry)
        if self.path is not None:
            with open(self.path, "a") as fh:
                fh.write(f"{stamp} {entry}\n")

    def lines(self) -> list[str]:
        return list(self.entries)


def strip_timestamps(text: str) -> list[str]:
    """Ledger file contents without the leading timestamp column."""
    return [ln.split(" ", 1)[1] for ln in text.splitlines() if ln.strip()]


# ---------------------------------------------------------------- the state


def km_instance(m: KMMatrix) -> ExactCoverInstance:
    """Exact-cover view of a KM matrix; requires 0/1 entries and lambda = 1."""
    if m.params.lam != 1:
        raise ValueError("exact cover needs lambda = 1")
    cols = []
    for c, col in enumerate(m.columns):
        if any(v != 1 for v in col.values()):
            raise ValueError(f"column {c} has entries > 1; filter the matrix first")
        cols.append((c, tuple(sorted(col))))
    return ExactCoverInstance(len(m.rows), tuple(cols))


@dataclass
class ClassInfo:
    class_id: int
    columns: list[int]
    status: str = "open"  # open | forced | excluded | hard | solution

    @property
    def representative(self) -> int:
        return self.columns[0]


@dataclass
class PairTask:
    anchor_column: int
    partner_column: int
    stabilizer_class_id: int
    partners: list[int]
    status: str = "open"


@dataclass
class CampaignState:
    km: KMMatrix
    G: MatrixGroup
    N: MatrixGroup
    inst: ExactCoverInstance
    classes: list[ClassInfo]
    perms: list[list[int]]
    forced: set[int] = field(default_factory=set)
    excluded: set[int] = field(default_factory=set)
    column_state: dict[int, str] = field(default_factory=dict)
    ledger: Ledger = field(default_factory=Ledger)
    solutions: list[tuple[int, ...]] = field(default_factory=list)
    nodes_spent: int = 0

    def current_instance(self, extra_forced: Sequence[int] = ()) -> ExactCoverInstance:
        return self.inst.with_constraints(forced=set(self.forced) | set(extra_forced), excluded=self.excluded)

    def class_of(self, col: int) -> ClassInfo:
        for c in self.classes:
            if col in c.columns:
                return c
        raise KeyError(col)

    def census(self) -> dict[str, int]:
        out = {s: 0 for s in COLUMN_STATES}
        for c in range(len(self.km.cols)):
            out[self.column_state.get(c, "open")] += 1
        return out


def forced_fixed_block_columns(m: KMMatrix, G: MatrixGroup) -> list[int]:
    """Columns that every design must contain when G = <A> with A of type A_{v,1}.

    These are the singleton orbits formed by type-1 fixed planes of A: every
    orbit line needs its fixed block, and there are exactly as many type-1
    fixed planes as orbit lines.
    """
    if G.order != 3 or len(G.generators) != 1:
        raise ValueError("forced fixed blocks need a cyclic group of order 3")
    A = G.generators[0]
    if element_order(A) != 3 or fixed_space_dim(A) != 1:
        raise ValueError("forced fixed blocks need an automorphism of type A_{v,1}")
    out = []
    for c, o in enumerate(m.cols):
        if o.size == 1 and o.representative.k == 3:
            if classify_fixed_plane(o.representative, A) == FixedPlaneClass.TYPE1:
                out.append(c)
    v = m.params.v
    if len(out) != ((1 << (v - 1)) - 1) // 3:
        raise AssertionError(f"found {len(out)} forced fixed blocks")
    return out


def build_campaign(
    m: KMMatrix,
    G: MatrixGroup,
    N: MatrixGroup,
    force_fixed_blocks: bool = False,
    ledger: Ledger | None = None,
) -> CampaignState:
    """Set up the N-classes on the columns of a filtered KM matrix.

    Classes are ordered by size, then by lowest column index.
    """
    if not m.filtered and any(v > 1 for col in m.columns for v in col.values()):
        raise ValueError("campaign needs a lambda=1 filtered KM matrix")
    check_normalizer(N, G)
    lookup = orbit_lookup(m.cols)
    perms = induced_permutations(N, m.cols, lookup)
    raw = _classes_from_perms(len(m.cols), perms)
    raw.sort(key=lambda cl: (len(cl), cl[0]))
    classes = [ClassInfo(i, cl) for i, cl in enumerate(raw)]
    state = CampaignState(m, G, N, km_instance(m), classes, perms, ledger=ledger or Ledger())
    if force_fixed_blocks:
        forced = set(forced_fixed_block_columns(m, G))
        for cl in classes:
            hit = forced & set(cl.columns)
            if hit and hit != set(cl.columns):
                raise AssertionError("forced columns do not form complete N-classes")
            if hit:
                cl.status = "forced"
                for c in cl.columns:
                    state.column_state[c] = "forced"
                state.ledger.add(f"class {cl.class_id} forced")
        state.forced = forced
    return state


# ----------------------------------------------------------- exclusion loop


@dataclass
class Probe:
    class_id: int
    column: int
    status: str
    nodes: int


@dataclass
class ExclusionReport:
    probes: list[Probe]
    solution: tuple[int, ...] | None = None
    stopped_on_budget: bool = False


def _exclude_class(state: CampaignState, cl: ClassInfo, how: str) -> None:
    cl.status = "excluded"
    state.excluded.update(cl.columns)
    for c in cl.columns:
        state.column_state[c] = how


def exclusion_loop(
    state: CampaignState,
    budget: Budget,
    total_nodes: int | None = None,
    statuses: Sequence[str] = ("open",),
    deadline: float | None = None,
) -> ExclusionReport:
    """Force each class representative in turn and delete classes that admit no solution.

    Classes whose probe runs out of budget become ``hard``.  A solution is
    surfaced at once.  With ``total_nodes`` the loop stops once that many
    nodes have been spent; untouched classes stay ``open``.
    """
    report = ExclusionReport([])
    for cl in state.classes:
        if cl.status not in statuses:
            continue
        if total_nodes is not None and state.nodes_spent >= total_nodes:
            report.stopped_on_budget = True
            break
        if deadline is not None and time.perf_counter() >= deadline:
            report.stopped_on_budget = True
            break
        probe_budget = budget
        if total_nodes is not None:
            left = total_nodes - state.nodes_spent
            probe_budget = Budget(min(budget.nodes or left, left), budget.seconds)
        rep = cl.representative
        out = solve(state.current_instance([rep]), probe_budget, want_all=False)
        state.nodes_spent += out.nodes_visited
        report.probes.append(Probe(cl.class_id, rep, out.status, out.nodes_visited))
        if out.status == FOUND:
            cl.status = "solution"
            state.solutions.extend(out.solutions)
            state.ledger.add(f"class {cl.class_id} solution {','.join(map(str, out.solutions[0]))}")
            report.solution = out.solutions[0]
            return report
        if out.status == EXHAUSTED:
            _exclude_class(state, cl, "excluded-by-class")
            state.ledger.add(f"class {cl.class_id} excluded")
        else:
            cl.status = "hard"
            state.ledger.add(f"class {cl.class_id} hard")
    return report


# -------------------------------------------------------------- pair fixing


def stabilizer_members(state: CampaignState, col: int) -> list[int]:
    """Positions in N of the elements fixing column ``col`` (as a G-orbit)."""
    img = propagate_index(state.N, state.perms, col)
    return [e for e, j in enumerate(img) if j == col]


def pair_fixing(state: CampaignState, hard_class: ClassInfo) -> list[PairTask]:
    """One task per stabilizer-class of eligible partners of the class representative."""
    anchor = hard_class.representative
    members = stabilizer_members(state, anchor)
    eligible = [
        c for c in range(len(state.km.cols)) if c != anchor and c not in state.excluded and c not in state.forced
    ]
    tasks = []
    for sid, cls in enumerate(subgroup_classes(state.N, members, state.perms, eligible)):
        tasks.append(PairTask(anchor, cls[0], sid, cls))
    return tasks


@dataclass
class PairReport:
    class_id: int
    tasks: list[PairTask]
    stabilizer_order: int
    jobs_run: int = 0
    solution: tuple[int, ...] | None = None
    resolved: bool = False


def _only_anchor_solution(state: CampaignState, anchor: int) -> tuple[int, ...] | None:
    chosen = sorted(set(state.forced) | {anchor})
    return tuple(chosen) if state.inst.is_exact_cover(chosen) else None


def resolve_hard_class(
    state: CampaignState,
    cl: ClassInfo,
    budget: Budget,
    split_level: int = 3,
    job_budget: Budget | None = None,
    workers: int = 1,
    max_jobs: int | None = None,
    checkpoint_dir=None,
) -> PairReport:
    """Pair-fix a hard class; split pair problems that exceed ``budget`` into jobs.

    The class is excluded only when every pair task (and every job of every
    split task) ends in exhausted-no-solution.
    """
    tasks = pair_fixing(state, cl)
    members = stabilizer_members(state, cl.representative)
    report = PairReport(cl.class_id, tasks, len(members))
    solo = _only_anchor_solution(state, cl.representative)
    if solo is not None:
        state.solutions.append(solo)
        state.ledger.add(f"class {cl.class_id} solution {','.join(map(str, solo))}")
        report.solution = solo
        return report
    all_done = True
    for task in tasks:
        a, b = task.anchor_column, task.partner_column
        inst = state.current_instance([a, b])
        out = solve(inst, budget, want_all=False)
        state.nodes_spent += out.nodes_visited
        if out.status == FOUND:
            task.status = "solution"
            state.solutions.extend(out.solutions)
            state.ledger.add(f"pair {a},{b} solution {','.join(map(str, out.solutions[0]))}")
            report.solution = out.solutions[0]
            return report
        if out.status == EXHAUSTED:
            task.status = "excluded"
            state.ledger.add(f"pair {a},{b} excluded")
            continue
        split = split_prefixes(inst, split_level)
        jobs = split.jobs if max_jobs is None else split.jobs[:max_jobs]
        state.ledger.add(f"pair {a},{b} split {len(split.jobs)} jobs")
        ckpt = None if checkpoint_dir is None else os.path.join(checkpoint_dir, f"pair_{a}_{b}.ckpt")
        agg = run_jobs(inst, jobs, workers, job_budget, checkpoint=ckpt, ledger=state.ledger)
        report.jobs_run += len(jobs)
        state.nodes_spent += agg.outcome.nodes_visited + split.prefix_nodes
        if agg.outcome.status == FOUND:
            task.status = "solution"
            state.solutions.extend(agg.outcome.solutions)
            report.solution = agg.outcome.solutions[0]
            state.ledger.add(f"pair {a},{b} solution {','.join(map(str, report.solution))}")
            return report
        if agg.outcome.status == EXHAUSTED and len(jobs) == len(split.jobs):
            task.status = "split-excluded"
            state.ledger.add(f"pair {a},{b} excluded")
        else:
            task.status = "hard"
            all_done = False
            state.ledger.add(f"pair {a},{b} hard")
    if all_done:
        how = "covered-by-hard-split" if any(t.status == "split-excluded" for t in tasks) else "excluded-by-pair"
        _exclude_class(state, cl, how)
        state.ledger.add(f"class {cl.class_id} excluded")
        report.resolved = True
    return report


# ------------------------------------------------------------------ job runs


@dataclass
class JobsReport:
    outcome: SolveOutcome
    per_job: dict[int, SolveOutcome]
    retries: int = 0


_WORKER_INST: ExactCoverInstance | None = None


def _init_worker(inst: ExactCoverInstance) -> None:
    global _WORKER_INST
    _WORKER_INST = inst


def _run_one(job: PrefixJob, budget: Budget | None, want_all: bool) -> tuple[int, SolveOutcome]:
    return job.job_id, solve_job(_WORKER_INST, job, budget, want_all)


def aggregate(per_job: dict[int, SolveOutcome], extra_nodes: int = 0) -> SolveOutcome:
    sols: list[tuple[int, ...]] = []
    nodes = extra_nodes
    wall = 0.0
    any_budget = False
    for jid in sorted(per_job):
        out = per_job[jid]
        sols.extend(out.solutions)
        nodes += out.nodes_visited
        wall += out.wall_time
        any_budget |= out.status == BUDGET or out.diagnostic.startswith("budget")
    if sols:
        status = FOUND
    elif any_budget:
        status = BUDGET
    else:
        status = EXHAUSTED
    return SolveOutcome(status, sols, nodes, wall)


def run_jobs(
    inst: ExactCoverInstance,
    jobs: Sequence[PrefixJob],
    workers: int = 1,
    budget: Budget | None = None,
    want_all: bool = True,
    checkpoint=None,
    ledger: Ledger | None = None,
    retries: int = 2,
) -> JobsReport:
    """Run prefix jobs on a work queue; aggregate deterministically by job id.

    Finished jobs are appended to ``checkpoint`` as they complete, and jobs
    already present there are skipped, so an interrupted run resumes.  A job
    whose worker fails is re-queued up to ``retries`` times.
    """
    ids = [j.job_id for j in jobs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate job ids")
    done: dict[int, SolveOutcome] = {}
    if checkpoint is not None and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            done = parse_outcomes(fh.read())
        unknown = set(done) - set(ids)
        if unknown:
            raise ValueError(f"checkpoint holds unknown jobs {sorted(unknown)[:5]}")
    pending = [j for j in jobs if j.job_id not in done]
    attempts: dict[int, int] = {}
    n_retries = 0

    def record(jid: int, out: SolveOutcome) -> None:
        if jid in done:
            raise RuntimeError(f"job {jid} completed twice")
        done[jid] = out
        if checkpoint is not None:
            with open(checkpoint, "a") as fh:
                fh.write(format_outcome(jid, out))
        if ledger is not None:
            ledger.add(f"job {jid} done")

    while pending:
        failed: list[PrefixJob] = []
        if workers <= 1:
            _init_worker(inst)
            for job in pending:
                try:
                    jid, out = _run_one(job, budget, want_all)
                except Exception:
                    log.exception("job %d failed", job.job_id)
                    failed.append(job)
                    continue
                record(jid, out)
        else:
            with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(inst,)) as pool:
                futures = {pool.submit(_run_one, job, budget, want_all): job for job in pending}
                for fut, job in futures.items():
                    try:
                        jid, out = fut.result()
                    except (BrokenProcessPool, Exception):
                        log.warning("job %d lost its worker; re-queueing", job.job_id)
                        failed.append(job)
                        continue
                    record(jid, out)
        for job in failed:
            attempts[job.job_id] = attempts.get(job.job_id, 0) + 1
            if attempts[job.job_id] > retries:
                raise RuntimeError(f"job {job.job_id} failed {attempts[job.job_id]} times")
        n_retries += len(failed)
        pending = failed
    return JobsReport(aggregate(done), done, n_retries)


# ------------------------------------------------------------------ config


@dataclass
class CampaignConfig:
    group: str
    normalizer: str | None = None
    v: int = 7
    t: int = 2
    k: int = 3
    lam: int = 1
    probe_nodes: int | None = 100_000
    probe_seconds: float | None = None
    total_nodes: int | None = None
    total_seconds: float | None = None
    split_level: int = 3
    job_nodes: int | None = None
    max_jobs: int | None = None
    workers: int = 1
    force_fixed_blocks: bool = False
    pair_fixing: bool = True
    ledger: str | None = None


_INT_KEYS = {"v", "t", "k", "lam", "probe_nodes", "total_nodes", "split_level", "job_nodes", "max_jobs", "workers"}
_BOOL_KEYS = {"force_fixed_blocks", "pair_fixing"}
_ALIASES = {"lambda": "lam", "normalizer_file": "normalizer", "group_file": "group"}


def parse_config(text: str) -> CampaignConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, ``none`` clears a value."""
    kv: dict = {}
    fields = set(CampaignConfig.__dataclass_fields__)
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected 'key = value'")
        key, _, val = (s.strip() for s in line.partition("="))
        key = _ALIASES.get(key, key)
        if key not in fields:
            raise ValueError(f"config line {n}: unknown key {key!r}")
        kv[key] = _coerce(key, val)
    if "group" not in kv:
        raise ValueError("config needs a 'group' entry")
    return CampaignConfig(**kv)


def _coerce(key: str, val: str):
    if val.lower() in ("none", ""):
        return None
    if key in _INT_KEYS:
        return int(val.replace("_", ""))
    if key in _BOOL_KEYS:
        if val.lower() not in ("1", "0", "true", "false", "yes", "no"):
            raise ValueError(f"{key} must be a boolean")
        return val.lower() in ("1", "true", "yes")
    if key in ("probe_seconds", "total_seconds"):
        return float(val)
    return val


# -------------------------------------------------------------- full driver


@dataclass
class CampaignResult:
    state: CampaignState
    exclusion: list[ExclusionReport]
    pairs: list[PairReport]

    @property
    def solutions(self) -> list[tuple[int, ...]]:
        return self.state.solutions

    def conclusion(self) -> str:
        if self.state.solutions:
            return "solution"
        if all(c.status in ("excluded", "forced") for c in self.state.classes):
            return "no-solution"
        return "open"


def run_campaign(
    state: CampaignState,
    probe: Budget,
    total_nodes: int | None = None,
    pair_fixing_enabled: bool = True,
    split_level: int = 3,
    job_budget: Budget | None = None,
    workers: int = 1,
    max_jobs: int | None = None,
    checkpoint_dir=None,
    total_seconds: float | None = None,
) -> CampaignResult:
    """Exclusion loop, then pair fixing on each hard class, re-probing the rest after each success.

    ``total_nodes`` and ``total_seconds`` cap the whole run; they are checked
    between probes and between hard classes, so a single probe or task may
    overrun them by its own budget.
    """
    deadline = None if total_seconds is None else time.perf_counter() + total_seconds
    result = CampaignResult(state, [], [])
    rep = exclusion_loop(state, probe, total_nodes, deadline=deadline)
    result.exclusion.append(rep)
    if rep.solution is not None or not pair_fixing_enabled:
        return result
    if rep.stopped_on_budget:
        return result
    while True:
        hard = [c for c in state.classes if c.status == "hard"]
        if not hard:
            break
        if total_nodes is not None and state.nodes_spent >= total_nodes:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        pr = resolve_hard_class(state, hard[0], probe, split_level, job_budget, workers, max_jobs, checkpoint_dir)
        result.pairs.append(pr)
        if pr.solution is not None or not pr.resolved:
            break
        rep = exclusion_loop(state, probe, total_nodes, statuses=("hard",), deadline=deadline)
        result.exclusion.append(rep)
        if rep.solution is not None:
            break
    return result
