import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_covers
from qsteiner.solver import (
    BUDGET,
    EXHAUSTED,
    FOUND,
    Budget,
    ExactCoverInstance,
    InstanceError,
    PrefixJob,
    SolveOutcome,
    estimate_tree_size,
    format_jobs,
    format_outcome,
    iter_prefixes,
    parse_jobs,
    parse_outcomes,
    random_instance,
    solve,
    solve_job,
    split_prefixes,
)


@st.composite
def instances(draw, max_rows=12, max_cols=16):
    seed = draw(st.integers(0, 2**32))
    rng = random.Random(seed)
    n_rows = draw(st.integers(1, max_rows))
    n_cols = draw(st.integers(1, max_cols))
    density = draw(st.sampled_from([0.15, 0.25, 0.4]))
    return random_instance(rng, n_rows, n_cols, density, planted=draw(st.booleans()))


@st.composite
def constrained(draw):
    inst = draw(instances())
    ids = [c for c, _ in inst.columns]
    forced = draw(st.sets(st.sampled_from(ids), max_size=2))
    excluded = draw(st.sets(st.sampled_from(ids), max_size=3)) - forced
    return inst.with_constraints(forced, excluded)


def _oracle(inst):
    return exact_covers(inst.n_rows, list(inst.columns), inst.forced, inst.excluded)


def test_tiny_examples():
    inst = ExactCoverInstance.from_sets(3, [{0, 1}, {2}, {0}, {1, 2}])
    out = solve(inst)
    assert out.status == FOUND
    assert sorted(out.solutions) == [(0, 1), (2, 3)]
    none = ExactCoverInstance.from_sets(2, [{0}, {0, 1}]).with_constraints(excluded=[1])
    assert solve(none).status == EXHAUSTED


@settings(max_examples=150)
@given(instances())
def test_matches_oracle(inst):
    out = solve(inst)
    assert sorted(out.solutions) == _oracle(inst)
    assert out.status == (FOUND if out.solutions else EXHAUSTED)
    assert all(inst.is_exact_cover(s) for s in out.solutions)


@settings(max_examples=150)
@given(constrained())
def test_matches_oracle_with_constraints(inst):
    out = solve(inst)
    assert sorted(out.solutions) == _oracle(inst)
    for s in out.solutions:
        assert inst.forced <= set(s) and not inst.excluded & set(s)


@settings(max_examples=50)
@given(instances())
def test_first_solution_mode(inst):
    first = solve(inst, want_all=False)
    full = solve(inst)
    assert len(first.solutions) == min(1, len(full.solutions))
    if first.solutions:
        assert first.solutions[0] in full.solutions
    assert first.nodes_visited <= full.nodes_visited


def test_forced_conflict():
    inst = ExactCoverInstance.from_sets(3, [{0, 1}, {1, 2}, {2}], forced=[0, 1])
    out = solve(inst)
    assert out.status == EXHAUSTED and out.nodes_visited == 0 and out.diagnostic


def test_budget_status():
    rng = random.Random(0)
    inst = random_instance(rng, 40, 120, 0.08, planted=False)
    out = solve(inst, Budget(nodes=5))
    assert out.status in (BUDGET, FOUND)
    assert out.nodes_visited <= 5
    if out.status == BUDGET:
        assert out.diagnostic and not out.solutions


def test_budget_keeps_found_solutions():
    # 2^6 solutions: six independent rows each coverable two ways
    cols = [{r} for r in range(6) for _ in range(2)]
    inst = ExactCoverInstance.from_sets(6, cols)
    full = solve(inst)
    assert len(full.solutions) == 64
    part = solve(inst, Budget(nodes=20))
    assert part.status == FOUND and 0 < len(part.solutions) < 64


def test_seconds_budget():
    rng = random.Random(1)
    inst = random_instance(rng, 60, 300, 0.05, planted=False)
    out = solve(inst, Budget(seconds=0.05))
    assert out.status in (BUDGET, FOUND, EXHAUSTED)
    assert out.wall_time < 2


def test_instance_validation():
    with pytest.raises(InstanceError):
        ExactCoverInstance(2, ((0, ()),))
    with pytest.raises(InstanceError):
        ExactCoverInstance(2, ((0, (5,)),))
    with pytest.raises(InstanceError):
        ExactCoverInstance(2, ((0, (1,)), (0, (0,))))
    with pytest.raises(InstanceError):
        ExactCoverInstance(2, ((0, (1, 1)),))
    with pytest.raises(InstanceError):
        ExactCoverInstance(2, ((0, (1,)),), forced=frozenset({3}))
    with pytest.raises(InstanceError):
        ExactCoverInstance(2, ((0, (1,)),), forced=frozenset({0}), excluded=frozenset({0}))


def test_deterministic_node_counts():
    inst = random_instance(random.Random(7), 14, 30, 0.2)
    a, b = solve(inst), solve(inst)
    assert a.nodes_visited == b.nodes_visited and a.solutions == b.solutions


@settings(max_examples=80)
@given(instances(), st.integers(1, 5))
def test_split_node_accounting(inst, level):
    mono = solve(inst)
    split = split_prefixes(inst, level)
    outs = [solve_job(inst, job) for job in split.jobs]
    assert split.prefix_nodes + sum(o.nodes_visited for o in outs) == mono.nodes_visited
    sols = sorted(s for o in outs for s in o.solutions)
    assert sols == sorted(mono.solutions)
    paths = [j.path for j in split.jobs]
    assert len(set(paths)) == len(paths)
    assert [j.job_id for j in split.jobs] == list(range(len(split.jobs)))


@settings(max_examples=40)
@given(instances(), st.integers(1, 3), st.integers(1, 3))
def test_nested_split(inst, l1, l2):
    split = split_prefixes(inst, l1)
    for job in split.jobs[:3]:
        whole = solve_job(inst, job)
        sub = split_prefixes(inst, l2, root=job.path)
        parts = [solve(inst, path=j.path) for j in sub.jobs]
        assert sub.prefix_nodes + sum(p.nodes_visited for p in parts) == whole.nodes_visited


def test_lazy_prefixes_match_eager():
    inst = random_instance(random.Random(2), 16, 40, 0.2)
    walk = iter_prefixes(inst, 3)
    lazy = list(walk)
    eager = split_prefixes(inst, 3)
    assert lazy == eager.jobs and walk.prefix_nodes == eager.prefix_nodes


def test_bad_path_is_an_error():
    inst = ExactCoverInstance.from_sets(3, [{0, 1}, {2}, {0}, {1, 2}])
    with pytest.raises(InstanceError):
        solve(inst, path=((2, 1),))
    with pytest.raises(InstanceError):
        solve(inst, path=((0, 1),))
    with pytest.raises(ValueError):
        split_prefixes(inst, 0)


def test_job_file_round_trip():
    jobs = [PrefixJob(0, ((3, 5), (1, 2)), frozenset({7, 9})), PrefixJob(1, (), frozenset())]
    text = format_jobs(jobs)
    assert text == "job 0 path 3:5,1:2 exclude 7,9\njob 1 path - exclude -\n"
    assert parse_jobs(text) == jobs
    with pytest.raises(ValueError):
        parse_jobs("job 0 path 1:2\n")


def test_outcome_file_round_trip():
    outs = {0: SolveOutcome(FOUND, [(1, 4), (2, 3)], 17, 0.0), 3: SolveOutcome(EXHAUSTED, [], 5, 0.0)}
    text = "".join(format_outcome(j, o) for j, o in outs.items())
    back = parse_outcomes(text)
    assert {j: (o.status, o.solutions, o.nodes_visited) for j, o in back.items()} == {
        j: (o.status, o.solutions, o.nodes_visited) for j, o in outs.items()
    }
    with pytest.raises(ValueError):
        parse_outcomes(text + format_outcome(0, outs[0]))


def test_estimator_exact_on_deterministic_tree():
    # each row lies in a single column: the tree is a path
    inst = ExactCoverInstance.from_sets(4, [{0}, {1, 2}, {3}])
    est = estimate_tree_size(inst, 50, seed=1)
    assert est.mean == solve(inst).nodes_visited
    assert est.stderr == 0


def test_estimator_reproducible_and_unbiased_enough():
    inst = random_instance(random.Random(4), 12, 24, 0.25)
    a = estimate_tree_size(inst, 2000, seed=9)
    b = estimate_tree_size(inst, 2000, seed=9)
    assert a == b
    true = solve(inst).nodes_visited
    assert abs(a.mean - true) <= 5 * a.stderr + 1e-9


def test_estimator_forced_conflict():
    inst = ExactCoverInstance.from_sets(2, [{0, 1}, {1}], forced=[0, 1])
    assert estimate_tree_size(inst, 10).mean == 0.0
    with pytest.raises(ValueError):
        estimate_tree_size(inst, 0)


def test_g4_split_levels(g4_km):
    from qsteiner.campaign import km_instance

    inst = km_instance(g4_km)
    counts = [len(split_prefixes(inst, level).jobs) for level in (3, 8)]
    assert counts == [12, 192]
