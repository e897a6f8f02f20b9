"""Class structure, exclusion probes and pair-task counts for G31 under its normalizer.

Builds the filtered KM matrix, forces the 21 type-1 fixed blocks, probes each
normalizer class with a node budget, and counts the pair-fixing tasks of
every class that stays hard.  Nothing is split or run to completion.
"""

import argparse
import time

from qsteiner import known
from qsteiner.campaign import build_campaign, exclusion_loop, pair_fixing, stabilizer_members
from qsteiner.group import closure
from qsteiner.km import build_km_matrix, filter_lambda1
from qsteiner.solver import Budget
from qsteiner.theory import DesignParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--probe-nodes", type=int, default=20_000)
    args = ap.parse_args()
    t0 = time.perf_counter()
    G = closure([known.g31()])
    N = closure(known.normalizer_g31_generators())
    m = filter_lambda1(build_km_matrix(G, DesignParams.sts(7)))
    state = build_campaign(m, G, N, force_fixed_blocks=True)
    print(f"|G| = {G.order}, |N| = {N.order}, KM {m.shape[0]} x {m.shape[1]}")
    for cl in state.classes:
        print(f"class {cl.class_id}: {len(cl.columns)} columns, rep {cl.representative}, {cl.status}")
    rep = exclusion_loop(state, Budget(args.probe_nodes))
    for p in rep.probes:
        print(f"probe class {p.class_id}: {p.status} after {p.nodes} nodes")
    for cl in state.classes:
        if cl.status != "hard":
            continue
        tasks = pair_fixing(state, cl)
        stab = len(stabilizer_members(state, cl.representative))
        print(f"class {cl.class_id} (size {len(cl.columns)}): stabilizer order {stab}, {len(tasks)} pair tasks")
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
