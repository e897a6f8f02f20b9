"""Job counts of the G4 search tree at several split levels, plus a tree-size estimate."""

import argparse
import time

from qsteiner import known
from qsteiner.campaign import km_instance
from qsteiner.group import closure
from qsteiner.km import build_km_matrix, filter_lambda1
from qsteiner.solver import estimate_tree_size, split_prefixes
from qsteiner.theory import DesignParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--probes", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    m = filter_lambda1(build_km_matrix(closure([known.g4()]), DesignParams.sts(7)))
    inst = km_instance(m)
    print(f"KM {m.shape[0]} x {m.shape[1]}")
    for level in args.levels:
        t0 = time.perf_counter()
        split = split_prefixes(inst, level)
        print(f"level {level}: {len(split.jobs)} jobs, {split.prefix_nodes} prefix nodes ({time.perf_counter() - t0:.1f}s)")
    est = estimate_tree_size(inst, args.probes, args.seed)
    print(f"estimated nodes {est.mean:.3g} +- {est.stderr:.2g} ({est.probes} probes, seed {est.seed})")


if __name__ == "__main__":
    main()
