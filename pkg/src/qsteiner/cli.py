"""Command-line entry point: ``qsteiner <command> ...`` or ``python -m qsteiner``.

Exit codes: 0 success, 1 mathematical negative (no solution, invalid design,
non-normalizing group), 2 usage or input error.  Every command that writes
files also writes ``<output>.manifest.json`` recording argv, seeds, input and
output digests and versions; ``qsteiner --replay <manifest>`` re-runs it and
checks the outputs are bit-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import random
import sys
import time
from pathlib import Path

from . import __version__
from .gf2 import DimensionMismatch, SingularMatrix
from .group import MatrixGroup, NotNormalizing, closure, is_normalizing, load_group
from .theory import DesignParams, format_theory_table, theory_rows

log = logging.getLogger("qsteiner")

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- manifest


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, argv, inputs, outputs, seed=None, extra=None) -> None:
    import numpy

    data = {
        "argv": list(argv),
        "cwd": os.getcwd(),
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
        "versions": {"qsteiner": __version__, "python": platform.python_version(), "numpy": numpy.__version__},
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        data.update(extra)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def replay(manifest_path) -> int:
    with open(manifest_path) as fh:
        data = json.load(fh)
    here = os.getcwd()
    os.chdir(data["cwd"])
    try:
        code = main(data["argv"])
        bad = [p for p, digest in data["outputs"].items() if not os.path.exists(p) or _sha256(p) != digest]
    finally:
        os.chdir(here)
    if bad:
        print("outputs differ from the manifest: " + ", ".join(bad), file=sys.stderr)
        return EXIT_NEGATIVE
    print(f"reproduced {len(data['outputs'])} output file(s)")
    return code


# ------------------------------------------------------------------ helpers


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _group(path) -> MatrixGroup:
    gens = load_group(path)
    return MatrixGroup(tuple(gens), gens[0].ncols)


def _budget(args):
    from .solver import Budget

    return Budget(args.budget_nodes, args.budget_seconds)


def _load_km(path, group_path=None):
    from .km import load_km

    group = _group(group_path) if group_path else None
    return load_km(path, group)


def _tally(items) -> str:
    counts: dict = {}
    for x in items:
        counts[x] = counts.get(x, 0) + 1
    return " ".join(f"{k}x{n}" for k, n in counts.items())


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(x) for x in text.split(",") if x.strip()]


# ----------------------------------------------------------------- commands


def cmd_theory_table(args, argv) -> int:
    rows = theory_rows(args.v, include_excluded=not args.remaining)
    _emit(format_theory_table(rows), args.out)
    if args.out:
        write_manifest(args.out + ".manifest.json", argv, [], [args.out])
    return EXIT_OK


def cmd_orbits(args, argv) -> int:
    from .action import format_orbits, orbit_partition

    gens = load_group(args.group)
    G = closure(gens)
    v = gens[0].ncols
    orbits = orbit_partition(v, args.k, G)
    _emit(format_orbits(orbits), args.out)
    if args.out:
        write_manifest(args.out + ".manifest.json", argv, [args.group], [args.out], extra={"group_order": G.order})
    else:
        print(f"# {len(orbits)} orbits, group order {G.order}", file=sys.stderr)
    return EXIT_OK


def cmd_km(args, argv) -> int:
    from .km import build_km_matrix, filter_lambda1, save_km

    gens = load_group(args.group)
    if gens[0].ncols != args.v:
        raise UsageError(f"group acts on GF(2)^{gens[0].ncols}, but --v {args.v} was given")
    G = closure(gens)
    p = DesignParams(args.t, args.v, args.k, args.lam)
    m = build_km_matrix(G, p, check_samples=args.check_samples, seed=args.seed)
    if args.filter:
        m = filter_lambda1(m)
    save_km(args.out, m)
    r, c = m.shape
    print(f"KM matrix {r} x {c} (group order {G.order}, filtered={int(m.filtered)}) -> {args.out}")
    outs = [args.out, args.out + ".rows", args.out + ".cols"]
    write_manifest(args.out + ".manifest.json", argv, [args.group], outs, seed=args.seed)
    return EXIT_OK


def cmd_solve(args, argv) -> int:
    from .campaign import km_instance
    from .km import assemble_design, format_design, selection_from_columns, verify_design
    from .solver import EXHAUSTED, FOUND, format_outcome, solve

    m = _load_km(args.km, args.group)
    inst = km_instance(m).with_constraints(forced=_int_list(args.force), excluded=_int_list(args.exclude))
    out = solve(inst, _budget(args), want_all=not args.first)
    text = format_outcome(0, out)
    _emit(text, args.out)
    print(f"status {out.status} nodes {out.nodes_visited} solutions {len(out.solutions)} time {out.wall_time:.2f}s", file=sys.stderr)
    if out.diagnostic:
        print(out.diagnostic, file=sys.stderr)
    outputs = [args.out] if args.out else []
    if args.design_out and out.solutions:
        if m.group is None:
            raise UsageError("--design-out needs --group to regenerate orbit members")
        d = assemble_design(m, selection_from_columns(m, out.solutions[0]))
        if not verify_design(d):
            raise AssertionError("solver returned a selection that is not a design")
        _emit(format_design(list(d.blocks)), args.design_out)
        outputs.append(args.design_out)
    if args.out:
        ins = [args.km] + ([args.group] if args.group else [])
        write_manifest(args.out + ".manifest.json", argv, ins, outputs, extra={"status": out.status})
    if out.status == FOUND:
        return EXIT_OK
    return EXIT_NEGATIVE if out.status == EXHAUSTED else EXIT_OK


def cmd_estimate(args, argv) -> int:
    from .campaign import km_instance
    from .solver import estimate_tree_size

    m = _load_km(args.km)
    inst = km_instance(m).with_constraints(forced=_int_list(args.force), excluded=_int_list(args.exclude))
    est = estimate_tree_size(inst, args.probes, args.seed)
    text = f"mean {est.mean:.6g} stderr {est.stderr:.6g} probes {est.probes} seed {est.seed}\n"
    _emit(text, args.out)
    if args.out:
        write_manifest(args.out + ".manifest.json", argv, [args.km], [args.out], seed=args.seed)
    return EXIT_OK


def cmd_split(args, argv) -> int:
    from .campaign import km_instance
    from .solver import format_jobs, split_prefixes

    m = _load_km(args.km)
    inst = km_instance(m).with_constraints(forced=_int_list(args.force), excluded=_int_list(args.exclude))
    split = split_prefixes(inst, args.level)
    _emit(format_jobs(split.jobs), args.out)
    print(f"level {args.level}: {len(split.jobs)} jobs, {split.prefix_nodes} prefix nodes", file=sys.stderr)
    if args.out:
        write_manifest(
            args.out + ".manifest.json",
            argv,
            [args.km],
            [args.out],
            extra={"jobs": len(split.jobs), "prefix_nodes": split.prefix_nodes, "level": args.level},
        )
    return EXIT_OK


def cmd_run(args, argv) -> int:
    from .campaign import km_instance, run_jobs
    from .solver import EXHAUSTED, format_outcome, parse_jobs

    m = _load_km(args.km)
    inst = km_instance(m).with_constraints(forced=_int_list(args.force), excluded=_int_list(args.exclude))
    with open(args.jobs) as fh:
        jobs = parse_jobs(fh.read())
    budget = _budget(args) if (args.budget_nodes or args.budget_seconds) else None
    rep = run_jobs(inst, jobs, args.workers, budget, want_all=not args.first, checkpoint=args.checkpoint)
    text = "".join(format_outcome(jid, rep.per_job[jid]) for jid in sorted(rep.per_job))
    _emit(text, args.out)
    agg = rep.outcome
    print(f"aggregate status {agg.status} nodes {agg.nodes_visited} solutions {len(agg.solutions)} jobs {len(jobs)}", file=sys.stderr)
    if args.out:
        write_manifest(args.out + ".manifest.json", argv, [args.km, args.jobs], [args.out], extra={"status": agg.status})
    return EXIT_NEGATIVE if agg.status == EXHAUSTED else EXIT_OK


def cmd_campaign(args, argv) -> int:
    from .campaign import Ledger, build_campaign, parse_config, run_campaign
    from .km import build_km_matrix, filter_lambda1
    from .solver import Budget

    cfg_path = Path(args.config)
    cfg = parse_config(cfg_path.read_text())
    for key in ("workers", "split_level", "probe_nodes", "probe_seconds", "total_nodes", "total_seconds"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)

    def resolve(p):
        return p if p is None or os.path.isabs(p) else str(cfg_path.parent / p)

    group_file, norm_file = resolve(cfg.group), resolve(cfg.normalizer)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ledger_path = out_dir / "ledger.txt"
    gens = load_group(group_file)
    if gens[0].ncols != cfg.v:
        raise UsageError(f"group acts on GF(2)^{gens[0].ncols}, config says v={cfg.v}")
    G = closure(gens)
    N = closure(load_group(norm_file)) if norm_file else G
    m = filter_lambda1(build_km_matrix(G, DesignParams(cfg.t, cfg.v, cfg.k, cfg.lam)))
    state = build_campaign(m, G, N, force_fixed_blocks=cfg.force_fixed_blocks, ledger=Ledger(ledger_path))
    job_budget = Budget(cfg.job_nodes) if cfg.job_nodes else None
    res = run_campaign(
        state,
        Budget(cfg.probe_nodes, cfg.probe_seconds),
        total_nodes=cfg.total_nodes,
        pair_fixing_enabled=cfg.pair_fixing,
        split_level=cfg.split_level,
        job_budget=job_budget,
        workers=cfg.workers,
        max_jobs=cfg.max_jobs,
        checkpoint_dir=str(out_dir),
        total_seconds=cfg.total_seconds,
    )
    lines = [
        f"group_order {G.order}",
        f"normalizer_order {N.order}",
        f"km {m.shape[0]} x {m.shape[1]}",
        f"classes {len(state.classes)}",
        "class_sizes " + _tally(len(c.columns) for c in state.classes),
        "class_status " + _tally(c.status for c in state.classes),
        "columns " + " ".join(f"{k}={v}" for k, v in state.census().items()),
        f"nodes {state.nodes_spent}",
        f"conclusion {res.conclusion()}",
    ]
    for sol in res.solutions:
        lines.append("solution " + " ".join(map(str, sol)))
    summary = out_dir / "summary.txt"
    summary.write_text("\n".join(lines) + "\n")
    classes = out_dir / "classes.txt"
    classes.write_text(
        "".join(f"class {c.class_id} size {len(c.columns)} rep {c.representative} {c.status}\n" for c in state.classes)
    )
    print("\n".join(lines))
    ins = [str(cfg_path), group_file] + ([norm_file] if norm_file else [])
    write_manifest(out_dir / "manifest.json", argv, ins, [str(summary), str(classes)], extra={"config": vars(cfg)})
    return EXIT_NEGATIVE if res.conclusion() == "no-solution" else EXIT_OK


def cmd_verify(args, argv) -> int:
    from .km import DesignCandidate, parse_design, verify_design

    with open(args.design) as fh:
        v, k, blocks = parse_design(fh.read())
    if k != args.k:
        raise UsageError(f"block file holds {k}-subspaces, --k {args.k} was given")
    d = DesignCandidate(frozenset(blocks), DesignParams(args.t, v, k, args.lam))
    rep = verify_design(d)
    hist = " ".join(f"{n}:{c}" for n, c in rep.histogram.items())
    text = f"{'valid' if rep.ok else 'invalid'} {args.t}-({v},{k},{args.lam}) design with {len(blocks)} blocks; coverage {hist}\n"
    _emit(text, args.out)
    if args.out:
        write_manifest(args.out + ".manifest.json", argv, [args.design], [args.out])
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_normalizer_check(args, argv) -> int:
    G = closure(load_group(args.group))
    N = closure(load_group(args.normalizer))
    gens_ok = all(is_normalizing(n, G) for n in N.generators)
    rng = random.Random(args.seed)
    sample = [N.elements[i] for i in rng.sample(range(len(N.elements)), min(args.samples, len(N.elements)))]
    bad = sum(1 for n in sample if not is_normalizing(n, G))
    ok = gens_ok and bad == 0
    text = (
        f"group_order {G.order}\nnormalizer_order {N.order}\n"
        f"generators_normalize {int(gens_ok)}\nsampled {len(sample)} failures {bad}\n"
    )
    if args.classes and ok:
        from .action import induced_orbits_on_orbits
        from .km import build_km_matrix, filter_lambda1

        m = build_km_matrix(G, DesignParams(args.t, G.v, args.k, args.lam))
        for label, mm in (("unfiltered", m), ("filtered", filter_lambda1(m) if args.lam == 1 else None)):
            if mm is None:
                continue
            sizes = sorted(len(c) for c in induced_orbits_on_orbits(N, mm.cols, G))
            text += f"classes_{label} {len(sizes)} columns {len(mm.cols)} sizes {_tally(sizes)}\n"
    text += f"result {'ok' if ok else 'not-normalizing'}\n"
    _emit(text, args.out)
    if args.out:
        write_manifest(args.out + ".manifest.json", argv, [args.group, args.normalizer], [args.out], seed=args.seed)
    return EXIT_OK if ok else EXIT_NEGATIVE


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qsteiner", description="Search tools for binary q-Steiner triple systems.", allow_abbrev=False
    )
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--replay", metavar="MANIFEST", help="re-run the command recorded in a manifest and compare outputs")
    ap.add_argument("--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    def budget_flags(p):
        p.add_argument("--budget-nodes", type=int, default=None)
        p.add_argument("--budget-seconds", type=float, default=None)

    def cover_flags(p):
        p.add_argument("--km", required=True, help="KM triplet file written by 'km'")
        p.add_argument("--force", help="comma-separated column ids to force")
        p.add_argument("--exclude", help="comma-separated column ids to exclude")
        p.add_argument("--out")

    p = sub.add_parser("theory-table", help="order-3 census table and type exclusions")
    p.add_argument("--v", type=int, nargs="+", default=[7, 9, 13])
    p.add_argument("--remaining", action="store_true", help="only types that are not excluded")
    p.add_argument("--out")
    p.set_defaults(func=cmd_theory_table)

    p = sub.add_parser("orbits", help="orbits of a group on k-subspaces")
    p.add_argument("--group", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("km", help="build a Kramer-Mesner matrix")
    p.add_argument("--group", required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--lambda", dest="lam", type=int, default=1)
    p.add_argument("--filter", action="store_true", help="drop columns with entries > 1 (lambda = 1 only)")
    p.add_argument("--check-samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_km)

    p = sub.add_parser("solve", help="exact-cover search on a KM matrix")
    cover_flags(p)
    budget_flags(p)
    p.add_argument("--first", action="store_true", help="stop at the first solution")
    p.add_argument("--group", help="group file, needed for --design-out")
    p.add_argument("--design-out", help="write the first solution as a block file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", help="Monte Carlo estimate of the search tree size")
    cover_flags(p)
    p.add_argument("--probes", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("split", help="split the search tree into prefix jobs")
    cover_flags(p)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("run", help="run prefix jobs on a worker pool")
    cover_flags(p)
    budget_flags(p)
    p.add_argument("--jobs", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", help="outcome file used to resume an interrupted run")
    p.add_argument("--first", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("campaign", help="normalizer exclusion loop with pair fixing")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--level", dest="split_level", type=int)
    p.add_argument("--budget-nodes", dest="probe_nodes", type=int, help="per-probe node budget")
    p.add_argument("--budget-seconds", dest="probe_seconds", type=float, help="per-probe time budget")
    p.add_argument("--total-nodes", type=int)
    p.add_argument("--total-seconds", type=float)
    p.add_argument("--seed", type=int, default=0, help="recorded in the manifest; the campaign itself is deterministic")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("verify", help="check a block file is a t-(v,k,lambda) design")
    p.add_argument("--design", required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--lambda", dest="lam", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("normalizer-check", help="enumerate N and check it normalizes G")
    p.add_argument("--group", required=True)
    p.add_argument("--normalizer", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classes", action="store_true", help="also count N-classes on k-orbits, before and after filtering")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--lambda", dest="lam", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalizer_check)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command is None and not args.replay:
        ap.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        if args.replay:
            return replay(args.replay)
        return args.func(args, argv)
    except (UsageError, ValueError, KeyError, DimensionMismatch, SingularMatrix, NotNormalizing, OSError) as exc:
        print(f"qsteiner {args.command or '--replay'}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
