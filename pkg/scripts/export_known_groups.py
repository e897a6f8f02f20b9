"""Write the v=7 groups, the G31 normalizer, sample configs and the trivial STS(3) to data/."""

import argparse
from pathlib import Path

from qsteiner import known
from qsteiner.gf2 import span
from qsteiner.group import identity, save_group
from qsteiner.km import format_design

CONFIGS = {
    "g31.cfg": """# force-then-exclude campaign for G31 with its normalizer of order 362880
group = g31.grp
normalizer = n31.grp
v = 7
t = 2
k = 3
lambda = 1
force_fixed_blocks = true
probe_nodes = 200000
split_level = 3
job_nodes = 100000
max_jobs = 4
workers = 1
""",
    "g4_smoke.cfg": """# bounded smoke run on G4; no normalizer is supplied, so classes are single G-orbits
group = g4.grp
v = 7
t = 2
k = 3
lambda = 1
probe_nodes = 200
total_nodes = 40000
split_level = 3
workers = 1
""",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_group(out / "g2.grp", [known.g2()])
    save_group(out / "g31.grp", [known.g31()])
    save_group(out / "g32.grp", [known.g32()])
    save_group(out / "g4.grp", [known.g4()])
    save_group(out / "n31.grp", known.normalizer_g31_generators())
    save_group(out / "trivial3.grp", [identity(3)])
    (out / "trivial_sts3.blocks").write_text(format_design([span([1, 2, 4], 3)]))
    for name, text in CONFIGS.items():
        (out / name).write_text(text)
    print("wrote", ", ".join(sorted(p.name for p in out.iterdir())))


if __name__ == "__main__":
    main()
