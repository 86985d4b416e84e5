#!/usr/bin/env python3
"""Full demonstration pipeline on the bundled data.

Optimizes both architectures against the synthetic tasks, merges the pools
with the shipped baselines, and prints the cross-architecture ranking under
uniform weights. Writes bundles and the ranking into ``out/`` (or --out).

This is the long-form version of the end-to-end smoke acceptance check;
expect a few minutes at the default population and generation counts.
"""

import argparse
import sys
import time
from pathlib import Path

from ankleopt.cli import main as cli

ROOT = Path(__file__).parent.parent
DATA = ROOT / "data"


def run(args) -> int:
    code = cli(args)
    if code != 0:
        print(f"step failed with exit code {code}: {' '.join(args)}",
              file=sys.stderr)
    return code


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=ROOT / "out")
    parser.add_argument("--pop", type=int, default=60)
    parser.add_argument("--generations", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    # the baselines ride along in one bundle; merging rejects duplicate ids
    jobs = [("spu", "lin-ball-160", ()), ("spu", "lin-roller-140", ()),
            ("rsu", "rot-harmonic-90",
             (DATA / "baselines" / "reference_rsu.json",
              DATA / "baselines" / "serial_incumbent.json")),
            ("rsu", "rot-planetary-60", ())]
    bundles = []
    for arch, actuator, baselines in jobs:
        out = args.out / f"bundle_{arch}_{actuator}.json"
        cmd = ["optimize", "--arch", arch,
               "--catalog", str(DATA / "catalog.json"),
               "--actuator", actuator,
               "--regions", str(DATA / "regions.toml"),
               "--tasks", str(DATA / "tasks"),
               "--out", str(out),
               "--pop", str(args.pop),
               "--generations", str(args.generations),
               "--seed", str(args.seed)]
        for b in baselines:
            cmd += ["--baseline", str(b)]
        code = run(cmd)
        if code != 0:
            return code
        bundles.append(out)

    rank_args = ["rank", "--out", str(args.out / "ranking.json"), "--top", "15"]
    for b in bundles:
        rank_args += ["--bundle", str(b)]
    code = run(rank_args)
    print(f"total {time.perf_counter() - start:.1f} s; outputs in {args.out}",
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
