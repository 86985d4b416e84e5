"""Regenerate the explorer's golden fixtures.

Runs the real CLI twice (one SPU search, one RSU search, each with a
baseline attached), merges the bundles, and freezes the merged pool under
frontend/tests/fixtures/ together with reference rankings for a batch of
weight vectors. Every expected xi value is taken verbatim from
``ankleopt rank --out`` so the browser tests compare against exactly what
the command line produces.

Usage: python3 scripts/make_golden_fixture.py
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from ankleopt.cli import main
from ankleopt.io import load_bundle, merge_bundles, save_bundle

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

SEED = 20250825
N_RANDOM_VECTORS = 20

# small but real searches: big enough for varied fronts, fast enough to rerun
POP = 16
GENERATIONS = 8

JOBS = [
    ("spu", "lin-ball-160", DATA / "baselines" / "serial_incumbent.json"),
    ("rsu", "rot-harmonic-90", DATA / "baselines" / "reference_rsu.json"),
]


def run_cli(argv) -> None:
    argv = [str(a) for a in argv]
    rc = main(argv)
    if rc != 0:
        raise SystemExit(f"ankleopt {' '.join(argv)} exited with {rc}")


def weight_vectors(rng) -> list[np.ndarray]:
    vectors = [np.full(7, 1.0 / 7.0)]
    for _ in range(N_RANDOM_VECTORS):
        raw = rng.uniform(0.0, 1.0, size=7)
        vectors.append(raw / raw.sum())
    return vectors


def build_bundle(tmp: Path) -> Path:
    parts = []
    for arch, actuator, baseline in JOBS:
        out = tmp / f"{arch}.json"
        run_cli([
            "optimize", "--arch", arch, "--actuator", actuator,
            "--catalog", DATA / "catalog.json",
            "--regions", DATA / "regions.toml",
            "--tasks", DATA / "tasks",
            "--pop", POP, "--generations", GENERATIONS, "--seed", 7,
            "--baseline", baseline,
            "--out", out,
        ])
        parts.append(load_bundle(out))
    merged = merge_bundles(parts)
    bundle_path = FIXTURES / "golden_bundle.json"
    save_bundle(merged, bundle_path)
    return bundle_path


def rank_cases(tmp: Path, bundle_path: Path, vectors) -> list[dict]:
    cases = []
    for k, vec in enumerate(vectors):
        out = tmp / f"rank_{k:02d}.json"
        run_cli([
            "rank", "--bundle", bundle_path,
            "--weights", ",".join(repr(float(w)) for w in vec),
            "--out", out, "--top", 0,
        ])
        doc = json.loads(out.read_text())
        cases.append({
            "weights": doc["weights"],
            "order": [row["id"] for row in doc["ranking"]],
            "xi": {row["id"]: row["xi"] for row in doc["ranking"]},
        })
    return cases


def main_script() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        bundle_path = build_bundle(tmp)
        cases = rank_cases(tmp, bundle_path, weight_vectors(rng))
    expected = {
        "bundle": bundle_path.name,
        "generator": "scripts/make_golden_fixture.py",
        "seed": SEED,
        "cases": cases,
    }
    out = FIXTURES / "golden_rankings.json"
    out.write_text(json.dumps(expected, indent=2) + "\n")
    n = len(json.loads(bundle_path.read_text())["candidates"])
    print(f"wrote {bundle_path} ({n} candidates) and {out} ({len(cases)} cases)")
    return 0


if __name__ == "__main__":
    sys.exit(main_script())
