#!/usr/bin/env python3
"""Regenerate the bundled baseline candidates (data/baselines/*.json).

Two baselines anchor every ranking pool:

* ``reference-rsu`` - the engineered crank-driven design shipped in
  data/designs/reference_rsu.json, evaluated with the bundled metric
  pipeline and the rot-harmonic-90 actuator.
* ``serial-incumbent`` - a conventional serial pitch/roll gearmotor stack;
  its numbers are catalog-style estimates (direct drive has symmetric
  speed everywhere, high reflected inertia, tall motor stack), not outputs
  of this toolkit.
"""

import argparse
import json
from pathlib import Path

from ankleopt.io import load_catalog, load_design, load_regions
from ankleopt.metrics import METRIC_NAMES, ankle_metrics, build_weight_map

SERIAL_INCUMBENT = {
    "id": "serial-incumbent",
    "arch": "serial",
    "actuator": "stacked-gearmotors",
    "metrics": {
        "speed": 7.2,
        "torque": 55.0,
        "backdriving_torque": 18.0,
        "manipulability": 1.0,
        "compactness": 95.0,
        "actuation_mass": 2.1,
        "com_height": 160.0,
    },
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    root = Path(__file__).parent.parent
    parser.add_argument("--out", default=root / "data" / "baselines", type=Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    design = load_design(root / "data" / "designs" / "reference_rsu.json")
    params = design.mechanism()
    cfg = load_regions(root / "data" / "regions.toml")
    actuator = load_catalog(root / "data" / "catalog.json")["rot-harmonic-90"]
    wmap = build_weight_map(cfg.core, cfg.operational)
    m = ankle_metrics("rsu", params, actuator, wmap, cfg.ground_offset)

    reference = {
        "id": "reference-rsu",
        "arch": "rsu",
        "actuator": actuator.name,
        "metrics": {name: m.value(name) for name in METRIC_NAMES},
    }
    for doc, name in ((reference, "reference_rsu.json"),
                      (SERIAL_INCUMBENT, "serial_incumbent.json")):
        path = args.out / name
        path.write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {path}")
    print(json.dumps(reference["metrics"], indent=2))


if __name__ == "__main__":
    main()
