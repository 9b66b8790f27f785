#!/usr/bin/env python3
"""Run every CLI command once on the flagship scenarios.

Writes the input files and reports under out/ and replays each JSON
report through the oracle command afterwards. Everything is seeded, so
rerunning the script reproduces the reports byte for byte.
"""

import json
import pathlib
import sys

from symdex.cli import main

OUT = pathlib.Path("out")

INPUTS = {
    "unit_box.json": {"type": "box", "default_radius": "1", "overrides": {}},
    "override_box.json": {"type": "box", "default_radius": "1", "overrides": {"1": "2"}},
    "geometric.json": {
        "norm": "sum",
        "label": "geometric",
        "terms": [{str(n): f"1/{2 ** n}"} for n in range(1, 11)],
    },
    "canonical.json": {
        "norm": "sup",
        "label": "canonical",
        "terms": [{str(n): "1"} for n in range(1, 11)],
    },
    "triangle_extreme.json": {
        "set": {"type": "finite", "points": [{}, {"1": "1"}, {"2": "1"}]},
        "norm": "sup",
        "point": {"1": "1"},
    },
}

REQUESTS = [
    ("delta_curve.csv", ["delta", "--in", "override_box.json", "--format", "csv", "--n", "3"]),
    ("delta_curve.json", ["delta", "--in", "override_box.json", "--n", "3"]),
    ("extraction.json", ["extract", "--in", "unit_box.json", "--epsilon", "1/10", "--n", "4"]),
    ("refined.json", ["refine", "--in", "override_box.json", "--epsilon", "1/10", "--n", "4"]),
    ("tree.json", ["tree", "--in", "unit_box.json", "--epsilon", "1", "--depth", "5"]),
    ("tail_geometric.json", ["series", "--in", "geometric.json", "--epsilon", "1/8"]),
    ("tail_canonical.json", ["series", "--in", "canonical.json", "--epsilon", "1/2"]),
    ("extreme.json", ["extreme", "--in", "triangle_extreme.json", "--epsilon", "1/1000000"]),
    ("one_sided.json", ["one_sided", "--in", "unit_box.json", "--epsilon", "1", "--n", "4"]),
]


def run() -> int:
    OUT.mkdir(exist_ok=True)
    for name, payload in INPUTS.items():
        (OUT / name).write_text(json.dumps(payload, indent=2) + "\n")
    worst = 0
    for outname, argv in REQUESTS:
        argv = list(argv)
        argv[2] = str(OUT / argv[2])
        code = main(argv + ["--out", str(OUT / outname), "--seed", "0"])
        worst = max(worst, code)
        if outname.endswith(".json"):
            verdict = OUT / f"verdict_{outname}"
            code = main(["oracle", "--in", str(OUT / outname), "--out", str(verdict)])
            worst = max(worst, code)
    print(f"reports in {OUT}/ (worst exit code {worst})")
    return worst


if __name__ == "__main__":
    sys.exit(run())
