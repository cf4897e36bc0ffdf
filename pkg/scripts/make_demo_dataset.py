#!/usr/bin/env python3
"""Generate demo source-format datasets (COCOMO 81/87 CSV layout).

Efforts follow a crude size power law modulated by the driver ratings plus
noise, so calibration runs on the output behave like runs on real (if easy)
data.  Purely synthetic; useful for exercising the transfer -> case pipeline
without access to a historical dataset.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

from seercal.dataset import SOURCE_DRIVERS, builtin_mapping

LABELS = ["VL", "L", "N", "H", "VH", "XH"]
LABEL_EFFECT = {"VL": 0.80, "L": 0.90, "N": 1.0, "H": 1.12, "VH": 1.25, "XH": 1.40}
# capability-style drivers cut effort when rated high
INVERTED = {"ACAP", "AEXP", "PCAP", "VEXP", "LEXP", "MODP", "TOOL"}
MODES = {"ORGANIC": (2.4, 1.05), "SEMIDETACHED": (3.0, 1.12), "EMBEDDED": (3.6, 1.20)}


def make_rows(n, model, rng):
    drivers = sorted(set(SOURCE_DRIVERS[model]) - {"MODE", "DATA", "SCED"})
    # keep only drivers the default mapping knows, so transfer runs clean
    mapped = {rule.source for rule in builtin_mapping(model).rules}
    drivers = sorted(set(drivers) & mapped)
    header = (
        "id,size_kloc,actual_effort,effort_unit,source_model,MODE," + ",".join(drivers)
    )
    rows = [header]
    for i in range(n):
        mode = rng.choice(list(MODES))
        a, b = MODES[mode]
        size = round(rng.lognormvariate(2.8, 0.9) + 2.0, 1)
        ratings = {d: rng.choice(LABELS[: 5 if d in INVERTED else 6]) for d in drivers}
        effort = a * size**b
        for d, label in ratings.items():
            factor = LABEL_EFFECT[label]
            effort *= (1.0 / factor) if d in INVERTED else factor
        effort = round(effort * rng.uniform(0.7, 1.4), 1)  # person-months
        cells = [f"{model[-2:]}-{i + 1:03d}", str(size), str(max(effort, 0.5)),
                 "person_months", model, mode]
        cells += [ratings[d] for d in drivers]
        rows.append(",".join(cells))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("data"))
    parser.add_argument("--published-rows", type=int, default=93)
    parser.add_argument("--industrial-rows", type=int, default=6)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    args.outdir.mkdir(parents=True, exist_ok=True)
    published = args.outdir / "demo_published_cocomo81.csv"
    industrial = args.outdir / "demo_industrial_cocomo87.csv"
    published.write_text(
        "\n".join(make_rows(args.published_rows, "COCOMO81", rng)) + "\n"
    )
    industrial.write_text(
        "\n".join(make_rows(args.industrial_rows, "COCOMO87", rng)) + "\n"
    )
    print(f"wrote {published} ({args.published_rows} rows)")
    print(f"wrote {industrial} ({args.industrial_rows} rows)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
