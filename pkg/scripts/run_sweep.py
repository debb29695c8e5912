#!/usr/bin/env python3
"""Run a sweep from a JSON config, write CSV, print the band summary.

    python3 scripts/run_sweep.py configs/generic.json results/generic.csv
"""
import argparse
import json
import os

from lemlab import experiments as ex
from lemlab.cli import sweep_spec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("out")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    with open(args.config) as fh:
        cfg = json.load(fh)
    cfg["jobs"] = args.jobs
    records, summary = ex.run_sweep(sweep_spec(cfg))
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        fh.write(ex.records_to_csv(records))
    for r in records:
        print(f"t={r.t:.1e}  value={r.optimizer_value:.6f}  method={r.method}  "
              f"target={summary.target:.6f}")
    print(ex.to_json(summary, indent=2))


if __name__ == "__main__":
    main()
