#!/usr/bin/env python3
"""Run a bundled or custom learning experiment and write its CSV.

    python3 scripts/run_experiment.py figure1_small out/figure1_small.csv
    HYPERBOUND_THREADS=8 python3 scripts/run_experiment.py figure2_full out/figure2.csv
"""
import argparse
import sys
import time
from pathlib import Path

from hyperbound.harness import format_aggregates, load_config, run_experiment, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config", help="bundled name (figure1_small, figure1_full, ...) or a .cfg path")
    ap.add_argument("out", type=Path)
    args = ap.parse_args()
    cfg = load_config(args.config)
    t0 = time.perf_counter()

    def progress(done, total):
        if done == total or done % 100 == 0:
            print(f"\r{done}/{total} runs", end="", file=sys.stderr, flush=True)

    res = run_experiment(cfg, progress=progress)
    print(file=sys.stderr)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(res.records, args.out)
    print(format_aggregates(res.aggregates))
    print(f"{len(res.records)} runs in {time.perf_counter() - t0:.0f} s -> {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
