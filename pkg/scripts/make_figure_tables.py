#!/usr/bin/env python3
"""Reproduce the data tables behind the bundled example experiments.

Writes one CSV per experiment into the output directory:

  fig2_moments.csv   mean/variance of the running maximum over time,
                     drift-only model
  fig3_moments.csv   the same model with a Brownian term on every state
  fig4_ruin.csv      ruin probabilities: Stehfest inversion vs the exact
                     phase-type tail vs Monte Carlo (Erlang claims)
  fig5_ruin.csv      ruin probabilities: inversion vs the heavy-tail
                     asymptote vs Monte Carlo (Lomax claims, infinite
                     horizon)

Usage:
  python scripts/make_figure_tables.py --out results/ [--mc-paths 200000]
"""

import argparse
import sys
from pathlib import Path

from poolruin.cli import main as cli_main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv):
    code = cli_main(argv)
    if code != 0:
        sys.exit(code)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--mc-paths", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t_grid = ",".join(str(x / 2) for x in range(1, 41))

    for fig in ("fig2", "fig3"):
        run([
            "curves", "--config", str(CONFIGS / f"{fig}.json"),
            "--mode", "moments", "--t-grid", t_grid,
            "--out", str(out / f"{fig}_moments.csv"),
        ])

    run([
        "curves", "--config", str(CONFIGS / "fig4.json"),
        "--mode", "ruin", "--u-grid", "1,2,3,4,5,6,8,10,12,15",
        "--mc-paths", str(args.mc_paths), "--seed", str(args.seed),
        "--out", str(out / "fig4_ruin.csv"),
    ])

    run([
        "curves", "--config", str(CONFIGS / "fig5.json"),
        "--mode", "ruin", "--u-grid", "5,10,20,40,70,100,150,200",
        "--mc-paths", str(args.mc_paths), "--seed", str(args.seed),
        "--out", str(out / "fig5_ruin.csv"),
    ])

    print(f"wrote tables to {out}/")


if __name__ == "__main__":
    main()
