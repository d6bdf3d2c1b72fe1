#!/usr/bin/env python3
"""Reproduce the headline experiments end to end via the CLI.

Writes every artifact into a results directory (default ./results):

  frames/          constructed frame files
  erasure_sweep.csv    reconstruction error vs redundancy (n = 16)
  ner_etf37.json / ner_etf413.json   exhaustive robustness certificates
  rudelson.json    sign-concentration ratio estimates per dimension
  khintchine.json  exact operator-Khintchine check
  probe.json       matrix-probing roundtrip + dictionary concentration
  stirling.json    factorial bound table

Every command is seeded; rerunning the script reproduces identical files.
"""

import argparse
import json
import sys
from pathlib import Path

from framelab.cli import main as cli


def run(*argv):
    argv = [str(a) for a in argv]
    print("$ framelab " + " ".join(argv))
    code = cli(argv)
    if code != 0:
        sys.exit(code)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--results", default="results", help="output directory")
    parser.add_argument("--seed", type=int, default=20240915)
    parser.add_argument("--trials", type=int, default=2000)
    args = parser.parse_args()

    out = Path(args.results)
    frames = out / "frames"
    frames.mkdir(parents=True, exist_ok=True)

    # frame constructions
    run("construct", "--kind", "etf", "--N", 7, "--M", 3,
        "--out", frames / "etf_3x7.json")
    run("construct", "--kind", "etf", "--N", 13, "--M", 4,
        "--out", frames / "etf_4x13.json")
    run("construct", "--kind", "harmonic", "--n", 16, "--M", 1024,
        "--out", frames / "harmonic_16x1024.json")

    # erasure: error decay with redundancy at keep probability 1/2
    run("sweep", "--n", 16, "--M-list", "64,256,1024,4096",
        "--trials", args.trials, "--seed", args.seed,
        "--csv", out / "erasure_sweep.csv")

    # exhaustive robustness certificates at the certified thresholds
    run("ner", "--frame", frames / "etf_3x7.json", "--K", 5,
        "--C", 2.1076, "--json", out / "ner_etf37.json")
    run("ner", "--frame", frames / "etf_4x13.json", "--K", 8,
        "--C", 2.9241, "--json", out / "ner_etf413.json")

    # sign-inequality estimates
    rud = {}
    for n in (4, 16, 64):
        frame_path = frames / f"harmonic_{n}x{4 * n}.json"
        run("construct", "--kind", "harmonic", "--n", n, "--M", 4 * n,
            "--out", frame_path)
        tmp = out / f"rudelson_{n}.json"
        run("rudelson", "--frame", frame_path, "--trials", 5000,
            "--seed", args.seed, "--json", tmp)
        rud[n] = json.loads(tmp.read_text())
    (out / "rudelson.json").write_text(json.dumps(rud, indent=2, sort_keys=True) + "\n")

    run("khintchine", "--m", 2, "--count", 8, "--dim", 6, "--seed", args.seed,
        "--exact", "--json", out / "khintchine.json")

    # matrix probing: roundtrip recovery plus dictionary concentration
    run("probe", "--n", 9, "--trials", args.trials, "--seed", args.seed,
        "--json", out / "probe.json")

    run("stirling", "--json", out / "stirling.json")

    print(f"\nall artifacts written under {out}/")


if __name__ == "__main__":
    main()
