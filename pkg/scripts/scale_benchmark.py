#!/usr/bin/env python3
"""Wall-clock timing of the CLI on a large synthetic trial list.

Writes ``--n-pos`` + ``--n-neg`` Gaussian trials with ``trialmap synth``,
then times ``trialmap eval`` (several runs) and one ``trialmap cpmap``.
"""

from __future__ import annotations

import argparse
import statistics
import subprocess
import sys
import tempfile
import time
from pathlib import Path


def run(*args: object) -> tuple[float, str]:
    t0 = time.perf_counter()
    res = subprocess.run([sys.executable, "-m", "trialmap", *map(str, args)], capture_output=True, text=True, check=True)
    return time.perf_counter() - t0, res.stdout.strip()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-pos", type=int, default=100_000)
    ap.add_argument("--n-neg", type=int, default=900_000)
    ap.add_argument("--grid", type=int, default=50)
    ap.add_argument("--runs", type=int, default=5)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        secs, _ = run("synth", "--mu-pos", 3, "--mu-neg", 0, "--sigma-pos", 1, "--sigma-neg", 1,
                      "--n-pos", args.n_pos, "--n-neg", args.n_neg, "--seed", 0, "--out", out)
        print(f"synth: {secs:.2f}s")
        trials, scores = out / "trials.txt", out / "scores.txt"
        times = []
        for _ in range(args.runs):
            secs, line = run("eval", "--trials", trials, "--scores", scores)
            times.append(secs)
        print(f"eval:  median {statistics.median(times):.2f}s, min {min(times):.2f}s  ({line})")
        secs, line = run("cpmap", "--trials", trials, "--scores", scores, "--order", "self",
                         "--grid", args.grid, "--out-csv", out / "map.csv")
        print(f"cpmap {args.grid}x{args.grid}: {secs:.2f}s  ({line})")


if __name__ == "__main__":
    main()
