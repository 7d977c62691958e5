#!/usr/bin/env python3
"""Empirical vs closed-form EER for Gaussian class-conditional scores.

Samples increasing numbers of trials from a two-Gaussian score model and
prints how far the empirical EER sits from the analytic one, per seed.
"""

from __future__ import annotations

import argparse
import statistics
import time

from trialmap import GaussianScoreModel, SampleSpec, analytic_eer, compute_eer, sample_scores


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu-pos", type=float, default=3.0)
    ap.add_argument("--mu-neg", type=float, default=0.0)
    ap.add_argument("--sigma-pos", type=float, default=1.0)
    ap.add_argument("--sigma-neg", type=float, default=1.0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000, 200000])
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    model = GaussianScoreModel(args.mu_pos, args.sigma_pos, args.mu_neg, args.sigma_neg)
    exact = analytic_eer(model)
    print(f"analytic: theta={exact.threshold:.6f} eer={exact.eer:.6f}")
    print(f"{'n/class':>9} {'mean eer':>10} {'max |err|':>10} {'sd':>9} {'sec':>6}")
    for n in args.sizes:
        t0 = time.perf_counter()
        eers = [compute_eer(sample_scores(model, SampleSpec(n, n, seed))).eer for seed in range(args.seeds)]
        worst = max(abs(e - exact.eer) for e in eers)
        sd = statistics.stdev(eers) if len(eers) > 1 else 0.0
        print(f"{n:>9} {statistics.fmean(eers):>10.6f} {worst:>10.6f} {sd:>9.6f} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
