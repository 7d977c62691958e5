"""Command-line entry point: ``trialmap <subcommand> ...``.

Exit codes: 0 success, 1 input/parse error, 2 evaluation error.
"""

from __future__ import annotations

import argparse
import gc
import sys
from pathlib import Path

from .cpmap import GridSpec, compute_cp_map, export_cp_map, parse_cp_map
from .delta import DEFAULT_EPSILON, compute_delta_map, export_delta_map, summarize_wtl
from .errors import EvaluationError, InputError, TrialMapError
from .hardness import FUSION_METHODS, fuse_orderings, read_order, self_order, write_order
from .metrics import DcfParams, compute_eer, compute_min_dcf
from .render import ColorScale, default_diverging, default_sequential, render_diverging, render_sequential
from .score_io import load_scored, read_trials, scored_to_files
from .synth import GaussianScoreModel, SampleSpec, analytic_eer, sample_scores

EXIT_INPUT = 1
EXIT_EVAL = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _write(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _dcf_params(args) -> DcfParams:
    return DcfParams(args.p_target, args.c_miss, args.c_fa)


def _add_dcf_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-target", type=float, default=0.01)
    p.add_argument("--c-miss", type=float, default=1.0)
    p.add_argument("--c-fa", type=float, default=1.0)


def cmd_eval(args) -> int:
    scored = load_scored(read_trials(args.trials), args.scores)
    eer = compute_eer(scored)
    dcf = compute_min_dcf(scored, _dcf_params(args))
    print(
        f"eer={eer.eer:.6f} min_dcf={dcf.min_dcf:.6f} "
        f"threshold_eer={eer.threshold:.6f} threshold_dcf={dcf.threshold:.6f}"
    )
    return 0


def cmd_order(args) -> int:
    trials = read_trials(args.trials)
    systems = [load_scored(trials, path) for path in args.scores]
    order = fuse_orderings(systems, args.fusion)
    pos_path, neg_path = write_order(order, args.out)
    print(f"positives={order.num_positives} negatives={order.num_negatives} -> {pos_path} {neg_path}")
    return 0


def cmd_cpmap(args) -> int:
    scored = load_scored(read_trials(args.trials), args.scores)
    order = self_order(scored) if args.order == "self" else read_order(args.order)
    spec = GridSpec(args.grid, args.min_trials)
    params = _dcf_params(args) if args.metric == "min_dcf" else None
    cp = compute_cp_map(scored, order, spec, args.metric, params)
    _write(args.out_csv, export_cp_map(cp))
    if args.out_pgm:
        scale = default_sequential(cp.grid)
        if args.scale_min is not None or args.scale_max is not None:
            scale = ColorScale.sequential(
                scale.value_min if args.scale_min is None else args.scale_min,
                scale.value_max if args.scale_max is None else args.scale_max,
            )
        _write(args.out_pgm, render_sequential(cp, scale))
    defined = int(cp.defined.sum())
    print(f"{args.metric}_full={cp.cell(spec.resolution, spec.resolution):.6f} defined={defined}")
    return 0


def _read_map(path: str, name: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_cp_map(text, path, name)


def cmd_delta(args) -> int:
    ref = _read_map(args.ref_csv, Path(args.ref_csv).stem)
    test = _read_map(args.test_csv, Path(args.test_csv).stem)
    delta = compute_delta_map(ref, test, args.epsilon)
    _write(args.out_csv, export_delta_map(delta))
    if args.out_ppm:
        scale = default_diverging(delta.grid) if args.span is None else ColorScale.diverging(args.span)
        _write(args.out_ppm, render_diverging(delta, scale))
    print(summarize_wtl(delta).line())
    return 0


def cmd_synth(args) -> int:
    model = GaussianScoreModel(args.mu_pos, args.sigma_pos, args.mu_neg, args.sigma_neg)
    scored = sample_scores(model, SampleSpec(args.n_pos, args.n_neg, args.seed))
    trials_text, scores_text = scored_to_files(scored)
    out = Path(args.out)
    _write(out / "trials.txt", trials_text)
    _write(out / "scores.txt", scores_text)
    if args.analytic:
        res = analytic_eer(model)
        print(f"theta={res.threshold:.6f} eer={res.eer:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trialmap", description="Trial-config performance maps for verification scores.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="EER and minDCF of one score file")
    p.add_argument("--trials", required=True)
    p.add_argument("--scores", required=True)
    _add_dcf_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("order", help="hardness ordering from one or more systems")
    p.add_argument("--trials", required=True)
    p.add_argument("--scores", required=True, nargs="+")
    p.add_argument("--fusion", choices=FUSION_METHODS, default="rank_mean")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("cpmap", help="compute a C-P map")
    p.add_argument("--trials", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--order", required=True, help="directory written by 'order', or 'self'")
    p.add_argument("--metric", choices=("eer", "min_dcf"), default="eer")
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--min-trials", type=int, default=50)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-pgm")
    p.add_argument("--scale-min", type=float)
    p.add_argument("--scale-max", type=float)
    _add_dcf_flags(p)
    p.set_defaults(func=cmd_cpmap)

    p = sub.add_parser("delta", help="compare two C-P map CSVs")
    p.add_argument("--ref-csv", required=True)
    p.add_argument("--test-csv", required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-ppm")
    p.add_argument("--span", type=float)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("synth", help="sample Gaussian scores into trials/scores files")
    p.add_argument("--mu-pos", type=float, required=True)
    p.add_argument("--mu-neg", type=float, required=True)
    p.add_argument("--sigma-pos", type=float, required=True)
    p.add_argument("--sigma-neg", type=float, required=True)
    p.add_argument("--n-pos", type=int, required=True)
    p.add_argument("--n-neg", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--analytic", action="store_true", help="also print the closed-form threshold and EER")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    # commands build millions of short-lived tuples and exit; cyclic GC only adds passes
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except TrialMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if gc_was_enabled:
            gc.enable()


if __name__ == "__main__":
    sys.exit(main())
