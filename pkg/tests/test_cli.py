import subprocess
import sys

import numpy as np
import pytest

from trialmap import ScoredTrials, compute_eer, compute_min_dcf
from trialmap.cli import main
from trialmap.score_io import scored_to_files


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def synth(tmp_path, capsys, name="sys", seed=1, n_pos=300, n_neg=900, mu_pos=3.0, extra=()):
    out = tmp_path / name
    code, stdout, _ = run(
        ["synth", "--mu-pos", mu_pos, "--mu-neg", 0, "--sigma-pos", 1, "--sigma-neg", 1,
         "--n-pos", n_pos, "--n-neg", n_neg, "--seed", seed, "--out", out, *extra],
        capsys,
    )
    assert code == 0
    return out, stdout


def test_synth_analytic_line(tmp_path, capsys):
    out, stdout = synth(tmp_path, capsys, extra=["--analytic"])
    assert stdout == "theta=1.500000 eer=0.066807\n"
    assert (out / "trials.txt").read_text().count("\n") == 1200
    assert (out / "scores.txt").read_text().count("\n") == 1200


def test_eval_matches_library(tmp_path, capsys, rng):
    scored = ScoredTrials.from_arrays(rng.normal(1, 1, 200), rng.normal(0, 1, 700))
    trials_text, scores_text = scored_to_files(scored)
    (tmp_path / "t.txt").write_text(trials_text)
    (tmp_path / "s.txt").write_text(scores_text)
    code, stdout, _ = run(["eval", "--trials", tmp_path / "t.txt", "--scores", tmp_path / "s.txt",
                           "--p-target", 0.05], capsys)
    assert code == 0
    eer = compute_eer(scored)
    from trialmap import DcfParams

    dcf = compute_min_dcf(scored, DcfParams(0.05))
    assert stdout == (
        f"eer={eer.eer:.6f} min_dcf={dcf.min_dcf:.6f} "
        f"threshold_eer={eer.threshold:.6f} threshold_dcf={dcf.threshold:.6f}\n"
    )


def test_pipeline_is_deterministic(tmp_path, capsys):
    a, _ = synth(tmp_path, capsys, "a", seed=1)
    b, _ = synth(tmp_path, capsys, "b", seed=2, mu_pos=2.5)
    # same key set, different systems: reuse a's trials for b's scores
    trials = a / "trials.txt"
    outputs = []
    for run_id in (1, 2):
        d = tmp_path / f"run{run_id}"
        assert run(["order", "--trials", trials, "--scores", a / "scores.txt", b / "scores.txt",
                    "--out", d / "order"], capsys)[0] == 0
        for sys_dir, tag in ((a, "a"), (b, "b")):
            code, stdout, _ = run(["cpmap", "--trials", trials, "--scores", sys_dir / "scores.txt",
                                   "--order", d / "order", "--grid", 5, "--min-trials", 20,
                                   "--out-csv", d / f"{tag}.csv", "--out-pgm", d / f"{tag}.pgm"], capsys)
            assert code == 0 and stdout.startswith("eer_full=")
        code, stdout, _ = run(["delta", "--ref-csv", d / "a.csv", "--test-csv", d / "b.csv",
                               "--out-csv", d / "delta.csv", "--out-ppm", d / "delta.ppm"], capsys)
        assert code == 0 and stdout.startswith("win=")
        outputs.append({p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()})
    assert outputs[0] == outputs[1]
    assert len(outputs[0]) == 8


def test_cpmap_self_full_cell_matches_eval(tmp_path, capsys):
    a, _ = synth(tmp_path, capsys)
    code, eval_out, _ = run(["eval", "--trials", a / "trials.txt", "--scores", a / "scores.txt"], capsys)
    code, cp_out, _ = run(["cpmap", "--trials", a / "trials.txt", "--scores", a / "scores.txt", "--order", "self",
                           "--grid", 4, "--min-trials", 1, "--out-csv", tmp_path / "m.csv"], capsys)
    assert code == 0
    assert cp_out.split()[0].split("=")[1] == eval_out.split()[0].split("=")[1]
    assert cp_out.split()[1] == "defined=16"


def test_cpmap_min_dcf(tmp_path, capsys):
    a, _ = synth(tmp_path, capsys)
    code, out, _ = run(["cpmap", "--trials", a / "trials.txt", "--scores", a / "scores.txt", "--order", "self",
                        "--metric", "min_dcf", "--grid", 3, "--out-csv", tmp_path / "m.csv"], capsys)
    assert code == 0 and out.startswith("min_dcf_full=")


def test_delta_self_is_all_tie(tmp_path, capsys):
    a, _ = synth(tmp_path, capsys)
    csv = tmp_path / "m.csv"
    run(["cpmap", "--trials", a / "trials.txt", "--scores", a / "scores.txt", "--order", "self",
         "--grid", 3, "--out-csv", csv], capsys)
    code, out, _ = run(["delta", "--ref-csv", csv, "--test-csv", csv, "--out-csv", tmp_path / "d.csv"], capsys)
    assert code == 0
    assert out == "win=0.000000 tie=1.000000 lose=0.000000 defined=9\n"


def test_missing_file_exit_1(tmp_path, capsys):
    code, _, err = run(["eval", "--trials", tmp_path / "nope.txt", "--scores", tmp_path / "nope2.txt"], capsys)
    assert code == 1 and "error:" in err


def test_parse_error_exit_1(tmp_path, capsys):
    (tmp_path / "t.txt").write_text("a b target\nc d maybe\n")
    (tmp_path / "s.txt").write_text("a b 1.0\nc d 0.0\n")
    code, _, err = run(["eval", "--trials", tmp_path / "t.txt", "--scores", tmp_path / "s.txt"], capsys)
    assert code == 1 and "line 2" in err


def test_missing_scores_exit_1(tmp_path, capsys):
    (tmp_path / "t.txt").write_text("a b target\nc d nontarget\n")
    (tmp_path / "s.txt").write_text("a b 1.0\n")
    code, _, err = run(["eval", "--trials", tmp_path / "t.txt", "--scores", tmp_path / "s.txt"], capsys)
    assert code == 1 and "missing" in err


def test_single_class_exit_2(tmp_path, capsys):
    (tmp_path / "t.txt").write_text("a b target\nc d target\n")
    (tmp_path / "s.txt").write_text("a b 1.0\nc d 0.0\n")
    code, _, err = run(["eval", "--trials", tmp_path / "t.txt", "--scores", tmp_path / "s.txt"], capsys)
    assert code == 2 and "error:" in err


def test_analytic_without_separation_exit_2(tmp_path, capsys):
    code, _, _ = run(["synth", "--mu-pos", 0, "--mu-neg", 0, "--sigma-pos", 1, "--sigma-neg", 1, "--n-pos", 5,
                      "--n-neg", 5, "--seed", 0, "--out", tmp_path / "x", "--analytic"], capsys)
    assert code == 2


def test_delta_without_defined_cells_exit_2(tmp_path, capsys):
    csv = tmp_path / "m.csv"
    csv.write_text("x_frac,0.500000,1.000000\n1.000000,NA,NA\n0.500000,NA,NA\n")
    code, _, _ = run(["delta", "--ref-csv", csv, "--test-csv", csv, "--out-csv", tmp_path / "d.csv"], capsys)
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["eval", "--trials", "x"],
        ["cpmap", "--trials", "t", "--scores", "s", "--order", "self", "--out-csv", "o", "--grid", "abc"],
        ["cpmap", "--trials", "t", "--scores", "s", "--order", "self", "--out-csv", "o", "--metric", "auc"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_bad_grid_value_exit_1(tmp_path, capsys):
    a, _ = synth(tmp_path, capsys)
    code, _, _ = run(["cpmap", "--trials", a / "trials.txt", "--scores", a / "scores.txt", "--order", "self",
                      "--grid", 1, "--out-csv", tmp_path / "m.csv"], capsys)
    assert code == 1


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "trialmap", "synth", "--mu-pos", "3", "--mu-neg", "0", "--sigma-pos", "1",
         "--sigma-neg", "1", "--n-pos", "10", "--n-neg", "10", "--seed", "0", "--out", str(tmp_path), "--analytic"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert res.stdout == "theta=1.500000 eer=0.066807\n"
