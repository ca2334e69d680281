"""End-to-end CLI behavior: outputs, artifacts, and the exit-code contract."""

import subprocess
import sys

import pytest

from pacheck import (
    build_producer_consumer,
    parse_aut,
    render_model_file,
)
from pacheck.cli import main, run


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for style, name in (("spec", "spec"), ("concurrent", "conc"), ("pipeline", "pipe")):
        path = tmp_path / f"{name}.pa"
        path.write_text(render_model_file(build_producer_consumer(2, 1, 1, style)))
        paths[name] = str(path)
    prop = tmp_path / "prop.pa"
    prop.write_text("P = a . 0;\nproperty can_a expected true : <a> tt;\n")
    paths["prop"] = str(prop)
    bad = tmp_path / "bad.pa"
    bad.write_text("P = ;\n")
    paths["bad"] = str(bad)
    paths["dir"] = tmp_path
    return paths


def test_lts_prints_aut_to_stdout(files, capsys):
    assert main(["lts", files["spec"]]) == 0
    out = capsys.readouterr().out
    assert out.startswith("des (0, 4, 3)\n")
    assert '(0, "deposit", 1)' in out


def test_lts_writes_dot_files(files, capsys):
    target = str(files["dir"] / "spec.dot")
    assert main(["lts", files["spec"], "--format", "dot", "-o", target]) == 0
    assert f"wrote {target} (3 states, 4 transitions)" in capsys.readouterr().out
    text = (files["dir"] / "spec.dot").read_text()
    assert text.startswith("digraph lts {")


def test_lts_round_trips_through_aut_files(files, capsys):
    target = str(files["dir"] / "pipe.aut")
    assert main(["lts", files["pipe"], "-o", target]) == 0
    capsys.readouterr()
    assert main(["lts", target]) == 0
    assert capsys.readouterr().out.startswith("des (0, 5, 4)\n")


def test_bisim_reports_equivalence_with_exit_zero(files, capsys):
    assert main(["bisim", files["conc"], files["spec"], "--kind", "strong"]) == 0
    assert capsys.readouterr().out == "equivalent (strong)\n"
    assert main(["bisim", files["pipe"], files["spec"], "--kind", "weak"]) == 0
    assert capsys.readouterr().out == "equivalent (weak)\n"


def test_bisim_reports_inequivalence_with_exit_one(files, capsys):
    assert main(["bisim", files["pipe"], files["spec"], "--kind", "strong"]) == 1
    out = capsys.readouterr().out
    assert "not equivalent (strong)" in out
    assert "distinguishing: <deposit> not <deposit> tt" in out


def test_bisim_witness_file_is_a_colored_partition_when_equivalent(files):
    target = str(files["dir"] / "witness.dot")
    assert main(
        ["bisim", files["conc"], files["spec"], "--kind", "strong", "--witness", target]
    ) == 0
    text = (files["dir"] / "witness.dot").read_text()
    assert text.startswith("digraph")
    assert "fillcolor" in text


def test_bisim_witness_file_is_the_formula_when_inequivalent(files):
    target = str(files["dir"] / "formula.txt")
    assert main(
        ["bisim", files["pipe"], files["spec"], "--kind", "strong", "--witness", target]
    ) == 1
    assert (files["dir"] / "formula.txt").read_text() == "<deposit> not <deposit> tt\n"


def test_check_formula_verdicts_drive_the_exit_code(files, capsys):
    assert main(["check", files["spec"], "--formula", "<deposit> tt"]) == 0
    assert capsys.readouterr().out == "holds\n"
    assert main(["check", files["spec"], "--formula", "<withdraw> tt"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("fails\n")
    assert "because: no withdraw-successors" in out


def test_check_property_reads_the_declaration(files, capsys):
    assert main(["check", files["prop"], "--property", "can_a"]) == 0
    assert capsys.readouterr().out == "holds\n"
    assert main(["check", files["prop"], "--property", "nope"]) == 2
    assert "no declared property named 'nope'" in capsys.readouterr().err


def test_check_property_rejects_aut_inputs(files, capsys):
    target = str(files["dir"] / "spec.aut")
    main(["lts", files["spec"], "-o", target])
    capsys.readouterr()
    assert main(["check", target, "--property", "x"]) == 2
    assert "declared properties require a model file" in capsys.readouterr().err


def test_check_requires_exactly_one_of_formula_and_property(files, capsys):
    assert main(["check", files["spec"]]) == 2
    assert (
        main(["check", files["spec"], "--formula", "tt", "--property", "x"]) == 2
    )


def test_check_reports_formula_parse_errors_with_positions(files, capsys):
    assert main(["check", files["spec"], "--formula", "<deposit tt"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: --formula:1:")
    assert "closing the modality" in err


def test_minimize_writes_the_quotient(files, capsys):
    target = str(files["dir"] / "min.aut")
    assert main(["minimize", files["pipe"], "--kind", "weak", "-o", target]) == 0
    out = capsys.readouterr().out
    assert f"wrote {target} (3 states, 4 transitions, weak quotient)" in out
    quotient = parse_aut((files["dir"] / "min.aut").read_text())
    assert quotient.n_states == 3

    dot_target = str(files["dir"] / "min.dot")
    assert main(["minimize", files["pipe"], "--kind", "strong", "-o", dot_target]) == 0
    capsys.readouterr()
    assert (files["dir"] / "min.dot").read_text().startswith("digraph")


def test_diff_prints_only_the_formula(files, capsys):
    assert main(["diff", files["pipe"], files["spec"], "--kind", "strong"]) == 0
    assert capsys.readouterr().out == "<deposit> not <deposit> tt\n"


def test_diff_on_equivalent_models_is_a_usage_error(files, capsys):
    assert main(["diff", files["conc"], files["spec"], "--kind", "strong"]) == 2
    err = capsys.readouterr().err
    assert "models are equivalent (strong); there is nothing to distinguish" in err


def test_corpus_run_passes_all_checks(capsys):
    assert main(["corpus", "run"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    check_lines = [line for line in lines if line.startswith("CHECK ")]
    assert len(check_lines) == 8
    assert all(line.endswith(" PASS") for line in check_lines)
    assert lines[-1] == "8/8 checks passed"


def test_corpus_run_can_focus_one_study(capsys):
    assert main(["corpus", "run", "torn_transaction"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[-1] == "2/2 checks passed"
    assert main(["corpus", "run", "nope"]) == 2
    assert "no case study named 'nope'" in capsys.readouterr().err


def test_usage_parse_and_bound_errors_exit_two(files, capsys):
    assert main(["lts", str(files["dir"] / "missing.pa")]) == 2
    assert "cannot read" in capsys.readouterr().err

    assert main(["lts", files["bad"]]) == 2
    err = capsys.readouterr().err
    assert err.startswith(f"error: {files['bad']}:1:")

    assert main(["lts", files["conc"], "--max-states", "2"]) == 2
    assert "state bound 2 exceeded" in capsys.readouterr().err

    assert main(["frobnicate"]) == 2
    assert "error: pacheck" in capsys.readouterr().err

    assert main(["bisim", files["spec"], files["conc"], "--kind", "both"]) == 2
    capsys.readouterr()


def test_run_reports_are_structured(files, capsys):
    report = run(["lts", files["spec"]])
    capsys.readouterr()
    assert report.command == "lts"
    assert report.exit_code == 0
    assert report.verdict == "3 states, 4 transitions"
    assert report.artifacts_written == ()
    assert report.elapsed_ms >= 0.0

    target = str(files["dir"] / "out.aut")
    report = run(["minimize", files["conc"], "--kind", "strong", "-o", target])
    capsys.readouterr()
    assert report.artifacts_written == (target,)


def test_output_is_deterministic(files, capsys):
    main(["lts", files["pipe"]])
    first = capsys.readouterr().out
    main(["lts", files["pipe"]])
    assert capsys.readouterr().out == first


def test_module_entry_point_runs_the_corpus():
    proc = subprocess.run(
        [sys.executable, "-m", "pacheck", "corpus", "run"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "8/8 checks passed" in proc.stdout
