# -*- coding: utf-8 -*-
"""
Configuration, input loading, report tables, orchestration and the CLI.
"""
import json
from fractions import Fraction as F

import pandas as pd
import pytest

from Pyfloer.ainfty import Cochain
from Pyfloer.cellular import CellComplex, validate_complex
from Pyfloer.examples import classical_sphere_algebra
from Pyfloer.mc import MCCandidate
from Pyfloer.novikov import monomial, nearly_equal

from pipeline.cli import EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NOT_ADMISSIBLE, EXIT_OK, main
from pipeline.config import ConfigError, ConfigManager, get_surgery_params, get_truncation
from pipeline.data_preparation import (EXAMPLE_NAMES, InputError, InputLoader, UnknownExample,
                                       candidate_to_json, detect_kind, example_documents, read_json,
                                       write_example)
from pipeline.formatting import ReportWriter, potentials_table, violations_table
from pipeline.orchestration import SurgeryOrchestrator, run_pipeline
from utils.validation import ValidationError, compare_reports, validate_report
from verification.curve_batch import run_curve_batch, run_gauge_batch, summarize

TOL = 1e-9


@pytest.fixture
def circle_inputs(tmp_path):
    write_example("immersed-circle", tmp_path / "inputs", verbose=False)
    return tmp_path / "inputs"


def _surger_args(inputs, out):
    return ["surger", str(inputs / "algebra.json"), str(inputs / "candidate.json"),
            str(inputs / "surgery.json"), "--surgered", str(inputs / "surgered.json"),
            "--out", str(out), "--quiet"]


# ---------------------------------------------------------------------------
# configuration


def test_default_config():
    config = ConfigManager().config
    assert get_truncation(config) == F(6)
    assert get_surgery_params(config)['caps'] == (12, 12)
    assert config['ALGEBRA']['unit_convention'] == "literal"


@pytest.mark.parametrize("override", [
    {"SURGERY": {"caps": [12]}},
    {"SURGERY": {"sign_flags": {"longitude": 2}}},
    {"SURGERY": {"local_system_form": "neither"}},
    {"ALGEBRA": {"unit_convention": "other"}},
    {"VERIFICATION": {"tolerance": 2}},
    {"TRUNCATION": {"order": "-1"}},
])
def test_config_rejects_bad_values(override):
    with pytest.raises(ConfigError):
        ConfigManager(override)


def test_infinite_truncation_is_allowed():
    config = ConfigManager({"TRUNCATION": {"order": "inf"}}).config
    assert get_truncation(config) == float("inf")


def test_config_yaml_round_trip(tmp_path):
    manager = ConfigManager({"SURGERY": {"caps": [8, 4]}})
    manager.save(tmp_path / "config.yaml")
    assert ConfigManager.from_file(tmp_path / "config.yaml").config == manager.config


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="SURGERY.cap"):
        ConfigManager({"SURGERY": {"cap": [1, 1]}})
    with pytest.raises(ConfigError):
        ConfigManager({"PLOTTING": {}})


def test_config_dotted_access():
    manager = ConfigManager()
    manager.set("SURGERY.sign_flags", {"meridian": -1})
    assert manager.get("SURGERY.sign_flags") == {"longitude": 1, "meridian": -1}
    assert manager.get("OUTPUT.missing", "fallback") == "fallback"
    with pytest.raises(ConfigError):
        manager.set("VERIFICATION.tolerance", 0)


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager.from_file(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        ConfigManager.from_file(bad)


# ---------------------------------------------------------------------------
# input loading


@pytest.mark.parametrize("data, kind", [
    ({"kind": "surgery", "x": "x"}, "surgery"),
    ({"atlas": [], "complex": {}}, "algebra"),
    ({"cells": {}}, "complex"),
    ({"b": {}}, "candidate"),
    ({"b": {}, "area": "1/2"}, "morphism"),
    ({"minus": {}, "plus": {}}, "bimodule"),
    ({"balls": {}}, "surgery"),
])
def test_detect_kind(data, kind):
    assert detect_kind(data) == kind


def test_detect_kind_rejects_unknown():
    with pytest.raises(ValueError):
        detect_kind({"kind": "spaceship"})
    with pytest.raises(ValueError):
        detect_kind({"something": 1})


def test_parse_error_has_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "kind": \n}')
    with pytest.raises(InputError) as info:
        read_json(path)
    assert info.value.line == 3
    assert str(info.value).startswith(f"{path}:3:")


def test_missing_field_names_the_file(tmp_path):
    path = tmp_path / "candidate.json"
    path.write_text(json.dumps({"kind": "candidate"}))
    with pytest.raises(InputError, match="missing field"):
        InputLoader().load_candidate(path)


def test_wrong_kind_is_rejected(circle_inputs):
    with pytest.raises(InputError, match="expected a algebra document"):
        InputLoader().load_algebra(circle_inputs / "candidate.json")


def test_truncation_override(circle_inputs):
    A = InputLoader(truncation_override=F(3)).load_algebra(circle_inputs / "algebra.json")
    assert A.truncation == F(3)
    A = InputLoader(default_truncation=F(2)).load_algebra(circle_inputs / "algebra.json")
    assert A.truncation == F(6)


def test_candidate_round_trip():
    cand = MCCandidate(Cochain({"x": monomial(1j, F(-1, 2))}), F(3, 5))
    doc = candidate_to_json(cand)
    assert doc["delta"] == "3/5"
    assert detect_kind(doc) == "candidate"


@pytest.mark.parametrize("name", EXAMPLE_NAMES)
def test_example_documents_load(tmp_path, name):
    paths = write_example(name, tmp_path, verbose=False)
    loader = InputLoader()
    for path in paths:
        kind, obj, _ = loader.load(path)
        if kind == "algebra":
            assert validate_complex(obj.complex) == []


def test_unknown_example():
    with pytest.raises(UnknownExample):
        example_documents("torus-knot")


def test_worked_example_bundle():
    docs = example_documents("immersed-circle")
    assert set(docs) == {"algebra.json", "candidate.json", "surgery.json", "surgered.json"}
    atlas = docs["algebra.json"]["atlas"]
    assert sum(1 for d in atlas if not d["inputs"]) == 3
    assert docs["surgery.json"]["example_mode"] is True


# ---------------------------------------------------------------------------
# report tables


def test_violations_table_classifies_atlas_problems():
    df = violations_table("a.json", atlas_problems=["disk 0 () -> x: curvature disk with non-positive area 0",
                                                    "disk 1 ('x',) -> y: area 1/2 below 1 x delta_gap = 1"],
                          admissibility=["b(x) vanishes"])
    assert list(df["check"]) == ["curvature gap", "corner gap", "admissibility"]
    validate_report(df, "violations")


def test_violations_table_from_complex():
    C = CellComplex(2, {"a": 0, "c": 2}, {("c", "a"): 1})
    df = violations_table("c.json", validate_complex(C))
    assert "boundary dimension" in set(df["check"])


def test_report_writer(tmp_path):
    writer = ReportWriter(tmp_path / "out")
    writer.add("potentials", potentials_table([{"stage": "s", "W": monomial(1j, F(1, 2)), "flat": True}]),
               "potentials")
    paths = writer.write()
    assert (tmp_path / "out" / "potentials.csv") in paths
    summary = (tmp_path / "out" / "summary.txt").read_text()
    assert "== potentials ==" in summary and "1/2" in summary


def test_report_writer_requires_tables(tmp_path):
    with pytest.raises(ValidationError):
        ReportWriter(tmp_path).write()


def test_validate_report_requires_columns():
    with pytest.raises(ValidationError):
        validate_report(pd.DataFrame({"stage": ["x"]}), "potentials")


# ---------------------------------------------------------------------------
# orchestration


def test_worked_example_pipeline(circle_inputs, tmp_path):
    result = run_pipeline(circle_inputs / "algebra.json", circle_inputs / "candidate.json",
                          circle_inputs / "surgery.json", circle_inputs / "surgered.json",
                          out_dir=tmp_path / "results", verbose=False)
    assert result['success']
    before, after = result['potentials']
    assert before['flat'] and after['flat']
    expected = monomial(1j, F(1, 2))
    assert nearly_equal(before['W'], expected, TOL)
    assert nearly_equal(after['W'], expected, TOL)
    assert (tmp_path / "results" / "b_eps.json").exists()
    assert (tmp_path / "results" / "potentials.csv").exists()


def test_phases_run_in_order():
    orchestrator = SurgeryOrchestrator(verbose=False)
    with pytest.raises(ValidationError):
        orchestrator.run_phase2_potential()


def test_dim3_pipeline_passes_curve_identity(tmp_path):
    write_example("dim3-synthetic", tmp_path / "inputs", verbose=False)
    inputs = tmp_path / "inputs"
    result = run_pipeline(inputs / "algebra.json", inputs / "candidate.json", inputs / "surgery.json",
                          out_dir=tmp_path / "results", verbose=False)
    curve = result['tables']['curve_identity']
    assert len(curve) > 0
    assert curve["passed"].all()
    assert result['success']


# ---------------------------------------------------------------------------
# command line


def test_cli_example_then_validate(tmp_path, capsys):
    assert main(["example", "immersed-circle", "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    files = sorted(str(p) for p in tmp_path.glob("*.json"))
    assert len(files) == 4
    assert main(["validate", *files, "--quiet"]) == EXIT_OK


def test_cli_unknown_example(tmp_path):
    assert main(["example", "torus-knot", "--out", str(tmp_path), "--quiet"]) == EXIT_INPUT


def test_cli_potential_and_mc_check(circle_inputs, capsys):
    args = [str(circle_inputs / "algebra.json"), str(circle_inputs / "candidate.json"), "--quiet"]
    assert main(["potential", *args]) == EXIT_OK
    assert main(["mc-check", *args]) == EXIT_OK
    assert "1/2" in capsys.readouterr().out


def test_cli_mc_check_reports_non_flat(circle_inputs, capsys):
    doc = read_json(circle_inputs / "candidate.json")
    del doc["b"]["x''"]
    path = circle_inputs / "non_flat.json"
    path.write_text(json.dumps(doc))
    assert main(["mc-check", str(circle_inputs / "algebra.json"), str(path), "--quiet"]) == EXIT_CHECK_FAILED


def test_cli_surger_worked_example(circle_inputs, tmp_path, capsys):
    assert main(_surger_args(circle_inputs, tmp_path / "results")) == EXIT_OK
    out = capsys.readouterr().out
    assert "W[immersed]" in out and "W[surgered]" in out
    # emitted files re-validate
    emitted = [str(tmp_path / "results" / "algebra_eps.json"), str(tmp_path / "results" / "b_eps.json")]
    assert main(["validate", *emitted, "--quiet"]) == EXIT_OK


def test_cli_surger_is_deterministic(circle_inputs, tmp_path):
    assert main(_surger_args(circle_inputs, tmp_path / "r1")) == EXIT_OK
    assert main(_surger_args(circle_inputs, tmp_path / "r2")) == EXIT_OK
    r1 = pd.read_csv(tmp_path / "r1" / "potentials.csv")
    r2 = pd.read_csv(tmp_path / "r2" / "potentials.csv")
    assert compare_reports(r1, r2)["identical"]


def test_cli_inadmissible_candidate(circle_inputs, tmp_path, capsys):
    doc = read_json(circle_inputs / "candidate.json")
    del doc["b"]["x"]
    (circle_inputs / "candidate.json").write_text(json.dumps(doc))
    assert main(_surger_args(circle_inputs, tmp_path / "results")) == EXIT_NOT_ADMISSIBLE
    assert "vanishes" in capsys.readouterr().err


def test_cli_curvature_gap_violation(circle_inputs, capsys):
    doc = read_json(circle_inputs / "algebra.json")
    doc["atlas"].append({"inputs": [], "output": "x", "area": "0"})
    path = circle_inputs / "gapless.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path), "--quiet"]) == EXIT_CHECK_FAILED
    assert "curvature gap" in capsys.readouterr().out


def test_cli_parse_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "kind": \n}')
    assert main(["validate", str(path), "--quiet"]) == EXIT_INPUT
    assert ":3:" in capsys.readouterr().err


def test_cli_hf_on_sphere_pair(tmp_path, capsys):
    algebra = tmp_path / "spheres.json"
    algebra.write_text(json.dumps({"kind": "algebra", **classical_sphere_algebra(4).to_json()}))
    candidate = tmp_path / "zero.json"
    candidate.write_text(json.dumps({"kind": "candidate", "b": {}, "delta": "1/2"}))
    assert main(["hf", str(algebra), str(candidate), "--out", str(tmp_path / "hf"), "--quiet"]) == EXIT_OK
    hf = pd.read_csv(tmp_path / "hf" / "hf.csv")
    assert hf["dimension"].iloc[0] == 4
    assert hf["rank"].iloc[0] == 3


def test_cli_cone_example(tmp_path, capsys):
    assert main(["example", "embedded-pair-cone", "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    args = ["cone", str(tmp_path / "bimodule.json"), str(tmp_path / "morphism.json"),
            "--out", str(tmp_path / "cone"), "--quiet"]
    assert main(args) == EXIT_OK
    cone = pd.read_csv(tmp_path / "cone" / "cone.csv")
    assert len(cone) == 3
    assert (cone["discrepancy"] <= TOL).all()


def test_cli_bad_flag_values():
    with pytest.raises(SystemExit):
        main(["potential", "a.json", "b.json", "--caps", "12"])
    with pytest.raises(SystemExit):
        main(["potential", "a.json", "b.json", "--trunc", "one"])


# ---------------------------------------------------------------------------
# verification batches


@pytest.mark.parametrize("seed", [3, 11])
def test_curve_batch(seed):
    curve, resummation = run_curve_batch(2, seed=seed, progress=False)
    assert set(curve["case"]) == {"random-0", "random-1"}
    assert curve["passed"].all()
    assert resummation["passed"].all()


def test_gauge_batch_and_summary():
    gauge = run_gauge_batch(3, seed=5, progress=False)
    assert gauge["passed"].all()
    assert gauge["flat0"].all() and gauge["flat1"].all()
    assert (gauge["moved"] > 0).all()
    curve, resummation = run_curve_batch(1, seed=5, progress=False)
    summary = summarize(curve, resummation, gauge)
    assert list(summary["batch"]) == ["curve identity", "resummation", "gauge"]
    assert summary["failed"].sum() == 0
