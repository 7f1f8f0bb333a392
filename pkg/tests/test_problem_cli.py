import json
import re
from pathlib import Path

import numpy as np
import pytest

from qfimax import ValidationError, parse_problem
from qfimax.cli import EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION, main, run_command
from qfimax.oracles import brute_force_max_qfi
from qfimax.problem import emit_problem

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

MINIMAL = json.dumps({
    "dim": 2,
    "generator": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]],
    "channel": {"preset": "identity"},
})


def problem_text(**extra):
    doc = json.loads(MINIMAL)
    doc.update(extra)
    return json.dumps(doc)


class TestParseProblem:
    def test_minimal_document(self):
        pf = parse_problem(MINIMAL)
        assert pf.dim == 2
        np.testing.assert_allclose(pf.generator.matrix, np.diag([0.5, -0.5]), atol=1e-15)
        assert pf.povm is None and pf.input_state is None and pf.bayes is None

    def test_syntax_error_reports_position(self):
        with pytest.raises(ValidationError, match=r"line \d+, column \d+"):
            parse_problem("{\n  \"dim\": 2,\n}")

    def test_missing_required_field(self):
        with pytest.raises(ValidationError, match="missing required field 'channel'"):
            parse_problem(json.dumps({"dim": 2, "generator": [[[0.0, 0.0]]]}))

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError, match="unknown problem fields"):
            parse_problem(problem_text(extra_knob=1))

    def test_dim_mismatch(self):
        bad = problem_text(generator=[[[1.0, 0.0]]])
        with pytest.raises(ValidationError, match="generator has dim 1"):
            parse_problem(bad)

    def test_trace_leaking_kraus_rejected(self):
        eye = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        bad = problem_text(channel={"kraus": [eye, eye]})
        with pytest.raises(ValidationError, match="1(\\.0+)?"):
            parse_problem(bad)

    def test_both_channel_forms_rejected(self):
        eye = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        bad = problem_text(channel={"preset": "identity", "kraus": [eye]})
        with pytest.raises(ValidationError, match="exactly one channel form"):
            parse_problem(bad)

    def test_channel_composition_list(self):
        pf = parse_problem(problem_text(channel=[
            {"preset": "dephasing", "params": {"eta": 0.8}},
            {"preset": "dephasing", "params": {"eta": 0.5}},
        ]))
        # dephasing composes multiplicatively on the coherences
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        out = sum(k @ sx @ k.conj().T for k in pf.channel.kraus)
        np.testing.assert_allclose(out, 0.4 * sx, atol=1e-12)

    def test_unnormalized_input_state_rejected(self):
        with pytest.raises(ValidationError, match="input_state"):
            parse_problem(problem_text(input_state=[[2.0, 0.0], [0.0, 0.0]]))

    def test_user_supplied_init_requires_state(self):
        with pytest.raises(ValidationError, match="input_state"):
            parse_problem(problem_text(optimizer={"init_mode": "user_supplied"}))

    def test_derivative_forms_are_exclusive(self):
        with pytest.raises(ValidationError, match="exactly one derivative form"):
            parse_problem(problem_text(derivative_channel={"commuting": True, "terms": []}))

    def test_commuting_derivative_built_from_generator(self):
        pf = parse_problem(problem_text(derivative_channel={"commuting": True}))
        rho = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
        h = pf.generator.matrix
        expected = -1j * (h @ rho - rho @ h)
        np.testing.assert_allclose(pf.derivative_channel.apply(rho), expected, atol=1e-12)

    def test_bundled_problems_parse(self):
        paths = sorted(PROBLEMS.glob("*.json"))
        assert paths, "bundled problem corpus is missing"
        for path in paths:
            parse_problem(path.read_text())


class TestEmitProblem:
    def test_round_trip_is_stable(self):
        pf = parse_problem((PROBLEMS / "dephasing_08.json").read_text())
        once = emit_problem(pf)
        again = emit_problem(parse_problem(once))
        assert once == again

    def test_emitted_channel_is_explicit_kraus(self):
        doc = json.loads(emit_problem(parse_problem(MINIMAL)))
        assert "kraus" in doc["channel"]
        np.testing.assert_allclose(
            np.array(doc["channel"]["kraus"][0])[..., 0], np.eye(2), atol=1e-15)


class TestCliExitCodes:
    def test_success(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(MINIMAL)
        assert main(["qfi-max", "--problem", str(path)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["f_star"] == pytest.approx(1.0, abs=1e-8)

    def test_missing_file(self, capsys):
        assert main(["qfi-max", "--problem", "/nonexistent.json"]) == EXIT_VALIDATION
        assert "cannot read" in capsys.readouterr().err

    def test_invalid_problem(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text("{not json")
        assert main(["qfi-max", "--problem", str(path)]) == EXIT_VALIDATION

    def test_command_requires_section(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(MINIMAL)
        assert main(["cfi-max", "--problem", str(path)]) == EXIT_VALIDATION
        assert "requires a 'povm' section" in capsys.readouterr().err

    def test_numeric_failure(self, tmp_path, capsys):
        # coarse Bayes grid makes the two quadrature routes disagree
        path = tmp_path / "p.json"
        path.write_text(problem_text(
            input_state=[[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
            povm={"preset": "sigma_y"},
            bayes={"delta_prior": 0.3, "grid_points": 21, "sweep": [0.3]},
        ))
        assert main(["bayes-check", "--problem", str(path)]) == EXIT_NUMERIC


class TestCliBehavior:
    def test_flag_overrides_file_seed(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(problem_text(optimizer={"seed": 1, "restarts": 1}))
        main(["qfi-max", "--problem", str(path)])
        base = json.loads(capsys.readouterr().out)
        main(["qfi-max", "--problem", str(path), "--seed", "2"])
        overridden = json.loads(capsys.readouterr().out)
        assert base["config_echo"]["optimizer"]["seed"] == 1
        assert overridden["config_echo"]["optimizer"]["seed"] == 2

    def test_reports_reproducible_modulo_timestamp(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text((PROBLEMS / "dephasing_08.json").read_text())
        outs = []
        for _ in range(2):
            assert main(["qfi-max", "--problem", str(path)]) == EXIT_OK
            outs.append(re.sub(r'"timestamp": "[^"]*"', '"timestamp": null',
                               capsys.readouterr().out))
        assert outs[0] == outs[1]

    def test_trace_csv(self, tmp_path, capsys):
        problem = tmp_path / "p.json"
        problem.write_text(MINIMAL)
        csv_path = tmp_path / "trace.csv"
        main(["qfi-max", "--problem", str(problem), "--trace-csv", str(csv_path)])
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "n,f_n,degenerate,rank_deficit,irreducible"
        report = json.loads(capsys.readouterr().out)
        assert len(lines) - 1 == len(report["trace"])

    def test_quiet_omits_trace(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(MINIMAL)
        main(["qfi-max", "--problem", str(path), "--quiet"])
        report = json.loads(capsys.readouterr().out)
        assert report["trace"] == [] and report["iterations"] > 0

    def test_sld_report_details(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text((PROBLEMS / "sld_plus_state.json").read_text())
        main(["sld", "--problem", str(path)])
        report = json.loads(capsys.readouterr().out)
        l = np.array(report["details"]["L"])
        np.testing.assert_allclose(l[..., 0] + 1j * l[..., 1],
                                   np.array([[0, -1j], [1j, 0]]), atol=1e-12)


class TestBundledProblems:
    def test_qfi_max_beats_oracle_on_corpus(self):
        for name in ("identity_qubit.json", "dephasing_05.json",
                     "dephasing_08.json", "amplitude_damping_05.json"):
            pf = parse_problem((PROBLEMS / name).read_text())
            report = run_command("qfi-max", pf)
            oracle, _ = brute_force_max_qfi(pf.channel, pf.generator, n_samples=200, seed=0)
            assert report["f_star"] >= oracle - 1e-4, name
            assert report["converged"], name

    def test_general_matches_plain_on_commuting_problem(self):
        pf = parse_problem((PROBLEMS / "general_commuting_dephasing.json").read_text())
        plain = run_command("qfi-max", pf)
        general = run_command("qfi-max-general", pf)
        assert general["f_star"] == pytest.approx(plain["f_star"], abs=1e-7)

    def test_cfi_problem_saturates_qfi(self):
        pf = parse_problem((PROBLEMS / "cfi_sigma_y.json").read_text())
        report = run_command("cfi-max", pf)
        assert report["f_star"] == pytest.approx(1.0, abs=1e-8)

    def test_bayes_problem_sweep_monotone(self):
        pf = parse_problem((PROBLEMS / "bayes_qubit.json").read_text())
        report = run_command("bayes-check", pf)
        sweep = report["details"]["bayes_sweep"]
        values = [sweep[f"{d:g}"] for d in pf.bayes.sweep]
        assert values == sorted(values)
        assert report["f_star"] == pytest.approx(report["details"]["classical_fi"], abs=1e-3)
