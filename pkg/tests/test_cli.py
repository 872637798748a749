import json
import textwrap

import numpy as np
import pytest

from opensym import cli
from opensym.config import DEFAULT_SEED, parse_config
from opensym.errors import ConfigError, InvalidStateError
from opensym.report import emit_machine, format_human, parse_report, run_checks

MINIMAL = "catalog: three_qubit_many_new\ncandidate: catalog\ncheck: independent\n"

CUSTOM = textwrap.dedent("""\
    seed: 9
    system:
      factors:
        - {label: Sigma, kind: qubit, tag: S}
        - {label: Xi, kind: qubit, tag: R}
    hamiltonian:
      terms:
        - {coefficient: 0.35, ops: {Sigma: X, Xi: X}}
        - {coefficient: 0.65, ops: {Sigma: Y, Xi: Y}}
        - {coefficient: 1.05, ops: {Sigma: Z, Xi: Z}}
    candidates:
      - {label: Sigma3, scope: S, terms: [{coefficient: 1, ops: {Sigma: Z}}]}
      - {label: rot, scope: S, generator: {terms: [{ops: {Sigma: Z}}]}, theta: 0.4}
      - label: swap
        matrix: [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    states:
      - {label: z08, bloch_R: [0, 0, 0.8]}
      - {label: rho, rho_R: [[0.5, "0.2-0.1i"], ["0.2+0.1i", 0.5]]}
    checks:
      - {kind: dependent, candidate: Sigma3, state: z08, expect: {passes: true}}
      - {kind: dependent, candidate: Sigma3, state: rho, expect: {passes: false}}
      - {kind: independent, candidate: swap, times: [0.5, 1.5], expect: {passes: true}}
      - {kind: dependent_random, candidate: Sigma3, samples: 4, expect: {passes: false}}
    """)


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.seed == DEFAULT_SEED
    assert cfg.model.name == "three_qubit_many_new"
    kinds = {s.check.kind for s in cfg.checks}
    assert kinds == {"independent"}
    assert {s.check.candidate for s in cfg.checks} >= {"Pi1", "Sigma1"}


def test_minimal_config_report_for_pi1():
    report = run_checks(parse_config(MINIMAL))
    row = next(r for r in report.results if r["label"] == "independent Pi1")
    assert row["observed"]["passes"] is True
    assert row["observed"]["commutes_with_H"] is False
    assert report.exit_code == 0


def test_dependent_case_four_config():
    text = textwrap.dedent("""\
        catalog: dependent_qubits
        params: {gamma: [0.7, 1.3, 2.1]}
        checks:
          - {kind: dependent, candidate: Sigma3, state: z08}
        """)
    report = run_checks(parse_config(text))
    assert report.results[0]["observed"]["passes"] is True


def test_shift_classification_config():
    text = "catalog: osc_without_bound\nparams: {N: 10}\nchecks:\n  - {kind: classify, candidate: V}\n"
    report = run_checks(parse_config(text))
    assert abs(report.results[0]["observed"]["shift_r"] - 1.0) < 1e-6


def test_custom_config_runs():
    cfg = parse_config(CUSTOM)
    assert cfg.seed == 9
    assert cfg.checks[2].settings.times == (0.5, 1.5)
    report = run_checks(cfg)
    assert [r["status"] for r in report.results] == ["PASS"] * 4
    assert report.exit_code == 0


def test_non_positive_correlations_rejected():
    text = textwrap.dedent("""\
        catalog: dependent_qubits
        states:
          - {label: bad, bloch_S: [0, 0, 0], bloch_R: [0, 0, 0], Gamma: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
        checks:
          - {kind: correlated, candidate: Sigma3, state: bad}
        """)
    with pytest.raises(InvalidStateError, match=r"states\[0\] \(line 3\)"):
        parse_config(text)


@pytest.mark.parametrize(
    "text, location, line",
    [
        (CUSTOM.replace("{Sigma: Z, Xi: Z}", "{Sigma: Z, Pi: Z}"), "hamiltonian.terms[2].ops.Pi", 10),
        (MINIMAL.replace("three_qubit_many_new", "nope"), "catalog", 1),
        (CUSTOM.replace("candidate: swap", "candidate: swop"), "checks[2].candidate", 22),
        (CUSTOM.replace("kind: dependent_random", "kind: magic"), "checks[3].kind", 23),
        (CUSTOM.replace("[0, 0, 0, 1]]", "[0, 0, 0]]"), "candidates[2].matrix", 15),
        (CUSTOM.replace("theta: 0.4", "theta: big"), "candidates[1].theta", 13),
        (CUSTOM.replace("seed: 9", "seed: x"), "seed", 1),
        (CUSTOM.replace("times: [0.5, 1.5]", "times: []"), "checks[2].times", 22),
        ("catalog: three_osc\nsurprise: 1\ncheck: spectrum\n", "surprise", 2),
    ],
)
def test_located_config_errors(text, location, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.location == location
    assert info.value.line == line


def test_yaml_syntax_error_has_line():
    with pytest.raises(ConfigError) as info:
        parse_config("catalog: three_osc\nchecks: [\n")
    assert info.value.line is not None


def test_matrix_dimension_checked():
    text = CUSTOM.replace("matrix: [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]",
                          "matrix: [[1, 0], [0, 1]]")
    with pytest.raises(ConfigError, match="dimension 2, layout needs 4"):
        parse_config(text)


def test_overrides_replace_settings():
    cfg = parse_config(MINIMAL, {"times": (0.2,), "tolerance": 1e-6, "guard": 3, "seed": 5})
    s = cfg.checks[0].settings
    assert s.times == (0.2,) and s.tolerance == 1e-6 and s.guard == 3
    assert cfg.seed == 5


def test_report_round_trip_and_determinism():
    a = emit_machine(run_checks(parse_config(CUSTOM)))
    b = emit_machine(run_checks(parse_config(CUSTOM)))
    assert a == b
    parsed = parse_report(a)
    assert emit_machine(parsed) == a
    assert parsed == run_checks(parse_config(CUSTOM))
    d = json.loads(a)
    assert d["seed"] == 9
    assert list(d) == sorted(d)
    assert d["environment"]["dimensions"]["total"] == 4


def test_seed_changes_random_samples_only():
    r1 = run_checks(parse_config(CUSTOM, {"seed": 1}))
    r2 = run_checks(parse_config(CUSTOM, {"seed": 2}))
    dev = [r["max_deviation"] for r in (r1.results[3], r2.results[3])]
    assert dev[0] != dev[1]
    assert r1.results[0] == r2.results[0]


def test_concurrent_run_preserves_order():
    cfg = parse_config(CUSTOM)
    assert emit_machine(run_checks(cfg, jobs=3)) == emit_machine(run_checks(cfg))


def test_human_report_is_fixed_width():
    text = format_human(run_checks(parse_config(CUSTOM)))
    lines = text.splitlines()
    rows = lines[3:-2]
    assert len(rows) == 4
    assert len({line.index("PASS") for line in rows}) == 1


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_check_exit_codes(tmp_path, capsys):
    good = write(tmp_path, "good.yaml", CUSTOM)
    assert cli.main(["check", good]) == 0
    failing = write(tmp_path, "fail.yaml", CUSTOM.replace("swap, times: [0.5, 1.5], expect: {passes: true}",
                                                           "swap, times: [0.5, 1.5], expect: {passes: false}"))
    assert cli.main(["check", failing]) == 1
    no_expect = write(tmp_path, "noexp.yaml",
                      "catalog: three_qubit_no_new\nchecks:\n  - {kind: independent, candidate: Pi1}\n")
    assert cli.main(["check", no_expect]) == 1
    bad = write(tmp_path, "bad.yaml", "catalog: nope\ncheck: independent\n")
    assert cli.main(["check", bad]) == 2
    assert cli.main(["check", str(tmp_path / "missing.yaml")]) == 2
    err = capsys.readouterr().err
    assert "unknown catalog name" in err


def test_cli_usage_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        cli.main(["check"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["paper-examples", "--tol", "-1"])
    assert info.value.code == 2


def test_cli_machine_output_to_file(tmp_path):
    cfg = write(tmp_path, "c.yaml", CUSTOM)
    out = tmp_path / "r.json"
    assert cli.main(["check", cfg, "--format", "machine", "--out", str(out), "--seed", "3"]) == 0
    d = json.loads(out.read_text())
    assert d["seed"] == 3 and d["command"] == "check"
    assert "timings" not in d
    assert cli.main(["check", cfg, "--format", "machine", "--out", str(out), "--timings"]) == 0
    assert "timings" in json.loads(out.read_text())


def test_cli_config_output_section(tmp_path):
    out = tmp_path / "from_config.json"
    cfg = write(tmp_path, "c.yaml", MINIMAL + f"output: {{path: {out}, format: machine}}\n")
    assert cli.main(["check", cfg]) == 0
    assert json.loads(out.read_text())["model"]["name"] == "three_qubit_many_new"


def test_cli_classify(tmp_path, capsys):
    cfg = write(tmp_path, "c.yaml", "catalog: osc_without_bound\ncandidate: V\ncheck: independent\n")
    assert cli.main(["classify", cfg, "--format", "machine"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert [r["kind"] for r in d["results"]] == ["classify"]
    assert abs(d["results"][0]["observed"]["shift_r"] - 1.0) < 1e-6


def test_cli_spectrum(tmp_path, capsys):
    cfg = write(tmp_path, "c.yaml", "catalog: osc_without_bound\nparams: {N: 4}\ncheck: spectrum\n")
    assert cli.main(["spectrum", cfg]) == 0
    out = capsys.readouterr().out.splitlines()
    levels = [line.split() for line in out[2:]]
    assert [(float(e), int(m)) for e, m in levels] == [(-3, 1), (-2, 2), (-1, 3), (0, 4), (1, 3), (2, 2), (3, 1)]
    assert cli.main(["spectrum", cfg, "--format", "machine"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert np.abs(np.array(d["results"][0]["observed"]["eigenvalues"]) - np.round(
        d["results"][0]["observed"]["eigenvalues"])).max() < 1e-12
