"""
Run reports: assembly, machine (JSON) emission, parsing and the human table.

The machine format is JSON with sorted keys and two-space indentation, so
identical inputs give byte-identical files. The schema is documented in
``docs/report.md``.
"""

from __future__ import annotations

import json
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from . import engine as E
from .config import RunConfig
from .errors import OpenSymError
from .runner import CheckOutcome, ModelRun, evaluate_check, format_table, params_tag

SCHEMA = "opensym.report/1"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def environment_stamp(layout=None) -> dict:
    env = {"opensym": __version__, "python": platform.python_version(),
           "numpy": np.__version__, "scipy": scipy.__version__}
    if layout is not None:
        env["dimensions"] = {"total": layout.total_dim,
                             "factors": {f.label: f.dim for f in layout.factors}}
    return env


def _status(result: dict) -> str:
    """PASS/FAIL for one result row.

    Rows with an expectation succeed when it matches. Rows without one
    succeed when the check itself passes (or has no verdict, as for
    classifications and spectra).
    """
    if result.get("error"):
        return "FAIL"
    if result["has_expectation"]:
        return "PASS" if result["matches"] else "FAIL"
    return "FAIL" if result["observed"].get("passes") is False else "PASS"


@dataclass
class Report:
    command: str
    seed: int
    environment: dict
    results: list
    model: dict = field(default_factory=dict)
    timings: dict | None = None
    schema: str = SCHEMA

    @property
    def summary(self) -> dict:
        statuses = [_status(r) for r in self.results]
        return {"total": len(statuses), "ok": statuses.count("PASS"), "failed": statuses.count("FAIL"),
                "exit_code": EXIT_OK if "FAIL" not in statuses else EXIT_FAIL}

    @property
    def exit_code(self) -> int:
        return self.summary["exit_code"]

    def to_dict(self) -> dict:
        out = {"schema": self.schema, "command": self.command, "seed": self.seed,
               "environment": self.environment, "model": self.model,
               "results": self.results, "summary": self.summary}
        if self.timings is not None:
            out["timings"] = self.timings
        return E._plain(out)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != SCHEMA:
            raise OpenSymError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["command"], d["seed"], d["environment"], d["results"], d.get("model", {}),
                   d.get("timings"), d["schema"])

    def __eq__(self, other) -> bool:
        return isinstance(other, Report) and self.to_dict() == other.to_dict()


def emit_machine(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def _result_row(index: int, outcome: CheckOutcome, has_expectation: bool, settings: E.CheckSettings,
                model, extra: dict | None = None) -> dict:
    row = outcome.to_dict()
    row.update({"index": index, "has_expectation": has_expectation,
                "settings": {"times": list(settings.times), "s_values": list(settings.s_values),
                             "tolerance": settings.tol_for(model.layout), "guard": settings.guard}})
    if not has_expectation:
        row["mismatches"] = []
        row["matches"] = True
    row.update(extra or {})
    row["status"] = _status(row)
    return E._plain(row)


def run_checks(config: RunConfig, command: str = "check", timings: bool = False,
               jobs: int = 1) -> Report:
    """Execute every check of ``config`` and assemble a report in config order.

    Engine errors propagate annotated with the check index.
    """
    model = config.model

    def one(item):
        i, spec = item
        t0 = time.perf_counter()
        try:
            outcome = evaluate_check(model, spec.check, spec.settings, seed=[config.seed, i])
        except OpenSymError as exc:
            raise type(exc)(f"checks[{i}] ({spec.check.label}): {exc}") from exc
        return outcome, time.perf_counter() - t0

    items = list(enumerate(config.checks))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(one, items))
    else:
        done = [one(it) for it in items]
    results = [_result_row(i, out, spec.has_expectation, spec.settings, model)
               for (i, spec), (out, _) in zip(items, done)]
    tim = {f"checks[{i}]": dt for i, (_, dt) in enumerate(done)} if timings else None
    return Report(command, config.seed, environment_stamp(model.layout), results,
                  {"name": model.name, "params": E._plain(model.params)}, tim)


def paper_examples_report(runs: list[ModelRun], seed: int, timings: dict | None = None) -> Report:
    results = []
    for run in runs:
        for o in run.outcomes:
            row = o.to_dict()
            row.update({"index": len(results), "has_expectation": True,
                        "variant": params_tag(run.params), "params": run.params})
            row["status"] = _status(row)
            results.append(E._plain(row))
    return Report("paper-examples", seed, environment_stamp(), results, {}, timings)


def spectrum_report(model, eigenvalues: np.ndarray, seed: int) -> Report:
    w = np.asarray(eigenvalues, dtype=float)
    row = {"index": 0, "kind": "spectrum", "label": "spectrum", "model": model.name,
           "has_expectation": False, "matches": True, "mismatches": [], "expected": {},
           "observed": {"eigenvalues": [float(x) for x in w], "min_eigenvalue": float(w.min()),
                        "max_eigenvalue": float(w.max())},
           "max_deviation": None, "interior_projected": False}
    row["status"] = _status(row)
    return Report("spectrum", seed, environment_stamp(model.layout), [row],
                  {"name": model.name, "params": E._plain(model.params)})


# --- human format -------------------------------------------------------------


def _detail(row: dict) -> str:
    if row.get("mismatches"):
        return "; ".join(row["mismatches"])
    obs = row["observed"]
    keys = [k for k in ("passes", "commutes_with_H", "R_scalar", "R_commutes_H", "shift_r",
                        "residual", "value", "pass_count") if k in obs]
    return " ".join(f"{k}={_short(obs[k])}" for k in keys)


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def format_human(report: Report) -> str:
    if report.command == "paper-examples":
        return _paper_table(report)
    if report.command == "spectrum":
        return format_spectrum(report)
    header = f"{'#':>3s}  {'status':6s}  {'check':36s}  {'max_dev':>10s}  {'tol':>8s}  {'interior':8s}  detail"
    lines = [f"model: {report.model.get('name')}  seed: {report.seed}", header, "-" * len(header)]
    for r in report.results:
        dev = "" if r["max_deviation"] is None else f"{r['max_deviation']:10.3e}"
        tol = f"{r['settings']['tolerance']:8.1e}"
        interior = "yes" if r["interior_projected"] else "no"
        lines.append(f"{r['index']:3d}  {r['status']:6s}  {r['label'][:36]:36s}  {dev:>10s}  {tol:>8s}  "
                     f"{interior:8s}  {_detail(r)}")
    s = report.summary
    lines += ["-" * len(header), f"{s['ok']}/{s['total']} ok, exit code {s['exit_code']}"]
    if report.timings:
        lines.append("timings (s): " + " ".join(f"{k}={v:.3f}" for k, v in report.timings.items()))
    return "\n".join(lines) + "\n"


def _paper_table(report: Report) -> str:
    runs = {}
    for r in report.results:
        key = (r["model"], r["variant"])
        runs.setdefault(key, ModelRun(r["model"], r["params"], []))
        runs[key].outcomes.append(CheckOutcome(r["model"], r["label"], r["kind"], r["observed"],
                                               r["expected"], r["mismatches"], r["max_deviation"],
                                               r["interior_projected"]))
    out = format_table(list(runs.values())) + "\n"
    if report.timings:
        out += "timings (s): " + " ".join(f"{k}={v:.3f}" for k, v in report.timings.items()) + "\n"
    return out


def format_spectrum(report: Report) -> str:
    w = np.array(report.results[0]["observed"]["eigenvalues"])
    lines = [f"model: {report.model.get('name')}  dimension: {w.size}",
             f"{'eigenvalue':>20s}  {'multiplicity':>12s}"]
    # group numerically degenerate levels
    groups = []
    for x in w:
        if groups and abs(x - groups[-1][0]) <= 1e-9 * max(1.0, abs(x)):
            groups[-1][1] += 1
        else:
            groups.append([x, 1])
    lines += [f"{x:20.12g}  {m:12d}" for x, m in groups]
    return "\n".join(lines) + "\n"
