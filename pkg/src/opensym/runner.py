"""Evaluation of catalog checks against their expected outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import engine as E
from .catalog import PAPER_EXAMPLES, CatalogCheck, PaperModel, paper_catalog, witness_element
from .errors import CatalogError

FLOAT_MATCH_TOL = 1e-6


@dataclass
class CheckOutcome:
    model: str
    label: str
    kind: str
    observed: dict
    expected: dict
    mismatches: list = field(default_factory=list)
    max_deviation: float | None = None
    interior_projected: bool = False

    @property
    def matches(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "label": self.label,
            "kind": self.kind,
            "observed": E._plain(self.observed),
            "expected": E._plain(self.expected),
            "matches": self.matches,
            "mismatches": list(self.mismatches),
            "max_deviation": self.max_deviation,
            "interior_projected": self.interior_projected,
        }


def compare(observed: dict, expected: dict) -> list[str]:
    """Keys of ``expected`` whose observed value does not satisfy it."""
    bad = []
    for key, want in expected.items():
        if key not in observed:
            bad.append(f"{key}: not observed")
            continue
        got = observed[key]
        if isinstance(want, (list, tuple)) and len(want) == 2 and want[0] in ("<=", ">="):
            op, bound = want
            ok = got is not None and (got <= bound if op == "<=" else got >= bound)
        elif isinstance(want, bool) or isinstance(got, bool):
            ok = got is want or got == want
        elif isinstance(want, (int, float)):
            ok = got is not None and abs(got - want) <= FLOAT_MATCH_TOL
        else:
            ok = got == want
        if not ok:
            bad.append(f"{key}: expected {want!r}, observed {got!r}")
    return bad


def _settings_for(model: PaperModel, settings: E.CheckSettings | None) -> E.CheckSettings:
    if settings is not None:
        return settings
    guard = (model.truncation or {}).get("guard", 2)
    return E.CheckSettings(guard=guard)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank density matrix ``G G^dag / Tr`` from a complex Ginibre draw."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def evaluate_check(model: PaperModel, check: CatalogCheck,
                   settings: E.CheckSettings | None = None, seed=None) -> CheckOutcome:
    """Run one check and compare it with its expectation.

    ``seed`` feeds the random reservoir states of ``dependent_random``; it
    may be an int or a sequence of ints accepted by ``numpy.random.default_rng``.
    """
    settings = _settings_for(model, settings)
    H = model.H
    kind = check.kind
    obs: dict = {}
    max_dev = None
    projected = False
    cand = model.candidate(check.candidate) if check.candidate else None

    if kind == "independent":
        v = E.check_independent(H, cand, model.q_set, settings, r_ops=model.r_ops)
        obs = {"passes": v.passes, "max_deviation": v.max_deviation,
               "commutes_with_H": v.flags.commutes_with_H,
               "commutator_norm": v.extras["commutator_norm"],
               "form_agreement": v.extras["form_agreement"]}
        max_dev, projected = v.max_deviation, v.interior_projected
    elif kind == "dependent":
        v = E.check_dependent(H, cand, model.state(check.state).rho_R, model.q_set, settings)
        obs = {"passes": v.passes, "max_deviation": v.max_deviation,
               "forms_agree": v.extras["forms_agree"]}
        max_dev = v.max_deviation
    elif kind == "dependent_random":
        rng = np.random.default_rng(seed)
        dim_r = model.layout.sub_layout("R").total_dim
        n = int(check.params.get("samples", 20))
        verdicts = [E.check_dependent(H, cand, random_density(dim_r, rng), model.q_set, settings)
                    for _ in range(n)]
        devs = [v.max_deviation for v in verdicts]
        obs = {"passes": all(v.passes for v in verdicts), "pass_count": sum(v.passes for v in verdicts),
               "samples": n, "max_deviation": max(devs), "min_deviation": min(devs)}
        max_dev = max(devs)
    elif kind == "correlated":
        v = E.check_correlated(H, cand, model.state(check.state), model.q_set, settings)
        obs = {"passes": v.passes, "max_deviation": v.max_deviation,
               "design_complete": v.extras["design_complete"],
               "design_scale": v.extras["design_scale"]}
        max_dev = v.max_deviation
    elif kind == "covariance":
        v = E.check_map_covariance(cand.U, model.state(check.state).rho_R, H, settings)
        obs = {"passes": v.passes, "max_deviation": v.max_deviation}
        max_dev = v.max_deviation
    elif kind == "classify":
        c = E.classify_R(H, cand, settings)
        obs = c.to_dict()
        if "G" in check.params:
            G = model.operator(check.params["G"])
            if c.shift_G is None:
                obs["shift_G_error"] = None
            else:
                w = E._Window(model.layout, E._guard_for(settings, cand.guard))
                obs["shift_G_error"] = w.norm(c.shift_G.matrix - G.matrix)
        projected = c.interior_projected
    elif kind == "theorem1":
        r = E.theorem1_deviation(H, cand, model.q_set, settings)
        obs = r.to_dict()
        max_dev, projected = max(r.commutator_residual, r.cocycle_residual), r.interior_projected
    elif kind == "commutant":
        r = E.theorem1_commutant(H, model.q_set)
        obs = r.to_dict()
    elif kind == "shift":
        g = model.operator(check.params["G"]) if "G" in check.params else check.params["r"]
        obs = {"residual": E.verify_shift_relation(cand, H, g, settings)}
        projected = model.layout.has_bosons
    elif kind == "closure":
        cands = [model.candidate(c) for c in check.params["candidates"]]
        entries = E.closure_check(cands, H, model.q_set, settings, r_ops=model.r_ops)
        obs = {e.label: e.passes for e in entries}
        obs.update({f"{e.label}:max_deviation": e.max_deviation for e in entries})
        projected = model.layout.has_bosons
    elif kind == "spectrum":
        w = spectrum(model)
        obs = {"min_eigenvalue": float(w.min()), "max_eigenvalue": float(w.max()),
               "integer_spectrum": bool(np.abs(w - np.round(w)).max() <= 1e-10)}
    elif kind == "witness":
        val = witness_element(model)
        obs = {"value": float(abs(val)), "imag": float(val.imag), "real": float(val.real)}
    elif kind == "constant":
        v = E.check_constant(model.operator(check.params["operator"]), H, settings)
        obs = {"passes": v.passes, "max_deviation": v.max_deviation}
        max_dev = v.max_deviation
    elif kind == "dependent_constant":
        v = E.check_dependent_constant(model.operator(check.params["operator"]), H,
                                       model.state(check.state).rho_R, settings)
        obs = {"passes": v.passes, "max_deviation": v.max_deviation}
        max_dev = v.max_deviation
    else:
        raise CatalogError(f"unknown check kind {kind!r}")
    return CheckOutcome(model.name, check.label, kind, obs, dict(check.expect),
                        compare(obs, check.expect), max_dev, projected)


def spectrum(model: PaperModel) -> np.ndarray:
    """Eigenvalues of the (truncated) Hamiltonian in ascending order."""
    return np.linalg.eigvalsh(0.5 * (model.H.matrix + model.H.matrix.conj().T))


@dataclass
class ModelRun:
    model: str
    params: dict
    outcomes: list

    @property
    def matches(self) -> bool:
        return all(o.matches for o in self.outcomes)


def run_model(model: PaperModel, settings: E.CheckSettings | None = None) -> ModelRun:
    return ModelRun(model.name, E._plain(model.params),
                    [evaluate_check(model, c, settings) for c in model.checks])


def run_paper_examples(settings: E.CheckSettings | None = None, examples=PAPER_EXAMPLES,
                       mutate=None) -> list[ModelRun]:
    """Evaluate every catalog variant. ``mutate`` may rewrite each model before it runs."""
    runs = []
    for name, params in examples:
        model = paper_catalog(name, **params)
        if mutate is not None:
            model = mutate(model)
        run = run_model(model, settings)
        run.params = E._plain(dict(params))
        runs.append(run)
    return runs


def format_table(runs: list[ModelRun]) -> str:
    """Fixed-width PASS/FAIL table, one row per check."""
    header = (f"{'status':6s}  {'model':20s}  {'variant':26s}  {'check':32s}  "
              f"{'max_dev':>10s}  {'interior':8s}  detail")
    lines = [header, "-" * len(header)]
    for run in runs:
        variant = params_tag(run.params)
        for o in run.outcomes:
            dev = "" if o.max_deviation is None else f"{o.max_deviation:10.3e}"
            interior = "yes" if o.interior_projected else "no"
            lines.append(f"{'PASS' if o.matches else 'FAIL':6s}  {run.model[:20]:20s}  {variant[:26]:26s}  "
                         f"{o.label[:32]:32s}  {dev:>10s}  {interior:8s}  {'; '.join(o.mismatches)}")
    total = sum(len(r.outcomes) for r in runs)
    bad = sum(not o.matches for r in runs for o in r.outcomes)
    lines.append("-" * len(header))
    lines.append(f"{total - bad}/{total} expectations matched across {len(runs)} model runs")
    return "\n".join(lines)


def params_tag(params: dict) -> str:
    parts = []
    for key in sorted(params):
        val = params[key]
        if isinstance(val, (list, tuple)):
            val = ",".join(f"{x:g}" if isinstance(x, float) else str(x) for x in val)
        parts.append(f"{key}={val}")
    return " ".join(parts)
