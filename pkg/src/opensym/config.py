"""
Run configuration: YAML text to validated engine inputs.

Two forms are accepted. The shorthand names a catalog model::

    catalog: three_qubit_many_new
    candidate: catalog          # every catalog candidate, or one label
    check: independent          # or a list of kinds

The full form describes the system explicitly (see docs/config.md in the
repository for the complete schema)::

    system:
      factors:
        - {label: Sigma, kind: qubit, tag: S}
        - {label: Xi, kind: qubit, tag: R}
    hamiltonian:
      terms:
        - {coefficient: 0.35, ops: {Sigma: X, Xi: X}}
    candidates:
      - {label: Sigma3, scope: S, terms: [{coefficient: 1, ops: {Sigma: Z}}]}
    states:
      - {label: z08, bloch_R: [0, 0, 0.8]}
    checks:
      - {kind: dependent, candidate: Sigma3, state: z08, expect: {passes: true}}
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .catalog import BUILDERS, CatalogCheck, PaperModel, paper_catalog
from .engine import DEFAULT_S_VALUES, DEFAULT_TIMES, CandidateSymmetry, CheckSettings
from .errors import ConfigError, OpenSymError
from .model_library import OperatorExpression, StateSpec, Term, assemble_expression
from .operator_core import Factor, LabeledOperator, SpaceLayout

CHECK_KINDS = ("independent", "dependent", "correlated", "classify", "theorem1", "commutant",
               "shift", "closure", "spectrum", "constant", "dependent_constant", "covariance",
               "dependent_random", "witness")
NEEDS_CANDIDATE = {"independent", "dependent", "correlated", "classify", "theorem1", "shift",
                   "covariance", "dependent_random", "witness"}
NEEDS_STATE = {"dependent", "correlated", "covariance", "dependent_constant"}
DEFAULT_SEED = 42
FORMATS = ("human", "machine")


@dataclass
class CheckSpec:
    check: CatalogCheck
    settings: CheckSettings
    has_expectation: bool


@dataclass
class RunConfig:
    model: PaperModel
    checks: list
    seed: int = DEFAULT_SEED
    output: dict = field(default_factory=dict)
    source: str = "config"


class _Locator:
    """Maps key paths like ``checks[2].candidate`` to 1-based line numbers."""

    def __init__(self, text: str):
        try:
            self.root = yaml.compose(text)
        except yaml.YAMLError:
            self.root = None

    def line(self, path: tuple) -> int | None:
        node = self.root
        best = node.start_mark.line + 1 if node is not None else None
        for key in path:
            if node is None:
                break
            nxt = None
            if isinstance(node, yaml.MappingNode):
                for k, v in node.value:
                    if k.value == key:
                        nxt = v
                        best = k.start_mark.line + 1
                        break
            elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
                nxt = node.value[key]
                best = nxt.start_mark.line + 1
            node = nxt
        return best


def _fmt_path(path: tuple) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


class _Parser:
    def __init__(self, text: str):
        self.loc = _Locator(text)

    def fail(self, msg: str, path: tuple = (), exc=ConfigError):
        if exc is ConfigError:
            raise ConfigError(msg, _fmt_path(path), self.loc.line(path))
        raise exc(f"{msg} at {_fmt_path(path)} (line {self.loc.line(path)})")

    def get(self, mapping, key, path, kind=None, required=True, default=None):
        if not isinstance(mapping, dict):
            self.fail("expected a mapping", path)
        if key not in mapping:
            if required:
                self.fail(f"missing required key {key!r}", path)
            return default
        val = mapping[key]
        if kind is not None and not isinstance(val, kind):
            names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            self.fail(f"expected {names}, got {type(val).__name__}", path + (key,))
        return val

    # --- pieces ----------------------------------------------------------------

    def layout(self, node, path) -> SpaceLayout:
        facs = self.get(node, "factors", path, list)
        out = []
        for i, f in enumerate(facs):
            p = path + ("factors", i)
            try:
                out.append(Factor(self.get(f, "label", p, str), self.get(f, "kind", p, str),
                                  f.get("parameter"), self.get(f, "tag", p, str)))
            except OpenSymError as exc:
                self.fail(str(exc), p)
        try:
            return SpaceLayout(tuple(out), split=bool(node.get("split", True)))
        except OpenSymError as exc:
            self.fail(str(exc), path)

    def number(self, val, path) -> complex:
        if isinstance(val, bool):
            self.fail("expected a number", path)
        if isinstance(val, (int, float)):
            return complex(val)
        if isinstance(val, str):
            try:
                return complex(val.replace(" ", "").replace("i", "j"))
            except ValueError:
                pass
        if isinstance(val, list) and len(val) == 2 and all(isinstance(x, (int, float)) for x in val):
            return complex(val[0], val[1])
        self.fail(f"cannot read {val!r} as a number", path)

    def matrix(self, val, path, dim=None) -> np.ndarray:
        if not isinstance(val, list) or not all(isinstance(r, list) for r in val):
            self.fail("expected a matrix (list of rows)", path)
        if any(len(r) != len(val) for r in val):
            self.fail(f"matrix must be square with {len(val)} entries per row", path)
        m = np.array([[self.number(x, path + (i, j)) for j, x in enumerate(row)]
                      for i, row in enumerate(val)], dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            self.fail(f"matrix must be square, got {m.shape}", path)
        if dim is not None and m.shape[0] != dim:
            self.fail(f"matrix has dimension {m.shape[0]}, layout needs {dim}", path)
        return m

    def expression(self, terms, path, layout: SpaceLayout) -> OperatorExpression:
        if not isinstance(terms, list) or not terms:
            self.fail("expected a nonempty list of terms", path)
        out = []
        for i, t in enumerate(terms):
            p = path + (i,)
            coef = self.number(self.get(t, "coefficient", p, required=False, default=1.0), p + ("coefficient",))
            ops = self.get(t, "ops", p, dict)
            for lab, spec in ops.items():
                if lab not in layout.labels:
                    self.fail(f"unknown factor label {lab!r}; layout has {layout.labels}", p + ("ops", lab))
                if isinstance(spec, list):
                    ops[lab] = self.matrix(spec, p + ("ops", lab), layout.factor(lab).dim)
            out.append(Term(coef, ops))
        return OperatorExpression(out)

    def operator(self, node, path, layout, label, hamiltonian=False) -> LabeledOperator:
        try:
            if "matrix" in node:
                op = LabeledOperator(self.matrix(node["matrix"], path + ("matrix",), layout.total_dim),
                                     layout, label)
                if hamiltonian and not op.is_hermitian:
                    self.fail("Hamiltonian matrix is not Hermitian", path + ("matrix",))
                return op
            expr = self.expression(self.get(node, "terms", path), path + ("terms",), layout)
            return assemble_expression(expr, layout, label, hamiltonian=hamiltonian)
        except (OpenSymError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            self.fail(str(exc), path)

    def candidate(self, node, path, layout, model: PaperModel | None) -> CandidateSymmetry:
        label = self.get(node, "label", path, str)
        scope = self.get(node, "scope", path, str, required=False, default="joint")
        guard = self.get(node, "guard", path, int, required=False)
        try:
            if "catalog" in node:
                if model is None:
                    self.fail("catalog candidate needs a catalog hamiltonian", path + ("catalog",))
                return model.candidate(node["catalog"])
            if "generator" in node:
                gen = self.operator(node["generator"], path + ("generator",), layout, f"J[{label}]",
                                    hamiltonian=True)
                theta = float(self.get(node, "theta", path, (int, float)))
                return CandidateSymmetry.from_generator(gen, theta, label, scope, guard)
            U = self.operator(node, path, layout, label)
            return CandidateSymmetry(U, scope, label, guard=guard)
        except OpenSymError as exc:
            if isinstance(exc, ConfigError):
                raise
            self.fail(str(exc), path)
        except ValueError as exc:
            self.fail(str(exc), path)

    def state(self, node, path) -> StateSpec:
        label = self.get(node, "label", path, str)
        kw = {"label": label}
        for key in ("bloch_S", "bloch_R"):
            if key in node:
                v = node[key]
                if not isinstance(v, list) or len(v) != 3:
                    self.fail("expected a 3-vector", path + (key,))
                kw[key] = np.array([float(x) for x in v])
        if "Gamma" in node:
            g = self.matrix(node["Gamma"], path + ("Gamma",), 3)
            if np.abs(g.imag).max() > 0:
                self.fail("Gamma must be real", path + ("Gamma",))
            kw["Gamma"] = g.real
        if "rho_R" in node:
            kw["rho_R"] = self.matrix(node["rho_R"], path + ("rho_R",))
        try:
            spec = StateSpec(**kw)
            if spec.Gamma is not None or spec.bloch_S is not None:
                from .model_library import assemble_two_qubit_state
                assemble_two_qubit_state(StateSpec(**{**kw, "bloch_S": kw.get("bloch_S", np.zeros(3))}))
            return spec
        except OpenSymError as exc:
            self.fail(str(exc), path, exc=type(exc))

    def settings(self, node, path, base: CheckSettings) -> CheckSettings:
        kw = {}
        for key in ("times", "s_values"):
            if key in node:
                v = node[key]
                if not isinstance(v, list) or not v or not all(isinstance(x, (int, float)) for x in v):
                    self.fail("expected a nonempty list of numbers", path + (key,))
                kw[key] = tuple(float(x) for x in v)
        if "tolerance" in node:
            tol = node["tolerance"]
            if not isinstance(tol, (int, float)) or tol <= 0:
                self.fail("tolerance must be a positive number", path + ("tolerance",))
            kw["tolerance"] = float(tol)
        if "guard" in node:
            g = node["guard"]
            if not isinstance(g, int) or g < 1:
                self.fail("guard must be a positive integer", path + ("guard",))
            kw["guard"] = g
        if "taylor" in node:
            kw["taylor"] = bool(node["taylor"])
        merged = {"times": base.times, "s_values": base.s_values, "tolerance": base.tolerance,
                  "guard": base.guard, "taylor": base.taylor}
        merged.update(kw)
        return CheckSettings(**merged)


def _catalog_expectation(model: PaperModel, kind: str, candidate: str | None, state: str | None):
    for c in model.checks:
        if c.kind == kind and c.candidate == candidate and c.state == state:
            return dict(c.expect), dict(c.params)
    return None, {}


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a YAML run configuration.

    ``overrides`` may carry ``times``, ``tolerance``, ``guard`` and ``seed``
    from the command line; they replace the per-check values.
    """
    overrides = overrides or {}
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"YAML syntax error: {getattr(exc, 'problem', exc)}", None, line) from None
    p = _Parser(text)
    if not isinstance(raw, dict):
        p.fail("configuration must be a mapping")
    known = {"catalog", "params", "candidate", "check", "system", "hamiltonian", "candidates",
             "states", "checks", "output", "seed", "q_set"}
    for key in raw:
        if key not in known:
            p.fail(f"unknown top-level key {key!r}", (key,))

    seed = raw.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or isinstance(seed, bool):
        p.fail("seed must be an integer", ("seed",))
    if overrides.get("seed") is not None:
        seed = int(overrides["seed"])

    base = CheckSettings(DEFAULT_TIMES, DEFAULT_S_VALUES, None, 2, True)
    model = None
    catalog_name = raw.get("catalog")
    ham = raw.get("hamiltonian")
    if isinstance(ham, dict) and "catalog" in ham:
        catalog_name = ham["catalog"]
    if catalog_name is not None:
        path = ("catalog",) if "catalog" in raw else ("hamiltonian", "catalog")
        if not isinstance(catalog_name, str) or catalog_name not in BUILDERS:
            p.fail(f"unknown catalog name {catalog_name!r}; known: {sorted(BUILDERS)}", path)
        params = raw.get("params", (ham or {}).get("params", {}) if isinstance(ham, dict) else {})
        if not isinstance(params, dict):
            p.fail("params must be a mapping", path)
        try:
            model = paper_catalog(catalog_name, **params)
        except OpenSymError as exc:
            p.fail(str(exc), path)
        if model.truncation:
            base = CheckSettings(base.times, base.s_values, None, model.truncation.get("guard", 2), True)

    if model is None:
        if "system" not in raw or "hamiltonian" not in raw:
            p.fail("need either 'catalog' or both 'system' and 'hamiltonian'")
        layout = p.layout(raw["system"], ("system",))
        H = p.operator(raw["hamiltonian"], ("hamiltonian",), layout, "H", hamiltonian=True)
        model = PaperModel("custom", layout, H, {})
    elif "system" in raw:
        p.fail("'system' cannot be combined with a catalog model", ("system",))
    layout = model.layout

    for i, node in enumerate(raw.get("candidates", []) or []):
        c = p.candidate(node, ("candidates", i), layout, model if catalog_name else None)
        model.candidates[node["label"]] = c
    for i, node in enumerate(raw.get("states", []) or []):
        s = p.state(node, ("states", i))
        model.states[s.label] = s
    if "q_set" in raw:
        qs = raw["q_set"]
        if not isinstance(qs, list) or not qs:
            p.fail("q_set must be a nonempty list", ("q_set",))
        model.q_set = [p.operator(q, ("q_set", i), layout, q.get("label", f"Q{i}"))
                       for i, q in enumerate(qs)]

    checks = []
    if "check" in raw:
        kinds = raw["check"] if isinstance(raw["check"], list) else [raw["check"]]
        cand = raw.get("candidate", "catalog")
        for kind in kinds:
            if kind not in CHECK_KINDS:
                p.fail(f"unknown check kind {kind!r}; known: {list(CHECK_KINDS)}", ("check",))
            if cand == "catalog":
                matched = [c for c in model.checks if c.kind == kind]
                if not matched:
                    p.fail(f"catalog model {model.name!r} defines no {kind!r} checks", ("check",))
                for c in matched:
                    checks.append(CheckSpec(c, _apply(base, overrides), True))
            else:
                if kind in NEEDS_CANDIDATE and cand not in model.candidates:
                    p.fail(f"unknown candidate {cand!r}; known: {sorted(model.candidates)}", ("candidate",))
                exp, params = _catalog_expectation(model, kind, cand, None)
                checks.append(CheckSpec(CatalogCheck(kind, exp or {}, cand, None, params),
                                        _apply(base, overrides), exp is not None))
    for i, node in enumerate(raw.get("checks", []) or []):
        path = ("checks", i)
        kind = p.get(node, "kind", path, str)
        if kind not in CHECK_KINDS:
            p.fail(f"unknown check kind {kind!r}; known: {list(CHECK_KINDS)}", path + ("kind",))
        cand = node.get("candidate")
        state = node.get("state")
        if kind in NEEDS_CANDIDATE:
            if cand is None:
                p.fail(f"{kind!r} check needs a candidate", path)
            if cand not in model.candidates:
                p.fail(f"unknown candidate {cand!r}; known: {sorted(model.candidates)}", path + ("candidate",))
        if kind in NEEDS_STATE:
            if state is None:
                p.fail(f"{kind!r} check needs a state", path)
            if state not in model.states:
                p.fail(f"unknown state {state!r}; known: {sorted(model.states)}", path + ("state",))
        params = dict(node.get("params", {}) or {})
        for key in ("G", "r", "operator", "candidates", "samples"):
            if key in node:
                params[key] = node[key]
        if "G" in params and params["G"] not in model.operators:
            p.fail(f"unknown operator {params['G']!r}", path + ("G",))
        if "operator" in params and params["operator"] not in model.operators:
            p.fail(f"unknown operator {params['operator']!r}", path + ("operator",))
        if kind == "closure":
            names = params.get("candidates")
            if not isinstance(names, list) or not names:
                p.fail("closure needs a list of candidates", path)
            for n in names:
                if n not in model.candidates:
                    p.fail(f"unknown candidate {n!r}", path + ("candidates",))
        expect = node.get("expect")
        if expect is not None and not isinstance(expect, dict):
            p.fail("expect must be a mapping", path + ("expect",))
        settings = _apply(p.settings(node, path, base), overrides)
        checks.append(CheckSpec(CatalogCheck(kind, dict(expect or {}), cand, state, params),
                                settings, expect is not None))
    if not checks:
        p.fail("configuration defines no checks")

    output = raw.get("output", {}) or {}
    if not isinstance(output, dict):
        p.fail("output must be a mapping", ("output",))
    fmt = output.get("format", "human")
    if fmt not in FORMATS:
        p.fail(f"format must be one of {FORMATS}", ("output", "format"))
    return RunConfig(model, checks, seed, dict(output))


def _apply(settings: CheckSettings, overrides: dict) -> CheckSettings:
    kw = {"times": settings.times, "s_values": settings.s_values, "tolerance": settings.tolerance,
          "guard": settings.guard, "taylor": settings.taylor}
    for key in ("times", "tolerance", "guard"):
        if overrides.get(key) is not None:
            kw[key] = overrides[key]
    return CheckSettings(**kw)
