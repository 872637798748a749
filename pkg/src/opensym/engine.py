"""
Symmetry decisions for the open dynamics of a subsystem S.

A unitary U is an *independent* symmetry when, for every S observable Q and
every time t,

    exp(itH) U^dag Q U exp(-itH) == U^dag exp(itH) Q exp(-itH) U,

and a *dependent* one when this holds only after the reservoir is traced out
against a particular state rho_R (or, with correlations, only in mean values
for particular joint states W). The comparison unitary

    R(t) = U exp(-itH) U^dag exp(itH)

carries the structure behind these statements: it must commute with every
Heisenberg-evolved S observable, it obeys the cocycle identity
R(s+t) = R(s) exp(-isH) R(t) exp(isH), and when it commutes with H it
reduces to exp(-itG) with U H U^dag = H + G.

All-time statements are certified on a time grid plus a second-order Taylor
condition at t = 0. Bosonic models are compared on the interior of the
truncated Fock space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
import scipy.linalg as la

from .errors import InvalidStateError, LayoutError, ScopeError
from .model_library import (
    PAULI,
    bloch_density,
    factor_ops_for,
    interior_mask,
    two_qubit_density,
    validate_density,
)
from .operator_core import (
    LabeledOperator,
    OperatorSpan,
    SpaceLayout,
    _mat,
    commutant_basis,
    embed_factor_operator,
    embed_product,
    heisenberg_orbit,
    locality_deviation,
    partial_trace_R,
    propagator,
)

DEFAULT_TIMES = (0.1, 0.37, 1.0, math.sqrt(2.0), math.pi / 3, 2.5, 5.0)
DEFAULT_S_VALUES = (0.0, 0.45, 1.3, 3.1)
DEFAULT_TOL = 1e-9
BOSONIC_TOL = 1e-7
FORM_AGREEMENT_TOL = 1e-10
PHASE_FIT_TOL = 1e-6
SCOPES = ("S", "R", "joint")


@dataclass(frozen=True)
class CheckSettings:
    """Sampling grid and thresholds for a check.

    ``tolerance=None`` means 1e-9, relaxed to 1e-7 for layouts with bosons.
    ``guard`` is the number of top Fock levels excluded per boson mode.
    """

    times: tuple = DEFAULT_TIMES
    s_values: tuple = DEFAULT_S_VALUES
    tolerance: float | None = None
    guard: int = 2
    taylor: bool = True

    def __post_init__(self):
        if not len(self.times):
            raise ValueError("need at least one time")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "s_values", tuple(float(s) for s in self.s_values))

    def tol_for(self, layout: SpaceLayout) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return BOSONIC_TOL if layout.has_bosons else DEFAULT_TOL


@dataclass
class CandidateSymmetry:
    """A unitary to be tested, with its declared scope.

    ``scope`` is ``"S"`` (acts on S only), ``"R"`` (on R only) or ``"joint"``.
    S/R scope is verified structurally on layouts with a genuine tensor split.
    ``generator`` J and ``theta`` record a family member ``U = exp(-i theta J)``.
    ``guard`` overrides the check guard for operators that shift Fock levels
    by more than two units.
    """

    U: LabeledOperator
    scope: str = "joint"
    label: str = ""
    generator: LabeledOperator | None = None
    theta: float | None = None
    guard: int | None = None

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise ScopeError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if not self.label:
            self.label = self.U.label
        if not self.U.is_unitary:
            raise ValueError(f"candidate {self.label!r} is not unitary")
        lay = self.U.layout
        if self.scope != "joint" and lay.split:
            dev = locality_deviation(self.U, lay, self.scope)
            if dev > 1e-10:
                raise ScopeError(f"candidate {self.label!r} declared {self.scope}-only "
                                 f"but deviates from that form by {dev:.3g}")

    @classmethod
    def from_generator(cls, J: LabeledOperator, theta: float, label: str = "",
                       scope: str = "joint", guard=None) -> "CandidateSymmetry":
        return cls(propagator(J, theta).relabel(label or f"exp(-i{theta:g}J)"), scope, label,
                   generator=J, theta=theta, guard=guard)

    def at(self, theta: float) -> "CandidateSymmetry":
        if self.generator is None:
            raise ValueError(f"candidate {self.label!r} has no generator")
        return CandidateSymmetry.from_generator(self.generator, theta,
                                                f"{self.label}@{theta:g}", self.scope, self.guard)

    def adjoint(self) -> "CandidateSymmetry":
        gen_theta = None if self.theta is None else -self.theta
        return CandidateSymmetry(self.U.dag().relabel(f"{self.label}^dag"), self.scope,
                                 f"{self.label}^dag", self.generator, gen_theta, self.guard)


@dataclass
class DeviationRow:
    q: str
    t: object
    deviation: float


@dataclass
class VerdictFlags:
    commutes_with_H: bool | None = None
    R_scalar: bool | None = None
    shift_r: float | None = None
    shift_G_norm: float | None = None


@dataclass
class SymmetryVerdict:
    """Outcome of one check; ``passes`` iff ``max_deviation <= tolerance``."""

    check_kind: str
    deviations: list
    max_deviation: float
    tolerance: float
    flags: VerdictFlags = field(default_factory=VerdictFlags)
    interior_projected: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def passes(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "check_kind": self.check_kind,
            "passes": self.passes,
            "max_deviation": float(self.max_deviation),
            "tolerance": float(self.tolerance),
            "interior_projected": self.interior_projected,
            "flags": {k: v for k, v in vars(self.flags).items()},
            "deviations": [{"q": r.q, "t": r.t, "deviation": float(r.deviation)}
                           for r in self.deviations],
            "extras": _plain(self.extras),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetryVerdict":
        return cls(
            check_kind=d["check_kind"],
            deviations=[DeviationRow(r["q"], r["t"], r["deviation"]) for r in d["deviations"]],
            max_deviation=d["max_deviation"],
            tolerance=d["tolerance"],
            flags=VerdictFlags(**d["flags"]),
            interior_projected=d["interior_projected"],
            extras=d.get("extras", {}),
        )


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


# --- internal helpers -----------------------------------------------------------


class _Window:
    """Norm restricted to the interior of a truncated Fock space (or the whole space)."""

    def __init__(self, layout: SpaceLayout, guard: int | None):
        self.mask = interior_mask(layout, guard) if (layout.has_bosons and guard) else None

    @property
    def active(self) -> bool:
        return self.mask is not None

    def cut(self, x: np.ndarray) -> np.ndarray:
        if self.mask is None:
            return x
        return x[np.ix_(self.mask, self.mask)]

    def norm(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(self.cut(x)))

    def projector(self, dim: int) -> np.ndarray:
        if self.mask is None:
            return np.eye(dim)
        return np.diag(self.mask.astype(float))


def _unitary_of(U) -> tuple[np.ndarray, str, str, int | None]:
    if isinstance(U, CandidateSymmetry):
        return U.U.matrix, U.label, U.scope, U.guard
    return _mat(U), getattr(U, "label", "U"), "joint", None


def _guard_for(settings: CheckSettings, cand_guard) -> int:
    return settings.guard if cand_guard is None else max(settings.guard, cand_guard)


class _Dynamics:
    """Cached eigendecomposition of H for repeated Heisenberg evolutions."""

    def __init__(self, H: LabeledOperator):
        self.H = H
        h = H.matrix
        d = np.diag(h)
        if not np.any(h - np.diag(d)):
            # diagonal H: evolution is an elementwise phase
            self.w, self.v = d.real.copy(), None
        else:
            self.w, self.v = H.eigh

    def prop(self, t: float) -> np.ndarray:
        ph = np.exp(-1j * t * self.w)
        if self.v is None:
            return np.diag(ph)
        return (self.v * ph) @ self.v.conj().T

    def evolve(self, q: np.ndarray, t: float) -> np.ndarray:
        ph = np.exp(1j * t * self.w)
        if self.v is None:
            return q * np.outer(ph, ph.conj())
        qe = self.v.conj().T @ q @ self.v
        return self.v @ (qe * np.outer(ph, ph.conj())) @ self.v.conj().T


def _q_label(q, i):
    return getattr(q, "label", "") or f"Q{i}"


def _check_s_scope(Q_set, layout: SpaceLayout, r_ops, window: _Window, tol: float):
    for i, q in enumerate(Q_set):
        m = _mat(q)
        if r_ops:
            worst = max(window.norm(m @ _mat(b) - _mat(b) @ m) for b in r_ops)
            if worst > tol:
                raise ScopeError(f"{_q_label(q, i)} does not commute with the R operators "
                                 f"(deviation {worst:.3g})")
        elif layout.split:
            dev = locality_deviation(m, layout, "S")
            if dev > 1e-10:
                raise ScopeError(f"{_q_label(q, i)} is not an S operator (deviation {dev:.3g})")


def default_q_set(layout: SpaceLayout) -> list[LabeledOperator]:
    """Generators of the S operator algebra on a split layout.

    Single-factor generators (Paulis, spin components, a/adag/n) plus, for
    several S factors, the pairwise cross products of those generators.
    """
    gens = {"qubit": ("X", "Y", "Z"), "spin": ("J1", "J2", "J3"), "boson": ("a", "adag", "n")}
    per_factor = []
    for f in layout.s_factors:
        table = factor_ops_for(f)
        per_factor.append([(f.label, name, table[name]) for name in gens[f.kind]])
    out = [embed_factor_operator(m, lab, layout, f"{lab}.{name}")
           for ops in per_factor for lab, name, m in ops]
    for i in range(len(per_factor)):
        for j in range(i + 1, len(per_factor)):
            for (la_, na, ma), (lb, nb, mb) in product(per_factor[i], per_factor[j]):
                out.append(embed_product({la_: ma, lb: mb}, layout, f"{la_}.{na}*{lb}.{nb}"))
    return out


def reservoir_factor(rho_R, layout: SpaceLayout) -> np.ndarray:
    rho = _mat(rho_R)
    if rho.shape != (layout.r_dim, layout.r_dim):
        raise InvalidStateError(f"rho_R has shape {rho.shape}, reservoir dimension is {layout.r_dim}")
    return validate_density(rho, "rho_R")


def _reduce(x: np.ndarray, rho: np.ndarray, layout: SpaceLayout) -> np.ndarray:
    """``Tr_R[(I x rho_R) X]``."""
    ds, dr = layout.s_dim, layout.r_dim
    return np.einsum("ab,ibja->ij", rho, x.reshape(ds, dr, ds, dr))


# --- independent symmetries ---------------------------------------------------------


def check_independent(H: LabeledOperator, U, Q_set=None, settings: CheckSettings | None = None,
                      *, r_ops=None) -> SymmetryVerdict:
    """Operator-level symmetry test for all S observables and all joint states.

    deviation(Q, t) = || exp(itH) U^dag Q U exp(-itH) - U^dag exp(itH) Q exp(-itH) U ||_F.
    The equivalent form comparing evolution under H and under U H U^dag is
    evaluated independently and its agreement recorded in
    ``extras["form_agreement"]``.
    """
    settings = settings or CheckSettings()
    layout = H.layout
    u, ulabel, _, cand_guard = _unitary_of(U)
    Q_set = list(Q_set) if Q_set is not None else default_q_set(layout)
    window = _Window(layout, _guard_for(settings, cand_guard))
    tol = settings.tol_for(layout)
    _check_s_scope(Q_set, layout, r_ops, window, tol)

    d = layout.total_dim
    h = H.matrix
    ud = u.conj().T
    dyn = _Dynamics(H)
    hc = u @ h @ ud
    hc = 0.5 * (hc + hc.conj().T)
    dyn_c = _Dynamics(LabeledOperator(hc, layout, "UHU^dag"))
    p = window.projector(d)
    p_conj = u @ p @ ud

    rows = []
    agreement = 0.0
    for i, q in enumerate(Q_set):
        qm = _mat(q)
        conj_q = ud @ qm @ u
        name = _q_label(q, i)
        for t in settings.times:
            lhs = dyn.evolve(conj_q, t)
            rhs = ud @ dyn.evolve(qm, t) @ u
            dev = window.norm(lhs - rhs)
            alt = dyn.evolve(qm, t) - dyn_c.evolve(qm, t)
            dev_alt = float(np.linalg.norm(p_conj @ alt @ p_conj)) if window.active \
                else float(np.linalg.norm(alt))
            agreement = max(agreement, abs(dev - dev_alt))
            rows.append(DeviationRow(name, t, dev))
        if settings.taylor:
            c1l = h @ conj_q - conj_q @ h
            c1r = ud @ (h @ qm - qm @ h) @ u
            c2l = h @ c1l - c1l @ h
            inner = h @ qm - qm @ h
            c2r = ud @ (h @ inner - inner @ h) @ u
            rows.append(DeviationRow(name, "d1@0", window.norm(c1l - c1r)))
            rows.append(DeviationRow(name, "d2@0", window.norm(c2l - c2r)))

    comm = window.norm(u @ h - h @ u)
    r_dev = max(_scalar_deviation(_R_matrix(dyn, u, t), window) for t in settings.times)
    verdict = SymmetryVerdict(
        "independent", rows, max(r.deviation for r in rows), tol,
        VerdictFlags(commutes_with_H=comm <= tol, R_scalar=r_dev <= tol),
        interior_projected=window.active,
        extras={"candidate": ulabel, "commutator_norm": comm,
                "form_agreement": agreement, "R_scalar_deviation": r_dev},
    )
    return verdict


def _R_matrix(dyn: _Dynamics, u: np.ndarray, t: float) -> np.ndarray:
    ut = dyn.prop(t)
    return u @ ut @ u.conj().T @ ut.conj().T


def compute_R(H: LabeledOperator, U, t: float) -> LabeledOperator:
    """``R(t) = U exp(-itH) U^dag exp(itH)``."""
    u, label, _, _ = _unitary_of(U)
    return LabeledOperator(_R_matrix(_Dynamics(H), u, t), H.layout, f"R[{label}]({t:g})")


def _scalar_deviation(r: np.ndarray, window: _Window) -> float:
    rc = window.cut(r)
    z = np.trace(rc) / rc.shape[0]
    return float(np.linalg.norm(rc - z * np.eye(rc.shape[0])))


def _unitary_log(r: np.ndarray) -> np.ndarray:
    """Principal logarithm of a unitary via its complex Schur form."""
    t, z = la.schur(r, output="complex")
    phases = np.angle(np.diag(t))
    return z @ np.diag(1j * phases) @ z.conj().T


@dataclass
class RClassification:
    R_scalar: bool
    R_commutes_H: bool
    scalar_deviation: float
    commute_deviation: float
    shift_r: float | None = None
    phase_fit_residual: float | None = None
    shift_G: LabeledOperator | None = None
    shift_residual: float | None = None
    branch_residual: float | None = None
    interior_projected: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "R_scalar": self.R_scalar,
            "R_commutes_H": self.R_commutes_H,
            "scalar_deviation": float(self.scalar_deviation),
            "commute_deviation": float(self.commute_deviation),
            "shift_r": self.shift_r,
            "phase_fit_residual": self.phase_fit_residual,
            "shift_G_norm": None if self.shift_G is None else self.shift_G.norm(),
            "shift_residual": self.shift_residual,
            "branch_residual": self.branch_residual,
            "interior_projected": self.interior_projected,
            "notes": list(self.notes),
        }


def fit_phase_rate(times, values) -> tuple[float, float]:
    """Least-squares rate r with ``values ~ exp(-i r t)``, unwrapping branches in time order.

    The first (smallest) time fixes the branch; each later phase is moved to
    the branch nearest the running estimate. Returns ``(r, max residual)``.
    """
    order = np.argsort(times)
    ts = np.asarray(times, dtype=float)[order]
    zs = np.asarray(values)[order]
    keep = ts > 0
    ts, zs = ts[keep], zs[keep]
    phases = []
    rate = None
    for t, z in zip(ts, zs):
        phi = np.angle(z)
        if rate is not None:
            target = -rate * t
            phi = phi + 2 * np.pi * np.round((target - phi) / (2 * np.pi))
        phases.append(phi)
        tt = ts[: len(phases)]
        rate = -float(np.dot(tt, phases) / np.dot(tt, tt))
    phases = np.array(phases)
    resid = float(np.abs(phases + rate * ts).max())
    return rate, resid


def classify_R(H: LabeledOperator, U, settings: CheckSettings | None = None) -> RClassification:
    """Classify R(t) over the time grid: scalar, commuting with H, and the shift U H U^dag - H."""
    settings = settings or CheckSettings()
    layout = H.layout
    u, label, _, cand_guard = _unitary_of(U)
    window = _Window(layout, _guard_for(settings, cand_guard))
    tol = settings.tol_for(layout)
    dyn = _Dynamics(H)
    h = H.matrix
    times = sorted(t for t in settings.times if t > 0)
    if not times:
        raise ValueError("classification needs positive times")
    rs = {t: _R_matrix(dyn, u, t) for t in times}
    sdev = max(_scalar_deviation(r, window) for r in rs.values())
    cdev = max(window.norm(r @ h - h @ r) for r in rs.values())
    out = RClassification(sdev <= tol, cdev <= tol, sdev, cdev, interior_projected=window.active)
    if out.R_scalar and not out.R_commutes_H:
        out.notes.append("scalar R(t) failed the commutation test; check tolerances")
    shift_true = u @ h @ u.conj().T - h
    if out.R_scalar:
        zs = []
        for t in times:
            rc = window.cut(rs[t])
            zs.append(np.trace(rc) / rc.shape[0])
        rate, resid = fit_phase_rate(times, zs)
        out.phase_fit_residual = resid
        if resid > PHASE_FIT_TOL:
            out.notes.append(f"inconsistent phase fit (residual {resid:.3g}); no shift reported")
        else:
            out.shift_r = rate
            out.shift_residual = window.norm(shift_true - rate * np.eye(layout.total_dim))
    elif out.R_commutes_H:
        t0 = times[0]
        g = 1j * _unitary_log(rs[t0]) / t0
        g = 0.5 * (g + g.conj().T)
        branch = max(window.norm(rs[t] - la.expm(-1j * t * g)) for t in times)
        out.branch_residual = branch
        if branch > tol:
            out.notes.append(f"generator from t={t0:g} does not reproduce R(t) (residual {branch:.3g})")
        else:
            out.shift_G = LabeledOperator(g, layout, f"G[{label}]")
            out.shift_residual = window.norm(shift_true - g)
    return out


def verify_shift_relation(U, H: LabeledOperator, G_or_scalar,
                          settings: CheckSettings | None = None) -> float:
    """``|| U H U^dag - H - G ||_F`` (interior-projected for bosonic layouts)."""
    settings = settings or CheckSettings()
    u, _, _, cand_guard = _unitary_of(U)
    window = _Window(H.layout, _guard_for(settings, cand_guard))
    h = H.matrix
    if np.isscalar(G_or_scalar):
        g = G_or_scalar * np.eye(H.dim)
    else:
        g = _mat(G_or_scalar)
    return window.norm(u @ h @ u.conj().T - h - g)


@dataclass
class Theorem1Result:
    commutator_residual: float
    cocycle_residual: float
    tolerance: float
    interior_projected: bool

    @property
    def passes(self) -> bool:
        return (self.commutator_residual <= 10 * self.tolerance
                and self.cocycle_residual <= 10 * self.tolerance)

    def to_dict(self) -> dict:
        return {"commutator_residual": float(self.commutator_residual),
                "cocycle_residual": float(self.cocycle_residual),
                "tolerance": float(self.tolerance),
                "interior_projected": self.interior_projected,
                "passes": self.passes}


def theorem1_deviation(H: LabeledOperator, U, Q_set=None,
                       settings: CheckSettings | None = None) -> Theorem1Result:
    """Residuals of the two structural consequences of an independent symmetry.

    * ``max || [R(t), exp(isH) Q exp(-isH)] ||`` over the (t, s, Q) grid,
    * ``max || R(s+t) - R(s) exp(-isH) R(t) exp(isH) ||`` over grid pairs,
      with R(s+t) evaluated directly.
    """
    settings = settings or CheckSettings()
    layout = H.layout
    u, _, _, cand_guard = _unitary_of(U)
    Q_set = list(Q_set) if Q_set is not None else default_q_set(layout)
    window = _Window(layout, _guard_for(settings, cand_guard))
    dyn = _Dynamics(H)
    rs = {t: _R_matrix(dyn, u, t) for t in settings.times}
    comm = 0.0
    for q in Q_set:
        qm = _mat(q)
        for s in settings.s_values:
            qs = dyn.evolve(qm, s)
            for r in rs.values():
                comm = max(comm, window.norm(r @ qs - qs @ r))
    coc = 0.0
    for s in settings.s_values:
        us = dyn.prop(s)
        rs_s = _R_matrix(dyn, u, s)
        for t, rt in rs.items():
            direct = _R_matrix(dyn, u, s + t)
            coc = max(coc, window.norm(direct - rs_s @ us @ rt @ us.conj().T))
    return Theorem1Result(comm, coc, settings.tol_for(layout), window.active)


@dataclass
class CommutantResult:
    """Commutant of the Heisenberg orbit of the S observables."""

    commutant: OperatorSpan
    orbit_dimension: int
    commutes_with_H: bool
    max_H_commutator: float

    @property
    def dimension(self) -> int:
        return self.commutant.dimension

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "orbit_dimension": self.orbit_dimension,
                "commutes_with_H": self.commutes_with_H,
                "max_H_commutator": float(self.max_H_commutator)}


def theorem1_commutant(H: LabeledOperator, Q_set=None, tol: float = 1e-9,
                       rank_tol: float | None = None) -> CommutantResult:
    """Operators that every R(t) of an independent symmetry must lie among.

    R(t) commutes with every ``exp(isH) Q exp(-isH)``, i.e. with the span of
    Q and its iterated commutators with H. If every element of that
    commutant also commutes with H, R(t) commutes with H.
    """
    layout = H.layout
    Q_set = list(Q_set) if Q_set is not None else default_q_set(layout)
    orbit = heisenberg_orbit(Q_set, H)
    comm = commutant_basis(orbit, rank_tol=rank_tol)
    h = H.matrix
    worst = max((float(np.linalg.norm(x @ h - h @ x)) for x in comm.matrices), default=0.0)
    return CommutantResult(comm, orbit.dimension, worst <= tol, worst)


# --- dependent and correlated symmetries ----------------------------------------


def check_dependent(H: LabeledOperator, U, rho_R, Q_set=None,
                    settings: CheckSettings | None = None) -> SymmetryVerdict:
    """Reduced-operator symmetry test at a fixed reservoir state.

    deviation(Q, t) = || Tr_R[(I x rho_R)(exp(itH) U^dag Q U exp(-itH)
                                      - U^dag exp(itH) Q exp(-itH) U)] ||_F.

    For S-only U the equivalent comparison of dynamics under H and
    U H U^dag is also evaluated; for R-only U the comparisons under
    U^dag H U and at the transformed state U rho_R U^dag.
    """
    settings = settings or CheckSettings()
    layout = H.layout
    layout.require_open()
    if not layout.split:
        raise LayoutError("dependent checks need a layout with a genuine S/R tensor split")
    u, ulabel, scope, _ = _unitary_of(U)
    rho = reservoir_factor(rho_R, layout)
    Q_set = list(Q_set) if Q_set is not None else default_q_set(layout)
    tol = settings.tol_for(layout)
    _check_s_scope(Q_set, layout, None, _Window(layout, None), tol)
    dyn = _Dynamics(H)
    ud = u.conj().T
    h = H.matrix

    forms = {}
    if scope == "S":
        hc = u @ h @ ud
        forms["conjugated_dynamics"] = (_Dynamics(LabeledOperator(0.5 * (hc + hc.conj().T), layout)), rho)
    elif scope == "R":
        hc = ud @ h @ u
        forms["inverse_conjugated_dynamics"] = (_Dynamics(LabeledOperator(0.5 * (hc + hc.conj().T), layout)), rho)
        ur = _traced_r(u, layout)
        forms["transformed_reservoir_state"] = (dyn, ur @ rho @ ur.conj().T)

    rows = []
    form_max = {k: 0.0 for k in forms}
    agreement = 0.0
    for i, q in enumerate(Q_set):
        qm = _mat(q)
        conj_q = ud @ qm @ u
        name = _q_label(q, i)
        for t in settings.times:
            qt = dyn.evolve(qm, t)
            diff = dyn.evolve(conj_q, t) - ud @ qt @ u
            dev = float(np.linalg.norm(_reduce(diff, rho, layout)))
            rows.append(DeviationRow(name, t, dev))
            base = _reduce(qt, rho, layout)
            for key, (dyn_f, rho_f) in forms.items():
                alt = float(np.linalg.norm(base - _reduce(dyn_f.evolve(qm, t), rho_f, layout)))
                form_max[key] = max(form_max[key], alt)
                agreement = max(agreement, abs(alt - dev))
    max_dev = max(r.deviation for r in rows)
    forms_agree = all((v <= tol) == (max_dev <= tol) for v in form_max.values())
    comm = float(np.linalg.norm(u @ h - h @ u))
    return SymmetryVerdict(
        "dependent", rows, max_dev, tol, VerdictFlags(commutes_with_H=comm <= tol),
        extras={"candidate": ulabel, "scope": scope, "form_deviations": form_max,
                "form_agreement": agreement, "forms_agree": forms_agree,
                "commutator_norm": comm},
    )


def _traced_r(u: np.ndarray, layout: SpaceLayout) -> np.ndarray:
    """R factor of an R-only operator ``I x U_R``."""
    ds, dr = layout.s_dim, layout.r_dim
    return np.einsum("kikj->ij", u.reshape(ds, dr, ds, dr)) / ds


def bloch_design(scale: float = 1.0) -> list[np.ndarray]:
    """The six axis Bloch vectors (scaled) and the origin."""
    out = [np.zeros(3)]
    for k in range(3):
        for sgn in (1.0, -1.0):
            v = np.zeros(3)
            v[k] = sgn * scale
            out.append(v)
    return out


def _design_for(b, Gamma, design=None):
    """Largest dyadic scale of the axis design for which every joint state is valid."""
    if design is not None:
        ws = [two_qubit_density(a, b, Gamma) for a in design]
        if min(np.linalg.eigvalsh(w).min() for w in ws) < -1e-10:
            raise InvalidStateError("a design point gives an invalid joint state")
        return ws, 1.0, True
    w0 = two_qubit_density(None, b, Gamma)
    if np.linalg.eigvalsh(w0).min() < -1e-10:
        raise InvalidStateError("joint state with zero subsystem Bloch vector is not positive")
    for k in range(11):
        scale = 0.5 ** k
        ws = [two_qubit_density(a, b, Gamma) for a in bloch_design(scale)]
        if min(np.linalg.eigvalsh(w).min() for w in ws) >= -1e-10:
            return ws, scale, True
    return [w0], 0.0, False


def check_correlated(H: LabeledOperator, U, state, Q_set=None,
                     settings: CheckSettings | None = None, design=None) -> SymmetryVerdict:
    """Mean-value symmetry test on explicit joint states.

    ``state`` is either a joint density matrix W (a single state) or a
    two-qubit ``StateSpec`` giving reservoir Bloch vector b and correlation
    tensor Gamma; the subsystem Bloch vector then runs over an axis design.
    Mean values are affine in the subsystem Bloch vector, so the origin and
    the (possibly shrunken) six axis points cover every subsystem state.
    The design is shrunk by powers of two until every W is positive.
    """
    settings = settings or CheckSettings()
    layout = H.layout
    u, ulabel, _, _ = _unitary_of(U)
    Q_set = list(Q_set) if Q_set is not None else default_q_set(layout)
    tol = settings.tol_for(layout)
    extras = {"candidate": ulabel}
    if isinstance(state, (LabeledOperator, np.ndarray)):
        ws = [validate_density(_mat(state), "W")]
        extras.update(design_scale=None, design_complete=False)
    else:
        if layout.total_dim != 4:
            raise LayoutError("Bloch-design correlated checks are defined for two qubits")
        ws, scale, complete = _design_for(state.bloch_R, state.Gamma, design)
        extras.update(design_scale=scale, design_complete=complete)
    dyn = _Dynamics(H)
    ud = u.conj().T
    rows = []
    for i, q in enumerate(Q_set):
        qm = _mat(q)
        conj_q = ud @ qm @ u
        name = _q_label(q, i)
        for t in settings.times:
            diff = dyn.evolve(conj_q, t) - ud @ dyn.evolve(qm, t) @ u
            dev = max(abs(np.trace(w @ diff)) for w in ws)
            rows.append(DeviationRow(name, t, float(dev)))
    return SymmetryVerdict("correlated", rows, max(r.deviation for r in rows), tol,
                           extras=extras)


def heisenberg_reduced(Q: LabeledOperator, H: LabeledOperator, rho_R, t: float) -> LabeledOperator:
    """``Tr_R[(I x rho_R) exp(itH) Q exp(-itH)]`` as an operator on S."""
    layout = H.layout
    rho = reservoir_factor(rho_R, layout)
    red = _reduce(_Dynamics(H).evolve(_mat(Q), t), rho, layout)
    return LabeledOperator(red, layout.sub_layout("S"), f"reduced[{Q.label}]({t:g})")


def schrodinger_map(rho_S, rho_R, H: LabeledOperator, t: float) -> LabeledOperator:
    """``Phi(rho_S) = Tr_R[exp(-itH) (rho_S x rho_R) exp(itH)]``."""
    layout = H.layout
    rho_r = reservoir_factor(rho_R, layout)
    rho_s = validate_density(_mat(rho_S), "rho_S")
    ut = _Dynamics(H).prop(t)
    w = ut @ np.kron(rho_s, rho_r) @ ut.conj().T
    return partial_trace_R(LabeledOperator(w, layout, "W(t)"))


def spanning_density_matrices(d: int) -> list[np.ndarray]:
    """d^2 density matrices whose span is every d x d matrix."""
    out = []
    eye = np.eye(d)
    for i in range(d):
        out.append(np.outer(eye[i], eye[i]).astype(complex))
    for i in range(d):
        for j in range(i + 1, d):
            plus = (eye[i] + eye[j]) / np.sqrt(2)
            iplus = (eye[i] + 1j * eye[j]) / np.sqrt(2)
            out.append(np.outer(plus, plus.conj()))
            out.append(np.outer(iplus, iplus.conj()))
    return out


def check_map_covariance(U_S, rho_R, H: LabeledOperator, settings: CheckSettings | None = None,
                         states=None) -> SymmetryVerdict:
    """Covariance of the reduced dynamical map under an S-only unitary.

    deviation = max over states and times of
    || U_S Phi(rho_S) U_S^dag - Phi(U_S rho_S U_S^dag) ||_F.
    """
    settings = settings or CheckSettings()
    layout = H.layout
    rho_r = reservoir_factor(rho_R, layout)
    us = _mat(U_S)
    if us.shape == (layout.total_dim, layout.total_dim):
        if locality_deviation(us, layout, "S") > 1e-10:
            raise ScopeError("map covariance needs an S-only unitary")
        us = _traced_s_part(us, layout)
    states = states if states is not None else spanning_density_matrices(layout.s_dim)
    dyn = _Dynamics(H)
    tol = settings.tol_for(layout)
    rows = []
    for t in settings.times:
        ut = dyn.prop(t)

        def phi(rs):
            w = ut @ np.kron(rs, rho_r) @ ut.conj().T
            return np.einsum("ikjk->ij", w.reshape(layout.s_dim, layout.r_dim,
                                                   layout.s_dim, layout.r_dim))

        worst = 0.0
        for rs in states:
            lhs = us @ phi(rs) @ us.conj().T
            rhs = phi(us @ rs @ us.conj().T)
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
        rows.append(DeviationRow("map", t, worst))
    return SymmetryVerdict("covariance", rows, max(r.deviation for r in rows), tol)


def _traced_s_part(u: np.ndarray, layout: SpaceLayout) -> np.ndarray:
    ds, dr = layout.s_dim, layout.r_dim
    return np.einsum("ikjk->ij", u.reshape(ds, dr, ds, dr)) / dr


# --- constants of the motion ----------------------------------------------------


def check_constant(Q: LabeledOperator, H: LabeledOperator,
                   settings: CheckSettings | None = None) -> SymmetryVerdict:
    """``|| exp(itH) Q exp(-itH) - Q ||_F`` over the grid."""
    settings = settings or CheckSettings()
    window = _Window(H.layout, settings.guard)
    dyn = _Dynamics(H)
    qm = _mat(Q)
    rows = [DeviationRow(Q.label, t, window.norm(dyn.evolve(qm, t) - qm)) for t in settings.times]
    comm = window.norm(qm @ H.matrix - H.matrix @ qm)
    return SymmetryVerdict("constant", rows, max(r.deviation for r in rows),
                           settings.tol_for(H.layout), VerdictFlags(commutes_with_H=None),
                           interior_projected=window.active, extras={"commutator_norm": comm})


def check_dependent_constant(Q: LabeledOperator, H: LabeledOperator, rho_R,
                             settings: CheckSettings | None = None) -> SymmetryVerdict:
    """``|| Tr_R[(I x rho_R) exp(itH) Q exp(-itH)] - Q_S ||_F`` over the grid."""
    settings = settings or CheckSettings()
    layout = H.layout
    layout.require_open()
    rho = reservoir_factor(rho_R, layout)
    dyn = _Dynamics(H)
    qm = _mat(Q)
    q_s = _reduce(qm, rho, layout)
    rows = [DeviationRow(Q.label, t, float(np.linalg.norm(_reduce(dyn.evolve(qm, t), rho, layout) - q_s)))
            for t in settings.times]
    return SymmetryVerdict("dependent_constant", rows, max(r.deviation for r in rows),
                           settings.tol_for(layout))


# --- closure ---------------------------------------------------------------------


@dataclass
class ClosureEntry:
    label: str
    passes: bool
    max_deviation: float


def closure_check(verified, H: LabeledOperator, Q_set=None, settings: CheckSettings | None = None,
                  *, rho_R=None, r_ops=None) -> list[ClosureEntry]:
    """Re-run the symmetry check on every pairwise product and every adjoint.

    Products are taken in both orders (and squares). Adjoints need not pass.
    With ``rho_R`` the dependent check is used, otherwise the independent one.
    """
    settings = settings or CheckSettings()
    cands = list(verified)

    def run(c):
        if rho_R is None:
            return check_independent(H, c, Q_set, settings, r_ops=r_ops)
        return check_dependent(H, c, rho_R, Q_set, settings)

    entries = []
    for a, b in product(cands, repeat=2):
        prod = LabeledOperator(a.U.matrix @ b.U.matrix, H.layout, f"{a.label}*{b.label}")
        scope = a.scope if a.scope == b.scope else "joint"
        guard = max(a.guard or 0, b.guard or 0) or None
        c = CandidateSymmetry(prod, scope, prod.label, guard=guard)
        v = run(c)
        entries.append(ClosureEntry(c.label, v.passes, v.max_deviation))
    for a in cands:
        v = run(a.adjoint())
        entries.append(ClosureEntry(f"{a.label}^dag", v.passes, v.max_deviation))
    return entries
