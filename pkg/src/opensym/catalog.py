"""
Catalog of the worked example systems.

Each entry builds a layout, a Hamiltonian, candidate unitaries and states,
and a list of declarative checks with their expected outcomes. The regression
runner evaluates every check and compares the observation with the
expectation.

Oscillator systems are built directly in their normal-mode Fock bases,
where H is diagonal and the shift operators act as partial permutations.
The subsystem operators (A, A^dag, ...) are then linear combinations of the
normal-mode ladders, so those layouts have no literal S/R tensor split and
carry explicit reservoir operators for the scope check instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .engine import CandidateSymmetry
from .errors import CatalogError
from .model_library import (
    OperatorExpression,
    StateSpec,
    assemble_expression,
    factor_ops_for,
    named,
    two_qubit_layout,
)
from .operator_core import Factor, LabeledOperator, SpaceLayout, embed_product, identity
from .oracle import condition_case, rotation_family_predicted


@dataclass
class CatalogCheck:
    """One check with its expected outcome.

    ``expect`` maps observed quantities to expected values. A plain value is
    compared exactly (booleans, integers) or to 1e-6 (floats); a pair
    ``[op, value]`` with ``op`` in ``<=``, ``>=`` is a bound.
    """

    kind: str
    expect: dict
    candidate: str | None = None
    state: str | None = None
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        parts = [self.kind]
        if self.candidate:
            parts.append(self.candidate)
        if self.state:
            parts.append(f"@{self.state}")
        if "operator" in self.params:
            parts.append(str(self.params["operator"]))
        return " ".join(parts)


@dataclass
class PaperModel:
    name: str
    layout: SpaceLayout
    H: LabeledOperator
    candidates: dict
    states: dict = field(default_factory=dict)
    q_set: list | None = None
    r_ops: list | None = None
    truncation: dict | None = None
    checks: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    operators: dict = field(default_factory=dict)

    def candidate(self, label: str) -> CandidateSymmetry:
        try:
            return self.candidates[label]
        except KeyError:
            raise CatalogError(f"model {self.name!r} has no candidate {label!r}; "
                               f"known: {sorted(self.candidates)}") from None

    def state(self, label: str) -> StateSpec:
        try:
            return self.states[label]
        except KeyError:
            raise CatalogError(f"model {self.name!r} has no state {label!r}; "
                               f"known: {sorted(self.states)}") from None

    def operator(self, label: str) -> LabeledOperator:
        try:
            return self.operators[label]
        except KeyError:
            raise CatalogError(f"model {self.name!r} has no operator {label!r}; "
                               f"known: {sorted(self.operators)}") from None


def _candidates(*cands) -> dict:
    return {c.label: c for c in cands}


def _pauli_sum(layout, pairs, label="H"):
    return assemble_expression(OperatorExpression.from_pairs(pairs), layout, label, hamiltonian=True)


# --- qubit systems -----------------------------------------------------------


def two_qubit_general(alpha=(0.3, -0.5, 0.8), beta=(0.6, 0.2, -0.4), gamma=(0.7, 1.3, 2.1)):
    lay = two_qubit_layout()
    pairs = []
    for j, k in enumerate("XYZ"):
        pairs += [(0.5 * alpha[j], {"Sigma": k}), (0.5 * beta[j], {"Xi": k}),
                  (0.5 * gamma[j], {"Sigma": k, "Xi": k})]
    H = _pauli_sum(lay, pairs)
    nonzero = sum(abs(g) > 0 for g in gamma)
    if nonzero == 0:
        raise CatalogError("two_qubit_general needs a nonzero coupling gamma")
    if nonzero == 1:
        k = next(i for i, g in enumerate(gamma) if g)
        others = [beta[i] for i in range(3) if i != k]
        dim = 2 if all(b == 0 for b in others) else 1
    else:
        dim = 1
    cands = _candidates(
        CandidateSymmetry.from_generator(H, 0.4, "expH"),
        CandidateSymmetry(named(lay, "Sigma", "Z"), "S", "Sigma3"),
    )
    generic = not all(abs(x) == 0 for x in (*gamma[:2], *alpha[:2]))
    checks = [
        CatalogCheck("independent", {"passes": True, "commutes_with_H": True}, "expH"),
        CatalogCheck("commutant", {"dimension": dim, "commutes_with_H": True}),
        CatalogCheck("classify", {"R_scalar": True, "shift_r": 0.0}, "expH"),
    ]
    if generic:
        checks.append(CatalogCheck("independent", {"passes": False}, "Sigma3"))
    return PaperModel("two_qubit_general", lay, H, cands, checks=checks,
                      params={"alpha": list(alpha), "beta": list(beta), "gamma": list(gamma)})


def _three_qubit_layout():
    return SpaceLayout((Factor("Sigma", "qubit", tag="S"), Factor("Xi", "qubit", tag="R"),
                        Factor("Pi", "qubit", tag="R")))


def three_qubit_no_new():
    lay = _three_qubit_layout()
    H = _pauli_sum(lay, [(1.0, {"Sigma": "Z", "Xi": "Z"}), (1.0, {"Sigma": "Z", "Pi": "Z"})])
    cands = _candidates(
        CandidateSymmetry(named(lay, "Pi", "X"), "R", "Pi1"),
        CandidateSymmetry(named(lay, "Xi", "Z"), "R", "Xi3"),
    )
    checks = [
        CatalogCheck("independent", {"passes": False, "max_deviation": [">=", 0.1]}, "Pi1"),
        CatalogCheck("theorem1", {"passes": False, "commutator_residual": [">=", 0.1]}, "Pi1"),
        CatalogCheck("independent", {"passes": True, "commutes_with_H": True}, "Xi3"),
        CatalogCheck("commutant", {"commutes_with_H": True}),
    ]
    return PaperModel("three_qubit_no_new", lay, H, cands, checks=checks)


def three_qubit_many_new(coupling=1.0):
    lay = _three_qubit_layout()
    H = _pauli_sum(lay, [(1.0, {"Sigma": "Z", "Xi": "Z"}), (coupling, {"Xi": "Z", "Pi": "Z"})])
    pi1 = named(lay, "Pi", "X")
    pi2 = named(lay, "Pi", "Y")
    cands = _candidates(
        CandidateSymmetry(pi1, "R", "Pi1"),
        CandidateSymmetry(pi2, "R", "Pi2"),
        CandidateSymmetry((pi1 @ pi2).relabel("Pi1Pi2"), "R", "Pi1Pi2"),
        CandidateSymmetry.from_generator(pi1, 0.7, "expPi1", scope="R"),
        CandidateSymmetry(named(lay, "Sigma", "X"), "S", "Sigma1"),
    )
    G = _pauli_sum(lay, [(-2.0 * coupling, {"Xi": "Z", "Pi": "Z"})], "G")
    comm = 4 * math.sqrt(2) * abs(coupling)
    checks = [
        CatalogCheck("independent", {"passes": True, "commutes_with_H": False,
                                     "commutator_norm": comm}, "Pi1"),
        CatalogCheck("independent", {"passes": True}, "Pi2"),
        CatalogCheck("independent", {"passes": True}, "Pi1Pi2"),
        CatalogCheck("independent", {"passes": True}, "expPi1"),
        CatalogCheck("independent", {"passes": False}, "Sigma1"),
        CatalogCheck("theorem1", {"passes": True}, "Pi1"),
        CatalogCheck("classify", {"R_scalar": False, "R_commutes_H": True,
                                  "shift_G_error": ["<=", 1e-9]}, "Pi1", params={"G": "G"}),
        CatalogCheck("shift", {"residual": ["<=", 1e-10]}, "Pi1", params={"G": "G"}),
        CatalogCheck("commutant", {"commutes_with_H": False}),
        CatalogCheck("closure", {"Pi1*Pi1": True, "Pi1*Pi2": True, "Pi2*Pi1": True,
                                 "Pi1^dag": True, "Pi2^dag": True},
                     params={"candidates": ["Pi1", "Pi2"]}),
    ]
    return PaperModel("three_qubit_many_new", lay, H, cands, checks=checks,
                      operators={"G": G}, params={"coupling": coupling})


# --- angular momentum chains ------------------------------------------------------


def _chain(labels, spins):
    facs = [Factor(lab, "spin", j, "S" if i == 0 else "R") for i, (lab, j) in enumerate(zip(labels, spins))]
    lay = SpaceLayout(tuple(facs))
    pairs = []
    for x, y in zip(labels, labels[1:]):
        pairs += [(1.0, {x: "J+", y: "J-"}), (1.0, {x: "J-", y: "J+"})]
    H = _pauli_sum(lay, pairs)
    jz_total = assemble_expression(OperatorExpression.from_pairs([(1.0, {lab: "J3"}) for lab in labels]), lay,
                                   "J3_total", hamiltonian=True)
    s_label = labels[0]
    q_set = [named(lay, s_label, n) for n in ("J1", "J2", "J3")]
    cands = _candidates(
        CandidateSymmetry.from_generator(jz_total, 0.9, "rot_total"),
        CandidateSymmetry.from_generator(named(lay, s_label, "J3"), 0.9, "rot_J", scope="S"),
    )
    checks = [
        CatalogCheck("independent", {"passes": True, "commutes_with_H": True}, "rot_total"),
        CatalogCheck("independent", {"passes": False}, "rot_J"),
        CatalogCheck("theorem1", {"passes": False}, "rot_J"),
    ]
    if lay.total_dim <= 32:
        checks.append(CatalogCheck("commutant", {"dimension": 1, "commutes_with_H": True}))
    return lay, H, cands, q_set, checks


def angular_chain_JKL(spins=(0.5, 0.5, 0.5)):
    lay, H, cands, q_set, checks = _chain(("J", "K", "L"), spins)
    return PaperModel("angular_chain_JKL", lay, H, cands, q_set=q_set, checks=checks,
                      params={"spins": [float(s) for s in spins]})


def angular_chain_JKLM(spins=(0.5, 0.5, 0.5, 0.5)):
    lay, H, cands, q_set, checks = _chain(("J", "K", "L", "M"), spins)
    return PaperModel("angular_chain_JKLM", lay, H, cands, q_set=q_set, checks=checks,
                      params={"spins": [float(s) for s in spins]})


# --- oscillators ------------------------------------------------------------------


def _ladders(lay, labels):
    out = {}
    for lab in labels:
        a = factor_ops_for(lay.factor(lab))["a"]
        out[lab] = embed_product({lab: a}, lay, lab)
    return out


def _number(lay, lab):
    return embed_product({lab: factor_ops_for(lay.factor(lab))["n"]}, lay, f"n_{lab}")


def _q_set_from(ops: dict) -> list:
    out = []
    for name, x in ops.items():
        out += [x.relabel(name), x.dag().relabel(f"{name}^dag"), (x.dag() @ x).relabel(f"{name}^dag {name}")]
    return out


def shift_V_matrix(N: int) -> np.ndarray:
    """V on two N-level modes (j, k), row-major index j*N + k.

    ``V^dag |j,k> = |j,k-1>`` for k > j, ``|j+1,k>`` for j >= k. On the
    truncated space the states (N-1, k) would leave it; they are sent to the
    unused targets (k, N-1) so that V is a permutation matrix.
    """
    vd = np.zeros((N * N, N * N))
    for j, k in product(range(N), range(N)):
        if k > j:
            tgt = (j, k - 1)
        elif j + 1 < N:
            tgt = (j + 1, k)
        else:
            tgt = (k, N - 1)
        vd[tgt[0] * N + tgt[1], j * N + k] = 1.0
    return vd.T


def _with_identity(m: np.ndarray, extra_dim: int) -> np.ndarray:
    return np.kron(m, np.eye(extra_dim)) if extra_dim > 1 else m


def _two_mode_layout(N, split=False, extra=None):
    facs = [Factor("J", "boson", N, "S"), Factor("K", "boson", N, "S" if extra else "R")]
    if extra is not None:
        facs.append(extra)
    return SpaceLayout(tuple(facs), split=split)


def osc_with_bound(N=10):
    lay = _two_mode_layout(N)
    lad = _ladders(lay, ("J", "K"))
    J, K = lad["J"], lad["K"]
    A = (J + K) / math.sqrt(2)
    B = (J - K) / math.sqrt(2)
    H = (2.0 * _number(lay, "J")).relabel("H")
    V = LabeledOperator(shift_V_matrix(N), lay, "V")
    cands = _candidates(
        CandidateSymmetry.from_generator(_number(lay, "K"), 0.7, "rot_K"),
        CandidateSymmetry(V, "joint", "V"),
    )
    checks = [
        CatalogCheck("independent", {"passes": True, "commutes_with_H": True}, "rot_K"),
        CatalogCheck("classify", {"R_scalar": True, "shift_r": 0.0}, "rot_K"),
        CatalogCheck("independent", {"passes": False}, "V"),
        CatalogCheck("spectrum", {"min_eigenvalue": [">=", -1e-10]}),
    ]
    return PaperModel("osc_with_bound", lay, H, cands, q_set=_q_set_from({"A": A}),
                      r_ops=[B, B.dag()], truncation={"N": N, "guard": 2}, checks=checks,
                      params={"N": N}, operators={"A": A, "B": B})


def osc_without_bound(N=10):
    lay = _two_mode_layout(N)
    lad = _ladders(lay, ("J", "K"))
    J, K = lad["J"], lad["K"]
    A = (J + K) / math.sqrt(2)
    B = (J - K) / math.sqrt(2)
    H = (_number(lay, "J") - _number(lay, "K")).relabel("H")
    v = shift_V_matrix(N)
    swap = np.zeros((N * N, N * N))
    for j, k in product(range(N), range(N)):
        swap[k * N + j, j * N + k] = 1.0
    cands = _candidates(
        CandidateSymmetry(LabeledOperator(v, lay, "V"), "joint", "V"),
        CandidateSymmetry(LabeledOperator(v @ v, lay, "V2"), "joint", "V2"),
        CandidateSymmetry(LabeledOperator(v @ v @ v, lay, "V3"), "joint", "V3", guard=3),
        CandidateSymmetry(LabeledOperator(swap, lay, "swap_JK"), "joint", "swap_JK"),
        CandidateSymmetry.from_generator(_number(lay, "K"), 0.7, "rot_K"),
    )
    checks = [
        CatalogCheck("independent", {"passes": True, "commutes_with_H": False}, "V"),
        CatalogCheck("independent", {"passes": True}, "V2"),
        CatalogCheck("independent", {"passes": True}, "V3"),
        CatalogCheck("independent", {"passes": False}, "swap_JK"),
        CatalogCheck("independent", {"passes": True, "commutes_with_H": True}, "rot_K"),
        CatalogCheck("classify", {"R_scalar": True, "shift_r": 1.0}, "V"),
        CatalogCheck("classify", {"R_scalar": True, "shift_r": 2.0}, "V2"),
        CatalogCheck("classify", {"R_scalar": True, "shift_r": 3.0}, "V3"),
        CatalogCheck("shift", {"residual": ["<=", 1e-10]}, "V", params={"r": 1.0}),
        CatalogCheck("spectrum", {"integer_spectrum": True}),
    ]
    return PaperModel("osc_without_bound", lay, H, cands, q_set=_q_set_from({"A": A}),
                      r_ops=[B, B.dag()], truncation={"N": N, "guard": 2}, checks=checks,
                      params={"N": N}, operators={"A": A, "B": B})


_F_CHOICES = {"identity": lambda x: x, "square": lambda x: x * x}


def two_osc_times_M(N=8, m_values=(1.0, 2.0, 3.0), f="identity"):
    m_values = tuple(float(m) for m in m_values)
    if len(m_values) < 2:
        raise CatalogError("M needs at least two eigenvalues")
    if f not in _F_CHOICES:
        raise CatalogError(f"unknown f {f!r}; choose from {sorted(_F_CHOICES)}")
    fm = Factor("M", "spin", (len(m_values) - 1) / 2, "R")
    lay = _two_mode_layout(N, split=True, extra=fm)
    lad = _ladders(lay, ("J", "K"))
    J, K = lad["J"], lad["K"]
    A = (J + K) / math.sqrt(2)
    B = (J - K) / math.sqrt(2)
    jk = np.arange(N)
    diff = (jk[:, None] - jk[None, :]).reshape(-1).astype(float)
    fd = _F_CHOICES[f](diff)
    H = LabeledOperator(np.diag(np.kron(fd, np.array(m_values))).astype(complex), lay, "H")
    M = embed_product({"M": np.diag(m_values)}, lay, "M")
    V = LabeledOperator(_with_identity(shift_V_matrix(N), len(m_values)), lay, "V")
    cands = _candidates(CandidateSymmetry(V, "S", "V"))
    if f == "identity":
        checks = [
            CatalogCheck("independent", {"passes": True, "commutes_with_H": False,
                                         "commutator_norm": [">=", 0.5]}, "V"),
            CatalogCheck("shift", {"residual": ["<=", 1e-10]}, "V", params={"G": "M"}),
            CatalogCheck("classify", {"R_scalar": False, "R_commutes_H": True,
                                      "shift_G_error": ["<=", 1e-9]}, "V", params={"G": "M"}),
        ]
    else:
        checks = [CatalogCheck("independent", {"passes": False, "max_deviation": [">=", 1e-2]}, "V")]
    return PaperModel("two_osc_times_M", lay, H, cands, q_set=_q_set_from({"A": A, "B": B}),
                      truncation={"N": N, "guard": 2}, checks=checks,
                      params={"N": N, "m_values": list(m_values), "f": f},
                      operators={"A": A, "B": B, "M": M})


def three_osc_U_matrix(N: int) -> np.ndarray:
    """U on three N-level modes (j, k, l), row-major index (j*N + k)*N + l.

    ``U^dag``: (j,0,l) -> (j+1,1,l); (j,1,l) -> (j,0,l); (0,k,l) -> (0,k-1,l)
    for k > 1; identity for j > 0, k > 1. The states (N-1, 0, l) would leave
    the truncated space and are sent to the unused targets (0, N-1, l).
    """
    d = N ** 3
    ud = np.zeros((d, d))

    def idx(j, k, l):
        return (j * N + k) * N + l

    for j, k, l in product(range(N), range(N), range(N)):
        if k == 0:
            tgt = (j + 1, 1, l) if j + 1 < N else (0, N - 1, l)
        elif k == 1:
            tgt = (j, 0, l)
        elif j == 0:
            tgt = (0, k - 1, l)
        else:
            tgt = (j, k, l)
        ud[idx(*tgt), idx(j, k, l)] = 1.0
    return ud.T


def three_osc(N=8):
    facs = (Factor("J", "boson", N, "S"), Factor("K", "boson", N, "R"), Factor("L", "boson", N, "R"))
    lay = SpaceLayout(facs, split=False)
    lad = _ladders(lay, ("J", "K", "L"))
    J, K, L = lad["J"], lad["K"], lad["L"]
    A = J / math.sqrt(3) + L * math.sqrt(2 / 3)
    B = J / math.sqrt(3) + K / math.sqrt(2) - L / math.sqrt(6)
    C = J / math.sqrt(3) - K / math.sqrt(2) - L / math.sqrt(6)
    H = (3.0 * _number(lay, "J") + 1.5 * identity(lay)).relabel("H")
    k_occ = np.repeat(np.tile(np.arange(N), N), N)
    G = LabeledOperator(np.diag(3.0 * (k_occ == 0)).astype(complex), lay, "G")
    U = LabeledOperator(three_osc_U_matrix(N), lay, "U")
    cands = _candidates(CandidateSymmetry(U, "joint", "U"),
                        CandidateSymmetry(U.dag().relabel("Udag"), "joint", "Udag"))
    checks = [
        CatalogCheck("shift", {"residual": ["<=", 1e-10]}, "U", params={"G": "G"}),
        CatalogCheck("independent", {"passes": True, "commutes_with_H": False}, "U"),
        CatalogCheck("independent", {"passes": False}, "Udag"),
        CatalogCheck("classify", {"R_scalar": False, "R_commutes_H": True,
                                  "shift_G_error": ["<=", 1e-9]}, "U", params={"G": "G"}),
        CatalogCheck("closure", {"U^dag": False}, params={"candidates": ["U"]}),
        CatalogCheck("witness", {"value": math.sqrt(3)}, "U"),
        CatalogCheck("spectrum", {"min_eigenvalue": [">=", 1.5 - 1e-10]}),
    ]
    return PaperModel("three_osc", lay, H, cands, q_set=_q_set_from({"A": A}),
                      r_ops=[B, B.dag(), C, C.dag()], truncation={"N": N, "guard": 2},
                      checks=checks, params={"N": N},
                      operators={"A": A, "B": B, "C": C, "G": G})


def witness_element(model: PaperModel, l: int = 0) -> complex:
    """``<j=0,k=1,l| [A, U^dag G U] |j=1,k=1,l>`` for the three-oscillator model."""
    N = model.params["N"]
    a = model.operator("A").matrix
    u = model.candidate("U").U.matrix
    g = model.operator("G").matrix
    ugu = u.conj().T @ g @ u
    comm = a @ ugu - ugu @ a

    def idx(j, k):
        return (j * N + k) * N + l

    return complex(comm[idx(0, 1), idx(1, 1)])


# --- dependent symmetries of two qubits ------------------------------------------

_DEPENDENT_STATES = {
    "mixed": (0.0, 0.0, 0.0),
    "x_half": (1.0, 0.0, 0.0),
    "y_half": (0.0, 1.0, 0.0),
    "z08": (0.0, 0.0, 0.8),
    "z04": (0.0, 0.0, 0.4),
}

_CORRELATED_STATES = {
    "corr_diag": ((0.0, 0.0, 0.3), np.diag([0.2, -0.15, 0.1])),
    "corr_13": ((0.0, 0.0, 0.0), np.array([[0.0, 0.0, 0.2], [0.0, 0.0, -0.1], [0.0, 0.0, 0.0]])),
    "corr_12": ((0.0, 0.0, 0.0), np.array([[0.0, 0.3, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])),
    "corr_31": ((0.0, 0.0, 0.2), np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.25, 0.0, 0.0]])),
    "corr_x": ((0.4, 0.0, 0.0), np.array([[0.0, 0.0, 0.0], [0.15, 0.0, 0.0], [0.0, 0.0, 0.0]])),
}

ROTATION_ANGLES = (0.3, 1.1, 2.9)


def dependent_qubits(gamma=(0.7, 1.3, 2.1)):
    gamma = tuple(float(g) for g in gamma)
    lay = two_qubit_layout()
    H = _pauli_sum(lay, [(0.5 * g, {"Sigma": k, "Xi": k}) for g, k in zip(gamma, "XYZ")])
    half_z = (0.5 * named(lay, "Sigma", "Z")).relabel("Sigma3/2")
    cand_list = [CandidateSymmetry(named(lay, "Sigma", "Z"), "S", "Sigma3"),
                 CandidateSymmetry(named(lay, "Xi", "Z"), "R", "Xi3")]
    for u in ROTATION_ANGLES:
        cand_list.append(CandidateSymmetry.from_generator(half_z, u, f"rot{u:g}", scope="S"))
    cands = _candidates(*cand_list)
    states = {k: StateSpec(bloch_R=np.array(b), label=k) for k, b in _DEPENDENT_STATES.items()}
    for k, (b, g) in _CORRELATED_STATES.items():
        states[k] = StateSpec(bloch_R=np.array(b), Gamma=g, label=k)

    checks = []
    for sname, b in _DEPENDENT_STATES.items():
        sigma3 = condition_case(gamma, b).predicts_symmetric
        checks.append(CatalogCheck("dependent", {"passes": sigma3, "forms_agree": True}, "Sigma3", sname))
        checks.append(CatalogCheck("dependent", {"passes": sigma3, "forms_agree": True}, "Xi3", sname))
        checks.append(CatalogCheck("covariance", {"passes": sigma3}, "Sigma3", sname))
        rot = rotation_family_predicted(gamma, b)
        for u in ROTATION_ANGLES:
            checks.append(CatalogCheck("dependent", {"passes": rot}, f"rot{u:g}", sname))
        const = abs(gamma[0]) == 0 and abs(gamma[1]) == 0
        checks.append(CatalogCheck("dependent_constant", {"passes": const}, state=sname,
                                   params={"operator": "Sigma3"}))
    for sname, (b, g) in _CORRELATED_STATES.items():
        pred = condition_case(gamma, b, g).predicts_correlated_symmetric
        checks.append(CatalogCheck("correlated", {"passes": pred, "design_complete": True},
                                   "Sigma3", sname))
    checks.append(CatalogCheck("constant", {"passes": abs(gamma[0]) == 0 and abs(gamma[1]) == 0},
                               params={"operator": "Sigma3"}))
    return PaperModel("dependent_qubits", lay, H, cands, states=states, checks=checks,
                      params={"gamma": list(gamma)},
                      operators={"Sigma3": named(lay, "Sigma", "Z")})


BUILDERS = {
    "two_qubit_general": two_qubit_general,
    "three_qubit_no_new": three_qubit_no_new,
    "three_qubit_many_new": three_qubit_many_new,
    "angular_chain_JKL": angular_chain_JKL,
    "angular_chain_JKLM": angular_chain_JKLM,
    "osc_with_bound": osc_with_bound,
    "osc_without_bound": osc_without_bound,
    "two_osc_times_M": two_osc_times_M,
    "three_osc": three_osc,
    "dependent_qubits": dependent_qubits,
}


def paper_catalog(name: str, **params) -> PaperModel:
    """Build a catalog model by name with optional parameter overrides."""
    if name not in BUILDERS:
        raise CatalogError(f"unknown catalog model {name!r}; known: {sorted(BUILDERS)}")
    try:
        return BUILDERS[name](**params)
    except TypeError as exc:
        raise CatalogError(f"bad parameters for {name!r}: {exc}") from None


# Every model and parameter variant run by the regression.
PAPER_EXAMPLES = (
    ("two_qubit_general", {}),
    ("two_qubit_general", {"gamma": (0.0, 0.0, 1.5)}),
    ("two_qubit_general", {"gamma": (0.0, 0.0, 1.5), "beta": (0.0, 0.0, -0.4)}),
    ("three_qubit_no_new", {}),
    ("three_qubit_many_new", {}),
    ("angular_chain_JKL", {}),
    ("angular_chain_JKLM", {}),
    ("osc_with_bound", {}),
    ("osc_without_bound", {}),
    ("two_osc_times_M", {}),
    ("two_osc_times_M", {"f": "square"}),
    ("three_osc", {}),
    ("dependent_qubits", {}),
    ("dependent_qubits", {"gamma": (1.0, 1.0, 2.0)}),
    ("dependent_qubits", {"gamma": (0.0, 1.3, 0.0)}),
    ("dependent_qubits", {"gamma": (0.0, 0.0, 2.1)}),
)
