"""
Factor operators, expression assembly, two-qubit states and truncation
projectors.

Single-factor operator names
----------------------------
qubit  ``X Y Z + - I``     (aliases ``1 2 3 x y z``); ``+ = (X + iY)/2``
spin   ``J1 J2 J3 J+ J- I`` (aliases ``1 2 3 + - Jx Jy Jz``);
       ``J+- = (J1 +- i J2)/sqrt(2)`` so that ``[J+, J-] = J3``
boson  ``a adag n I``      (aliases ``A ad a+``); ``a|m> = sqrt(m)|m-1>``,
       hard cutoff ``adag|N-1> = 0``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionError, InvalidStateError, LayoutError
from .operator_core import (
    Factor,
    LabeledOperator,
    SpaceLayout,
    _as_spin,
    embed_factor_operator,
)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_ALIASES = {
    "qubit": {"1": "X", "2": "Y", "3": "Z", "x": "X", "y": "Y", "z": "Z"},
    "spin": {"1": "J1", "2": "J2", "3": "J3", "+": "J+", "-": "J-",
             "Jx": "J1", "Jy": "J2", "Jz": "J3"},
    "boson": {"A": "a", "ad": "adag", "a+": "adag", "N": "n"},
}

STATE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


def make_factor_operators(kind: str, parameter=None) -> dict[str, np.ndarray]:
    """Named single-factor operators for a qubit, spin j, or N-level boson."""
    if kind == "qubit":
        ops = dict(PAULI)
        ops["+"] = (PAULI["X"] + 1j * PAULI["Y"]) / 2
        ops["-"] = (PAULI["X"] - 1j * PAULI["Y"]) / 2
        return ops
    if kind == "spin":
        j = _as_spin(parameter)
        if j < 0.5:
            raise LayoutError("spin factor needs j >= 1/2")
        jf = float(j)
        m = jf - np.arange(int(2 * j + 1))
        # standard raising operator <m+1|J+|m> = sqrt(j(j+1) - m(m+1))
        raise_std = np.diag(np.sqrt(jf * (jf + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
        jp = raise_std / np.sqrt(2)
        jm = jp.conj().T
        j1 = (jp + jm) / np.sqrt(2)
        j2 = (jp - jm) / (1j * np.sqrt(2))
        return {"J1": j1, "J2": j2, "J3": np.diag(m).astype(complex),
                "J+": jp, "J-": jm, "I": np.eye(len(m), dtype=complex)}
    if kind == "boson":
        if parameter is None or int(parameter) < 2:
            raise LayoutError("boson factor needs a cutoff N >= 2")
        n = int(parameter)
        a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
        return {"a": a, "adag": a.conj().T, "n": np.diag(np.arange(n)).astype(complex),
                "I": np.eye(n, dtype=complex)}
    raise LayoutError(f"unknown factor kind {kind!r}")


def factor_ops_for(factor: Factor) -> dict[str, np.ndarray]:
    return make_factor_operators(factor.kind, factor.parameter)


def resolve_factor_op(factor: Factor, spec) -> np.ndarray:
    """Turn a name, a product of names (``"adag a"``, ``"adag*a"``) or a literal into a matrix."""
    if isinstance(spec, str):
        names = spec.replace("*", " ").split()
        if not names:
            raise LayoutError(f"empty operator name for factor {factor.label!r}")
        table = factor_ops_for(factor)
        aliases = _ALIASES[factor.kind]
        mats = []
        for name in names:
            key = aliases.get(name, name)
            if key not in table:
                raise LayoutError(
                    f"unknown operator {name!r} for {factor.kind} factor {factor.label!r}; "
                    f"known: {sorted(table)}")
            mats.append(table[key])
        return reduce(np.matmul, mats)
    mat = np.asarray(spec, dtype=complex)
    if mat.shape != (factor.dim, factor.dim):
        raise DimensionError(
            f"literal operator for factor {factor.label!r} has shape {mat.shape}, "
            f"expected ({factor.dim}, {factor.dim})")
    return mat


def named(layout: SpaceLayout, label: str, name: str) -> LabeledOperator:
    """Embedded named single-factor operator, e.g. ``named(lay, "Pi", "X")``."""
    f = layout.factor(label)
    return embed_factor_operator(resolve_factor_op(f, name), label, layout, f"{label}.{name}")


@dataclass
class Term:
    coefficient: complex
    factor_ops: dict = field(default_factory=dict)


@dataclass
class OperatorExpression:
    """Sum of coefficient-weighted tensor products of single-factor operators."""

    terms: list

    @classmethod
    def from_pairs(cls, pairs) -> "OperatorExpression":
        return cls([Term(c, dict(ops)) for c, ops in pairs])


def assemble_expression(expr: OperatorExpression, layout: SpaceLayout, label: str = "",
                        hamiltonian: bool = False) -> LabeledOperator:
    """Sum over terms of coefficient times the embedded product.

    With ``hamiltonian=True`` the result must be Hermitian.
    """
    if not expr.terms:
        raise ValueError("expression has no terms")
    d = layout.total_dim
    total = np.zeros((d, d), dtype=complex)
    for term in expr.terms:
        pieces = []
        for lab in term.factor_ops:
            layout.index(lab)
        for f in layout.factors:
            if f.label in term.factor_ops:
                pieces.append(resolve_factor_op(f, term.factor_ops[f.label]))
            else:
                pieces.append(np.eye(f.dim))
        total += complex(term.coefficient) * reduce(np.kron, pieces)
    op = LabeledOperator(total, layout, label)
    if hamiltonian and not op.is_hermitian:
        raise ValueError(f"expression {label!r} declared as a Hamiltonian is not Hermitian")
    return op


# --- states -----------------------------------------------------------------


def validate_density(rho: np.ndarray, what: str = "density matrix") -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"{what} must be square, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > STATE_TOL:
        raise InvalidStateError(f"{what} is not Hermitian")
    if abs(np.trace(rho) - 1) > STATE_TOL:
        raise InvalidStateError(f"{what} has trace {np.trace(rho).real:.6g}, expected 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -POSITIVITY_TOL:
        raise InvalidStateError(f"{what} has negative eigenvalue {lo:.3g}")
    return rho


def bloch_density(vec) -> np.ndarray:
    """Qubit density matrix ``(I + v . sigma)/2``."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise InvalidStateError(f"Bloch vector must have length 3, got shape {v.shape}")
    return 0.5 * (PAULI["I"] + v[0] * PAULI["X"] + v[1] * PAULI["Y"] + v[2] * PAULI["Z"])


@dataclass
class StateSpec:
    """Reservoir state with optional subsystem Bloch data and correlations.

    For two qubits ``bloch_R`` b gives ``rho_R = (I + b.Xi)/2``; ``bloch_S`` a
    and the correlation tensor ``Gamma[j, k] = <S_j R_k> - a_j b_k`` complete
    a joint state.
    """

    rho_R: np.ndarray | None = None
    bloch_S: np.ndarray | None = None
    bloch_R: np.ndarray | None = None
    Gamma: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        for name in ("bloch_S", "bloch_R"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float)
                if v.shape != (3,):
                    raise InvalidStateError(f"{name} must have length 3")
                setattr(self, name, v)
        if self.Gamma is not None:
            g = np.asarray(self.Gamma)
            if g.shape != (3, 3) or np.abs(np.imag(g)).max() > 0:
                raise InvalidStateError("Gamma must be a real 3x3 array")
            self.Gamma = np.asarray(np.real(g), dtype=float)
        if self.rho_R is None:
            if self.bloch_R is None:
                raise InvalidStateError("state needs rho_R or bloch_R")
            if np.linalg.norm(self.bloch_R) > 1 + STATE_TOL:
                raise InvalidStateError("|bloch_R| exceeds 1")
            self.rho_R = bloch_density(self.bloch_R)
        self.rho_R = validate_density(self.rho_R, "rho_R")
        if self.bloch_R is None and self.rho_R.shape == (2, 2):
            self.bloch_R = np.array([np.trace(self.rho_R @ PAULI[k]).real for k in "XYZ"])

    def joint(self, bloch_S=None):
        """Joint two-qubit state with the given (or stored) subsystem Bloch vector."""
        a = self.bloch_S if bloch_S is None else np.asarray(bloch_S, dtype=float)
        return two_qubit_density(a, self.bloch_R, self.Gamma)


def two_qubit_density(a, b, Gamma=None) -> np.ndarray:
    """``W = (1/4)[I + a.S + b.R + sum_jk (Gamma_jk + a_j b_k) S_j R_k]`` (unchecked)."""
    a = np.zeros(3) if a is None else np.asarray(a, dtype=float)
    b = np.zeros(3) if b is None else np.asarray(b, dtype=float)
    g = np.zeros((3, 3)) if Gamma is None else np.asarray(Gamma, dtype=float)
    paulis = [PAULI["X"], PAULI["Y"], PAULI["Z"]]
    w = np.kron(PAULI["I"], PAULI["I"]).astype(complex)
    for j in range(3):
        w = w + a[j] * np.kron(paulis[j], PAULI["I"]) + b[j] * np.kron(PAULI["I"], paulis[j])
        for k in range(3):
            w = w + (g[j, k] + a[j] * b[k]) * np.kron(paulis[j], paulis[k])
    return w / 4


def two_qubit_layout(s_label: str = "Sigma", r_label: str = "Xi") -> SpaceLayout:
    return SpaceLayout((Factor(s_label, "qubit", tag="S"), Factor(r_label, "qubit", tag="R")))


def assemble_two_qubit_state(spec: StateSpec, layout: SpaceLayout | None = None) -> LabeledOperator:
    """Joint density matrix W, or ``rho_R`` alone when no subsystem data is given."""
    layout = layout or two_qubit_layout()
    if spec.bloch_S is None and spec.Gamma is None:
        return LabeledOperator(spec.rho_R, layout.sub_layout("R"), spec.label or "rho_R")
    if spec.bloch_S is None:
        raise InvalidStateError("correlations given without the subsystem Bloch vector")
    if spec.bloch_R is None:
        raise InvalidStateError("joint two-qubit state needs bloch_R")
    w = two_qubit_density(spec.bloch_S, spec.bloch_R, spec.Gamma)
    lo = np.linalg.eigvalsh(w).min()
    if lo < -POSITIVITY_TOL:
        raise InvalidStateError(f"assembled joint state has negative eigenvalue {lo:.3g}")
    return LabeledOperator(w, layout, spec.label or "W")


# --- truncation ---------------------------------------------------------------


def interior_mask(layout: SpaceLayout, guard: int) -> np.ndarray:
    """Boolean mask of basis states whose every boson occupation is below N - guard."""
    bosons = [f for f in layout.factors if f.kind == "boson"]
    if not bosons:
        raise LayoutError("interior projector needs at least one boson factor")
    if guard < 1:
        raise ValueError(f"guard must be >= 1, got {guard}")
    for f in bosons:
        if guard >= f.parameter:
            raise ValueError(f"guard {guard} leaves nothing of boson {f.label!r} (N={f.parameter})")
    masks = [np.arange(f.dim) < f.dim - guard if f.kind == "boson" else np.ones(f.dim, bool)
             for f in layout.factors]
    return reduce(lambda x, y: np.outer(x, y).reshape(-1), masks).astype(bool)


def interior_projector(layout: SpaceLayout, guard: int) -> LabeledOperator:
    """Orthogonal projector onto states with every boson occupation below N - guard."""
    mask = interior_mask(layout, guard)
    return LabeledOperator(np.diag(mask.astype(complex)), layout, f"P_interior(g={guard})")


def fock_index(layout: SpaceLayout, occupations: dict) -> int:
    """Flat basis index of a product basis state given per-factor level indices."""
    idx = 0
    for f in layout.factors:
        level = occupations.get(f.label, 0)
        if not 0 <= level < f.dim:
            raise LayoutError(f"level {level} out of range for factor {f.label!r}")
        idx = idx * f.dim + level
    return idx
