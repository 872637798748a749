"""
Closed-form two-qubit dynamics for the coupling ``H = (1/2) sum_j gamma_j S_j R_j``.

The three strings ``S_j R_j`` commute, so each evolved ``S_j`` is a
four-term combination of Pauli strings with products of cosines and sines
as coefficients. For ``U = S_3`` the terms flipped by the symmetry are the
obstructions that have to vanish in mean value; the condition tables here
enumerate when they do.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model_library import PAULI

ZERO_TOL = 1e-12
_P = (PAULI["I"], PAULI["X"], PAULI["Y"], PAULI["Z"])


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * S_s (x) R_r`` with index 0 meaning the identity."""

    s: int
    r: int
    coefficient: float
    obstruction: bool = False

    @property
    def label(self) -> str:
        parts = ([f"S{self.s}"] if self.s else []) + ([f"R{self.r}"] if self.r else [])
        return "".join(parts) or "I"


@dataclass
class PauliEvolutionCoefficients:
    gamma: tuple
    t: float
    terms: dict = field(default_factory=dict)

    def expansion(self, j: int) -> list[PauliTerm]:
        return self.terms[j]

    def obstruction_terms(self, j: int) -> list[PauliTerm]:
        return [p for p in self.terms[j] if p.obstruction]

    def matrix(self, j: int) -> np.ndarray:
        return assemble_terms(self.terms[j])


def assemble_terms(terms) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for p in terms:
        out += p.coefficient * np.kron(_P[p.s], _P[p.r])
    return out


def pauli_heisenberg_coefficients(gamma, t: float) -> PauliEvolutionCoefficients:
    """Exact expansions of ``exp(itH) S_j exp(-itH)`` for j = 1, 2, 3."""
    g1, g2, g3 = (float(x) for x in gamma)
    c1, c2, c3 = np.cos(g1 * t), np.cos(g2 * t), np.cos(g3 * t)
    s1, s2, s3 = np.sin(g1 * t), np.sin(g2 * t), np.sin(g3 * t)
    terms = {
        1: [PauliTerm(1, 0, c2 * c3), PauliTerm(0, 1, s2 * s3, True),
            PauliTerm(2, 3, -c2 * s3), PauliTerm(3, 2, s2 * c3, True)],
        2: [PauliTerm(2, 0, c3 * c1), PauliTerm(0, 2, s3 * s1, True),
            PauliTerm(3, 1, -c3 * s1, True), PauliTerm(1, 3, s3 * c1)],
        3: [PauliTerm(3, 0, c1 * c2), PauliTerm(0, 3, s1 * s2),
            PauliTerm(1, 2, -c1 * s2, True), PauliTerm(2, 1, s1 * c2, True)],
    }
    return PauliEvolutionCoefficients((g1, g2, g3), float(t), terms)


def coupling_hamiltonian(gamma) -> np.ndarray:
    """``(1/2) sum_j gamma_j S_j (x) R_j`` as a 4x4 matrix."""
    return 0.5 * sum(g * np.kron(_P[j + 1], _P[j + 1]) for j, g in enumerate(gamma))


# --- condition tables ------------------------------------------------------------

PRODUCT_CASES = {
    1: "gamma1 = gamma2 = 0",
    2: "gamma2 = gamma3 = 0 and <R1> = 0",
    3: "gamma3 = gamma1 = 0 and <R2> = 0",
    4: "<R1> = <R2> = 0",
}

CORRELATED_LISTS = {
    1: "gamma1, gamma2",
    2: "gamma2, gamma3, Gamma21, Gamma31, <R1>",
    3: "gamma3, gamma1, Gamma32, Gamma12, <R2>",
    4: "Gamma12, Gamma21, Gamma31, Gamma32, <R1>, <R2>",
}

# Families found by requiring every obstruction mean value to vanish at all
# times; they are not covered by the four lists above.
DERIVED_CORRELATED = {
    "2'": "gamma2, Gamma21, Gamma31, <R1>, <R2>",
    "3'": "gamma1, Gamma12, Gamma32, <R1>, <R2>",
    "4'": "gamma2 = s*gamma1 != 0 (s = +-1), Gamma21 = s*Gamma12; Gamma31, Gamma32, <R1>, <R2>",
}


@dataclass
class ConditionCase:
    product_cases: frozenset
    correlated_cases: frozenset | None = None
    derived_cases: frozenset | None = None

    @property
    def predicts_symmetric(self) -> bool:
        """Product-state prediction for ``U = S_3``."""
        return bool(self.product_cases)

    @property
    def predicts_correlated_symmetric(self) -> bool:
        if self.correlated_cases is None:
            return self.predicts_symmetric
        return bool(self.correlated_cases or self.derived_cases)


def condition_case(gamma, b, Gamma=None, tol: float = ZERO_TOL) -> ConditionCase:
    """Which of the vanishing conditions for ``U = S_3`` hold.

    Without ``Gamma`` only the product-state cases are evaluated. With
    ``Gamma`` the four correlated lists are evaluated together with the
    derived families in ``DERIVED_CORRELATED``.
    """
    g1, g2, g3 = (float(x) for x in gamma)
    b1, b2, _ = (float(x) for x in b)

    def z(*xs):
        return all(abs(x) <= tol for x in xs)

    prod = set()
    if z(g1, g2):
        prod.add(1)
    if z(g2, g3, b1):
        prod.add(2)
    if z(g3, g1, b2):
        prod.add(3)
    if z(b1, b2):
        prod.add(4)
    if Gamma is None:
        return ConditionCase(frozenset(prod))

    G = np.asarray(Gamma, dtype=float)
    G12, G21, G31, G32 = G[0, 1], G[1, 0], G[2, 0], G[2, 1]
    corr = set()
    if z(g1, g2):
        corr.add(1)
    if z(g2, g3, G21, G31, b1):
        corr.add(2)
    if z(g3, g1, G32, G12, b2):
        corr.add(3)
    if z(G12, G21, G31, G32, b1, b2):
        corr.add(4)
    derived = set()
    if z(g2, G21, G31, b1, b2):
        derived.add("2'")
    if z(g1, G12, G32, b1, b2):
        derived.add("3'")
    if not z(g1) and z(G31, G32, b1, b2):
        for s in (1.0, -1.0):
            if z(g2 - s * g1, G21 - s * G12):
                derived.add("4'")
    return ConditionCase(frozenset(prod), frozenset(corr), frozenset(derived))


def obstruction_mean_values(gamma, b, t: float, a=(0.0, 0.0, 0.0), Gamma=None) -> dict:
    """Mean values of the obstruction terms of each evolved ``S_j`` in the state W(a, b, Gamma)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    G = np.zeros((3, 3)) if Gamma is None else np.asarray(Gamma, dtype=float)
    coeffs = pauli_heisenberg_coefficients(gamma, t)

    def mean(p: PauliTerm) -> float:
        if p.s == 0:
            return b[p.r - 1]
        if p.r == 0:
            return a[p.s - 1]
        return G[p.s - 1, p.r - 1] + a[p.s - 1] * b[p.r - 1]

    return {j: sum(p.coefficient * mean(p) for p in coeffs.obstruction_terms(j)) for j in (1, 2, 3)}


# --- rotation family ----------------------------------------------------------


def rotation_family_coefficients(gamma, b3: float, t: float, tol: float = ZERO_TOL):
    """``(A11, A12)`` of the reduced S_1, S_2 dynamics when gamma_1 = gamma_2 and <R1> = <R2> = 0.

    ``Tr_R[rho_R S_1(t)] = A11 S_1 - A12 S_2`` and
    ``Tr_R[rho_R S_2(t)] = A11 S_2 + A12 S_1``.
    """
    g1, g2, g3 = (float(x) for x in gamma)
    if abs(g1 - g2) > tol:
        raise ValueError(f"rotation family needs gamma1 == gamma2, got {g1} and {g2}")
    coeffs = pauli_heisenberg_coefficients(gamma, t)
    bvec = np.array([0.0, 0.0, b3])

    def reduce_terms(j):
        # S-part coefficients after replacing R_k by <R_k>
        out = np.zeros(4)
        for p in coeffs.expansion(j):
            weight = 1.0 if p.r == 0 else bvec[p.r - 1]
            out[p.s] += p.coefficient * weight
        return out

    r1, r2 = reduce_terms(1), reduce_terms(2)
    a11, a12 = r1[1], -r1[2]
    if abs(r2[2] - a11) > 1e-12 or abs(r2[1] - a12) > 1e-12:
        raise ArithmeticError("S_1 and S_2 reductions disagree on (A11, A12)")
    return float(a11), float(a12)


def rotation_family_closed_form(gamma, b3: float, t: float):
    g1, _, g3 = gamma
    return np.cos(g1 * t) * np.cos(g3 * t), b3 * np.cos(g1 * t) * np.sin(g3 * t)


def rotation_family_predicted(gamma, b, tol: float = ZERO_TOL) -> bool:
    """Whether every ``exp(-iu S_3/2)`` is a dependent symmetry at <R> = b.

    Exact condition from the closed-form dynamics: either gamma_1 = gamma_2 = 0,
    or |gamma_1| = |gamma_2| with <R1> = <R2> = 0.
    """
    g1, g2, _ = (float(x) for x in gamma)
    b1, b2 = float(b[0]), float(b[1])
    if abs(g1) <= tol and abs(g2) <= tol:
        return True
    return abs(abs(g1) - abs(g2)) <= tol and abs(b1) <= tol and abs(b2) <= tol
