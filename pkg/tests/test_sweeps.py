from collections import Counter

import numpy as np
import pytest

from opensym import engine as E
from opensym.model_library import StateSpec, named, two_qubit_layout
from opensym.operator_core import LabeledOperator
from opensym.oracle import condition_case, coupling_hamiltonian
from sweeps import NEAR_ZERO, correlated_points, dependent_points

LAYOUT = two_qubit_layout()
SIGMA3 = E.CandidateSymmetry(named(LAYOUT, "Sigma", "Z"), "S", "Sigma3")


def H_of(gamma):
    return LabeledOperator(coupling_hamiltonian(gamma), LAYOUT, "H")


def dependent_dev(gamma, b):
    return E.check_dependent(H_of(gamma), SIGMA3, StateSpec(bloch_R=b).rho_R).max_deviation


def test_sweeps_contain_zeros_and_near_zeros():
    vals = np.concatenate([np.concatenate([g, b]) for g, b in dependent_points()])
    assert (vals == 0).sum() > 500
    assert (np.abs(np.abs(vals) - NEAR_ZERO) < 1e-15).sum() > 200
    cov = Counter()
    for g, b, G in correlated_points():
        c = condition_case(g, b, G)
        cov.update(c.correlated_cases)
        cov.update(c.derived_cases)
    assert set(cov) == {1, 2, 3, 4, "2'", "3'", "4'"}


@pytest.mark.parametrize(
    "gamma, b, eps_slot",
    [
        ((0.7, 1.3, 2.1), [0.0, 0.0, 0.5], ("b", 0)),
        ((0.7, 1.3, 2.1), [0.0, 0.0, 0.5], ("b", 1)),
        ((0.0, 0.0, 2.1), [0.4, 0.0, 0.5], ("gamma", 0)),
        ((0.0, 0.0, 2.1), [0.0, 0.4, 0.5], ("gamma", 1)),
    ],
)
def test_near_zero_degrades_continuously(gamma, b, eps_slot):
    """Exact zero passes; 1e-3 fails with a deviation linear in the perturbation."""
    which, k = eps_slot
    devs = []
    for eps in (0.0, NEAR_ZERO, 2 * NEAR_ZERO):
        g, bb = list(gamma), list(b)
        (g if which == "gamma" else bb)[k] = eps
        devs.append(dependent_dev(g, bb))
    assert devs[0] <= E.DEFAULT_TOL
    assert devs[1] > E.DEFAULT_TOL
    assert devs[1] < 0.05
    assert abs(devs[2] / devs[1] - 2.0) < 0.05


def test_correlated_near_zero_correlation_fails_with_small_deviation():
    gamma = (0.7, 1.3, 2.1)
    G = np.zeros((3, 3))
    base = E.check_correlated(H_of(gamma), SIGMA3, StateSpec(bloch_R=np.zeros(3), Gamma=G))
    G[0, 1] = NEAR_ZERO
    near = E.check_correlated(H_of(gamma), SIGMA3, StateSpec(bloch_R=np.zeros(3), Gamma=G))
    assert base.passes
    assert not near.passes
    assert near.max_deviation < 10 * NEAR_ZERO
    assert not condition_case(gamma, np.zeros(3), G).predicts_correlated_symmetric
