import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opensym.errors import DimensionError, InvalidStateError, LayoutError
from opensym.model_library import (
    PAULI,
    OperatorExpression,
    StateSpec,
    assemble_expression,
    assemble_two_qubit_state,
    bloch_density,
    fock_index,
    interior_mask,
    interior_projector,
    make_factor_operators,
    named,
    two_qubit_density,
    two_qubit_layout,
    validate_density,
)
from opensym.operator_core import Factor, SpaceLayout


def comm(a, b):
    return a @ b - b @ a


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 2.0, 3.5])
def test_spin_algebra(j):
    ops = make_factor_operators("spin", j)
    j1, j2, j3 = ops["J1"], ops["J2"], ops["J3"]
    assert np.abs(comm(j1, j2) - 1j * j3).max() < 1e-12
    assert np.abs(comm(j2, j3) - 1j * j1).max() < 1e-12
    assert np.abs(comm(ops["J+"], ops["J-"]) - j3).max() < 1e-12
    casimir = j1 @ j1 + j2 @ j2 + j3 @ j3
    assert np.abs(casimir - j * (j + 1) * np.eye(len(j3))).max() < 1e-12


def test_qubit_ladders():
    ops = make_factor_operators("qubit")
    assert np.abs(ops["+"] - np.array([[0, 1], [0, 0]])).max() < 1e-15
    assert np.abs(ops["-"] - ops["+"].conj().T).max() < 1e-15


@pytest.mark.parametrize("N", [2, 5, 12])
def test_boson_truncation(N):
    ops = make_factor_operators("boson", N)
    a, ad, n = ops["a"], ops["adag"], ops["n"]
    assert np.abs(ad @ a - n).max() < 1e-12
    c = comm(a, ad)
    # canonical commutator holds except on the top level
    assert np.abs(c[:-1, :-1] - np.eye(N - 1)).max() < 1e-12
    assert abs(c[-1, -1] - (1 - N)) < 1e-12


def test_named_aliases_and_products():
    lay = SpaceLayout((Factor("A", "boson", 4, "S"), Factor("J", "spin", 1, "R")))
    n1 = named(lay, "A", "adag a")
    n2 = named(lay, "A", "n")
    assert np.abs(n1.matrix - n2.matrix).max() < 1e-12
    assert np.abs(named(lay, "J", "Jz").matrix - named(lay, "J", "3").matrix).max() < 1e-15
    with pytest.raises(LayoutError, match="unknown operator"):
        named(lay, "A", "X")


def test_expression_assembly():
    lay = two_qubit_layout()
    expr = OperatorExpression.from_pairs([(0.5, {"Sigma": "Z", "Xi": "Z"}), (0.25, {"Xi": "X"})])
    H = assemble_expression(expr, lay, "H", hamiltonian=True)
    want = 0.5 * np.kron(PAULI["Z"], PAULI["Z"]) + 0.25 * np.kron(PAULI["I"], PAULI["X"])
    assert np.abs(H.matrix - want).max() < 1e-15


def test_expression_errors():
    lay = two_qubit_layout()
    with pytest.raises(LayoutError):
        assemble_expression(OperatorExpression.from_pairs([(1, {"Pi": "Z"})]), lay)
    with pytest.raises(ValueError, match="not Hermitian"):
        assemble_expression(OperatorExpression.from_pairs([(1j, {"Sigma": "Z"})]), lay, hamiltonian=True)
    with pytest.raises(DimensionError):
        assemble_expression(OperatorExpression.from_pairs([(1, {"Sigma": np.eye(3)})]), lay)


@pytest.mark.parametrize(
    "rho",
    [
        np.array([[1, 1], [0, 0]]),
        np.diag([0.7, 0.7]),
        np.diag([1.2, -0.2]),
        np.ones((2, 3)) / 2,
    ],
)
def test_invalid_densities(rho):
    with pytest.raises(InvalidStateError):
        validate_density(rho)


@settings(max_examples=50, deadline=None)
@given(v=st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_bloch_density_expectations(v):
    v = np.array(v)
    if np.linalg.norm(v) > 1:
        v = v / np.linalg.norm(v)
    rho = validate_density(bloch_density(v))
    for k, name in enumerate("XYZ"):
        assert abs(np.trace(rho @ PAULI[name]).real - v[k]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(
    a=st.lists(st.floats(-0.4, 0.4), min_size=3, max_size=3),
    b=st.lists(st.floats(-0.4, 0.4), min_size=3, max_size=3),
    g=st.lists(st.floats(-0.2, 0.2), min_size=9, max_size=9),
)
def test_two_qubit_density_moments(a, b, g):
    a, b, g = np.array(a), np.array(b), np.array(g).reshape(3, 3)
    w = two_qubit_density(a, b, g)
    assert abs(np.trace(w) - 1) < 1e-12
    p = [PAULI["X"], PAULI["Y"], PAULI["Z"]]
    for j in range(3):
        assert abs(np.trace(w @ np.kron(p[j], PAULI["I"])).real - a[j]) < 1e-12
        assert abs(np.trace(w @ np.kron(PAULI["I"], p[j])).real - b[j]) < 1e-12
        for k in range(3):
            corr = np.trace(w @ np.kron(p[j], p[k])).real - a[j] * b[k]
            assert abs(corr - g[j, k]) < 1e-12


def test_state_spec_paths():
    s = StateSpec(bloch_R=[0, 0, 0.8], label="z")
    assert np.abs(s.rho_R - np.diag([0.9, 0.1])).max() < 1e-15
    s2 = StateSpec(rho_R=np.diag([0.25, 0.75]))
    assert np.abs(s2.bloch_R - np.array([0, 0, -0.5])).max() < 1e-15
    with pytest.raises(InvalidStateError):
        StateSpec(bloch_R=[0.8, 0.8, 0])
    with pytest.raises(InvalidStateError):
        StateSpec()


def test_non_positive_correlations_rejected():
    spec = StateSpec(bloch_S=np.zeros(3), bloch_R=np.zeros(3), Gamma=np.eye(3))
    with pytest.raises(InvalidStateError, match="negative eigenvalue"):
        assemble_two_qubit_state(spec)
    ok = StateSpec(bloch_S=np.zeros(3), bloch_R=np.zeros(3), Gamma=-np.eye(3))
    w = assemble_two_qubit_state(ok)
    assert np.linalg.eigvalsh(w.matrix).min() > -1e-12


def test_interior_projector():
    lay = SpaceLayout((Factor("J", "boson", 5, "S"), Factor("M", "qubit", tag="R"),
                       Factor("K", "boson", 4, "R")))
    mask = interior_mask(lay, 2)
    assert mask.sum() == 3 * 2 * 2
    assert mask[fock_index(lay, {"J": 2, "M": 1, "K": 1})]
    assert not mask[fock_index(lay, {"J": 3})]
    assert not mask[fock_index(lay, {"K": 2})]
    p = interior_projector(lay, 2).matrix
    assert np.abs(p @ p - p).max() < 1e-15
    with pytest.raises(ValueError):
        interior_mask(lay, 4)
    with pytest.raises(LayoutError):
        interior_mask(two_qubit_layout(), 1)
