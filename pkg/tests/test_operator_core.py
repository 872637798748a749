import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opensym.errors import DimensionError, LayoutError, NumericalError
from opensym.model_library import PAULI, make_factor_operators, named, two_qubit_layout
from opensym.operator_core import (
    Factor,
    LabeledOperator,
    OperatorSpan,
    SpaceLayout,
    algebra_center,
    commutant_basis,
    embed_factor_operator,
    embed_product,
    generate_operator_algebra,
    heisenberg_evolve,
    heisenberg_orbit,
    locality_deviation,
    partial_trace_R,
    partial_trace_S,
    propagator,
    r_operator,
    s_operator,
)


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def qubits(n, n_s=1):
    return SpaceLayout(tuple(Factor(f"q{i}", "qubit", tag="S" if i < n_s else "R") for i in range(n)))


def test_layout_orders_s_before_r():
    lay = SpaceLayout((Factor("R1", "qubit", tag="R"), Factor("S1", "spin", 1, "S")))
    assert lay.labels == ["S1", "R1"]
    assert lay.dims == [3, 2]
    assert lay.total_dim == 6
    assert lay.s_dim == 3 and lay.r_dim == 2


@pytest.mark.parametrize(
    "factors",
    [
        (),
        (Factor("a", "qubit"), Factor("a", "qubit")),
    ],
)
def test_layout_rejects_bad_factor_lists(factors):
    with pytest.raises(LayoutError):
        SpaceLayout(factors)


@pytest.mark.parametrize(
    "kind, parameter, tag",
    [
        ("fermion", None, "S"),
        ("qubit", None, "X"),
        ("spin", 0, "S"),
        ("spin", 7, "S"),
        ("boson", 1, "R"),
        ("boson", 2.5, "R"),
        ("boson", 64, "R"),
    ],
)
def test_factor_validation(kind, parameter, tag):
    with pytest.raises(LayoutError):
        Factor("f", kind, parameter, tag)


@pytest.mark.parametrize("j, dim", [(0.5, 2), (1, 3), ("3/2", 4), (2.5, 6)])
def test_spin_dimension(j, dim):
    assert Factor("J", "spin", j).dim == dim


def test_unknown_label_is_reported():
    lay = two_qubit_layout()
    with pytest.raises(LayoutError, match="unknown factor label"):
        lay.index("Pi")


def test_operator_shape_and_finiteness_checked():
    lay = two_qubit_layout()
    with pytest.raises(DimensionError):
        LabeledOperator(np.eye(3), lay)
    bad = np.eye(4)
    bad[0, 0] = np.nan
    with pytest.raises(NumericalError):
        LabeledOperator(bad, lay)


def test_operator_matrix_is_frozen():
    op = LabeledOperator(np.eye(4), two_qubit_layout(), "I")
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0


def test_arithmetic_and_layout_mismatch():
    lay = two_qubit_layout()
    x = named(lay, "Sigma", "X")
    z = named(lay, "Xi", "Z")
    assert np.abs((x @ x).matrix - np.eye(4)).max() < 1e-15
    assert np.abs((2 * x - x * 2).matrix).max() < 1e-15
    assert np.abs((x / 2 + 0.5).matrix - 0.5 * (x.matrix + np.eye(4))).max() < 1e-15
    assert np.abs((-z).matrix + z.matrix).max() < 1e-15
    other = LabeledOperator(np.eye(8), qubits(3))
    with pytest.raises(LayoutError):
        x @ other


def test_embed_matches_kron_ordering():
    lay = qubits(3)
    x, z = PAULI["X"], PAULI["Z"]
    op = embed_product({"q0": x, "q2": z}, lay)
    assert np.abs(op.matrix - np.kron(np.kron(x, np.eye(2)), z)).max() < 1e-15
    single = embed_factor_operator(z, "q1", lay)
    assert np.abs(single.matrix - np.kron(np.kron(np.eye(2), z), np.eye(2))).max() < 1e-15
    with pytest.raises(DimensionError):
        embed_product({"q0": np.eye(3)}, lay)


def test_propagator_unitary_and_group_law():
    rng = np.random.default_rng(3)
    lay = qubits(2)
    H = LabeledOperator(random_hermitian(rng, 4), lay, "H")
    u1, u2, u12 = propagator(H, 0.4), propagator(H, 0.9), propagator(H, 1.3)
    assert u1.is_unitary
    assert np.abs(u1.matrix @ u2.matrix - u12.matrix).max() < 1e-12


def test_propagator_rejects_non_hermitian():
    lay = qubits(1)
    with pytest.raises(NumericalError):
        propagator(LabeledOperator(np.array([[0, 1], [0, 0]]), lay), 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-5, 5), s=st.floats(-5, 5))
def test_heisenberg_evolution_is_a_homomorphism(seed, t, s):
    rng = np.random.default_rng(seed)
    lay = qubits(2)
    H = LabeledOperator(random_hermitian(rng, 4), lay, "H")
    A = LabeledOperator(rng.standard_normal((4, 4)), lay, "A")
    B = LabeledOperator(rng.standard_normal((4, 4)), lay, "B")
    lhs = heisenberg_evolve(A @ B, H, t).matrix
    rhs = heisenberg_evolve(A, H, t).matrix @ heisenberg_evolve(B, H, t).matrix
    assert np.abs(lhs - rhs).max() < 1e-9
    two_step = heisenberg_evolve(heisenberg_evolve(A, H, s), H, t).matrix
    assert np.abs(two_step - heisenberg_evolve(A, H, s + t).matrix).max() < 1e-9
    u = propagator(H, t).matrix
    assert np.abs(heisenberg_evolve(A, H, t).matrix - u.conj().T @ A.matrix @ u).max() < 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_partial_traces_of_products(seed):
    rng = np.random.default_rng(seed)
    lay = SpaceLayout((Factor("S", "spin", 1, "S"), Factor("R", "qubit", tag="R")))
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    op = LabeledOperator(np.kron(a, b), lay)
    assert np.abs(partial_trace_R(op).matrix - np.trace(b) * a).max() < 1e-12
    assert np.abs(partial_trace_S(op).matrix - np.trace(a) * b).max() < 1e-12


def test_partial_trace_needs_split_layout():
    lay = SpaceLayout((Factor("J", "boson", 3, "S"), Factor("K", "boson", 3, "R")), split=False)
    with pytest.raises(LayoutError):
        partial_trace_R(LabeledOperator(np.eye(9), lay))


def test_locality_deviation():
    lay = two_qubit_layout()
    s_op = s_operator(PAULI["X"], lay)
    r_op = r_operator(PAULI["Y"], lay)
    assert locality_deviation(s_op, lay, "S") < 1e-15
    assert locality_deviation(r_op, lay, "R") < 1e-15
    assert locality_deviation(s_op, lay, "R") > 1.0
    assert np.abs(s_op.matrix - named(lay, "Sigma", "X").matrix).max() < 1e-15


def test_single_qubit_algebra_is_full():
    lay = qubits(1)
    seeds = [LabeledOperator(PAULI[k], lay, k) for k in "XYZ"]
    span = generate_operator_algebra(seeds, include_identity=True)
    assert span.dimension == 4
    assert span.complete
    assert np.abs(span.gram() - np.eye(4)).max() < 1e-12


def test_algebra_is_closed_and_order_independent():
    lay = qubits(2)
    seeds = [named(lay, "q0", "X"), named(lay, "q0", "Z") @ named(lay, "q1", "Z")]
    span = generate_operator_algebra(seeds)
    for a in span.matrices:
        for b in span.matrices:
            assert span.contains(a @ b, 1e-9)
    other = generate_operator_algebra(seeds[::-1])
    assert span.same_span(other, 1e-10)


def test_algebra_cap_is_flagged():
    lay = qubits(2)
    seeds = [named(lay, "q0", "X"), named(lay, "q1", "Y"), named(lay, "q0", "Z")]
    span = generate_operator_algebra(seeds, max_dim=5)
    assert not span.complete
    assert span.dimension == 5


def test_ladder_algebra_contains_number_operator():
    lay = SpaceLayout((Factor("A", "boson", 6, "S"),))
    ops = make_factor_operators("boson", 6)
    a = LabeledOperator(ops["a"], lay, "a")
    span = generate_operator_algebra([a, a.dag()])
    n = LabeledOperator(ops["n"], lay, "n")
    assert span.residual(n) < 1e-10


def test_heisenberg_orbit_spans_evolved_operators():
    rng = np.random.default_rng(11)
    lay = qubits(2)
    H = LabeledOperator(random_hermitian(rng, 4), lay, "H")
    q = named(lay, "q0", "Z")
    orbit = heisenberg_orbit([q], H)
    for t in (0.3, 1.7, 4.0):
        assert orbit.residual(heisenberg_evolve(q, H, t)) < 1e-9


@pytest.mark.parametrize("labels, dim", [(("q0",), 4), (("q0", "q1"), 1)])
def test_commutant_of_pauli_sets(labels, dim):
    lay = qubits(2, n_s=2)
    ops = [named(lay, lab, k) for lab in labels for k in "XYZ"]
    span = OperatorSpan.from_operators(ops)
    comm = commutant_basis(span)
    assert comm.dimension == dim
    for x in comm.matrices:
        for a in span.matrices:
            assert np.abs(x @ a - a @ x).max() < 1e-10


def test_commutant_dimension_stable_over_rank_tolerance():
    lay = qubits(3)
    ops = [named(lay, "q0", k) for k in "XYZ"] + [named(lay, "q1", "Z")]
    span = OperatorSpan.from_operators(ops)
    dims = {commutant_basis(span, rank_tol=tol).dimension for tol in (1e-13, 1e-10, 1e-7, 1e-4)}
    assert dims == {8}


def test_commutant_size_cap():
    lay = SpaceLayout((Factor("A", "boson", 6, "S"), Factor("B", "boson", 6, "R")))
    with pytest.raises(ValueError):
        commutant_basis(OperatorSpan.from_operators([np.eye(36)], lay))


def test_center_of_block_algebra():
    lay = qubits(2)
    seeds = [named(lay, "q0", "Z"), named(lay, "q1", "X"), named(lay, "q1", "Z")]
    span = generate_operator_algebra(seeds, include_identity=True)
    center = algebra_center(span)
    assert center.dimension == 2
    assert center.contains(named(lay, "q0", "Z").matrix)
    assert center.contains(np.eye(4))
