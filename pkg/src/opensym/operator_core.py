"""
Dense complex-matrix substrate for open-system symmetry checks.

Tensor layouts with an S/R split, embedding of single-factor operators,
Hermitian propagators, Heisenberg evolution, partial traces, and the
operator-algebra machinery (generated algebras, commutants, centers).

Conventions
-----------
* hbar = 1, all operators dimensionless.
* Tensor factors are ordered S first, then R, each group in declaration
  order. ``SpaceLayout`` reorders its input accordingly.
* Operator spans are orthonormal under the Hilbert-Schmidt product
  ``Tr(A^dagger B)``; matrices are vectorized row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as la

from .errors import DimensionError, LayoutError, NumericalError

KINDS = ("qubit", "spin", "boson")
TAGS = ("S", "R")

MAX_SPIN = 4.5
MAX_BOSON_CUTOFF = 32

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
SPAN_TOL = 1e-9
MAX_COMMUTANT_DIM = 32


def _as_spin(value) -> Fraction:
    try:
        j = Fraction(value)
    except (TypeError, ValueError) as exc:
        raise LayoutError(f"spin value must be a nonnegative half-integer, got {value!r}") from exc
    if j.denominator not in (1, 2) or j < 0:
        raise LayoutError(f"spin value must be a nonnegative half-integer, got {value!r}")
    return j


@dataclass(frozen=True)
class Factor:
    """One tensor factor of a layout.

    ``parameter`` is the spin value j for ``kind="spin"`` and the number of
    retained levels N (occupations 0..N-1) for ``kind="boson"``; it is
    ignored for qubits.
    """

    label: str
    kind: str
    parameter: object = None
    tag: str = "S"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LayoutError(f"unknown factor kind {self.kind!r} for {self.label!r}")
        if self.tag not in TAGS:
            raise LayoutError(f"factor {self.label!r} must be tagged S or R, got {self.tag!r}")
        if self.kind == "spin":
            j = _as_spin(self.parameter)
            if j < Fraction(1, 2) or j > MAX_SPIN:
                raise LayoutError(f"spin j={j} outside [1/2, {MAX_SPIN}] for {self.label!r}")
            object.__setattr__(self, "parameter", j)
        elif self.kind == "boson":
            if self.parameter is None or int(self.parameter) != self.parameter:
                raise LayoutError(f"boson cutoff for {self.label!r} must be an integer")
            n = int(self.parameter)
            if n < 2 or n > MAX_BOSON_CUTOFF:
                raise LayoutError(f"boson cutoff {n} outside [2, {MAX_BOSON_CUTOFF}] for {self.label!r}")
            object.__setattr__(self, "parameter", n)
        else:
            object.__setattr__(self, "parameter", None)

    @property
    def dim(self) -> int:
        if self.kind == "qubit":
            return 2
        if self.kind == "spin":
            return int(2 * self.parameter + 1)
        return self.parameter


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor factors tagged as subsystem S or reservoir R.

    When ``split`` is False the factors are the modes of a transformed basis
    (for instance normal modes mixing S and R oscillators). Tags then only
    fix the ordering; S and R operators are supplied explicitly by the model
    and partial traces are unavailable.
    """

    factors: tuple
    split: bool = True

    def __post_init__(self):
        facs = tuple(self.factors)
        if not facs:
            raise LayoutError("layout needs at least one factor")
        labels = [f.label for f in facs]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate factor labels in {labels}")
        ordered = tuple(f for f in facs if f.tag == "S") + tuple(f for f in facs if f.tag == "R")
        object.__setattr__(self, "factors", ordered)

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.factors]

    @property
    def dims(self) -> list[int]:
        return [f.dim for f in self.factors]

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def s_factors(self) -> tuple:
        return tuple(f for f in self.factors if f.tag == "S")

    @property
    def r_factors(self) -> tuple:
        return tuple(f for f in self.factors if f.tag == "R")

    @property
    def s_dim(self) -> int:
        return int(np.prod([f.dim for f in self.s_factors])) if self.s_factors else 1

    @property
    def r_dim(self) -> int:
        return int(np.prod([f.dim for f in self.r_factors])) if self.r_factors else 1

    @property
    def has_bosons(self) -> bool:
        return any(f.kind == "boson" for f in self.factors)

    def index(self, label: str) -> int:
        for i, f in enumerate(self.factors):
            if f.label == label:
                return i
        raise LayoutError(f"unknown factor label {label!r}; layout has {self.labels}")

    def factor(self, label: str) -> Factor:
        return self.factors[self.index(label)]

    def sub_layout(self, tag: str) -> "SpaceLayout":
        facs = self.s_factors if tag == "S" else self.r_factors
        if not facs:
            raise LayoutError(f"layout has no {tag} factors")
        return SpaceLayout(facs, split=self.split)

    def require_open(self):
        """Raise unless the layout has both an S and an R factor."""
        if not self.s_factors or not self.r_factors:
            raise LayoutError("open-dynamics checks need at least one S and one R factor")


class LabeledOperator:
    """Dense operator bound to a layout.

    The matrix is copied and frozen. Hermiticity and unitarity are checked
    lazily and cached.
    """

    __array_priority__ = 100

    def __init__(self, matrix, layout: SpaceLayout, label: str = ""):
        m = np.array(matrix, dtype=complex)
        d = layout.total_dim
        if m.shape != (d, d):
            raise DimensionError(f"operator {label!r} has shape {m.shape}, layout needs ({d}, {d})")
        if not np.all(np.isfinite(m)):
            raise NumericalError(f"operator {label!r} has non-finite entries")
        m.flags.writeable = False
        self.matrix = m
        self.layout = layout
        self.label = label

    def __repr__(self):
        return f"LabeledOperator({self.label!r}, dim={self.layout.total_dim})"

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @cached_property
    def is_hermitian(self) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= HERMITIAN_TOL)

    @cached_property
    def is_unitary(self) -> bool:
        m = self.matrix
        err = np.linalg.norm(m @ m.conj().T - np.eye(self.dim))
        return bool(err <= UNITARY_TOL * self.dim)

    @cached_property
    def eigh(self):
        """Eigenvalues and eigenvectors (Hermitian operators only)."""
        if not self.is_hermitian:
            raise NumericalError(f"{self.label!r} is not Hermitian")
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        try:
            w, v = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition of {self.label!r} failed: {exc}") from exc
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
            raise NumericalError(f"eigendecomposition of {self.label!r} is not finite")
        return w, v

    def dag(self) -> "LabeledOperator":
        return LabeledOperator(self.matrix.conj().T, self.layout, f"{self.label}^dag")

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def _other(self, other):
        if isinstance(other, LabeledOperator):
            if other.layout != self.layout:
                raise LayoutError(f"layout mismatch between {self.label!r} and {other.label!r}")
            return other.matrix, other.label
        return None, None

    def __matmul__(self, other):
        m, lab = self._other(other)
        if m is None:
            return NotImplemented
        return LabeledOperator(self.matrix @ m, self.layout, f"{self.label}*{lab}")

    def __add__(self, other):
        m, lab = self._other(other)
        if m is None:
            if np.isscalar(other):
                m, lab = other * np.eye(self.dim), repr(other)
            else:
                return NotImplemented
        return LabeledOperator(self.matrix + m, self.layout, f"({self.label}+{lab})")

    __radd__ = __add__

    def __sub__(self, other):
        m, lab = self._other(other)
        if m is None:
            if np.isscalar(other):
                m, lab = other * np.eye(self.dim), repr(other)
            else:
                return NotImplemented
        return LabeledOperator(self.matrix - m, self.layout, f"({self.label}-{lab})")

    def __neg__(self):
        return LabeledOperator(-self.matrix, self.layout, f"-{self.label}")

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return LabeledOperator(scalar * self.matrix, self.layout, f"{scalar}*{self.label}")

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def relabel(self, label: str) -> "LabeledOperator":
        return LabeledOperator(self.matrix, self.layout, label)


def identity(layout: SpaceLayout) -> LabeledOperator:
    return LabeledOperator(np.eye(layout.total_dim), layout, "I")


def _mat(op) -> np.ndarray:
    return op.matrix if isinstance(op, LabeledOperator) else np.asarray(op, dtype=complex)


def embed_factor_operator(factor_op, factor_label: str, layout: SpaceLayout,
                          label: str | None = None) -> LabeledOperator:
    """Tensor ``factor_op`` at the labeled slot with identities elsewhere."""
    idx = layout.index(factor_label)
    small = np.asarray(factor_op, dtype=complex)
    d = layout.factors[idx].dim
    if small.shape != (d, d):
        raise DimensionError(f"factor {factor_label!r} has dimension {d}, operator has shape {small.shape}")
    pieces = [small if i == idx else np.eye(f.dim) for i, f in enumerate(layout.factors)]
    return LabeledOperator(reduce(np.kron, pieces), layout, label or f"{factor_label}-op")


def embed_product(factor_ops: dict, layout: SpaceLayout, label: str = "") -> LabeledOperator:
    """Tensor product of several single-factor operators (identity elsewhere)."""
    for lab in factor_ops:
        layout.index(lab)
    pieces = []
    for f in layout.factors:
        if f.label in factor_ops:
            small = np.asarray(factor_ops[f.label], dtype=complex)
            if small.shape != (f.dim, f.dim):
                raise DimensionError(
                    f"factor {f.label!r} has dimension {f.dim}, operator has shape {small.shape}")
            pieces.append(small)
        else:
            pieces.append(np.eye(f.dim))
    return LabeledOperator(reduce(np.kron, pieces), layout, label)


def propagator(H: LabeledOperator, t: float) -> LabeledOperator:
    """``exp(-i t H)`` from the Hermitian eigendecomposition of ``H``."""
    w, v = H.eigh
    u = (v * np.exp(-1j * t * w)) @ v.conj().T
    out = LabeledOperator(u, H.layout, f"exp(-i{t:g}{H.label})")
    out.__dict__["is_unitary"] = True
    return out


def heisenberg_evolve(Q: LabeledOperator, H: LabeledOperator, t: float) -> LabeledOperator:
    """``exp(itH) Q exp(-itH)``."""
    if Q.layout != H.layout:
        raise LayoutError(f"layout mismatch between {Q.label!r} and {H.label!r}")
    w, v = H.eigh
    q = v.conj().T @ Q.matrix @ v
    phase = np.exp(1j * t * (w[:, None] - w[None, :]))
    out = LabeledOperator(v @ (q * phase) @ v.conj().T, H.layout, f"{Q.label}({t:g})")
    if Q.__dict__.get("is_hermitian"):
        out.__dict__["is_hermitian"] = True
    return out


def _traced(A: np.ndarray, layout: SpaceLayout, keep: str) -> np.ndarray:
    ds, dr = layout.s_dim, layout.r_dim
    a = A.reshape(ds, dr, ds, dr)
    if keep == "S":
        return np.einsum("ikjk->ij", a)
    return np.einsum("kikj->ij", a)


def partial_trace_R(A, layout: SpaceLayout | None = None) -> LabeledOperator:
    """Trace over every R-tagged factor; the result lives on the S factors."""
    layout = layout or A.layout
    if not layout.split:
        raise LayoutError("partial trace needs a layout with a genuine S/R tensor split")
    if not layout.r_factors:
        raise LayoutError("no R factors to trace over")
    out = _traced(_mat(A), layout, "S")
    return LabeledOperator(out, layout.sub_layout("S"), f"TrR[{getattr(A, 'label', '')}]")


def partial_trace_S(A, layout: SpaceLayout | None = None) -> LabeledOperator:
    """Trace over every S-tagged factor; the result lives on the R factors."""
    layout = layout or A.layout
    if not layout.split:
        raise LayoutError("partial trace needs a layout with a genuine S/R tensor split")
    if not layout.s_factors:
        raise LayoutError("no S factors to trace over")
    out = _traced(_mat(A), layout, "R")
    return LabeledOperator(out, layout.sub_layout("R"), f"TrS[{getattr(A, 'label', '')}]")


def s_operator(A_s, layout: SpaceLayout, label: str = "") -> LabeledOperator:
    """``A_s`` (on the S factors) tensored with the R identity."""
    return LabeledOperator(np.kron(_mat(A_s), np.eye(layout.r_dim)), layout, label)


def r_operator(B_r, layout: SpaceLayout, label: str = "") -> LabeledOperator:
    """S identity tensored with ``B_r`` (on the R factors)."""
    return LabeledOperator(np.kron(np.eye(layout.s_dim), _mat(B_r)), layout, label)


def locality_deviation(A, layout: SpaceLayout, where: str) -> float:
    """Frobenius distance of ``A`` from the form ``A_S x I`` (``where="S"``) or ``I x B_R``."""
    A = _mat(A)
    if where == "S":
        close = np.kron(_traced(A, layout, "S") / layout.r_dim, np.eye(layout.r_dim))
    else:
        close = np.kron(np.eye(layout.s_dim), _traced(A, layout, "R") / layout.s_dim)
    return float(np.linalg.norm(A - close))


# --- operator spans -------------------------------------------------------


def _extend_orthonormal(basis: np.ndarray, v: np.ndarray, tol: float):
    """Return the new unit direction ``v`` adds to the row space of ``basis``, or None.

    ``v`` is normalized first; two projection passes keep the basis orthonormal.
    """
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return None
    r = v / nv
    if basis.shape[0]:
        for _ in range(2):
            r = r - basis.T @ (basis.conj() @ r)
    nr = np.linalg.norm(r)
    if nr <= tol:
        return None
    return r / nr


class OperatorSpan:
    """Hilbert-Schmidt orthonormal basis of a linear space of operators.

    ``complete`` is False when a closure computation stopped at ``max_dim``.
    """

    def __init__(self, vectors: np.ndarray, layout: SpaceLayout, complete: bool = True):
        d = layout.total_dim
        vecs = np.asarray(vectors, dtype=complex).reshape(-1, d * d)
        self.vectors = vecs
        self.layout = layout
        self.complete = complete

    @classmethod
    def from_operators(cls, ops: Iterable, layout: SpaceLayout | None = None,
                       tol: float = SPAN_TOL) -> "OperatorSpan":
        ops = list(ops)
        if layout is None:
            layout = ops[0].layout
        d = layout.total_dim
        basis = np.zeros((0, d * d), dtype=complex)
        for op in ops:
            if isinstance(op, LabeledOperator) and op.layout != layout:
                raise LayoutError("operators in a span must share a layout")
            new = _extend_orthonormal(basis, _mat(op).reshape(-1), tol)
            if new is not None:
                basis = np.vstack([basis, new])
        return cls(basis, layout)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]

    @property
    def matrices(self) -> np.ndarray:
        d = self.layout.total_dim
        return self.vectors.reshape(-1, d, d)

    @property
    def basis(self) -> list[LabeledOperator]:
        return [LabeledOperator(m, self.layout, f"b{i}") for i, m in enumerate(self.matrices)]

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the span, acting on row-major vectorized operators."""
        return self.vectors.T @ self.vectors.conj()

    def residual(self, op) -> float:
        """Distance of the HS-normalized ``op`` from the span."""
        v = _mat(op).reshape(-1)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v = v / nv
        return float(np.linalg.norm(v - self.vectors.T @ (self.vectors.conj() @ v)))

    def contains(self, op, tol: float = SPAN_TOL) -> bool:
        return self.residual(op) <= tol

    def same_span(self, other: "OperatorSpan", tol: float = 1e-10) -> bool:
        if self.dimension != other.dimension:
            return False
        return bool(np.abs(self.projector() - other.projector()).max() <= tol)


def generate_operator_algebra(seeds: Sequence, max_dim: int | None = None,
                              include_identity: bool = False,
                              tol: float = SPAN_TOL) -> OperatorSpan:
    """Close ``seeds`` under matrix products (hence commutators) into an algebra.

    The basis grows until every product of basis elements lies in the span.
    When the span would exceed ``max_dim`` the partial span is returned with
    ``complete=False``.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed operator")
    layout = seeds[0].layout
    d = layout.total_dim
    cap = d * d if max_dim is None else max_dim
    if cap > d * d:
        raise ValueError(f"max_dim {cap} exceeds total_dim^2 = {d * d}")
    basis = np.zeros((0, d * d), dtype=complex)
    items = ([np.eye(d)] if include_identity else []) + [_mat(s) for s in seeds]
    complete = True

    def absorb(candidates):
        nonlocal basis, complete
        cands = candidates.reshape(len(candidates), -1)
        norms = np.linalg.norm(cands, axis=1)
        keep = norms > 0
        cands = cands[keep] / norms[keep, None]
        if basis.shape[0]:
            res = cands - (cands @ basis.conj().T) @ basis
            res = res - (res @ basis.conj().T) @ basis
        else:
            res = cands
        added = 0
        for i in np.nonzero(np.linalg.norm(res, axis=1) > tol)[0]:
            new = _extend_orthonormal(basis, cands[i], tol)
            if new is None:
                continue
            if basis.shape[0] >= cap:
                complete = False
                return added
            basis = np.vstack([basis, new])
            added += 1
        return added

    absorb(np.array(items))
    done = 0
    while done < basis.shape[0] and complete:
        x = basis[done].reshape(d, d)
        mats = basis[: basis.shape[0]].reshape(-1, d, d)
        left = np.einsum("ij,kjl->kil", x, mats)
        right = np.einsum("kij,jl->kil", mats, x)
        absorb(np.concatenate([left, right]))
        done += 1
    return OperatorSpan(basis, layout, complete=complete)


def heisenberg_orbit(Q_set: Sequence, H: LabeledOperator, max_depth: int | None = None,
                     tol: float = SPAN_TOL) -> OperatorSpan:
    """Span of ``Q_set`` and all iterated commutators ``[...[Q, H], ..., H]``.

    This is the linear span of ``exp(isH) Q exp(-isH)`` over all real s.
    """
    layout = H.layout
    d = layout.total_dim
    h = H.matrix
    basis = np.zeros((0, d * d), dtype=complex)
    frontier = []
    for q in Q_set:
        new = _extend_orthonormal(basis, _mat(q).reshape(-1), tol)
        if new is not None:
            basis = np.vstack([basis, new])
            frontier.append(new)
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        nxt = []
        for v in frontier:
            x = v.reshape(d, d)
            new = _extend_orthonormal(basis, (x @ h - h @ x).reshape(-1), tol)
            if new is not None:
                basis = np.vstack([basis, new])
                nxt.append(new)
        frontier = nxt
        depth += 1
    return OperatorSpan(basis, layout)


def _commutator_superop(a: np.ndarray) -> np.ndarray:
    d = a.shape[0]
    eye = np.eye(d)
    return np.kron(a, eye) - np.kron(eye, a.T)


def commutant_basis(span: OperatorSpan, rank_tol: float | None = None) -> OperatorSpan:
    """Orthonormal basis of all X with ``[X, A] = 0`` for every A in ``span``.

    The stacked superoperators ``X -> [X, A_i]`` are reduced to a square
    triangular factor by incremental QR, then the null space is read off an
    SVD. Singular values below ``total_dim * eps * s_max`` count as zero
    unless ``rank_tol`` (relative to ``s_max``) is given.
    """
    layout = span.layout
    d = layout.total_dim
    if span.dimension == 0:
        raise ValueError("commutant of an empty span is undefined here")
    if d > MAX_COMMUTANT_DIM:
        raise ValueError(f"commutant computation capped at total_dim {MAX_COMMUTANT_DIM}, got {d}")
    n = d * d
    r = np.zeros((0, n), dtype=complex)
    for a in span.matrices:
        stacked = np.vstack([r, _commutator_superop(a)])
        r = la.qr(stacked, mode="r", check_finite=False)[0][:n]
    if r.shape[0] < n:
        r = np.vstack([r, np.zeros((n - r.shape[0], n), dtype=complex)])
    try:
        _, s, vh = la.svd(r, check_finite=False)
    except la.LinAlgError as exc:
        raise NumericalError(f"SVD failed in commutant computation: {exc}") from exc
    smax = s[0] if s.size and s[0] > 0 else 1.0
    rel = d * np.finfo(float).eps if rank_tol is None else rank_tol
    null = vh[s <= rel * smax].conj()
    return OperatorSpan(null, layout)


def algebra_center(span: OperatorSpan, tol: float = 1e-10) -> OperatorSpan:
    """Elements of ``span`` that commute with every element of ``span``."""
    mats = span.matrices
    k = len(mats)
    cols = []
    for b in mats:
        cols.append(np.concatenate([(b @ a - a @ b).reshape(-1) for a in mats]))
    m = np.array(cols).T
    _, s, vh = la.svd(m, full_matrices=True)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    svals = np.zeros(k)
    svals[: s.size] = s
    coeffs = vh[svals <= tol * smax].conj()
    vecs = coeffs @ span.vectors
    return OperatorSpan.from_operators([v.reshape(span.layout.total_dim, -1) for v in vecs],
                                       span.layout) if len(vecs) else OperatorSpan(
        np.zeros((0, span.layout.total_dim ** 2)), span.layout)
