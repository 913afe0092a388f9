"""Dense complex linear algebra for Hermitian operators and density operators.

All dimensions of interest are small (system ⊗ detector ⊗ probe, at most a
few dozen), so everything is stored as dense ``numpy`` arrays.  Values are
immutable after construction and every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    HermiticityViolation,
    InternalNumericError,
    StateValidationError,
)

HERMITICITY_TOL = 1e-9
EIGENVALUE_FLOOR = -1e-9
TRACE_TOL = 1e-9
DEFAULT_GROUP_TOL = 1e-8

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_complex_matrix(entries, square: bool = False) -> np.ndarray:
    """Coerce ``entries`` to a finite complex 2-D array (read-only)."""
    m = np.array(entries, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise StateValidationError("matrix entries must be finite")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    m.setflags(write=False)
    return m


def max_norm(m: np.ndarray) -> float:
    """Entrywise max-abs norm, the gate norm used throughout."""
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class HermitianOperator:
    """A Hermitian matrix, symmetrized to (M + M†)/2 at construction.

    Construction rejects inputs whose anti-Hermitian part exceeds
    ``HERMITICITY_TOL`` in max-norm; smaller deviations (file round-trips)
    are silently symmetrized away.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, square=True)
        defect = max_norm(m - m.conj().T)
        if defect > HERMITICITY_TOL:
            raise HermiticityViolation(
                f"anti-Hermitian part has max-norm {defect:.3e} > {HERMITICITY_TOL}"
            )
        sym = (m + m.conj().T) / 2
        sym.setflags(write=False)
        object.__setattr__(self, "matrix", sym)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class DensityOperator:
    """Positive-semidefinite unit-trace operator.

    Eigenvalues in [-1e-9, 0) are clipped to zero and the state is
    renormalized; genuinely negative eigenvalues or a trace off by more
    than 1e-9 are rejected.
    """

    op: HermitianOperator

    def __post_init__(self):
        op = self.op
        if not isinstance(op, HermitianOperator):
            op = HermitianOperator(as_complex_matrix(op, square=True))
        evals, evecs = np.linalg.eigh(op.matrix)
        if evals.min() < EIGENVALUE_FLOOR:
            raise StateValidationError(
                f"state has eigenvalue {evals.min():.3e} < {EIGENVALUE_FLOOR}"
            )
        tr = float(np.real(np.trace(op.matrix)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateValidationError(f"state trace {tr!r} differs from 1 by > {TRACE_TOL}")
        if evals.min() < 0.0:
            clipped = np.clip(evals, 0.0, None)
            rebuilt = (evecs * clipped) @ evecs.conj().T
            rebuilt /= np.real(np.trace(rebuilt))
            op = HermitianOperator(rebuilt)
        object.__setattr__(self, "op", op)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalue branches of a Hermitian operator with grouped projectors.

    ``branches`` is ordered by descending eigenvalue; eigenvalues closer
    than ``group_tol * (1 + |eigenvalue|)`` share one summed projector.
    """

    branches: tuple[tuple[float, HermitianOperator], ...]
    group_tol: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([ev for ev, _ in self.branches])

    @property
    def projectors(self) -> list[HermitianOperator]:
        return [p for _, p in self.branches]


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, (HermitianOperator, DensityOperator)):
        return x.matrix
    return as_complex_matrix(x)


def _check_same_dim(*mats: np.ndarray):
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"incompatible matrix shapes: {sorted(dims)}")


def jordan_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Symmetric product (AB + BA)/2; Hermitian for Hermitian inputs."""
    am, bm = _matrix_of(a), _matrix_of(b)
    _check_same_dim(am, bm)
    return HermitianOperator((am @ bm + bm @ am) / 2)


def commutator_bound(a: HermitianOperator, b: HermitianOperator, rho: DensityOperator) -> float:
    """Uncertainty bound C_AB = |<[A, B]> / 2i| in the state ``rho``."""
    am, bm, rm = _matrix_of(a), _matrix_of(b), _matrix_of(rho)
    _check_same_dim(am, bm, rm)
    t = np.trace((am @ bm - bm @ am) @ rm)
    return float(abs(t)) / 2


def expectation(x, rho) -> float:
    """Real expectation value Tr(X rho) of a Hermitian X."""
    xm, rm = _matrix_of(x), _matrix_of(rho)
    _check_same_dim(xm, rm)
    return float(np.real(np.trace(xm @ rm)))


def expectation_and_variance(a: HermitianOperator, rho: DensityOperator) -> tuple[float, float]:
    """Mean Tr(A rho) and variance Tr(A^2 rho) - mean^2 (clipped at 0)."""
    am, rm = _matrix_of(a), _matrix_of(rho)
    _check_same_dim(am, rm)
    mean = float(np.real(np.trace(am @ rm)))
    second = float(np.real(np.trace(am @ am @ rm)))
    var = second - mean * mean
    if var < -1e-12:
        raise InternalNumericError(f"variance {var:.3e} below round-off floor")
    return mean, max(var, 0.0)


def spectral_decompose(a: HermitianOperator, group_tol: float = DEFAULT_GROUP_TOL) -> SpectralDecomposition:
    """Eigen-branches of ``a``, merging numerically degenerate eigenvalues."""
    am = _matrix_of(a)
    try:
        evals, evecs = np.linalg.eigh(am)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise InternalNumericError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]

    branches: list[tuple[float, HermitianOperator]] = []
    i = 0
    n = len(evals)
    while i < n:
        j = i + 1
        while j < n and abs(evals[j] - evals[i]) <= group_tol * (1 + abs(evals[i])):
            j += 1
        vecs = evecs[:, i:j]
        proj = vecs @ vecs.conj().T
        branches.append((float(np.mean(evals[i:j])), HermitianOperator(proj)))
        i = j
    return SpectralDecomposition(tuple(branches), group_tol)


def tensor_product(x, y) -> np.ndarray:
    """Kronecker product with the system factor first (A ⊗ 1 ordering)."""
    return np.kron(_matrix_of(x), _matrix_of(y))


def partial_trace(x, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one tensor factor of a (d_S * d_D)-dimensional matrix.

    Parameters
    ----------
    x : matrix of dimension d_S * d_D
    dims : (d_S, d_D)
    keep : "system" to trace out the detector, "detector" for the converse.
    """
    xm = _matrix_of(x)
    d_s, d_d = dims
    if xm.shape != (d_s * d_d, d_s * d_d):
        raise DimensionMismatch(
            f"matrix of shape {xm.shape} does not factor as ({d_s}, {d_d})"
        )
    x4 = xm.reshape(d_s, d_d, d_s, d_d)
    if keep == "system":
        return np.einsum("ikjk->ij", x4)
    if keep == "detector":
        return np.einsum("kikj->ij", x4)
    raise ValueError(f"keep must be 'system' or 'detector', got {keep!r}")
