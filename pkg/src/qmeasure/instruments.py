"""Quantum instruments: outcome-indexed Kraus families and contextual values.

An :class:`Instrument` is the mathematical stand-in for a laboratory
apparatus: each outcome carries a set of Kraus operators, the induced POM
elements give outcome probabilities, and a value assignment over outcome
labels turns the apparatus into an effective observable on the system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CompletenessViolation,
    DimensionMismatch,
    DuplicateLabel,
    MissingLabel,
    NotExpressible,
    UnknownLabel,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    as_complex_matrix,
    max_norm,
)

COMPLETENESS_TOL = 1e-9
POM_PSD_FLOOR = -1e-10
DETECTOR_BRANCH_CUTOFF = 1e-12
CV_RESIDUAL_TOL = 1e-8

# Value assignments are plain mappings from outcome label to real value.
ValueAssignment = Mapping[str, float]


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators belonging to one outcome label."""

    label: str
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_complex_matrix(m, square=True) for m in self.operators)
        if not ops:
            raise DimensionMismatch(f"outcome {self.label!r} has no Kraus operators")
        dims = {m.shape[0] for m in ops}
        if len(dims) != 1:
            raise DimensionMismatch(f"outcome {self.label!r} mixes dimensions {sorted(dims)}")
        if all(max_norm(m) == 0.0 for m in ops):
            raise CompletenessViolation(f"outcome {self.label!r} has only zero operators")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


@dataclass(frozen=True)
class IndirectModel:
    """Explicit system-detector model: U acting on rho_S ⊗ rho_D, read in a basis."""

    system_dim: int
    detector_state: DensityOperator
    unitary: np.ndarray
    readout_basis: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        d_s = self.system_dim
        d_d = self.detector_state.dim
        u = as_complex_matrix(self.unitary, square=True)
        if u.shape[0] != d_s * d_d:
            raise DimensionMismatch(
                f"unitary dimension {u.shape[0]} != system * detector = {d_s * d_d}"
            )
        if max_norm(u.conj().T @ u - np.eye(d_s * d_d)) > 1e-9:
            raise CompletenessViolation("coupling matrix is not unitary to 1e-9")
        basis = tuple(np.asarray(v, dtype=complex).reshape(d_d) for v in self.readout_basis)
        if len(basis) != d_d:
            raise DimensionMismatch(f"readout basis has {len(basis)} vectors, need {d_d}")
        gram = np.array([[vi.conj() @ vj for vj in basis] for vi in basis])
        if max_norm(gram - np.eye(d_d)) > 1e-9:
            raise CompletenessViolation("readout basis is not orthonormal to 1e-9")
        labels = tuple(str(l) for l in self.labels)
        if len(labels) != d_d:
            raise DimensionMismatch(f"{len(labels)} labels for {d_d} readout vectors")
        if len(set(labels)) != len(labels):
            raise DuplicateLabel("readout labels must be unique")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "readout_basis", basis)
        object.__setattr__(self, "labels", labels)

    @property
    def joint_dim(self) -> int:
        return self.system_dim * self.detector_state.dim

    def readout_observable(self, values: ValueAssignment) -> np.ndarray:
        """Detector-space observable sum_k m_k |k><k| for the given values."""
        d_d = self.detector_state.dim
        m = np.zeros((d_d, d_d), dtype=complex)
        for label, vec in zip(self.labels, self.readout_basis):
            if label not in values:
                raise MissingLabel(f"no value assigned to readout label {label!r}")
            m += float(values[label]) * np.outer(vec, vec.conj())
        return m


@dataclass(frozen=True)
class Instrument:
    """Validated family of Kraus sets, one per outcome label.

    Build through :meth:`from_kraus` or :meth:`from_indirect`; the
    constructor enforces completeness and positivity of the induced POM.
    """

    outcomes: tuple[KrausSet, ...]
    dim: int

    def __post_init__(self):
        labels = [ks.label for ks in self.outcomes]
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"duplicate outcome labels in {labels}")
        dims = {ks.dim for ks in self.outcomes}
        if dims != {self.dim}:
            raise DimensionMismatch(f"Kraus dimensions {sorted(dims)} != declared {self.dim}")
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for ks in self.outcomes:
            for m in ks.operators:
                total += m.conj().T @ m
        defect = max_norm(total - np.eye(self.dim))
        if defect > COMPLETENESS_TOL:
            raise CompletenessViolation(
                f"sum of M†M deviates from identity by {defect:.3e} > {COMPLETENESS_TOL}"
            )
        for ks in self.outcomes:
            p = sum(m.conj().T @ m for m in ks.operators)
            if np.linalg.eigvalsh(p).min() < POM_PSD_FLOOR:
                raise CompletenessViolation(f"POM element {ks.label!r} is not PSD")

    @classmethod
    def from_kraus(cls, sets: Sequence[KrausSet]) -> "Instrument":
        sets = tuple(sets)
        if not sets:
            raise DimensionMismatch("instrument needs at least one outcome")
        return cls(sets, sets[0].dim)

    @classmethod
    def from_indirect(cls, model: IndirectModel) -> "Instrument":
        """Kraus operators M_{k,l} = sqrt(p_l) <k|U|l> over detector eigenbranches.

        Eigenbranches with weight below ``DETECTOR_BRANCH_CUTOFF`` are dropped.
        """
        d_s, d_d = model.system_dim, model.detector_state.dim
        p_l, vecs = np.linalg.eigh(model.detector_state.matrix)
        u4 = model.unitary.reshape(d_s, d_d, d_s, d_d)
        sets = []
        for label, k_vec in zip(model.labels, model.readout_basis):
            ops = []
            for l in range(d_d):
                if p_l[l] <= DETECTOR_BRANCH_CUTOFF:
                    continue
                l_vec = vecs[:, l]
                block = np.einsum("b,ibjd,d->ij", k_vec.conj(), u4, l_vec)
                ops.append(np.sqrt(p_l[l]) * block)
            sets.append(KrausSet(label, tuple(ops)))
        return cls(tuple(sets), d_s)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(ks.label for ks in self.outcomes)

    def outcome(self, label: str) -> KrausSet:
        for ks in self.outcomes:
            if ks.label == label:
                return ks
        raise UnknownLabel(f"no outcome labelled {label!r}")

    def pom(self) -> list[HermitianOperator]:
        """POM elements P_k = sum_l M†_{k,l} M_{k,l}, in declared outcome order."""
        return [self.pom_element(ks.label) for ks in self.outcomes]

    def pom_element(self, label: str) -> HermitianOperator:
        ks = self.outcome(label)
        p = sum(m.conj().T @ m for m in ks.operators)
        return HermitianOperator(p)

    def apply_selective(self, label: str, rho: DensityOperator) -> HermitianOperator:
        """Unnormalized post-measurement operator sum_l M rho M† for one outcome."""
        ks = self.outcome(label)
        rm = np.asarray(rho)
        if rm.shape[0] != self.dim:
            raise DimensionMismatch(f"state dimension {rm.shape[0]} != {self.dim}")
        out = sum(m @ rm @ m.conj().T for m in ks.operators)
        return HermitianOperator(out)

    def apply_nonselective(self, rho: DensityOperator) -> DensityOperator:
        """Post-measurement state with the outcome record discarded."""
        total = sum(self.apply_selective(ks.label, rho).matrix for ks in self.outcomes)
        return DensityOperator(HermitianOperator(total))

    def adjoint_apply(self, label: str, x: HermitianOperator) -> HermitianOperator:
        """Heisenberg-picture dual sum_l M† X M for one outcome."""
        ks = self.outcome(label)
        xm = np.asarray(x)
        if xm.shape[0] != self.dim:
            raise DimensionMismatch(f"operator dimension {xm.shape[0]} != {self.dim}")
        return HermitianOperator(sum(m.conj().T @ xm @ m for m in ks.operators))

    def adjoint_nonselective(self, x: HermitianOperator) -> HermitianOperator:
        """Dual of the nonselective channel: sum over all outcomes of M† X M."""
        total = sum(self.adjoint_apply(ks.label, x).matrix for ks in self.outcomes)
        return HermitianOperator(total)

    def effective_observable(self, values: ValueAssignment) -> HermitianOperator:
        """Observable sum_k m_k P_k actually estimated by the apparatus."""
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for ks in self.outcomes:
            if ks.label not in values:
                raise MissingLabel(f"no value assigned to outcome {ks.label!r}")
            total += float(values[ks.label]) * self.pom_element(ks.label).matrix
        return HermitianOperator(total)

    def contextual_values(self, target: HermitianOperator) -> dict[str, float]:
        """Minimum-norm values solving sum_k m_k P_k = target, keyed by label."""
        m = solve_contextual_values(self.pom(), target)
        return {label: float(v) for label, v in zip(self.labels, m)}


def squared_values(values: ValueAssignment) -> dict[str, float]:
    """The pointwise-squared spectrum {label: m_k^2}."""
    return {label: float(v) ** 2 for label, v in values.items()}


def solve_contextual_values(
    pom: Sequence[HermitianOperator], target: HermitianOperator
) -> np.ndarray:
    """Minimum-Euclidean-norm solution of sum_k m_k P_k = target.

    The POM elements are vectorized over the real vector space of Hermitian
    matrices and the system is solved by pseudoinverse.  Raises
    :class:`NotExpressible` if the residual exceeds ``CV_RESIDUAL_TOL`` in
    max-norm.
    """
    if not pom:
        raise DimensionMismatch("empty POM")
    mats = [np.asarray(p) for p in pom]
    tm = np.asarray(target)
    if any(m.shape != tm.shape for m in mats):
        raise DimensionMismatch("POM elements and target must share dimension")

    def vec(h: np.ndarray) -> np.ndarray:
        return np.concatenate([h.real.ravel(), h.imag.ravel()])

    design = np.column_stack([vec(m) for m in mats])
    m_vals, *_ = np.linalg.lstsq(design, vec(tm), rcond=None)
    residual = max_norm(sum(v * m for v, m in zip(m_vals, mats)) - tm)
    if residual > CV_RESIDUAL_TOL:
        raise NotExpressible(
            f"target outside POM span (residual {residual:.3e} > {CV_RESIDUAL_TOL})"
        )
    return m_vals
