"""Scenario bundles: preparation, targets, apparatus, and value assignments.

A scenario is the unit of work for the analysis harness and the inequality
sweeps.  Scenarios round-trip through a JSON format (complex entries as
``[re, im]`` pairs, matrices row-major) and can be generated randomly with
full seed determinism via the Philox counter-based generator.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MissingLabel,
    NotExpressible,
    ParseError,
    QMeasureError,
    ValidationError,
)
from .instruments import IndirectModel, Instrument, KrausSet
from .operators import DensityOperator, HermitianOperator


@dataclass(frozen=True)
class Scenario:
    dimension: int
    state: DensityOperator
    observable_A: HermitianOperator
    apparatus: Instrument
    values_m: dict[str, float]
    observable_B: HermitianOperator | None = None
    indirect: IndirectModel | None = None
    values_m2: dict[str, float] | None = None
    values_mB: dict[str, float] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = set(self.apparatus.labels)
        for name, values in (
            ("values_m", self.values_m),
            ("values_m2", self.values_m2),
            ("values_mB", self.values_mB),
        ):
            if values is None:
                continue
            if set(values) != labels:
                raise MissingLabel(
                    f"{name} labels {sorted(values)} do not match outcomes {sorted(labels)}"
                )

    @property
    def effective_m2(self) -> dict[str, float]:
        """Squared spectrum used by the noise second moment; defaults to m_k^2."""
        if self.values_m2 is not None:
            return dict(self.values_m2)
        return {k: float(v) ** 2 for k, v in self.values_m.items()}

    def to_dict(self) -> dict:
        doc = {
            "dimension": self.dimension,
            "state": _matrix_to_json(self.state.matrix),
            "observable_A": _matrix_to_json(self.observable_A.matrix),
            "values_m": {k: float(v) for k, v in sorted(self.values_m.items())},
            "meta": self.meta,
        }
        if self.observable_B is not None:
            doc["observable_B"] = _matrix_to_json(self.observable_B.matrix)
        if self.indirect is not None:
            model = self.indirect
            doc["apparatus"] = {
                "type": "indirect",
                "unitary": _matrix_to_json(model.unitary),
                "detector_state": _matrix_to_json(model.detector_state.matrix),
                "readout_basis": [_vector_to_json(v) for v in model.readout_basis],
                "labels": list(model.labels),
            }
        else:
            doc["apparatus"] = {
                "type": "kraus",
                "outcomes": [
                    {"label": ks.label, "kraus": [_matrix_to_json(m) for m in ks.operators]}
                    for ks in self.apparatus.outcomes
                ],
            }
        if self.values_m2 is not None:
            doc["values_m2"] = {k: float(v) for k, v in sorted(self.values_m2.items())}
        if self.values_mB is not None:
            doc["values_mB"] = {k: float(v) for k, v in sorted(self.values_mB.items())}
        return doc

    def digest(self) -> str:
        """Stable fingerprint of the scenario content."""
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _vector_to_json(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _matrix_from_json(doc, what: str) -> np.ndarray:
    try:
        arr = np.asarray(doc, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: cannot parse matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"{what}: expected nested rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _vector_from_json(doc, what: str) -> np.ndarray:
    try:
        arr = np.asarray(doc, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: cannot parse vector: {exc}") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParseError(f"{what}: expected a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and fully validate a scenario from its JSON document."""
    if not isinstance(doc, dict):
        raise ParseError("top-level scenario document must be an object")
    try:
        dimension = int(doc["dimension"])
        state_doc = doc["state"]
        a_doc = doc["observable_A"]
        apparatus_doc = doc["apparatus"]
        values_m = {str(k): float(v) for k, v in doc["values_m"].items()}
    except KeyError as exc:
        raise ParseError(f"missing required key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed scenario field: {exc}") from exc

    def _wrap(kind, fn, *args):
        try:
            return fn(*args)
        except ValidationError:
            raise
        except QMeasureError as exc:
            raise ValidationError(kind, str(exc)) from exc

    state_m = _matrix_from_json(state_doc, "state")
    tr = float(np.real(np.trace(state_m)))
    if abs(tr - 1.0) > 1e-9:
        raise ValidationError("TraceNotOne", f"state trace is {tr!r}")
    state = _wrap("InvalidState", lambda: DensityOperator(HermitianOperator(state_m)))
    obs_a = _wrap("InvalidObservable", lambda: HermitianOperator(_matrix_from_json(a_doc, "observable_A")))
    obs_b = None
    if "observable_B" in doc:
        obs_b = _wrap(
            "InvalidObservable",
            lambda: HermitianOperator(_matrix_from_json(doc["observable_B"], "observable_B")),
        )

    indirect = None
    app_type = apparatus_doc.get("type")
    if app_type == "kraus":
        sets = []
        for outcome in apparatus_doc.get("outcomes", []):
            label = str(outcome["label"])
            kraus = tuple(
                _matrix_from_json(m, f"kraus[{label}]") for m in outcome["kraus"]
            )
            sets.append(_wrap("InvalidKraus", lambda l=label, k=kraus: KrausSet(l, k)))
        apparatus = _wrap("CompletenessViolation", lambda: Instrument.from_kraus(sets))
    elif app_type == "indirect":
        detector = _wrap(
            "InvalidState",
            lambda: DensityOperator(
                HermitianOperator(_matrix_from_json(apparatus_doc["detector_state"], "detector_state"))
            ),
        )
        indirect = _wrap(
            "InvalidIndirectModel",
            lambda: IndirectModel(
                system_dim=dimension,
                detector_state=detector,
                unitary=_matrix_from_json(apparatus_doc["unitary"], "unitary"),
                readout_basis=tuple(
                    _vector_from_json(v, "readout_basis") for v in apparatus_doc["readout_basis"]
                ),
                labels=tuple(str(l) for l in apparatus_doc["labels"]),
            ),
        )
        apparatus = _wrap("CompletenessViolation", lambda: Instrument.from_indirect(indirect))
    else:
        raise ParseError(f"apparatus type must be 'kraus' or 'indirect', got {app_type!r}")

    if state.dim != dimension or obs_a.dim != dimension or apparatus.dim != dimension:
        raise ValidationError(
            "DimensionMismatch",
            f"declared dimension {dimension} inconsistent with components",
        )
    if obs_b is not None and obs_b.dim != dimension:
        raise ValidationError("DimensionMismatch", "observable_B dimension mismatch")

    values_m2 = None
    if "values_m2" in doc:
        values_m2 = {str(k): float(v) for k, v in doc["values_m2"].items()}
    values_mB = None
    if "values_mB" in doc:
        values_mB = {str(k): float(v) for k, v in doc["values_mB"].items()}
    try:
        return Scenario(
            dimension=dimension,
            state=state,
            observable_A=obs_a,
            observable_B=obs_b,
            apparatus=apparatus,
            indirect=indirect,
            values_m=values_m,
            values_m2=values_m2,
            values_mB=values_mB,
            meta=dict(doc.get("meta", {})),
        )
    except MissingLabel as exc:
        raise ValidationError("MissingLabel", str(exc)) from exc


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(doc)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Builders and random generation


def theta_pom_instrument(theta: float) -> Instrument:
    """Two-outcome qubit instrument with Kraus sqrt(P_±), P_± = (1 ± cosθ σz)/2."""
    c = np.cos(theta)
    p_plus = np.diag([(1 + c) / 2, (1 - c) / 2]).astype(complex)
    p_minus = np.diag([(1 - c) / 2, (1 + c) / 2]).astype(complex)
    return Instrument.from_kraus(
        [
            KrausSet("+", (np.sqrt(p_plus),)),
            KrausSet("-", (np.sqrt(p_minus),)),
        ]
    )


def projective_instrument(observable: HermitianOperator) -> Instrument:
    """Projective instrument onto the eigen-branches of an observable."""
    from .operators import spectral_decompose

    spec = spectral_decompose(observable)
    sets = [
        KrausSet(str(i), (np.asarray(proj),)) for i, proj in enumerate(spec.projectors)
    ]
    return Instrument.from_kraus(sets)


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def random_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    """Normalized complex Wishart state G G† / Tr."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w = g @ g.conj().T
    return DensityOperator(HermitianOperator(w / np.real(np.trace(w))))

def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    """Gaussian Hermitian ensemble draw."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator((g + g.conj().T) / 2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_instrument(dim: int, n_outcomes: int, rng: np.random.Generator) -> Instrument:
    """Instrument from a Haar-random isometry on a dim * n_outcomes dilation,
    partitioned into single-Kraus outcomes."""
    u = random_unitary(dim * n_outcomes, rng)
    isometry = u[:, :dim]
    sets = [
        KrausSet(str(k), (isometry[k * dim : (k + 1) * dim, :],))
        for k in range(n_outcomes)
    ]
    return Instrument.from_kraus(sets)


def generate_random(dim: int, n_outcomes: int, seed) -> Scenario:
    """Deterministic random scenario for the given seed.

    Value assignments come from the contextual-value solver when the target
    lies in the POM span; otherwise raw outcome indices are used.
    """
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    if n_outcomes < 1:
        raise ValueError(f"need at least one outcome, got {n_outcomes}")
    rng = _rng(seed)
    state = random_density(dim, rng)
    obs_a = random_hermitian(dim, rng)
    obs_b = random_hermitian(dim, rng)
    inst = random_instrument(dim, n_outcomes, rng)

    def assignment(target):
        try:
            return inst.contextual_values(target)
        except NotExpressible:
            return {label: float(i) for i, label in enumerate(inst.labels)}

    return Scenario(
        dimension=dim,
        state=state,
        observable_A=obs_a,
        observable_B=obs_b,
        apparatus=inst,
        values_m=assignment(obs_a),
        values_mB=assignment(obs_b),
        meta={"seed": str(seed), "generator": "philox-wishart-haar"},
    )


def random_indirect_model(dim: int, rng: np.random.Generator) -> IndirectModel:
    """Random system-detector model with a pure random detector state and
    Haar coupling; readout in the computational detector basis."""
    detector = random_density(dim, rng)
    u = random_unitary(dim * dim, rng)
    basis = tuple(np.eye(dim, dtype=complex)[:, k] for k in range(dim))
    labels = tuple(str(k) for k in range(dim))
    return IndirectModel(
        system_dim=dim,
        detector_state=detector,
        unitary=u,
        readout_basis=basis,
        labels=labels,
    )


def subseed(seed: int, index) -> int:
    """Derived per-item seed; order-independent across parallel evaluation."""
    entropy = (int(seed),) + tuple(int(i) for i in np.atleast_1d(index))
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])
