"""Full-analysis reports, seeded Monte Carlo sampling, and weak-probe sweeps.

Everything here is deterministic given its inputs: sampling uses the Philox
counter-based generator, so the i-th draw is a pure function of (seed, i)
and results are byte-identical across runs and independent of evaluation
order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalNumericError, InvalidStrength, NotExpressible
from .inequalities import InequalityRecord, evaluate_all
from .metrics import (
    NoiseReport,
    delta_A,
    delta_B,
    epsilon_sq_joint,
    epsilon_sq_system,
    eta_sq_joint,
    eta_sq_lindblad,
    eta_sq_system,
    is_qnd,
    is_unbiased,
)
from .operators import HermitianOperator, expectation, max_norm, spectral_decompose
from .quasiprob import (
    QuasiDistribution,
    quasi_mean_squared_difference,
    tmh_disturbance_distribution,
    tmh_error_distribution,
    weak_probe_disturbance_distribution,
    weak_probe_error_distribution,
)
from .retrodiction import (
    interdictive_disturbance,
    interdictive_joint_distribution,
    retrodictive_error,
    retrodictive_state,
)
from .scenario import Scenario

SCHEMA_VERSION = "1"
CROSS_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class OutcomeReport:
    label: str
    probability: float
    pom_trace: float
    retrodictive_eps_A: float
    retrodictive_eps_B: float | None
    interdictive_eta_B: float | None


@dataclass(frozen=True)
class AnalysisReport:
    scenario_digest: str
    delta_A: float
    epsilon: NoiseReport
    epsilon_joint: float | None
    unbiased: bool
    dispersion_m2: dict[str, float] | None
    delta_B: float | None
    eta: NoiseReport | None
    eta_joint: float | None
    eta_lindblad: float | None
    qnd: bool | None
    error_distribution: QuasiDistribution
    disturbance_distribution: QuasiDistribution | None
    outcome_reports: tuple[OutcomeReport, ...]
    inequalities: dict[str, InequalityRecord]
    meta: dict = field(default_factory=dict)


def analyze(scenario: Scenario) -> AnalysisReport:
    """Compute every metric, distribution, and inequality for a scenario.

    The quasiprobability forms of epsilon^2 and eta^2 are recomputed from
    the TMH tables and compared with the direct forms; disagreement beyond
    1e-9 raises an internal-consistency error.
    """
    s = scenario
    inst, rho, obs_a = s.apparatus, s.state, s.observable_A

    eps = epsilon_sq_system(inst, s.values_m, obs_a, rho)
    err_dist = tmh_error_distribution(rho, obs_a, inst, s.values_m)
    eps_quasi = quasi_mean_squared_difference(err_dist)
    if abs(eps_quasi - eps.mean_squared) > CROSS_CHECK_TOL:
        raise InternalNumericError(
            f"epsilon^2 mismatch: direct {eps.mean_squared!r} vs quasi {eps_quasi!r}"
        )
    eps_joint = None
    if s.indirect is not None:
        eps_joint = epsilon_sq_joint(s.indirect, s.values_m, obs_a, rho)
        if abs(eps_joint - eps.mean_squared) > CROSS_CHECK_TOL:
            raise InternalNumericError(
                f"epsilon^2 mismatch: system {eps.mean_squared!r} vs joint {eps_joint!r}"
            )

    unbiased = is_unbiased(inst, s.values_m, obs_a)
    dispersion_m2 = None
    try:
        am = np.asarray(obs_a)
        dispersion_m2 = inst.contextual_values(HermitianOperator(am @ am))
    except NotExpressible:
        pass

    d_b = eta = eta_joint = eta_lind = qnd = None
    dist_dist = None
    obs_b = s.observable_B
    if obs_b is not None:
        d_b = delta_B(inst, obs_b, rho)
        eta = eta_sq_system(inst, obs_b, rho)
        dist_dist = tmh_disturbance_distribution(rho, obs_b, inst)
        eta_quasi = quasi_mean_squared_difference(dist_dist)
        if abs(eta_quasi - eta.mean_squared) > CROSS_CHECK_TOL:
            raise InternalNumericError(
                f"eta^2 mismatch: direct {eta.mean_squared!r} vs quasi {eta_quasi!r}"
            )
        eta_lind = eta_sq_lindblad(inst, obs_b, rho)
        qnd = is_qnd(inst, obs_b)
        if s.indirect is not None:
            eta_joint = eta_sq_joint(s.indirect, obs_b, rho)
            if abs(eta_joint - eta.mean_squared) > CROSS_CHECK_TOL:
                raise InternalNumericError(
                    f"eta^2 mismatch: system {eta.mean_squared!r} vs joint {eta_joint!r}"
                )

    outcome_reports = []
    for label in inst.labels:
        p_k = inst.pom_element(label)
        pom_trace = float(np.real(np.trace(p_k.matrix)))
        prob = expectation(p_k, rho)
        if pom_trace > 1e-12:
            eps_a_k = retrodictive_error(inst, label, obs_a)
            eps_b_k = retrodictive_error(inst, label, obs_b) if obs_b is not None else None
            eta_b_k = interdictive_disturbance(inst, label, obs_b) if obs_b is not None else None
        else:
            eps_a_k, eps_b_k, eta_b_k = float("nan"), None, None
        outcome_reports.append(
            OutcomeReport(label, prob, pom_trace, eps_a_k, eps_b_k, eta_b_k)
        )

    return AnalysisReport(
        scenario_digest=s.digest(),
        delta_A=delta_A(inst, s.values_m, obs_a, rho),
        epsilon=eps,
        epsilon_joint=eps_joint,
        unbiased=unbiased,
        dispersion_m2=dispersion_m2,
        delta_B=d_b,
        eta=eta,
        eta_joint=eta_joint,
        eta_lindblad=eta_lind,
        qnd=qnd,
        error_distribution=err_dist,
        disturbance_distribution=dist_dist,
        outcome_reports=tuple(outcome_reports),
        inequalities=evaluate_all(s),
        meta=dict(s.meta),
    )


def report_to_dict(report: AnalysisReport) -> dict:
    """JSON-serializable form of an analysis report (schema version 1)."""

    def noise(n: NoiseReport | None):
        if n is None:
            return None
        return {
            "delta": n.delta,
            "mean_squared": n.mean_squared,
            "picture": n.picture,
            "components": list(n.components),
        }

    def dist(d: QuasiDistribution | None):
        if d is None:
            return None
        return {
            "row_labels": list(d.row_labels),
            "col_labels": list(d.col_labels),
            "row_values": d.row_values.tolist(),
            "col_values": d.col_values.tolist(),
            "table": d.table.tolist(),
        }

    return {
        "schema_version": SCHEMA_VERSION,
        "scenario_digest": report.scenario_digest,
        "delta_A": report.delta_A,
        "epsilon": noise(report.epsilon),
        "epsilon_joint": report.epsilon_joint,
        "unbiased": report.unbiased,
        "dispersion_m2": report.dispersion_m2,
        "delta_B": report.delta_B,
        "eta": noise(report.eta),
        "eta_joint": report.eta_joint,
        "eta_lindblad": report.eta_lindblad,
        "qnd": report.qnd,
        "error_distribution": dist(report.error_distribution),
        "disturbance_distribution": dist(report.disturbance_distribution),
        "outcomes": [
            {
                "label": o.label,
                "probability": o.probability,
                "pom_trace": o.pom_trace,
                "retrodictive_eps_A": o.retrodictive_eps_A,
                "retrodictive_eps_B": o.retrodictive_eps_B,
                "interdictive_eta_B": o.interdictive_eta_B,
            }
            for o in report.outcome_reports
        ],
        "inequalities": {
            rid: {
                "lhs": rec.lhs,
                "rhs": rec.rhs,
                "margin": rec.margin,
                "satisfied": rec.satisfied,
                "sub_records": [
                    {"outcome": sr.outcome, "lhs": sr.lhs, "rhs": sr.rhs, "margin": sr.margin}
                    for sr in rec.sub_records
                ],
            }
            for rid, rec in sorted(report.inequalities.items())
        },
        "meta": report.meta,
    }


def write_distribution_csv(dist: QuasiDistribution, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_label", "col_label", "row_value", "col_value", "weight"])
        for i, rl in enumerate(dist.row_labels):
            for j, cl in enumerate(dist.col_labels):
                writer.writerow(
                    [rl, cl, repr(dist.row_values[i]), repr(dist.col_values[j]), repr(dist.table[i, j])]
                )


# ---------------------------------------------------------------------------
# Monte Carlo sampling


@dataclass(frozen=True)
class SampleRun:
    seed: int
    shots: int
    counts: dict[str, int]
    pair_counts: dict[tuple[str, str], int] | None
    empirical_mean: float
    empirical_mean_se: float
    empirical_moments: dict[int, float] | None
    empirical_eps_sq: float | None
    empirical_eps_sq_se: float | None


def sample(scenario: Scenario, shots: int, seed: int) -> SampleRun:
    """Draw i.i.d. outcomes from the scenario's outcome distribution.

    Uses the Philox counter-based generator keyed on ``seed``: the stream of
    uniforms is a pure function of (seed, draw index), so runs with the same
    seed are bitwise identical.  When observable_B is present the draws are
    (outcome, posterior-branch) pairs from p(k, b') = Tr[Π_b' A_k(rho)].
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    s = scenario
    inst, rho = s.apparatus, s.state
    labels = inst.labels

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    uniforms = rng.random(shots)

    pair_counts = None
    if s.observable_B is not None:
        spec_b = spectral_decompose(s.observable_B)
        pairs = []
        probs = []
        for label in labels:
            after = inst.apply_selective(label, rho).matrix
            for j, proj in enumerate(spec_b.projectors):
                pairs.append((label, f"b'{j}"))
                probs.append(max(float(np.real(np.trace(np.asarray(proj) @ after))), 0.0))
        probs = np.array(probs)
        probs /= probs.sum()
        draw = np.searchsorted(np.cumsum(probs), uniforms, side="right")
        draw = np.minimum(draw, len(pairs) - 1)
        pair_counts = {}
        outcome_counts = dict.fromkeys(labels, 0)
        binned = np.bincount(draw, minlength=len(pairs))
        for (label, post), n in zip(pairs, binned):
            pair_counts[(label, post)] = int(n)
            outcome_counts[label] += int(n)
    else:
        probs = np.array([expectation(p, rho) for p in inst.pom()])
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        draw = np.searchsorted(np.cumsum(probs), uniforms, side="right")
        draw = np.minimum(draw, len(labels) - 1)
        binned = np.bincount(draw, minlength=len(labels))
        outcome_counts = {label: int(n) for label, n in zip(labels, binned)}

    p_hat = np.array([outcome_counts[label] / shots for label in labels])
    m = np.array([float(s.values_m[label]) for label in labels])
    mean = float(m @ p_hat)
    mean_se = _stream_se(m, p_hat, shots)

    moments = None
    eps_sq = eps_sq_se = None
    try:
        am = np.asarray(s.observable_A)
        moments = {}
        power = np.eye(s.dimension, dtype=complex)
        for n in range(1, 5):
            power = power @ am
            m_n = inst.contextual_values(HermitianOperator((power + power.conj().T) / 2))
            moments[n] = float(np.array([m_n[l] for l in labels]) @ p_hat)
        m2 = inst.contextual_values(HermitianOperator(am @ am))
        v = m**2 - np.array([m2[l] for l in labels])
        eps_sq = float(v @ p_hat)
        eps_sq_se = _stream_se(v, p_hat, shots)
    except NotExpressible:
        moments = None

    return SampleRun(
        seed=int(seed),
        shots=shots,
        counts=outcome_counts,
        pair_counts=pair_counts,
        empirical_mean=mean,
        empirical_mean_se=mean_se,
        empirical_moments=moments,
        empirical_eps_sq=eps_sq,
        empirical_eps_sq_se=eps_sq_se,
    )


def _stream_se(values: np.ndarray, p_hat: np.ndarray, shots: int) -> float:
    var = float(values**2 @ p_hat - (values @ p_hat) ** 2)
    return math.sqrt(max(var, 0.0) / shots)


# ---------------------------------------------------------------------------
# Weak-probe convergence sweeps


@dataclass(frozen=True)
class SweepRow:
    g: float
    error_dist_maxnorm: float
    disturbance_dist_maxnorm: float | None


@dataclass(frozen=True)
class WeakSweep:
    rows: tuple[SweepRow, ...]
    error_slope: float | None
    disturbance_slope: float | None


def weak_sweep(scenario: Scenario, g_list) -> WeakSweep:
    """Max-norm distance between weak-probe and TMH distributions per strength.

    Fits a log-log slope over the provided strengths (skipped when every
    error is at round-off, e.g. commuting scenarios).
    """
    s = scenario
    g_values = [float(g) for g in g_list]
    for g in g_values:
        if not 0.0 < g <= 1.0:
            raise InvalidStrength(f"probe strength {g!r} outside (0, 1]")
    err_ref = tmh_error_distribution(s.state, s.observable_A, s.apparatus, s.values_m)
    dist_ref = (
        tmh_disturbance_distribution(s.state, s.observable_B, s.apparatus)
        if s.observable_B is not None
        else None
    )
    rows = []
    for g in g_values:
        approx = weak_probe_error_distribution(s.state, s.observable_A, s.apparatus, s.values_m, g)
        err = max_norm(approx.table - err_ref.table)
        dist_err = None
        if dist_ref is not None:
            approx_d = weak_probe_disturbance_distribution(s.state, s.observable_B, s.apparatus, g)
            dist_err = max_norm(approx_d.table - dist_ref.table)
        rows.append(SweepRow(g, err, dist_err))
    return WeakSweep(
        rows=tuple(rows),
        error_slope=_loglog_slope([r.g for r in rows], [r.error_dist_maxnorm for r in rows]),
        disturbance_slope=_loglog_slope(
            [r.g for r in rows],
            [r.disturbance_dist_maxnorm for r in rows if r.disturbance_dist_maxnorm is not None],
        ),
    )


def _loglog_slope(g_values, errors) -> float | None:
    if len(errors) != len(g_values) or len(errors) < 2:
        return None
    if any(e <= 1e-14 for e in errors):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(g_values)), np.log(np.asarray(errors)), 1)
    return float(slope)


def write_sweep_csv(sweep: WeakSweep, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["g", "error_dist_maxnorm", "disturbance_dist_maxnorm"])
        for row in sweep.rows:
            writer.writerow(
                [
                    repr(row.g),
                    repr(row.error_dist_maxnorm),
                    "" if row.disturbance_dist_maxnorm is None else repr(row.disturbance_dist_maxnorm),
                ]
            )
        writer.writerow(
            [
                "slope-fit",
                "" if sweep.error_slope is None else repr(sweep.error_slope),
                "" if sweep.disturbance_slope is None else repr(sweep.disturbance_slope),
            ]
        )
