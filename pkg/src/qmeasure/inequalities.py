"""Evaluation of the nine uncertainty relations on a scenario.

Relation identifiers:

- ``heisenberg``     sigma_A sigma_B >= C_AB
- ``schrodinger``    sigma_A^2 sigma_B^2 >= covariance^2 + C_AB^2
- ``ozawa``          eps_A eta_B + eps_A sigma_B + sigma_A eta_B >= C_AB
- ``hall``           eps_A eps_B + eps_A sigma_B + sigma_A eps_B >= C_AB
- ``weston``         eps_A (sigma_B + sigma_B,est)/2 + eps_B (...) >= C_AB
- ``branciard_ee``   eps_A^2 sigma_B^2 + sigma_A^2 eps_B^2
                     + 2 eps_A eps_B sqrt(sigma_A^2 sigma_B^2 - C^2) >= C^2
- ``branciard_ed``   the same with eta_B substituted for eps_B
- ``hofmann1/2/3``   single-outcome relations, iterated over outcomes

The first six are preparation-dependent; the Hofmann family is intrinsic to
the instrument and carries per-outcome sub-records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import MissingIngredient, NegativeRadicand
from .metrics import epsilon_sq_system, eta_sq_system
from .operators import (
    commutator_bound,
    expectation,
    expectation_and_variance,
    jordan_product,
    spectral_decompose,
)
from .retrodiction import (
    interdictive_disturbance,
    restricted_metrics,
    retrodictive_error,
    retrodictive_state,
)
from .scenario import Scenario, generate_random, subseed

SATISFACTION_TOL = 1e-9
RADICAND_FLOOR = -1e-12
OUTCOME_TRACE_CUTOFF = 1e-12
POSTERIOR_CUTOFF = 1e-12

RELATION_IDS = (
    "heisenberg",
    "schrodinger",
    "ozawa",
    "hall",
    "weston",
    "branciard_ee",
    "branciard_ed",
    "hofmann1",
    "hofmann2",
    "hofmann3",
)


@dataclass(frozen=True)
class SubRecord:
    """One outcome (or outcome-posterior pair) of a per-outcome relation."""

    outcome: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class InequalityRecord:
    relation_id: str
    lhs: float
    rhs: float
    inputs_digest: str
    sub_records: tuple[SubRecord, ...] = ()

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def satisfied(self) -> bool:
        return bool(self.margin >= -SATISFACTION_TOL)


class ScenarioContext:
    """Caches the per-scenario quantities shared by several relations."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario

    @cached_property
    def sigma_A(self) -> float:
        _, var = expectation_and_variance(self.scenario.observable_A, self.scenario.state)
        return math.sqrt(var)

    @cached_property
    def sigma_B(self) -> float:
        _, var = expectation_and_variance(self._obs_b, self.scenario.state)
        return math.sqrt(var)

    @property
    def _obs_b(self):
        if self.scenario.observable_B is None:
            raise MissingIngredient("relation requires observable_B")
        return self.scenario.observable_B

    @cached_property
    def c_ab(self) -> float:
        return commutator_bound(self.scenario.observable_A, self._obs_b, self.scenario.state)

    @cached_property
    def covariance(self) -> float:
        s = self.scenario
        mean_a = expectation(s.observable_A, s.state)
        mean_b = expectation(self._obs_b, s.state)
        return expectation(jordan_product(s.observable_A, self._obs_b), s.state) - mean_a * mean_b

    @cached_property
    def eps_A(self) -> float:
        s = self.scenario
        return math.sqrt(epsilon_sq_system(s.apparatus, s.values_m, s.observable_A, s.state).mean_squared)

    @cached_property
    def eps_B(self) -> float:
        s = self.scenario
        if s.values_mB is None:
            raise MissingIngredient("relation requires a second value assignment values_mB")
        return math.sqrt(epsilon_sq_system(s.apparatus, s.values_mB, self._obs_b, s.state).mean_squared)

    @cached_property
    def eta_B(self) -> float:
        s = self.scenario
        return math.sqrt(eta_sq_system(s.apparatus, self._obs_b, s.state).mean_squared)

    @cached_property
    def outcome_probs(self) -> np.ndarray:
        s = self.scenario
        return np.array([expectation(p, s.state) for p in s.apparatus.pom()])

    def sigma_est(self, values: dict[str, float]) -> float:
        """Spread of the assigned values in the recorded data stream."""
        m = np.array([values[label] for label in self.scenario.apparatus.labels])
        p = self.outcome_probs
        var = float(m**2 @ p - (m @ p) ** 2)
        return math.sqrt(max(var, 0.0))

    @cached_property
    def live_outcomes(self) -> list[str]:
        s = self.scenario
        return [
            label
            for label in s.apparatus.labels
            if np.real(np.trace(s.apparatus.pom_element(label).matrix)) > OUTCOME_TRACE_CUTOFF
        ]


def _branciard(eps_a: float, eps_b: float, ctx: ScenarioContext) -> tuple[float, float]:
    radicand = ctx.sigma_A**2 * ctx.sigma_B**2 - ctx.c_ab**2
    if radicand < RADICAND_FLOOR:
        raise NegativeRadicand(f"sigma_A^2 sigma_B^2 - C^2 = {radicand:.3e}")
    root = math.sqrt(max(radicand, 0.0))
    lhs = eps_a**2 * ctx.sigma_B**2 + ctx.sigma_A**2 * eps_b**2 + 2 * eps_a * eps_b * root
    return lhs, ctx.c_ab**2


def evaluate(relation_id: str, scenario: Scenario, ctx: ScenarioContext | None = None) -> InequalityRecord:
    """Evaluate one relation on a scenario, returning lhs/rhs and margin."""
    if ctx is None:
        ctx = ScenarioContext(scenario)
    digest = scenario.digest()
    s = scenario

    if relation_id == "heisenberg":
        return InequalityRecord("heisenberg", ctx.sigma_A * ctx.sigma_B, ctx.c_ab, digest)
    if relation_id == "schrodinger":
        lhs = ctx.sigma_A**2 * ctx.sigma_B**2
        rhs = ctx.covariance**2 + ctx.c_ab**2
        return InequalityRecord("schrodinger", lhs, rhs, digest)
    if relation_id == "ozawa":
        lhs = ctx.eps_A * ctx.eta_B + ctx.eps_A * ctx.sigma_B + ctx.sigma_A * ctx.eta_B
        return InequalityRecord("ozawa", lhs, ctx.c_ab, digest)
    if relation_id == "hall":
        lhs = ctx.eps_A * ctx.eps_B + ctx.eps_A * ctx.sigma_B + ctx.sigma_A * ctx.eps_B
        return InequalityRecord("hall", lhs, ctx.c_ab, digest)
    if relation_id == "weston":
        if s.values_mB is None:
            raise MissingIngredient("weston requires values_mB")
        est_a = ctx.sigma_est(dict(s.values_m))
        est_b = ctx.sigma_est(dict(s.values_mB))
        lhs = (
            ctx.eps_A * (ctx.sigma_B + est_b) / 2
            + ctx.eps_B * (ctx.sigma_A + est_a) / 2
        )
        return InequalityRecord("weston", lhs, ctx.c_ab, digest)
    if relation_id == "branciard_ee":
        lhs, rhs = _branciard(ctx.eps_A, ctx.eps_B, ctx)
        return InequalityRecord("branciard_ee", lhs, rhs, digest)
    if relation_id == "branciard_ed":
        lhs, rhs = _branciard(ctx.eps_A, ctx.eta_B, ctx)
        return InequalityRecord("branciard_ed", lhs, rhs, digest)
    if relation_id in ("hofmann1", "hofmann2", "hofmann3"):
        return _evaluate_hofmann(relation_id, s, ctx, digest)
    raise ValueError(f"unknown relation {relation_id!r}")


def _evaluate_hofmann(
    relation_id: str, s: Scenario, ctx: ScenarioContext, digest: str
) -> InequalityRecord:
    obs_a, obs_b = s.observable_A, ctx._obs_b
    subs: list[SubRecord] = []
    if relation_id == "hofmann2":
        spec_b = spectral_decompose(obs_b)
        for label in ctx.live_outcomes:
            for idx in range(len(spec_b.branches)):
                try:
                    rm = restricted_metrics(s.apparatus, label, idx, obs_a, obs_b)
                except Exception:
                    continue
                if rm.p_posterior <= POSTERIOR_CUTOFF:
                    continue
                subs.append(
                    SubRecord(f"{label}|b'{idx}", rm.eps_A * rm.eta_B, rm.eps_A * rm.eps_B)
                )
    else:
        for label in ctx.live_outcomes:
            eps_a_k = retrodictive_error(s.apparatus, label, obs_a)
            retro = retrodictive_state(s.apparatus, label)
            c_k = commutator_bound(obs_a, obs_b, retro.state)
            if relation_id == "hofmann1":
                eps_b_k = retrodictive_error(s.apparatus, label, obs_b)
                subs.append(SubRecord(label, eps_a_k * eps_b_k, c_k))
            else:  # hofmann3
                eta_b_k = interdictive_disturbance(s.apparatus, label, obs_b)
                subs.append(SubRecord(label, eps_a_k * eta_b_k, c_k))
    if not subs:
        raise MissingIngredient(f"{relation_id}: no live outcomes to evaluate")
    worst = min(subs, key=lambda r: r.margin)
    return InequalityRecord(relation_id, worst.lhs, worst.rhs, digest, tuple(subs))


def evaluate_all(scenario: Scenario, relations=RELATION_IDS) -> dict[str, InequalityRecord]:
    """Evaluate every applicable relation; relations lacking ingredients are skipped."""
    ctx = ScenarioContext(scenario)
    records = {}
    for rid in relations:
        try:
            records[rid] = evaluate(rid, scenario, ctx)
        except MissingIngredient:
            continue
    return records


@dataclass(frozen=True)
class SweepResult:
    records: tuple[InequalityRecord, ...]
    min_margins: dict[str, float] = field(default_factory=dict)


def random_sweep(dims, count: int, seed: int, n_outcomes: int = 4) -> SweepResult:
    """Evaluate all relations on ``count`` random scenarios per dimension.

    Deterministic for a fixed seed; scenario i in dimension d uses the
    derived seed ``subseed(seed, (d, i))``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    records: list[InequalityRecord] = []
    min_margins: dict[str, float] = {}
    for dim in dims:
        for i in range(count):
            scenario = generate_random(dim, n_outcomes, subseed(seed, (dim, i)))
            for rid, rec in evaluate_all(scenario).items():
                records.append(rec)
                cur = min_margins.get(rid)
                if cur is None or rec.margin < cur:
                    min_margins[rid] = rec.margin
    return SweepResult(tuple(records), min_margins)


@dataclass(frozen=True)
class ViolationSearchResult:
    """Best (most negative) naive-product margin eps_A * eta_B - C_AB found."""

    product: float
    bound: float
    margin: float
    scenario: Scenario
    ozawa_margin: float


def heisenberg_form_violation_search(dims, count: int, seed: int) -> ViolationSearchResult:
    """Search for scenarios where the naive product eps_A eta_B falls below C_AB.

    Always includes the analytic qubit construction (projective measurement
    of one Pauli axis, disturbance probed along another), which violates the
    naive form by construction while the Ozawa relation still holds.
    """
    candidates: list[Scenario] = []
    if 2 in list(dims):
        candidates.append(_projective_violation_scenario())
    for dim in dims:
        for i in range(count):
            candidates.append(generate_random(dim, 4, subseed(seed, (dim, i))))

    best: ViolationSearchResult | None = None
    for scenario in candidates:
        if scenario.observable_B is None:
            continue
        ctx = ScenarioContext(scenario)
        product = ctx.eps_A * ctx.eta_B
        margin = product - ctx.c_ab
        if best is None or margin < best.margin:
            ozawa = evaluate("ozawa", scenario, ctx)
            best = ViolationSearchResult(product, ctx.c_ab, margin, scenario, ozawa.margin)
    if best is None:
        raise MissingIngredient("no candidate scenario had observable_B")
    return best


def _projective_violation_scenario() -> Scenario:
    from .operators import SIGMA_X, SIGMA_Y, SIGMA_Z, DensityOperator, HermitianOperator
    from .scenario import projective_instrument

    obs_a = HermitianOperator(SIGMA_Z)
    inst = projective_instrument(obs_a)
    state = DensityOperator(HermitianOperator((np.eye(2) + 0.8 * SIGMA_Y) / 2))
    return Scenario(
        dimension=2,
        state=state,
        observable_A=obs_a,
        observable_B=HermitianOperator(SIGMA_X),
        apparatus=inst,
        values_m={"0": 1.0, "1": -1.0},
        meta={"name": "projective-z-vs-x"},
    )
