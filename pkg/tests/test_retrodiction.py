import numpy as np
import pytest

from qmeasure.errors import NullOutcome, ZeroPosterior
from qmeasure.instruments import Instrument, KrausSet
from qmeasure.operators import (
    SIGMA_X,
    SIGMA_Z,
    HermitianOperator,
    commutator_bound,
    max_norm,
)
from qmeasure.retrodiction import (
    interdictive_disturbance,
    interdictive_joint_distribution,
    interdictive_state,
    restricted_metrics,
    retrodictive_error,
    retrodictive_state,
)
from qmeasure.scenario import (
    _rng,
    projective_instrument,
    random_hermitian,
    random_instrument,
    theta_pom_instrument,
)

SZ = HermitianOperator(SIGMA_Z)
SX = HermitianOperator(SIGMA_X)


def identity_instrument(dim: int) -> Instrument:
    return Instrument.from_kraus([KrausSet("0", (np.eye(dim, dtype=complex),))])


def near_null_instrument() -> Instrument:
    # One outcome with POM trace ~1e-26, absorbed by the complement.
    tiny = 1e-13 * np.eye(2, dtype=complex)
    rest = np.sqrt(np.eye(2) - tiny.conj().T @ tiny).astype(complex)
    return Instrument.from_kraus([KrausSet("tiny", (tiny,)), KrausSet("rest", (rest,))])


class TestRetrodictiveState:
    def test_theta_pom(self):
        theta = np.pi / 3
        retro = retrodictive_state(theta_pom_instrument(theta), "+")
        c = np.cos(theta)
        assert np.allclose(retro.state.matrix, np.diag([(1 + c) / 2, (1 - c) / 2]))
        assert retro.source_trace == pytest.approx(1.0, abs=1e-12)

    def test_identity_instrument_uniform(self):
        retro = retrodictive_state(identity_instrument(3), "0")
        assert np.allclose(retro.state.matrix, np.eye(3) / 3)

    def test_null_outcome_raises(self):
        with pytest.raises(NullOutcome):
            retrodictive_state(near_null_instrument(), "tiny")


class TestRetrodictiveError:
    def test_theta_grid(self):
        for k in range(25):
            theta = k * np.pi / 24
            inst = theta_pom_instrument(theta)
            for label in ("+", "-"):
                err = retrodictive_error(inst, label, SZ)
                assert err == pytest.approx(abs(np.sin(theta)), abs=1e-10)

    def test_projective_sharp(self):
        inst = projective_instrument(SZ)
        for label in inst.labels:
            assert retrodictive_error(inst, label, SZ) == pytest.approx(0.0, abs=1e-10)

    def test_unresolved_observable(self):
        # A theta-POM resolves nothing about sigma_x: the error is maximal.
        inst = theta_pom_instrument(0.4)
        assert retrodictive_error(inst, "+", SX) == pytest.approx(1.0, abs=1e-12)


class TestInterdictive:
    def test_trace_normalized_channel(self):
        rng = _rng(51)
        inst = random_instrument(2, 3, rng)
        for label in inst.labels:
            inter = interdictive_state(inst, label)
            ident = HermitianOperator(np.eye(2))
            out = inter.apply(ident)
            assert np.real(np.trace(out.matrix)) == pytest.approx(1.0, abs=1e-10)

    def test_identity_instrument_diagonal(self):
        d = interdictive_joint_distribution(identity_instrument(2), "0", SX)
        assert max_norm(d.table - np.eye(2) / 2) < 1e-12
        assert interdictive_disturbance(identity_instrument(2), "0", SX) == pytest.approx(
            0.0, abs=1e-10
        )

    def test_projective_z_scrambles_x(self):
        # A_0(Pi_b) = |0><0| (Pi_b)_00 |0><0| gives the uniform 1/4 table.
        inst = projective_instrument(SZ)
        d = interdictive_joint_distribution(inst, "0", SX)
        assert max_norm(d.table - 0.25) < 1e-12
        assert interdictive_disturbance(inst, "0", SX) == pytest.approx(np.sqrt(2), abs=1e-10)

    def test_qnd_no_disturbance(self):
        inst = theta_pom_instrument(0.8)
        for label in inst.labels:
            assert interdictive_disturbance(inst, label, SZ) == pytest.approx(0.0, abs=1e-10)

    def test_table_is_true_probability(self):
        rng = _rng(52)
        for _ in range(20):
            inst = random_instrument(2, 3, rng)
            b = random_hermitian(2, rng)
            for label in inst.labels:
                d = interdictive_joint_distribution(inst, label, b)
                assert d.table.min() >= -1e-12
                assert abs(d.table.sum() - 1.0) < 1e-10


class TestRestrictedMetrics:
    def test_projective_sharp(self):
        inst = projective_instrument(SZ)
        rm = restricted_metrics(inst, "0", 0, SZ, SZ)
        assert rm.eps_A == pytest.approx(0.0, abs=1e-7)
        assert rm.eta_B == pytest.approx(0.0, abs=1e-7)
        assert rm.p_posterior == pytest.approx(1.0, abs=1e-10)

    def test_decomposition_identity(self):
        # eta^2 = eps_B^2 + (B_b' - <B>)^2 holds by construction; check the
        # reported numbers are internally consistent.
        rng = _rng(53)
        inst = random_instrument(2, 3, rng)
        b = random_hermitian(2, rng)
        a = random_hermitian(2, rng)
        for label in inst.labels:
            for idx in range(2):
                rm = restricted_metrics(inst, label, idx, a, b)
                from qmeasure.operators import spectral_decompose

                b_val = spectral_decompose(b).eigenvalues[idx]
                recon = rm.eps_B**2 + (b_val - rm.retro_mean_B) ** 2
                assert rm.eta_B**2 == pytest.approx(recon, abs=1e-10)

    def test_averaging_identity(self):
        # sum_b' p(b'|k) eta^2_{B,k,b'} recovers the unrestricted eta^2_{B,k}.
        rng = _rng(54)
        for _ in range(30):
            inst = random_instrument(2, 2, rng)
            b = random_hermitian(2, rng)
            a = random_hermitian(2, rng)
            for label in inst.labels:
                total = 0.0
                for idx in range(2):
                    rm = restricted_metrics(inst, label, idx, a, b)
                    total += rm.p_posterior * rm.eta_B**2
                eta_k = interdictive_disturbance(inst, label, b)
                assert total == pytest.approx(eta_k**2, abs=1e-10)

    def test_bad_posterior_index(self):
        inst = projective_instrument(SZ)
        with pytest.raises(ZeroPosterior):
            restricted_metrics(inst, "0", 5, SZ, SZ)

    def test_zero_posterior_probability(self):
        # Projective z-measurement outcome 0 never yields posterior branch 1.
        inst = projective_instrument(SZ)
        with pytest.raises(ZeroPosterior):
            restricted_metrics(inst, "0", 1, SZ, SZ)


class TestHofmannStyleBounds:
    def test_retrodictive_product_bound(self):
        # eps_A,k eps_B,k >= C_AB under the retrodictive state, per outcome.
        rng = _rng(55)
        for _ in range(100):
            inst = random_instrument(2, 3, rng)
            a = random_hermitian(2, rng)
            b = random_hermitian(2, rng)
            for label in inst.labels:
                retro = retrodictive_state(inst, label)
                lhs = retrodictive_error(inst, label, a) * retrodictive_error(inst, label, b)
                assert lhs >= commutator_bound(a, b, retro.state) - 1e-9

    def test_disturbance_dominates_error(self):
        # eta_B,k,b' >= eps_B,k,b' cell by cell.
        rng = _rng(56)
        for _ in range(30):
            inst = random_instrument(2, 3, rng)
            a = random_hermitian(2, rng)
            b = random_hermitian(2, rng)
            for label in inst.labels:
                for idx in range(2):
                    try:
                        rm = restricted_metrics(inst, label, idx, a, b)
                    except ZeroPosterior:
                        continue
                    assert rm.eta_B >= rm.eps_B - 1e-12
