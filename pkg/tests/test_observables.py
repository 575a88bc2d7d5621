"""Order parameter, interpolant distance, diameters, and sync detection."""

import math

import numpy as np
import pytest

from graphon_sync import (
    IntegratorConfig,
    PhaseField,
    constant_graphon,
    discretize_initial,
    erdos_renyi,
    integrate,
    kuramoto,
    linf_distance,
    order_parameter,
    phase_diameter,
    prepare_cds_rhs,
    prepare_sds_rhs,
    sync_verdict,
)


class TestOrderParameter:
    def test_aligned_field(self):
        op = order_parameter(PhaseField(np.full(11, 2.0)))
        assert op.r == pytest.approx(1.0, abs=1e-12)
        assert op.psi == pytest.approx(2.0, abs=1e-12)

    def test_aligned_field_psi_wraps(self):
        op = order_parameter(PhaseField(np.full(5, 5.0)))  # 5 rad wraps negative
        assert op.psi == pytest.approx(5.0 - 2 * math.pi, abs=1e-12)

    def test_balanced_triple_is_undefined(self):
        op = order_parameter(PhaseField([0.0, 2 * math.pi / 3, 4 * math.pi / 3]))
        assert op.r <= 1e-12
        assert op.psi is None

    def test_uniform_arc_closed_form(self):
        # theta_j = j/m over [0,1): |mean e^{i theta}| -> |e^i - 1| = 2 sin(1/2).
        field = discretize_initial(lambda x: x, 4096)
        op = order_parameter(field)
        assert op.r == pytest.approx(2 * math.sin(0.5), abs=1e-4)

    def test_magnitude_bounded(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            op = order_parameter(PhaseField(rng.uniform(-10, 10, size=17)))
            assert 0.0 <= op.r <= 1.0 + 1e-12

    def test_shift_invariance_of_r(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            values = rng.uniform(-3, 3, size=23)
            shift = rng.uniform(-8, 8)
            a = order_parameter(PhaseField(values))
            b = order_parameter(PhaseField(values + shift))
            assert b.r == pytest.approx(a.r, abs=1e-12)
            if a.r > 1e-6:
                delta = (b.psi - a.psi - shift) / (2 * math.pi)
                assert abs(delta - round(delta)) <= 1e-9

    def test_mean_cosine_identity(self):
        # r equals the mean of cos(psi - theta) whenever psi is defined.
        rng = np.random.default_rng(2)
        for _ in range(25):
            field = PhaseField(rng.uniform(-2, 2, size=31))
            op = order_parameter(field)
            if op.r > 1e-6:
                assert op.r == pytest.approx(
                    float(np.mean(np.cos(op.psi - field.values))), abs=1e-10
                )


class TestLinfDistance:
    def test_identical_fields(self):
        f = PhaseField([1.0, 2.0, 3.0])
        assert linf_distance(f, f) == 0.0

    def test_same_mesh(self):
        assert linf_distance(PhaseField([0.0, 0.0]), PhaseField([1.0, 3.0])) == 3.0

    def test_mixed_mesh_refinement(self):
        # Cells of the refinement compare (1 vs 0) and (1 vs 3).
        assert linf_distance(PhaseField([1.0]), PhaseField([0.0, 3.0])) == 2.0

    def test_refinement_matches_dense_sampling(self):
        rng = np.random.default_rng(3)
        a = PhaseField(rng.uniform(-1, 1, size=6))
        b = PhaseField(rng.uniform(-1, 1, size=10))
        from graphon_sync import interpolate

        x = (np.arange(60_000) + 0.5) / 60_000
        dense = np.max(np.abs(interpolate(a, x) - interpolate(b, x)))
        assert linf_distance(a, b) == pytest.approx(dense, abs=1e-12)

    def test_refinement_overflow_rejected(self):
        a = PhaseField(np.zeros(1 << 13))
        b = PhaseField(np.zeros((1 << 13) - 1))  # lcm ~ 2^26
        with pytest.raises(ValueError, match="refinement"):
            linf_distance(a, b)


class TestPhaseDiameter:
    def test_constant(self):
        assert phase_diameter(PhaseField(np.full(7, 1.1))) == 0.0

    def test_simple(self):
        assert phase_diameter(PhaseField([0.0, 1.0, -0.5])) == 1.5

    def test_lifts_not_wrapped(self):
        assert phase_diameter(PhaseField([0.0, 2 * math.pi])) == pytest.approx(
            2 * math.pi
        )


class TestSyncVerdict:
    def test_two_oscillator_synchronizes(self):
        net = erdos_renyi(2, 1.0, 0)
        traj = integrate(
            prepare_sds_rhs(net, kuramoto()),
            PhaseField([0.0, 1.0]),
            IntegratorConfig(step=0.01, horizon=50.0, store_stride=5000),
        )
        verdict = sync_verdict(traj, phase_tol=1e-3, freq_tol=1e-6)
        assert verdict.phase_sync and verdict.freq_sync
        assert verdict.final_r == pytest.approx(1.0, abs=1e-6)

    def test_zero_rhs_is_frequency_synchronized(self):
        traj = integrate(
            lambda y, t: np.zeros_like(y),
            PhaseField([0.0, 1.0, 2.0]),
            IntegratorConfig(step=0.1, horizon=1.0),
        )
        verdict = sync_verdict(traj)
        assert verdict.freq_sync
        assert not verdict.phase_sync

    def test_antipodal_equilibrium(self):
        # (0, pi) on the two-oscillator complete graph is a frozen state:
        # frequency-synchronized but never phase-synchronized.
        net = erdos_renyi(2, 1.0, 0)
        traj = integrate(
            prepare_sds_rhs(net, kuramoto()),
            PhaseField([0.0, math.pi]),
            IntegratorConfig(step=0.01, horizon=10.0, store_stride=1000),
        )
        verdict = sync_verdict(traj)
        assert verdict.freq_sync
        assert not verdict.phase_sync
        assert verdict.final_diameter == pytest.approx(math.pi, abs=1e-9)

    def test_common_lift_wrapping(self):
        # Phases equal mod 2*pi count as phase-synchronized.
        traj = integrate(
            lambda y, t: np.zeros_like(y),
            PhaseField([0.0, 2 * math.pi, -4 * math.pi]),
            IntegratorConfig(step=0.1, horizon=1.0),
        )
        assert sync_verdict(traj).phase_sync


class TestOrderParameterDynamics:
    def test_r_monotone_and_rate_identity(self):
        # Continuum Kuramoto with W = 1: dr/dt = r * mean(sin^2(psi - theta)).
        m = 256
        rhs = prepare_cds_rhs(constant_graphon(1.0), kuramoto(), m)
        initial = discretize_initial(lambda x: x, m)
        traj = integrate(rhs, initial, IntegratorConfig(step=1e-3, horizon=2.0))
        r = np.empty(len(traj))
        rate = np.empty(len(traj))
        for k in range(len(traj)):
            field = traj.field(k)
            op = order_parameter(field)
            r[k] = op.r
            rate[k] = op.r * float(np.mean(np.sin(op.psi - field.values) ** 2))
        assert np.all(np.diff(r) >= -1e-8)
        sample = np.linspace(1, len(traj) - 2, 100).astype(int)
        fd = (r[sample + 1] - r[sample - 1]) / (2 * 1e-3)
        assert np.max(np.abs(fd - rate[sample])) <= 1e-4
