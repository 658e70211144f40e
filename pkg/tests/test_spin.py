"""State construction, twisting and rotations against the brute-force oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from oatsim import (
    Direction,
    SpinState,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    apply_oat,
    build_ops,
    make_coherent_state,
    rotate,
)
from oatsim.spin import beta_coefficients, m_values


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return SpinState(n, amps / np.linalg.norm(amps))


def random_direction(seed):
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=3)
    return Direction.normalized(*vec)


class TestCoherentState:
    def test_n2_amplitudes(self):
        state = make_coherent_state(2)
        np.testing.assert_allclose(
            state.amplitudes, [0.5, 0.7071068, 0.5], rtol=0, atol=5e-8
        )

    def test_n1_amplitudes(self):
        state = make_coherent_state(1)
        np.testing.assert_allclose(
            state.amplitudes, [0.7071068, 0.7071068], rtol=0, atol=5e-8
        )

    @pytest.mark.parametrize("n", [1000, 2000])
    def test_large_n_normalized(self, n):
        state = make_coherent_state(n)
        assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0) < 1e-12
        assert np.argmax(np.abs(state.amplitudes)) == n // 2  # peak at m = 0

    def test_rejects_zero_particles(self):
        with pytest.raises(ValueError):
            make_coherent_state(0)

    @pytest.mark.parametrize("n", [2, 10, 100])
    def test_moments(self, n):
        ops = build_ops(n)
        a = make_coherent_state(n).amplitudes
        jz_mean = np.real(np.vdot(a, ops.jz @ a))
        jz_sq = np.real(np.vdot(ops.jz @ a, ops.jz @ a))
        jx_mean = np.real(np.vdot(a, ops.jx @ a))
        assert abs(jz_mean) < 1e-9 * n
        assert abs(jz_sq - jz_mean**2 - n / 4.0) < 1e-9 * n
        assert abs(jx_mean - n / 2.0) < 1e-9 * n


class TestApplyOat:
    def test_n2_quarter_turn(self):
        state = apply_oat(make_coherent_state(2), math.pi / 2)
        np.testing.assert_allclose(
            state.amplitudes, [-0.5j, 0.7071068, -0.5j], rtol=0, atol=5e-8
        )

    def test_zero_alpha_identity(self):
        state = random_state(7, seed=3)
        np.testing.assert_array_equal(apply_oat(state, 0.0).amplitudes, state.amplitudes)

    def test_phase_only(self):
        state = apply_oat(make_coherent_state(4), 0.3)
        assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0) < 1e-14
        np.testing.assert_allclose(
            np.abs(state.amplitudes),
            np.abs(make_coherent_state(4).amplitudes),
            rtol=1e-15,
        )

    def test_matches_oracle_phases(self):
        state = apply_oat(make_coherent_state(2), 0.7)
        np.testing.assert_allclose(
            state.amplitudes, oracle.twist(oracle.COHERENT_2, 0.7), atol=1e-14
        )


class TestBuildOps:
    def test_jz_diagonal_exact(self):
        ops = build_ops(2)
        np.testing.assert_array_equal(np.diag(ops.jz).real, [-1.0, 0.0, 1.0])
        assert np.count_nonzero(ops.jz - np.diag(np.diag(ops.jz))) == 0

    def test_n2_matches_hardcoded_oracle(self):
        ops = build_ops(2)
        np.testing.assert_allclose(ops.jx, oracle.JX_2, atol=1e-15)
        np.testing.assert_allclose(ops.jy, oracle.JY_2, atol=1e-15)
        np.testing.assert_allclose(ops.jz, oracle.JZ_2, atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 10, 100])
    def test_hermitian(self, n):
        ops = build_ops(n)
        for j in (ops.jx, ops.jy, ops.jz):
            np.testing.assert_allclose(j, j.conj().T, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 10, 100])
    def test_commutator(self, n):
        ops = build_ops(n)
        comm = ops.jx @ ops.jy - ops.jy @ ops.jx
        np.testing.assert_allclose(comm, 1j * ops.jz, atol=1e-9 * n)

    def test_coherent_mean_spin(self):
        ops = build_ops(100)
        a = make_coherent_state(100).amplitudes
        assert abs(np.real(np.vdot(a, ops.jx @ a)) - 50.0) < 1e-9

    def test_beta_accessor(self):
        n = 6
        ops = build_ops(n)
        m = m_values(n)
        np.testing.assert_allclose(
            ops.beta, np.sqrt((n / 2 + m + 1) * (n / 2 - m)), rtol=1e-15
        )
        # tridiagonal couplings are beta/2
        np.testing.assert_allclose(np.diag(ops.jx, -1).real, ops.beta[:-1] / 2, rtol=1e-15)

    def test_odd_n_half_integer_grid(self):
        np.testing.assert_allclose(m_values(3), [-1.5, -0.5, 0.5, 1.5])
        assert beta_coefficients(3)[-1] == 0.0


class TestRotate:
    def test_z_rotation_preserves_magnitudes(self):
        state = make_coherent_state(6)
        out = rotate(state, Z_AXIS, 0.8)
        np.testing.assert_allclose(np.abs(out.amplitudes), np.abs(state.amplitudes), rtol=1e-15)
        expected = state.amplitudes * np.exp(-1j * 0.8 * state.m_values)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    def test_n2_y_half_turn(self):
        out = rotate(make_coherent_state(2), Y_AXIS, math.pi)
        # frozen from the scaling-and-squaring oracle
        np.testing.assert_allclose(out.amplitudes, [0.5, -0.7071068, 0.5], atol=5e-8)
        np.testing.assert_allclose(out.probabilities(), [0.25, 0.5, 0.25], atol=1e-10)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_oracle_n2(self, seed):
        rng = np.random.default_rng(seed)
        state = random_state(2, seed)
        direction = random_direction(seed + 100)
        theta = rng.uniform(0, 2 * math.pi)
        ours = rotate(state, direction, theta).amplitudes
        ref = oracle.rotate(state.amplitudes, (direction.x, direction.y, direction.z), theta)
        np.testing.assert_allclose(ours, ref, atol=1e-10)

    def test_identity_at_zero(self):
        state = random_state(9, seed=11)
        out = rotate(state, random_direction(5), 0.0)
        np.testing.assert_allclose(out.amplitudes, state.amplitudes, atol=1e-12)

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(st.integers(0, 10**6))
    def test_unitarity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 40))
        state = random_state(n, seed)
        direction = random_direction(seed + 1)
        theta = rng.uniform(-2 * math.pi, 2 * math.pi)
        out = rotate(state, direction, theta)
        assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-10

    @settings(max_examples=20, deadline=None, derandomize=True)
    @given(st.integers(0, 10**6))
    def test_additivity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 30))
        state = random_state(n, seed)
        direction = random_direction(seed + 2)
        t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
        once = rotate(state, direction, t1 + t2)
        twice = rotate(rotate(state, direction, t1), direction, t2)
        np.testing.assert_allclose(once.amplitudes, twice.amplitudes, atol=1e-9)

    def test_generator_consistency(self):
        n, h = 24, 1e-6
        state = random_state(n, seed=21)
        direction = random_direction(22)
        ops = build_ops(n)
        jn = ops.matrix(direction)
        numeric = (rotate(state, direction, h).amplitudes - state.amplitudes) / h
        analytic = -1j * (jn @ state.amplitudes)
        err = np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)
        assert err < 1e-4

    def test_oat_commutes_with_z_rotation(self):
        state = random_state(12, seed=31)
        a = rotate(apply_oat(state, 0.4), Z_AXIS, 0.9)
        b = apply_oat(rotate(state, Z_AXIS, 0.9), 0.4)
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-15)


class TestValidation:
    def test_state_requires_correct_length(self):
        with pytest.raises(ValueError):
            SpinState(3, np.array([1.0, 0.0]))

    def test_state_requires_norm(self):
        with pytest.raises(ValueError):
            SpinState(1, np.array([1.0, 1.0]))

    def test_state_immutable(self):
        state = make_coherent_state(2)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0

    def test_direction_requires_unit_norm(self):
        with pytest.raises(ValueError):
            Direction(1.0, 1.0, 0.0)

    def test_direction_normalized_constructor(self):
        d = Direction.normalized(3.0, 4.0, 0.0)
        np.testing.assert_allclose(d.as_array(), [0.6, 0.8, 0.0])
        with pytest.raises(ValueError):
            Direction.normalized(0.0, 0.0, 0.0)

    def test_build_ops_rejects_zero(self):
        with pytest.raises(ValueError):
            build_ops(0)
