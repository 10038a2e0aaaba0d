import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxed_polar.energy import (
    MaterialParams,
    Regime,
    el_residual_matrix,
    el_residual_quat,
    energy,
    isochoric_project,
    lifted_energy,
    lifted_energy_gradient,
    lifted_energy_hessian,
    relative_energy,
    rescale_F,
)
from relaxed_polar.errors import ClassicalRegime, NonInvertible, NonPositiveSigma, NotARotation
from relaxed_polar.rotcore import (
    polar_factor,
    quat_to_rotation,
    recover_absolute,
    rotation_from_axis_angle,
    svd_ordered,
    symmetry_orbit,
)
from relaxed_polar.sampling import RngState, quats_to_rotations, sample_unit_quaternions

from conftest import haar_rotations, random_gl3

P10 = MaterialParams(1.0, 0.0)
P_HALF = MaterialParams(1.0, 0.5)
P11 = MaterialParams(1.0, 1.0)
SIGMA = (4.0, 2.0, 0.5)
F_DIAG = np.diag(SIGMA)


class TestMaterialParams:
    def test_limit_case(self):
        assert P10.regime is Regime.NON_CLASSICAL_ZERO
        assert P10.lambda_scale == 1.0
        assert P10.rho == 2.0
        assert P10.zeta == 0.0

    def test_half(self):
        assert P_HALF.regime is Regime.NON_CLASSICAL
        assert P_HALF.lambda_scale == 2.0
        assert P_HALF.rho == 4.0
        assert P_HALF.zeta == 2.0

    def test_quarter(self):
        p = MaterialParams(1.0, 0.25)
        assert p.lambda_scale == pytest.approx(4.0 / 3.0, abs=1e-15)
        assert p.rho == pytest.approx(8.0 / 3.0, abs=1e-15)

    def test_classical_infinite_tags(self):
        for p in (P11, MaterialParams(1.0, 2.0)):
            assert p.regime is Regime.CLASSICAL
            assert math.isinf(p.lambda_scale)
            assert math.isinf(p.rho)

    def test_scaling_identities(self):
        p = MaterialParams(2.0, 0.5)
        assert p.rho == 2.0 * p.lambda_scale
        assert p.rho >= 2.0
        assert p.zeta == pytest.approx(p.rho - 2.0, rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            MaterialParams(0.0, 0.0)
        with pytest.raises(ValueError):
            MaterialParams(1.0, -0.1)


class TestEnergy:
    def test_reference_state(self):
        assert energy(np.eye(3), np.eye(3), P10) == 0.0

    def test_diagonal_value(self):
        # 3^2 + 1^2 + 0.5^2
        assert energy(np.eye(3), F_DIAG, P10) == pytest.approx(10.25, abs=1e-14)

    def test_half_turn_value(self):
        s1, s2, s3 = SIGMA
        expected = (s1 + 1) ** 2 + (s2 + 1) ** 2 + (s3 - 1) ** 2
        assert energy(np.diag([-1.0, -1.0, 1.0]), F_DIAG, P10) == pytest.approx(
            expected, abs=1e-12
        )

    def test_rejects_non_rotation(self):
        with pytest.raises(NotARotation):
            energy(2 * np.eye(3), F_DIAG, P10)

    def test_non_negative(self):
        rots = haar_rotations(seed=5, n=200)
        fs = random_gl3(seed=6, n=200)
        for r, f in zip(rots, fs):
            assert energy(r, f, P_HALF) >= 0.0

    def test_transformation_identity(self):
        # principal-axis transform preserves both energy contributions
        rots = haar_rotations(seed=8, n=100)
        fs = random_gl3(seed=9, n=100, max_cond=100)
        for r, f in zip(rots, fs):
            dec = svd_ordered(f)
            rhat = dec.Q.T @ r.T @ dec.Rp @ dec.Q
            for p in (P10, P_HALF, P11):
                assert energy(r, f, p) == pytest.approx(
                    relative_energy(rhat, dec.sigma, p), abs=1e-10
                )

    def test_objectivity(self):
        rots = haar_rotations(seed=12, n=50)
        qs = haar_rotations(seed=13, n=50)
        fs = random_gl3(seed=14, n=50)
        for r, q, f in zip(rots, qs, fs):
            assert energy(q @ r, q @ f, P_HALF) == pytest.approx(
                energy(r, f, P_HALF), abs=1e-12
            )

    def test_classical_grioli_lower_bound(self):
        # mu_c >= mu: the polar factor minimizes over 1e5 Haar samples
        f = random_gl3(seed=15, n=1, max_cond=50)[0]
        w_polar = energy(polar_factor(f), f, P11)
        rots = quats_to_rotations(sample_unit_quaternions(RngState(16), 100_000))
        ubar = np.swapaxes(rots, 1, 2) @ f
        d = ubar - np.eye(3)
        sym = 0.5 * (d + np.swapaxes(d, 1, 2))
        skew = 0.5 * (d - np.swapaxes(d, 1, 2))
        w = P11.mu * np.einsum("nij,nij->n", sym, sym) + P11.muc * np.einsum(
            "nij,nij->n", skew, skew
        )
        assert np.all(w - w_polar >= -1e-10)


class TestRelativeEnergy:
    def test_identity_rotation(self):
        s1, s2, s3 = SIGMA
        expected = (s1 - 1) ** 2 + (s2 - 1) ** 2 + (s3 - 1) ** 2
        assert relative_energy(np.eye(3), SIGMA, P10) == pytest.approx(expected, abs=1e-13)

    def test_optimal_angle_value(self):
        rhat = rotation_from_axis_angle(math.acos(1.0 / 3.0), [0, 0, 1])
        assert relative_energy(rhat, SIGMA, P10) == pytest.approx(2.25, abs=1e-13)

    def test_matches_absolute_energy(self):
        fs = random_gl3(seed=21, n=50, max_cond=100)
        rhats = haar_rotations(seed=22, n=50)
        for f, rhat in zip(fs, rhats):
            dec = svd_ordered(f)
            r = recover_absolute(rhat, dec)
            # Rhat = Q^T R^T Rp Q corresponds to R = Rp Q Rhat^T Q^T
            assert relative_energy(rhat, dec.sigma, P_HALF) == pytest.approx(
                energy(r, f, P_HALF), abs=1e-10
            )

    def test_symmetry_orbit_invariance(self):
        rhat = haar_rotations(seed=25, n=1)[0]
        vals = [relative_energy(m, SIGMA, P_HALF) for m in symmetry_orbit(rhat)]
        assert np.allclose(vals, vals[0], atol=1e-12)

    def test_sigma_validation(self):
        with pytest.raises(NonPositiveSigma):
            relative_energy(np.eye(3), (1.0, -1.0, 0.5), P10)


class TestLiftedEnergy:
    def test_reference(self):
        assert lifted_energy([1, 0, 0, 0], (1.0, 1.0, 1.0), P10) == 0.0

    def test_branch_value(self):
        ca = math.sqrt(2.0 / 3.0)
        cb = math.sqrt(1.0 / 3.0)
        for sign in (+1, -1):
            assert lifted_energy([ca, 0, 0, sign * cb], SIGMA, P10) == pytest.approx(
                2.25, abs=1e-13
            )

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1.5, 1.5), min_size=4, max_size=4))
    def test_even_in_q(self, q):
        q = np.array(q)
        if not np.any(q != 0.0):
            return
        assert lifted_energy(q, SIGMA, P10) == lifted_energy(-q, SIGMA, P10)

    def test_unit_sphere_matches_relative(self):
        from conftest import haar_quaternions

        for q in haar_quaternions(seed=29, n=100):
            assert lifted_energy(q, SIGMA, P_HALF) == pytest.approx(
                relative_energy(quat_to_rotation(q), SIGMA, P_HALF), abs=1e-12
            )


class TestRescaleAndProjection:
    def test_limit_case_is_identity_map(self):
        f = random_gl3(seed=33, n=1)[0]
        assert np.array_equal(rescale_F(f, P10), f)

    def test_half(self):
        assert np.allclose(rescale_F(F_DIAG, P_HALF), np.diag([2.0, 1.0, 0.25]), atol=1e-15)

    def test_classical_raises(self):
        with pytest.raises(ClassicalRegime):
            rescale_F(F_DIAG, P11)

    def test_isochoric_unimodular_fixed(self):
        f = random_gl3(seed=34, n=1)[0]
        g = isochoric_project(f)
        assert np.allclose(isochoric_project(g), g, atol=1e-14)

    def test_isochoric_value(self):
        assert np.allclose(isochoric_project(np.diag([8.0, 1.0, 1.0])), np.diag([4.0, 0.5, 0.5]))

    def test_isochoric_det_one(self):
        for f in random_gl3(seed=35, n=100):
            assert np.linalg.det(isochoric_project(f)) == pytest.approx(1.0, abs=1e-12)

    def test_isochoric_rejects_singular(self):
        with pytest.raises(NonInvertible):
            isochoric_project(np.zeros((3, 3)))


class TestElResidualMatrix:
    def test_polar_is_critical(self):
        for f in random_gl3(seed=44, n=100, max_cond=50):
            for p in (P10, P_HALF, P11):
                assert el_residual_matrix(polar_factor(f), f, p) < 1e-12

    def test_generic_rotation_positive(self):
        rots = haar_rotations(seed=47, n=200)
        fs = random_gl3(seed=48, n=200)
        for r, f in zip(rots, fs):
            assert el_residual_matrix(r, f, P10) > 1e-6


class TestElResidualQuat:
    def test_identity_zero(self):
        assert np.array_equal(el_residual_quat([1, 0, 0, 0], 0.0, SIGMA), np.zeros(5))

    def test_branch_tuple(self):
        s12 = SIGMA[0] + SIGMA[1]
        lam = (SIGMA[0] - SIGMA[1]) ** 2 * (s12 - 2.0) / s12
        q = [math.sqrt(0.5 + 1 / s12), 0, 0, math.sqrt(0.5 - 1 / s12)]
        assert np.max(np.abs(el_residual_quat(q, lam, SIGMA))) < 1e-12

    def test_wrong_multiplier_detected(self):
        s12 = SIGMA[0] + SIGMA[1]
        lam = (SIGMA[0] - SIGMA[1]) ** 2 * (s12 - 2.0) / s12
        q = [math.sqrt(0.5 + 1 / s12), 0, 0, math.sqrt(0.5 - 1 / s12)]
        assert np.max(np.abs(el_residual_quat(q, lam + 1.0, SIGMA))) >= 0.4

    def test_generic_point_nonzero(self):
        res = el_residual_quat([0.5, 0.5, 0.5, 0.5], 0.0, (1.7, 1.1, 0.4))
        assert np.max(np.abs(res)) > 1e-3

    def test_gradient_consistency_fd(self):
        # the polynomial system must be the gradient of the lifted energy:
        # central finite differences as the independent route
        q = np.array([0.4, -0.3, 0.7, 0.5])
        h = 1e-6
        fd = np.zeros(4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = h
            fd[i] = (
                lifted_energy(q + e, SIGMA, P10) - lifted_energy(q - e, SIGMA, P10)
            ) / (2 * h)
        assert np.allclose(fd, lifted_energy_gradient(q, SIGMA), atol=1e-6)


class TestLiftedHessian:
    def test_matches_finite_differences(self):
        q = np.array([0.6, 0.2, -0.5, 0.3])
        h = 1e-5
        fd = np.zeros((4, 4))
        for i in range(4):
            for j in range(4):
                ei = np.zeros(4)
                ej = np.zeros(4)
                ei[i] = h
                ej[j] = h
                fd[i, j] = (
                    lifted_energy(q + ei + ej, SIGMA, P10)
                    - lifted_energy(q + ei - ej, SIGMA, P10)
                    - lifted_energy(q - ei + ej, SIGMA, P10)
                    + lifted_energy(q - ei - ej, SIGMA, P10)
                ) / (4 * h * h)
        assert np.allclose(fd, lifted_energy_hessian(q, SIGMA), atol=1e-4)
