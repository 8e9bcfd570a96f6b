"""Plant equations of motion and the minimum-norm tension allocation."""
import numpy as np
import pytest

from cablelift.dynamics import (DisturbanceSample, SystemParams,
                                allocate_cable_forces, connection_acceleration,
                                pack_state, parallel_control_component,
                                state_size, system_derivative, unpack_state)
from cablelift.errors import ConfigurationError
from cablelift.geometry import hat, normalize
from cablelift.scenarios import default_params, equilibrium_state
from cablelift.controller import (ControllerGains, initial_controller_state,
                                  step_controller, hold_setpoint)

RNG = np.random.default_rng(11)


def random_rotation(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


class TestSystemParams:
    def test_rejects_rank_deficient_attachments(self):
        # all attachment points collinear along x: no yaw authority
        with pytest.raises(ConfigurationError):
            SystemParams(n=3, m0=1.0, J0=np.diag([0.125, 0.125, 1 / 6]),
                         m_q=np.ones(3), J_q=np.tile(np.diag([0.02, 0.02, 0.04]), (3, 1, 1)),
                         l=np.ones(3),
                         rho=np.array([[0.5, 0, 0], [-0.5, 0, 0], [0.25, 0, 0]]))

    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ConfigurationError):
            default_params(m0=-1.0)

    def test_rejects_asymmetric_inertia(self):
        J = np.diag([0.1, 0.1, 0.1])
        J[0, 1] = 0.05
        with pytest.raises(ConfigurationError):
            default_params(J0=J)

    def test_pack_unpack_roundtrip(self):
        params = default_params()
        s = equilibrium_state(params)
        y = pack_state(s)
        assert y.shape == (state_size(params.n),)
        s2 = unpack_state(y, params.n)
        for name in ("x", "v", "R", "Om", "q", "om", "R_q", "Om_q"):
            assert np.array_equal(getattr(s, name), getattr(s2, name))


class TestAllocation:
    def test_symmetric_hover_equal_shares(self):
        params = default_params()
        mu = allocate_cable_forces(np.array([0.0, 0.0, 29.43]), np.zeros(3),
                                   np.eye(3), params)
        assert np.allclose(mu, np.tile([0.0, 0.0, 9.81], (3, 1)), atol=1e-12)

    def test_zero_wrench(self):
        params = default_params()
        mu = allocate_cable_forces(np.zeros(3), np.zeros(3), np.eye(3), params)
        assert np.allclose(mu, 0.0, atol=1e-15)

    def test_against_least_squares_oracle(self):
        params = default_params()
        P = params.alloc_P
        worst = 0.0
        for _ in range(200):
            F_d, M_d = RNG.normal(size=3) * 20, RNG.normal(size=3) * 5
            R0 = random_rotation(RNG)
            mu = allocate_cable_forces(F_d, M_d, R0, params)
            # independent minimum-norm solve of the stacked wide system
            b = np.concatenate([R0.T @ F_d, M_d])
            ref = (np.linalg.lstsq(P, b, rcond=None)[0]).reshape(params.n, 3) @ R0.T
            worst = max(worst, np.max(np.abs(mu - ref)))
        assert worst <= 1e-9

    def test_wrench_reconstruction(self):
        params = default_params()
        worst_f = worst_m = 0.0
        for _ in range(1000):
            F_d, M_d = RNG.normal(size=3) * 20, RNG.normal(size=3) * 5
            R0 = random_rotation(RNG)
            mu = allocate_cable_forces(F_d, M_d, R0, params)
            worst_f = max(worst_f, np.max(np.abs(mu.sum(axis=0) - F_d)))
            mom = np.cross(params.rho, mu @ R0).sum(axis=0)
            worst_m = max(worst_m, np.max(np.abs(mom - M_d)))
        assert worst_f <= 1e-9
        assert worst_m <= 1e-9


class TestConnectionAcceleration:
    def test_hover_gravity_only(self):
        params = default_params()
        s = equilibrium_state(params)
        a = connection_acceleration(s, np.zeros(3), np.zeros(3), params)
        assert np.allclose(a, np.tile([0.0, 0.0, params.g], (params.n, 1)),
                           atol=1e-14)

    def test_pure_spin_centripetal(self):
        params = default_params()
        s = equilibrium_state(params)
        w = 2.0
        s.Om = np.array([0.0, 0.0, w])
        a = connection_acceleration(s, np.zeros(3), np.zeros(3), params)
        expect = np.array([0.0, 0.0, params.g]) - w ** 2 * params.rho
        assert np.allclose(a, expect, atol=1e-12)

    def test_angular_acceleration_term(self):
        params = default_params()
        s = equilibrium_state(params)
        s.R = random_rotation(RNG)
        alpha = np.array([0.0, 0.0, 3.0])
        a = connection_acceleration(s, np.zeros(3), alpha, params)
        for i in range(params.n):
            expect = np.array([0.0, 0.0, params.g]) \
                - s.R @ (hat(params.rho[i]) @ alpha)
            assert np.allclose(a[i], expect, atol=1e-12)


class TestParallelControlComponent:
    def test_reduces_to_mu(self):
        params = default_params()
        s = equilibrium_state(params)
        mu = RNG.normal(size=(params.n, 3))
        out = parallel_control_component(mu, s, np.zeros((params.n, 3)), params)
        assert np.allclose(out, mu, atol=1e-14)

    def test_static_hang_supports_quad_weight(self):
        # vertical cable, attachment accelerating at g (hover): the parallel
        # force must carry the tension plus the quadrotor's own weight
        params = default_params()
        s = equilibrium_state(params)
        T = 3.27
        mu = np.tile([0.0, 0.0, T], (params.n, 1))
        a = np.tile([0.0, 0.0, params.g], (params.n, 1))
        out = parallel_control_component(mu, s, a, params)
        expect_z = T + params.m_q * params.g
        assert np.allclose(out[:, 2], expect_z, atol=1e-12)
        assert np.allclose(out[:, :2], 0.0, atol=1e-14)

    def test_centrifugal_only(self):
        params = default_params()
        s = equilibrium_state(params)
        s.om = np.tile([0.5, 0.0, 0.0], (params.n, 1))
        out = parallel_control_component(np.zeros((params.n, 3)), s,
                                         np.zeros((params.n, 3)), params)
        for i in range(params.n):
            expect = params.m_q[i] * params.l[i] * 0.25 * s.q[i]
            assert np.allclose(out[i], expect, atol=1e-14)


def hover_control(params, gains=None):
    """Exact steady hover control output from the cascade."""
    gains = gains or ControllerGains()
    state = equilibrium_state(params)
    cs = initial_controller_state(params)
    ctrl, _, _ = step_controller(state, hold_setpoint(), cs, gains, params,
                                 1e-3, "baseline")
    return state, ctrl


class TestSystemDerivative:
    def test_equilibrium_all_derivatives_zero(self):
        params = default_params()
        state, ctrl = hover_control(params)
        dist = DisturbanceSample(d_x0=np.zeros(3), d_R0=np.zeros(3),
                                 d_xq=np.zeros((params.n, 3)),
                                 d_Rq=np.zeros((params.n, 3)))
        der = system_derivative(state, ctrl, dist, np.zeros(3), np.zeros(3), params)
        for name in ("x", "v", "R", "Om", "q", "om", "R_q", "Om_q"):
            assert np.max(np.abs(getattr(der, name))) <= 1e-9, name

    def test_translational_line_without_deviations(self):
        # mu realized equal to mu_d (cables aligned) => x_dd = F_d/m0 - g e3
        params = default_params(m0=2.0)
        state, ctrl = hover_control(params)
        dist = DisturbanceSample(d_x0=np.zeros(3), d_R0=np.zeros(3),
                                 d_xq=np.zeros((params.n, 3)),
                                 d_Rq=np.zeros((params.n, 3)))
        der = system_derivative(state, ctrl, dist, np.zeros(3), np.zeros(3), params)
        expect = ctrl.F_d / params.m0 - np.array([0.0, 0.0, params.g])
        assert np.allclose(der.v, expect, atol=1e-12)

    def test_disturbance_enters_translation(self):
        params = default_params()
        state, ctrl = hover_control(params)
        d = np.array([0.6, -0.2, 0.9])
        dist = DisturbanceSample(d_x0=d, d_R0=np.zeros(3),
                                 d_xq=np.zeros((params.n, 3)),
                                 d_Rq=np.zeros((params.n, 3)))
        der = system_derivative(state, ctrl, dist, np.zeros(3), np.zeros(3), params)
        assert np.allclose(der.v, d / params.m0, atol=1e-9)

    def test_phi_channels_are_accelerations(self):
        params = default_params()
        state, ctrl = hover_control(params)
        dist = DisturbanceSample(d_x0=np.zeros(3), d_R0=np.zeros(3),
                                 d_xq=np.zeros((params.n, 3)),
                                 d_Rq=np.zeros((params.n, 3)))
        phi_x = np.array([0.1, 0.2, -0.3])
        phi_R = np.array([-0.05, 0.0, 0.4])
        der = system_derivative(state, ctrl, dist, phi_x, phi_R, params)
        assert np.allclose(der.v, phi_x, atol=1e-9)
        assert np.allclose(der.Om, phi_R, atol=1e-9)

    def test_kinematic_consistency(self):
        params = default_params()
        state = equilibrium_state(params)
        state.R = random_rotation(RNG)
        state.Om = RNG.normal(size=3)
        state.om = np.cross(state.q, RNG.normal(size=(params.n, 3)))  # tangent
        _, ctrl = hover_control(default_params())
        dist = DisturbanceSample(d_x0=RNG.normal(size=3), d_R0=RNG.normal(size=3),
                                 d_xq=RNG.normal(size=(params.n, 3)),
                                 d_Rq=RNG.normal(size=(params.n, 3)))
        der = system_derivative(state, ctrl, dist, np.zeros(3), np.zeros(3), params)
        # q . q_dot = 0 and R_dot = R hat(Om)
        assert np.max(np.abs(np.einsum("ij,ij->i", state.q, der.q))) <= 1e-12
        assert np.max(np.abs(der.R - state.R @ hat(state.Om))) <= 1e-12
        for i in range(params.n):
            assert np.max(np.abs(der.R_q[i] - state.R_q[i] @ hat(state.Om_q[i]))) <= 1e-12

    def test_decomposition_reconstruction(self):
        params = default_params()
        q = np.stack([normalize(RNG.normal(size=3)) for _ in range(params.n)])
        dist = DisturbanceSample(d_x0=np.zeros(3), d_R0=np.zeros(3),
                                 d_xq=RNG.normal(size=(params.n, 3)),
                                 d_Rq=np.zeros((params.n, 3)))
        par, perp = dist.decompose(q)
        assert np.max(np.abs(par + perp - dist.d_xq)) <= 1e-14
        assert np.max(np.abs(np.einsum("ij,ij->i", perp, q))) <= 1e-13
