"""Adaptive-neuro geometric control stack.

Top level computes the desired payload wrench from per-axis PD terms scaled by
online mass/inertia estimates, minus RBF-network disturbance-dynamics
estimates and integral disturbance compensations. Lower levels realize the
wrench through minimum-norm cable tensions, a geometric cable-direction loop,
and an SO(3) attitude inner loop on each quadrotor.

Two modes: "adaptive" runs every estimator; "baseline" freezes the model
parameters at their reference values and disables the networks, keeping only
the integral compensations.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .dynamics import (ControlOutput, allocate_cable_forces,
                       connection_acceleration, parallel_control_component)
from .errors import ConfigurationError
from .geometry import E1, E3, cross, payload_errors, cable_errors, skew_part_vee

M_MIN = 0.1          # kg, floor on the mass estimate
J_MIN = 0.01         # kg m^2, floor on the inertia estimates
MU_EPS = 1e-6        # N, below this the desired cable direction is held
U_EPS = 1e-6         # N, below this the desired quad attitude is held


@dataclass
class RbfNetwork:
    """Gaussian radial-basis network, 2 inputs -> 1 output."""

    centers: np.ndarray   # (l, 2)
    widths: np.ndarray    # (l,)
    weights: np.ndarray   # (l,)

    @property
    def l(self):
        return self.centers.shape[0]

    def copy(self):
        return RbfNetwork(self.centers, self.widths, self.weights.copy())


def default_network(l=5):
    """Centers evenly spaced on the radius-2 circle of the error-phase plane
    (covering the [-2, 2]^2 working region without privileging the origin);
    widths evenly spread over [1, 2]; zero weights."""
    ang = 2.0 * np.pi * np.arange(l) / l
    centers = 2.0 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    widths = np.linspace(1.0, 2.0, l)
    return RbfNetwork(centers=centers, widths=widths, weights=np.zeros(l))


def rbf_activation(x, net):
    """Activation vector: exp(-||x - c_k||^2 / (2 b_k^2)), components in (0,1]."""
    d2 = np.sum((net.centers - np.asarray(x)) ** 2, axis=1)
    return np.exp(-d2 / (2.0 * net.widths ** 2))


def nn_estimate(net, x):
    """Network output W^T h(x)."""
    return float(net.weights @ rbf_activation(x, net))


@dataclass
class ControllerGains:
    """All controller gains plus the derived per-axis Lyapunov matrices P_j."""

    k_p: np.ndarray = field(default_factory=lambda: np.array([20.0, 20.0, 1000.0]))
    k_d: np.ndarray = field(default_factory=lambda: np.array([10.0, 10.0, 200.0]))
    k_R0: float = 20.0
    k_Om0: float = 10.0
    k_q: float = 8.0
    k_om: float = 4.0
    k_R: float = 8.0          # quadrotor attitude inner loop
    k_Om: float = 2.0
    c_q: float = 0.01
    h_x0: float = 1.0
    h_R0: float = 0.1
    h_xi: float = 0.1
    eta_m: float = 0.01
    eta_J: float = 0.01
    s_m: float = 0.01
    s_J: float = 0.01
    gamma_x: np.ndarray = field(default_factory=lambda: np.array([5000.0, 5000.0, 1000.0]))
    gamma_R: np.ndarray = field(default_factory=lambda: np.array([1500.0, 1500.0, 100.0]))
    # time constant of the first-order filter applied to every
    # backward-differenced setpoint derivative (dirty-derivative smoothing)
    deriv_tau: float = 0.02   # s
    Q: np.ndarray = field(default_factory=lambda: np.array(
        [np.diag([0.05, 0.05]), np.diag([0.05, 0.05]), np.diag([1.0, 1.0])]))

    P: np.ndarray = field(init=False, repr=False)   # (3, 2, 2)

    def __post_init__(self):
        self.k_p = np.asarray(self.k_p, dtype=float)
        self.k_d = np.asarray(self.k_d, dtype=float)
        self.gamma_x = np.asarray(self.gamma_x, dtype=float)
        self.gamma_R = np.asarray(self.gamma_R, dtype=float)
        self.Q = np.asarray(self.Q, dtype=float).reshape(3, 2, 2)
        for name in ("k_R0", "k_Om0", "k_q", "k_om", "k_R", "k_Om", "c_q",
                     "h_x0", "h_R0", "h_xi", "eta_m", "eta_J", "s_m", "s_J",
                     "deriv_tau"):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"gain {name} must be positive")
        if np.any(self.k_p <= 0.0) or np.any(self.k_d <= 0.0):
            raise ConfigurationError("k_p and k_d must be positive per axis")
        if np.any(self.gamma_x <= 0.0) or np.any(self.gamma_R <= 0.0):
            raise ConfigurationError("gamma_x and gamma_R must be positive")
        P = np.empty((3, 2, 2))
        for j in range(3):
            Qj = self.Q[j]
            if np.max(np.abs(Qj - Qj.T)) > 1e-12 or np.min(np.linalg.eigvalsh(Qj)) <= 0.0:
                raise ConfigurationError(f"Q[{j}] must be symmetric positive-definite")
            L = np.array([[0.0, 1.0], [-self.k_p[j], -self.k_d[j]]])
            # solve L^T P + P L = -Q
            Pj = solve_continuous_lyapunov(L.T, -Qj)
            Pj = 0.5 * (Pj + Pj.T)
            if np.max(np.abs(L.T @ Pj + Pj @ L + Qj)) > 1e-10:
                raise ConfigurationError(f"Lyapunov equation residual too large on axis {j}")
            if np.min(np.linalg.eigvalsh(Pj)) <= 0.0:
                raise ConfigurationError(f"P[{j}] is not positive-definite")
            P[j] = Pj
        self.P = P
        Z = self.cable_error_matrix()
        if np.min(np.linalg.eigvalsh(Z)) <= 0.0:
            raise ConfigurationError(
                "c_q is too large: the cable error quadratic form must be positive-definite")

    def cable_error_matrix(self):
        """2x2 form whose positive-definiteness the cable loop analysis needs."""
        return np.array([[self.c_q * self.k_q, 0.5 * self.c_q * self.k_om],
                         [0.5 * self.c_q * self.k_om, self.k_om - self.c_q]])

    def p_drive(self, E):
        """Per-axis scalar E_xj^T P_j B with B = (0, 1)^T. E has shape (3, 2)."""
        return np.einsum("ji,jik->jk", E, self.P)[:, 1]


@dataclass
class Setpoint:
    """Desired payload trajectory sample."""

    x_d: np.ndarray
    v_d: np.ndarray
    a_d: np.ndarray
    R_d: np.ndarray
    Om_d: np.ndarray
    dOm_d: np.ndarray


def hold_setpoint(x=(0.0, 0.0, 0.0)):
    z = np.zeros(3)
    return Setpoint(x_d=np.asarray(x, dtype=float), v_d=z.copy(), a_d=z.copy(),
                    R_d=np.eye(3), Om_d=z.copy(), dOm_d=z.copy())


@dataclass
class ControllerState:
    """Mutable estimator memory plus finite-difference history."""

    m_bar: np.ndarray             # (3,) per-axis mass estimates, kg
    J_bar: np.ndarray             # (3,) per-axis inertia estimates, kg m^2
    nets_x: list                  # 3 RbfNetwork
    nets_R: list                  # 3 RbfNetwork
    d_x0_est: np.ndarray          # (3,) N
    d_R0_est: np.ndarray          # (3,) N m
    d_xq_est: np.ndarray          # (n,3) N

    # backward-difference history for allocated/derived setpoints
    q_d_prev: np.ndarray = None       # (n,3)
    om_d_prev: np.ndarray = None      # (n,3)
    R_qd_prev: np.ndarray = None      # (n,3,3)
    Om_qd_prev: np.ndarray = None     # (n,3)
    # low-pass filter states for the dirty derivatives
    qd_dot_f: np.ndarray = None       # (n,3)
    om_d_dot_f: np.ndarray = None     # (n,3)
    Om_qd_f: np.ndarray = None        # (n,3)
    dOm_qd_f: np.ndarray = None       # (n,3)
    steps: int = 0                    # controller invocations so far
    phi_x_est: np.ndarray = field(default_factory=lambda: np.zeros(3))
    phi_R_est: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def copy(self):
        cs = ControllerState(
            m_bar=self.m_bar.copy(), J_bar=self.J_bar.copy(),
            nets_x=[n.copy() for n in self.nets_x],
            nets_R=[n.copy() for n in self.nets_R],
            d_x0_est=self.d_x0_est.copy(), d_R0_est=self.d_R0_est.copy(),
            d_xq_est=self.d_xq_est.copy())
        for name in ("q_d_prev", "om_d_prev", "R_qd_prev", "Om_qd_prev",
                     "qd_dot_f", "om_d_dot_f", "Om_qd_f", "dOm_qd_f"):
            v = getattr(self, name)
            setattr(cs, name, None if v is None else v.copy())
        cs.steps = self.steps
        cs.phi_x_est = self.phi_x_est.copy()
        cs.phi_R_est = self.phi_R_est.copy()
        return cs


def initial_controller_state(params, l=5):
    """Estimates start at the reference model; weights and compensations at zero."""
    return ControllerState(
        m_bar=np.full(3, params.m0_ref),
        J_bar=np.diag(params.J0_ref).copy(),
        nets_x=[default_network(l) for _ in range(3)],
        nets_R=[default_network(l) for _ in range(3)],
        d_x0_est=np.zeros(3),
        d_R0_est=np.zeros(3),
        d_xq_est=np.zeros((params.n, 3)),
    )


def translational_control(errors, setpoint, m_bar, phi_x_bar, gains, g):
    """Desired translational effort, per axis:
    U_x[j] = m_bar[j] (-k_p e_x - k_d e_v + a_d[j] + g delta_j3 - phi_x_bar[j]).
    """
    pd = -gains.k_p * errors.e_x - gains.k_d * errors.e_v
    return m_bar * (pd + setpoint.a_d + g * E3 - phi_x_bar)


def rotational_control(errors, state, setpoint, J_bar, phi_R_bar, gains):
    """Desired rotational effort per axis (geometric attitude PD scaled by the
    inertia estimates, minus the network estimate)."""
    A = state.R.T @ setpoint.R_d
    ff = -cross(state.Om, A @ setpoint.Om_d) + A @ setpoint.dOm_d
    return J_bar * (-gains.k_R0 * errors.e_R - gains.k_Om0 * errors.e_Om
                    + ff - phi_R_bar)


def _bounded_quadratic_update(est, drive, eta, s_factor, cap, floor, dt):
    """Shared three-branch adaptive law for the mass/inertia estimates.

    rate = -est^2/eta * drive, except when drive <= 0 with est at/above the
    cap, where rate = -s_factor * est^2 / eta (pushes back under the cap).
    """
    rate = -(est ** 2) / eta * drive
    at_cap = (drive <= 0.0) & (est >= cap)
    rate = np.where(at_cap, -s_factor * est ** 2 / eta, rate)
    return np.maximum(est + dt * rate, floor)


def update_mass_estimate(m_bar, E, U_x, gains, max_m0, dt):
    """Bounded quadratic-growth mass law, drive s_j = (E_xj^T P_j B) U_x[j]."""
    s = gains.p_drive(E) * U_x
    return _bounded_quadratic_update(m_bar, s, gains.eta_m, gains.s_m,
                                     max_m0, M_MIN, dt)


def update_inertia_estimate(J_bar, e_Om, U_R, gains, max_J0_diag, dt):
    """Same structure with drive s_j = e_Om[j] U_R[j]."""
    s = e_Om * U_R
    return _bounded_quadratic_update(J_bar, s, gains.eta_J, gains.s_J,
                                     max_J0_diag, J_MIN, dt)


def update_weights(cs, E, e_Om, hx, hR, gains, dt):
    """Rank-1 weight adaptation: dW_xj = gamma_xj (E^T P B) h; dW_Rj = gamma_Rj e_Om[j] h."""
    px = gains.p_drive(E)
    for j in range(3):
        cs.nets_x[j].weights += dt * gains.gamma_x[j] * px[j] * hx[j]
        cs.nets_R[j].weights += dt * gains.gamma_R[j] * e_Om[j] * hR[j]


def update_disturbance_estimates(cs, errors, cable_errs, state, gains, params, dt):
    """Integral compensations for the payload and per-quadrotor disturbances."""
    px = gains.p_drive(np.stack([errors.e_x, errors.e_v], axis=1))
    cs.d_x0_est += dt * (gains.h_x0 / params.m0_ref) * px
    cs.d_R0_est += dt * (gains.h_R0 / np.diag(params.J0_ref)) * errors.e_Om

    J_ref_inv = 1.0 / np.diag(params.J0_ref)
    for i in range(params.n):
        qi = state.q[i]
        ce = cable_errs[i]
        inner = px / params.m0_ref
        inner = inner - J_ref_inv * (state.R @ cross(params.rho[i], errors.e_Om))
        inner = inner + (gains.h_xi / (params.m_q[i] * params.l[i])) \
            * cross(qi, ce.e_om + gains.c_q * ce.e_q)
        cs.d_xq_est[i] += dt * gains.h_xi * np.dot(qi, inner) * qi


def first_level_control(U_x, U_R, cs, state, params):
    """Subtract the integral compensations from the desired efforts."""
    d_par = np.einsum("ij,ij->i", state.q, cs.d_xq_est)[:, None] * state.q
    F_d = U_x - cs.d_x0_est - d_par.sum(axis=0)
    M_d = U_R - cs.d_R0_est - cross(params.rho, d_par @ state.R).sum(axis=0)
    return F_d, M_d


def desired_cable_direction(mu_d, prev_q_d):
    """q_d = -mu_d / ||mu_d||; a near-zero tension command holds the previous
    direction (the direction is undefined at zero tension)."""
    norms = np.linalg.norm(mu_d, axis=1)
    q_d = np.where((norms >= MU_EPS)[:, None], -mu_d / np.maximum(norms, MU_EPS)[:, None],
                   prev_q_d)
    return q_d


def cable_attitude_control(ce, q, om, a, m, l, gains):
    """Cable-normal control force for one cable; output is orthogonal to q."""
    q_dot = cross(om, q)
    target = (-gains.k_q * ce.e_q - gains.k_om * ce.e_om
              - np.dot(q, ce.om_d) * q_dot
              - (np.dot(q, ce.om_d_dot) * q - ce.om_d_dot))
    # +m (I - q q^T) a cancels the attachment-acceleration drive in the
    # cable-swing dynamics, leaving om_dot = (I - q q^T) target
    perp_a = a - np.dot(q, a) * q
    return m * l * cross(q, target) + m * perp_a


def quadrotor_attitude_control(u, R_i, Om_i, J_i, R_d, Om_d, dOm_d, gains):
    """Thrust magnitude and moment for one quadrotor tracking attitude R_d."""
    f = float(u @ (R_i @ E3))
    A = R_d.T @ R_i
    e_R = 0.5 * np.array([A[2, 1] - A[1, 2], A[0, 2] - A[2, 0], A[1, 0] - A[0, 1]])
    B = R_i.T @ R_d
    e_Om = Om_i - B @ Om_d
    M = (-gains.k_R * e_R - gains.k_Om * e_Om + cross(Om_i, J_i @ Om_i)
         - J_i @ (cross(Om_i, B @ Om_d) - B @ dOm_d))
    return f, M


def desired_quad_attitude(u, prev_col):
    """Desired attitude with body z along u and heading fixed toward e1."""
    nu = np.linalg.norm(u)
    b3 = u / nu if nu >= U_EPS else prev_col
    b2 = cross(b3, E1)
    nb2 = np.linalg.norm(b2)
    if nb2 < 1e-9:
        b2 = cross(b3, np.array([0.0, 1.0, 0.0]))
        nb2 = np.linalg.norm(b2)
    b2 = b2 / nb2
    b1 = cross(b2, b3)
    return np.stack([b1, b2, b3], axis=1)


def step_controller(state, setpoint, cs, gains, params, dt, mode="adaptive"):
    """One control step of the full cascade. Mutates cs; returns ControlOutput.

    The control is computed from the current estimates, then the estimator
    states advance one Euler step, so the first adaptive step from reference
    initial estimates matches the baseline output exactly.
    """
    if mode not in ("adaptive", "baseline"):
        raise ConfigurationError(f"unknown controller mode: {mode!r}")
    adaptive = mode == "adaptive"
    n = params.n

    errors = payload_errors(setpoint.R_d, state.R, setpoint.Om_d, state.Om,
                            setpoint.x_d, setpoint.v_d, state.x, state.v)
    E = np.stack([errors.e_x, errors.e_v], axis=1)
    x_R = np.stack([errors.e_R, errors.e_Om], axis=1)

    hx = [rbf_activation(E[j], cs.nets_x[j]) for j in range(3)]
    hR = [rbf_activation(x_R[j], cs.nets_R[j]) for j in range(3)]
    if adaptive:
        m_bar, J_bar = cs.m_bar, cs.J_bar
        phi_x_bar = np.array([cs.nets_x[j].weights @ hx[j] for j in range(3)])
        phi_R_bar = np.array([cs.nets_R[j].weights @ hR[j] for j in range(3)])
    else:
        m_bar = np.full(3, params.m0_ref)
        J_bar = np.diag(params.J0_ref)
        phi_x_bar = np.zeros(3)
        phi_R_bar = np.zeros(3)
    cs.phi_x_est = phi_x_bar
    cs.phi_R_est = phi_R_bar

    U_x = translational_control(errors, setpoint, m_bar, phi_x_bar, gains, params.g)
    U_R = rotational_control(errors, state, setpoint, J_bar, phi_R_bar, gains)
    F_d, M_d = first_level_control(U_x, U_R, cs, state, params)

    mu_d = allocate_cable_forces(F_d, M_d, state.R, params)

    if cs.q_d_prev is None:
        cs.q_d_prev = state.q.copy()
        cs.qd_dot_f = np.zeros((n, 3))
        cs.om_d_dot_f = np.zeros((n, 3))
        cs.Om_qd_f = np.zeros((n, 3))
        cs.dOm_qd_f = np.zeros((n, 3))
        q_d = desired_cable_direction(mu_d, state.q)
        qd_dot_raw = np.zeros((n, 3))
    else:
        q_d = desired_cable_direction(mu_d, cs.q_d_prev)
        qd_dot_raw = (q_d - cs.q_d_prev) / dt
    # dirty derivatives: every backward difference runs through a first-order
    # low-pass, otherwise single-step changes in the allocated tension inject
    # 1/dt spikes into the feedforward chain
    alpha = dt / (gains.deriv_tau + dt)
    cs.qd_dot_f += alpha * (qd_dot_raw - cs.qd_dot_f)
    qd_dot = cs.qd_dot_f

    cable_errs = []
    om_d_all = np.empty((n, 3))
    for i in range(n):
        ce = cable_errors(q_d[i], qd_dot[i], state.q[i], state.om[i])
        om_d_all[i] = ce.om_d
        cable_errs.append(ce)
    # om_d itself is only meaningful from the second call on (it needs a
    # q_d difference), so its own difference needs one more call to warm up
    if cs.steps < 2:
        om_d_dot_raw = np.zeros((n, 3))
    else:
        om_d_dot_raw = (om_d_all - cs.om_d_prev) / dt
    cs.om_d_dot_f += alpha * (om_d_dot_raw - cs.om_d_dot_f)
    om_d_dot = cs.om_d_dot_f
    for i in range(n):
        cable_errs[i].om_d_dot = om_d_dot[i]

    # attachment accelerations from the commanded payload motion
    a = connection_acceleration(state, setpoint.a_d, setpoint.dOm_d, params)

    mu = np.einsum("ij,ij->i", state.q, mu_d)[:, None] * state.q
    u_par = parallel_control_component(mu, state, a, params)
    u_perp = np.empty((n, 3))
    for i in range(n):
        u_perp[i] = cable_attitude_control(cable_errs[i], state.q[i], state.om[i],
                                           a[i], params.m_q[i], params.l[i], gains)
    u = u_par + u_perp

    # inner attitude loop with finite-differenced attitude setpoints
    R_qd = np.empty((n, 3, 3))
    f = np.empty(n)
    M_q = np.empty((n, 3))
    first = cs.R_qd_prev is None
    if first:
        cs.R_qd_prev = np.empty((n, 3, 3))
        cs.Om_qd_prev = np.zeros((n, 3))
    Om_qd_raw = np.zeros((n, 3))
    for i in range(n):
        prev_col = cs.R_qd_prev[i][:, 2] if not first else state.R_q[i][:, 2]
        R_qd[i] = desired_quad_attitude(u[i], prev_col)
        if not first:
            Rd_dot = (R_qd[i] - cs.R_qd_prev[i]) / dt
            Om_qd_raw[i] = skew_part_vee(R_qd[i].T @ Rd_dot)
    cs.Om_qd_f += alpha * (Om_qd_raw - cs.Om_qd_f)
    Om_qd = cs.Om_qd_f.copy()
    # same warmup staging as om_d_dot: Om_qd needs one attitude difference
    # before its own difference is trustworthy
    if cs.steps < 2:
        dOm_qd_raw = np.zeros((n, 3))
    else:
        dOm_qd_raw = (Om_qd - cs.Om_qd_prev) / dt
    cs.dOm_qd_f += alpha * (dOm_qd_raw - cs.dOm_qd_f)
    for i in range(n):
        f[i], M_q[i] = quadrotor_attitude_control(
            u[i], state.R_q[i], state.Om_q[i], params.J_q[i],
            R_qd[i], Om_qd[i], cs.dOm_qd_f[i], gains)

    out = ControlOutput(F_d=F_d, M_d=M_d, mu_d=mu_d, mu=mu, u=u,
                        u_par=u_par, u_perp=u_perp, f=f, M_q=M_q, R_qd=R_qd)

    # estimator updates (after the control is formed)
    if adaptive:
        cs.m_bar = update_mass_estimate(cs.m_bar, E, U_x, gains, params.max_m0, dt)
        cs.J_bar = update_inertia_estimate(cs.J_bar, errors.e_Om, U_R, gains,
                                           np.diag(params.max_J0), dt)
        update_weights(cs, E, errors.e_Om, hx, hR, gains, dt)
    update_disturbance_estimates(cs, errors, cable_errs, state, gains, params, dt)

    cs.q_d_prev = q_d
    cs.om_d_prev = om_d_all
    cs.R_qd_prev = R_qd
    cs.Om_qd_prev = Om_qd
    cs.steps += 1
    return out, errors, cable_errs
