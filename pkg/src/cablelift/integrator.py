"""Fixed-step third-order Runge-Kutta integration of the coupled plant.

The controller and all estimator states advance once per step at the step
boundary; the resulting controls and the disturbance sample are held constant
across the three stages (zero-order hold). After each step the manifold states
are renormalized: rotations by polar projection, cable directions by scaling,
cable rates by tangent projection.
"""
from dataclasses import dataclass

import numpy as np

from . import diagnostics
from .controller import initial_controller_state, step_controller
from .dynamics import pack_state, system_derivative, unpack_state
from .errors import ConfigurationError, DivergenceError
from .geometry import renormalize_rotations


@dataclass
class IntegratorConfig:
    dt: float = 1e-3          # s
    t_end: float = 30.0       # s
    renormalize: bool = True
    dt_log: float = 0.01      # s, trajectory decimation

    def __post_init__(self):
        if not 0.0 < self.dt <= 0.01:
            raise ConfigurationError("dt must be in (0, 0.01] s")
        if self.t_end <= 0.0:
            raise ConfigurationError("t_end must be positive")
        if self.dt_log < self.dt:
            raise ConfigurationError("dt_log must be >= dt")


def rk3_step(f, y, t, dt):
    """One Bogacki-Shampine third-order step.

    k1 = f(t, y); k2 = f(t + dt/2, y + dt/2 k1); k3 = f(t + 3dt/4, y + 3dt/4 k2)
    y_next = y + dt (2 k1 + 3 k2 + 4 k3) / 9
    """
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.75 * dt, y + 0.75 * dt * k2)
    y_next = y + dt * (2.0 * k1 + 3.0 * k2 + 4.0 * k3) / 9.0
    if not np.all(np.isfinite(y_next)):
        raise DivergenceError("non-finite state after integration step", t=t)
    return y_next


@dataclass
class Trajectory:
    """Time-indexed record of one simulation run, decimated to dt_log."""

    t: np.ndarray = None
    x: np.ndarray = None
    v: np.ndarray = None
    R: np.ndarray = None
    Om: np.ndarray = None
    q: np.ndarray = None
    om: np.ndarray = None
    e_x: np.ndarray = None
    e_v: np.ndarray = None
    e_R: np.ndarray = None
    e_Om: np.ndarray = None
    psi_R: np.ndarray = None
    e_q: np.ndarray = None
    e_om: np.ndarray = None
    psi_q: np.ndarray = None
    m_bar: np.ndarray = None
    J_bar: np.ndarray = None
    phi_x_est: np.ndarray = None
    phi_R_est: np.ndarray = None
    d_x0_est: np.ndarray = None
    d_R0_est: np.ndarray = None
    d_xq_est: np.ndarray = None
    d_x0: np.ndarray = None
    d_R0: np.ndarray = None
    F_d: np.ndarray = None
    M_d: np.ndarray = None
    f: np.ndarray = None
    mu_d: np.ndarray = None
    V_x: np.ndarray = None
    V_R: np.ndarray = None
    V_q: np.ndarray = None
    V_D: np.ndarray = None
    V: np.ndarray = None
    compression_steps: int = 0
    max_drift_pre: float = 0.0      # manifold residual before renormalization
    max_drift_post: float = 0.0     # and after
    # cap bookkeeping for the bounded adaptation laws: worst excursion above
    # the preset maxima, and the number of steps on which an estimate that was
    # already above its cap grew further (must stay zero: excursions are
    # allowed for a single growth step from below the cap only)
    max_m_overshoot: float = 0.0
    max_J_overshoot: float = 0.0
    capped_growth_steps: int = 0
    diverged: bool = False
    divergence_time: float = None
    n_records: int = 0

    def truncate(self):
        """Drop unwritten tail rows after an aborted run."""
        k = self.n_records
        for name, val in self.__dict__.items():
            if isinstance(val, np.ndarray) and val.shape and val.shape[0] >= k:
                setattr(self, name, val[:k])


def _alloc_trajectory(K, n):
    tr = Trajectory()
    shapes = {
        "t": (K,), "x": (K, 3), "v": (K, 3), "R": (K, 3, 3), "Om": (K, 3),
        "q": (K, n, 3), "om": (K, n, 3),
        "e_x": (K, 3), "e_v": (K, 3), "e_R": (K, 3), "e_Om": (K, 3), "psi_R": (K,),
        "e_q": (K, n, 3), "e_om": (K, n, 3), "psi_q": (K, n),
        "m_bar": (K, 3), "J_bar": (K, 3),
        "phi_x_est": (K, 3), "phi_R_est": (K, 3),
        "d_x0_est": (K, 3), "d_R0_est": (K, 3), "d_xq_est": (K, n, 3),
        "d_x0": (K, 3), "d_R0": (K, 3),
        "F_d": (K, 3), "M_d": (K, 3), "f": (K, n), "mu_d": (K, n, 3),
        "V_x": (K,), "V_R": (K,), "V_q": (K,), "V_D": (K,), "V": (K,),
    }
    for name, shape in shapes.items():
        setattr(tr, name, np.zeros(shape))
    return tr


def _renormalize(state):
    """Project the state back to its manifolds; returns (pre, post) residuals."""
    qn = np.linalg.norm(state.q, axis=1)
    pre = max(
        np.max(np.abs(state.R.T @ state.R - np.eye(3))),
        np.max(np.abs(np.einsum("nji,njk->nik", state.R_q, state.R_q) - np.eye(3))),
        np.max(np.abs(qn - 1.0)),
    )
    state.R = renormalize_rotations(state.R)
    state.R_q = renormalize_rotations(state.R_q)
    state.q = state.q / qn[:, None]
    # keep cable rates tangent
    state.om = state.om - np.einsum("ij,ij->i", state.q, state.om)[:, None] * state.q
    qn2 = np.linalg.norm(state.q, axis=1)
    post = max(
        np.max(np.abs(state.R.T @ state.R - np.eye(3))),
        np.max(np.abs(qn2 - 1.0)),
    )
    return pre, post


def _record(tr, k, t, state, errors, cable_errs, cs, ctrl, dist, gains, params):
    tr.t[k] = t
    tr.x[k] = state.x
    tr.v[k] = state.v
    tr.R[k] = state.R
    tr.Om[k] = state.Om
    tr.q[k] = state.q
    tr.om[k] = state.om
    tr.e_x[k] = errors.e_x
    tr.e_v[k] = errors.e_v
    tr.e_R[k] = errors.e_R
    tr.e_Om[k] = errors.e_Om
    tr.psi_R[k] = errors.psi_R
    for i, ce in enumerate(cable_errs):
        tr.e_q[k, i] = ce.e_q
        tr.e_om[k, i] = ce.e_om
        tr.psi_q[k, i] = ce.psi_q
    tr.m_bar[k] = cs.m_bar
    tr.J_bar[k] = cs.J_bar
    tr.phi_x_est[k] = cs.phi_x_est
    tr.phi_R_est[k] = cs.phi_R_est
    tr.d_x0_est[k] = cs.d_x0_est
    tr.d_R0_est[k] = cs.d_R0_est
    tr.d_xq_est[k] = cs.d_xq_est
    tr.d_x0[k] = dist.d_x0
    tr.d_R0[k] = dist.d_R0
    tr.F_d[k] = ctrl.F_d
    tr.M_d[k] = ctrl.M_d
    tr.f[k] = ctrl.f
    tr.mu_d[k] = ctrl.mu_d
    Vx, VR, Vq, VD = diagnostics.lyapunov_terms(errors, cable_errs, cs, gains,
                                                params, dist)
    tr.V_x[k], tr.V_R[k], tr.V_q[k], tr.V_D[k] = Vx, VR, Vq, VD
    tr.V[k] = Vx + VR + Vq + VD
    tr.n_records = k + 1


def simulate(scenario):
    """Run one scenario to completion (or divergence) and return a Trajectory.

    Deterministic: identical scenarios produce bitwise-identical trajectories.
    """
    params = scenario.params
    gains = scenario.gains
    cfg = scenario.integrator
    profile = scenario.profile
    n = params.n
    dt = cfg.dt

    n_steps = int(round(cfg.t_end / dt))
    log_every = max(1, int(round(cfg.dt_log / dt)))
    K = n_steps // log_every + 1
    tr = _alloc_trajectory(K, n)

    state = scenario.initial_state.copy()
    cs = scenario.initial_controller_state()
    setpoint_at = scenario.setpoint

    k_log = 0
    t = 0.0
    for step in range(n_steps + 1):
        t = step * dt
        dist, phi_x, phi_R = profile(t)
        sp = setpoint_at(t)
        m_prev, J_prev = cs.m_bar.copy(), cs.J_bar.copy()
        try:
            ctrl, errors, cable_errs = step_controller(
                state, sp, cs, gains, params, dt, mode=scenario.mode)
        except DivergenceError:
            tr.diverged = True
            tr.divergence_time = t
            break

        m_over = cs.m_bar - params.max_m0
        J_over = cs.J_bar - np.diag(params.max_J0)
        tr.max_m_overshoot = max(tr.max_m_overshoot, float(m_over.max()))
        tr.max_J_overshoot = max(tr.max_J_overshoot, float(J_over.max()))
        if (np.any((m_over > 0.0) & (m_prev > params.max_m0)
                   & (cs.m_bar > m_prev))
                or np.any((J_over > 0.0) & (J_prev > np.diag(params.max_J0))
                          & (cs.J_bar > J_prev))):
            tr.capped_growth_steps += 1

        if np.any(np.einsum("ij,ij->i", state.q, ctrl.mu_d) > 0.0):
            tr.compression_steps += 1

        if step % log_every == 0:
            _record(tr, k_log, t, state, errors, cable_errs, cs, ctrl, dist,
                    gains, params)
            k_log += 1

        if step == n_steps:
            break

        def deriv(tt, y):
            s = unpack_state(y, n)
            ds = system_derivative(s, ctrl, dist, phi_x, phi_R, params)
            return pack_state(ds)

        try:
            y = rk3_step(deriv, pack_state(state), t, dt)
            state = unpack_state(y, n)
            if cfg.renormalize:
                pre, post = _renormalize(state)
                tr.max_drift_pre = max(tr.max_drift_pre, pre)
                tr.max_drift_post = max(tr.max_drift_post, post)
        except DivergenceError:
            tr.diverged = True
            tr.divergence_time = t
            break

    tr.truncate()
    return tr
