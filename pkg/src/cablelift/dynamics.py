"""Equations of motion for the cable-suspended payload system.

The plant couples a rigid payload, n taut massless cables, and n quadrotors.
Disturbance forces/moments act on every body, and two extra acceleration-level
disturbance channels (phi_x, phi_R) act on the payload. The desired net wrench
(F_d, M_d) is distributed to per-cable tension commands by a minimum-norm
allocation.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .geometry import E3, cross, hat

GRAVITY = 9.81  # m/s^2


def _check_spd(M, name):
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise ConfigurationError(f"{name} must be a 3x3 matrix")
    if np.max(np.abs(M - M.T)) > 1e-9:
        raise ConfigurationError(f"{name} must be symmetric")
    if np.min(np.linalg.eigvalsh(M)) <= 0.0:
        raise ConfigurationError(f"{name} must be positive-definite")
    return M


@dataclass
class SystemParams:
    """Physical constants of the plant plus the controller's reference model.

    rho[i] is the i-th cable attachment point in the payload body frame.
    The reference pair (m0_ref, J0_ref) is what the controller believes;
    (max_m0, max_J0) bound the online estimates.
    """

    n: int
    m0: float                 # kg
    J0: np.ndarray            # kg m^2, 3x3
    m_q: np.ndarray           # kg, per quadrotor
    J_q: np.ndarray           # kg m^2, (n, 3, 3)
    l: np.ndarray             # m, cable lengths
    rho: np.ndarray           # m, (n, 3) attachment points in payload frame
    g: float = GRAVITY
    m0_ref: float = 1.0       # kg
    J0_ref: np.ndarray = field(default_factory=lambda: np.diag([0.125, 0.125, 1.0 / 6.0]))
    max_m0: float = 6.0       # kg
    max_J0: np.ndarray = field(default_factory=lambda: np.diag([0.75, 0.75, 1.0]))

    # derived, filled in __post_init__
    alloc_P: np.ndarray = field(init=False, repr=False)       # 6 x 3n
    alloc_gram_inv: np.ndarray = field(init=False, repr=False)  # (P P^T)^-1

    def __post_init__(self):
        self.J0 = _check_spd(self.J0, "J0")
        self.J0_ref = _check_spd(self.J0_ref, "J0_ref")
        self.max_J0 = _check_spd(self.max_J0, "max_J0")
        self.m_q = np.asarray(self.m_q, dtype=float).reshape(self.n)
        self.J_q = np.asarray(self.J_q, dtype=float).reshape(self.n, 3, 3)
        self.l = np.asarray(self.l, dtype=float).reshape(self.n)
        self.rho = np.asarray(self.rho, dtype=float).reshape(self.n, 3)
        for name, arr in (("m0", [self.m0]), ("m_q", self.m_q), ("l", self.l)):
            if np.any(np.asarray(arr) <= 0.0):
                raise ConfigurationError(f"{name} entries must be positive")
        for i in range(self.n):
            _check_spd(self.J_q[i], f"J_q[{i}]")
        # wide allocation matrix [I ... I; hat(rho_1) ... hat(rho_n)]
        P = np.zeros((6, 3 * self.n))
        for i in range(self.n):
            P[0:3, 3 * i:3 * i + 3] = np.eye(3)
            P[3:6, 3 * i:3 * i + 3] = hat(self.rho[i])
        gram = P @ P.T
        if np.linalg.matrix_rank(gram, tol=1e-9) < 6:
            raise ConfigurationError(
                "cable attachment geometry is rank-deficient: the 6x3n "
                "allocation matrix must have rank 6"
            )
        self.alloc_P = P
        self.alloc_gram_inv = np.linalg.inv(gram)
        self.J0_inv = np.linalg.inv(self.J0)
        self.J_q_inv = np.linalg.inv(self.J_q)


@dataclass
class SystemState:
    """Full continuous state: payload pose/twist, cable directions/rates,
    quadrotor attitudes/rates."""

    x: np.ndarray        # (3,) payload position, m
    v: np.ndarray        # (3,) payload velocity, m/s
    R: np.ndarray        # (3,3) payload attitude
    Om: np.ndarray       # (3,) payload angular velocity, rad/s
    q: np.ndarray        # (n,3) cable unit vectors (quadrotor -> attachment)
    om: np.ndarray       # (n,3) cable angular velocities, tangent to q
    R_q: np.ndarray      # (n,3,3) quadrotor attitudes
    Om_q: np.ndarray     # (n,3) quadrotor angular velocities, rad/s

    def copy(self):
        return SystemState(self.x.copy(), self.v.copy(), self.R.copy(),
                           self.Om.copy(), self.q.copy(), self.om.copy(),
                           self.R_q.copy(), self.Om_q.copy())


def state_size(n):
    return 18 + 18 * n


def pack_state(s):
    n = s.q.shape[0]
    y = np.empty(state_size(n))
    y[0:3] = s.x
    y[3:6] = s.v
    y[6:15] = s.R.reshape(9)
    y[15:18] = s.Om
    k = 18
    y[k:k + 3 * n] = s.q.reshape(-1)
    k += 3 * n
    y[k:k + 3 * n] = s.om.reshape(-1)
    k += 3 * n
    y[k:k + 9 * n] = s.R_q.reshape(-1)
    k += 9 * n
    y[k:k + 3 * n] = s.Om_q.reshape(-1)
    return y


def unpack_state(y, n):
    k = 18
    q = y[k:k + 3 * n].reshape(n, 3)
    k += 3 * n
    om = y[k:k + 3 * n].reshape(n, 3)
    k += 3 * n
    R_q = y[k:k + 9 * n].reshape(n, 3, 3)
    k += 9 * n
    Om_q = y[k:k + 3 * n].reshape(n, 3)
    return SystemState(x=y[0:3], v=y[3:6], R=y[6:15].reshape(3, 3),
                       Om=y[15:18], q=q, om=om, R_q=R_q, Om_q=Om_q)


@dataclass
class DisturbanceSample:
    """Raw disturbance channels at one instant. The parallel/perpendicular
    split of the per-quadrotor forces is taken against the current cable
    directions via decompose()."""

    d_x0: np.ndarray     # (3,) N
    d_R0: np.ndarray     # (3,) N m
    d_xq: np.ndarray     # (n,3) N
    d_Rq: np.ndarray     # (n,3) N m

    def decompose(self, q):
        """Return (parallel, perpendicular) parts of d_xq w.r.t. cable axes q."""
        proj = np.einsum("ij,ij->i", q, self.d_xq)[:, None] * q
        return proj, self.d_xq - proj


@dataclass
class ControlOutput:
    """Every level of the control cascade for one step."""

    F_d: np.ndarray      # (3,) N
    M_d: np.ndarray      # (3,) N m
    mu_d: np.ndarray     # (n,3) desired cable tensions, N
    mu: np.ndarray       # (n,3) realized tensions (parallel projection), N
    u: np.ndarray        # (n,3) quadrotor control forces, N
    u_par: np.ndarray    # (n,3)
    u_perp: np.ndarray   # (n,3)
    f: np.ndarray        # (n,) scalar thrusts, N
    M_q: np.ndarray      # (n,3) quadrotor control moments, N m
    R_qd: np.ndarray     # (n,3,3) desired quadrotor attitudes (diagnostic)


def allocate_cable_forces(F_d, M_d, R0, params):
    """Minimum-norm tension commands mu_d (inertial frame, (n,3)).

    Solves the wide system [I..I; hat(rho)..] mu_body = [R0^T F_d; M_d] for
    the smallest stacked body-frame solution via the precomputed normal
    equations, then rotates each block back with R0.
    """
    b = np.concatenate([R0.T @ F_d, M_d])
    mu_body = params.alloc_P.T @ (params.alloc_gram_inv @ b)
    return mu_body.reshape(params.n, 3) @ R0.T


def connection_acceleration(state, x_dd, Om_dot, params):
    """Inertial accelerations (plus gravity offset) of all attachment points.

    a_i = x_dd + g e3 + R0 hat(Om)^2 rho_i - R0 hat(rho_i) Om_dot, shape (n,3).
    """
    R, Om = state.R, state.Om
    centripetal = cross(Om, cross(Om, params.rho))
    euler = cross(params.rho, Om_dot)  # hat(rho_i) Om_dot
    return x_dd + params.g * E3 + (centripetal - euler) @ R.T


def parallel_control_component(mu, state, a, params):
    """Cable-parallel part of the quadrotor control forces, (n,3).

    u_par_i = mu_i + m_i l_i ||om_i||^2 q_i + m_i (q_i (x) q_i) a_i.

    The sign of the last term follows from projecting the cable-constrained
    quadrotor translational dynamics onto q_i; it also gives the static force
    balance sum f_i = (m0 + sum m_i) g at hover.
    """
    q, om = state.q, state.om
    ml = params.m_q * params.l
    centrifugal = (ml * np.einsum("ij,ij->i", om, om))[:, None] * q
    par_acc = params.m_q[:, None] * np.einsum("ij,ij->i", q, a)[:, None] * q
    return mu + centrifugal + par_acc


def system_derivative(state, ctrl, dist, phi_x, phi_R, params):
    """Time derivative of the full state under held controls and disturbances.

    The realized tensions mu_i = (q_i (x) q_i) mu_i_d and the
    parallel/perpendicular disturbance split are re-evaluated at the
    instantaneous cable directions so the model stays consistent inside
    integrator stages. Returns a SystemState of derivatives.
    """
    q, om = state.q, state.om
    R0, Om0 = state.R, state.Om

    d_par, _ = dist.decompose(q)
    mu = np.einsum("ij,ij->i", q, ctrl.mu_d)[:, None] * q
    dmu = mu - ctrl.mu_d

    # tension-deviation couplings
    Y_x = dmu.sum(axis=0) / params.m0
    torque_dev = cross(params.rho, dmu @ R0)      # sum_i hat(rho_i) R0^T dmu_i
    Y_R = params.J0_inv @ torque_dev.sum(axis=0)

    x_dd = (ctrl.F_d + dist.d_x0 + d_par.sum(axis=0)) / params.m0 \
        - params.g * E3 + Y_x + phi_x
    par_torque = cross(params.rho, d_par @ R0).sum(axis=0)
    Om0_dot = params.J0_inv @ (ctrl.M_d - cross(Om0, params.J0 @ Om0)
                               + dist.d_R0 + par_torque) + Y_R + phi_R

    a = connection_acceleration(state, x_dd, Om0_dot, params)

    # cable rates: q_dot = om x q; om_dot from the perpendicular force balance
    q_dot = cross(om, q)
    om_dot = cross(q, a) / params.l[:, None] \
        - cross(q, ctrl.u + dist.d_xq) / (params.m_q * params.l)[:, None]

    R0_dot = R0 @ hat(Om0)

    # quadrotor attitude dynamics
    JOm = np.einsum("ijk,ik->ij", params.J_q, state.Om_q)
    Om_q_dot = np.einsum("ijk,ik->ij", params.J_q_inv,
                         ctrl.M_q - cross(state.Om_q, JOm) + dist.d_Rq)
    R_q_dot = np.einsum("ijk,ikl->ijl", state.R_q, hat(state.Om_q))

    return SystemState(x=state.v.copy(), v=x_dd, R=R0_dot, Om=Om0_dot,
                       q=q_dot, om=om_dot, R_q=R_q_dot, Om_q=Om_q_dot)
