"""SO(3) / S^2 primitives and tracking-error maps.

All functions are pure and operate on plain numpy arrays: vectors are shape
(3,), matrices shape (3, 3). Batched variants accept leading axes where noted.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

SKEW_TOL = 1e-9
ROTATION_TOL = 1e-3


def cross(a, b):
    """Cross product for (..., 3) arrays.

    Same arithmetic as np.cross, without its generic axis-moving machinery;
    the simulation loop calls this tens of thousands of times per second.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = a.shape if a.shape == b.shape else np.broadcast_shapes(a.shape, b.shape)
    out = np.empty(shape)
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def hat(v):
    """Skew-symmetric matrix such that hat(v) @ w == cross(v, w).

    Accepts (..., 3) and returns (..., 3, 3).
    """
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape + (3,))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(M, tol=SKEW_TOL):
    """Inverse of hat. Raises ValueError if M is not skew-symmetric within tol."""
    M = np.asarray(M, dtype=float)
    if np.max(np.abs(M + M.T)) > tol:
        raise ValueError("vee: matrix is not skew-symmetric within tolerance")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def skew_part_vee(M):
    """vee of the skew-symmetric part of M (no skewness check)."""
    A = 0.5 * (M - M.T)
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def project_parallel(q, v):
    """Component of v along unit vector q: (q (x) q) v."""
    return np.dot(q, v) * q


def project_perpendicular(q, v):
    """Component of v orthogonal to unit vector q."""
    return v - np.dot(q, v) * q


def normalize(v):
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def renormalize_rotation(R):
    """Project R onto the nearest matrix in SO(3) (polar decomposition via SVD).

    Inputs farther than ROTATION_TOL from orthogonality, or with negative
    determinant, indicate a diverged simulation and raise DivergenceError.
    """
    R = np.asarray(R, dtype=float)
    if not np.all(np.isfinite(R)):
        raise DivergenceError("rotation matrix has non-finite entries")
    if np.max(np.abs(R.T @ R - np.eye(3))) > ROTATION_TOL:
        raise DivergenceError("rotation matrix drifted too far from SO(3)")
    if np.linalg.det(R) <= 0.0:
        raise DivergenceError("rotation matrix is a reflection")
    U, _, Vt = np.linalg.svd(R)
    D = np.diag([1.0, 1.0, np.linalg.det(U @ Vt)])
    return U @ D @ Vt


def renormalize_rotations(Rs):
    """Batched renormalize_rotation for an (..., 3, 3) stack."""
    Rs = np.asarray(Rs, dtype=float)
    if not np.all(np.isfinite(Rs)):
        raise DivergenceError("rotation stack has non-finite entries")
    RtR = np.einsum("...ji,...jk->...ik", Rs, Rs)
    if np.max(np.abs(RtR - np.eye(3))) > ROTATION_TOL:
        raise DivergenceError("rotation stack drifted too far from SO(3)")
    if np.any(np.linalg.det(Rs) <= 0.0):
        raise DivergenceError("rotation stack contains a reflection")
    U, _, Vt = np.linalg.svd(Rs)
    det = np.linalg.det(np.einsum("...ij,...jk->...ik", U, Vt))
    D = np.zeros_like(Rs)
    D[..., 0, 0] = 1.0
    D[..., 1, 1] = 1.0
    D[..., 2, 2] = det
    return np.einsum("...ij,...jk,...kl->...il", U, D, Vt)


@dataclass
class PayloadErrors:
    """Payload tracking errors: position, velocity, attitude, angular rate."""

    e_x: np.ndarray     # m
    e_v: np.ndarray     # m/s
    e_R: np.ndarray     # dimensionless, components in [-1, 1]
    e_Om: np.ndarray    # rad/s
    psi_R: float        # attitude error function, in [0, 3]


@dataclass
class CableErrors:
    """Cable direction tracking errors for one cable."""

    e_q: np.ndarray
    e_om: np.ndarray
    psi_q: float        # 1 - q . q_d, in [0, 2]
    q_d: np.ndarray
    om_d: np.ndarray        # rad/s
    om_d_dot: np.ndarray = None   # rad/s^2, filled by the controller (finite difference)


def payload_errors(R_d, R, Om_d, Om, x_d, v_d, x, v):
    """Geometric tracking errors of the payload pose.

    e_R  = 1/2 (R_d^T R - R^T R_d)^vee
    e_Om = Om - R^T R_d Om_d
    psi_R = 1/2 tr[I - R_d^T R]
    """
    A = R_d.T @ R
    e_R = 0.5 * np.array([A[2, 1] - A[1, 2], A[0, 2] - A[2, 0], A[1, 0] - A[0, 1]])
    e_Om = Om - A.T @ Om_d
    psi_R = 0.5 * np.trace(np.eye(3) - A)
    return PayloadErrors(e_x=x - x_d, e_v=v - v_d, e_R=e_R, e_Om=e_Om, psi_R=psi_R)


def cable_errors(q_d, qd_dot, q, om):
    """Tracking errors of one cable direction on S^2.

    e_q  = q_d x q
    om_d = q_d x qd_dot
    e_om = om + hat(q)^2 om_d
    psi_q = 1 - q . q_d
    """
    e_q = cross(q_d, q)
    om_d = cross(q_d, qd_dot)
    e_om = om + np.dot(q, om_d) * q - om_d
    psi_q = 1.0 - np.dot(q, q_d)
    return CableErrors(e_q=e_q, e_om=e_om, psi_q=psi_q, q_d=q_d, om_d=om_d,
                       om_d_dot=np.zeros(3))
