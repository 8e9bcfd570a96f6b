"""Runtime Lyapunov bookkeeping.

These terms are diagnostics only: they are evaluated with the true plant
parameters and the true disturbances, which the simulation harness knows but
the controller does not. The optimal network weights for the default zero
augmented-disturbance channels are zero, so the weight-error terms reduce to
the current weight norms.
"""
import numpy as np


def lyapunov_terms(errors, cable_errs, cs, gains, params, dist, phi_true=None):
    """Return (V_x, V_R, V_q, V_D) for one instant.

    V_x: translational error quadratic + mass-estimate error + weight error.
    V_R: attitude error function + angular-rate/inertia/weight errors.
    V_q: cable direction/rate errors with the cross coupling term.
    V_D: disturbance estimation errors on every force/moment channel.
    """
    E = np.stack([errors.e_x, errors.e_v], axis=1)
    m_tilde = 1.0 / params.m0 - 1.0 / cs.m_bar
    V_x = 0.0
    for j in range(3):
        V_x += 0.5 * E[j] @ gains.P[j] @ E[j]
        V_x += 0.5 * gains.eta_m * m_tilde[j] ** 2
        V_x += 0.5 / gains.gamma_x[j] * float(cs.nets_x[j].weights @ cs.nets_x[j].weights)

    J_diag = np.diag(params.J0)
    J_tilde = 1.0 / J_diag - 1.0 / cs.J_bar
    V_R = gains.k_R0 * errors.psi_R + 0.5 * float(errors.e_Om @ errors.e_Om)
    for j in range(3):
        V_R += 0.5 * gains.eta_J * J_tilde[j] ** 2
        V_R += 0.5 / gains.gamma_R[j] * float(cs.nets_R[j].weights @ cs.nets_R[j].weights)

    V_q = 0.0
    for ce in cable_errs:
        V_q += 0.5 * float(ce.e_om @ ce.e_om) + gains.k_q * ce.psi_q \
            + gains.c_q * float(ce.e_q @ ce.e_om)

    d_x0_t = dist.d_x0 - cs.d_x0_est
    d_R0_t = dist.d_R0 - cs.d_R0_est
    d_xq_t = dist.d_xq - cs.d_xq_est
    V_D = 0.5 / gains.h_x0 * float(d_x0_t @ d_x0_t) \
        + 0.5 / gains.h_R0 * float(d_R0_t @ d_R0_t) \
        + 0.5 / gains.h_xi * float(np.sum(d_xq_t * d_xq_t))
    return V_x, V_R, V_q, V_D
