"""Experiment orchestration: run scenarios, reduce trajectories to metrics,
emit CSV/plot data, and run baseline-vs-adaptive comparisons."""
import os
from dataclasses import dataclass

import numpy as np

from .integrator import simulate
from .scenarios import DEFAULT_QUAD, load_scenario

STEADY_WINDOW = (15.0, 30.0)   # s, steady-state metric window


@dataclass
class Metrics:
    """Scalar summary of one run."""

    rms_e_x: float
    max_e_x: float
    rms_e_R: float
    max_e_R: float
    rms_e_Om: float
    max_e_Om: float
    steady_rms_e_x: float
    steady_rms_e_R: float
    steady_rms_e_Om: float
    m_bar_min: float
    m_bar_max: float
    J_bar_min: float
    J_bar_max: float
    compression_steps: int
    max_manifold_drift: float
    diverged: bool

    def as_dict(self):
        return dict(self.__dict__)


def _rms(x):
    return float(np.sqrt(np.mean(x ** 2))) if x.size else float("nan")


def compute_metrics(tr, window=STEADY_WINDOW):
    """Reduce a trajectory to summary metrics. The steady-state window is
    clipped to the trajectory and must contain at least 100 samples."""
    e_x = np.linalg.norm(tr.e_x, axis=1)
    e_R = np.linalg.norm(tr.e_R, axis=1)
    e_Om = np.linalg.norm(tr.e_Om, axis=1)
    t_end = tr.t[-1] if tr.t.size else 0.0
    lo, hi = max(0.0, window[0]), min(t_end, window[1])
    mask = (tr.t >= lo) & (tr.t <= hi)
    if mask.sum() < 100:
        mask = np.ones_like(tr.t, dtype=bool)
    return Metrics(
        rms_e_x=_rms(e_x), max_e_x=float(e_x.max(initial=0.0)),
        rms_e_R=_rms(e_R), max_e_R=float(e_R.max(initial=0.0)),
        rms_e_Om=_rms(e_Om), max_e_Om=float(e_Om.max(initial=0.0)),
        steady_rms_e_x=_rms(e_x[mask]),
        steady_rms_e_R=_rms(e_R[mask]),
        steady_rms_e_Om=_rms(e_Om[mask]),
        m_bar_min=float(tr.m_bar.min()), m_bar_max=float(tr.m_bar.max()),
        J_bar_min=float(tr.J_bar.min()), J_bar_max=float(tr.J_bar.max()),
        compression_steps=int(tr.compression_steps),
        max_manifold_drift=float(tr.max_drift_post),
        diverged=bool(tr.diverged),
    )


def run(scenario):
    """Simulate a scenario and compute its metrics."""
    tr = simulate(scenario)
    return tr, compute_metrics(tr)


_TRAJECTORY_COLUMNS = (
    [("t", "s")]
    + [(f"x_{a}", "m") for a in "xyz"]
    + [(f"v_{a}", "m_s") for a in "xyz"]
    + [(f"e_x_{a}", "m") for a in "xyz"]
    + [(f"e_v_{a}", "m_s") for a in "xyz"]
    + [(f"e_R_{a}", "1") for a in "xyz"]
    + [(f"e_Om_{a}", "rad_s") for a in "xyz"]
    + [("psi_R", "1")]
    + [(f"m_bar_{j}", "kg") for j in range(1, 4)]
    + [(f"J_bar_{j}", "kgm2") for j in range(1, 4)]
    + [(f"phi_x_est_{j}", "m_s2") for j in range(1, 4)]
    + [(f"phi_R_est_{j}", "rad_s2") for j in range(1, 4)]
    + [(f"d_x0_est_{a}", "N") for a in "xyz"]
    + [(f"d_R0_est_{a}", "Nm") for a in "xyz"]
    + [(f"F_d_{a}", "N") for a in "xyz"]
    + [(f"M_d_{a}", "Nm") for a in "xyz"]
    + [("V_x", "1"), ("V_R", "1"), ("V_q", "1"), ("V_D", "1"), ("V", "1")]
)


def _provenance_lines(scenario):
    p = scenario.params
    return [
        f"# scenario: {scenario.label}",
        f"# mode: {scenario.mode}",
        f"# n_quadrotors: {p.n}",
        f"# payload_mass_kg: {p.m0:.6g}",
        f"# payload_inertia_kgm2_diag: {np.diag(p.J0).tolist()}",
        f"# reference_mass_kg: {p.m0_ref:.6g}",
        f"# reference_inertia_kgm2_diag: {np.diag(p.J0_ref).tolist()}",
        f"# quadrotor_mass_kg: {p.m_q[0]:.6g}",
        f"# quadrotor_inertia_kgm2_diag: {np.diag(p.J_q[0]).tolist()}",
        f"# cable_length_m: {p.l[0]:.6g}",
        f"# attachment_radius_m: {DEFAULT_QUAD['radius']:.6g}",
        f"# dt_s: {scenario.integrator.dt:.6g}",
        f"# duration_s: {scenario.integrator.t_end:.6g}",
    ]


def _trajectory_matrix(tr):
    cols = [tr.t[:, None], tr.x, tr.v, tr.e_x, tr.e_v, tr.e_R, tr.e_Om,
            tr.psi_R[:, None], tr.m_bar, tr.J_bar, tr.phi_x_est, tr.phi_R_est,
            tr.d_x0_est, tr.d_R0_est, tr.F_d, tr.M_d,
            tr.V_x[:, None], tr.V_R[:, None], tr.V_q[:, None],
            tr.V_D[:, None], tr.V[:, None]]
    return np.hstack(cols)


def _write_csv(path, header_lines, column_names, matrix):
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(",".join(column_names) + "\n")
        for row in matrix:
            fh.write(",".join(format(v, ".12g") for v in row) + "\n")


def write_outputs(tr, metrics, out_dir, scenario):
    """Emit trajectory CSV, metrics summary, column schema, and per-figure
    plot-data CSVs. Returns the list of written paths."""
    os.makedirs(out_dir, exist_ok=True)
    prov = _provenance_lines(scenario)
    names = [f"{n}_{u}" for n, u in _TRAJECTORY_COLUMNS]
    written = []

    path = os.path.join(out_dir, "trajectory.csv")
    _write_csv(path, prov, names, _trajectory_matrix(tr))
    written.append(path)

    path = os.path.join(out_dir, "schema.txt")
    with open(path, "w") as fh:
        fh.write("trajectory.csv columns (name_unit), in order:\n")
        for n, u in _TRAJECTORY_COLUMNS:
            fh.write(f"  {n} [{u}]\n")
        fh.write("plot data files: position_error.csv, attitude_error.csv, "
                 "mass_estimate.csv, inertia_estimate.csv, lyapunov.csv\n")
    written.append(path)

    path = os.path.join(out_dir, "metrics.txt")
    with open(path, "w") as fh:
        for line in prov:
            fh.write(line + "\n")
        for key, val in metrics.as_dict().items():
            fh.write(f"{key} = {val}\n")
    written.append(path)

    plots = {
        "position_error.csv": (["t_s"] + [f"e_x_{a}_m" for a in "xyz"],
                               np.hstack([tr.t[:, None], tr.e_x])),
        "attitude_error.csv": (["t_s"] + [f"e_R_{a}_1" for a in "xyz"] + ["psi_R_1"],
                               np.hstack([tr.t[:, None], tr.e_R, tr.psi_R[:, None]])),
        "mass_estimate.csv": (["t_s"] + [f"m_bar_{j}_kg" for j in range(1, 4)]
                              + [f"phi_x_est_{j}_m_s2" for j in range(1, 4)],
                              np.hstack([tr.t[:, None], tr.m_bar, tr.phi_x_est])),
        "inertia_estimate.csv": (["t_s"] + [f"J_bar_{j}_kgm2" for j in range(1, 4)]
                                 + [f"phi_R_est_{j}_rad_s2" for j in range(1, 4)],
                                 np.hstack([tr.t[:, None], tr.J_bar, tr.phi_R_est])),
        "lyapunov.csv": (["t_s", "V_x", "V_R", "V_q", "V_D", "V"],
                         np.hstack([tr.t[:, None], tr.V_x[:, None], tr.V_R[:, None],
                                    tr.V_q[:, None], tr.V_D[:, None], tr.V[:, None]])),
    }
    for fname, (cols, mat) in plots.items():
        path = os.path.join(out_dir, fname)
        _write_csv(path, prov, cols, mat)
        written.append(path)
    return written


def compare(group, out_dir=None):
    """Run a comparison group in baseline and adaptive modes with identical
    setups and report the paired metrics plus the ordering verdict."""
    scenario = load_scenario(group) if isinstance(group, str) else group
    results = {}
    for mode in ("baseline", "adaptive"):
        sc = scenario.with_mode(mode)
        tr, metrics = run(sc)
        results[mode] = (sc, tr, metrics)
        if out_dir is not None:
            write_outputs(tr, metrics, os.path.join(out_dir, mode), sc)

    base = results["baseline"][2]
    adpt = results["adaptive"][2]
    report = {
        "label": scenario.label,
        "baseline": base.as_dict(),
        "adaptive": adpt.as_dict(),
        "adaptive_wins_e_x": adpt.steady_rms_e_x < base.steady_rms_e_x,
        "adaptive_wins_e_R": adpt.steady_rms_e_R < base.steady_rms_e_R,
        "e_x_improvement": 1.0 - adpt.steady_rms_e_x / base.steady_rms_e_x
        if base.steady_rms_e_x > 0 else float("nan"),
        "e_R_improvement": 1.0 - adpt.steady_rms_e_R / base.steady_rms_e_R
        if base.steady_rms_e_R > 0 else float("nan"),
    }

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "comparison.txt")
        with open(path, "w") as fh:
            fh.write(f"comparison group: {scenario.label}\n")
            fh.write(f"steady-state window: [{STEADY_WINDOW[0]}, {STEADY_WINDOW[1]}] s\n\n")
            keys = sorted(base.as_dict())
            width = max(len(k) for k in keys)
            fh.write(f"{'metric'.ljust(width)}  {'baseline':>14}  {'adaptive':>14}\n")
            for k in keys:
                b, a = base.as_dict()[k], adpt.as_dict()[k]
                fh.write(f"{k.ljust(width)}  {b!s:>14}  {a!s:>14}\n")
            fh.write("\nverdict:\n")
            fh.write(f"  adaptive wins steady RMS |e_x|: {report['adaptive_wins_e_x']}"
                     f" (improvement {report['e_x_improvement']:.1%})\n")
            fh.write(f"  adaptive wins steady RMS |e_R|: {report['adaptive_wins_e_R']}"
                     f" (improvement {report['e_R_improvement']:.1%})\n")
        report["report_path"] = path
    report["results"] = results
    return report
