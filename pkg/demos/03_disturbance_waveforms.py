"""Plot the disturbance waveforms used by the comparison experiments.

Group B applies an irregular multi-frequency payload force (product-chirp plus
sinusoid mix, equal to (1, 5, 1) N at t = 0); group C switches on a strong
10 N*m roll moment at t = 5 s. Every group additionally applies small
sinusoidal forces and moments at each quadrotor.

Usage: python demos/03_disturbance_waveforms.py [--out demo_out]
"""
import argparse
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cablelift.disturbances import (full_profile, payload_force_group_b,
                                    payload_moment_group_c)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_out")
    args = ap.parse_args()

    t = np.linspace(0.0, 30.0, 3000)
    b = np.array([payload_force_group_b()(tt) for tt in t])
    c = np.array([payload_moment_group_c()(tt) for tt in t])
    quad = np.array([full_profile(3)(tt)[0].d_xq[0] for tt in t])

    print(f"group B force at t=0: {b[0].tolist()} N")
    print(f"group C moment: zero until 5 s, peak {np.abs(c).max():.1f} N*m after")
    print(f"per-quadrotor force amplitude: {np.abs(quad).max():.2f} N")

    os.makedirs(args.out, exist_ok=True)
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    axes[0].plot(t, b)
    axes[0].set_ylabel("payload force [N]")
    axes[0].set_title("group B payload force")
    axes[0].legend(["x", "y", "z"], loc="upper right")
    axes[1].plot(t, c)
    axes[1].set_ylabel("payload moment [N m]")
    axes[1].set_title("group C payload moment (onset t = 5 s)")
    axes[2].plot(t, quad)
    axes[2].set_ylabel("quadrotor 1 force [N]")
    axes[2].set_xlabel("t [s]")
    axes[2].set_title("per-quadrotor baseline disturbance")
    path = os.path.join(args.out, "disturbance_waveforms.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
