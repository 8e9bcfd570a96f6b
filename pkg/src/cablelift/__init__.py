"""cablelift: multi-quadrotor cable-suspended payload transport.

Disturbance-augmented rigid-body/cable dynamics, an adaptive-neuro geometric
controller (online mass/inertia adaptation, RBF disturbance-dynamics learning,
integral disturbance compensation), a fixed-step RK3 simulator, and an
experiment harness with baseline-vs-adaptive comparison groups.
"""
from .controller import (ControllerGains, ControllerState, RbfNetwork,
                         Setpoint, initial_controller_state, step_controller)
from .disturbances import DisturbanceProfile, SignalSpec
from .dynamics import (ControlOutput, DisturbanceSample, SystemParams,
                       SystemState, allocate_cable_forces, system_derivative)
from .errors import ConfigurationError, DivergenceError
from .geometry import (CableErrors, PayloadErrors, cable_errors, hat,
                       payload_errors, project_parallel,
                       project_perpendicular, renormalize_rotation, vee)
from .harness import Metrics, compare, compute_metrics, run, write_outputs
from .integrator import IntegratorConfig, Trajectory, rk3_step, simulate
from .scenarios import (Scenario, equilibrium_state, group_a, group_b,
                        group_c, load_scenario, lyapunov_probe)

__version__ = "0.1.0"

__all__ = [
    "CableErrors", "ConfigurationError", "ControlOutput", "ControllerGains",
    "ControllerState", "DisturbanceProfile", "DisturbanceSample",
    "DivergenceError", "IntegratorConfig", "Metrics", "PayloadErrors",
    "RbfNetwork", "Scenario", "Setpoint", "SignalSpec", "SystemParams",
    "SystemState", "Trajectory", "allocate_cable_forces", "cable_errors",
    "compare", "compute_metrics", "equilibrium_state", "group_a", "group_b",
    "group_c", "hat", "initial_controller_state", "load_scenario",
    "lyapunov_probe", "payload_errors", "project_parallel",
    "project_perpendicular", "renormalize_rotation", "rk3_step", "run",
    "simulate", "step_controller", "system_derivative", "vee",
    "write_outputs",
]
