"""Time-parameterized disturbance signal generators.

Every channel of the plant (payload force/moment, per-quadrotor force/moment,
and the acceleration-level payload channels phi_x, phi_R) is described by a
SignalSpec. Evaluation is a pure function of time, so repeated evaluation is
bitwise identical.
"""
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DisturbanceSample
from .errors import ConfigurationError

_KINDS = ("zero", "constant", "sinusoid", "product_chirp", "composite_sum")


@dataclass
class SignalSpec:
    """One 3-axis signal.

    sinusoid:       amplitude * sin(freq * (t - start) + phase), zero before start
    product_chirp:  amplitude * sin(sin(inner_freq * t + inner_phase) * t + phase)
    composite_sum:  elementwise sum of child specs
    """

    kind: str = "zero"
    amplitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    freq: np.ndarray = field(default_factory=lambda: np.zeros(3))      # rad/s
    phase: np.ndarray = field(default_factory=lambda: np.zeros(3))     # rad
    inner_freq: np.ndarray = field(default_factory=lambda: np.zeros(3))
    inner_phase: np.ndarray = field(default_factory=lambda: np.zeros(3))
    start: float = 0.0                                                  # s
    terms: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown signal kind {self.kind!r}")
        if self.start < 0.0:
            raise ConfigurationError("signal start time must be >= 0")
        for name in ("amplitude", "freq", "phase", "inner_freq", "inner_phase"):
            v = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (3,)).copy()
            if not np.all(np.isfinite(v)):
                raise ConfigurationError(f"signal {name} must be finite")
            setattr(self, name, v)

    def __call__(self, t):
        if self.kind == "zero":
            return np.zeros(3)
        if self.kind == "composite_sum":
            out = np.zeros(3)
            for term in self.terms:
                out += term(t)
            return out
        if t < self.start:
            return np.zeros(3)
        tau = t - self.start
        if self.kind == "constant":
            return self.amplitude.copy()
        if self.kind == "sinusoid":
            return self.amplitude * np.sin(self.freq * tau + self.phase)
        # product_chirp
        inner = np.sin(self.inner_freq * tau + self.inner_phase)
        return self.amplitude * np.sin(inner * tau + self.phase)


def zero_signal():
    return SignalSpec(kind="zero")


def sinusoid(amplitude, freq, phase=0.0, start=0.0):
    return SignalSpec(kind="sinusoid", amplitude=amplitude, freq=freq,
                      phase=phase, start=start)


def payload_force_group_b():
    """Irregular payload force: per-axis mix of product-chirps and sinusoids,
    equal to (1, 5, 1) N at t = 0."""
    return SignalSpec(kind="composite_sum", terms=[
        SignalSpec(kind="product_chirp", amplitude=(15.0, 15.0, 0.0),
                   inner_freq=(0.02, 0.04, 0.0),
                   inner_phase=(0.0, 1.5 * np.pi, 0.0)),
        sinusoid(amplitude=(0.0, 0.0, -25.0), freq=(0.0, 0.0, 1.5)),
        sinusoid(amplitude=(1.0, 5.0, 1.0), freq=0.5, phase=0.5 * np.pi),
    ])


def payload_moment_group_c():
    """Strong roll-axis payload moment, 10 sin(t - 5) N m switched on at t = 5 s."""
    return sinusoid(amplitude=(10.0, 0.0, 0.0), freq=(1.0, 0.0, 0.0), start=5.0)


def quadrotor_baseline_force(i, n=3):
    """Default per-quadrotor disturbance force: 1 N sinusoids with
    incommensurate per-axis frequencies, phases spread evenly across the
    fleet so no single vehicle's waveform is privileged."""
    return sinusoid(amplitude=1.0, freq=(1.1, 1.3, 1.7),
                    phase=2.0 * np.pi * i / n)


def quadrotor_baseline_moment(i, n=3):
    return sinusoid(amplitude=0.1, freq=(1.1, 1.3, 1.7),
                    phase=2.0 * np.pi * i / n + 0.2)


@dataclass
class DisturbanceProfile:
    """One SignalSpec per plant channel. Channel counts must match n."""

    n: int
    d_x0: SignalSpec = field(default_factory=zero_signal)
    d_R0: SignalSpec = field(default_factory=zero_signal)
    d_xq: list = None
    d_Rq: list = None
    phi_x: SignalSpec = field(default_factory=zero_signal)
    phi_R: SignalSpec = field(default_factory=zero_signal)

    def __post_init__(self):
        if self.d_xq is None:
            self.d_xq = [zero_signal() for _ in range(self.n)]
        if self.d_Rq is None:
            self.d_Rq = [zero_signal() for _ in range(self.n)]
        if len(self.d_xq) != self.n or len(self.d_Rq) != self.n:
            raise ConfigurationError("per-quadrotor channel count must equal n")

    def __call__(self, t):
        """Raw sample plus the true augmented-disturbance accelerations."""
        sample = DisturbanceSample(
            d_x0=self.d_x0(t),
            d_R0=self.d_R0(t),
            d_xq=np.stack([s(t) for s in self.d_xq]),
            d_Rq=np.stack([s(t) for s in self.d_Rq]),
        )
        return sample, self.phi_x(t), self.phi_R(t)


def zero_profile(n):
    return DisturbanceProfile(n=n)


def full_profile(n, extra_x0=None, extra_R0=None):
    """'Full disturbances': baseline sinusoids on every quadrotor channel;
    the payload channels carry only the optional per-group extra signals."""
    return DisturbanceProfile(
        n=n,
        d_x0=zero_signal() if extra_x0 is None else extra_x0,
        d_R0=zero_signal() if extra_R0 is None else extra_R0,
        d_xq=[quadrotor_baseline_force(i, n) for i in range(n)],
        d_Rq=[quadrotor_baseline_moment(i, n) for i in range(n)],
    )
