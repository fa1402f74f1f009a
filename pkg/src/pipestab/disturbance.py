"""Parametric boundary disturbances b(t) and their windowed-H1 decay check.

The uncertain outflow enters the model as a Dirichlet perturbation b(t)
at x = L.  Each family here is a closed-form C^2 expression with exact
analytic derivatives, built so that b(0) = b'(0) = b''(0) = 0 (the
compatibility requirement of the solver) and so that the achievable
exponential certificate is analytically controllable: the windowed
integral of b^2 + b_t^2 decays like exp(-2*gamma*t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("zero", "decaying_burst", "compact_burst")


@dataclass(frozen=True)
class DisturbanceSpec:
    """One realization of the uncertain customer behavior.

    The claimed certificate (nu, C_nu) bounds the sliding-window integral
    of b^2 + b_t^2 by C_nu * exp(-nu t); it is a claim, checked by
    verify_noise_bound, not enforced by construction.  The seed labels
    the scenario and only moves the carrier phase.
    """

    family: str = "zero"
    amplitude: float = 0.0
    frequency: float = 1.0
    gamma: float = 1.0
    nu: float = 1.0
    C_nu: float = 1.0
    T_period: float = 1.0
    seed: int = 0
    t_off: float = math.inf   # support end for compact_burst (vanishes for t >= t_off)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown disturbance family {self.family!r}")
        if self.T_period <= 0:
            raise ValueError("T_period must be > 0")

    @property
    def phase(self) -> float:
        return float(np.random.default_rng(self.seed).uniform(0.0, 2.0 * math.pi))


def _smoothstep(p: float) -> tuple[float, float, float]:
    """Quintic smoothstep on [0, 1] with vanishing value/slope/curvature at 0.

    Returns (s, s', s'') with respect to p; s == 1 with flat derivatives
    for p >= 1.
    """
    if p <= 0.0:
        return 0.0, 0.0, 0.0
    if p >= 1.0:
        return 1.0, 0.0, 0.0
    s = p ** 3 * (10.0 + p * (-15.0 + 6.0 * p))
    ds = 30.0 * p ** 2 * (1.0 + p * (-2.0 + p))
    dds = 60.0 * p * (1.0 + p * (-3.0 + 2.0 * p))
    return s, ds, dds


def sample_b(spec: DisturbanceSpec, t: float) -> tuple[float, float, float]:
    """Evaluate (b, b_t, b_tt) at time t >= 0 with exact derivatives."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if spec.family == "zero" or spec.amplitude == 0.0:
        return 0.0, 0.0, 0.0

    ramp = 0.5 * spec.T_period
    s, ds, dds = _smoothstep(t / ramp)
    ds /= ramp
    dds /= ramp ** 2

    g_amp = spec.gamma
    om = 2.0 * math.pi * spec.frequency
    ph = spec.phase if spec.seed != 0 else 0.0
    e = math.exp(-g_amp * t)
    sn = math.sin(om * t + ph)
    cs = math.cos(om * t + ph)
    g = e * sn
    dg = e * (-g_amp * sn + om * cs)
    ddg = e * ((g_amp ** 2 - om ** 2) * sn - 2.0 * g_amp * om * cs)

    A = spec.amplitude
    b = A * s * g
    bt = A * (ds * g + s * dg)
    btt = A * (dds * g + 2.0 * ds * dg + s * ddg)

    if spec.family == "compact_burst":
        # C^2 cutoff descending on [t_off - ramp, t_off], identically zero after
        if t >= spec.t_off:
            return 0.0, 0.0, 0.0
        r0 = spec.t_off - ramp
        if t > r0:
            c, dc, ddc = _smoothstep((t - r0) / ramp)
            c, dc, ddc = 1.0 - c, -dc / ramp, -ddc / ramp ** 2
            b, bt, btt = (b * c,
                          bt * c + b * dc,
                          btt * c + 2.0 * bt * dc + b * ddc)
    return b, bt, btt


def sliding_window_integral(times, values, T_period):
    """Trapezoid integral of `values` over the trailing window of length T_period.

    Returns the integral at every sample time t with t - T_period >= times[0],
    together with those times.  The window start is handled by linear
    interpolation of the cumulative integral.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(times))])
    mask = times - T_period >= times[0] - 1e-12
    t_out = times[mask]
    start = np.interp(t_out - T_period, times, cum)
    return t_out, cum[mask] - start


def verify_noise_bound(times, b, b_t, T_period, nu, C_nu, rel_slack=1e-6):
    """Check the windowed-H1 decay claim on a sampled disturbance trace.

    For every sample time t > T_period the trailing-window integral
    W(t) of b^2 + b_t^2 is compared against C_nu * exp(-nu t).  Also
    reports the minimal admissible C_nu = max_t W(t) * exp(nu t).
    """
    times = np.asarray(times, dtype=float)
    if times[-1] <= T_period:
        raise ValueError("trace must extend beyond T_period")
    if C_nu <= 0:
        raise ValueError("C_nu must be > 0")
    integrand = np.asarray(b, dtype=float) ** 2 + np.asarray(b_t, dtype=float) ** 2
    t_w, w = sliding_window_integral(times, integrand, T_period)
    envelope = C_nu * np.exp(-nu * t_w)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(envelope > 0, w / envelope, np.inf)
    worst = float(np.max(ratios)) if len(ratios) else 0.0
    if np.all(w == 0.0):
        worst = 0.0
    minimal_C = float(np.max(w * np.exp(nu * t_w))) if len(t_w) else 0.0
    return {
        "worst_ratio": worst,
        "pass": worst <= 1.0 + rel_slack,
        "minimal_C_nu": minimal_C,
        "times": t_w,
        "window_integral": w,
    }
