"""Energy functionals for the closed-loop pipe flow and decay-rate fitting.

All spatial integrals are composite trapezoid on the solver grid; the
moving-window energies integrate the per-step series in time, again by
trapezoid, so the window sees full time resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disturbance import sliding_window_integral


def _trapz(y, x):
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def energy_E1(state, profile, k: float, a: float) -> float:
    """Weighted wave energy with the exponential cross term.

    E1 = int k[(a^2 - (ubar+u)^2) u_x^2 + u_t^2]
         - 2 exp(-x/L) [(ubar+u) u_x^2 + u_t u_x] dx
    """
    xs = state.xs
    L = xs[-1] - xs[0]
    m = profile.ubar + state.u
    h2 = np.exp(-(xs - xs[0]) / L)
    integrand = (k * ((a ** 2 - m ** 2) * state.w ** 2 + state.v ** 2)
                 - 2.0 * h2 * (m * state.w ** 2 + state.v * state.w))
    return _trapz(integrand, xs)


def energy_classic(state, k: float, a: float) -> float:
    """Classical wave energy k * int a^2 u_x^2 + u_t^2 dx."""
    return _trapz(k * (a ** 2 * state.w ** 2 + state.v ** 2), state.xs)


def grad_norm(state) -> float:
    """int u_t^2 + u_x^2 dx."""
    return _trapz(state.v ** 2 + state.w ** 2, state.xs)


def h1_integrand(state) -> float:
    """int u^2 + u_x^2 + u_t^2 dx (the spatial part of the windowed H1 norm)."""
    return _trapz(state.u ** 2 + state.v ** 2 + state.w ** 2, state.xs)


def windowed_integral(series, times, T_period, t) -> float:
    """Trapezoid integral of a per-step series over [t - T_period, t]."""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if t < T_period + times[0] - 1e-12:
        raise ValueError("window extends before the start of the series")
    if t > times[-1] + 1e-12:
        raise ValueError("window end beyond the recorded series")
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (series[1:] + series[:-1]) * np.diff(times))])
    hi = float(np.interp(t, times, cum))
    lo = float(np.interp(t - T_period, times, cum))
    return hi - lo


def energy_E(E1_series, times, T_period, t) -> float:
    """Moving-horizon average energy: integral of E1 over [t - T_period, t]."""
    return windowed_integral(E1_series, times, T_period, t)


def energy_H(trajectory, T_period, t) -> float:
    """Windowed squared H1 norm of u over [t - T_period, t] x [0, L]."""
    return windowed_integral(trajectory.series["h1"], trajectory.times, T_period, t)


def windowed_series(series, times, T_period):
    """Vectorized trailing-window trapezoid integral for all admissible t."""
    return sliding_window_integral(times, series, T_period)


@dataclass
class EquivalenceReport:
    lhs_ok: bool          # M1 * int(u_t^2+u_x^2) <= E1
    rhs_ok: bool          # E1 <= K2 * int(u_t^2+u_x^2)
    weighted_ok: bool     # int(u_t^2 + (1+2L^2) u_x^2) <= K1 * E1
    precondition_violated: bool
    E1: float
    grad: float
    weighted_grad: float


def check_equivalence(state, profile, params, M1, K1, K2,
                      slack: float = 1e-10) -> EquivalenceReport:
    """Numerically check the energy-equivalence inequalities at one snapshot.

    Preconditions (0 <= ubar+u <= a/2 pointwise and M1 > 0) are reported,
    not thrown; the inequalities are evaluated either way with the same
    quadrature on both sides.
    """
    a = params.a
    L = params.L
    m = profile.ubar + state.u
    precondition_violated = bool(np.any(m < -slack) or np.any(m > a / 2 + slack) or M1 <= 0)
    e1 = energy_E1(state, profile, params.k, a)
    g = grad_norm(state)
    wg = _trapz(state.v ** 2 + (1.0 + 2.0 * L ** 2) * state.w ** 2, state.xs)
    return EquivalenceReport(
        lhs_ok=bool(M1 * g <= e1 + slack),
        rhs_ok=bool(e1 <= K2 * g + slack),
        weighted_ok=bool(wg <= K1 * e1 + slack),
        precondition_violated=precondition_violated,
        E1=e1, grad=g, weighted_grad=wg)


def fit_decay_rate(series, times, window=None):
    """Least-squares exponential decay rate of a positive series.

    Fits a line through (t, log series); the rate is the negated slope,
    so positive means decay.  Nonpositive samples are excluded and
    counted; fewer than 8 usable samples is an error.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if window is not None:
        t0, t1 = window
        sel = (times >= t0) & (times <= t1)
        times, series = times[sel], series[sel]
    usable = series > 0
    n_excluded = int(np.sum(~usable))
    times, series = times[usable], series[usable]
    if len(series) < 8:
        raise ValueError(f"need at least 8 positive samples, have {len(series)}")
    slope, intercept = np.polyfit(times, np.log(series), 1)
    resid = np.log(series) - (slope * times + intercept)
    ss_tot = float(np.sum((np.log(series) - np.mean(np.log(series))) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return {"rate": -float(slope), "intercept": float(intercept),
            "r_squared": r2, "n_excluded": n_excluded}
