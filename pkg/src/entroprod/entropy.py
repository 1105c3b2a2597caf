"""Entropy production rate, entropy flux and derived summaries.

For Gaussian dynamics obeying a Lyapunov equation the entropy production
rate has the closed matrix form

    Pi = 1/2 Tr[sigma^-1 D] + 2 Tr[A_irr] + 2 Tr[A_irr^T D^-1 A_irr sigma]

with ``A_irr = (A + E A E^T) / 2`` the time-reversal-odd part of the
drift (E flips momenta).  For the scalar channels of this model it
reduces to ``Pi = Delta Tr[sigma^-1] - 8 gamma + (gamma^2 / Delta) Tr[sigma]``.

The entropy functional tracked alongside is the Renyi-2 Wigner entropy
``S2 = ln(det sigma) / 2`` (up to an additive constant), and the flux is
defined through the balance ``dS2/dt = Pi - Phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import CoefficientTable
from .errors import GridError, SingularityError, TailError
from .states import TIME_REVERSAL

DELTA_FLOOR = 1e-13
DEFAULT_TAIL_TOL = 1e-6
DEFAULT_SIGMA_HORIZON = 200.0


def irreversible_drift(drift: np.ndarray) -> np.ndarray:
    """Time-reversal-odd part (A + E A E^T) / 2 of the drift matrix."""
    drift = np.asarray(drift, dtype=float)
    return 0.5 * (drift + TIME_REVERSAL @ drift @ TIME_REVERSAL.T)


def entropy_production_rate(sigma, drift, diffusion) -> float:
    """General matrix form of the entropy production rate."""
    sigma = np.asarray(sigma, dtype=float)
    diffusion = np.asarray(diffusion, dtype=float)
    if abs(np.linalg.det(diffusion)) < DELTA_FLOOR**4 * 16.0:
        raise SingularityError("diffusion matrix is singular; Pi is undefined here")
    a_irr = irreversible_drift(drift)
    sigma_inv = np.linalg.inv(sigma)
    diff_inv = np.linalg.inv(diffusion)
    term1 = 0.5 * np.trace(sigma_inv @ diffusion)
    term2 = 2.0 * np.trace(a_irr)
    term3 = 2.0 * np.trace(a_irr.T @ diff_inv @ a_irr @ sigma)
    return float(term1 + term2 + term3)


def pi_scalar(trace_sigma, trace_sigma_inv, delta, gamma):
    """Scalar-channel reduction; accepts arrays for vectorised traces."""
    delta = np.asarray(delta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            delta * trace_sigma_inv
            - 8.0 * np.asarray(gamma, dtype=float)
            + np.asarray(gamma, dtype=float) ** 2 / delta * trace_sigma
        )


def pi_closed_nonmarkovian(t, s: float, nu_tilde: float, table: CoefficientTable):
    """Closed form of Pi(t) on the slice g = 2d + 1, lam = +1.

    Obtained by inserting the weak-coupling propagation into the scalar
    entropy-rate formula; identical (to round-off) to evaluating the
    matrix formula on weak-coupling states.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    delta = np.atleast_1d(table.delta_at(t_arr))
    gamma = np.atleast_1d(table.gamma_at(t_arr))
    big_gamma = np.atleast_1d(table.Gamma_at(t_arr))
    delta_bar = np.atleast_1d(table.delta_bar_at(t_arr))
    if np.any(np.abs(delta) <= DELTA_FLOOR):
        raise SingularityError("Delta(t) vanishes at a requested time; Pi is undefined")
    shrink = 1.0 - big_gamma
    moment = s * shrink + delta_bar
    denom = nu_tilde * (2.0 * s - nu_tilde) * shrink**2 + 2.0 * s * delta_bar * shrink + delta_bar**2
    value = -8.0 * gamma + 4.0 * (gamma**2 / delta + delta / denom) * moment
    return float(value[0]) if np.ndim(t) == 0 else value


def pi_closed_markovian(t, s: float, nu_tilde: float, gamma_m: float, beta: float, omega0: float = 1.0):
    """Closed form of Pi(t) for the constant-rate (Markovian) dynamics."""
    t_arr = np.asarray(t, dtype=float)
    n_occ = 1.0 / math.tanh(0.5 * beta * omega0)
    grow = np.exp(2.0 * gamma_m * t_arr)
    relax = n_occ * (grow - 1.0)
    term2 = 4.0 * gamma_m * (1.0 + (s / n_occ - 1.0) / grow)
    term3 = (
        4.0 * gamma_m * n_occ * grow * (s + relax)
        / ((2.0 * s - nu_tilde + relax) * (nu_tilde + relax))
    )
    value = -8.0 * gamma_m + term2 + term3
    return float(value) if np.ndim(t) == 0 else value


def pi_max_markovian(s: float, nu_tilde: float, gamma_m: float, beta: float, omega0: float = 1.0) -> float:
    """Peak Markovian entropy production rate, attained at t = 0."""
    half = 0.5 * beta * omega0
    return float(
        -8.0 * gamma_m
        + 4.0 * s * gamma_m * math.tanh(half)
        + 4.0 * s * gamma_m / math.tanh(half) / ((2.0 * s - nu_tilde) * nu_tilde)
    )


@dataclass(frozen=True)
class ThermoTrace:
    """Time series of the thermodynamic observables of one run.

    ``Pi`` at t = 0 is filled by quadratic extrapolation whenever the
    diffusion rate vanishes there (flagged by ``pi0_extrapolated``).
    """

    times: np.ndarray
    Pi: np.ndarray
    E_N: np.ndarray
    S2: np.ndarray
    Phi: np.ndarray
    pi0_extrapolated: bool = field(default=False, compare=False)

    def __len__(self):
        return len(self.times)


def entropy_flux(times, pi_values, s2_values):
    """Flux Phi = Pi - dS2/dt with central differences on interior points."""
    times = np.asarray(times, dtype=float)
    if len(times) < 3:
        raise GridError("flux needs at least 3 grid points")
    return np.asarray(pi_values, dtype=float) - np.gradient(
        np.asarray(s2_values, dtype=float), times
    )


def flux_for_trace(trace: ThermoTrace) -> np.ndarray:
    return entropy_flux(trace.times, trace.Pi, trace.S2)


def integrated_entropy_production(
    trace: ThermoTrace, *, tail_tol: float = DEFAULT_TAIL_TOL
) -> tuple[float, float]:
    """Trapezoid integral of Pi with the tail estimate |Pi(t_max)| * t_max.

    Raises :class:`TailError` when the trace has not decayed below
    ``tail_tol`` at its end.
    """
    if len(trace) < 3:
        raise GridError("integration needs at least 3 grid points")
    tail = abs(float(trace.Pi[-1]))
    if tail >= tail_tol:
        raise TailError(
            f"|Pi(t_max)| = {tail:.3g} >= tail tolerance {tail_tol:.3g}; "
            "extend the horizon"
        )
    total = float(np.trapezoid(trace.Pi, trace.times))
    return total, tail * float(trace.times[-1])


def _parabolic_refine(times, values, idx):
    """Vertex of the parabola through three bracketing samples."""
    if idx <= 0 or idx >= len(values) - 1:
        return float(values[idx]), float(times[idx])
    y0, y1, y2 = values[idx - 1], values[idx], values[idx + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(y1), float(times[idx])
    shift = 0.5 * (y0 - y2) / denom
    shift = min(max(shift, -1.0), 1.0)
    h = times[idx + 1] - times[idx]
    peak = y1 - 0.25 * (y0 - y2) * shift
    return float(peak), float(times[idx] + shift * h)


def find_peaks(trace: ThermoTrace) -> tuple[float, float, float, float]:
    """Global maximum and minimum of Pi with parabolic refinement.

    Returns ``(pi_max, t_at_max, pi_min, t_at_min)``.
    """
    if len(trace) == 0:
        raise GridError("empty trace")
    values = np.asarray(trace.Pi, dtype=float)
    imax = int(np.nanargmax(values))
    imin = int(np.nanargmin(values))
    pi_max, t_max = _parabolic_refine(trace.times, values, imax)
    pi_min, t_min = _parabolic_refine(trace.times, values, imin)
    return pi_max, t_max, pi_min, t_min


def first_local_max(times, values, start: int = 1):
    """Value/time/index of the first interior local maximum.

    Falls back to the global maximum for traces that only decay
    (constant-rate runs peak at the first sample).
    """
    values = np.asarray(values, dtype=float)
    for i in range(max(start, 1), len(values) - 1):
        if values[i] >= values[i - 1] and values[i] > values[i + 1]:
            peak, t_peak = _parabolic_refine(times, values, i)
            return peak, t_peak, i
    i = int(np.nanargmax(values))
    peak, t_peak = _parabolic_refine(times, values, i)
    return peak, t_peak, i
