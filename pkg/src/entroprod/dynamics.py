"""Covariance-matrix propagation under the time-local master equation.

All channels in this model are scalar: drift ``A = -gamma(t) I`` and
diffusion ``D = 2 Delta(t) I``, so the Lyapunov equation

    d sigma / dt = A sigma + sigma A^T + D

has the closed solution

    sigma(t) = sigma(0) exp(-Gamma(t)) + 2 DeltaGamma(t) I,
    DeltaGamma(t) = exp(-Gamma(t)) Int_0^t Delta(tau) exp(Gamma(tau)) dtau,

with ``Gamma = 2 Int gamma``.  A classic RK4 integrator of the Lyapunov
equation itself is kept as an independent oracle, and the constant-rate
(Markovian) limit has its own analytic propagator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .bath import BathConfig, CoefficientTable
from .errors import DegenerateError, NonPhysical, RangeError, StabilityError
from .states import symplectic_eigenvalues

PHYS_DRIFT_TOL = 1e-6
OVERFLOW_GUARD = 1e12

IDENTITY4 = np.eye(4)


@dataclass(frozen=True)
class DriftDiffusion:
    """Drift and diffusion matrices of the Lyapunov equation."""

    A: np.ndarray
    D: np.ndarray

    @classmethod
    def from_rates(cls, gamma: float, delta: float) -> "DriftDiffusion":
        return cls(-gamma * IDENTITY4, 2.0 * delta * IDENTITY4)

    @classmethod
    def markovian(cls, gamma_m: float, nbar: float) -> "DriftDiffusion":
        return cls(-gamma_m * IDENTITY4, 2.0 * gamma_m * (2.0 * nbar + 1.0) * IDENTITY4)


def propagation_factors(table: CoefficientTable):
    """Arrays (u, v) with sigma(t) = u(t) sigma0 + v(t) I on the table grid."""
    weighted = table.delta * np.exp(table.Gamma)
    integral = cumulative_trapezoid(weighted, table.times, initial=0.0)
    u = np.exp(-table.Gamma)
    v = 2.0 * u * integral
    return u, v


def _factors_at(table: CoefficientTable, t: float):
    if t < 0.0 or t > table.t_max * (1.0 + 1e-12):
        raise RangeError(f"t={t} outside tabulated range [0, {table.t_max}]")
    u, v = propagation_factors(table)
    return float(np.interp(t, table.times, u)), float(np.interp(t, table.times, v))


def _check_physical_drift(sigma: np.ndarray) -> np.ndarray:
    nu_min, _ = symplectic_eigenvalues(sigma)
    if nu_min < 1.0 - PHYS_DRIFT_TOL:
        raise NonPhysical(
            f"propagated state drifted below the uncertainty bound "
            f"(nu_min = {nu_min:.8g}); refine the coefficient table"
        )
    return sigma


def evolve_exact(sigma0, table: CoefficientTable, t: float) -> np.ndarray:
    """Closed-form propagation; the running integral uses the table grid."""
    u, v = _factors_at(table, t)
    sigma = u * np.asarray(sigma0, dtype=float) + v * IDENTITY4
    return _check_physical_drift(0.5 * (sigma + sigma.T))


def evolve_weak_coupling(sigma0, table: CoefficientTable, t: float) -> np.ndarray:
    """Leading weak-coupling form sigma(t) = (1 - Gamma) sigma0 + delta_bar I.

    Agrees with :func:`evolve_exact` up to fourth order in the coupling.
    """
    if t < 0.0 or t > table.t_max * (1.0 + 1e-12):
        raise RangeError(f"t={t} outside tabulated range [0, {table.t_max}]")
    big_gamma = table.Gamma_at(t)
    if big_gamma >= 1.0:
        import warnings

        warnings.warn(
            f"Gamma(t) = {big_gamma:.3g} >= 1: outside the weak-coupling window",
            stacklevel=2,
        )
    sigma = (1.0 - big_gamma) * np.asarray(sigma0, dtype=float)
    sigma += table.delta_bar_at(t) * IDENTITY4
    return 0.5 * (sigma + sigma.T)


def evolve_rk4(sigma0, drift, diffusion, t: float, h: float) -> np.ndarray:
    """Fixed-step RK4 integration of the Lyapunov equation (oracle).

    ``drift`` and ``diffusion`` are callables returning 4x4 matrices.
    """
    if h <= 0.0:
        raise RangeError(f"step size must be positive, got {h}")
    sigma = np.asarray(sigma0, dtype=float).copy()

    def rhs(time, mat):
        a = np.asarray(drift(time), dtype=float)
        return a @ mat + mat @ a.T + np.asarray(diffusion(time), dtype=float)

    n_steps = int(round(t / h))
    remainder = t - n_steps * h
    steps = [h] * n_steps + ([remainder] if remainder > 1e-15 else [])
    time = 0.0
    for step in steps:
        k1 = rhs(time, sigma)
        k2 = rhs(time + step / 2.0, sigma + step / 2.0 * k1)
        k3 = rhs(time + step / 2.0, sigma + step / 2.0 * k2)
        k4 = rhs(time + step, sigma + step * k3)
        sigma = sigma + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        sigma = 0.5 * (sigma + sigma.T)
        time += step
        if np.max(np.abs(sigma)) > OVERFLOW_GUARD:
            raise StabilityError(f"RK4 overflow at t={time:.6g}")
    return sigma


def rk4_callables_from_table(table: CoefficientTable):
    """Cubic-interpolated (drift, diffusion) callables for the RK4 oracle."""
    from scipy.interpolate import CubicSpline

    delta_spline = CubicSpline(table.times, table.delta)
    gamma_spline = CubicSpline(table.times, table.gamma)
    return (
        lambda t: -float(gamma_spline(t)) * IDENTITY4,
        lambda t: 2.0 * float(delta_spline(t)) * IDENTITY4,
    )


def markovian_propagate(sigma0, gamma_m: float, nbar: float, t: float) -> np.ndarray:
    """Constant-rate solution with thermal fixed point (2 nbar + 1) I."""
    decay = np.exp(-2.0 * gamma_m * t)
    occupation = 2.0 * nbar + 1.0
    return decay * np.asarray(sigma0, dtype=float) + occupation * (1.0 - decay) * IDENTITY4


def steady_state(table: CoefficientTable, tol: float = 1e-12) -> np.ndarray:
    """Late-time fixed point (Delta / gamma at t_max) * I."""
    gamma_late = table.gamma[-1]
    if abs(gamma_late) < tol:
        raise DegenerateError(
            f"gamma(t_max) = {gamma_late:.3g} is too small to define a steady state"
        )
    return (table.delta[-1] / gamma_late) * IDENTITY4
