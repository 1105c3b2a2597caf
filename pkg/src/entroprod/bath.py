"""Bath spectral densities and the time-dependent master-equation rates.

The diffusion and dissipation rates are defined through the noise and
dissipation kernels

    kappa(tau) = 2 alpha^2 Int_0^inf J(w) coth(beta w / 2) cos(w tau) dw
    mu(tau)    = 2 alpha^2 Int_0^inf J(w) sin(w tau) dw

    Delta(t) = 1/2 Int_0^t kappa(tau) cos(w0 tau) dtau
    gamma(t) = 1/2 Int_0^t mu(tau) sin(w0 tau) dtau

Direct nested evaluation is slow and, for the Lorentz-Drude spectrum,
only conditionally convergent.  Swapping the integration order makes the
inner time integral analytic,

    Delta(t) = alpha^2 Int J(w) coth(beta w / 2) C(w, t) dw
    gamma(t) = alpha^2 Int J(w) S(w, t) dw

with C/S = [sin((w - w0) t)/(w - w0) +- sin((w + w0) t)/(w + w0)] / 2,
leaving a single absolutely convergent frequency integral.  Frequencies
are truncated at ``omega_max``; for the Lorentz-Drude spectrum, whose
integrand decays only like 1/w^2, the truncated tail is restored in
closed form through exponential integrals.

Units: hbar = k_B = 1, and all rates and times are expressed in the
oscillator frequency ``omega0`` (default 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import exp1

from .errors import ConvergenceError, DomainError, RangeError
from .quadrature import FrequencyGrid, check_convergence, frequency_grid, sin_over

LORENTZ_DRUDE = "lorentz_drude"
EXPONENTIAL = "exponential"

QUAD_ATOL = 1e-10
QUAD_RTOL = 1e-8
TOL_INT = 1e-7
COUPLING_WARN_THRESHOLD = 0.3


@dataclass(frozen=True)
class SpectralDensity:
    """Bath spectrum J(w).

    ``lorentz_drude``: Ohmic with algebraic cut-off,
        J(w) = (2/pi) w wc^2 / (wc^2 + w^2).
    ``exponential``: Ohmicity ``epsilon`` with exponential cut-off,
        J(w) = wc^(1 - epsilon) w^epsilon exp(-w / wc).
    """

    kind: str
    omega_c: float
    epsilon: float = 1.0

    def __post_init__(self):
        if self.kind not in (LORENTZ_DRUDE, EXPONENTIAL):
            raise DomainError(f"unknown spectral density kind {self.kind!r}")
        if not self.omega_c > 0.0:
            raise DomainError(f"cut-off frequency must be positive, got {self.omega_c}")
        if not self.epsilon > 0.0:
            raise DomainError(f"Ohmicity must be positive, got {self.epsilon}")

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0.0):
            raise DomainError("spectral density is defined for omega >= 0 only")
        wc = self.omega_c
        if self.kind == LORENTZ_DRUDE:
            return (2.0 / np.pi) * omega * wc**2 / (wc**2 + omega**2)
        with np.errstate(divide="ignore"):
            power = np.where(omega > 0.0, omega**self.epsilon, 0.0)
        return wc ** (1.0 - self.epsilon) * power * np.exp(-omega / wc)


def spectral_density(sd: SpectralDensity, omega):
    """Evaluate J(omega); raises :class:`DomainError` for negative frequencies."""
    value = sd(omega)
    return float(value) if np.ndim(omega) == 0 else value


def lorentz_drude(omega_c: float) -> SpectralDensity:
    return SpectralDensity(LORENTZ_DRUDE, omega_c)


def exponential(omega_c: float, epsilon: float = 1.0) -> SpectralDensity:
    return SpectralDensity(EXPONENTIAL, omega_c, epsilon)


@dataclass(frozen=True)
class BathConfig:
    """One oscillator-bath configuration (both local baths are identical).

    ``beta`` is the inverse temperature in units of 1/omega0;
    ``math.inf`` encodes a zero-temperature reservoir.
    """

    sd: SpectralDensity
    alpha: float
    beta: float
    omega0: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise DomainError(f"coupling must be positive, got {self.alpha}")
        if not self.beta > 0.0:
            raise DomainError(f"inverse temperature must be positive, got {self.beta}")
        if not self.omega0 > 0.0:
            raise DomainError(f"oscillator frequency must be positive, got {self.omega0}")
        if self.alpha > COUPLING_WARN_THRESHOLD:
            warnings.warn(
                f"alpha = {self.alpha} is outside the weak-coupling regime "
                "the time-local master equation was derived for",
                stacklevel=2,
            )

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)


def default_omega_max(cfg: BathConfig) -> float:
    return max(50.0 * cfg.sd.omega_c, 20.0 * cfg.omega0)


def thermal_weight(cfg: BathConfig, omega: np.ndarray) -> np.ndarray:
    """coth(beta omega / 2), equal to 1 for a zero-temperature bath."""
    if cfg.zero_temperature:
        return np.ones_like(omega)
    return 1.0 / np.tanh(0.5 * cfg.beta * omega)


def _grid_for(cfg: BathConfig, t_osc: float, omega_max: float, refine: int = 1) -> FrequencyGrid:
    feature = min(cfg.sd.omega_c, cfg.omega0)
    return frequency_grid(
        omega_max,
        t_osc,
        feature,
        sqrt_substitution=cfg.sd.kind == EXPONENTIAL,
        refine=refine,
    )


def _coth_series(cfg: BathConfig, omega_max: float):
    """(coefficient, decay-rate) pairs of coth(beta w/2) = 1 + 2 sum exp(-k beta w)."""
    terms = [(1.0, 0.0)]
    if not cfg.zero_temperature:
        n = min(80, max(1, int(math.ceil(9.0 / (cfg.beta * omega_max)))))
        terms += [(2.0, k * cfg.beta) for k in range(1, n + 1)]
    return terms


def _ld_tail_delta_gamma(cfg: BathConfig, times: np.ndarray, omega_max: float):
    """Closed-form [omega_max, inf) remainder of the swapped-order integrals.

    Beyond the cut-off the Lorentz-Drude spectrum is 1/w up to O(wc^2/w^2),
    so every remainder reduces to exponential integrals E1 of complex
    argument via partial fractions in (w, w +- w0).
    """
    w0 = cfg.omega0
    pref = (2.0 * cfg.sd.omega_c**2 / np.pi) * 0.5 / w0
    t = times[:, None]
    delta_tail = np.zeros(len(times))
    gamma_tail = np.zeros(len(times))
    nonzero = times > 0.0
    tnz = times[nonzero][:, None]

    def pieces(a):
        z = (a - 1j * tnz) * 1.0
        a_minus = np.exp(-a * w0) * np.imag(exp1(z * (omega_max - w0)))
        a_plus = np.exp(a * w0) * np.imag(exp1(z * (omega_max + w0)))
        b_minus = np.imag(np.exp(-1j * w0 * tnz) * exp1(z * omega_max))
        b_plus = np.imag(np.exp(1j * w0 * tnz) * exp1(z * omega_max))
        return a_minus, a_plus, b_minus, b_plus

    for coeff, rate in _coth_series(cfg, omega_max):
        am, ap, bm, bp = pieces(rate)
        delta_tail[nonzero] += coeff * ((am - bm) + (bp - ap)).ravel()
    am, ap, bm, bp = pieces(0.0)
    gamma_tail[nonzero] = ((am - bm) - (bp - ap)).ravel()
    return pref * delta_tail, pref * gamma_tail


def delta_gamma_arrays(
    cfg: BathConfig,
    times: np.ndarray,
    *,
    omega_max: float | None = None,
    grid: FrequencyGrid | None = None,
    chunk: int = 200_000,
):
    """Sample Delta(t) and gamma(t) on an array of times (vectorised)."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0.0):
        raise DomainError("coefficients are defined for t >= 0")
    if omega_max is None:
        omega_max = default_omega_max(cfg)
    if grid is None:
        grid = _grid_for(cfg, max(times.max(), 1.0), omega_max)
    nodes, weights = grid.nodes, grid.weights
    j_vals = cfg.sd(nodes)
    noise_weight = weights * j_vals * thermal_weight(cfg, nodes)
    damp_weight = weights * j_vals
    w0 = cfg.omega0
    alpha2 = cfg.alpha**2
    delta = np.empty_like(times)
    gamma = np.empty_like(times)
    block = max(1, chunk // max(len(nodes), 1))
    for start in range(0, len(times), block):
        tt = times[start : start + block, None]
        lower = sin_over(nodes[None, :] - w0, tt)
        upper = sin_over(nodes[None, :] + w0, tt)
        delta[start : start + block] = 0.5 * ((lower + upper) @ noise_weight)
        gamma[start : start + block] = 0.5 * ((lower - upper) @ damp_weight)
    if cfg.sd.kind == LORENTZ_DRUDE:
        delta_tail, gamma_tail = _ld_tail_delta_gamma(cfg, times, omega_max)
        delta += delta_tail
        gamma += gamma_tail
    delta[times == 0.0] = 0.0
    gamma[times == 0.0] = 0.0
    return alpha2 * delta, alpha2 * gamma


def delta_coefficient(cfg: BathConfig, t: float, *, omega_max: float | None = None) -> float:
    """Diffusion rate Delta(t), with an internal refinement check."""
    return _checked_coefficient(cfg, t, omega_max)[0]


def gamma_coefficient(cfg: BathConfig, t: float, *, omega_max: float | None = None) -> float:
    """Dissipation rate gamma(t), with an internal refinement check."""
    return _checked_coefficient(cfg, t, omega_max)[1]


def _checked_coefficient(cfg, t, omega_max):
    if t < 0.0:
        raise DomainError(f"coefficients are defined for t >= 0, got t={t}")
    if t == 0.0:
        return 0.0, 0.0
    if omega_max is None:
        omega_max = default_omega_max(cfg)
    times = np.array([t])
    coarse = delta_gamma_arrays(cfg, times, omega_max=omega_max,
                                grid=_grid_for(cfg, t, omega_max))
    fine = delta_gamma_arrays(cfg, times, omega_max=omega_max,
                              grid=_grid_for(cfg, t, omega_max, refine=2))
    check_convergence(coarse[0][0], fine[0][0], atol=QUAD_ATOL, rtol=QUAD_RTOL,
                      what="Delta(t) quadrature")
    check_convergence(coarse[1][0], fine[1][0], atol=QUAD_ATOL, rtol=QUAD_RTOL,
                      what="gamma(t) quadrature")
    return float(fine[0][0]), float(fine[1][0])


def noise_kernel(cfg: BathConfig, tau: float, *, omega_max: float | None = None) -> float:
    """kappa(tau) truncated at omega_max (analytic tail restored for Lorentz-Drude)."""
    return _kernel(cfg, tau, omega_max, noise=True)


def dissipation_kernel(cfg: BathConfig, tau: float, *, omega_max: float | None = None) -> float:
    """mu(tau) truncated at omega_max (analytic tail restored for Lorentz-Drude)."""
    return _kernel(cfg, tau, omega_max, noise=False)


def _kernel(cfg, tau, omega_max, noise):
    if tau <= 0.0:
        raise DomainError(f"kernels are defined for tau > 0, got tau={tau}")
    if omega_max is None:
        omega_max = default_omega_max(cfg)
    values = []
    for refine in (1, 2):
        grid = _grid_for(cfg, tau, omega_max, refine)
        j_vals = cfg.sd(grid.nodes)
        if noise:
            integrand = j_vals * thermal_weight(cfg, grid.nodes) * np.cos(grid.nodes * tau)
        else:
            integrand = j_vals * np.sin(grid.nodes * tau)
        values.append(float(grid.weights @ integrand))
    check_convergence(values[0], values[1], atol=QUAD_ATOL, rtol=QUAD_RTOL,
                      what="kernel quadrature")
    head = values[1]
    if cfg.sd.kind == LORENTZ_DRUDE:
        pref = 2.0 * cfg.sd.omega_c**2 / np.pi
        if noise:
            tail = sum(
                coeff * np.real(exp1(complex(rate, -tau) * omega_max))
                for coeff, rate in _coth_series(cfg, omega_max)
            )
        else:
            tail = np.imag(exp1(complex(0.0, -tau) * omega_max))
        head += pref * tail
    return 2.0 * cfg.alpha**2 * head


@dataclass(frozen=True)
class CoefficientTable:
    """Rates Delta, gamma and their running integrals on a uniform grid.

    ``Gamma = 2 Int_0^t gamma`` and ``delta_bar = 2 Int_0^t Delta`` are
    accumulated with the composite trapezoid rule on the same grid.
    """

    times: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    Gamma: np.ndarray
    delta_bar: np.ndarray
    config: BathConfig = field(compare=False)

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def _interp(self, t, values):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > self.t_max * (1.0 + 1e-12)):
            raise RangeError(f"time outside tabulated range [0, {self.t_max}]")
        out = np.interp(t, self.times, values)
        return float(out) if out.ndim == 0 else out

    def delta_at(self, t):
        return self._interp(t, self.delta)

    def gamma_at(self, t):
        return self._interp(t, self.gamma)

    def Gamma_at(self, t):
        return self._interp(t, self.Gamma)

    def delta_bar_at(self, t):
        return self._interp(t, self.delta_bar)

    def consistency_defect(self) -> float:
        """Max deviation of the stored cumulatives from re-integrated rates."""
        gamma_int = 2.0 * cumulative_trapezoid(self.gamma, self.times, initial=0.0)
        delta_int = 2.0 * cumulative_trapezoid(self.delta, self.times, initial=0.0)
        return float(
            max(np.max(np.abs(gamma_int - self.Gamma)), np.max(np.abs(delta_int - self.delta_bar)))
        )


def recommended_points(t_max: float, omega0: float = 1.0) -> int:
    """Grid density keeping the trapezoid cumulatives below ``TOL_INT``."""
    return max(2001, int(math.ceil(200.0 * t_max * omega0)) + 1)


def build_coefficient_table(
    cfg: BathConfig,
    t_max: float,
    n_points: int | None = None,
    *,
    omega_max: float | None = None,
) -> CoefficientTable:
    """Tabulate Delta, gamma, Gamma, delta_bar on a uniform grid [0, t_max]."""
    if not t_max > 0.0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    if n_points is None:
        n_points = recommended_points(t_max, cfg.omega0)
    if n_points < 16:
        raise DomainError(f"need at least 16 grid points, got {n_points}")
    if omega_max is None:
        omega_max = default_omega_max(cfg)
    times = np.linspace(0.0, t_max, n_points)
    grid = _grid_for(cfg, t_max, omega_max)
    delta, gamma = delta_gamma_arrays(cfg, times, omega_max=omega_max, grid=grid)
    # spot-check the frequency quadrature on a subsample of rows
    sample = times[np.linspace(1, n_points - 1, 7, dtype=int)]
    fine_grid = _grid_for(cfg, t_max, omega_max, refine=2)
    delta_f, gamma_f = delta_gamma_arrays(cfg, sample, omega_max=omega_max, grid=fine_grid)
    delta_c, gamma_c = delta_gamma_arrays(cfg, sample, omega_max=omega_max, grid=grid)
    for coarse, fine, label in ((delta_c, delta_f, "Delta"), (gamma_c, gamma_f, "gamma")):
        err = np.max(np.abs(coarse - fine))
        if err > QUAD_ATOL * 10.0 + QUAD_RTOL * np.max(np.abs(fine)):
            raise ConvergenceError(
                f"{label}(t) frequency quadrature not converged (defect {err:.3g})"
            )
    big_gamma = 2.0 * cumulative_trapezoid(gamma, times, initial=0.0)
    delta_bar = 2.0 * cumulative_trapezoid(delta, times, initial=0.0)
    return CoefficientTable(times, delta, gamma, big_gamma, delta_bar, cfg)


def markovian_coefficients(cfg: BathConfig) -> tuple[float, float]:
    """Long-time, high-temperature constants (gamma_M, nbar).

    gamma_M = 2 alpha^2 wc^2 w0 / (wc^2 + w0^2) and
    nbar = 1 / (exp(beta w0) - 1); the Markovian dynamics downstream uses
    drift -gamma_M * I and diffusion 2 gamma_M (2 nbar + 1) * I.
    """
    if cfg.sd.kind != LORENTZ_DRUDE:
        raise DomainError("the Markovian limit is taken for the Lorentz-Drude spectrum")
    if cfg.zero_temperature:
        raise DomainError("the Markovian limit requires a finite temperature")
    wc, w0 = cfg.sd.omega_c, cfg.omega0
    gamma_m = 2.0 * cfg.alpha**2 * wc**2 * w0 / (wc**2 + w0**2)
    nbar = 1.0 / math.expm1(cfg.beta * w0)
    return gamma_m, nbar
