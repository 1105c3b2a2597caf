"""Composite Gauss-Legendre panels for oscillatory frequency integrals.

The bath integrands have the form ``F(omega) * w(omega, t)`` where ``F``
varies on the scale of the spectral-density cut-off and ``w`` oscillates
with wavelength ``2 pi / t``.  Panels are sized so that each one holds at
most ~2/3 of an oscillation, which a moderate-order Gauss rule resolves
to machine precision; a geometric lead-in from zero resolves the cut-off
feature.  Everything is vectorised: a grid built once for the largest
time also serves every smaller time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConvergenceError

DEFAULT_ORDER = 14
CHECK_ORDER = 20


@lru_cache(maxsize=None)
def _gauss_rule(order: int):
    return leggauss(order)


def gauss_panels(edges: np.ndarray, order: int = DEFAULT_ORDER):
    """Nodes and weights of a composite Gauss rule on the given panel edges."""
    x, w = _gauss_rule(order)
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def oscillation_edges(
    omega_max: float, t_osc: float, feature_scale: float, refine: int = 1
) -> np.ndarray:
    """Panel edges on [0, omega_max] for an integrand oscillating like sin(omega t).

    ``refine`` shrinks every panel by the given factor (used for
    convergence checks).
    """
    wavelength = 2.0 * np.pi / max(t_osc, 1e-12)
    cap = min(feature_scale / 2.0, wavelength * 2.0 / 3.0, omega_max / 8.0) / refine
    edges = [0.0]
    width = feature_scale / 64.0 / refine
    while edges[-1] + width < omega_max and width < cap:
        edges.append(edges[-1] + width)
        width *= 1.6
    n_uniform = int(np.ceil((omega_max - edges[-1]) / cap))
    tail = edges[-1] + (omega_max - edges[-1]) * np.arange(1, n_uniform + 1) / n_uniform
    return np.concatenate([edges, tail])


@dataclass(frozen=True)
class FrequencyGrid:
    """Immutable node/weight set for integrals over [0, omega_max]."""

    nodes: np.ndarray
    weights: np.ndarray
    omega_max: float


def frequency_grid(
    omega_max: float,
    t_osc: float,
    feature_scale: float,
    *,
    sqrt_substitution: bool = False,
    order: int = DEFAULT_ORDER,
    refine: int = 1,
) -> FrequencyGrid:
    """Build a grid valid for all oscillation times up to ``t_osc``.

    With ``sqrt_substitution`` the leading interval [0, feature/4] is mapped
    through ``omega = u**2``, which turns integrable endpoint singularities
    (sub-Ohmic spectra at finite temperature) into smooth integrands.
    """
    if sqrt_substitution:
        split = feature_scale / 4.0
        n_lead = max(4, int(np.ceil(np.sqrt(split) * t_osc)) + 2) * refine
        u_edges = np.sqrt(split) * np.arange(n_lead + 1) / n_lead
        u_nodes, u_weights = gauss_panels(u_edges, order)
        lead_nodes = u_nodes**2
        lead_weights = u_weights * 2.0 * u_nodes
        edges = oscillation_edges(omega_max, t_osc, feature_scale, refine)
        edges = np.concatenate([[split], edges[edges > split]])
        nodes, weights = gauss_panels(edges, order)
        return FrequencyGrid(
            np.concatenate([lead_nodes, nodes]),
            np.concatenate([lead_weights, weights]),
            omega_max,
        )
    edges = oscillation_edges(omega_max, t_osc, feature_scale, refine)
    nodes, weights = gauss_panels(edges, order)
    return FrequencyGrid(nodes, weights, omega_max)


def check_convergence(
    value_coarse: float,
    value_fine: float,
    *,
    atol: float = 1e-10,
    rtol: float = 1e-8,
    what: str = "frequency integral",
) -> None:
    """Raise :class:`ConvergenceError` when two refinement levels disagree."""
    err = abs(value_fine - value_coarse)
    if err > atol + rtol * abs(value_fine):
        raise ConvergenceError(
            f"{what} did not converge: refinement changed the value by {err:.3g}"
        )


def sin_over(x: np.ndarray, t) -> np.ndarray:
    """Numerically stable ``sin(x t) / x`` (equal to ``t`` at ``x = 0``)."""
    return t * np.sinc(x * t / np.pi)
