"""Two-mode Gaussian states in the covariance-matrix picture.

Conventions used throughout the package:

* quadrature ordering is ``(q1, p1, q2, p2)``;
* the covariance matrix holds symmetrized second moments normalised so
  that the vacuum state is the 4x4 identity;
* a matrix is physical when every symplectic eigenvalue is >= 1.

Standard-form states are parametrised by the quadruple ``(s, d, g, lam)``:
``s`` sets the mean local mixedness (diagonal blocks ``a = s + d``,
``b = s - d``), ``g`` the inverse global purity, and ``lam`` in [-1, 1]
interpolates between the maximally and minimally entangled states
compatible with those purities (``lam = +1`` / ``lam = -1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, DomainError, NonPhysical, NumericalFailure

TOL_NUM = 1e-9
TOL_PHYS = 1e-9

# symplectic form for (q1, p1, q2, p2)
OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)

# partial transposition of the second mode: p2 -> -p2
PT_MATRIX = np.diag([1.0, 1.0, 1.0, -1.0])

# symplectic time reversal: momenta flip sign
TIME_REVERSAL = np.diag([1.0, -1.0, 1.0, -1.0])


@dataclass(frozen=True)
class StateParams:
    """Standard-form parametrisation (s, d, g, lam) of a two-mode state.

    Legitimacy requires ``s >= 1``, ``|d| <= s - 1`` and ``g >= 2|d| + 1``.
    """

    s: float
    d: float = 0.0
    g: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if not self.s >= 1.0:
            raise ConstraintViolation(f"s must be >= 1, got s={self.s}")
        if not abs(self.d) <= self.s - 1.0:
            raise ConstraintViolation(
                f"|d| must be <= s - 1, got d={self.d} with s={self.s}"
            )
        if not self.g >= 2.0 * abs(self.d) + 1.0:
            raise ConstraintViolation(
                f"g must be >= 2|d| + 1, got g={self.g} with d={self.d}"
            )
        if not -1.0 <= self.lam <= 1.0:
            raise ConstraintViolation(f"lam must lie in [-1, 1], got {self.lam}")


@dataclass(frozen=True)
class SymplecticData:
    """Symplectic spectrum of a state and of its partial transpose."""

    nu_minus: float
    nu_plus: float
    nu_tilde_minus: float


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostics produced by :func:`validate`."""

    symmetry_defect: float
    min_symplectic: float
    positive_definite: bool
    physical: bool
    issues: tuple[str, ...]


def _as_matrix(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (4, 4):
        raise DomainError(f"expected a 4x4 covariance matrix, got shape {sigma.shape}")
    return sigma


def build_standard_form(params: StateParams) -> np.ndarray:
    """Covariance matrix of the standard-form state with the given parameters.

    Raises :class:`NonPhysical` when a radicand of the off-diagonal entries
    is negative, i.e. when no state with the requested purities exists.
    """
    s, d, g, lam = params.s, params.d, params.g, params.lam
    if not s * s > d * d:
        raise ConstraintViolation(f"need s^2 > d^2, got s={s}, d={d}")
    f = (g * g + 1.0) * (lam - 1.0) / 2.0 - (2.0 * d * d + g) * (lam + 1.0)
    rad_local = (4.0 * d * d + f) ** 2 - 4.0 * g * g
    rad_global = (4.0 * s * s + f) ** 2 - 4.0 * g * g
    # tolerate tiny negative round-off on the boundary (e.g. lam = +1)
    clip = -1e-12 * max(1.0, g * g)
    if rad_local < clip:
        raise NonPhysical(
            f"local radicand (4d^2 + f)^2 - 4g^2 = {rad_local:.6g} < 0; "
            "no state with these purities exists"
        )
    if rad_global < clip:
        raise NonPhysical(
            f"global radicand (4s^2 + f)^2 - 4g^2 = {rad_global:.6g} < 0; "
            "no state with these purities exists"
        )
    den = 4.0 * math.sqrt(s * s - d * d)
    r1 = math.sqrt(max(rad_local, 0.0))
    r2 = math.sqrt(max(rad_global, 0.0))
    c_plus = (r1 + r2) / den
    c_minus = (r1 - r2) / den
    a = s + d
    b = s - d
    sigma = np.array(
        [
            [a, 0.0, c_plus, 0.0],
            [0.0, a, 0.0, c_minus],
            [c_plus, 0.0, b, 0.0],
            [0.0, c_minus, 0.0, b],
        ]
    )
    nu_min, _ = symplectic_eigenvalues(sigma)
    if nu_min < 1.0 - 1e-6:
        raise NonPhysical(
            f"constructed matrix has smallest symplectic eigenvalue {nu_min:.6g} < 1"
        )
    return sigma


def standard_form_entries(sigma) -> tuple[float, float, float, float]:
    """Extract (a, b, c+, c-) from a standard-form covariance matrix."""
    sigma = _as_matrix(sigma)
    return sigma[0, 0], sigma[2, 2], sigma[0, 2], sigma[1, 3]


def symplectic_eigenvalues(sigma) -> tuple[float, float]:
    """The two symplectic eigenvalues of ``sigma``, sorted ascending.

    Computed as the moduli of the eigenvalues of ``i * Omega * sigma``,
    which works for arbitrary (not necessarily standard-form) matrices.
    """
    sigma = _as_matrix(sigma)
    try:
        eigs = np.linalg.eigvals(1j * OMEGA @ sigma)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue solve failed: {exc}") from exc
    mods = np.sort(np.abs(eigs))
    return 0.5 * (mods[0] + mods[1]), 0.5 * (mods[2] + mods[3])


def standard_form_symplectic_eigenvalues(a, b, c_plus, c_minus):
    """Closed-form symplectic spectrum of a standard-form matrix.

    Used as a cross-check of the generic eigenvalue route:
    ``nu_{-+}^2 = (Dt -+ sqrt(Dt^2 - 4 det sigma)) / 2`` with
    ``Dt = a^2 + b^2 + 2 c+ c-``.
    """
    det = (a * b - c_plus**2) * (a * b - c_minus**2)
    dt = a * a + b * b + 2.0 * c_plus * c_minus
    disc = math.sqrt(max(dt * dt - 4.0 * det, 0.0))
    nu_minus = math.sqrt(max((dt - disc) / 2.0, 0.0))
    nu_plus = math.sqrt((dt + disc) / 2.0)
    return nu_minus, nu_plus


def validate(sigma, tol_phys: float = TOL_PHYS) -> ValidationReport:
    """Check symmetry, positive definiteness and the uncertainty bound.

    Never raises: all defects are reported in the returned record.
    """
    sigma = _as_matrix(sigma)
    defect = float(np.max(np.abs(sigma - sigma.T)))
    issues = []
    if defect > 0.0:
        issues.append(f"symmetry defect {defect:.3g}")
    try:
        np.linalg.cholesky(sigma + sigma.T)
        posdef = True
    except np.linalg.LinAlgError:
        posdef = False
        issues.append("not positive definite")
    try:
        nu_min, _ = symplectic_eigenvalues(0.5 * (sigma + sigma.T))
    except NumericalFailure:
        nu_min = math.nan
        issues.append("symplectic spectrum did not converge")
    physical = posdef and defect == 0.0 and nu_min >= 1.0 - tol_phys
    if not math.isnan(nu_min) and nu_min < 1.0 - tol_phys:
        issues.append(f"uncertainty bound violated: nu_min = {nu_min:.6g} < 1")
    return ValidationReport(
        symmetry_defect=defect,
        min_symplectic=float(nu_min),
        positive_definite=posdef,
        physical=physical,
        issues=tuple(issues),
    )


def require_physical(sigma, tol_phys: float = 1e-6) -> np.ndarray:
    """Return ``sigma`` unchanged or raise :class:`NonPhysical` with diagnostics."""
    report = validate(sigma, tol_phys=tol_phys)
    if not report.physical:
        raise NonPhysical("; ".join(report.issues) or "state failed validation")
    return _as_matrix(sigma)


def partial_transpose(sigma) -> np.ndarray:
    """Reflect the momentum of the second mode: ``P sigma P``."""
    sigma = _as_matrix(sigma)
    return PT_MATRIX @ sigma @ PT_MATRIX


def ppt_min_eigenvalue(sigma) -> float:
    """Smallest symplectic eigenvalue of the partially transposed matrix."""
    nu, _ = symplectic_eigenvalues(partial_transpose(sigma))
    return nu


def log_negativity(sigma) -> float:
    """Logarithmic negativity ``max(0, -ln nu_tilde_minus)``.

    Vanishes exactly when the PPT criterion ``nu_tilde_minus >= 1``
    certifies separability.
    """
    return max(0.0, -math.log(ppt_min_eigenvalue(sigma)))


def symplectic_data(sigma) -> SymplecticData:
    nu_minus, nu_plus = symplectic_eigenvalues(sigma)
    return SymplecticData(nu_minus, nu_plus, ppt_min_eigenvalue(sigma))


def purities(sigma) -> tuple[float, float, float]:
    """Global and local purities ``(mu, mu1, mu2)``.

    With the vacuum-is-identity normalisation ``mu = 1/sqrt(det sigma)``
    and each local purity is ``1/sqrt(det block)``.
    """
    sigma = _as_matrix(sigma)
    mu = 1.0 / math.sqrt(np.linalg.det(sigma))
    mu1 = 1.0 / math.sqrt(np.linalg.det(sigma[:2, :2]))
    mu2 = 1.0 / math.sqrt(np.linalg.det(sigma[2:, 2:]))
    return mu, mu1, mu2


def decorrelate(sigma) -> np.ndarray:
    """Tensor product of the local states: zero the off-diagonal blocks."""
    sigma = _as_matrix(sigma).copy()
    sigma[:2, 2:] = 0.0
    sigma[2:, :2] = 0.0
    return sigma


def d_from_nu(s: float, nu_tilde: float) -> float:
    """Local asymmetry reproducing ``nu_tilde`` on the slice g = 2d + 1, lam = +1."""
    if not 0.0 < nu_tilde <= s:
        raise DomainError(f"need 0 < nu_tilde <= s, got nu_tilde={nu_tilde}, s={s}")
    return -0.5 * (nu_tilde * nu_tilde - 2.0 * s * nu_tilde + 1.0)


def nu_from_d(s: float, d: float) -> float:
    """Smallest PPT symplectic eigenvalue on the slice g = 2d + 1, lam = +1."""
    disc = s * s - 2.0 * d - 1.0
    if disc < 0.0:
        raise DomainError(f"s^2 - 2d - 1 = {disc:.6g} < 0 has no real solution")
    return s - math.sqrt(disc)
