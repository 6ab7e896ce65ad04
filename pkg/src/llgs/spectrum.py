"""Essential spectrum of wavetrains: dispersion relation and sideband boundary.

The linearization about a wavetrain in the comoving frame (time rescaled by
1 + alpha^2) has constant coefficients; an exponential ansatz exp(nu*y)
reduces the eigenvalue problem to the 2x2 matrix A(nu, c_ph).  The L2
spectrum consists of the roots lambda of det(A(i*ell, c_ph) - lambda) = 0
over real Fourier wavenumbers ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroAmplitudeError
from .model import AnisotropyRegime, ModelParams, classify_anisotropy
from .wavetrains import Wavetrain


def _require_amplitude(base: Wavetrain):
    if base.r <= 0.0:
        raise ZeroAmplitudeError(
            "linearization needs r > 0; use e3_eigenvalues for the constant states"
        )


def linearization(base: Wavetrain, params: ModelParams, nu: complex, c_ph: float = 0.0) -> np.ndarray:
    """The 2x2 matrix A(nu, c_ph) of the comoving-frame linearization."""
    _require_amplitude(base)
    a = params.alpha
    k, m3, r = base.k, base.m3, base.r
    w = nu * (-nu + 2 * a * k * m3)
    diag = a * nu * nu + (c_ph + 2 * k * m3) * nu
    return np.array(
        [
            [diag, -w / r ** 2 + k * k - params.mu],
            [r ** 2 * w, diag + a * r ** 2 * (k * k - params.mu)],
        ],
        dtype=complex,
    )


def trace_closed_form(base: Wavetrain, params: ModelParams, nu: complex) -> complex:
    """tr A(nu, 0) = 2 nu (alpha nu + 2 k m3) + alpha r^2 (k^2 - mu)."""
    a = params.alpha
    return 2 * nu * (a * nu + 2 * base.k * base.m3) + a * base.r ** 2 * (
        base.k ** 2 - params.mu
    )


def det_closed_form(base: Wavetrain, params: ModelParams, nu: complex) -> complex:
    """det A(nu, 0) = (1+alpha^2) nu^2 (nu^2 + 4 k^2 m3^2 + r^2 (k^2 - mu))."""
    a = params.alpha
    return (
        (1 + a * a)
        * nu ** 2
        * (nu ** 2 + 4 * base.k ** 2 * base.m3 ** 2 + base.r ** 2 * (base.k ** 2 - params.mu))
    )


def dispersion(
    base: Wavetrain,
    params: ModelParams,
    lam: complex,
    nu: complex,
    c_ph: float = 0.0,
) -> complex:
    """d_{c_ph}(lambda, nu) = det(A(nu, c_ph) - lambda*I).

    Satisfies the shift identity d_{c_ph}(lambda, nu) = d_0(lambda - c_ph*nu, nu).
    """
    A = linearization(base, params, nu, c_ph)
    return (A[0, 0] - lam) * (A[1, 1] - lam) - A[0, 1] * A[1, 0]


def _roots_at(base, params, nu, c_ph):
    """Two roots of the quadratic dispersion relation at fixed nu."""
    tr = trace_closed_form(base, params, nu) + 2 * c_ph * nu
    det = det_closed_form(base, params, nu) + c_ph * nu * (
        trace_closed_form(base, params, nu) + c_ph * nu
    )
    disc = np.sqrt(tr * tr / 4 - det + 0j)
    return tr / 2 + disc, tr / 2 - disc


@dataclass
class SpectrumBranch:
    """One continuously ordered branch ell -> lambda(i ell)."""

    ell: np.ndarray
    lam: np.ndarray
    branch_id: int

    def max_residual(self, base: Wavetrain, params: ModelParams, c_ph: float = 0.0) -> float:
        res = [abs(dispersion(base, params, l, 1j * e, c_ph)) for e, l in zip(self.ell, self.lam)]
        return float(max(res))


def spectrum_curves(
    base: Wavetrain,
    params: ModelParams,
    ell_max: float,
    n_samples: int,
    c_ph: float = 0.0,
):
    """Sample both spectrum branches over ell in [0, ell_max].

    Branch 1 passes through the origin (translation mode); roots are matched
    along the ell-grid by nearest-neighbor continuation, seeded at ell = 0
    with the explicit eigenvalues {0, alpha r^2 (k^2 - mu)} of A(0, 0).
    """
    _require_amplitude(base)
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    ells = np.linspace(0.0, ell_max, n_samples)
    lam1 = np.empty(n_samples, dtype=complex)
    lam2 = np.empty(n_samples, dtype=complex)
    lam1[0] = 0.0
    lam2[0] = params.alpha * base.r ** 2 * (base.k ** 2 - params.mu)
    for i, ell in enumerate(ells[1:], start=1):
        ra, rb = _roots_at(base, params, 1j * ell, c_ph)
        # nearest-neighbor branch continuation
        keep = abs(ra - lam1[i - 1]) + abs(rb - lam2[i - 1])
        swap = abs(rb - lam1[i - 1]) + abs(ra - lam2[i - 1])
        lam1[i], lam2[i] = (ra, rb) if keep <= swap else (rb, ra)
    return (
        SpectrumBranch(ells, lam1, branch_id=1),
        SpectrumBranch(ells, lam2, branch_id=2),
    )


def physical_growth_rate(lam: complex, params: ModelParams) -> float:
    """Convert a dispersion-relation eigenvalue to a physical-time rate.

    The comoving-frame linearization is posed in the rescaled time
    t/(1 + alpha^2); PDE perturbations grow like exp(Re lam/(1+alpha^2) t).
    """
    return lam.real / (1.0 + params.alpha ** 2)


def sideband_polynomial(params: ModelParams, K: float) -> float:
    """f(K) = (3K + mu) (beta/alpha - h)^2 + (K - mu)^3, K = k^2.

    Sign changes of f mark sideband instabilities.
    """
    b2 = params.force_balance ** 2
    return (3 * K + params.mu) * b2 + (K - params.mu) ** 3


def sideband_polynomial_expanded(params: ModelParams, K: float) -> float:
    """K^3 - 3 mu K^2 + 3 (mu^2 + b^2) K + mu (b^2 - mu^2), same polynomial."""
    mu = params.mu
    b2 = params.force_balance ** 2
    return K ** 3 - 3 * mu * K ** 2 + 3 * (mu * mu + b2) * K + mu * (b2 - mu * mu)


def _sideband_prime(params: ModelParams, K: float) -> float:
    return 3 * params.force_balance ** 2 + 3 * (K - params.mu) ** 2


def curvature_factor(params: ModelParams, k: float) -> float:
    """D = (3k^2 + mu) (beta/alpha - h)^2/(k^2 - mu)^2 + k^2 - mu.

    The curvature of the spectrum branch through the origin is
    (1 + alpha^2) * D / (alpha r^2 (mu - k^2)).
    """
    K = k * k
    b2 = params.force_balance ** 2
    return (3 * K + params.mu) * b2 / (K - params.mu) ** 2 + K - params.mu


@dataclass
class SidebandReport:
    k_star: float | None
    K_star: float | None
    stable_band: bool
    note: str = ""

    def D(self, params: ModelParams, k: float) -> float:
        return curvature_factor(params, k)


def sideband_wavenumber(params: ModelParams, tol: float = 1e-12) -> SidebandReport:
    """Critical wavenumber k_star of the sideband instability.

    Requires the supercritical regime; K_star is the unique root of f in
    (0, mu), bracketed by f(0) < 0 < f(mu) and found by bisection with a
    Newton polish.  Outside the supercritical regime all wavetrains are
    unstable and no stable band exists.
    """
    if classify_anisotropy(params) is not AnisotropyRegime.SUPERCRITICAL or params.mu <= 0:
        return SidebandReport(None, None, False, "no stable band outside supercritical regime")
    mu = params.mu
    if params.force_balance == 0.0:
        # f(K) = (K - mu)^3: the whole band k^2 < mu is sideband-stable
        return SidebandReport(math.sqrt(mu), mu, True, "degenerate balance h = beta/alpha")
    lo, hi = 0.0, mu
    assert sideband_polynomial(params, lo) < 0 < sideband_polynomial(params, hi)
    # f' = 3b^2 + 3(K - mu)^2 > 0: monotone on the bracket (sampled check)
    samples = np.linspace(lo, hi, 101)
    assert all(_sideband_prime(params, K) > 0 for K in samples)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sideband_polynomial(params, mid) < 0:
            lo = mid
        else:
            hi = mid
    K = 0.5 * (lo + hi)
    for _ in range(3):
        K -= sideband_polynomial(params, K) / _sideband_prime(params, K)
    return SidebandReport(math.sqrt(K), K, True)


class WavetrainStability:
    STABLE = "stable"
    UNSTABLE_K2_EXCEEDS_MU = "unstable-k2-exceeds-mu"
    UNSTABLE_EASY_AXIS = "unstable-easy-axis"
    UNSTABLE_SIDEBAND = "unstable-sideband"
    MARGINAL_SIDEBAND = "marginal-sideband"


def classify_wavetrain_stability(base: Wavetrain, params: ModelParams, tol: float = 1e-10) -> str:
    """Decision tree for the spectral stability of a wavetrain."""
    if params.mu < 0:
        return WavetrainStability.UNSTABLE_EASY_AXIS
    if base.k ** 2 > params.mu:
        return WavetrainStability.UNSTABLE_K2_EXCEEDS_MU
    report = sideband_wavenumber(params)
    if report.k_star is None:
        return WavetrainStability.UNSTABLE_SIDEBAND
    if abs(abs(base.k) - report.k_star) <= tol:
        return WavetrainStability.MARGINAL_SIDEBAND
    if abs(base.k) < report.k_star:
        return WavetrainStability.STABLE
    return WavetrainStability.UNSTABLE_SIDEBAND


@dataclass
class ExclusionReport:
    """Confirms the absence of Hopf/Turing/fold marginal configurations."""

    hopf_excluded: bool
    hopf_rhs: float  # r^2 (k^2 - mu); Hopf needs 2 ell^2 equal to this
    turing_excluded: bool
    D: float
    det_roots_ell: tuple  # nonzero real roots of det A(i ell, 0), if any
    origin_curve_count: int


def exclusion_checks(base: Wavetrain, params: ModelParams) -> ExclusionReport:
    """Check that no Hopf or Turing instability can occur for k^2 < mu.

    Hopf would require 2 ell^2 = r^2 (k^2 - mu) with real ell; Turing would
    require a nonzero real root ell of det A(i ell, 0) = (1+alpha^2) ell^2
    (ell^2 - D) with marginal crossing, which implies D > 0 (already
    sideband-unstable).  A single curve of spectrum is attached to the origin.
    """
    _require_amplitude(base)
    hopf_rhs = base.r ** 2 * (base.k ** 2 - params.mu)
    D = curvature_factor(params, base.k)
    roots = (math.sqrt(D), -math.sqrt(D)) if D > 0 else ()
    return ExclusionReport(
        hopf_excluded=hopf_rhs < 0,
        hopf_rhs=hopf_rhs,
        turing_excluded=D < 0,
        D=D,
        det_roots_ell=roots,
        origin_curve_count=1,
    )
