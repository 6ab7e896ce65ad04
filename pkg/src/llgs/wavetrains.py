"""Existence and parametrization of wavetrains; stability of +-e3.

Wavetrains are relative equilibria m(x,t) = e^{i(kx - omega t)} m0 rotating
about the e3-axis.  All of them share the frequency omega = -beta/alpha and
their polar angle solves cos(theta) = (h - beta/alpha)/(mu - k^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFamilyError
from .model import AnisotropyRegime, Grid1D, MagnetizationField, ModelParams, classify_anisotropy


@dataclass(frozen=True)
class Wavetrain:
    """A wavetrain record: wavenumber k, frequency omega, polar angle theta.

    theta is canonical in [0, pi]; the mirror theta -> -theta partner is the
    same point of the (k, m3)-diagram with reflected azimuthal phase and is
    tracked by `lower_branch`.
    """

    k: float
    omega: float
    theta: float
    lower_branch: bool = False

    @property
    def m3(self) -> float:
        return math.cos(self.theta)

    @property
    def r(self) -> float:
        return math.sin(self.theta)


def wavetrain_at(params: ModelParams, k: float, lower_branch: bool = False):
    """Wavetrain with wavenumber k, or None if it does not exist.

    Raises DegenerateFamilyError when mu = k^2 and h = beta/alpha (theta is
    unspecified there).
    """
    b = params.force_balance
    denom = params.mu - k * k
    if denom == 0.0:
        if b == 0.0:
            raise DegenerateFamilyError(
                "mu = k^2 with h = beta/alpha: one-parameter family, theta unspecified"
            )
        return None
    c = b / denom
    if abs(c) > 1.0:
        return None
    return Wavetrain(
        k=k,
        omega=-params.beta / params.alpha,
        theta=math.acos(c),
        lower_branch=lower_branch,
    )


@dataclass(frozen=True)
class ExistenceRegion:
    """Admissible wavenumber intervals for k >= 0 (mirror symmetric in k).

    Intervals are open at endpoints where the amplitude r vanishes
    (|cos theta| = 1); those endpoints sit on the boundary parabolas
    mu = k^2 +- (h - beta/alpha) and are listed in `boundary_k`.
    """

    regime: AnisotropyRegime
    intervals: tuple
    boundary_k: tuple
    n_theta_branches: int = 1


def admissible_wavenumbers(params: ModelParams) -> ExistenceRegion:
    """Admissible k-intervals for wavetrain existence, per regime.

    Supercritical: [0, sqrt(mu - |b|)) and (sqrt(mu + |b|), inf).
    Subcritical: (sqrt(mu + |b|), inf) only.
    Subsubcritical: all k >= 0 (two theta-branches over the k-axis).
    """
    regime = classify_anisotropy(params)
    mu = params.mu
    b = abs(params.force_balance)
    if regime is AnisotropyRegime.SUPERCRITICAL:
        lo, hi = math.sqrt(mu - b), math.sqrt(mu + b)
        if b == 0.0:
            # degenerate balance: theta = pi/2 for every k except |k| = sqrt(mu)
            return ExistenceRegion(regime, ((0.0, lo), (lo, math.inf)), (lo,), 2)
        return ExistenceRegion(regime, ((0.0, lo), (hi, math.inf)), (lo, hi), 2)
    if regime is AnisotropyRegime.SUBCRITICAL:
        hi = math.sqrt(mu + b) if mu + b > 0 else 0.0
        return ExistenceRegion(regime, ((hi, math.inf),), (hi,), 2)
    if regime is AnisotropyRegime.SUBSUBCRITICAL:
        return ExistenceRegion(regime, ((0.0, math.inf),), (), 2)
    # degenerate boundary: report by direct sampling criterion
    if mu < 0 or (mu == 0 and b == 0):
        return ExistenceRegion(regime, ((0.0, math.inf),), (), 2)
    if mu == b:  # touches r=0 exactly at k=0
        hi = math.sqrt(2 * mu) if mu > 0 else 0.0
        return ExistenceRegion(regime, ((hi, math.inf),), (0.0, hi), 2)
    # mu == -b or mu == 0 with b > 0
    hi = math.sqrt(mu + b)
    return ExistenceRegion(regime, ((hi, math.inf),), (hi,), 2)


def e3_eigenvalues(params: ModelParams, sign: int, ell: float):
    """Both linearization eigenvalues of the equilibrium sign*e3 at Fourier mode ell.

    (1 + alpha^2) Re(lambda) = alpha*(mu -+ (h - beta/alpha) - ell^2) and
    Im(lambda) = sigma*(-+ Re(lambda) + beta/alpha), sigma = +-1; the upper
    signs belong to +e3.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = params.alpha
    re = a * (params.mu - sign * params.force_balance - ell * ell) / (1.0 + a * a)
    lam = []
    for sigma in (1, -1):
        im = sigma * (-sign * re + params.beta / params.alpha)
        lam.append(complex(re, im))
    return tuple(lam)


@dataclass(frozen=True)
class EquilibriumStability:
    """Stability verdicts for +-e3; None means marginal (degenerate boundary)."""

    plus_stable: bool | None
    minus_stable: bool | None
    marginal: bool = False
    hopf_frequency: float = 0.0


def e3_stability(params: ModelParams) -> EquilibriumStability:
    """L2-stability of +-e3 from the sign of Re(lambda) at ell = 0.

    Both unstable iff supercritical, both stable iff subsubcritical.  In the
    subcritical regime the equilibrium aligned against the force balance is
    the unstable one: for h > beta/alpha that is -e3.
    """
    b = params.force_balance
    hopf = params.beta / params.alpha
    growth_plus = params.mu - b
    growth_minus = params.mu + b
    if growth_plus == 0.0 or growth_minus == 0.0:
        return EquilibriumStability(
            plus_stable=None if growth_plus == 0.0 else growth_plus < 0,
            minus_stable=None if growth_minus == 0.0 else growth_minus < 0,
            marginal=True,
            hopf_frequency=hopf,
        )
    return EquilibriumStability(
        plus_stable=growth_plus < 0,
        minus_stable=growth_minus < 0,
        hopf_frequency=hopf,
    )


def wavetrain_field(wt: Wavetrain, grid: Grid1D, phase: float = 0.0) -> MagnetizationField:
    """Sample the wavetrain as a magnetization field at t = 0."""
    ang = wt.k * grid.x + phase
    r = wt.r if not wt.lower_branch else -wt.r
    values = np.column_stack(
        [r * np.cos(ang), r * np.sin(ang), np.full(grid.n, wt.m3)]
    )
    return MagnetizationField(grid, values)
