"""Collision kinematics linking the reservoir and the magnetically trapped
cloud: mean collisional velocity, effective excited-atom density, and the
finite-reservoir-size overlap correction."""

import math
from dataclasses import dataclass

from scipy import integrate

from .constants import K_B
from .species import SpeciesData


@dataclass(frozen=True)
class CollisionInput:
    """Collision parameters: cloud temperatures and the two cross sections
    (reservoir-trap inelastic, trap-trap from the two-body coefficient)."""

    t_mot: float      # K
    t_mt: float       # K
    sigma_ed: float   # m^2
    sigma_dd: float   # m^2

    def __post_init__(self):
        if self.t_mot <= 0 or self.t_mt <= 0:
            raise ValueError("temperatures must be positive")
        if self.sigma_ed < 0 or self.sigma_dd < 0:
            raise ValueError("cross sections must be >= 0")


def mean_collision_velocity(t_mot: float, t_mt: float,
                            species: SpeciesData) -> float:
    """Average relative velocity between the two thermal clouds,

    v = sqrt((T_MOT + T_MT) * 8 k_B / (pi m)).
    """
    if t_mot < 0 or t_mt < 0:
        raise ValueError("temperatures must be >= 0")
    if t_mot == 0 and t_mt == 0:
        raise ValueError("at least one temperature must be positive")
    return math.sqrt((t_mot + t_mt) * 8.0 * K_B / (math.pi * species.mass))


def excited_mot_density(n_mot: float, p_e: float, v_mt: float) -> float:
    """Effective density of excited reservoir atoms: the excited-atom
    number spread over the trapped-cloud volume, N_MOT * P_e / V."""
    if v_mt <= 0:
        raise ValueError("v_mt must be positive")
    return n_mot * p_e / v_mt


def overlap_correction(size_ratio: float) -> float:
    """Finite-reservoir-size correction factor for the collisional loss
    rate, as a function of the size ratio sigma/r (reservoir Gaussian
    radius over trapped-cloud 1/e radius).

    Defined as the density-weighted overlap of a normalized isotropic
    Gaussian of radius ``size_ratio`` (in units of the 1/e radius) with the
    trapped-cloud profile relative to its peak, sag term dropped:

        f(q) = E[ exp(-sqrt(x^2 + y^2 + 4 z^2)) ],  (x,y,z) ~ N(0, q^2 I).

    f -> 1 for a point-like reservoir and decreases monotonically with q.
    The exact integrand is a modeling choice; only the magnitude range is
    physically constrained, not a point value.
    """
    if not 0.0 < size_ratio <= 1.0:
        raise ValueError("size_ratio must be in (0, 1]")
    sig = size_ratio
    norm = 1.0 / (sig * sig * math.sqrt(2.0 * math.pi * sig * sig))

    def integrand(z, rho):
        gauss = (norm * rho * math.exp(-rho * rho / (2.0 * sig * sig))
                 * math.exp(-z * z / (2.0 * sig * sig)))
        return gauss * math.exp(-math.sqrt(rho * rho + 4.0 * z * z))

    span = 12.0 * sig
    val, _ = integrate.dblquad(integrand, 0.0, span,
                               lambda rho: -span, lambda rho: span,
                               epsabs=1e-12, epsrel=1e-9)
    return val


def cross_section_from_beta(beta: float, v: float) -> float:
    """Operational cross section sigma = beta / v for a two-body loss
    coefficient beta at mean collisional velocity v. No identical-particle
    factors are applied."""
    if v <= 0:
        raise ValueError("v must be positive")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return beta / v
