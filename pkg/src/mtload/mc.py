"""Seeded Monte Carlo model of the reservoir-to-trap transfer.

This is the independent check on the virial-theorem temperature
prediction: atoms are sampled from the reservoir, their kinetic and
potential energies audited at the moment of transfer, and the equilibrium
temperature follows from the linear-potential virial relation
<E_total> = (9/2) k_B T. No collisional dynamics is simulated; ergodic
redistribution is assumed, exactly as in the analytic estimate.

All randomness is drawn from named seed streams; identical seeds give
bit-identical ensembles.
"""

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .cloud import MotCloud, QuadrupoleField
from .constants import K_B, MU_B
from .species import SpeciesData

ZEEMAN_M_VALUES = tuple(range(-4, 5))


def seed_stream(seed: int, label: str) -> np.random.Generator:
    """Deterministic generator for a named stream of a master seed."""
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), zlib.crc32(label.encode("utf-8"))])
    )


@dataclass
class Particle:
    """Single transferred atom: position (m), velocity (m/s), and the
    magnetic quantum number of the dark substate it was pumped into."""

    position: np.ndarray
    velocity: np.ndarray
    zeeman_m: int | None = None

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        if self.position.shape != (3,) or self.velocity.shape != (3,):
            raise ValueError("position and velocity must be 3-vectors")
        if self.zeeman_m is not None and self.zeeman_m not in ZEEMAN_M_VALUES:
            raise ValueError("zeeman_m must lie in [-4, 4]")


@dataclass(frozen=True)
class PumpingDistribution:
    """Probabilities of landing in each dark substate m = -4..4 after
    optical pumping. The true distribution is not predicted here, only its
    mean is experimentally constrained, so it is always an input."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (9,):
            raise ValueError("need 9 probabilities for m = -4..4")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        object.__setattr__(self, "probabilities", tuple(p.tolist()))

    @classmethod
    def point(cls, m: int) -> "PumpingDistribution":
        if m not in ZEEMAN_M_VALUES:
            raise ValueError("m must lie in [-4, 4]")
        probs = [0.0] * 9
        probs[m + 4] = 1.0
        return cls(tuple(probs))

    @classmethod
    def uniform(cls) -> "PumpingDistribution":
        return cls(tuple([1.0 / 9.0] * 9))

    @property
    def trapped_fraction(self) -> float:
        """Probability of a low-field-seeking (m > 0) outcome."""
        return float(sum(self.probabilities[5:]))

    @property
    def mean_m(self) -> float:
        return float(sum(m * p for m, p in
                         zip(ZEEMAN_M_VALUES, self.probabilities)))


@dataclass
class Ensemble:
    """Vectorized particle ensemble."""

    positions: np.ndarray            # (n, 3) m
    velocities: np.ndarray           # (n, 3) m/s
    zeeman_m: np.ndarray | None = None  # (n,) int

    def __len__(self):
        return self.positions.shape[0]

    def trapped(self) -> "Ensemble":
        """Sub-ensemble of low-field seekers (m > 0)."""
        if self.zeeman_m is None:
            raise ValueError("ensemble has no substate assignment yet")
        keep = self.zeeman_m > 0
        return Ensemble(self.positions[keep], self.velocities[keep],
                        self.zeeman_m[keep])


def sample_mot_atoms(mot: MotCloud, species: SpeciesData, count: int,
                     rng: np.random.Generator) -> Ensemble:
    """Sample reservoir atoms: isotropic Gaussian positions of radius
    sigma per axis, Maxwell-Boltzmann velocities at the reservoir
    temperature."""
    if count < 1:
        raise ValueError("count must be >= 1")
    positions = rng.normal(0.0, 1.0, size=(count, 3)) * mot.size_sigma
    v_th = math.sqrt(K_B * mot.temperature / species.mass)
    velocities = rng.normal(0.0, v_th, size=(count, 3))
    return Ensemble(positions=positions, velocities=velocities)


def sample_mot_atom(mot: MotCloud, species: SpeciesData,
                    rng: np.random.Generator) -> Particle:
    ens = sample_mot_atoms(mot, species, 1, rng)
    return Particle(ens.positions[0], ens.velocities[0])


def sample_zeeman_substates(dist: PumpingDistribution, count: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Categorical draw of dark substates for ``count`` atoms."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return rng.choice(np.array(ZEEMAN_M_VALUES), size=count,
                      p=np.asarray(dist.probabilities))


def sample_zeeman_substate(dist: PumpingDistribution,
                           rng: np.random.Generator) -> int:
    return int(sample_zeeman_substates(dist, 1, rng)[0])


def transfer_energy_audit(particle: Particle, field: QuadrupoleField,
                          species: SpeciesData) -> tuple[float, float]:
    """Kinetic and potential energy of one trapped atom at transfer.

    The potential uses the isotropic mean-gradient convention,
    U = g_d m_d mu_B b |r|, matching the analytic transfer-temperature
    estimate. High-field seekers (m <= 0) are not trapped and rejected.
    """
    if particle.zeeman_m is None or particle.zeeman_m <= 0:
        raise ValueError("particle is not in a trapped (m > 0) substate")
    kinetic = 0.5 * species.mass * float(particle.velocity @ particle.velocity)
    radius = float(np.linalg.norm(particle.position))
    potential = (species.lande_g_d * particle.zeeman_m * MU_B
                 * field.gradient * radius)
    return kinetic, potential


def ensemble_energies(ensemble: Ensemble, field: QuadrupoleField,
                      species: SpeciesData,
                      anisotropic: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Per-particle (kinetic, potential) arrays for a trapped ensemble.

    ``anisotropic=True`` switches the potential to the quadrupole form
    mu (b/2) sqrt(x^2 + y^2 + 4 z^2) for sensitivity studies; the default
    isotropic |r| convention is what the analytic estimate assumes.
    """
    if ensemble.zeeman_m is None:
        raise ValueError("ensemble has no substate assignment")
    if len(ensemble) == 0:
        raise ValueError("empty ensemble")
    if np.any(ensemble.zeeman_m <= 0):
        raise ValueError("ensemble contains untrapped (m <= 0) atoms")
    kinetic = 0.5 * species.mass * np.sum(ensemble.velocities ** 2, axis=1)
    mu = species.lande_g_d * ensemble.zeeman_m * MU_B
    pos = ensemble.positions
    if anisotropic:
        radius = np.sqrt(pos[:, 0] ** 2 + pos[:, 1] ** 2 + 4.0 * pos[:, 2] ** 2)
        potential = mu * (field.gradient / 2.0) * radius
    else:
        radius = np.linalg.norm(pos, axis=1)
        potential = mu * field.gradient * radius
    return kinetic, potential


def equilibrium_temperature(ensemble: Ensemble, field: QuadrupoleField,
                            species: SpeciesData,
                            anisotropic: bool = False) -> float:
    """Virial equilibrium temperature of the transferred ensemble,
    T = 2 <E_kin + E_pot> / (9 k_B) for a linear potential."""
    kinetic, potential = ensemble_energies(ensemble, field, species,
                                           anisotropic)
    return 2.0 * float(np.mean(kinetic + potential)) / (9.0 * K_B)


@dataclass(frozen=True)
class TransferReport:
    """Summary of one seeded transfer simulation."""

    particles: int
    trapped: int
    temperature_mc: float        # K
    temperature_stderr: float    # K, statistical
    mean_radius: float           # m
    mean_radius_expected: float  # m, sqrt(8/pi) sigma
    mean_radius_stderr: float    # m

    @property
    def trapped_fraction(self) -> float:
        return self.trapped / self.particles


def simulate_transfer(mot: MotCloud, dist: PumpingDistribution,
                      field: QuadrupoleField, species: SpeciesData,
                      count: int, rng: np.random.Generator,
                      anisotropic: bool = False) -> TransferReport:
    """Run one transfer simulation with the supplied generator (derive it
    from a named seed stream for reproducibility): sample, pump, keep the
    low-field seekers, audit energies."""
    ensemble = sample_mot_atoms(mot, species, count, rng)
    ensemble.zeeman_m = sample_zeeman_substates(dist, count, rng)
    trapped = ensemble.trapped()
    if len(trapped) == 0:
        raise ValueError("no trapped atoms: pumping distribution has no "
                         "m > 0 weight or count too small")
    kinetic, potential = ensemble_energies(trapped, field, species,
                                           anisotropic)
    total = kinetic + potential
    n = len(trapped)
    t_mc = 2.0 * float(total.mean()) / (9.0 * K_B)
    t_err = (2.0 * float(total.std(ddof=1)) / (9.0 * K_B * math.sqrt(n))
             if n > 1 else 0.0)
    radii = np.linalg.norm(trapped.positions, axis=1)
    return TransferReport(
        particles=count,
        trapped=n,
        temperature_mc=t_mc,
        temperature_stderr=t_err,
        mean_radius=float(radii.mean()),
        mean_radius_expected=math.sqrt(8.0 / math.pi) * mot.size_sigma,
        mean_radius_stderr=(float(radii.std(ddof=1)) / math.sqrt(n)
                            if n > 1 else 0.0),
    )
