import math

import numpy as np
import pytest

from mtload import (MotCloud, Particle, PumpingDistribution, QuadrupoleField,
                    equilibrium_temperature, predict_mt_temperature,
                    sample_mot_atom, sample_mot_atoms,
                    sample_zeeman_substates, simulate_transfer,
                    transfer_energy_audit)
from mtload.constants import K_B, MU_B
from mtload.mc import Ensemble, seed_stream


def mot(sigma=200e-6, t=300e-6):
    return MotCloud(size_sigma=sigma, temperature=t, atom_number=1e7)


# -------------------------------------------------------------- sampling


def test_sampler_equipartition(cr):
    rng = seed_stream(11, "equi")
    ens = sample_mot_atoms(mot(), cr, 100_000, rng)
    speed_sq = np.sum(ens.velocities ** 2, axis=1)
    expected = 3 * K_B * 300e-6 / cr.mass
    stderr = speed_sq.std(ddof=1) / math.sqrt(len(speed_sq))
    assert abs(speed_sq.mean() - expected) < 3 * stderr


def test_sampler_mean_radius(cr):
    rng = seed_stream(12, "radius")
    ens = sample_mot_atoms(mot(), cr, 100_000, rng)
    radii = np.linalg.norm(ens.positions, axis=1)
    expected = math.sqrt(8 / math.pi) * 200e-6
    stderr = radii.std(ddof=1) / math.sqrt(len(radii))
    assert abs(radii.mean() - expected) < 3 * stderr


def test_sampler_point_reservoir(cr):
    rng = seed_stream(13, "point")
    ens = sample_mot_atoms(mot(sigma=0.0), cr, 1000, rng)
    assert np.all(ens.positions == 0.0)


def test_sampler_bit_reproducible(cr):
    a = sample_mot_atoms(mot(), cr, 500, seed_stream(14, "bits"))
    b = sample_mot_atoms(mot(), cr, 500, seed_stream(14, "bits"))
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.velocities, b.velocities)


def test_single_atom_sampler(cr):
    p = sample_mot_atom(mot(), cr, seed_stream(15, "one"))
    assert p.position.shape == (3,) and p.velocity.shape == (3,)


# -------------------------------------------------------------- pumping


def test_point_distribution_always_hits():
    dist = PumpingDistribution.point(4)
    draws = sample_zeeman_substates(dist, 1000, seed_stream(16, "pt"))
    assert np.all(draws == 4)
    assert dist.trapped_fraction == 1.0
    assert dist.mean_m == 4.0
    from mtload import sample_zeeman_substate
    assert sample_zeeman_substate(dist, seed_stream(16, "pt1")) == 4


def test_uniform_distribution_trapped_fraction():
    dist = PumpingDistribution.uniform()
    assert dist.trapped_fraction == pytest.approx(4 / 9, rel=1e-12)
    draws = sample_zeeman_substates(dist, 90_000, seed_stream(17, "uni"))
    frac = np.mean(draws > 0)
    # multinomial error bound: 3 sigma of a Bernoulli(4/9) mean
    bound = 3 * math.sqrt((4 / 9) * (5 / 9) / 90_000)
    assert abs(frac - 4 / 9) < bound


def test_categorical_frequencies_match():
    probs = (0.05, 0.0, 0.1, 0.05, 0.2, 0.1, 0.1, 0.25, 0.15)
    dist = PumpingDistribution(probs)
    draws = sample_zeeman_substates(dist, 120_000, seed_stream(18, "cat"))
    for m, p in zip(range(-4, 5), probs):
        freq = np.mean(draws == m)
        bound = 3 * math.sqrt(max(p * (1 - p), 1e-9) / 120_000)
        assert abs(freq - p) <= bound + 1e-12


def test_distribution_validation():
    with pytest.raises(ValueError):
        PumpingDistribution((1.0,) * 9)
    with pytest.raises(ValueError):
        PumpingDistribution((-0.1, 0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1))
    with pytest.raises(ValueError):
        PumpingDistribution.point(5)


# ------------------------------------------------------------ energetics


def test_audit_at_origin(cr, field):
    p = Particle(position=np.zeros(3), velocity=np.array([0.1, 0.0, 0.0]),
                 zeeman_m=4)
    kinetic, potential = transfer_energy_audit(p, field, cr)
    assert potential == 0.0
    assert kinetic == pytest.approx(0.5 * cr.mass * 0.01, rel=1e-12)


def test_audit_reference_value(cr):
    # g_d m_d = 6, b = 0.2 T/m, |r| = 100 um
    p = Particle(position=np.array([1e-4, 0.0, 0.0]),
                 velocity=np.zeros(3), zeeman_m=4)
    _, potential = transfer_energy_audit(p, QuadrupoleField(0.2), cr)
    assert potential == pytest.approx(6 * MU_B * 0.2 * 1e-4, rel=1e-12)
    assert potential == pytest.approx(1.11e-27, rel=5e-3)


def test_audit_linearity(cr, field):
    def pot(r, m, grad):
        p = Particle(position=np.array([r, 0.0, 0.0]),
                     velocity=np.zeros(3), zeeman_m=m)
        return transfer_energy_audit(p, QuadrupoleField(grad), cr)[1]

    base = pot(1e-4, 2, 0.1)
    assert pot(2e-4, 2, 0.1) == pytest.approx(2 * base, rel=1e-12)
    assert pot(1e-4, 4, 0.1) == pytest.approx(2 * base, rel=1e-12)
    assert pot(1e-4, 2, 0.2) == pytest.approx(2 * base, rel=1e-12)


def test_audit_rejects_untrapped(cr, field):
    p = Particle(position=np.zeros(3), velocity=np.zeros(3), zeeman_m=-1)
    with pytest.raises(ValueError):
        transfer_energy_audit(p, field, cr)
    p_unset = Particle(position=np.zeros(3), velocity=np.zeros(3))
    with pytest.raises(ValueError):
        transfer_energy_audit(p_unset, field, cr)


# -------------------------------------------------- virial equilibrium


def test_point_transfer_recovers_third_of_reservoir_temperature(cr, field):
    rng = seed_stream(19, "third")
    ens = sample_mot_atoms(mot(sigma=0.0), cr, 200_000, rng)
    ens.zeeman_m = np.full(len(ens), 4)
    t_pred = equilibrium_temperature(ens, field, cr)
    assert t_pred == pytest.approx(100e-6, rel=0.01)


def test_energy_scaling_linearity(cr, field):
    rng = seed_stream(20, "scale")
    ens = sample_mot_atoms(mot(), cr, 20_000, rng)
    ens.zeeman_m = np.full(len(ens), 4)
    t1 = equilibrium_temperature(ens, field, cr)
    doubled = Ensemble(ens.positions * 2, ens.velocities * math.sqrt(2),
                       ens.zeeman_m)
    t2 = equilibrium_temperature(doubled, field, cr)
    assert t2 == pytest.approx(2 * t1, rel=1e-12)


def test_equilibrium_rejects_bad_ensembles(cr, field):
    ens = Ensemble(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0, int))
    with pytest.raises(ValueError):
        equilibrium_temperature(ens, field, cr)
    mixed = Ensemble(np.zeros((2, 3)), np.zeros((2, 3)),
                     np.array([4, -1]))
    with pytest.raises(ValueError):
        equilibrium_temperature(mixed, field, cr)


@pytest.mark.parametrize("sigma", [0.0, 100e-6, 200e-6])
@pytest.mark.parametrize("gradient", [0.1, 0.2])
@pytest.mark.parametrize("mean_m", [3, 4])
def test_transfer_oracle_matches_prediction(cr, sigma, gradient, mean_m):
    fld = QuadrupoleField(gradient)
    cloud = mot(sigma=sigma)
    mu_bar = cr.lande_g_d * mean_m * MU_B
    expected = predict_mt_temperature(cloud, fld, mu_bar)
    report = simulate_transfer(cloud, PumpingDistribution.point(mean_m),
                               fld, cr, 100_000,
                               seed_stream(21, f"or-{sigma}-{gradient}-{mean_m}"))
    assert abs(report.temperature_mc / expected - 1.0) < 0.02
    if sigma == 0.0:
        # statistical consistency with the exact T/3 limit
        diff = abs(report.temperature_mc - expected)
        assert diff < 3 * report.temperature_stderr


def test_transfer_mean_radius_within_three_sigma(cr, field):
    report = simulate_transfer(mot(), PumpingDistribution.point(4), field,
                               cr, 100_000, seed_stream(22, "radius"))
    diff = abs(report.mean_radius - report.mean_radius_expected)
    assert diff < 3 * report.mean_radius_stderr


def test_transfer_uniform_pumping_trapped_fraction(cr, field):
    report = simulate_transfer(mot(), PumpingDistribution.uniform(), field,
                               cr, 90_000, seed_stream(23, "frac"))
    assert report.trapped_fraction == pytest.approx(4 / 9, abs=0.01)


def test_transfer_deterministic(cr, field):
    a = simulate_transfer(mot(), PumpingDistribution.point(4), field, cr,
                          10_000, seed_stream(24, "det"))
    b = simulate_transfer(mot(), PumpingDistribution.point(4), field, cr,
                          10_000, seed_stream(24, "det"))
    assert a == b


def test_anisotropic_potential_flag_changes_energy(cr, field):
    rng = seed_stream(25, "aniso")
    ens = sample_mot_atoms(mot(), cr, 10_000, rng)
    ens.zeeman_m = np.full(len(ens), 4)
    t_iso = equilibrium_temperature(ens, field, cr)
    t_aniso = equilibrium_temperature(ens, field, cr, anisotropic=True)
    assert t_iso != t_aniso
