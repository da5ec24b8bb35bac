"""Scenario-driven pipelines behind the CLI commands.

Each function is a pure function of (scenario, seed): it composes the
physics modules, optionally injects seeded multiplicative noise, and
returns a ResultTable (plus fit summaries where the measurement protocol
includes one). All derived intermediate quantities are recorded as notes
so an output file documents how it was produced.
"""

from dataclasses import dataclass

import numpy as np

from . import cloud, collisions, dynamics, excitation
from .estimation import SampleSeries, fit_linear
from .leastsq import FitResult
from .mc import PumpingDistribution, seed_stream, simulate_transfer
from .scenario import Scenario
from .species import unit_convert
from .tables import ResultTable, format_number, provenance_header


@dataclass(frozen=True)
class LoadingContext:
    """All intermediate quantities of one loading configuration."""

    p_e: float
    efficiency: float
    mu_bar: float
    t_mt: float
    shape_b: float
    shape_g: float
    volume: float
    n_e: float
    v_bar: float
    gamma_background: float
    gamma_total: float
    rate: float


def loading_context(sc: Scenario, detuning_linewidths: float | None = None,
                    efficiency: float | None = None,
                    n_mot: float | None = None) -> LoadingContext:
    """Compose excitation, cloud geometry, and collision kinematics into
    the loading rate R and total decay rate Gamma for one configuration."""
    species = sc.species()
    field = sc.field()
    mot = sc.mot_cloud()
    if n_mot is None:
        n_mot = mot.atom_number
    light = sc.light_field(detuning_linewidths, species)
    p_e = excitation.excitation_probability(light, species)
    eta = sc["transfer.efficiency"] if efficiency is None else efficiency
    mu_bar = sc.mu_bar(species)
    t_mt = sc.mt_temperature(species)
    shape_b, shape_g = cloud.shape_params(t_mt, mu_bar, field, species)
    volume = cloud.effective_volume(shape_b, shape_g)
    n_e = collisions.excited_mot_density(n_mot, p_e, volume)
    v_bar = collisions.mean_collision_velocity(mot.temperature, t_mt, species)
    gamma_bg = sc["rates.mot_on_background_rate_per_s"]
    sigma_eff = sc["rates.sigma_ed_m2"] * sc["rates.overlap_factor"]
    gamma_total = dynamics.mot_on_decay_rate(n_e, sigma_eff, v_bar, gamma_bg)
    rate = excitation.transfer_rate(n_mot, p_e, species, eta)
    return LoadingContext(
        p_e=p_e, efficiency=eta, mu_bar=mu_bar, t_mt=t_mt,
        shape_b=shape_b, shape_g=shape_g, volume=volume, n_e=n_e,
        v_bar=v_bar, gamma_background=gamma_bg, gamma_total=gamma_total,
        rate=rate,
    )


def _context_notes(ctx: LoadingContext) -> list[str]:
    return [
        f"derived P_e = {format_number(ctx.p_e)}",
        f"derived R_per_s = {format_number(ctx.rate)}",
        f"derived Gamma_per_s = {format_number(ctx.gamma_total)}",
        f"derived T_MT_K = {format_number(ctx.t_mt)}",
        f"derived V_MT_m3 = {format_number(ctx.volume)}",
        f"derived n_e_per_m3 = {format_number(ctx.n_e)}",
        f"derived v_bar_m_per_s = {format_number(ctx.v_bar)}",
    ]


def _apply_noise(values: np.ndarray, sigma_rel: float,
                 rng: np.random.Generator) -> np.ndarray:
    if sigma_rel == 0.0:
        return values
    return values * (1.0 + sigma_rel * rng.standard_normal(values.shape))


def simulate_loading(sc: Scenario) -> ResultTable:
    """Loading curve of the magnetic trap with the reservoir on:
    columns (t, N_MT)."""
    ctx = loading_context(sc)
    times = np.linspace(0.0, sc["sim.t_end_s"], sc["sim.samples"])
    atoms = dynamics.loading_curve(ctx.rate, ctx.gamma_total, times)
    rng = seed_stream(sc.seed, "noise/simulate-loading")
    atoms = _apply_noise(atoms, sc["noise.sigma_rel"], rng)
    rows = [(t, n) for t, n in zip(times, atoms)]
    return ResultTable(
        columns=[("t", "s"), ("N_MT", "count")],
        rows=rows,
        provenance=provenance_header(sc, sc.seed),
        notes=["seed-stream noise/simulate-loading"] + _context_notes(ctx),
    )


def simulate_decay(sc: Scenario) -> ResultTable:
    """Post-loading decay of the trapped cloud: columns (t, n0, N, V)."""
    ctx = loading_context(sc)
    model = dynamics.RateModel(
        background_lifetime=sc["rates.background_lifetime_s"],
        two_body_coeff=sc["rates.two_body_m3_per_s"],
        initial_volume=ctx.volume,
        volume_growth_rate=sc["rates.volume_growth_per_s"],
    )
    t_end = sc["decay.t_end_s"]
    dt = t_end / (sc["decay.samples"] - 1)
    traj = dynamics.integrate_mt_decay(sc["decay.initial_density_m3"],
                                       model, t_end, dt)
    rng = seed_stream(sc.seed, "noise/simulate-decay")
    density = _apply_noise(traj.peak_density.copy(), sc["noise.sigma_rel"],
                           rng)
    rows = [(t, n, n * v, v)
            for t, n, v in zip(traj.times, density, traj.volume)]
    notes = ["seed-stream noise/simulate-decay"] + _context_notes(ctx)
    beta = sc["rates.two_body_m3_per_s"]
    if beta > 0:
        # the velocity entering sigma = beta/v is ambiguous between a
        # trap-trap and a reservoir-trap thermal average; report both
        species = sc.species()
        mot = sc.mot_cloud()
        v_mtmt = collisions.mean_collision_velocity(ctx.t_mt, ctx.t_mt,
                                                    species)
        v_motmt = collisions.mean_collision_velocity(mot.temperature,
                                                     ctx.t_mt, species)
        notes.append("derived sigma_dd_mtmt_m2 = " + format_number(
            collisions.cross_section_from_beta(beta, v_mtmt)))
        notes.append("derived sigma_dd_motmt_m2 = " + format_number(
            collisions.cross_section_from_beta(beta, v_motmt)))
    return ResultTable(
        columns=[("t", "s"), ("n0", "1/m^3"), ("N", "count"), ("V", "m^3")],
        rows=rows,
        provenance=provenance_header(sc, sc.seed),
        notes=notes,
    )


@dataclass(frozen=True)
class DetuningFit:
    """Per-detuning slope of R vs N_MOT and the efficiency it implies."""

    detuning_linewidths: float
    slope: float          # 1/s per atom
    slope_stderr: float
    efficiency: float
    p_e: float


def figure2(sc: Scenario) -> tuple[ResultTable, list[DetuningFit]]:
    """Loading-rate sweep: R vs N_MOT for each configured detuning, with
    the companion linear fits and the transfer efficiencies they imply."""
    species = sc.species()
    detunings = sc["figure2.detunings_linewidths"]
    efficiencies = sc["figure2.efficiencies"]
    atom_numbers = np.asarray(sc["figure2.atom_numbers"])
    rng = seed_stream(sc.seed, "noise/figure2")
    rows = []
    fits = []
    notes = ["seed-stream noise/figure2"]
    for det, eta in zip(detunings, efficiencies):
        light = sc.light_field(det, species)
        p_e = excitation.excitation_probability(light, species)
        rates = np.array([
            excitation.transfer_rate(n, p_e, species, eta)
            for n in atom_numbers
        ])
        rates = _apply_noise(rates, sc["noise.sigma_rel"], rng)
        rows.extend((det, n, r) for n, r in zip(atom_numbers, rates))
        fit = fit_linear(SampleSeries(atom_numbers, rates))
        eta_hat = excitation.efficiency_from_rate(fit.params["slope"], 1.0,
                                                  p_e, species)
        fits.append(DetuningFit(
            detuning_linewidths=det,
            slope=fit.params["slope"],
            slope_stderr=fit.stderr["slope"],
            efficiency=eta_hat,
            p_e=p_e,
        ))
        notes.append(
            f"fit detuning_linewidths={format_number(det)} "
            f"slope_per_s={format_number(fit.params['slope'])} "
            f"eta={format_number(eta_hat)}"
        )
    table = ResultTable(
        columns=[("detuning", "Gamma_eg"), ("N_MOT", "count"), ("R", "1/s")],
        rows=rows,
        provenance=provenance_header(sc, sc.seed),
        notes=notes,
    )
    return table, fits


def figure3(sc: Scenario) -> tuple[ResultTable, FitResult]:
    """Decay-rate sweep: Gamma vs n_e*v, with the companion linear fit that
    extracts the inelastic cross section (slope) and the residual
    background rate (intercept)."""
    xs = []
    gammas = []
    for n_mot in sc["figure3.atom_numbers"]:
        ctx = loading_context(sc, n_mot=n_mot)
        xs.append(ctx.n_e * ctx.v_bar)
        gammas.append(ctx.gamma_total)
    xs = np.asarray(xs)
    gammas = np.asarray(gammas)
    rng = seed_stream(sc.seed, "noise/figure3")
    gammas = _apply_noise(gammas, sc["noise.sigma_rel"], rng)
    fit = fit_linear(SampleSeries(xs, gammas))
    fit.extras["sigma_ed"] = fit.params["slope"]
    rows = list(zip(xs, gammas))
    notes = [
        "seed-stream noise/figure3",
        f"fit sigma_ed_m2 = {format_number(fit.params['slope'])}",
        f"fit sigma_ed_stderr_m2 = {format_number(fit.stderr['slope'])}",
        f"fit intercept_per_s = {format_number(fit.params['intercept'])}",
    ]
    table = ResultTable(
        columns=[("n_e_v", "1/(m^2 s)"), ("Gamma", "1/s")],
        rows=rows,
        provenance=provenance_header(sc, sc.seed),
        notes=notes,
    )
    return table, fit


def figure4(sc: Scenario) -> ResultTable:
    """Transfer-temperature sweep against the light-shift parameter: the
    configured linear reservoir-temperature law, the analytic prediction,
    and the Monte Carlo check."""
    species = sc.species()
    field = sc.field()
    mu_bar = sc.mu_bar(species)
    sigma = unit_convert(sc["mot.sigma_um"], "um", "m")
    dist = PumpingDistribution.point(sc["transfer.mean_zeeman_m"])
    offset = sc["figure4.tmot_offset_uK"]
    slope = sc["figure4.tmot_slope_uK"]
    rows = []
    notes = []
    for i, shift in enumerate(sc["figure4.lightshift"]):
        t_mot = unit_convert(offset + slope * shift, "uK", "K")
        mot = cloud.MotCloud(size_sigma=sigma, temperature=t_mot,
                             atom_number=sc["mot.atom_number"])
        t_th = cloud.predict_mt_temperature(mot, field, mu_bar)
        label = f"figure4-mc-{i}"
        report = simulate_transfer(mot, dist, field, species,
                                   sc["mc.particles"],
                                   rng=seed_stream(sc.seed, label))
        notes.append(f"seed-stream {label}")
        rows.append((shift, t_mot, t_th, report.temperature_mc))
    return ResultTable(
        columns=[("lightshift", "I/Delta"), ("T_MOT", "K"),
                 ("T_MT_th", "K"), ("T_MT_mc", "K")],
        rows=rows,
        provenance=provenance_header(sc, sc.seed),
        notes=notes,
    )


def mc_transfer(sc: Scenario) -> ResultTable:
    """One seeded transfer simulation compared against the analytic
    prediction; single-row table."""
    species = sc.species()
    field = sc.field()
    mot = sc.mot_cloud()
    mu_bar = sc.mu_bar(species)
    dist = PumpingDistribution.point(sc["transfer.mean_zeeman_m"])
    t_th = cloud.predict_mt_temperature(mot, field, mu_bar)
    report = simulate_transfer(mot, dist, field, species,
                               sc["mc.particles"],
                               rng=seed_stream(sc.seed, "mc-transfer"))
    rel = report.temperature_mc / t_th - 1.0
    rows = [(
        report.particles, report.trapped, mot.temperature, mot.size_sigma,
        field.gradient, sc["transfer.mean_zeeman_m"], report.temperature_mc,
        report.temperature_stderr, t_th, rel, report.mean_radius,
        report.mean_radius_expected,
    )]
    return ResultTable(
        columns=[
            ("particles", "count"), ("trapped", "count"), ("T_MOT", "K"),
            ("sigma", "m"), ("gradient", "T/m"), ("mean_zeeman_m", "1"),
            ("T_MT_mc", "K"), ("T_MT_mc_stderr", "K"), ("T_MT_th", "K"),
            ("rel_diff", "1"), ("mean_radius", "m"),
            ("mean_radius_expected", "m"),
        ],
        rows=rows,
        provenance=provenance_header(sc, sc.seed),
        notes=["seed-stream mc-transfer"],
    )
