import math

import numpy as np
import pytest

from llgs import (
    Grid1D,
    MagnetizationField,
    ModelParams,
    PerturbationSpec,
    SimConfig,
    build_wavetrain_initial,
    measure_growth_rate,
    simulate,
    verify_coherent_profile,
    wavetrain_at,
)
from llgs.coherent import CoherentAnsatz, CoherentProfile
from llgs.errors import BlowupError, CFLError, CommensurabilityError
from llgs.model import rotate_about_e3
from llgs.simulate import Trajectory, cfl_limit, mode_amplitudes
from llgs.wavetrains import wavetrain_field

from conftest import random_smooth_field

PARAMS = ModelParams(alpha=1.0, beta=0.5, mu=1.0, h=1.0)  # b = 0.5, supercritical


def test_cfl_validation():
    grid = Grid1D(2 * np.pi, 256)
    limit = cfl_limit(grid, PARAMS)
    with pytest.raises(CFLError):
        SimConfig(dt=2 * limit, t_final=1.0, integrator="rk4").validate(grid, PARAMS)
    SimConfig(dt=0.5 * limit, t_final=1.0, integrator="rk4").validate(grid, PARAMS)
    # the semi-implicit stepper has no dx^2 barrier
    SimConfig(dt=2 * limit, t_final=1.0, integrator="semi-implicit").validate(grid, PARAMS)
    with pytest.raises(ValueError):
        SimConfig(dt=0.01, t_final=1.0, integrator="euler").validate(grid, PARAMS)


def test_commensurability_enforced():
    grid = Grid1D(10.0, 64)
    wt = wavetrain_at(PARAMS, 0.3)
    with pytest.raises(CommensurabilityError):
        build_wavetrain_initial(wt, grid)


def test_sphere_constraint_along_run(rng):
    grid = Grid1D(2 * np.pi, 64)
    initial = random_smooth_field(rng, grid)
    config = SimConfig(dt=0.01, t_final=2.0, integrator="semi-implicit", diag_every=5)
    result = simulate(initial, PARAMS, config)
    assert np.max(result.diagnostics.norm_drift) < 1e-9


def test_rotation_equivariance_of_flow(rng):
    grid = Grid1D(2 * np.pi, 64)
    initial = random_smooth_field(rng, grid)
    config = SimConfig(dt=0.01, t_final=1.0)
    ang = 0.9
    direct = simulate(initial, PARAMS, config).final.values
    rotated = simulate(
        MagnetizationField(grid, rotate_about_e3(initial.values, ang)), PARAMS, config
    ).final.values
    assert np.max(np.abs(rotated - rotate_about_e3(direct, ang))) < 1e-8


def test_energy_decreases_for_variational_flow(rng):
    params = ModelParams(alpha=1.0, beta=0.0, mu=1.0, h=0.3)
    grid = Grid1D(2 * np.pi, 64)
    initial = random_smooth_field(rng, grid)
    config = SimConfig(dt=0.004, t_final=3.0, integrator="rk4", diag_every=5)
    result = simulate(initial, params, config)
    increments = np.diff(result.diagnostics.energy)
    assert np.all(increments < 1e-8)


def test_wavetrain_is_relative_equilibrium():
    wt = wavetrain_at(PARAMS, 0.0)
    grid = Grid1D(2 * np.pi, 32)
    initial = build_wavetrain_initial(wt, grid)
    config = SimConfig(dt=0.01, t_final=5.0, integrator="rk4", diag_every=5)
    result = simulate(initial, PARAMS, config)
    # amplitude preserved and rotation frequency omega = -beta/alpha
    r_final = np.hypot(result.final.values[:, 0], result.final.values[:, 1])
    assert np.max(np.abs(r_final - wt.r)) < 1e-12
    # phi(x, t) = kx - omega*t, so the measured dphi/dt is -omega = beta/alpha
    freq = result.diagnostics.mean_frequency(t_min=0.5)
    assert abs(freq + wt.omega) < 1e-10


def test_dt_convergence_order_rk4(rng):
    grid = Grid1D(2 * np.pi, 16)
    initial = random_smooth_field(rng, grid)
    ref = simulate(initial, PARAMS, SimConfig(dt=1e-4, t_final=0.2, integrator="rk4",
                                              renormalize=False)).final.values
    errs = []
    for dt in (0.02, 0.01):
        out = simulate(initial, PARAMS, SimConfig(dt=dt, t_final=0.2, integrator="rk4",
                                                  renormalize=False)).final.values
        errs.append(np.max(np.abs(out - ref)))
    order = math.log2(errs[0] / errs[1])
    assert abs(order - 4.0) < 0.2


def test_dt_convergence_order_semi_implicit(rng):
    grid = Grid1D(2 * np.pi, 16)
    initial = random_smooth_field(rng, grid)
    ref = simulate(initial, PARAMS, SimConfig(dt=1e-4, t_final=0.2)).final.values
    errs = []
    for dt in (0.02, 0.01):
        out = simulate(initial, PARAMS, SimConfig(dt=dt, t_final=0.2)).final.values
        errs.append(np.max(np.abs(out - ref)))
    order = math.log2(errs[0] / errs[1])
    assert abs(order - 1.0) < 0.2


def test_dx_convergence_order():
    # defect of a k != 0, m3 != 0 wavetrain after T = 1 is dominated by the
    # O(dx^2) shift of the discrete equilibrium angle (k^2 vs. its FD symbol)
    wt = wavetrain_at(PARAMS, 0.5)
    errs = []
    for n in (64, 128):
        grid = Grid1D(4 * np.pi, n)
        initial = build_wavetrain_initial(wt, grid)
        config = SimConfig(dt=2e-4, t_final=1.0, integrator="rk4")
        final = simulate(initial, PARAMS, config).final
        # m(x, t) = exp(i(kx - omega t)): the phase advances by -omega*t
        exact = rotate_about_e3(wavetrain_field(wt, grid).values, -wt.omega * 1.0)
        errs.append(np.max(np.abs(final.values - exact)))
    order = math.log2(errs[0] / errs[1])
    assert abs(order - 2.0) < 0.2


def test_blowup_reported_as_error():
    grid = Grid1D(2 * np.pi, 16)
    values = np.tile([0.0, 0.0, 1.0], (grid.n, 1))
    values[3] = [np.nan, 0.0, 0.0]
    with pytest.raises(BlowupError):
        simulate(MagnetizationField(grid, values), PARAMS, SimConfig(dt=0.01, t_final=0.1))


def test_sideband_perturbation_structure():
    grid = Grid1D(20 * np.pi, 256)
    wt = wavetrain_at(PARAMS, 0.4)
    spec = PerturbationSpec(kind="sideband", ell=0.1, amplitude=1e-3)
    fld = build_wavetrain_initial(wt, grid, spec)
    assert fld.norm_drift() < 1e-12
    # theta modulated at ell around the carrier angle
    theta = np.arccos(fld.values[:, 2])
    assert abs(np.max(theta) - (wt.theta + 1e-3)) < 1e-6
    with pytest.raises(CommensurabilityError):
        build_wavetrain_initial(wt, grid, PerturbationSpec(kind="sideband", ell=0.1234,
                                                           amplitude=1e-3))


def test_noise_perturbation_deterministic():
    grid = Grid1D(2 * np.pi, 64)
    wt = wavetrain_at(PARAMS, 0.0)
    spec = PerturbationSpec(kind="noise", amplitude=1e-3, seed=11)
    a = build_wavetrain_initial(wt, grid, spec)
    b = build_wavetrain_initial(wt, grid, spec)
    assert np.array_equal(a.values, b.values)
    c = build_wavetrain_initial(wt, grid, PerturbationSpec("noise", amplitude=1e-3, seed=12))
    assert not np.array_equal(a.values, c.values)
    assert a.norm_drift() < 1e-12


def test_measure_growth_rate_on_synthetic_signal():
    grid = Grid1D(20 * np.pi, 256)
    k, ell, sigma = 0.4, 0.1, 0.07
    x = grid.x
    times = np.linspace(0.0, 40.0, 41)
    values = []
    for t in times:
        u = 0.8 * np.exp(1j * k * x) + 1e-5 * math.exp(sigma * t) * np.exp(
            1j * (k + ell) * x
        )
        values.append(np.column_stack([u.real, u.imag, np.full(grid.n, 0.6)]))
    traj = Trajectory(grid, times, values)
    rate = measure_growth_rate(traj, ell, carrier_k=k)
    assert abs(rate.rate - sigma) < 1e-8
    assert rate.max_log_residual < 1e-8


def test_growth_rate_rejects_saturated_signal():
    grid = Grid1D(20 * np.pi, 128)
    times = np.linspace(0.0, 10.0, 30)
    rng = np.random.default_rng(3)
    values = [np.column_stack([np.cos(0.4 * grid.x) + rng.normal(size=grid.n),
                               np.sin(0.4 * grid.x) + rng.normal(size=grid.n),
                               np.zeros(grid.n)]) for _ in times]
    with pytest.raises(RuntimeError):
        measure_growth_rate(Trajectory(grid, times, values), 0.1, 0.4, residual_tol=1e-6)


def test_verify_wavetrain_as_coherent_profile():
    # a wavetrain is the trivial coherent structure s = 0, Omega = beta/alpha
    wt = wavetrain_at(PARAMS, 0.5)
    xi = np.linspace(-20.0, 20.0, 801)
    profile = CoherentProfile(
        xi=xi,
        theta=np.full_like(xi, wt.theta),
        p=np.zeros_like(xi),
        q=np.full_like(xi, wt.k),
        ansatz=CoherentAnsatz(0.0, PARAMS.beta / PARAMS.alpha),
    )
    report = verify_coherent_profile(profile, PARAMS, window=1.0, dt=5e-4)
    assert report.max_defect < 1e-3
    assert report.onset_time is None
