import numpy as np
import pytest

from blockade_lab import fock, lindblad, model, observables, oracle
from blockade_lab.errors import NonUniqueSteadyStateError

SILENT = model.DriveSpec.from_pairs([(0.0, 0.0)])

# second-order perturbation theory for a resonant weak drive:
# g2 -> (gamma^2/4) / (U^2 + gamma^2/4), mean -> eps^2 / (gamma^2/4)
PERTURBATIVE_G2 = 0.25 / (100.0 + 0.25)


def test_liouvillian_matches_rhs():
    rng = np.random.default_rng(17)
    params = model.SystemParams(delta=-3.0, kerr_u=6.0, dim=7)
    drive = model.DriveSpec.from_pairs([(0.25, 0.0), (0.15, 12.0)])
    for _ in range(30):
        t = rng.uniform(0, 5)
        m = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        rho = m @ m.conj().T
        rho = rho / rho.trace()
        frozen = model.drive_amplitude(t, drive)
        lhs = oracle.liouvillian(params, frozen) @ oracle.vectorize(rho)
        rhs = oracle.vectorize(lindblad.lindblad_rhs(t, rho, params, drive))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_liouvillian_preserves_trace():
    params = model.SystemParams(delta=2.0, kerr_u=4.0, dim=6)
    lv = oracle.liouvillian(params, 0.3 + 0.1j)
    tr_row = oracle.vectorize(np.eye(6, dtype=complex))
    assert np.max(np.abs(tr_row @ lv)) < 1e-12


def test_liouvillian_damping_spectrum():
    # pure damping on two levels: eigenvalues 0, -gamma, -gamma/2 (twice)
    params = model.SystemParams(delta=0.0, kerr_u=0.0, dim=2)
    ev = np.linalg.eigvals(oracle.liouvillian(params, 0.0))
    ev = np.sort_complex(ev)
    assert np.min(np.abs(ev)) < 1e-12
    assert any(abs(e + 1.0) < 1e-12 for e in ev)
    assert sum(abs(e + 0.5) < 1e-12 for e in ev) == 2


def test_frozen_generator_has_unique_decaying_spectrum():
    for name_params, frozen in (
        (model.SystemParams(delta=0.0, kerr_u=10.0, dim=10), 0.2),
        (model.SystemParams(delta=0.0, kerr_u=10.0, dim=10), 0.3),
    ):
        ev = np.linalg.eigvals(oracle.liouvillian(name_params, frozen))
        near_zero = np.abs(ev) < 1e-8
        assert near_zero.sum() == 1
        assert np.all(ev.real[~near_zero] < 0)


def test_steady_state_undriven_is_vacuum():
    params = model.SystemParams(delta=0.0, kerr_u=5.0, dim=8)
    ss = oracle.steady_state(oracle.liouvillian(params, 0.0))
    assert np.max(np.abs(ss - fock.fock_density(0, 8))) < 1e-10


def test_steady_state_perturbative_g2():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=12)
    ss = oracle.steady_state(oracle.liouvillian(params, 0.01))
    assert abs(observables.g_n(ss, 2) / PERTURBATIVE_G2 - 1.0) < 0.05
    assert abs(observables.mean_photon(ss) / 4e-4 - 1.0) < 0.05


def test_steady_state_g2_is_drive_independent_when_weak():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=12)
    g2 = [
        observables.g_n(oracle.steady_state(oracle.liouvillian(params, eps)), 2)
        for eps in (0.005, 0.02)
    ]
    assert abs(g2[0] / g2[1] - 1.0) < 0.01


def test_steady_state_degenerate_rejected():
    # a block-diagonal generator with two invariant subspaces has no unique
    # steady state; build one by zeroing every coupling out of level 0
    params = model.SystemParams(delta=0.0, kerr_u=0.0, dim=2)
    lv = np.zeros((4, 4), dtype=complex)
    with pytest.raises(NonUniqueSteadyStateError):
        oracle.steady_state(lv)


def test_piecewise_decay_matches_exponential():
    params = model.SystemParams(delta=0.0, kerr_u=3.0, dim=6)
    traj = oracle.piecewise_exponential_propagate(
        fock.fock_density(1, 6), 4.0, params, SILENT, 0.02
    )
    dev = np.max(np.abs(traj.states[:, 1, 1].real - np.exp(-traj.times)))
    assert dev < 1e-8


def test_piecewise_agrees_with_adaptive_integrator():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=8)
    drive = model.DriveSpec.from_pairs([(0.1, 0.0), (0.1, 20.0)])
    rho0 = fock.fock_density(0, 8)
    rk = lindblad.propagate(rho0, 1.0, params, drive)
    pw = oracle.piecewise_exponential_propagate(
        rho0, 1.0, params, drive, np.pi / 10.0 / 200.0
    )
    assert oracle.trace_distance(rk.states[-1], pw.states[-1]) < 1e-6


def test_piecewise_slice_halving_is_second_order():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=8)
    drive = model.DriveSpec.from_pairs([(0.2, 0.0), (0.2, 20.0)])
    rho0 = fock.fock_density(0, 8)
    ref = lindblad.propagate(
        rho0, 1.0, params, drive,
        lindblad.IntegratorOptions(abs_tol=1e-12, rel_tol=1e-10),
    ).states[-1]
    devs = []
    for slices_per_cycle in (60, 120):
        dt = (2 * np.pi / 20.0) / slices_per_cycle
        pw = oracle.piecewise_exponential_propagate(rho0, 1.0, params, drive, dt)
        devs.append(oracle.trace_distance(ref, pw.states[-1]))
    ratio = devs[0] / devs[1]
    assert 2.5 < ratio < 6.0


def test_steady_state_matches_long_time_propagation():
    params = model.SystemParams(delta=0.0, kerr_u=8.0, dim=8)
    drive = model.DriveSpec.from_pairs([(0.1, 0.0)])
    ss = oracle.steady_state(oracle.liouvillian(params, 0.1))
    opts = lindblad.IntegratorOptions(abs_tol=1e-12, rel_tol=1e-10,
                                      max_step=0.1, output_interval=0.5)
    rk = lindblad.propagate(fock.fock_density(0, 8), 50.0, params, drive, opts)
    assert oracle.trace_distance(rk.states[-1], ss) < 1e-6
    pw = oracle.piecewise_exponential_propagate(
        fock.fock_density(0, 8), 50.0, params, drive, 0.01
    )
    assert oracle.trace_distance(pw.states[-1], ss) < 1e-6


def test_oracle_dimension_limit():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=15)
    with pytest.raises(ValueError, match="dim"):
        oracle.liouvillian(params, 0.1)
    with pytest.raises(ValueError):
        oracle.piecewise_exponential_propagate(
            fock.fock_density(0, 15), 1.0, params, SILENT, 0.01
        )


def test_piecewise_slice_width_guard():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=6)
    drive = model.DriveSpec.from_pairs([(0.1, 0.0), (0.1, 20.0)])
    too_coarse = (2 * np.pi / 20.0) / 10.0
    with pytest.raises(ValueError):
        oracle.piecewise_exponential_propagate(
            fock.fock_density(0, 6), 1.0, params, drive, too_coarse
        )


def test_trace_distance_properties():
    a = fock.fock_density(0, 4)
    b = fock.fock_density(1, 4)
    assert abs(oracle.trace_distance(a, b) - 1.0) < 1e-12
    assert oracle.trace_distance(a, a) < 1e-15
    mix = 0.5 * a + 0.5 * b
    assert abs(oracle.trace_distance(a, mix) - 0.5) < 1e-12
