import numpy as np
import pytest

from blockade_lab import model


def two_tone(e0=0.1, e1=0.1, det=20.0):
    return model.DriveSpec.from_pairs([(e0, 0.0), (e1, det)])


def test_drive_amplitude_in_phase():
    assert abs(model.drive_amplitude(0.0, two_tone()) - 0.2) < 1e-15


def test_drive_amplitude_antiphase():
    # at t = pi/delta the second tone has rotated by pi
    eps = model.drive_amplitude(np.pi / 20.0, two_tone())
    assert abs(eps) < 1e-14


def test_envelope_peak_and_period():
    drive = two_tone()
    period = np.pi / 10.0
    t = np.linspace(0.0, period, 4001)
    env = np.abs([model.drive_amplitude(x, drive) for x in t]) ** 2
    assert abs(env.max() - 0.04) < 1e-9
    shifted = np.abs([model.drive_amplitude(x + period, drive) for x in t]) ** 2
    assert np.max(np.abs(env - shifted)) < 1e-12
    # the envelope is not constant on half the period, so pi/U is fundamental
    half = np.abs([model.drive_amplitude(x + period / 2, drive) for x in t]) ** 2
    assert np.max(np.abs(env - half)) > 0.01


def test_three_tone_envelope():
    drive = model.DriveSpec.from_pairs([(0.1, 0.0), (0.1, 20.0), (0.1, 40.0)])
    t = np.linspace(0.0, np.pi / 10.0, 4001)
    env = np.abs([model.drive_amplitude(x, drive) for x in t]) ** 2
    assert abs(env.max() - 0.09) < 1e-9


def test_first_tone_anchors_frame():
    with pytest.raises(ValueError):
        model.DriveSpec.from_pairs([(0.1, 5.0), (0.1, 20.0)])


def test_detunings_strictly_increasing():
    with pytest.raises(ValueError):
        model.DriveSpec.from_pairs([(0.1, 0.0), (0.1, 20.0), (0.1, 20.0)])
    with pytest.raises(ValueError):
        model.DriveSpec.from_pairs([(0.1, 0.0), (0.1, 20.0), (0.1, 10.0)])


def test_empty_drive_rejected():
    with pytest.raises(ValueError):
        model.DriveSpec(())


def test_hamiltonian_bare_kerr_diagonal():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=4)
    silent = model.DriveSpec.from_pairs([(0.0, 0.0)])
    h = model.hamiltonian_at(1.3, params, silent)
    assert np.allclose(np.diag(h).real, [0.0, 0.0, 20.0, 60.0])
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0


def test_hamiltonian_drive_coupling():
    params = model.SystemParams(delta=0.0, kerr_u=10.0, dim=4)
    h = model.hamiltonian_at(0.0, params, two_tone())
    assert abs(h[0, 1] - 0.2) < 1e-15
    assert abs(h[1, 0] - 0.2) < 1e-15
    assert abs(h[1, 2] - 0.2 * np.sqrt(2)) < 1e-15


def test_hamiltonian_exactly_hermitian():
    rng = np.random.default_rng(11)
    for _ in range(25):
        params = model.SystemParams(
            delta=rng.uniform(-20, 20), kerr_u=rng.uniform(0, 15), dim=int(rng.integers(2, 12))
        )
        pairs = [(rng.uniform(0, 1), 0.0)]
        det = 0.0
        for _ in range(int(rng.integers(0, 3))):
            det += rng.uniform(1, 30)
            pairs.append((rng.uniform(0, 1), det))
        drive = model.DriveSpec.from_pairs(pairs)
        h = model.hamiltonian_at(rng.uniform(0, 20), params, drive)
        assert np.max(np.abs(h - h.conj().T)) == 0.0


def test_resonant_detunings_ladder():
    assert model.resonant_detunings(2, 10.0) == [0.0, 20.0]
    assert model.resonant_detunings(3, 10.0) == [0.0, 20.0, 40.0]
    assert model.resonant_detunings(1, 7.0) == [0.0]
    with pytest.raises(ValueError):
        model.resonant_detunings(0, 10.0)


def test_resonant_detunings_match_level_spacings():
    # driving |n-1> -> |n> with tone n requires omega_n - omega_0 = 2(n-1)U,
    # i.e. the detuning ladder reproduces successive eigen-energy gaps.
    u, omega = 7.0, 1000.0
    dets = model.resonant_detunings(4, u)
    for n in range(1, 4):
        gap = model.eigen_energy(n + 1, omega, u) - model.eigen_energy(n, omega, u)
        first_gap = model.eigen_energy(1, omega, u) - model.eigen_energy(0, omega, u)
        assert abs((gap - first_gap) - dets[n]) < 1e-12


def test_eigen_energy_values():
    assert abs(model.eigen_energy(0, 100.0, 10.0) - 50.0) < 1e-12
    assert abs(model.eigen_energy(2, 100.0, 10.0) - 270.0) < 1e-12
    with pytest.raises(ValueError):
        model.eigen_energy(-1, 100.0, 10.0)


def test_params_validation():
    with pytest.raises(ValueError):
        model.SystemParams(delta=0.0, kerr_u=10.0, dim=1)
    with pytest.raises(ValueError):
        model.SystemParams(delta=0.0, kerr_u=-1.0, dim=8)
    with pytest.raises(ValueError):
        model.SystemParams(delta=0.0, kerr_u=10.0, dim=8, gamma=0.0)
    with pytest.raises(ValueError):
        model.DriveTone(-0.1, 0.0)


REFERENCE_CAVITY = dict(
    wavelength=1550e-9, quality_factor=2.5e9, v_eff=196e-18, n1=1.4, n2=4e-14
)


def test_physical_conversion_reference_cavity():
    # a realistic microcavity: the Kerr shift comes out at ten linewidths
    phys = model.PhysicalParams(**REFERENCE_CAVITY, input_powers=(6.2e-16,))
    conv = model.params_from_physical(phys)
    assert abs(conv.u_over_gamma - 10.0) < 0.5
    assert abs(conv.gamma - 4.861e5) / 4.861e5 < 1e-3
    assert abs(conv.eps_over_gamma[0] - 0.1) < 0.005


def test_physical_conversion_scalings():
    base = model.params_from_physical(model.PhysicalParams(**REFERENCE_CAVITY))
    doubled = dict(REFERENCE_CAVITY)
    doubled["v_eff"] *= 2
    half = model.params_from_physical(model.PhysicalParams(**doubled))
    assert abs(half.kerr_u - base.kerr_u / 2) / base.kerr_u < 1e-12
    quad = dict(REFERENCE_CAVITY)
    quad["quality_factor"] *= 4
    conv = model.params_from_physical(model.PhysicalParams(**quad))
    assert abs(conv.u_over_gamma - 4 * base.u_over_gamma) / base.u_over_gamma < 1e-12


def test_physical_conversion_zero_power():
    phys = model.PhysicalParams(**REFERENCE_CAVITY, input_powers=(0.0,))
    conv = model.params_from_physical(phys)
    assert conv.eps_over_gamma[0] == 0.0


def test_physical_params_validation():
    bad = dict(REFERENCE_CAVITY)
    bad["n2"] = 0.0
    with pytest.raises(ValueError):
        model.PhysicalParams(**bad)
    with pytest.raises(ValueError):
        model.PhysicalParams(**REFERENCE_CAVITY, input_powers=(-1e-15,))
