"""System parameters, multi-tone drive, and the rotating-frame Hamiltonian.

Simulation units set hbar = 1 and measure every rate in units of the decay
rate gamma (times in 1/gamma). The rotating frame is anchored to the first
drive tone, so that tone always carries detuning zero and the remaining
tones appear as oscillating terms exp(i delta_k t).
"""

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .fock import annihilation_op


@dataclass(frozen=True)
class SystemParams:
    """Resonator parameters in units of gamma."""

    delta: float          # resonator detuning from the anchor tone
    kerr_u: float         # Kerr interaction strength
    dim: int              # Fock truncation
    gamma: float = 1.0    # decay rate (1 by convention)

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.kerr_u < 0:
            raise ValueError(f"kerr_u must be non-negative, got {self.kerr_u}")
        if self.dim < 2:
            raise ValueError(f"dim must be at least 2, got {self.dim}")


@dataclass(frozen=True)
class DriveTone:
    """One drive tone: amplitude and detuning relative to the anchor tone."""

    amplitude: float
    det: float

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError(f"tone amplitude must be non-negative, got {self.amplitude}")
        if not np.isfinite(self.det):
            raise ValueError(f"tone detuning must be finite, got {self.det}")


@dataclass(frozen=True)
class DriveSpec:
    """Ordered collection of drive tones; the first tone anchors the frame."""

    tones: tuple[DriveTone, ...]

    def __post_init__(self):
        if len(self.tones) == 0:
            raise ValueError("a drive needs at least one tone")
        if self.tones[0].det != 0.0:
            raise ValueError(
                f"first tone must sit at detuning 0 (frame anchor), got {self.tones[0].det}"
            )
        dets = [tone.det for tone in self.tones]
        if any(b <= a for a, b in zip(dets, dets[1:])):
            raise ValueError(f"tone detunings must be strictly increasing, got {dets}")

    @classmethod
    def from_pairs(cls, pairs) -> "DriveSpec":
        return cls(tuple(DriveTone(float(a), float(d)) for a, d in pairs))

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([tone.amplitude for tone in self.tones])

    @property
    def detunings(self) -> np.ndarray:
        return np.array([tone.det for tone in self.tones])

    @property
    def max_detuning(self) -> float:
        return self.tones[-1].det


def drive_amplitude(t: float, drive: DriveSpec) -> complex:
    """Frame-rotated drive amplitude eps_0 + sum_k eps_k exp(i delta_k t)."""
    return complex(np.sum(drive.amplitudes * np.exp(1j * drive.detunings * t)))


def hamiltonian_at(t: float, params: SystemParams, drive: DriveSpec) -> np.ndarray:
    """Rotating-frame Hamiltonian at time t.

    Delta a'a + U a'a'aa on the diagonal, the drive eps(t) a + eps*(t) a'
    on the first off-diagonals. Built as a lower-triangular part mirrored
    onto the conjugate upper triangle, so the result is exactly Hermitian.
    """
    n = np.arange(params.dim)
    h = np.diag(params.delta * n + params.kerr_u * n * (n - 1)).astype(complex)
    eps = drive_amplitude(t, drive)
    a = annihilation_op(params.dim)
    lower = np.conj(eps) * a.conj().T
    h += lower + lower.conj().T
    return h


def resonant_detunings(n_target: int, kerr_u: float) -> list[float]:
    """Tone detuning ladder [0, 2U, ..., 2(n-1)U] matching the |k-1> -> |k> steps."""
    if n_target < 1:
        raise ValueError(f"target order must be at least 1, got {n_target}")
    return [2.0 * k * kerr_u for k in range(n_target)]


def eigen_energy(n: int, omega_a: float, kerr_u: float) -> float:
    """Level energy (n + 1/2) omega_a + U n (n - 1) of the undriven resonator."""
    if n < 0:
        raise ValueError(f"level index must be non-negative, got {n}")
    return (n + 0.5) * omega_a + kerr_u * n * (n - 1)


@dataclass(frozen=True)
class PhysicalParams:
    """Lab-frame resonator parameters (SI units)."""

    wavelength: float            # m
    quality_factor: float
    v_eff: float                 # m^3
    n1: float                    # linear refractive index
    n2: float                    # m^2/W
    input_powers: tuple[float, ...] = ()   # W, one per drive tone

    def __post_init__(self):
        for field in ("wavelength", "quality_factor", "v_eff", "n1", "n2"):
            value = getattr(self, field)
            if not value > 0:
                raise ValueError(f"{field} must be positive, got {value}")
        if any(p < 0 for p in self.input_powers):
            raise ValueError(f"input powers must be non-negative, got {self.input_powers}")


@dataclass(frozen=True)
class PhysicalConversion:
    """Result of `params_from_physical`: absolute rates and gamma-scaled ratios."""

    omega_a: float                       # rad/s
    gamma: float                         # rad/s
    kerr_u: float                        # rad/s
    u_over_gamma: float
    eps_over_gamma: tuple[float, ...]


def params_from_physical(phys: PhysicalParams) -> PhysicalConversion:
    """Convert lab parameters to the dimensionless ratios the model uses.

    omega_a = 2 pi c / lambda, gamma = omega_a / Q,
    U = hbar omega_a^2 c n2 / (n1^2 V_eff), eps = sqrt(gamma P / (hbar omega)).
    Tone offsets from omega_a are ~10 orders of magnitude below the optical
    frequency, so omega_a stands in for every tone frequency.
    """
    c = constants.c
    hbar = constants.hbar
    omega_a = 2.0 * np.pi * c / phys.wavelength
    gamma = omega_a / phys.quality_factor
    kerr_u = hbar * omega_a**2 * c * phys.n2 / (phys.n1**2 * phys.v_eff)
    eps = tuple(
        float(np.sqrt(gamma * p / (hbar * omega_a)) / gamma) for p in phys.input_powers
    )
    return PhysicalConversion(
        omega_a=omega_a,
        gamma=gamma,
        kerr_u=kerr_u,
        u_over_gamma=kerr_u / gamma,
        eps_over_gamma=eps,
    )
