"""Master-equation right-hand side and the adaptive propagator.

The equation of motion is

    drho/dt = -i [H(t), rho] + (gamma / 2) (2 a rho a' - a'a rho - rho a'a)

with H(t) from `model.hamiltonian_at`. Propagation uses an embedded
Dormand-Prince 5(4) pair acting directly on the dense density matrix.
Every accepted step is re-Hermitized and trace-renormalized, and the state
is sampled on a fixed output grid.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import StiffnessError, TruncationError
from .fock import annihilation_op
from .model import DriveSpec, SystemParams, hamiltonian_at

# Dormand-Prince 5(4) tableau. _DP_E is the difference between the 5th- and
# 4th-order weights, applied to the seven stage derivatives for the error
# estimate (the seventh stage is evaluated at the candidate solution).
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_DP_A = (
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_DP_E = _DP_B5 - _DP_B4

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


@dataclass(frozen=True)
class IntegratorOptions:
    """Error tolerances and sampling controls for `propagate`."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_step: float = 0.01
    output_interval: float = 0.01
    truncation_tail_tol: float = 1e-8

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "max_step", "output_interval", "truncation_tail_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_step > self.output_interval:
            raise ValueError(
                f"max_step ({self.max_step}) must not exceed the output interval "
                f"({self.output_interval})"
            )


@dataclass
class StepStats:
    """Bookkeeping from one propagation."""

    accepted: int = 0
    rejected: int = 0
    max_trace_drift: float = 0.0   # max |tr rho - 1| seen before renormalization
    min_step: float = np.inf
    max_step: float = 0.0
    max_tail: float = 0.0          # top-two-level population, max over samples


@dataclass
class Trajectory:
    """Sampled states: times[i] goes with states[i]."""

    times: np.ndarray
    states: np.ndarray             # shape (len(times), dim, dim)
    step_stats: StepStats = field(default_factory=StepStats)


@dataclass(frozen=True)
class StateDiagnostics:
    """Health numbers for one density matrix."""

    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    tail_population: float


def check_state(rho: np.ndarray) -> StateDiagnostics:
    """Trace, Hermiticity, positivity, and truncation-tail diagnostics.

    The Hermiticity deviation is the largest entry of |rho - rho'| / 2,
    i.e. the distance to the Hermitized matrix.
    """
    herm_dev = float(np.max(np.abs(rho - rho.conj().T))) / 2.0
    trace_dev = float(abs(rho.trace() - 1.0))
    sym = 0.5 * (rho + rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(sym).min())
    tail = float(rho[-1, -1].real + rho[-2, -2].real) if rho.shape[0] >= 2 else float(
        rho[-1, -1].real
    )
    return StateDiagnostics(trace_dev, herm_dev, min_eig, tail)


def _require_density_matrix(rho: np.ndarray, dim: int) -> None:
    if rho.shape != (dim, dim):
        raise ValueError(f"state has shape {rho.shape}, expected ({dim}, {dim})")
    diag = check_state(rho)
    if diag.hermiticity_deviation > 1e-12:
        raise ValueError(f"state is not Hermitian (deviation {diag.hermiticity_deviation:.2e})")
    if diag.trace_deviation > 1e-8:
        raise ValueError(f"state trace deviates from 1 by {diag.trace_deviation:.2e}")
    if diag.min_eigenvalue < -1e-8:
        raise ValueError(f"state has negative eigenvalue {diag.min_eigenvalue:.2e}")


def lindblad_rhs(
    t: float, rho: np.ndarray, params: SystemParams, drive: DriveSpec
) -> np.ndarray:
    """Exact right-hand side of the master equation at time t."""
    if rho.shape != (params.dim, params.dim):
        raise ValueError(f"state has shape {rho.shape}, expected ({params.dim}, {params.dim})")
    h = hamiltonian_at(t, params, drive)
    a = annihilation_op(params.dim)
    nvec = np.arange(params.dim)
    comm = h @ rho - rho @ h
    decay = a @ rho @ a.conj().T - 0.5 * (nvec[:, None] * rho + rho * nvec[None, :])
    return -1j * comm + params.gamma * decay


def step_cap(opts: IntegratorOptions, drive: DriveSpec) -> float:
    """Largest step the propagator may take: the fastest tone stays resolved."""
    cap = opts.max_step
    if drive.max_detuning > 0:
        cap = min(cap, (2.0 * np.pi / drive.max_detuning) / 20.0)
    return cap


def propagate(
    rho0: np.ndarray,
    t_end: float,
    params: SystemParams,
    drive: DriveSpec,
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Integrate the master equation from rho0 over [0, t_end].

    States are sampled every `opts.output_interval` (plus t_end itself when
    it is not on the grid). Raises StiffnessError if the step size
    underflows and TruncationError when the top two Fock levels together
    exceed `opts.truncation_tail_tol` at any sample.
    """
    if opts is None:
        opts = IntegratorOptions()
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    dim = params.dim
    _require_density_matrix(rho0, dim)

    # Precomputed pieces of the right-hand side.
    a = annihilation_op(dim)
    ad = a.conj().T
    nvec = np.arange(dim)
    h_static = np.diag(params.delta * nvec + params.kerr_u * nvec * (nvec - 1)).astype(complex)
    amps = drive.amplitudes
    dets = drive.detunings
    gamma = params.gamma

    def rhs(t, flat):
        rho = flat.reshape(dim, dim)
        eps = np.sum(amps * np.exp(1j * dets * t))
        h = h_static + eps * a + np.conj(eps) * ad
        comm = h @ rho - rho @ h
        decay = a @ rho @ ad - 0.5 * (nvec[:, None] * rho + rho * nvec[None, :])
        return (-1j * comm + gamma * decay).ravel()

    n_full = int(np.floor(t_end / opts.output_interval + 1e-9))
    times = np.arange(n_full + 1) * opts.output_interval
    if times[-1] < t_end - 1e-9 * max(1.0, t_end):
        times = np.append(times, t_end)
    else:
        times[-1] = t_end

    cap = step_cap(opts, drive)
    h_floor = 1e-13 * max(1.0, t_end)
    stats = StepStats()
    states = np.empty((len(times), dim, dim), dtype=complex)

    rho = 0.5 * (rho0 + rho0.conj().T)
    rho = (rho / rho.trace().real).ravel()

    def record(idx, t):
        mat = rho.reshape(dim, dim)
        states[idx] = mat
        tail = mat[-1, -1].real + mat[-2, -2].real
        stats.max_tail = max(stats.max_tail, tail)
        if tail > opts.truncation_tail_tol:
            raise TruncationError(
                f"top two levels hold {tail:.3e} population at t={t:.6g}; "
                f"enlarge dim beyond {dim}"
            )

    record(0, 0.0)

    t = 0.0
    h = 0.1 * cap
    k = np.empty((7, dim * dim), dtype=complex)
    for idx in range(1, len(times)):
        target = times[idx]
        while target - t > 1e-12 * max(1.0, t_end):
            h_try = min(h, cap, target - t)
            k[0] = rhs(t, rho)
            for s in range(1, 6):
                y = rho + h_try * (_DP_A[s - 1] @ k[:s])
                k[s] = rhs(t + _DP_C[s] * h_try, y)
            y5 = rho + h_try * (_DP_B5[:6] @ k[:6])
            k[6] = rhs(t + h_try, y5)
            err = h_try * (_DP_E @ k)
            scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(rho), np.abs(y5))
            err_norm = float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))

            if np.isfinite(err_norm) and err_norm <= 1.0:
                t += h_try
                mat = y5.reshape(dim, dim)
                trace = mat.trace().real
                stats.max_trace_drift = max(stats.max_trace_drift, abs(trace - 1.0))
                rho = (0.5 * (mat + mat.conj().T) / trace).ravel()
                stats.accepted += 1
                stats.min_step = min(stats.min_step, h_try)
                stats.max_step = max(stats.max_step, h_try)
                if err_norm == 0.0:
                    factor = _MAX_FACTOR
                else:
                    factor = min(
                        _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
                    )
                h = h_try * factor
            else:
                stats.rejected += 1
                if np.isfinite(err_norm):
                    h = h_try * max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
                else:
                    h = 0.5 * h_try
            if h < h_floor:
                raise StiffnessError(
                    f"step size underflowed ({h:.3e}) at t={t:.6g}; "
                    "the dynamics are too stiff for the explicit integrator"
                )
        record(idx, target)

    return Trajectory(times=times, states=states, step_stats=stats)
