"""Slow-but-sure reference route: superoperator form of the master equation.

The generator is assembled as a dim^2 x dim^2 matrix acting on
column-stacked density matrices, which buys exact steady states (null
space) and a piecewise-exponential propagator for cross-checking the
adaptive integrator. Memory grows as dim^4, so this module refuses
dimensions above 12.
"""

import numpy as np
from scipy.linalg import expm

from .errors import NonUniqueSteadyStateError
from .fock import annihilation_op
from .lindblad import StepStats, Trajectory
from .model import DriveSpec, SystemParams, drive_amplitude

MAX_DIM = 12


def _check_oracle_dim(dim: int) -> None:
    if dim > MAX_DIM:
        raise ValueError(
            f"oracle routines are limited to dim <= {MAX_DIM} (superoperators "
            f"scale as dim^4), got {dim}"
        )


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix (Fortran order)."""
    return rho.flatten(order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    dim = int(round(np.sqrt(len(vec))))
    return vec.reshape((dim, dim), order="F")


def liouvillian(params: SystemParams, frozen_drive_amplitude: complex) -> np.ndarray:
    """Generator for a drive frozen at the given complex amplitude.

    Uses vec(A X B) = (B^T kron A) vec(X) for column-stacked vec, so
    L = -i (I kron H - H^T kron I)
        + gamma (conj(a) kron a - (I kron a'a + (a'a)^T kron I) / 2).
    """
    _check_oracle_dim(params.dim)
    dim = params.dim
    n = np.arange(dim)
    a = annihilation_op(dim)
    eps = complex(frozen_drive_amplitude)
    h = np.diag(params.delta * n + params.kerr_u * n * (n - 1)).astype(complex)
    h += eps * a + np.conj(eps) * a.conj().T
    num = np.diag(n).astype(complex)
    eye = np.eye(dim, dtype=complex)
    gamma = params.gamma
    lind = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    lind += gamma * np.kron(a.conj(), a)
    lind -= 0.5 * gamma * (np.kron(eye, num) + np.kron(num.T, eye))
    return lind


def steady_state(superop: np.ndarray) -> np.ndarray:
    """Unique null vector of the generator, reshaped to a unit-trace state.

    Raises NonUniqueSteadyStateError when the null space is degenerate
    (second-smallest singular value below 1e-6) or traceless.
    """
    _, s, vh = np.linalg.svd(superop)
    if s[-2] < 1e-6:
        raise NonUniqueSteadyStateError(
            f"null space is degenerate: two smallest singular values "
            f"{s[-1]:.3e}, {s[-2]:.3e}"
        )
    rho = unvectorize(vh[-1].conj())
    rho = 0.5 * (rho + rho.conj().T)
    trace = rho.trace().real
    if abs(trace) < 1e-10:
        raise NonUniqueSteadyStateError("null vector is traceless; no physical steady state")
    return rho / trace


def piecewise_exponential_propagate(
    rho0: np.ndarray,
    t_end: float,
    params: SystemParams,
    drive: DriveSpec,
    slice_dt: float,
) -> Trajectory:
    """Propagate by exponentiating the generator on short slices.

    The drive is frozen at each slice midpoint, a second-order
    approximation. `slice_dt` must resolve the fastest tone with at least
    50 slices per cycle. States are sampled at every slice boundary.
    """
    _check_oracle_dim(params.dim)
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not slice_dt > 0:
        raise ValueError(f"slice_dt must be positive, got {slice_dt}")
    dmax = drive.max_detuning
    if dmax > 0 and slice_dt > (2.0 * np.pi / dmax) / 50.0 + 1e-15:
        raise ValueError(
            f"slice_dt={slice_dt:.4g} is too coarse for the fastest tone; "
            f"need at most {(2.0 * np.pi / dmax) / 50.0:.4g}"
        )

    n_slices = max(1, int(np.ceil(t_end / slice_dt - 1e-9)))
    dt = t_end / n_slices
    dim = params.dim
    times = np.arange(n_slices + 1) * dt
    states = np.empty((n_slices + 1, dim, dim), dtype=complex)
    stats = StepStats(min_step=dt, max_step=dt)

    constant = len(drive.tones) == 1
    frozen_prop = None
    if constant:
        frozen_prop = expm(liouvillian(params, drive.tones[0].amplitude) * dt)

    vec = vectorize(rho0.astype(complex))

    def record(idx):
        rho = unvectorize(vec)
        rho = 0.5 * (rho + rho.conj().T)
        states[idx] = rho
        stats.max_trace_drift = max(stats.max_trace_drift, abs(rho.trace().real - 1.0))
        stats.max_tail = max(stats.max_tail, rho[-1, -1].real + rho[-2, -2].real)

    record(0)
    for i in range(n_slices):
        if constant:
            prop = frozen_prop
        else:
            midpoint = (i + 0.5) * dt
            prop = expm(liouvillian(params, drive_amplitude(midpoint, drive)) * dt)
        vec = prop @ vec
        stats.accepted += 1
        record(i + 1)
    return Trajectory(times=times, states=states, step_stats=stats)


def trace_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """Half the trace norm of the difference of two Hermitian states."""
    diff = rho_a - rho_b
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
