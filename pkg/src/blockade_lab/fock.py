"""Truncated Fock-space operators and density-matrix constructors.

Everything is a dense complex ndarray. Truncation dimensions stay small
(a few tens of levels), where dense storage beats sparse bookkeeping.
"""

import math

import numpy as np

from .errors import TruncationError


def _check_dim(dim: int) -> None:
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ValueError(f"truncation dimension must be a positive integer, got {dim!r}")


def annihilation_op(dim: int) -> np.ndarray:
    """Annihilation operator with a|n> = sqrt(n)|n-1>, truncated to `dim` levels."""
    _check_dim(dim)
    a = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def creation_op(dim: int) -> np.ndarray:
    """Hermitian conjugate of `annihilation_op`."""
    return annihilation_op(dim).conj().T


def number_op(dim: int) -> np.ndarray:
    """Photon-number operator diag(0, 1, ..., dim - 1)."""
    _check_dim(dim)
    return np.diag(np.arange(dim)).astype(complex)


def kerr_op(dim: int) -> np.ndarray:
    """Two-photon interaction term a'a'aa = diag(n (n - 1))."""
    _check_dim(dim)
    n = np.arange(dim)
    return np.diag(n * (n - 1)).astype(complex)


def fock_density(n: int, dim: int) -> np.ndarray:
    """Density matrix of the number state |n><n|."""
    _check_dim(dim)
    if not 0 <= n < dim:
        raise ValueError(f"level {n} out of range for dimension {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


def coherent_density(alpha: complex, dim: int, tail_tol: float = 1e-10) -> np.ndarray:
    """Normalized truncation of the coherent state |alpha><alpha|.

    Raises TruncationError when the discarded tail of the untruncated state
    carries more than `tail_tol` probability.
    """
    _check_dim(dim)
    c = np.empty(dim, dtype=complex)
    c[0] = 1.0
    for k in range(1, dim):
        c[k] = c[k - 1] * alpha / math.sqrt(k)
    # |c_n|^2 = mu^n / n! with mu = |alpha|^2; the kept weight of the
    # normalized state is exp(-mu) * sum(|c_n|^2).
    mu = abs(alpha) ** 2
    kept = math.exp(-mu) * float(np.sum(np.abs(c) ** 2))
    tail = max(0.0, 1.0 - kept)
    if tail > tail_tol:
        raise TruncationError(
            f"coherent state alpha={alpha} leaves {tail:.3e} probability above "
            f"level {dim - 1}; enlarge the truncation"
        )
    psi = c / np.linalg.norm(c)
    return np.outer(psi, psi.conj())
