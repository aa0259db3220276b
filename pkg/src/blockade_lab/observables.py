"""Photon statistics and the two blockade criteria.

Equal-time correlations are read off the photon-number distribution:
g^(n) = sum_m m!/(m-n)! P_m / <n>^n. The distribution criterion compares
P_n against the Poisson distribution with the same mean.
"""

import math
from dataclasses import dataclass

import numpy as np

from .lindblad import Trajectory

DEFAULT_ORDERS = (2, 3, 4, 5)
UNDEFINED = float("nan")        # sentinel for g^(n) when the mean vanishes
_MEAN_FLOOR = 1e-12


def mean_photon(rho: np.ndarray) -> float:
    """<n> from the diagonal."""
    return float(np.sum(np.arange(rho.shape[0]) * rho.diagonal().real))


def photon_distribution(rho: np.ndarray) -> np.ndarray:
    """Real diagonal of rho, clamped to [0, 1] after a positivity check."""
    p = rho.diagonal().real.copy()
    worst = p.min()
    if worst < -1e-8:
        raise ValueError(f"photon distribution has entry {worst:.3e}; state lost positivity")
    return np.clip(p, 0.0, 1.0)


def poisson_distribution(nbar: float, n_max: int) -> np.ndarray:
    """Poisson weights nbar^n exp(-nbar) / n! for n = 0..n_max."""
    if nbar < 0:
        raise ValueError(f"mean occupation must be non-negative, got {nbar}")
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    n = np.arange(n_max + 1)
    log_fact = np.array([math.lgamma(m + 1) for m in n])
    if nbar == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    return np.exp(n * math.log(nbar) - nbar - log_fact)


def g_n(rho: np.ndarray, order: int) -> float:
    """Equal-time correlation g^(order) of a state; NaN when <n> < 1e-12."""
    if order < 2:
        raise ValueError(f"correlation order must be at least 2, got {order}")
    p = photon_distribution(rho)
    mean = float(np.sum(np.arange(len(p)) * p))
    if mean < _MEAN_FLOOR:
        return UNDEFINED
    m = np.arange(len(p), dtype=float)
    falling = np.ones_like(m)
    for k in range(order):
        falling *= np.clip(m - k, 0.0, None)
    return float(np.sum(falling * p) / mean**order)


@dataclass
class ObservableSeries:
    """Per-sample statistics extracted from a trajectory.

    `p` and `poisson` hold columns n = 0..n_max; `g` maps correlation order
    to its time series.
    """

    times: np.ndarray
    mean_n: np.ndarray
    p: np.ndarray                  # shape (len(times), n_max + 1)
    poisson: np.ndarray            # same shape
    g: dict[int, np.ndarray]

    @property
    def n_max(self) -> int:
        return self.p.shape[1] - 1

    def column(self, key: str) -> np.ndarray:
        """Look up a series by CSV-style name: mean_n, P2, Q2, g3, ..."""
        if key == "mean_n":
            return self.mean_n
        kind, idx = key[0], key[1:]
        if idx.isdigit():
            n = int(idx)
            if kind == "P" and n <= self.n_max:
                return self.p[:, n]
            if kind == "Q" and n <= self.n_max:
                return self.poisson[:, n]
            if kind == "g" and n in self.g:
                return self.g[n]
        raise KeyError(f"unknown series column {key!r}")


def compute_series(
    traj: Trajectory, n_max: int = 5, orders: tuple[int, ...] = DEFAULT_ORDERS
) -> ObservableSeries:
    """Evaluate mean, distributions, and correlations on every sample."""
    n_times = len(traj.times)
    dim = traj.states.shape[1]
    if n_max >= dim:
        raise ValueError(f"n_max={n_max} needs at least {n_max + 1} Fock levels, dim={dim}")
    mean = np.empty(n_times)
    p = np.empty((n_times, n_max + 1))
    poisson = np.empty((n_times, n_max + 1))
    g = {order: np.empty(n_times) for order in orders}

    m = np.arange(dim, dtype=float)
    weights = {}
    for order in orders:
        falling = np.ones_like(m)
        for k in range(order):
            falling *= np.clip(m - k, 0.0, None)
        weights[order] = falling

    for i in range(n_times):
        full = photon_distribution(traj.states[i])
        nbar = float(np.sum(m * full))
        mean[i] = nbar
        p[i] = full[: n_max + 1]
        poisson[i] = poisson_distribution(nbar, n_max)
        for order in orders:
            if nbar < _MEAN_FLOOR:
                g[order][i] = UNDEFINED
            else:
                g[order][i] = float(np.sum(weights[order] * full) / nbar**order)
    return ObservableSeries(times=traj.times.copy(), mean_n=mean, p=p, poisson=poisson, g=g)


def window_average(times: np.ndarray, values: np.ndarray, window: tuple[float, float]) -> float:
    """Trapezoidal time average of a sampled series over [window[0], window[1]]."""
    lo, hi = window
    if not hi > lo:
        raise ValueError(f"window must have positive length, got {window}")
    mask = (times >= lo - 1e-12) & (times <= hi + 1e-12)
    if mask.sum() < 2:
        raise ValueError(f"window {window} contains fewer than two samples")
    t = times[mask]
    y = values[mask]
    return float(np.trapezoid(y, t) / (t[-1] - t[0]))


@dataclass(frozen=True)
class CriteriaReport:
    """Verdicts of the correlation and distribution criteria for one run.

    Status strings: ">" above 1 + band, "~" within the band around 1,
    "<" below 1 - band. The ">= 1" requirement on the target order counts
    "~" as satisfied; the "< 1" requirement on higher orders is strict.
    """

    target_n: int
    window: tuple[float, float]        # averaging window actually used
    evaluation_time: float             # snapshot time of the distribution criterion
    band: float
    g_avg: dict[int, float]
    g_status: dict[int, str]
    g_criterion_pass: bool
    p_ratio: dict[int, float]
    p_status: dict[int, str]
    p_criterion_pass: bool


def _band_status(value: float, band: float) -> str:
    if not np.isfinite(value):
        return "?"
    if abs(value - 1.0) <= band:
        return "~"
    return ">" if value > 1.0 else "<"


def evaluate_criteria(
    series: ObservableSeries,
    target_n: int,
    window: tuple[float, float],
    envelope_period: float,
    band: float = 0.15,
) -> CriteriaReport:
    """Apply both blockade criteria to a computed series.

    The correlation criterion uses window averages taken over a whole
    number of envelope periods starting at window[0]; the distribution
    criterion is evaluated pointwise at the sample closest to window[1].
    """
    lo, hi = window
    if lo < 5.0:
        raise ValueError(f"averaging window must start at t >= 5 (transients), got {lo}")
    if hi <= lo:
        raise ValueError(f"window must have positive length, got {window}")
    times = series.times
    if lo < times[0] - 1e-9 or hi > times[-1] + 1e-9:
        raise ValueError(f"window {window} is outside the sampled range")
    orders = sorted(series.g)
    if target_n not in orders:
        raise ValueError(f"target order {target_n} not among computed orders {orders}")

    if np.isfinite(envelope_period) and envelope_period > 0:
        n_periods = int(np.floor((hi - lo) / envelope_period + 1e-9))
        if n_periods < 1:
            raise ValueError(
                f"window {window} is shorter than one envelope period {envelope_period:.4g}"
            )
        used = (lo, lo + n_periods * envelope_period)
    else:
        used = (lo, hi)

    g_avg = {order: window_average(times, series.g[order], used) for order in orders}
    g_status = {order: _band_status(g_avg[order], band) for order in orders}
    g_pass = np.isfinite(g_avg[target_n]) and g_avg[target_n] >= 1.0 - band
    for order in orders:
        if order > target_n:
            g_pass = g_pass and np.isfinite(g_avg[order]) and g_avg[order] < 1.0

    snap = int(np.argmin(np.abs(times - hi)))
    p_ratio = {}
    for n in range(1, series.n_max + 1):
        ref = series.poisson[snap, n]
        p_ratio[n] = float(series.p[snap, n] / ref) if ref > 0 else UNDEFINED
    p_status = {n: _band_status(p_ratio[n], band) for n in p_ratio}
    p_pass = np.isfinite(p_ratio[target_n]) and p_ratio[target_n] >= 1.0 - band
    for n in range(target_n + 1, series.n_max + 1):
        p_pass = p_pass and np.isfinite(p_ratio[n]) and p_ratio[n] < 1.0

    return CriteriaReport(
        target_n=target_n,
        window=used,
        evaluation_time=float(times[snap]),
        band=band,
        g_avg=g_avg,
        g_status=g_status,
        g_criterion_pass=bool(g_pass),
        p_ratio=p_ratio,
        p_status=p_status,
        p_criterion_pass=bool(p_pass),
    )
