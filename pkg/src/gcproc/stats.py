"""Statistical comparison utilities shared by every verification check.

Distances and tests compare empirical count data against analytic pmfs;
moment estimators carry jackknife standard errors so Monte Carlo checks can
use the project-wide 4-standard-error acceptance band (two-sided false-alarm
rate around 6e-5 per check, so full suites rarely flake).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import chi2 as _chi2

__all__ = [
    "EmpiricalDistribution",
    "MomentEstimates",
    "CheckRecord",
    "tv_distance",
    "chi_square_gof",
    "chi_square_independence",
    "moment_estimates",
    "jackknife_correlation",
    "ode_residual",
    "render_report",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram of non-negative integer observations."""

    counts: Mapping[int, int]
    n: int

    def __post_init__(self) -> None:
        counts = {int(v): int(c) for v, c in self.counts.items() if c}
        object.__setattr__(self, "counts", counts)
        if self.n < 1:
            raise ValueError("empirical distribution needs at least one sample")
        if any(v < 0 for v in counts):
            raise ValueError("observations must be non-negative integers")
        if sum(counts.values()) != self.n:
            raise ValueError("counts must sum to the sample count")

    @classmethod
    def from_samples(cls, samples: Iterable[int]) -> "EmpiricalDistribution":
        counter = Counter(int(s) for s in samples)
        return cls(counts=counter, n=sum(counter.values()))

    @property
    def max_value(self) -> int:
        return max(self.counts)

    def frequency(self, value: int) -> float:
        return self.counts.get(value, 0) / self.n


def tv_distance(
    emp: EmpiricalDistribution, pmf: Callable[[int], float], n_max: int
) -> float:
    """Total variation distance against an analytic pmf truncated at n_max.

    Mass beyond n_max on either side is lumped into one tail bin, which
    keeps the distance symmetric in its two arguments and preserves the
    triangle inequality on a fixed support.  Callers guarantee the analytic
    tail beyond n_max is negligible (below 1e-9 on every grid used here).
    """
    p_body = [pmf(v) for v in range(n_max + 1)]
    body = math.fsum(abs(emp.frequency(v) - p_body[v]) for v in range(n_max + 1))
    emp_tail = sum(c for v, c in emp.counts.items() if v > n_max) / emp.n
    ana_tail = max(0.0, 1.0 - math.fsum(p_body))
    return 0.5 * (body + abs(emp_tail - ana_tail))


def chi_square_gof(
    emp: EmpiricalDistribution,
    pmf: Callable[[int], float],
    min_expected: float = 5.0,
) -> tuple[float, int, float]:
    """Pearson goodness-of-fit with greedy pooling of consecutive values.

    Consecutive counts are pooled until each bin's expected count reaches
    min_expected; the analytic mass beyond the largest observation lands in
    the final bin.  Returns (statistic, dof, p_value) and raises ValueError
    if pooling leaves fewer than two bins.
    """
    n = emp.n
    bins: list[tuple[float, float]] = []
    obs_acc = 0.0
    exp_acc = 0.0
    cum_p = 0.0
    for v in range(emp.max_value + 1):
        pv = pmf(v)
        cum_p += pv
        obs_acc += emp.counts.get(v, 0)
        exp_acc += n * pv
        if exp_acc >= min_expected:
            bins.append((obs_acc, exp_acc))
            obs_acc = 0.0
            exp_acc = 0.0
    exp_acc += n * max(0.0, 1.0 - cum_p)
    if bins and exp_acc < min_expected:
        last_obs, last_exp = bins.pop()
        obs_acc += last_obs
        exp_acc += last_exp
    if exp_acc > 0.0:
        bins.append((obs_acc, exp_acc))
    if len(bins) < 2:
        raise ValueError("fewer than two pooled bins; widen the sample or the pmf")
    stat = math.fsum((o - e) ** 2 / e for o, e in bins)
    dof = len(bins) - 1
    return stat, dof, float(_chi2.sf(stat, dof))


def _pool_margin(values: np.ndarray, floor: int) -> dict[int, int]:
    """Map each observed value to a pooled-bin index (adjacent pooling)."""
    counter = Counter(values.tolist())
    mapping: dict[int, int] = {}
    bin_idx = 0
    acc = 0
    for v in sorted(counter):
        mapping[v] = bin_idx
        acc += counter[v]
        if acc >= floor:
            bin_idx += 1
            acc = 0
    if acc > 0 and bin_idx > 0:
        # leftover mass joins the previous bin
        for v, b in mapping.items():
            if b == bin_idx:
                mapping[v] = bin_idx - 1
    return mapping


def chi_square_independence(
    x: np.ndarray, y: np.ndarray, min_expected: float = 5.0
) -> tuple[float, int, float]:
    """Pearson independence statistic on the joint histogram of (x, y).

    Adjacent values are pooled per margin until every marginal bin holds at
    least ceil(sqrt(min_expected * n)) observations, which guarantees every
    expected cell count row*col/n clears min_expected.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    n = x.size
    floor = math.ceil(math.sqrt(min_expected * n))
    map_x = _pool_margin(x, floor)
    map_y = _pool_margin(y, floor)
    rows = max(map_x.values()) + 1
    cols = max(map_y.values()) + 1
    if rows < 2 or cols < 2:
        raise ValueError("a margin pooled to a single bin; no test possible")
    table = np.zeros((rows, cols))
    xi = np.vectorize(map_x.get)(x)
    yi = np.vectorize(map_y.get)(y)
    np.add.at(table, (xi, yi), 1.0)
    row_tot = table.sum(axis=1, keepdims=True)
    col_tot = table.sum(axis=0, keepdims=True)
    expected = row_tot @ col_tot / n
    stat = float(((table - expected) ** 2 / expected).sum())
    dof = (rows - 1) * (cols - 1)
    return stat, dof, float(_chi2.sf(stat, dof))


@dataclass(frozen=True)
class MomentEstimates:
    """Unbiased moment estimators with jackknife standard errors.

    For 1-d input the fields are floats; for (n, 2) input mean/variance are
    per-column pairs and the covariance fields are populated.
    """

    mean: float | tuple[float, float]
    mean_se: float | tuple[float, float]
    variance: float | tuple[float, float]
    variance_se: float | tuple[float, float]
    covariance: float | None = None
    covariance_se: float | None = None


def _jackknife_se(loo: np.ndarray) -> float:
    n = loo.size
    return float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def _variance_loo(x: np.ndarray) -> np.ndarray:
    n = x.size
    s1 = x.sum()
    s2 = (x * x).sum()
    mu = (s1 - x) / (n - 1)
    return (s2 - x * x - (n - 1) * mu * mu) / (n - 2)


def _univariate(x: np.ndarray) -> tuple[float, float, float, float]:
    n = x.size
    m = float(x.mean())
    v = float(x.var(ddof=1))
    m_se = math.sqrt(v / n)
    v_se = _jackknife_se(_variance_loo(x))
    return m, m_se, v, v_se


def moment_estimates(samples: Sequence[float] | np.ndarray) -> MomentEstimates:
    """Mean/variance (and covariance for paired samples) with standard errors."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        if arr.size < 2:
            raise ValueError("need at least two samples")
        m, m_se, v, v_se = _univariate(arr)
        return MomentEstimates(mean=m, mean_se=m_se, variance=v, variance_se=v_se)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be 1-d or of shape (n, 2)")
    if arr.shape[0] < 3:
        raise ValueError("need at least three paired samples")
    x, y = arr[:, 0], arr[:, 1]
    mx, mx_se, vx, vx_se = _univariate(x)
    my, my_se, vy, vy_se = _univariate(y)
    n = x.size
    sxy = (x * y).sum()
    mu_x = (x.sum() - x) / (n - 1)
    mu_y = (y.sum() - y) / (n - 1)
    cov_loo = (sxy - x * y - (n - 1) * mu_x * mu_y) / (n - 2)
    cov = float(np.cov(x, y, ddof=1)[0, 1])
    return MomentEstimates(
        mean=(mx, my),
        mean_se=(mx_se, my_se),
        variance=(vx, vy),
        variance_se=(vx_se, vy_se),
        covariance=cov,
        covariance_se=_jackknife_se(cov_loo),
    )


def jackknife_correlation(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Sample correlation with a jackknife standard error (O(n))."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 3 or y.size != n:
        raise ValueError("need paired samples, at least three")
    mu_x = (x.sum() - x) / (n - 1)
    mu_y = (y.sum() - y) / (n - 1)
    vx_loo = _variance_loo(x)
    vy_loo = _variance_loo(y)
    cov_loo = ((x * y).sum() - x * y - (n - 1) * mu_x * mu_y) / (n - 2)
    r_loo = cov_loo / np.sqrt(vx_loo * vy_loo)
    r = float(np.corrcoef(x, y)[0, 1])
    return r, _jackknife_se(r_loo)


def ode_residual(
    f: Callable[[float], float | np.ndarray],
    rhs: Callable[[float], float | np.ndarray],
    t_grid: Sequence[float],
    dt: float,
) -> float:
    """Max |centered finite difference of f minus rhs| over the time grid.

    f and rhs map t to a scalar or an array over the state grid; every t on
    the grid must satisfy t >= dt so the backward evaluation stays in
    domain.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    worst = 0.0
    for t in t_grid:
        fd = (np.asarray(f(t + dt)) - np.asarray(f(t - dt))) / (2.0 * dt)
        r = np.asarray(rhs(t))
        worst = max(worst, float(np.max(np.abs(fd - r))))
    return worst


@dataclass(frozen=True)
class CheckRecord:
    """One verification result: a named statistic, its acceptance band, a flag."""

    name: str
    statistic: float
    band: str
    passed: bool


def render_report(records: Sequence[CheckRecord]) -> str:
    """Fixed-format text report, one record per line; deterministic bytes."""
    lines = []
    for r in records:
        flag = "PASS" if r.passed else "FAIL"
        lines.append(f"{flag} {r.name} statistic={r.statistic!r} band={r.band}")
    n_pass = sum(r.passed for r in records)
    verdict = "OK" if n_pass == len(records) else "FAILED"
    lines.append(f"{verdict} {n_pass}/{len(records)} checks passed")
    return "\n".join(lines) + "\n"
