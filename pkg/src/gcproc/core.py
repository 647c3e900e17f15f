"""Exact distribution machinery for a single generalized counting process.

A process that performs jumps of sizes 1..k, size-j jumps arriving at rate
lambda_j, is fully determined by its rate profile.  Its state probabilities
are sums over bounded integer partitions; this module provides that
enumerator (the brute-force oracle used throughout the test suite), a fast
recurrence for production pmf evaluation, the probability generating
function, and closed-form moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "RateVector",
    "enumerate_partitions",
    "pmf_enumerated",
    "pmf_recurrence",
    "pgf",
    "mean",
    "variance",
    "truncation_point",
]

# Beyond this value of Lambda*t the linear recurrence seed exp(-Lambda*t)
# loses too much headroom, so pmf evaluation moves to log space.
_LOG_SPACE_THRESHOLD = 50.0


@dataclass(frozen=True)
class RateVector:
    """Jump-rate profile (lambda_1, ..., lambda_k) of a counting process.

    Trailing zeros are allowed so a profile embeds into any larger
    amplitude bound, but at least one rate must be positive.
    """

    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if not rates:
            raise ValueError("rate vector needs at least one entry")
        for j, lam in enumerate(rates, start=1):
            if not math.isfinite(lam) or lam < 0.0:
                raise ValueError(f"lambda_{j}={lam!r}: rates must be finite and >= 0")
        if all(lam == 0.0 for lam in rates):
            raise ValueError("at least one rate must be positive")

    @property
    def k(self) -> int:
        """Maximum jump amplitude."""
        return len(self.rates)

    @property
    def total(self) -> float:
        """Total event rate, all jump sizes combined."""
        return math.fsum(self.rates)

    def rate(self, j: int) -> float:
        """Rate of size-j jumps; zero for any j beyond the amplitude bound."""
        if j < 1:
            raise ValueError(f"jump size must be >= 1, got {j}")
        return self.rates[j - 1] if j <= len(self.rates) else 0.0

    def padded(self, k: int) -> tuple[float, ...]:
        """Rates extended with zeros up to amplitude k."""
        if k < self.k:
            raise ValueError(f"cannot pad to k={k} below own amplitude {self.k}")
        return self.rates + (0.0,) * (k - self.k)


@lru_cache(maxsize=None)
def _partitions(k: int, n: int) -> tuple[tuple[int, ...], ...]:
    acc: list[tuple[int, ...]] = []
    x = [0] * k

    def fill(j: int, rem: int) -> None:
        if j == k:
            if rem % k == 0:
                x[k - 1] = rem // k
                acc.append(tuple(x))
            return
        for c in range(rem // j + 1):
            x[j - 1] = c
            fill(j + 1, rem - j * c)
        x[j - 1] = 0

    fill(1, n)
    return tuple(acc)


def enumerate_partitions(k: int, n: int) -> list[tuple[int, ...]]:
    """All multiplicity vectors (x_1, ..., x_k) with sum_j j*x_j = n.

    Deterministic lexicographic order on x; (k, n=0) yields the single
    all-zero vector.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return list(_partitions(k, n))


def pmf_enumerated(rates: RateVector, n: int, t: float) -> float:
    """State probability P{M(t) = n} by direct summation over partitions.

    Each multiplicity vector x contributes prod_j Poisson(x_j; lambda_j*t).
    Cost grows with the partition count, so this serves as the independent
    oracle; production evaluation goes through pmf_recurrence.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 1.0 if n == 0 else 0.0
    log_lt = [math.log(lam * t) if lam > 0.0 else None for lam in rates.rates]
    neg_total = -rates.total * t
    logs: list[float] = []
    for x in _partitions(rates.k, n):
        acc = neg_total
        feasible = True
        for j_idx, xj in enumerate(x):
            if xj == 0:
                continue
            llt = log_lt[j_idx]
            if llt is None:  # a zero-rate size would have to fire
                feasible = False
                break
            acc += xj * llt - math.lgamma(xj + 1)
        if feasible:
            logs.append(acc)
    if not logs:
        return 0.0
    m = max(logs)
    return min(1.0, math.exp(m + math.log(math.fsum(math.exp(v - m) for v in logs))))


def pmf_recurrence(rates: RateVector, n_max: int, t: float) -> list[float]:
    """All of p(0..n_max, t) via the size-weighted convolution recurrence

        n * p(n,t) = t * sum_{j=1}^{min(k,n)} j * lambda_j * p(n-j,t),

    seeded with p(0,t) = exp(-Lambda*t).  Runs in O(n_max * k); switches to
    log space once Lambda*t makes the linear seed underflow-prone.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return [1.0] + [0.0] * n_max
    lam_t = rates.total * t
    k = rates.k
    if lam_t <= _LOG_SPACE_THRESHOLD:
        p = [0.0] * (n_max + 1)
        p[0] = math.exp(-lam_t)
        for n in range(1, n_max + 1):
            s = math.fsum(
                j * rates.rates[j - 1] * p[n - j] for j in range(1, min(k, n) + 1)
            )
            p[n] = t * s / n
        return p
    weights = [
        (j, math.log(j * lam)) for j, lam in enumerate(rates.rates, start=1) if lam > 0.0
    ]
    log_t = math.log(t)
    lp = [-math.inf] * (n_max + 1)
    lp[0] = -lam_t
    for n in range(1, n_max + 1):
        terms = [lw + lp[n - j] for j, lw in weights if j <= n and lp[n - j] > -math.inf]
        if terms:
            m = max(terms)
            lp[n] = (
                log_t
                - math.log(n)
                + m
                + math.log(math.fsum(math.exp(v - m) for v in terms))
            )
    return [math.exp(v) if v > -math.inf else 0.0 for v in lp]


def pgf(rates: RateVector, u: float, t: float) -> float:
    """Probability generating function E[u^M(t)] = exp(-sum_j lambda_j (1-u^j) t)."""
    if abs(u) > 1.0:
        raise ValueError(f"pgf argument must satisfy |u| <= 1, got {u}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return math.exp(
        t * math.fsum(lam * (u**j - 1.0) for j, lam in enumerate(rates.rates, start=1))
    )


def mean(rates: RateVector, t: float) -> float:
    """E[M(t)] = t * sum_j j*lambda_j."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return t * math.fsum(j * lam for j, lam in enumerate(rates.rates, start=1))


def variance(rates: RateVector, t: float) -> float:
    """Var[M(t)] = t * sum_j j^2*lambda_j."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return t * math.fsum(j * j * lam for j, lam in enumerate(rates.rates, start=1))


# Markov's inequality on z^M(t) for z > 1 gives
#   Pr{M(t) > N} <= E[z^M(t)] / z^(N+1) = exp(t sum_j lambda_j (z^j - 1)) / z^(N+1);
# the pgf is entire in z, so any z > 1 is admissible.  A small fixed grid is
# enough since we only need a certified (not optimal) truncation point.
_CHERNOFF_GRID = (1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)


def truncation_point(rates: RateVector, t: float, tail: float) -> int:
    """Smallest grid-certified N with tail mass Pr{M(t) > N} <= tail."""
    if tail <= 0:
        raise ValueError(f"tail must be > 0, got {tail}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 0
    best: int | None = None
    log_tail = math.log(tail)
    for z in _CHERNOFF_GRID:
        log_g = t * math.fsum(
            lam * (z**j - 1.0) for j, lam in enumerate(rates.rates, start=1)
        )
        n = max(0, math.ceil((log_g - log_tail) / math.log(z)) - 1)
        best = n if best is None else min(best, n)
    assert best is not None
    return best
