"""Bivariate packet counting for one designated source of a merged process.

For a family of q independent processes, track jointly A(t), the number of
jump packets the designated source has contributed to the merged process by
time t, and M(t), the merged count itself.  Packets from the source arrive
at rate lambda^(i) = sum_j lambda_j^(i), so A(t) is Poisson; the joint law
factorizes over independent per-(source, size) Poisson packet counts, which
is what the enumeration below sums over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import RateVector
from .simulate import SeedSpec
from .superpose import MergeFamily, merge

__all__ = [
    "PacketModel",
    "packet_joint_pmf",
    "packet_joint_pgf",
    "conditional_source_binomial",
    "packet_covariance",
    "packet_correlation",
    "sample_packet_counts",
]

# math.comb stays exact below this; larger binomials go through lgamma.
_LOG_BINOMIAL_THRESHOLD = 60


@dataclass(frozen=True)
class PacketModel:
    """A merge family with one component designated as the tracked source."""

    family: MergeFamily
    source: int

    def __post_init__(self) -> None:
        if not 1 <= self.source <= self.family.q:
            raise ValueError(
                f"source index {self.source} outside 1..{self.family.q}"
            )
        if self.packet_rate <= 0.0:
            raise ValueError("designated source must have positive total rate")

    @property
    def source_rates(self) -> RateVector:
        """Rate profile lambda^(i) of the designated source."""
        return self.family.components[self.source - 1]

    @property
    def packet_rate(self) -> float:
        """Total packet rate lambda^(i) of the source."""
        return self.source_rates.total

    @property
    def total_rate(self) -> float:
        """Total packet rate Lambda of the merged process."""
        return math.fsum(c.total for c in self.family.components)

    @property
    def other_rates(self) -> tuple[float, ...]:
        """Componentwise rate sums over all non-source components, padded."""
        k = self.family.k_max
        return tuple(
            math.fsum(
                c.padded(k)[j]
                for idx, c in enumerate(self.family.components, start=1)
                if idx != self.source
            )
            for j in range(k)
        )

    def merged_rates(self) -> RateVector:
        return merge(self.family)


def _source_multiplicities(
    k: int, a: int, weight_cap: int
) -> Iterator[tuple[tuple[int, ...], int]]:
    """All r in N_0^k with sum r_j = a and sum j*r_j <= weight_cap."""
    r = [0] * k

    def fill(j: int, left: int, weight: int) -> Iterator[tuple[tuple[int, ...], int]]:
        if j == k:
            r[k - 1] = left
            w = weight + k * left
            if w <= weight_cap:
                yield tuple(r), w
            return
        for c in range(left + 1):
            w = weight + j * c
            if w > weight_cap:
                break
            r[j - 1] = c
            yield from fill(j + 1, left - c, w)
        r[j - 1] = 0

    yield from fill(1, a, 0)


def packet_joint_pmf(model: PacketModel, a: int, n: int, t: float) -> float:
    """P{A(t) = a, M(t) = n} by bounded enumeration of packet multiplicities.

    r_j counts the source's size-j packets (sum r_j = a) and s_l the size-l
    packets of everyone else, constrained by sum j*r_j + sum l*s_l = n; each
    multiplicity is an independent Poisson count.
    """
    if a < 0 or n < 0:
        raise ValueError(f"a and n must be >= 0, got a={a}, n={n}")
    if a > n:
        raise ValueError(f"a={a} exceeds n={n}: packets cannot outnumber jumps")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 1.0 if a == n == 0 else 0.0
    from .core import _partitions  # partition enumerator doubles as the s-index set

    src = model.source_rates
    k_i = src.k
    k_q = model.family.k_max
    mu = model.other_rates
    log_src = [math.log(lam * t) if lam > 0.0 else None for lam in src.rates]
    log_mu = [math.log(m * t) if m > 0.0 else None for m in mu]
    neg = -model.total_rate * t
    logs: list[float] = []
    for r, w in _source_multiplicities(k_i, a, n):
        acc_r = 0.0
        ok = True
        for j_idx, rj in enumerate(r):
            if rj == 0:
                continue
            if log_src[j_idx] is None:
                ok = False
                break
            acc_r += rj * log_src[j_idx] - math.lgamma(rj + 1)
        if not ok:
            continue
        for s in _partitions(k_q, n - w):
            acc = acc_r
            for l_idx, sl in enumerate(s):
                if sl == 0:
                    continue
                if log_mu[l_idx] is None:
                    acc = None
                    break
                acc += sl * log_mu[l_idx] - math.lgamma(sl + 1)
            if acc is not None:
                logs.append(neg + acc)
    if not logs:
        return 0.0
    m = max(logs)
    return math.exp(m + math.log(math.fsum(math.exp(v - m) for v in logs)))


def packet_joint_pgf(model: PacketModel, u: float, v: float, t: float) -> float:
    """E[u^A(t) v^M(t)], the closed exponential form of the joint pgf."""
    if abs(u) > 1.0 or abs(v) > 1.0:
        raise ValueError(f"pgf arguments must satisfy |u|,|v| <= 1, got {u}, {v}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    src = model.source_rates
    exponent = -model.total_rate
    exponent += math.fsum(
        lam * u * v**j for j, lam in enumerate(src.rates, start=1)
    )
    exponent += math.fsum(
        m * v**l for l, m in enumerate(model.other_rates, start=1)
    )
    return math.exp(exponent * t)


def conditional_source_binomial(model: PacketModel, a: int, b: int) -> float:
    """P{source contributed a of the b packets registered by time t}.

    Binomial(b, lambda^(i) / Lambda), independent of t; zero for a > b.
    """
    if b < 0:
        raise ValueError(f"b must be >= 0, got {b}")
    if a < 0:
        raise ValueError(f"a must be >= 0, got {a}")
    if a > b:
        return 0.0
    p = model.packet_rate / model.total_rate
    if b <= _LOG_BINOMIAL_THRESHOLD:
        return math.comb(b, a) * p**a * (1.0 - p) ** (b - a)
    log_c = math.lgamma(b + 1) - math.lgamma(a + 1) - math.lgamma(b - a + 1)
    log_p = a * math.log(p) if a else 0.0
    log_q = (b - a) * math.log1p(-p) if b > a else 0.0
    return math.exp(log_c + log_p + log_q)


def packet_covariance(model: PacketModel, t: float) -> float:
    """Cov(A(t), M(t)) = t * sum_j j * lambda_j^(i)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    src = model.source_rates
    return t * math.fsum(j * lam for j, lam in enumerate(src.rates, start=1))


def packet_correlation(model: PacketModel) -> float:
    """Corr(A(t), M(t)); independent of t."""
    src = model.source_rates
    num = math.fsum(j * lam for j, lam in enumerate(src.rates, start=1))
    k = self_k = model.family.k_max
    merged = model.merged_rates()
    second = math.fsum(j * j * lam for j, lam in enumerate(merged.rates, start=1))
    return num / (math.sqrt(model.packet_rate) * math.sqrt(second))


def sample_packet_counts(
    model: PacketModel, t: float, n_paths: int, seed: SeedSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Joint replicated draws of (A(t), M(t)).

    Drawn from the per-(component, size) Poisson packet counts, which is the
    exact joint law of the bivariate process at a fixed time; vectorized for
    the Monte Carlo checks.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    rng = seed.generator()
    a = np.zeros(n_paths, dtype=np.int64)
    m = np.zeros(n_paths, dtype=np.int64)
    for idx, comp in enumerate(model.family.components, start=1):
        for j, lam in enumerate(comp.rates, start=1):
            if lam <= 0.0:
                continue
            c = rng.poisson(lam * t, size=n_paths)
            if idx == model.source:
                a += c
            m += j * c
    return a, m
