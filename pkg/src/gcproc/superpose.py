"""Merging of independent generalized counting processes.

The sum of independent processes with rate profiles lambda^(1), ...,
lambda^(q) is again a process of the same kind whose size-j rate is the
componentwise sum (treating lambda_j^(i) = 0 beyond each component's own
amplitude).  Convergent countable families are handled through a
caller-supplied tail bound, and the module also answers which component a
registered jump packet came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import RateVector, pmf_recurrence

__all__ = [
    "MergeFamily",
    "CountableFamily",
    "Divergent",
    "DIVERGENT",
    "UndefinedConditioningError",
    "ConvergenceUncertainError",
    "merge",
    "merged_pmf_check",
    "merge_countable",
    "origin_probability",
    "origin_table",
]


class UndefinedConditioningError(ValueError):
    """Raised when conditioning on a jump size no component can produce."""


class ConvergenceUncertainError(RuntimeError):
    """Raised when the tail bound cannot certify convergence within budget.

    Distinct from a declared-divergent family: here the family may well
    converge, but the supplied bound did not get below tolerance in the
    allotted number of components.
    """


class Divergent:
    """Sentinel outcome for a countable family with a divergent rate sum."""

    _instance: "Divergent | None" = None

    def __new__(cls) -> "Divergent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGENT"


DIVERGENT = Divergent()


@dataclass(frozen=True)
class MergeFamily:
    """Ordered family of rate profiles to be superposed."""

    components: tuple[RateVector, ...]

    def __post_init__(self) -> None:
        components = tuple(self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise ValueError("merge family needs at least one component")
        for comp in components:
            if not isinstance(comp, RateVector):
                raise TypeError(f"family components must be RateVector, got {comp!r}")

    @property
    def q(self) -> int:
        return len(self.components)

    @property
    def k_max(self) -> int:
        return max(c.k for c in self.components)

    def rate(self, i: int, j: int) -> float:
        """lambda_j^(i) with the zero-padding convention; i is 1-based."""
        if not 1 <= i <= self.q:
            raise ValueError(f"component index {i} outside 1..{self.q}")
        return self.components[i - 1].rate(j)


def merge(family: MergeFamily) -> RateVector:
    """Rate profile of the superposed process: beta_j = sum_i lambda_j^(i)."""
    k = family.k_max
    beta = tuple(
        math.fsum(c.padded(k)[j] for c in family.components) for j in range(k)
    )
    return RateVector(beta)


def merged_pmf_check(family: MergeFamily, n: int, t: float) -> tuple[float, float]:
    """(pmf of the merged profile at n, convolution of component pmfs at n).

    The two must agree: the left side evaluates the claimed merged process
    directly, the right side builds the distribution of the sum from the
    components, so their agreement is the superposition law itself.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    direct = pmf_recurrence(merge(family), n, t)[n]
    conv = [1.0] + [0.0] * n
    for comp in family.components:
        comp_pmf = pmf_recurrence(comp, n, t)
        conv = [
            math.fsum(conv[m] * comp_pmf[v - m] for m in range(v + 1))
            for v in range(n + 1)
        ]
    return direct, conv[n]


@dataclass(frozen=True)
class CountableFamily:
    """Countably infinite family described by a generator rule.

    rate_generator(i) yields the i-th component (1-based); tail_bound(j, n)
    bounds sum_{i > n} lambda_j^(i) from above and must be non-increasing
    in n.  Divergence of a rate sum cannot be decided from finitely many
    terms, so a divergent family must say so via declared_divergent.
    """

    rate_generator: Callable[[int], RateVector]
    tail_bound: Callable[[int, int], float]
    k_max: int
    declared_divergent: bool = False

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")


def merge_countable(
    family: CountableFamily, tol: float, max_components: int = 100_000
) -> RateVector | Divergent:
    """Componentwise rate sums of a countable family, to absolute error < tol.

    Returns DIVERGENT for a family that declares a divergent rate sum and
    raises ConvergenceUncertainError when the tail bound cannot certify
    convergence within max_components terms.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if family.declared_divergent:
        return DIVERGENT
    sizes = range(1, family.k_max + 1)
    n_terms = None
    for n in range(1, max_components + 1):
        if all(family.tail_bound(j, n) < tol for j in sizes):
            n_terms = n
            break
    if n_terms is None:
        raise ConvergenceUncertainError(
            f"tail bound not below {tol!r} within {max_components} components"
        )
    parts: list[list[float]] = [[] for _ in sizes]
    for i in range(1, n_terms + 1):
        comp = family.rate_generator(i)
        if comp.k > family.k_max:
            raise ValueError(
                f"component {i} has amplitude {comp.k} beyond declared k_max "
                f"{family.k_max}; unbounded jump sizes are not supported"
            )
        padded = comp.padded(family.k_max)
        for j_idx in range(family.k_max):
            parts[j_idx].append(padded[j_idx])
    beta = tuple(math.fsum(col) for col in parts)
    return RateVector(beta)


def origin_probability(family: MergeFamily, source: int, j: int) -> float:
    """Probability a registered size-j packet came from the given component.

    Equals lambda_j^(source) / sum_i lambda_j^(i); conditioning is undefined
    when no component can produce a size-j packet.
    """
    if not 1 <= source <= family.q:
        raise ValueError(f"source index {source} outside 1..{family.q}")
    if not 1 <= j <= family.k_max:
        raise ValueError(f"jump size {j} outside 1..{family.k_max}")
    denom = math.fsum(family.rate(i, j) for i in range(1, family.q + 1))
    if denom == 0.0:
        raise UndefinedConditioningError(
            f"no component produces size-{j} packets; origin undefined"
        )
    return family.rate(source, j) / denom


def origin_table(family: MergeFamily) -> dict[tuple[int, int], float]:
    """origin_probability for every (source, feasible size) pair."""
    out: dict[tuple[int, int], float] = {}
    for j in range(1, family.k_max + 1):
        if math.fsum(family.rate(i, j) for i in range(1, family.q + 1)) == 0.0:
            continue
        for s in range(1, family.q + 1):
            out[(s, j)] = origin_probability(family, s, j)
    return out
