"""Maximum-likelihood monotone compound estimates.

For any family whose likelihood is unimodal about the sample mean, the
likelihood-maximizing non-decreasing parameter vector is the same: levels are
pooled into consecutive blocks, each block takes the mean of its
observations, and block values strictly increase. ``fit_nondecreasing`` builds
the blocks left to right. Starting at level ``a``, the block ends at the
largest ``k`` minimizing the pooled mean of levels ``a..k``.

Indices are 0-based and block bounds are inclusive.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import StructuralError
from .families import BERNOULLI, FamilySpec
from .table import ObservationTable

BRUTE_FORCE_MAX_LEVELS = 12


class Direction(enum.Enum):
    NONDECREASING = "nondecreasing"
    NONINCREASING = "nonincreasing"


@dataclass(frozen=True)
class PrefixStats:
    """Cumulative sums ``S[k]`` and counts ``N[k]`` over levels ``0..k-1``.

    Sums are Python ints for integral data, so mean comparisons done by
    cross-multiplication are exact.
    """

    sums: tuple
    counts: tuple[int, ...]

    @classmethod
    def from_table(cls, table: ObservationTable) -> PrefixStats:
        return cls.from_level_sums(table.level_sums(), table.counts)

    @classmethod
    def from_level_sums(cls, level_sums: Sequence, level_counts: Sequence[int]) -> PrefixStats:
        if len(level_sums) != len(level_counts) or not level_counts:
            raise StructuralError("need matching, non-empty level sums and counts")
        if min(level_counts) < 1:
            raise StructuralError("every level needs at least one observation")
        return cls(
            tuple(itertools.accumulate(level_sums, initial=0)),
            tuple(itertools.accumulate(level_counts, initial=0)),
        )

    @property
    def m(self) -> int:
        return len(self.counts) - 1

    def _check(self, a: int, b: int) -> None:
        if not 0 <= a <= b < self.m:
            raise StructuralError(f"level range [{a}, {b}] invalid for {self.m} levels")

    def pooled(self, a: int, b: int) -> tuple:
        """(sum, count) of levels ``a..b``."""
        self._check(a, b)
        return self.sums[b + 1] - self.sums[a], self.counts[b + 1] - self.counts[a]


def prefix_mean(stats: PrefixStats, a: int, b: int) -> float:
    """Mean of all observations in levels ``a..b``."""
    s, n = stats.pooled(a, b)
    return s / n


def block_end(stats: PrefixStats, a: int) -> tuple[int, float]:
    """Last level of the block starting at ``a`` and its value.

    Returns ``(b, kappa)`` where ``kappa`` is the minimum over ``k >= a`` of the
    mean of levels ``a..k`` and ``b`` is the largest ``k`` attaining it.
    """
    stats._check(a, a)
    S, N = stats.sums, stats.counts
    base_s, base_n = S[a], N[a]
    best_s, best_n, best = S[a + 1] - base_s, N[a + 1] - base_n, a
    for k in range(a + 1, stats.m):
        s, n = S[k + 1] - base_s, N[k + 1] - base_n
        # s / n <= best_s / best_n, with ties going to the larger k
        if s * best_n <= best_s * n:
            best_s, best_n, best = s, n, k
    return best, prefix_mean(stats, a, best)


@dataclass(frozen=True)
class Block:
    first: int
    last: int
    value: float
    count: int
    total: float

    @property
    def size(self) -> int:
        return self.last - self.first + 1


@dataclass(frozen=True)
class MonotoneEstimate:
    blocks: tuple[Block, ...]
    direction: Direction

    @property
    def m(self) -> int:
        return self.blocks[-1].last + 1

    @property
    def values(self) -> np.ndarray:
        return np.array([b.value for b in self.blocks])

    @property
    def phi(self) -> np.ndarray:
        """The fitted parameter of every level."""
        return np.repeat(self.values, [b.size for b in self.blocks])

    @property
    def partition(self) -> tuple[tuple[int, int], ...]:
        return tuple((b.first, b.last) for b in self.blocks)

    def reversed(self) -> MonotoneEstimate:
        """The same fit expressed on the index-reversed levels."""
        m = self.m
        flipped = (
            Direction.NONINCREASING
            if self.direction is Direction.NONDECREASING
            else Direction.NONDECREASING
        )
        blocks = tuple(
            Block(m - 1 - b.last, m - 1 - b.first, b.value, b.count, b.total)
            for b in reversed(self.blocks)
        )
        return MonotoneEstimate(blocks, flipped)


def _blocks_from_stats(stats: PrefixStats) -> tuple[Block, ...]:
    blocks = []
    a = 0
    prev = None
    while a < stats.m:
        b, kappa = block_end(stats, a)
        s, n = stats.pooled(a, b)
        if prev is not None and not prev[0] * n < s * prev[1]:
            raise RuntimeError(
                f"block values fail to increase strictly at levels {a}..{b}"
            )
        blocks.append(Block(a, b, kappa, n, s))
        prev = (s, n)
        a = b + 1
    return tuple(blocks)


def fit_nondecreasing(table: ObservationTable) -> MonotoneEstimate:
    """Likelihood-maximizing non-decreasing estimate by prefix-mean blocks."""
    stats = PrefixStats.from_table(table)
    return MonotoneEstimate(_blocks_from_stats(stats), Direction.NONDECREASING)


def fit_nonincreasing(table: ObservationTable) -> MonotoneEstimate:
    return fit_nondecreasing(table.reversed()).reversed()


def fit(table: ObservationTable, direction: Direction | str = Direction.NONDECREASING) -> MonotoneEstimate:
    if Direction(direction) is Direction.NONDECREASING:
        return fit_nondecreasing(table)
    return fit_nonincreasing(table)


def pool_adjacent_violators(
    table: ObservationTable, direction: Direction | str = Direction.NONDECREASING
) -> MonotoneEstimate:
    """Classical stack-based PAVA; an independent route to the same blocks."""
    direction = Direction(direction)
    if direction is Direction.NONINCREASING:
        return pool_adjacent_violators(table.reversed()).reversed()
    # stack entries: [first, last, sum, count]
    stack: list[list] = []
    for i, (s, n) in enumerate(zip(table.level_sums(), table.counts)):
        stack.append([i, i, s, n])
        # merge while the top two are not strictly increasing
        while len(stack) > 1 and stack[-2][2] * stack[-1][3] >= stack[-1][2] * stack[-2][3]:
            top = stack.pop()
            below = stack[-1]
            below[1] = top[1]
            below[2] += top[2]
            below[3] += top[3]
    blocks = tuple(Block(f, l, s / n, n, s) for f, l, s, n in stack)
    return MonotoneEstimate(blocks, Direction.NONDECREASING)


def log_likelihood(family: FamilySpec, phi, table: ObservationTable) -> float:
    """Compound log-likelihood ``sum_i sum_j log f(x_ij | phi_i)``; ``-inf`` if any factor is 0."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (table.m,):
        raise StructuralError(f"parameter vector of shape {phi.shape} for {table.m} levels")
    family.check_parameter(phi)
    terms = family.log_pdf(table.flat(), phi[table.level_index()])
    if np.any(terms == -np.inf):
        return -math.inf
    return math.fsum(terms)


def _consecutive_partitions(m: int):
    """All ways to cut ``0..m-1`` into consecutive runs, as lists of (first, last)."""
    for cuts in itertools.product((False, True), repeat=m - 1):
        runs, start = [], 0
        for i, cut in enumerate(cuts):
            if cut:
                runs.append((start, i))
                start = i + 1
        runs.append((start, m - 1))
        yield runs


def brute_force_fit(
    table: ObservationTable,
    family: FamilySpec | None = None,
    *,
    max_levels: int = BRUTE_FORCE_MAX_LEVELS,
) -> MonotoneEstimate:
    """Exhaustive search over consecutive-block partitions.

    Every partition whose block means strictly increase is scored by the
    compound log-likelihood under ``family`` (Bernoulli by default, which
    requires 0/1 data); the best one is returned. Raises ``RuntimeError`` if
    the best score is tied, which would contradict uniqueness.
    """
    return brute_force_ranking(table, family, max_levels=max_levels)[0][1]


def brute_force_ranking(
    table: ObservationTable,
    family: FamilySpec | None = None,
    *,
    max_levels: int = BRUTE_FORCE_MAX_LEVELS,
) -> list[tuple[float, MonotoneEstimate]]:
    """All strictly increasing block-mean candidates, best log-likelihood first."""
    m = table.m
    if m > max_levels:
        raise StructuralError(f"brute force refuses {m} levels (limit {max_levels})")
    family = BERNOULLI if family is None else family
    family.validate(table)

    # score and mean of every interval of levels, computed directly from the data
    block = {}
    for a in range(m):
        for b in range(a, m):
            values = [x for level in table.levels[a : b + 1] for x in level]
            total = math.fsum(values)
            mean = total / len(values)
            block[a, b] = (mean, family.log_likelihood(values, mean), len(values), total)

    ranked = []
    for runs in _consecutive_partitions(m):
        means = [block[r][0] for r in runs]
        if any(u >= v for u, v in zip(means, means[1:])):
            continue
        scores = [block[r][1] for r in runs]
        score = -math.inf if -math.inf in scores else math.fsum(scores)
        blocks = tuple(Block(a, b, block[a, b][0], block[a, b][2], block[a, b][3]) for a, b in runs)
        ranked.append((score, MonotoneEstimate(blocks, Direction.NONDECREASING)))
    if not ranked:
        raise RuntimeError("no strictly increasing block candidate exists")
    ranked.sort(key=lambda item: item[0], reverse=True)
    if len(ranked) > 1 and not ranked[0][0] > ranked[1][0]:
        raise RuntimeError(
            f"likelihood maximizer is not unique: {ranked[0][0]!r} vs {ranked[1][0]!r}"
        )
    return ranked
