"""Monte-Carlo significance study for monotone fits.

Replicate tables share the template's level counts and are drawn from a
hypothesized per-level parameter vector. Replicate ``r`` draws from its own
PCG64 stream seeded by ``SeedSequence(master_seed, spawn_key=(r,))``, so the
report does not depend on how replicates are split across workers.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, StructuralError
from .families import FamilySpec, Kind, binomial_log_coefficient
from .fit import fit_nondecreasing, fit_nonincreasing, log_likelihood
from .table import ObservationTable

SEED_LIMIT = 2**64


class Statistic(enum.Enum):
    DELTA = "delta"
    LOGLIK = "loglik"


@dataclass(frozen=True)
class HypothesisSpec:
    family: FamilySpec
    theta: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        theta = tuple(float(t) for t in self.theta)
        counts = tuple(int(n) for n in self.counts)
        if len(theta) != len(counts) or not counts:
            raise StructuralError(
                f"hypothesis has {len(theta)} parameters for {len(counts)} levels"
            )
        if min(counts) < 1:
            raise StructuralError("every level needs at least one observation")
        self.family.check_parameter(theta)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def null_constant(cls, template: ObservationTable, family: FamilySpec) -> HypothesisSpec:
        """Every level at the template's grand mean."""
        family.validate(template)
        grand = math.fsum(template.flat()) / template.total_count
        return cls(family, (grand,) * template.m, template.counts)

    @classmethod
    def alternative_fit(cls, template: ObservationTable, family: FamilySpec) -> HypothesisSpec:
        """Each level at the template's fitted non-decreasing estimate."""
        family.validate(template)
        return cls(family, tuple(fit_nondecreasing(template).phi), template.counts)

    def matches(self, table: ObservationTable) -> bool:
        return table.counts == self.counts


def substream(master_seed: int, replicate: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(replicate,)))
    )


def generate_table(
    hypothesis: HypothesisSpec,
    rng: np.random.Generator,
    labels=None,
) -> ObservationTable:
    per_obs = np.repeat(hypothesis.theta, hypothesis.counts)
    draws = hypothesis.family.sample_many(per_obs, rng)
    splits = np.cumsum(hypothesis.counts)[:-1]
    return ObservationTable(np.split(draws, splits), labels)


def delta_statistic(table: ObservationTable) -> float:
    """Spread of the non-decreasing fit minus spread of the non-increasing fit.

    Both spreads are taken between the first and last levels and are
    nonnegative, so for 0/1 data the statistic lies in ``[-1, 1]``.
    """
    up = fit_nondecreasing(table)
    down = fit_nonincreasing(table)
    return (up.blocks[-1].value - up.blocks[0].value) - (
        down.blocks[0].value - down.blocks[-1].value
    )


@dataclass(frozen=True)
class _Scorer:
    statistic: Statistic
    hypothesis: HypothesisSpec
    refit: bool = False
    binomial: bool = False

    def __call__(self, table: ObservationTable) -> float:
        if self.statistic is Statistic.DELTA:
            return delta_statistic(table)
        phi = fit_nondecreasing(table).phi if self.refit else self.hypothesis.theta
        value = log_likelihood(self.hypothesis.family, phi, table)
        if self.binomial:
            value += binomial_log_coefficient(table)
        return value


def _replicate_chunk(args) -> list[float]:
    scorer, master_seed, start, stop = args
    return [
        scorer(generate_table(scorer.hypothesis, substream(master_seed, r)))
        for r in range(start, stop)
    ]


@dataclass(frozen=True)
class SimulationReport:
    statistic: Statistic
    replicate_count: int
    master_seed: int
    values: np.ndarray
    observed: float
    refit: bool = False
    binomial: bool = False

    @property
    def count_below(self) -> int:
        return int(np.count_nonzero(self.values < self.observed))

    @property
    def count_at_or_above(self) -> int:
        return self.replicate_count - self.count_below

    @property
    def quantile_rank(self) -> float:
        """Fraction of replicates strictly below the observed statistic."""
        return self.count_below / self.replicate_count

    def summary(self) -> dict:
        finite = self.values[np.isfinite(self.values)]
        return {
            "statistic": self.statistic.value,
            "refit": self.refit,
            "binomial": self.binomial,
            "replicate_count": self.replicate_count,
            "master_seed": self.master_seed,
            "observed": self.observed,
            "quantile_rank": self.quantile_rank,
            "count_below": self.count_below,
            "count_at_or_above": self.count_at_or_above,
            "replicate_mean": math.fsum(finite) / len(finite) if len(finite) else math.nan,
            "replicate_min": float(np.min(self.values)),
            "replicate_max": float(np.max(self.values)),
        }


def run_study(
    template: ObservationTable,
    hypothesis: HypothesisSpec,
    statistic: Statistic | str,
    replicates: int,
    master_seed: int,
    *,
    refit: bool = False,
    binomial: bool = False,
    workers: int = 1,
) -> SimulationReport:
    """Rank the template's statistic among replicates drawn under ``hypothesis``.

    Options for the log-likelihood statistic only: ``refit`` scores each table
    at its own fitted estimate instead of at ``hypothesis.theta``;
    ``binomial`` (Bernoulli data) adds the table's binomial coefficient term,
    giving the log-likelihood of the aggregated counts.
    """
    statistic = Statistic(statistic)
    if replicates < 1:
        raise ConfigurationError(f"replicates must be >= 1, got {replicates}")
    if not 0 <= master_seed < SEED_LIMIT:
        raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {master_seed}")
    if refit and statistic is not Statistic.LOGLIK:
        raise ConfigurationError("refit applies only to the loglik statistic")
    if binomial and statistic is not Statistic.LOGLIK:
        raise ConfigurationError("binomial applies only to the loglik statistic")
    if binomial and hypothesis.family.kind is not Kind.BERNOULLI:
        raise ConfigurationError("binomial requires the bernoulli family")
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    if not hypothesis.matches(template):
        raise ConfigurationError("hypothesis level counts differ from the template")
    hypothesis.family.validate(template)

    scorer = _Scorer(statistic, hypothesis, refit, binomial)
    observed = scorer(template)
    values = np.empty(replicates)
    if workers == 1:
        values[:] = _replicate_chunk((scorer, master_seed, 0, replicates))
    else:
        bounds = np.linspace(0, replicates, min(workers, replicates) * 4 + 1).astype(int)
        jobs = [
            (scorer, master_seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for job, chunk in zip(jobs, pool.map(_replicate_chunk, jobs)):
                values[job[2] : job[3]] = chunk
    return SimulationReport(statistic, replicates, master_seed, values, observed, refit, binomial)
