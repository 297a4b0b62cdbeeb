"""Random-table cross-check of the fitter against exhaustive search and PAVA."""

from __future__ import annotations

import numpy as np

from .families import BERNOULLI, EXPONENTIAL, POISSON, FamilySpec, Kind
from .fit import brute_force_fit, fit_nondecreasing, pool_adjacent_violators
from .table import ObservationTable

ORACLE_FAMILIES = (BERNOULLI, POISSON, EXPONENTIAL)
VALUE_TOL = 1e-12


def random_table(
    rng: np.random.Generator,
    family: FamilySpec,
    max_levels: int = 8,
    max_count: int = 4,
) -> ObservationTable:
    """A table with 1..max_levels levels of 1..max_count observations from ``family``.

    Level parameters are drawn at random, so some tables have a trend and
    some do not.
    """
    m = int(rng.integers(1, max_levels + 1))
    counts = rng.integers(1, max_count + 1, size=m)
    k = family.kind
    if k is Kind.BERNOULLI:
        theta = rng.random(m)
    elif k in (Kind.POISSON, Kind.GEOMETRIC):
        theta = rng.uniform(0.0, 4.0, m)
    elif k is Kind.EXPONENTIAL:
        theta = rng.uniform(0.2, 5.0, m)
    else:
        theta = rng.normal(0.0, 2.0, m)
    theta = np.sort(theta) if rng.random() < 0.5 else theta
    return ObservationTable(
        family.sample_many(np.full(n, t), rng) for t, n in zip(theta, counts)
    )


def same_fit(a, b, tol: float = VALUE_TOL) -> bool:
    return a.partition == b.partition and bool(np.all(np.abs(a.values - b.values) <= tol))


def oracle_check(
    tables: int, seed: int, families=ORACLE_FAMILIES, max_levels: int = 8, max_count: int = 4
) -> list[tuple[FamilySpec, ObservationTable]]:
    """Return every (family, table) where the fitter disagrees with brute force or PAVA."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(tables):
        family = families[i % len(families)]
        table = random_table(rng, family, max_levels, max_count)
        fitted = fit_nondecreasing(table)
        if not (
            same_fit(fitted, brute_force_fit(table, family))
            and same_fit(fitted, pool_adjacent_violators(table))
        ):
            failures.append((family, table))
    return failures
