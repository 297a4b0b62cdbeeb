"""Shared strategies and independent reference computations for the test suite."""

import math

import numpy as np
from hypothesis import strategies as st

from monotone_mle import BERNOULLI, EXPONENTIAL, GEOMETRIC, POISSON, ObservationTable, normal
from monotone_mle.families import Kind

NORMAL1 = normal(1.0)
ALL_FAMILIES = (BERNOULLI, POISSON, GEOMETRIC, NORMAL1, EXPONENTIAL)


def observations(family):
    """Hypothesis strategy for single observable values of ``family``."""
    k = family.kind
    if k is Kind.BERNOULLI:
        return st.sampled_from([0.0, 1.0])
    if k in (Kind.POISSON, Kind.GEOMETRIC):
        return st.integers(0, 12).map(float)
    # continuous values on a 1/8 grid: exactly representable, so likelihood
    # differences between candidate fits stay well above rounding
    if k is Kind.EXPONENTIAL:
        return st.integers(1, 160).map(lambda i: i / 8)
    return st.integers(-160, 160).map(lambda i: i / 8)


@st.composite
def tables(draw, family=BERNOULLI, max_levels=8, max_count=4):
    m = draw(st.integers(1, max_levels))
    levels = [
        draw(st.lists(observations(family), min_size=1, max_size=max_count)) for _ in range(m)
    ]
    return ObservationTable(levels)


@st.composite
def family_tables(draw, max_levels=8, max_count=4):
    family = draw(st.sampled_from(ALL_FAMILIES))
    return family, draw(tables(family, max_levels, max_count))


def compound_loglik(family, lam, table):
    """Independent compound log-likelihood for a batch of parameter vectors (rows of ``lam``).

    Goes through plain per-level sums of scalar densities rather than the
    library's vectorized path.
    """
    lam = np.atleast_2d(lam)
    out = np.zeros(lam.shape[0])
    for i, level in enumerate(table.levels):
        x = np.asarray(level)[None, :]
        out += np.sum(family.log_pdf(x, lam[:, i : i + 1]), axis=1)
    return out


def random_nondecreasing(rng, family, phi, size):
    """``size`` random non-decreasing vectors in the family's parameter space.

    Half are spread across the space, half are perturbations of ``phi``.
    """
    m = len(phi)
    k = family.kind
    spread = max(1.0, float(np.max(np.abs(phi))) * 2)
    half = size // 2
    if k is Kind.BERNOULLI:
        wide = rng.random((half, m))
        wide[rng.random((half, m)) < 0.05] = 0.0
        wide[rng.random((half, m)) < 0.05] = 1.0
        near = np.clip(phi + rng.normal(0, 0.05, (size - half, m)), 0.0, 1.0)
    elif k in (Kind.POISSON, Kind.GEOMETRIC):
        wide = rng.uniform(0, spread, (half, m))
        wide[rng.random((half, m)) < 0.05] = 0.0
        near = np.clip(phi + rng.normal(0, 0.1, (size - half, m)), 0.0, None)
    elif k is Kind.EXPONENTIAL:
        wide = rng.uniform(1e-3, spread, (half, m))
        near = np.abs(phi + rng.normal(0, 0.1, (size - half, m))) + 1e-9
    else:
        wide = rng.uniform(-spread, spread, (half, m))
        near = phi + rng.normal(0, 0.1, (size - half, m))
    return np.sort(np.vstack([wide, near]), axis=1)


def exact_mean(values):
    return math.fsum(values) / len(values)



def likelihood_grids(family, y, points=41):
    """Log-likelihood of sample ``y`` on a grid rising to its mean and one falling from it.

    Returns ``(below, above)``: values at increasing parameters ending at the
    mean, and at increasing parameters starting at the mean.
    """
    ybar = math.fsum(y) / len(y)
    lo, hi, lo_closed, _ = family.interval
    k = family.kind
    if k is Kind.NORMAL:
        start, stop = ybar - 5 * family.sigma, ybar + 5 * family.sigma
    elif k is Kind.EXPONENTIAL:
        start, stop = ybar / 50, ybar * 10
    elif k is Kind.BERNOULLI:
        start, stop = 0.0, 1.0
    else:
        start, stop = 0.0, ybar + max(2.0, 3 * ybar)
    below = np.linspace(start, ybar, points)
    above = np.linspace(ybar, stop, points)
    below[-1] = above[0] = ybar
    ll = lambda grid: np.array([family.log_likelihood(y, t) for t in grid])  # noqa: E731
    return ll(below), ll(above)


# SAT-R score, total students, no-shows
SAT_R_ROWS = [
    (330, 1, 0), (390, 2, 0), (400, 1, 0), (410, 2, 0), (420, 5, 0), (430, 4, 0),
    (440, 4, 1), (450, 3, 2), (460, 2, 0), (470, 8, 1), (480, 11, 3), (490, 9, 0),
    (500, 4, 1), (510, 11, 0), (520, 9, 0), (530, 8, 1), (540, 11, 4), (550, 6, 1),
    (560, 5, 0), (570, 6, 0), (580, 7, 0), (590, 5, 1), (600, 3, 1), (610, 5, 3),
    (620, 4, 2), (630, 1, 0), (640, 7, 2), (650, 1, 0), (660, 1, 0), (680, 1, 1),
    (690, 1, 1), (700, 1, 0), (710, 1, 0), (750, 1, 0), (800, 1, 1),
]

# (first score, last score, total, no-shows) of each fitted non-decreasing block
SAT_R_BLOCKS = [
    (330, 430, 15, 0), (440, 530, 69, 9), (540, 580, 35, 5), (590, 590, 5, 1),
    (600, 600, 3, 1), (610, 660, 19, 7), (680, 750, 5, 2), (800, 800, 1, 1),
]


def sat_r_table():
    scores, totals, ones = zip(*SAT_R_ROWS)
    return ObservationTable.from_counts(totals, ones, scores)
