"""One-parameter PDF families parameterized by their means.

Each family has a parameter interval ``Theta`` containing the observable set
``D``, and a likelihood that, for any observable sample, strictly increases up
to the sample mean and strictly decreases after it. Those two properties are
all the monotone fitter relies on; the fitter itself never looks at a family.

Zero densities are reported as ``-inf`` log-densities rather than errors, and
``0 * log 0`` is taken as ``0`` so the degenerate boundary members (Bernoulli
at 0 and 1, Poisson and geometric at 0) carry their point masses correctly.

A binomial table is handled as the equivalent Bernoulli table. The two
compound likelihoods differ by the product of binomial coefficients
``prod_i C(n_i, d_i)``, which does not depend on the parameters, so the
maximizer is the same. Reported log-likelihoods omit that constant unless
asked for it (see ``binomial_log_coefficient``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .errors import DomainError, ObservabilityError, StructuralError
from .table import INTEGRALITY_TOL, ObservationTable

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class Kind(enum.Enum):
    BERNOULLI = "bernoulli"
    POISSON = "poisson"
    GEOMETRIC = "geometric"
    NORMAL = "normal"
    EXPONENTIAL = "exponential"


# (low, high, low_closed, high_closed)
_INTERVALS = {
    Kind.BERNOULLI: (0.0, 1.0, True, True),
    Kind.POISSON: (0.0, math.inf, True, False),
    Kind.GEOMETRIC: (0.0, math.inf, True, False),
    Kind.NORMAL: (-math.inf, math.inf, False, False),
    Kind.EXPONENTIAL: (0.0, math.inf, False, False),
}


@dataclass(frozen=True)
class FamilySpec:
    """A family kind plus its fixed hyperparameter (``sigma``, normal only)."""

    kind: Kind
    sigma: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.NORMAL:
            if self.sigma is None:
                raise DomainError("normal family requires sigma")
            sigma = float(self.sigma)
            if not (sigma > 0 and math.isfinite(sigma)):
                raise DomainError(f"normal family requires finite sigma > 0, got {self.sigma!r}")
            object.__setattr__(self, "sigma", sigma)
        elif self.sigma is not None:
            raise DomainError(f"{self.kind.value} family takes no sigma")

    @classmethod
    def parse(cls, name: str, sigma: float | None = None) -> FamilySpec:
        try:
            kind = Kind(name.lower())
        except ValueError:
            choices = ", ".join(k.value for k in Kind)
            raise DomainError(f"unknown family {name!r}; expected one of {choices}") from None
        return cls(kind, sigma)

    @property
    def name(self) -> str:
        return self.kind.value

    def __str__(self) -> str:
        if self.kind is Kind.NORMAL:
            return f"normal(sigma={self.sigma!r})"
        return self.kind.value

    # ------------------------------------------------------------------ #
    # Parameter interval and observable set
    # ------------------------------------------------------------------ #

    @property
    def interval(self) -> tuple[float, float, bool, bool]:
        return _INTERVALS[self.kind]

    def interval_str(self) -> str:
        lo, hi, lo_c, hi_c = self.interval
        return f"{'[' if lo_c else '('}{lo:g}, {hi:g}{']' if hi_c else ')'}"

    def in_parameter_space(self, theta) -> np.ndarray | bool:
        lo, hi, lo_c, hi_c = self.interval
        t = np.asarray(theta, dtype=float)
        ok = (t >= lo if lo_c else t > lo) & (t <= hi if hi_c else t < hi)
        return ok if t.ndim else bool(ok)

    def check_parameter(self, theta) -> None:
        if not np.all(self.in_parameter_space(theta)):
            t = np.atleast_1d(np.asarray(theta, dtype=float))
            bad = t[~np.atleast_1d(self.in_parameter_space(t))][0]
            raise DomainError(
                f"{self}: parameter {bad!r} outside {self.interval_str()}"
            )

    def is_observable(self, x) -> np.ndarray | bool:
        """Membership in ``D``, elementwise."""
        a = np.asarray(x, dtype=float)
        k = self.kind
        if k is Kind.BERNOULLI:
            ok = (a == 0.0) | (a == 1.0)
        elif k in (Kind.POISSON, Kind.GEOMETRIC):
            ok = np.isfinite(a) & (np.abs(a - np.round(a)) <= INTEGRALITY_TOL) & (a > -0.5)
        elif k is Kind.NORMAL:
            ok = np.isfinite(a)
        else:
            ok = np.isfinite(a) & (a > 0.0)
        return ok if a.ndim else bool(ok)

    def validate(self, table: ObservationTable) -> None:
        """Raise ``ObservabilityError`` at the first observation outside ``D``."""
        if not isinstance(table, ObservationTable):
            raise StructuralError("expected an ObservationTable")
        for i, level in enumerate(table.levels):
            if not level:
                raise StructuralError(f"level {i} has no observations")
            ok = self.is_observable(np.asarray(level))
            if not np.all(ok):
                j = int(np.argmin(ok))
                raise ObservabilityError(self.name, i, j, level[j])

    # ------------------------------------------------------------------ #
    # Densities
    # ------------------------------------------------------------------ #

    def log_pdf(self, x, theta):
        """``log f(x | theta)``, broadcasting over ``x`` and ``theta``.

        Returns ``-inf`` exactly where the density is zero, including every
        non-observable ``x``. Raises ``DomainError`` for ``theta`` outside the
        parameter interval.
        """
        self.check_parameter(theta)
        x = np.asarray(x, dtype=float)
        t = np.asarray(theta, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        obs = np.asarray(self.is_observable(x))
        xs = np.where(obs, x, 0.0)
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore"):
            if k is Kind.BERNOULLI:
                out = xlogy(xs, t) + xlog1py(1.0 - xs, -t)
            elif k is Kind.POISSON:
                xs = np.round(xs)
                out = xlogy(xs, t) - t - gammaln(xs + 1.0)
            elif k is Kind.GEOMETRIC:
                # p = 1 / (1 + theta): log f = x log(theta) - (x + 1) log(1 + theta)
                xs = np.round(xs)
                out = xlogy(xs, t) - (xs + 1.0) * np.log1p(t)
            elif k is Kind.NORMAL:
                z = (xs - t) / self.sigma
                out = -0.5 * z * z - math.log(self.sigma) - _LOG_SQRT_2PI
            else:
                out = -np.log(t) - xs / t
        out = np.where(obs, out, -np.inf)
        return float(out) if out.ndim == 0 else out

    def log_likelihood(self, sample, theta: float) -> float:
        """Sum of log-densities of ``sample`` at a single ``theta``."""
        v = np.asarray(self.log_pdf(np.asarray(sample, dtype=float), theta))
        if np.any(v == -np.inf):
            return -math.inf
        return math.fsum(v.ravel())

    # ------------------------------------------------------------------ #
    # Sampling
    # ------------------------------------------------------------------ #

    def sample(self, theta: float, rng: np.random.Generator) -> float:
        """One draw from ``f(. | theta)``."""
        return float(self.sample_many(np.asarray([theta], dtype=float), rng)[0])

    def sample_many(self, theta, rng: np.random.Generator) -> np.ndarray:
        """Independent draws, one per entry of ``theta``."""
        self.check_parameter(theta)
        t = np.asarray(theta, dtype=float)
        k = self.kind
        if k is Kind.BERNOULLI:
            return (rng.random(t.shape) < t).astype(float)
        if k is Kind.POISSON:
            return rng.poisson(t).astype(float)
        if k is Kind.GEOMETRIC:
            # inversion: P(X >= x) = q**x with q = theta / (1 + theta)
            u = 1.0 - rng.random(t.shape)
            with np.errstate(divide="ignore"):
                log_q = np.log(t) - np.log1p(t)
                draws = np.floor(np.log(u) / log_q)
            return np.where(t > 0.0, draws, 0.0) + 0.0
        if k is Kind.NORMAL:
            return rng.normal(t, self.sigma)
        return rng.exponential(t)


BERNOULLI = FamilySpec(Kind.BERNOULLI)
POISSON = FamilySpec(Kind.POISSON)
GEOMETRIC = FamilySpec(Kind.GEOMETRIC)
EXPONENTIAL = FamilySpec(Kind.EXPONENTIAL)


def normal(sigma: float) -> FamilySpec:
    return FamilySpec(Kind.NORMAL, sigma)


def binomial_log_coefficient(table: ObservationTable) -> float:
    """``sum_i log C(n_i, d_i)`` for a 0/1 table with ``d_i`` ones at level ``i``.

    Adding this to the Bernoulli compound log-likelihood gives the binomial
    one. It does not depend on the parameters but does vary between tables.
    """
    BERNOULLI.validate(table)
    n = np.asarray(table.counts, dtype=float)
    d = np.asarray(table.level_sums(), dtype=float)
    return math.fsum(gammaln(n + 1.0) - gammaln(d + 1.0) - gammaln(n - d + 1.0))


def log_pdf(family: FamilySpec, x, theta):
    return family.log_pdf(x, theta)


def sample(family: FamilySpec, theta: float, rng: np.random.Generator) -> float:
    return family.sample(theta, rng)


def validate_observable(family: FamilySpec, table: ObservationTable) -> None:
    family.validate(table)
