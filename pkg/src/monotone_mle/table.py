"""Grouped observations indexed by ordered levels of an explanatory variable."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import StructuralError

INTEGRALITY_TOL = 1e-9


def is_integral(x: float) -> bool:
    return math.isfinite(x) and abs(x - round(x)) <= INTEGRALITY_TOL


@dataclass(frozen=True)
class ObservationTable:
    """Observations ``levels[i][j]`` for levels ``i = 0..m-1``.

    Level order is semantic: fitting constrains the response to be monotone
    along it. ``labels`` are carried through for reporting only.
    """

    levels: tuple[tuple[float, ...], ...]
    labels: tuple[str, ...] = field(default=())

    def __init__(
        self,
        levels: Iterable[Iterable[float]],
        labels: Sequence[object] | None = None,
    ) -> None:
        lv = tuple(tuple(float(x) for x in level) for level in levels)
        if not lv:
            raise StructuralError("table has no levels")
        for i, level in enumerate(lv):
            if not level:
                raise StructuralError(f"level {i} has no observations")
        if labels is None:
            lb = tuple(str(i + 1) for i in range(len(lv)))
        else:
            lb = tuple(str(x) for x in labels)
            if len(lb) != len(lv):
                raise StructuralError(
                    f"{len(lb)} labels given for {len(lv)} levels"
                )
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "labels", lb)

    @classmethod
    def from_counts(
        cls,
        totals: Sequence[int],
        successes: Sequence[int],
        labels: Sequence[object] | None = None,
    ) -> ObservationTable:
        """Expand aggregate ``(total, successes)`` rows into 0/1 observations."""
        if len(totals) != len(successes):
            raise StructuralError("totals and successes differ in length")
        levels = []
        for i, (n, d) in enumerate(zip(totals, successes)):
            if n < 1:
                raise StructuralError(f"level {i} has total {n} < 1")
            if not 0 <= d <= n:
                raise StructuralError(f"level {i} has {d} successes out of {n}")
            levels.append([1.0] * d + [0.0] * (n - d))
        return cls(levels, labels)

    @property
    def m(self) -> int:
        return len(self.levels)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)

    @property
    def total_count(self) -> int:
        return sum(self.counts)

    @property
    def integral(self) -> bool:
        """True when every observation is an integer (to ``INTEGRALITY_TOL``)."""
        return all(is_integral(x) for level in self.levels for x in level)

    def level_sums(self) -> tuple[float, ...] | tuple[int, ...]:
        """Per-level sums; exact Python ints when the data is integral."""
        if self.integral:
            return tuple(sum(int(round(x)) for x in level) for level in self.levels)
        return tuple(math.fsum(level) for level in self.levels)

    def level_means(self) -> np.ndarray:
        return np.array([math.fsum(level) / len(level) for level in self.levels])

    def flat(self) -> np.ndarray:
        return np.fromiter(
            (x for level in self.levels for x in level), dtype=float, count=self.total_count
        )

    def level_index(self) -> np.ndarray:
        """Level number of each entry of :meth:`flat`."""
        return np.repeat(np.arange(self.m), self.counts)

    def reversed(self) -> ObservationTable:
        return ObservationTable(self.levels[::-1], self.labels[::-1])

    def subset(self, start: int, stop: int) -> ObservationTable:
        return ObservationTable(self.levels[start:stop], self.labels[start:stop])

    def __len__(self) -> int:
        return self.m
