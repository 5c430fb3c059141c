"""Contingency tables and Pearson chi-squared tests on Boolean variables."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import stats as scipy_stats

from simulator import Dataset

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.05
MIN_EXPECTED_COUNT = 5.0

__all__ = [
    "ContingencyTable", "TestOutcome", "critical_value", "tabulate", "chi_squared",
    "distributions_differ", "cond_independent",
]


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 counts: rows are the first variable's value, columns the second's."""
    counts: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (2, 2):
            raise ValueError("a contingency table is 2x2")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, 'counts', tuple(tuple(int(c) for c in row) for row in counts))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def transposed(self) -> ContingencyTable:
        (a, b), (c, d) = self.counts
        return ContingencyTable(((a, c), (b, d)))


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    degrees_of_freedom: int
    critical_value: float
    reject_independence: bool
    inconclusive: bool
    p_value: float = 1.0
    strata_tested: int = 1
    strata_skipped: int = 0

    __test__ = False  # not a pytest class

    @property
    def conclusive_independence(self) -> bool:
        """The test ran and found no dependence."""
        return not self.inconclusive and not self.reject_independence


def critical_value(alpha: float, dof: int = 1) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"significance level {alpha} outside (0, 1)")
    return float(scipy_stats.chi2.ppf(1.0 - alpha, dof))


def tabulate(dataset: Dataset, x: str, y: str,
             filter: Mapping[str, bool] | None = None) -> ContingencyTable:
    if x == y:
        raise ValueError("cannot tabulate a variable against itself")
    selected = dataset.mask(filter)
    xs = dataset.column(x)[selected]
    ys = dataset.column(y)[selected]
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (xs, ys), 1)
    return ContingencyTable(counts)


def chi_squared(table: ContingencyTable, alpha: float = DEFAULT_ALPHA) -> TestOutcome:
    """Pearson statistic without continuity correction.

    Any expected cell below five makes the outcome inconclusive; cells with a
    zero expectation (an empty row or column) contribute nothing.
    """
    threshold = critical_value(alpha)
    observed = table.array
    total = observed.sum()
    if total == 0:
        return TestOutcome(0.0, 1, threshold, False, True)

    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0)) / total
    contributions = np.divide((observed - expected) ** 2, expected,
                              out=np.zeros_like(expected), where=expected > 0)
    statistic = float(contributions.sum())
    inconclusive = bool(np.any(expected < MIN_EXPECTED_COUNT))
    return TestOutcome(
        statistic=statistic,
        degrees_of_freedom=1,
        critical_value=threshold,
        reject_independence=(not inconclusive) and statistic > threshold,
        inconclusive=inconclusive,
        p_value=float(scipy_stats.chi2.sf(statistic, 1)),
    )


def distributions_differ(dataset_a: Dataset, dataset_b: Dataset, target: str,
                         alpha: float = DEFAULT_ALPHA) -> TestOutcome:
    """Does `target` follow the same distribution in both datasets?"""
    if not len(dataset_a) or not len(dataset_b):
        raise ValueError("both datasets must hold records")
    column_a = dataset_a.column(target)
    column_b = dataset_b.column(target)
    counts = (
        (int(len(column_a) - column_a.sum()), int(column_a.sum())),
        (int(len(column_b) - column_b.sum()), int(column_b.sum())),
    )
    return chi_squared(ContingencyTable(counts), alpha)


def cond_independent(dataset: Dataset, x: str, y: str, given: Iterable[str] = (),
                     alpha: float = DEFAULT_ALPHA) -> TestOutcome:
    """Stratified test of x ⟂ y | given on the observational records.

    Independence is accepted when no conclusive stratum rejects it. The
    reported statistic is the largest conclusive stratum statistic.
    """
    given = tuple(given)
    if x in given or y in given:
        raise ValueError("conditioning set must exclude the tested pair")
    observations = dataset.observational()

    tested, skipped = 0, 0
    rejected = False
    statistic = 0.0
    p_value = 1.0
    for values in itertools.product((False, True), repeat=len(given)):
        outcome = chi_squared(tabulate(observations, x, y, dict(zip(given, values))), alpha)
        if outcome.inconclusive:
            skipped += 1
            continue
        tested += 1
        rejected |= outcome.reject_independence
        if outcome.statistic >= statistic:
            statistic, p_value = outcome.statistic, outcome.p_value

    if not tested:
        logger.debug("all %d strata inconclusive for %s ~ %s | %s", skipped, x, y, given)
    return TestOutcome(
        statistic=statistic,
        degrees_of_freedom=1,
        critical_value=critical_value(alpha),
        reject_independence=rejected,
        inconclusive=tested == 0,
        p_value=p_value,
        strata_tested=tested,
        strata_skipped=skipped,
    )
