"""Causal Bayesian networks: CPT estimation on a learned structure."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from models import (
    CausalDiagram, CausalError, EnvironmentFailure, Intervention, Mechanism, Scm, StructuralError,
    VariableId, check_acyclic, row_bits, row_index,
)
from simulator import Dataset, EnvironmentHandle, derive_seed

logger = logging.getLogger(__name__)

DEFAULT_PSEUDO_COUNT = 1.0
DEFAULT_MIN_ROW_COUNT = 5
DEFAULT_AUGMENT_SAMPLES = 20


class RowProvenance(str, Enum):
    ESTIMATED = "estimated"
    SMOOTHED = "smoothed"
    INTERVENTION_AUGMENTED = "intervention-augmented"


@dataclass(frozen=True)
class Cpt:
    """P(owner=1 | parents) per parent bit pattern, first parent most significant.

    ``counts`` holds the number of records each row was estimated from.
    """
    owner: VariableId
    parents: tuple[VariableId, ...]
    probabilities: tuple[float, ...]
    counts: tuple[int, ...] = ()
    provenance: tuple[RowProvenance, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'parents', tuple(self.parents))
        object.__setattr__(self, 'probabilities', tuple(float(p) for p in self.probabilities))
        object.__setattr__(self, 'counts', tuple(self.counts) or (0,) * len(self.probabilities))
        object.__setattr__(self, 'provenance',
                           tuple(self.provenance) or (RowProvenance.ESTIMATED,) * len(self.probabilities))

    @property
    def parent_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parents)

    def probability(self, parent_values: Mapping[str, bool]) -> float:
        return self.probabilities[row_index([parent_values[p] for p in self.parent_names])]

    def table(self) -> np.ndarray:
        """(rows, 2) array of P(owner=0 | u), P(owner=1 | u)."""
        ones = np.asarray(self.probabilities, dtype=float)
        return np.column_stack([1.0 - ones, ones])


@dataclass(frozen=True)
class CausalBayesianNetwork:
    structure: CausalDiagram
    cpts: Mapping[str, Cpt] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'cpts', dict(self.cpts))

    @property
    def names(self) -> tuple[str, ...]:
        return self.structure.names

    def __getitem__(self, name: str) -> Cpt:
        return self.cpts[name]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    smoothed_rows: list[tuple[str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_cbn(cbn: CausalBayesianNetwork) -> ValidationReport:
    report = ValidationReport()
    try:
        acyclic, witness = check_acyclic(cbn.structure)
        if not acyclic:
            report.violations.append(f"structure has cycle {' -> '.join(witness)}")
    except StructuralError as error:
        report.violations.append(str(error))

    for name in cbn.names:
        cpt = cbn.cpts.get(name)
        if cpt is None:
            report.violations.append(f"{name}: no CPT")
            continue
        expected = cbn.structure.parents(name)
        if cpt.parent_names != expected:
            report.violations.append(f"{name}: CPT parents {list(cpt.parent_names)} "
                                     f"differ from structure parents {list(expected)}")
        if len(cpt.probabilities) != 2 ** len(cpt.parents):
            report.violations.append(f"{name}: {len(cpt.probabilities)} rows "
                                     f"for {len(cpt.parents)} parents")
        for row, p in enumerate(cpt.probabilities):
            if not 0.0 <= p <= 1.0 or np.isnan(p):
                report.violations.append(f"{name}: row {row} probability {p} outside [0, 1]")
        for row, provenance in enumerate(cpt.provenance):
            if provenance is RowProvenance.SMOOTHED:
                report.smoothed_rows.append((name, row))
    extra = set(cbn.cpts) - set(cbn.names)
    if extra:
        report.violations.append(f"CPTs for unknown variables {sorted(extra)}")
    return report


def require_valid(cbn: CausalBayesianNetwork) -> None:
    report = validate_cbn(cbn)
    if not report.ok:
        raise StructuralError("; ".join(report.violations))


def _parent_index(dataset: Dataset, parents: tuple[str, ...]) -> np.ndarray:
    index = np.zeros(len(dataset), dtype=np.int64)
    for parent in parents:
        index = (index << 1) | dataset.column(parent).astype(np.int64)
    return index


def fit_mle(structure: CausalDiagram, dataset: Dataset,
            pseudo_count: float = DEFAULT_PSEUDO_COUNT) -> CausalBayesianNetwork:
    """Count-based estimate from the observational records only.

    Each row is (N1 + c) / (N + 2c); a row with no records is 0.5 and is
    marked smoothed.
    """
    if pseudo_count < 0:
        raise ValueError("pseudo_count must be non-negative")
    missing = set(structure.names) - set(dataset.variables)
    if missing:
        raise StructuralError(f"dataset lacks variables {sorted(missing)}")

    observations = dataset.observational()
    cpts = {}
    for variable in structure.variables:
        parents = structure.parents(variable.name)
        rows = 2 ** len(parents)
        index = _parent_index(observations, parents)
        totals = np.bincount(index, minlength=rows)
        ones = np.bincount(index, weights=observations.column(variable.name), minlength=rows)

        denominator = totals + 2.0 * pseudo_count
        estimate = np.divide(ones + pseudo_count, denominator,
                             out=np.full(rows, 0.5), where=denominator > 0)
        cpts[variable.name] = Cpt(
            owner=variable.id,
            parents=tuple(structure.variable(p).id for p in parents),
            probabilities=tuple(estimate),
            counts=tuple(int(n) for n in totals),
            provenance=tuple(RowProvenance.ESTIMATED if n else RowProvenance.SMOOTHED for n in totals),
        )
    return CausalBayesianNetwork(structure, cpts)


def augment_with_interventions(cbn: CausalBayesianNetwork, env: EnvironmentHandle,
                               min_count: int = DEFAULT_MIN_ROW_COUNT,
                               samples: int = DEFAULT_AUGMENT_SAMPLES,
                               seed: int = 0) -> CausalBayesianNetwork:
    """Re-estimate sparse rows from records drawn under do(parents = row).

    Rows whose parents include a non-doable variable are left as they are.
    Every draw happens before any row is replaced.
    """
    if min_count < 1 or samples < 1:
        raise ValueError("min_count and samples must be at least 1")

    draws = {}
    try:
        for name in cbn.names:
            cpt = cbn.cpts[name]
            if not cpt.parents:
                continue
            sparse = [row for row, count in enumerate(cpt.counts) if count < min_count]
            if sparse and not all(env.is_doable(p) for p in cpt.parent_names):
                logger.info("%s: %d sparse rows kept, a parent is non-doable", name, len(sparse))
                continue
            for row in sparse:
                assignment = dict(zip(cpt.parent_names, map(bool, row_bits(row, len(cpt.parents)))))
                records = env.intervene(Intervention(assignment), samples,
                                        derive_seed(seed, cpt.owner.index, row))
                draws[(name, row)] = records.column(name)
    except CausalError:
        raise
    except Exception as error:
        raise EnvironmentFailure(f"environment failed during augmentation: {error}") from error

    if not draws:
        return cbn
    cpts = dict(cbn.cpts)
    for (name, row), values in draws.items():
        cpt = cpts[name]
        probabilities, counts, provenance = list(cpt.probabilities), list(cpt.counts), list(cpt.provenance)
        probabilities[row] = float(values.mean())
        counts[row] = len(values)
        provenance[row] = RowProvenance.INTERVENTION_AUGMENTED
        cpts[name] = Cpt(cpt.owner, cpt.parents, tuple(probabilities), tuple(counts), tuple(provenance))
        logger.debug("%s row %d re-estimated from %d do-records", name, row, len(values))
    return CausalBayesianNetwork(cbn.structure, cpts)


def from_scm(scm: Scm) -> CausalBayesianNetwork:
    """Network with the exact mechanisms of `scm`, rows reordered to index order."""
    structure = scm.diagram
    cpts = {}
    for variable in structure.variables:
        parents = structure.parents(variable.name)
        mechanism = scm.mechanisms[variable.name]
        rows = []
        for row in range(2 ** len(parents)):
            values = dict(zip(parents, row_bits(row, len(parents))))
            rows.append(mechanism.probabilities[row_index([values[p] for p in mechanism.parents])])
        cpts[variable.name] = Cpt(variable.id, tuple(structure.variable(p).id for p in parents), rows)
    return CausalBayesianNetwork(structure, cpts)


def to_scm(cbn: CausalBayesianNetwork) -> Scm:
    require_valid(cbn)
    return Scm(cbn.structure, {
        name: Mechanism(cpt.parent_names, cpt.probabilities) for name, cpt in cbn.cpts.items()
    })
