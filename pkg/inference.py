"""Posterior beliefs on a causal Bayesian network.

``enumerate_posterior`` sums the joint distribution and serves as the exact
reference. ``propagate`` runs λ/π message passing, which is exact on
polytrees and refused elsewhere.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import networkx as nx
import numpy as np

from cbn import CausalBayesianNetwork, require_valid
from models import (
    Arrow, CapacityError, CausalDiagram, StructuralError, StructureNotPolytree, ZeroProbabilityEvidence,
)

logger = logging.getLogger(__name__)

MAX_ENUMERATION_VARIABLES = 25
CONVERGENCE_TOLERANCE = 1e-12
ENUMERATION_CHUNK = 1 << 16

Evidence = Mapping[str, bool]
BeliefMap = dict[str, tuple[float, float]]


@dataclass
class MessageStore:
    """π messages parent -> child and λ messages child -> parent, keyed by the (parent, child) arrow."""
    pi: dict[Arrow, np.ndarray] = field(default_factory=dict)
    lam: dict[Arrow, np.ndarray] = field(default_factory=dict)
    sweeps: int = 0


def _check_evidence(cbn: CausalBayesianNetwork, evidence: Evidence) -> dict[str, bool]:
    unknown = set(evidence) - set(cbn.names)
    if unknown:
        raise StructuralError(f"evidence on unknown variables {sorted(unknown)}")
    return {name: bool(value) for name, value in evidence.items()}


def is_polytree(structure: CausalDiagram) -> bool:
    if not structure.variables:
        return True
    return nx.is_forest(structure.to_networkx().to_undirected())


def enumerate_posterior(cbn: CausalBayesianNetwork, evidence: Evidence | None = None) -> BeliefMap:
    require_valid(cbn)
    evidence = _check_evidence(cbn, evidence or {})
    names = cbn.names
    if len(names) > MAX_ENUMERATION_VARIABLES:
        raise CapacityError(f"{len(names)} variables exceed the enumeration limit "
                            f"of {MAX_ENUMERATION_VARIABLES}")

    column = {name: i for i, name in enumerate(names)}
    free = [name for name in names if name not in evidence]
    total = 0.0
    ones = np.zeros(len(names))
    for start in range(0, 2 ** len(free), ENUMERATION_CHUNK):
        index = np.arange(start, min(start + ENUMERATION_CHUNK, 2 ** len(free)), dtype=np.int64)
        states = np.zeros((len(index), len(names)), dtype=np.int64)
        for position, name in enumerate(free):
            states[:, column[name]] = (index >> (len(free) - 1 - position)) & 1
        for name, value in evidence.items():
            states[:, column[name]] = int(value)

        weight = np.ones(len(index))
        for name in names:
            cpt = cbn.cpts[name]
            row = np.zeros(len(index), dtype=np.int64)
            for parent in cpt.parent_names:
                row = (row << 1) | states[:, column[parent]]
            p_one = np.asarray(cpt.probabilities)[row]
            weight *= np.where(states[:, column[name]] == 1, p_one, 1.0 - p_one)
        total += weight.sum()
        ones += weight @ states

    if total <= 0.0:
        raise ZeroProbabilityEvidence(f"evidence {evidence} has probability zero")
    beliefs = {}
    for name in names:
        p = float(np.clip(ones[column[name]] / total, 0.0, 1.0))
        beliefs[name] = (1.0 - p, p)
    return beliefs


def _normalized(vector: np.ndarray, what: str) -> np.ndarray:
    total = vector.sum()
    if total <= 0.0:
        raise ZeroProbabilityEvidence(f"{what} vanished: the evidence has probability zero")
    return vector / total


class _Family:
    """A node, its CPT as a (rows, 2) table and the bit matrix of its parent rows."""

    def __init__(self, cbn: CausalBayesianNetwork, name: str):
        cpt = cbn.cpts[name]
        self.name = name
        self.parents = cpt.parent_names
        self.children = cbn.structure.children(name)
        self.table = cpt.table()
        width = len(self.parents)
        rows = np.arange(2 ** width)
        self.bits = np.stack([(rows >> (width - 1 - j)) & 1 for j in range(width)], axis=1) \
            if width else np.zeros((1, 0), dtype=np.int64)

    def parent_weights(self, messages: MessageStore, skip: int | None = None) -> np.ndarray:
        weight = np.ones(len(self.table))
        for j, parent in enumerate(self.parents):
            if j != skip:
                weight *= messages.pi[(parent, self.name)][self.bits[:, j]]
        return weight


def propagate(cbn: CausalBayesianNetwork, evidence: Evidence | None = None) -> tuple[BeliefMap, MessageStore]:
    """Synchronous λ/π sweeps until no message moves by more than 1e-12.

    Bel(X) = α λ(X) π(X). Evidence enters as a point-mass indicator on λ(X).
    """
    require_valid(cbn)
    evidence = _check_evidence(cbn, evidence or {})
    if not is_polytree(cbn.structure):
        raise StructureNotPolytree("structure has an undirected cycle; use enumerate_posterior")

    families = {name: _Family(cbn, name) for name in cbn.names}
    indicator = {name: np.ones(2) for name in cbn.names}
    for name, value in evidence.items():
        indicator[name] = np.array([0.0, 1.0]) if value else np.array([1.0, 0.0])

    messages = MessageStore()
    for arrow in cbn.structure.sorted_arrows():
        messages.pi[arrow] = np.full(2, 0.5)
        messages.lam[arrow] = np.full(2, 0.5)

    def lam_of(family: _Family, skip: str | None = None) -> np.ndarray:
        value = indicator[family.name].copy()
        for child in family.children:
            if child != skip:
                value *= messages.lam[(family.name, child)]
        return value

    def pi_of(family: _Family) -> np.ndarray:
        return family.parent_weights(messages) @ family.table

    limit = 2 * len(cbn.names) + 2
    while True:
        pi, lam = {}, {}
        for family in families.values():
            prior = pi_of(family)
            for child in family.children:
                pi[(family.name, child)] = _normalized(prior * lam_of(family, skip=child),
                                                       f"π message {family.name}->{child}")
            if family.parents:
                likelihood = family.table @ lam_of(family)
                for j, parent in enumerate(family.parents):
                    weighted = family.parent_weights(messages, skip=j) * likelihood
                    message = np.array([weighted[family.bits[:, j] == v].sum() for v in (0, 1)])
                    lam[(parent, family.name)] = _normalized(message, f"λ message {family.name}->{parent}")

        delta = max((np.abs(pi[a] - messages.pi[a]).max() for a in pi), default=0.0)
        delta = max([delta, *(np.abs(lam[a] - messages.lam[a]).max() for a in lam)])
        messages.pi.update(pi)
        messages.lam.update(lam)
        messages.sweeps += 1
        if delta < CONVERGENCE_TOLERANCE:
            break
        if messages.sweeps >= limit:
            logger.warning("messages still moving by %.3g after %d sweeps", delta, messages.sweeps)
            break

    beliefs = {}
    for name, family in families.items():
        belief = _normalized(lam_of(family) * pi_of(family), f"belief of {name}")
        beliefs[name] = (float(belief[0]), float(belief[1]))
    return beliefs, messages


def query(cbn: CausalBayesianNetwork, evidence: Evidence | None = None, method: str = "bp") -> BeliefMap:
    if method == "enum":
        return enumerate_posterior(cbn, evidence)
    if method != "bp":
        raise ValueError(f"unknown inference method {method!r}")
    if not is_polytree(cbn.structure):
        logger.info("structure is not a polytree, answering by enumeration")
        return enumerate_posterior(cbn, evidence)
    beliefs, _ = propagate(cbn, evidence)
    return beliefs
