"""Causal structure learning from interventions and observations.

Starting from the fully connected graph, arrows are removed by tests of
increasing conditioning order. An arrow out of a doable variable is tested by
intervening on it while locking subsets of its neighbours; an arrow out of a
non-doable variable can only be tested for conditional independence on the
observational records. Survivors of the second kind are candidates that
``resolve_to_dag`` orients, flags, or drops.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from models import Arrow, CausalDiagram, Intervention, PolicyError, StructuralError, Variable, make_variables
from simulator import (
    Dataset, EnvironmentHandle, ScenarioConfig, SimulatedEnvironment, build_scenario, derive_seed,
)
from stats import DEFAULT_ALPHA, TestOutcome, cond_independent, critical_value, distributions_differ

logger = logging.getLogger(__name__)

OBSERVATION_STREAM = 1 << 20


class EdgeKind(str, Enum):
    DO_CONFIRMED = "do-confirmed"
    ND_CANDIDATE = "nd-candidate"
    FLAGGED = "flagged"


@dataclass(frozen=True)
class EdgeEvidence:
    kind: EdgeKind
    best_statistic: float = 0.0
    removal_witness: Mapping[str, bool] | None = None
    removed_given: tuple[str, ...] = ()
    removed_by: str | None = None
    undirected: bool = False


@dataclass(frozen=True)
class DiscoveryConfig:
    alpha: float = DEFAULT_ALPHA
    interventions_per_assignment: int = 20
    max_interventions_per_assignment: int = 320
    observational_samples: int = 500
    max_conditioning_order: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.interventions_per_assignment <= 0 or self.observational_samples <= 0:
            raise ValueError("sample counts must be positive")
        if self.max_interventions_per_assignment < self.interventions_per_assignment:
            raise ValueError("escalation ceiling is below the base sample count")
        if self.max_conditioning_order < 0 or self.seed < 0:
            raise ValueError("conditioning order and seed must be non-negative")

    @classmethod
    def from_settings(cls, settings: Mapping[str, object], **overrides) -> DiscoveryConfig:
        values = dict(
            alpha=float(settings['CBN_ALPHA']),
            interventions_per_assignment=int(settings['CBN_INTERVENTIONS']),
            max_interventions_per_assignment=int(settings['CBN_MAX_INTERVENTIONS']),
            observational_samples=int(settings['CBN_OBSERVATIONS']),
            max_conditioning_order=int(settings['CBN_MAX_ORDER']),
            seed=int(settings['CBN_SEED']),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        if values['max_interventions_per_assignment'] < values['interventions_per_assignment']:
            values['max_interventions_per_assignment'] = values['interventions_per_assignment']
        return cls(**values)


@dataclass
class CandidateGraph:
    variables: tuple[Variable, ...]
    arrows: dict[Arrow, EdgeEvidence] = field(default_factory=dict)
    removed: dict[Arrow, EdgeEvidence] = field(default_factory=dict)
    observations: Dataset | None = None
    alpha: float = DEFAULT_ALPHA
    rounds: list[int] = field(default_factory=list)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in sorted(self.variables, key=lambda v: v.index))

    def index(self, name: str) -> int:
        return self.variable(name).index

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise StructuralError(f"unknown variable {name!r}")

    def neighbors(self, name: str) -> list[str]:
        """Variables joined to `name` by a surviving arrow in either direction."""
        joined = {b for a, b in self.arrows if a == name} | {a for a, b in self.arrows if b == name}
        return sorted(joined, key=self.index)

    def remove(self, arrow: Arrow, evidence: EdgeEvidence) -> None:
        self.removed[arrow] = evidence
        del self.arrows[arrow]


@dataclass(frozen=True)
class LearnedGraph:
    diagram: CausalDiagram
    evidence: Mapping[Arrow, EdgeEvidence]

    def flagged(self) -> set[Arrow]:
        return {a for a, e in self.evidence.items() if e.kind is EdgeKind.FLAGGED}


@dataclass(frozen=True)
class InfluenceSummary:
    source: str
    target: str
    outcomes: tuple[tuple[Mapping[str, bool], TestOutcome], ...]

    @property
    def no_influence_witness(self) -> Mapping[str, bool] | None:
        """First lock assignment under which the source showed no influence."""
        for assignment, outcome in self.outcomes:
            if outcome.conclusive_independence:
                return assignment
        return None

    @property
    def all_inconclusive(self) -> bool:
        return all(outcome.inconclusive for _, outcome in self.outcomes)

    @property
    def score(self) -> float:
        conclusive = [o.statistic for _, o in self.outcomes if not o.inconclusive]
        return min(conclusive) if conclusive else 0.0


@dataclass(frozen=True)
class EdgeDiff:
    correct: frozenset[Arrow]
    missed: frozenset[Arrow]
    added: frozenset[Arrow]
    flagged_spurious: frozenset[Arrow]
    bidirectional: frozenset[Arrow]

    @property
    def precision(self) -> float:
        found = len(self.correct) + len(self.added)
        return len(self.correct) / found if found else 1.0

    @property
    def recall(self) -> float:
        expected = len(self.correct) + len(self.missed)
        return len(self.correct) / expected if expected else 1.0


def influence_test(env: EnvironmentHandle, a: str, b: str, lock: Iterable[str],
                   config: DiscoveryConfig) -> InfluenceSummary:
    """Compare b under do(a=0, lock=u) and do(a=1, lock=u) for every lock assignment u.

    An inconclusive comparison is redrawn with twice the samples per arm until
    it becomes conclusive or the escalation ceiling is reached. A target that
    still takes one and the same value in every record of both arms counts as
    a conclusive "no influence".
    """
    position = {name: i for i, name in enumerate(env.variables)}
    lock = sorted(lock, key=position.__getitem__)
    if a == b or a in lock or b in lock:
        raise ValueError("the source and target must be distinct and unlocked")
    refused = [name for name in [a, *lock] if not env.is_doable(name)]
    if refused:
        raise PolicyError(f"cannot intervene on non-doable {', '.join(refused)}")

    outcomes = []
    for values in itertools.product((False, True), repeat=len(lock)):
        assignment = dict(zip(lock, values))
        key = [position[a], position[b]]
        for name, value in assignment.items():
            key += [position[name], int(value)]

        samples, attempt = config.interventions_per_assignment, 0
        while True:
            arms = [
                env.intervene(Intervention({a: forced, **assignment}), samples,
                              derive_seed(config.seed, *key, attempt, int(forced)))
                for forced in (False, True)
            ]
            outcome = distributions_differ(arms[0], arms[1], b, config.alpha)
            if not outcome.inconclusive or samples * 2 > config.max_interventions_per_assignment:
                break
            samples, attempt = samples * 2, attempt + 1
        if outcome.inconclusive:
            outcome = _same_point_mass(arms[0], arms[1], b, config.alpha) or outcome
        outcomes.append((assignment, outcome))
    return InfluenceSummary(a, b, tuple(outcomes))


def _same_point_mass(arm_0: Dataset, arm_1: Dataset, target: str, alpha: float) -> TestOutcome | None:
    """Both arms pinned the target to one and the same value: no influence."""
    values = np.concatenate([arm_0.column(target), arm_1.column(target)])
    if values.min() != values.max():
        return None
    return TestOutcome(statistic=0.0, degrees_of_freedom=1, critical_value=critical_value(alpha),
                       reject_independence=False, inconclusive=False)


def run_discovery(env: EnvironmentHandle, variables: Sequence[str], config: DiscoveryConfig,
                  observations: Dataset | None = None) -> CandidateGraph:
    if not variables:
        raise ValueError("at least one variable is required")
    unknown = set(variables) - set(env.variables)
    if unknown:
        raise StructuralError(f"environment has no variables {sorted(unknown)}")

    position = {name: i for i, name in enumerate(env.variables)}
    order = sorted(set(variables), key=position.__getitem__)
    doable = {name: env.is_doable(name) for name in order}
    if observations is None:
        observations = env.observe(config.observational_samples,
                                   derive_seed(config.seed, OBSERVATION_STREAM))

    graph = CandidateGraph(
        variables=tuple(Variable(v.id, doable[v.name])
                        for v in make_variables(env.variables) if v.name in doable),
        observations=observations,
        alpha=config.alpha,
    )
    scores: dict[Arrow, float] = {}
    for a, b in itertools.permutations(order, 2):
        graph.arrows[(a, b)] = EdgeEvidence(EdgeKind.DO_CONFIRMED if doable[a] else EdgeKind.ND_CANDIDATE)

    k = 0
    while k <= config.max_conditioning_order and any(len(graph.neighbors(x)) > k for x in order):
        for a in order:
            for b in graph.neighbors(a):
                if (a, b) not in graph.arrows:
                    continue
                others = [n for n in graph.neighbors(a) if n != b]
                for subset in itertools.combinations(others, k):
                    _test_arrow(env, graph, scores, a, b, subset, doable, config)
                    if (a, b) not in graph.arrows:
                        break
        graph.rounds.append(len(graph.arrows))
        logger.info("conditioning order %d done, %d arrows left", k, len(graph.arrows))
        k += 1

    for arrow, evidence in graph.arrows.items():
        graph.arrows[arrow] = replace(evidence, best_statistic=scores.get(arrow, 0.0))
    return graph


def _test_arrow(env, graph: CandidateGraph, scores: dict[Arrow, float], a: str, b: str,
                subset: tuple[str, ...], doable: Mapping[str, bool], config: DiscoveryConfig) -> None:
    if doable[a] and all(doable[s] for s in subset):
        summary = influence_test(env, a, b, subset, config)
        witness = summary.no_influence_witness
        if witness is not None:
            logger.debug("do(%s) has no influence on %s given do(%s)", a, b, dict(witness))
            graph.remove((a, b), replace(graph.arrows[(a, b)], removal_witness=dict(witness),
                                         removed_given=subset, removed_by="do"))
            return
        if summary.all_inconclusive:
            logger.info("keeping %s -> %s: inconclusive under lock %s", a, b, subset)
            return
        scores[(a, b)] = max(scores.get((a, b), 0.0), summary.score)
        return

    # non-doable source, or a lock that cannot be forced: observational test
    outcome = cond_independent(graph.observations, a, b, subset, config.alpha)
    if outcome.conclusive_independence:
        logger.debug("%s independent of %s given %s", a, b, subset)
        graph.remove((a, b), replace(graph.arrows[(a, b)], removal_witness={},
                                     removed_given=subset, removed_by="independence"))
        return
    if outcome.inconclusive:
        logger.info("keeping %s -> %s: independence test inconclusive given %s", a, b, subset)
        return
    if not doable[a]:
        scores[(a, b)] = max(scores.get((a, b), 0.0), outcome.statistic)


def resolve_to_dag(candidate: CandidateGraph) -> LearnedGraph:
    """Turn the candidate graph into a DAG.

    Non-doable pairs explained by an established common cause are dropped. A
    non-doable arrow facing a do-confirmed reverse is dropped; a pair of
    non-doable arrows becomes one flagged undirected arrow oriented from the
    lower index; every other non-doable survivor is flagged. Arrows are then
    inserted do-confirmed first, strongest first, skipping any that would
    close a cycle.
    """
    index = candidate.index
    arrows = dict(candidate.arrows)

    def is_do(arrow):
        return arrow in arrows and arrows[arrow].kind is EdgeKind.DO_CONFIRMED

    if candidate.observations is not None:
        for a, b in sorted(arrows, key=lambda ab: (index(ab[0]), index(ab[1]))):
            if (a, b) not in arrows or is_do((a, b)) or is_do((b, a)):
                continue
            for c in candidate.names:
                if c in (a, b) or not (is_do((c, a)) and is_do((c, b))):
                    continue
                if cond_independent(candidate.observations, a, b, (c,), candidate.alpha).conclusive_independence:
                    logger.debug("dropping %s - %s: explained by common cause %s", a, b, c)
                    arrows.pop((a, b), None)
                    arrows.pop((b, a), None)
                    break

    # (priority, orientations, evidence)
    choices: list[tuple[tuple, list[Arrow], EdgeEvidence]] = []
    seen = set()
    for a, b in sorted(arrows, key=lambda ab: (index(ab[0]), index(ab[1]))):
        if (a, b) in seen:
            continue
        evidence = arrows[(a, b)]
        reverse = arrows.get((b, a))
        seen.update({(a, b), (b, a)})
        if evidence.kind is EdgeKind.DO_CONFIRMED:
            if reverse is not None and reverse.kind is EdgeKind.DO_CONFIRMED:
                choices.append((_priority(0, reverse, b, a, index), [(b, a)], reverse))
            choices.append((_priority(0, evidence, a, b, index), [(a, b)], evidence))
        elif reverse is not None and reverse.kind is EdgeKind.DO_CONFIRMED:
            choices.append((_priority(0, reverse, b, a, index), [(b, a)], reverse))
        elif reverse is not None:
            statistic = max(evidence.best_statistic, reverse.best_statistic)
            merged = EdgeEvidence(EdgeKind.FLAGGED, statistic, undirected=True)
            choices.append((_priority(1, merged, a, b, index), [(a, b), (b, a)], merged))
        else:
            flagged = replace(evidence, kind=EdgeKind.FLAGGED)
            choices.append((_priority(1, flagged, a, b, index), [(a, b)], flagged))

    dag = nx.DiGraph()
    dag.add_nodes_from(candidate.names)
    kept: dict[Arrow, EdgeEvidence] = {}
    for _, orientations, evidence in sorted(choices, key=lambda choice: choice[0]):
        for a, b in orientations:
            if not nx.has_path(dag, b, a):
                dag.add_edge(a, b)
                kept[(a, b)] = evidence
                break
        else:
            logger.debug("dropping %s: would close a cycle", orientations[0])

    diagram = CausalDiagram(tuple(sorted(candidate.variables, key=lambda v: v.index)), frozenset(kept))
    return LearnedGraph(diagram, kept)


def _priority(group: int, evidence: EdgeEvidence, a: str, b: str, index) -> tuple:
    return group, -evidence.best_statistic, index(a), index(b)


def diff_graphs(learned: LearnedGraph | CausalDiagram, truth: CausalDiagram) -> EdgeDiff:
    if isinstance(learned, CausalDiagram):
        learned = LearnedGraph(learned, {a: EdgeEvidence(EdgeKind.DO_CONFIRMED) for a in learned.arrows})
    if set(learned.diagram.names) != set(truth.names):
        raise StructuralError("learned and true graphs cover different variables")

    found = set(learned.diagram.arrows)
    true = set(truth.arrows)
    undirected = {a for a in found if learned.evidence.get(a, EdgeEvidence(EdgeKind.DO_CONFIRMED)).undirected}
    bidirectional = undirected | {(b, a) for a, b in undirected if (b, a) in true}
    directed = found - undirected
    added = directed - true
    return EdgeDiff(
        correct=frozenset(directed & true),
        missed=frozenset(true - found - bidirectional),
        added=frozenset(added),
        flagged_spurious=frozenset(a for a in added if learned.evidence[a].kind is EdgeKind.FLAGGED),
        bidirectional=frozenset(bidirectional),
    )


def learn_structure(env: EnvironmentHandle, config: DiscoveryConfig,
                    observations: Dataset | None = None) -> tuple[CandidateGraph, LearnedGraph]:
    candidate = run_discovery(env, env.variables, config, observations)
    return candidate, resolve_to_dag(candidate)


def sweep_nd_configurations(scenario: ScenarioConfig, nd_sets: Iterable[Iterable[str]],
                            config: DiscoveryConfig) -> list[tuple[frozenset[str], EdgeDiff]]:
    """Learn the same room under several choices of non-doable variables."""
    results = []
    for nd_set in nd_sets:
        nd_set = frozenset(nd_set)
        scm = build_scenario(replace(scenario, nd_set=scenario.nd_set | nd_set))
        _, learned = learn_structure(SimulatedEnvironment(scm), config)
        diff = diff_graphs(learned, scm.diagram)
        logger.info("nd=%s precision=%.3f recall=%.3f", sorted(nd_set), diff.precision, diff.recall)
        results.append((nd_set, diff))
    return results
