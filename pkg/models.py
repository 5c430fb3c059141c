from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx


class CausalError(Exception):
    """Base class for every error raised by the toolkit."""


class StructuralError(CausalError):
    pass


class ConfigError(CausalError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DataFormatError(ConfigError):
    pass


class PolicyError(CausalError):
    pass


class EnvironmentFailure(CausalError):
    pass


class ZeroProbabilityEvidence(CausalError):
    pass


class CapacityError(CausalError):
    pass


class StructureNotPolytree(CausalError):
    pass


class VariableId(NamedTuple):
    index: int
    name: str


@dataclass(frozen=True)
class Variable:
    id: VariableId
    doable: bool = True

    @property
    def name(self) -> str:
        return self.id.name

    @property
    def index(self) -> int:
        return self.id.index


Arrow = tuple[str, str]


def make_variables(names: Sequence[str], nd: Iterable[str] = ()) -> tuple[Variable, ...]:
    """Build variables indexed by position; names listed in `nd` are non-doable."""
    nd = set(nd)
    unknown = nd - set(names)
    if unknown:
        raise StructuralError(f"unknown non-doable variables: {sorted(unknown)}")
    return tuple(Variable(VariableId(i, name), name not in nd) for i, name in enumerate(names))


@dataclass(frozen=True)
class CausalDiagram:
    variables: tuple[Variable, ...]
    arrows: frozenset[Arrow] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(self, 'arrows', frozenset(tuple(a) for a in self.arrows))
        names = [v.name for v in self.variables]
        if any(not name for name in names):
            raise StructuralError("variable names must be nonempty")
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in {names}")
        if len({v.index for v in self.variables}) != len(names):
            raise StructuralError("duplicate variable indices")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise StructuralError(f"unknown variable {name!r}")

    def index(self, name: str) -> int:
        return self.variable(name).index

    def has(self, name: str) -> bool:
        return any(v.name == name for v in self.variables)

    def parents(self, name: str) -> tuple[str, ...]:
        return tuple(sorted((a for a, b in self.arrows if b == name), key=self.index))

    def children(self, name: str) -> tuple[str, ...]:
        return tuple(sorted((b for a, b in self.arrows if a == name), key=self.index))

    def sorted_arrows(self) -> list[Arrow]:
        return sorted(self.arrows, key=lambda ab: (self.index(ab[0]), self.index(ab[1])))

    def with_arrows(self, arrows: Iterable[Arrow]) -> CausalDiagram:
        return CausalDiagram(self.variables, frozenset(arrows))

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for v in sorted(self.variables, key=lambda v: v.index):
            graph.add_node(v.name, index=v.index, doable=v.doable)
        graph.add_edges_from(self.sorted_arrows())
        return graph


@dataclass(frozen=True)
class Intervention:
    """do(assignments): every listed variable is forced to its value."""
    assignments: Mapping[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'assignments',
                           {name: bool(value) for name, value in dict(self.assignments).items()})

    def __bool__(self):
        return bool(self.assignments)

    def __hash__(self):
        return hash(tuple(sorted(self.assignments.items())))

    def label(self) -> str:
        """`do(A=1;B=0)` form used by the dataset file."""
        body = ";".join(f"{name}={int(value)}" for name, value in self.assignments.items())
        return f"do({body})"


@dataclass(frozen=True)
class Mechanism:
    """CPT rows of one variable: P(var=1 | parents) indexed by the parent bit pattern."""
    parents: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'parents', tuple(self.parents))
        object.__setattr__(self, 'probabilities', tuple(float(p) for p in self.probabilities))


def row_index(bits: Sequence[bool | int]) -> int:
    """First parent is the most significant bit."""
    index = 0
    for bit in bits:
        index = (index << 1) | int(bool(bit))
    return index


def row_bits(index: int, width: int) -> tuple[int, ...]:
    return tuple((index >> (width - 1 - i)) & 1 for i in range(width))


@dataclass(frozen=True)
class Scm:
    diagram: CausalDiagram
    mechanisms: Mapping[str, Mechanism]

    def __post_init__(self):
        object.__setattr__(self, 'mechanisms', dict(self.mechanisms))
        _check_endpoints(self.diagram)
        acyclic, witness = check_acyclic(self.diagram)
        if not acyclic:
            raise StructuralError(f"cycle {' -> '.join(witness)}")
        for name in self.diagram.names:
            mechanism = self.mechanisms.get(name)
            if mechanism is None:
                raise ConfigError(f"no mechanism for {name}")
            if set(mechanism.parents) != set(self.diagram.parents(name)) \
                    or len(mechanism.parents) != len(set(mechanism.parents)):
                raise ConfigError(f"mechanism parents of {name} disagree with the diagram")
            if len(mechanism.probabilities) != 2 ** len(mechanism.parents):
                raise ConfigError(f"{name} needs {2 ** len(mechanism.parents)} CPT rows, "
                                  f"got {len(mechanism.probabilities)}")
            if any(not 0.0 <= p <= 1.0 for p in mechanism.probabilities):
                raise ConfigError(f"{name} has a probability outside [0, 1]")
        extra = set(self.mechanisms) - set(self.diagram.names)
        if extra:
            raise ConfigError(f"mechanisms for undeclared variables {sorted(extra)}")

    def probability(self, name: str, state: Mapping[str, bool]) -> float:
        """P(name=1 | parent values taken from state)."""
        mechanism = self.mechanisms[name]
        return mechanism.probabilities[row_index([state[p] for p in mechanism.parents])]


@dataclass(frozen=True)
class WorldState:
    values: Mapping[str, bool]

    def __getitem__(self, name: str) -> bool:
        return self.values[name]


def _check_endpoints(diagram: CausalDiagram) -> None:
    names = set(diagram.names)
    for a, b in diagram.arrows:
        if a not in names or b not in names:
            raise StructuralError(f"arrow {a} -> {b} references an undeclared variable")


def check_acyclic(diagram: CausalDiagram) -> tuple[bool, list[str] | None]:
    """Return (True, None) for a DAG, else (False, witness) with the witness closing on itself."""
    _check_endpoints(diagram)
    try:
        cycle = nx.find_cycle(diagram.to_networkx())
    except nx.NetworkXNoCycle:
        return True, None
    witness = [a for a, _ in cycle]
    witness.append(cycle[0][0])
    return False, witness


def topological_order(diagram: CausalDiagram) -> list[str]:
    """Deterministic order; ties broken by ascending variable index."""
    _check_endpoints(diagram)
    graph = diagram.to_networkx()
    try:
        return list(nx.lexicographical_topological_sort(graph, key=lambda n: graph.nodes[n]['index']))
    except nx.NetworkXUnfeasible as error:
        raise StructuralError("diagram contains a cycle") from error


def mutilate(scm: Scm, intervention: Intervention) -> Scm:
    """Cut every arrow into an assigned variable and pin it to its value."""
    for name in intervention.assignments:
        if not scm.diagram.has(name):
            raise StructuralError(f"cannot intervene on unknown variable {name!r}")
    if not intervention:
        return scm

    assigned = intervention.assignments
    arrows = frozenset((a, b) for a, b in scm.diagram.arrows if b not in assigned)
    mechanisms = dict(scm.mechanisms)
    for name, value in assigned.items():
        mechanisms[name] = Mechanism((), (1.0 if value else 0.0,))
    return Scm(scm.diagram.with_arrows(arrows), mechanisms)
