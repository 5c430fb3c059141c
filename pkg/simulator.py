"""Simulated smart-home rooms.

Each room is a ground-truth Scm over Boolean measures. Observations are
ancestral samples; interventions sample the mutilated model, which is the
equilibrium a disabled device settles into.

Seeds are unsigned 64-bit integers fed to ``numpy.random.default_rng``
(PCG64). A dataset of ``n`` records draws one ``(n, variables)`` block of
uniforms up front, column ``j`` belonging to the variable with index ``j``,
so the stream does not depend on evaluation order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Protocol, Sequence

import numpy as np

from models import (
    CausalDiagram, ConfigError, Intervention, Mechanism, PolicyError, Scm,
    StructuralError, WorldState, make_variables, mutilate, topological_order,
)

logger = logging.getLogger(__name__)

ROOM_VARIABLES = ("P", "Pr", "L", "Pow", "H", "W", "O", "T")

DEFAULT_EFFECTS = {
    "leak": 0.03,
    "presence_prior": 0.2,
    "heater_prior": 0.15,
    "window_prior": 0.15,
    "outdoor_prior": 0.15,
    "presence_sensor_effect": 0.97,
    "presence_light_effect": 0.97,
    "light_power_effect": 0.97,
    "heater_power_effect": 0.97,
    "heater_heat_effect": 0.97,
    "window_heat_effect": 0.97,
    "outdoor_heat_effect": 0.97,
    "light_heat_effect": 0.97,
}

WEAK_LIGHT_POWER_EFFECT = 0.05


@dataclass(frozen=True)
class ScenarioConfig:
    """A room description.

    With no ``variables`` the living-room template is expanded from
    ``effect_strengths`` and ``proximity_edge``; otherwise the explicit
    variables, parents and CPT rows are used as given. ``nd_set`` marks
    variables non-doable in both cases.
    """
    variables: tuple[tuple[str, bool], ...] = ()
    parents: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    cpts: Mapping[str, tuple[float, ...]] = field(default_factory=dict)
    nd_set: frozenset[str] = frozenset()
    proximity_edge: bool = False
    effect_strengths: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'variables', tuple((n, bool(d)) for n, d in self.variables))
        object.__setattr__(self, 'parents', {k: tuple(v) for k, v in dict(self.parents).items()})
        object.__setattr__(self, 'cpts', {k: tuple(float(p) for p in v)
                                          for k, v in dict(self.cpts).items()})
        object.__setattr__(self, 'nd_set', frozenset(self.nd_set))
        object.__setattr__(self, 'effect_strengths', dict(self.effect_strengths))

    @property
    def is_template(self) -> bool:
        return not self.variables


def noisy_or(weights: Sequence[float], leak: float) -> tuple[float, ...]:
    """CPT rows of a leaky noisy-OR, one weight per parent in bit order."""
    rows = []
    for index in range(2 ** len(weights)):
        off = 1.0 - leak
        for position, weight in enumerate(weights):
            if (index >> (len(weights) - 1 - position)) & 1:
                off *= 1.0 - weight
        rows.append(1.0 - off)
    return tuple(rows)


def living_room_config(nd_set=(), proximity_edge: bool = False,
                       effect_strengths: Mapping[str, float] | None = None) -> ScenarioConfig:
    return ScenarioConfig(nd_set=frozenset(nd_set), proximity_edge=proximity_edge,
                          effect_strengths=dict(effect_strengths or {}))


def house_configs(nd_set=(), effect_strengths: Mapping[str, float] | None = None) -> dict[str, ScenarioConfig]:
    """Four identical rooms; only the bathroom has its lamp next to the thermometer."""
    return {
        room: living_room_config(nd_set, proximity_edge=(room == "bathroom"),
                                 effect_strengths=effect_strengths)
        for room in ("living_room", "kitchen", "bedroom", "bathroom")
    }


def _expand_template(config: ScenarioConfig) -> ScenarioConfig:
    unknown = set(config.effect_strengths) - set(DEFAULT_EFFECTS)
    if unknown:
        raise ConfigError(f"unknown effect strengths {sorted(unknown)}")
    e = {**DEFAULT_EFFECTS, **config.effect_strengths}
    for key, value in e.items():
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"effect strength {key}={value} outside [0, 1]")

    leak = e["leak"]
    parents = {
        "P": (), "H": (), "W": (), "O": (),
        "Pr": ("P",),
        "L": ("Pr",),
        "Pow": ("L", "H"),
        "T": ("H", "W", "O"),
    }
    cpts = {
        "P": (e["presence_prior"],),
        "H": (e["heater_prior"],),
        "W": (e["window_prior"],),
        "O": (e["outdoor_prior"],),
        "Pr": noisy_or([e["presence_sensor_effect"]], leak),
        "L": noisy_or([e["presence_light_effect"]], leak),
        "Pow": noisy_or([e["light_power_effect"], e["heater_power_effect"]], leak),
        "T": noisy_or([e["heater_heat_effect"], e["window_heat_effect"], e["outdoor_heat_effect"]], leak),
    }
    if config.proximity_edge:
        parents["T"] = ("L", "H", "W", "O")
        cpts["T"] = noisy_or([e["light_heat_effect"], e["heater_heat_effect"],
                              e["window_heat_effect"], e["outdoor_heat_effect"]], leak)
    return ScenarioConfig(
        variables=tuple((name, True) for name in ROOM_VARIABLES),
        parents=parents, cpts=cpts, nd_set=config.nd_set,
    )


def build_scenario(config: ScenarioConfig) -> Scm:
    """Ground-truth Scm; doable flags are carried by ``scm.diagram.variables``."""
    if config.is_template:
        config = _expand_template(config)
    elif config.proximity_edge:
        raise ConfigError("proximity_edge only applies to the room template")

    names = [name for name, _ in config.variables]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate variables in {names}")
    unknown = config.nd_set - set(names)
    if unknown:
        raise ConfigError(f"nd_set names unknown variables {sorted(unknown)}")
    nd = {name for name, doable in config.variables if not doable} | config.nd_set
    variables = make_variables(names, nd)

    arrows = set()
    for child, parent_names in config.parents.items():
        if child not in names:
            raise ConfigError(f"parents declared for unknown variable {child}")
        for parent in parent_names:
            if parent not in names:
                raise ConfigError(f"unknown parent {parent} of {child}")
            if parent == child:
                raise ConfigError(f"{child} cannot be its own parent")
            arrows.add((parent, child))

    mechanisms = {}
    for name in names:
        parent_names = tuple(config.parents.get(name, ()))
        rows = config.cpts.get(name)
        if rows is None:
            raise ConfigError(f"missing CPT for {name}")
        if len(rows) != 2 ** len(parent_names):
            raise ConfigError(f"{name} needs {2 ** len(parent_names)} CPT rows, got {len(rows)}")
        mechanisms[name] = Mechanism(parent_names, rows)

    try:
        return Scm(CausalDiagram(variables, frozenset(arrows)), mechanisms)
    except StructuralError as error:
        raise ConfigError(str(error)) from error


def scenario_from_scm(scm: Scm) -> ScenarioConfig:
    """Explicit config describing an existing Scm (used to serialize fitted networks)."""
    return ScenarioConfig(
        variables=tuple((v.name, v.doable) for v in scm.diagram.variables),
        parents={name: scm.mechanisms[name].parents for name in scm.diagram.names},
        cpts={name: scm.mechanisms[name].probabilities for name in scm.diagram.names},
    )


class Dataset:
    """Boolean records with their regime (None for observational, else the intervention)."""

    def __init__(self, variables: Sequence[str], values: np.ndarray | None = None,
                 regimes: Sequence[Intervention | None] = ()):
        self.variables = tuple(variables)
        if values is None:
            values = np.zeros((0, len(self.variables)), dtype=np.uint8)
        values = np.array(values, dtype=np.uint8).reshape(-1, len(self.variables))
        if np.any(values > 1):
            raise ValueError("dataset cells must be 0 or 1")
        values.setflags(write=False)
        self.values = values
        self.regimes = tuple(regimes) if regimes else (None,) * len(values)
        if len(self.regimes) != len(self.values):
            raise ValueError("one regime per record is required")

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.variables == other.variables and self.regimes == other.regimes
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f'<Dataset {len(self)} records over {",".join(self.variables)}>'

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.variables.index(name)]
        except ValueError:
            raise StructuralError(f"dataset has no variable {name!r}") from None

    def mask(self, filter: Mapping[str, bool] | None = None) -> np.ndarray:
        selected = np.ones(len(self), dtype=bool)
        for name, value in (filter or {}).items():
            selected &= self.column(name) == int(bool(value))
        return selected

    def subset(self, selected: np.ndarray) -> Dataset:
        indices = np.flatnonzero(selected)
        return Dataset(self.variables, self.values[indices], [self.regimes[i] for i in indices])

    def observational(self) -> Dataset:
        return self.subset(np.array([r is None for r in self.regimes], dtype=bool))

    def concat(self, other: Dataset) -> Dataset:
        if other.variables != self.variables:
            raise StructuralError("cannot concatenate datasets over different variables")
        return Dataset(self.variables, np.vstack([self.values, other.values]),
                       self.regimes + other.regimes)

    def records(self) -> Iterator[tuple[Intervention | None, WorldState]]:
        for regime, row in zip(self.regimes, self.values):
            yield regime, WorldState({name: bool(v) for name, v in zip(self.variables, row)})


def derive_seed(base: int, *key: int) -> int:
    """Seed for one draw, fixed by the run seed and the identity of the draw."""
    sequence = np.random.SeedSequence(base, spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def sample_dataset(scm: Scm, n: int, seed: int) -> Dataset:
    if n < 0:
        raise ValueError("sample count must be non-negative")
    names = scm.diagram.names
    uniforms = np.random.default_rng(seed).random((n, len(names)))
    values = np.zeros((n, len(names)), dtype=np.uint8)
    column = {name: i for i, name in enumerate(names)}

    for name in topological_order(scm.diagram):
        mechanism = scm.mechanisms[name]
        rows = np.asarray(mechanism.probabilities)
        index = np.zeros(n, dtype=np.int64)
        for parent in mechanism.parents:
            index = (index << 1) | values[:, column[parent]]
        values[:, column[name]] = uniforms[:, column[name]] < rows[index]
    return Dataset(names, values)


def sample_state(scm: Scm, seed: int) -> WorldState:
    _, state = next(sample_dataset(scm, 1, seed).records())
    return state


def sample_under_do(scm: Scm, intervention: Intervention, n: int, seed: int) -> Dataset:
    sampled = sample_dataset(mutilate(scm, intervention), n, seed)
    return Dataset(sampled.variables, sampled.values, (intervention,) * n)


class EnvironmentHandle(Protocol):
    variables: tuple[str, ...]

    def is_doable(self, name: str) -> bool: ...

    def observe(self, n: int, seed: int) -> Dataset: ...

    def intervene(self, intervention: Intervention, n: int, seed: int) -> Dataset: ...


class SimulatedEnvironment:
    """Environment backed by a ground-truth Scm. It executes any intervention,
    including ones a real house would not allow."""

    def __init__(self, scm: Scm):
        self.scm = scm
        self.variables = scm.diagram.names

    def is_doable(self, name: str) -> bool:
        return self.scm.diagram.variable(name).doable

    def observe(self, n: int, seed: int) -> Dataset:
        return sample_dataset(self.scm, n, seed)

    def intervene(self, intervention: Intervention, n: int, seed: int) -> Dataset:
        return sample_under_do(self.scm, intervention, n, seed)


@dataclass(frozen=True)
class AccessRecord:
    kind: str
    assignments: tuple[tuple[str, bool], ...]
    samples: int
    granted: bool

    def __repr__(self):
        return f'<AccessRecord {self.kind} {dict(self.assignments)} - {"Granted" if self.granted else "Denied"}>'


class RecordingEnvironment:
    """Wraps an environment and keeps an access log of every call."""

    def __init__(self, inner: EnvironmentHandle, enforce_policy: bool = False):
        self.inner = inner
        self.variables = inner.variables
        self.enforce_policy = enforce_policy
        self.log: list[AccessRecord] = []

    def is_doable(self, name: str) -> bool:
        return self.inner.is_doable(name)

    def observe(self, n: int, seed: int) -> Dataset:
        self.log.append(AccessRecord("observe", (), n, True))
        return self.inner.observe(n, seed)

    def intervene(self, intervention: Intervention, n: int, seed: int) -> Dataset:
        refused = [name for name in intervention.assignments if not self.inner.is_doable(name)]
        granted = not (refused and self.enforce_policy)
        self.log.append(AccessRecord("do", tuple(intervention.assignments.items()), n, granted))
        if not granted:
            logger.warning("refused do-operation on non-doable %s", ",".join(refused))
            raise PolicyError(f"intervention on non-doable variables {refused}")
        return self.inner.intervene(intervention, n, seed)

    @property
    def non_doable_interventions(self) -> list[AccessRecord]:
        return [record for record in self.log if record.kind == "do"
                and any(not self.inner.is_doable(name) for name, _ in record.assignments)]


__all__ = [
    "ROOM_VARIABLES", "DEFAULT_EFFECTS", "WEAK_LIGHT_POWER_EFFECT",
    "ScenarioConfig", "Dataset", "EnvironmentHandle", "SimulatedEnvironment",
    "RecordingEnvironment", "AccessRecord", "noisy_or", "living_room_config", "house_configs",
    "build_scenario", "scenario_from_scm", "derive_seed", "sample_state", "sample_dataset", "sample_under_do",
]
