import itertools
from pathlib import Path

import numpy as np
import pytest

from models import CausalDiagram, Mechanism, Scm, make_variables
from simulator import ROOM_VARIABLES, Dataset, build_scenario, living_room_config

SCENARIOS = Path(__file__).resolve().parent.parent / 'scenarios'

LIVING_ROOM_ARROWS = frozenset({
    ('P', 'Pr'), ('Pr', 'L'), ('L', 'Pow'), ('H', 'Pow'), ('H', 'T'), ('W', 'T'), ('O', 'T'),
})


@pytest.fixture
def scenario_dir():
    return SCENARIOS


@pytest.fixture
def living_room():
    return build_scenario(living_room_config())


@pytest.fixture
def room_variables():
    return make_variables(ROOM_VARIABLES)


def chain_scm(p_root=0.5, p_given_1=0.9, p_given_0=0.1):
    """A -> B."""
    diagram = CausalDiagram(make_variables(['A', 'B']), frozenset({('A', 'B')}))
    return Scm(diagram, {
        'A': Mechanism((), (p_root,)),
        'B': Mechanism(('A',), (p_given_0, p_given_1)),
    })


def random_polytree_scm(rng: np.random.Generator, n: int) -> Scm:
    """Random orientation of a random tree, with random CPTs."""
    names = [f'X{i}' for i in range(n)]
    arrows = set()
    for child in range(1, n):
        other = int(rng.integers(child))
        pair = (names[other], names[child])
        arrows.add(pair if rng.random() < 0.5 else pair[::-1])
    diagram = CausalDiagram(make_variables(names), frozenset(arrows))
    mechanisms = {}
    for name in names:
        parents = diagram.parents(name)
        mechanisms[name] = Mechanism(parents, tuple(rng.uniform(0.05, 0.95, 2 ** len(parents))))
    return Scm(diagram, mechanisms)


def balanced_dataset(names, varying, repeat=10) -> Dataset:
    """Every combination of `varying` repeated, all other variables 0."""
    rows = []
    for values in itertools.product((0, 1), repeat=len(varying)):
        row = dict.fromkeys(names, 0)
        row.update(zip(varying, values))
        rows.extend([[row[n] for n in names]] * repeat)
    return Dataset(names, np.array(rows, dtype=np.uint8))
