"""Whole-pipeline checks on the simulated rooms, over fixed seeds."""
import time

import pytest

from cbn import fit_mle
from conftest import LIVING_ROOM_ARROWS
from discovery import DiscoveryConfig, learn_structure
from inference import enumerate_posterior, propagate
from simulator import (
    WEAK_LIGHT_POWER_EFFECT, RecordingEnvironment, SimulatedEnvironment, build_scenario, living_room_config,
    sample_dataset,
)

pytestmark = pytest.mark.slow

SEEDS = range(10)
SENSOR_ND = {'Pr', 'Pow', 'T'}
DO_CONFIRMABLE = {('P', 'Pr'), ('H', 'Pow'), ('O', 'T'), ('H', 'T'), ('W', 'T')}


def learn_rooms(config, environments):
    """Learn each seed's room; every run shares one access log."""
    scm = build_scenario(config)
    env = RecordingEnvironment(SimulatedEnvironment(scm))
    graphs = []
    for seed in SEEDS:
        started = time.perf_counter()
        _, learned = learn_structure(env, DiscoveryConfig(seed=seed))
        assert time.perf_counter() - started < 30
        graphs.append(learned)
    environments.append(env)
    return graphs


@pytest.fixture(scope='module')
def environments():
    return []


def test_all_doable_room_is_recovered(environments):
    graphs = learn_rooms(living_room_config(), environments)
    exact = sum(graph.diagram.arrows == LIVING_ROOM_ARROWS for graph in graphs)
    assert exact >= 8


def test_non_doable_sensors(environments):
    graphs = learn_rooms(living_room_config(nd_set=SENSOR_ND), environments)
    assert sum(DO_CONFIRMABLE <= graph.diagram.arrows for graph in graphs) >= 8
    assert sum(('Pr', 'L') in graph.diagram.arrows for graph in graphs) >= 8


def test_weak_lamp_is_missed(environments):
    config = living_room_config(effect_strengths={'light_power_effect': WEAK_LIGHT_POWER_EFFECT})
    graphs = learn_rooms(config, environments)
    assert sum(('L', 'Pow') not in graph.diagram.arrows for graph in graphs) >= 7


def test_bathroom_lamp_heats_the_thermometer(environments):
    graphs = learn_rooms(living_room_config(nd_set=SENSOR_ND, proximity_edge=True), environments)
    assert sum(('L', 'T') in graph.diagram.arrows for graph in graphs) >= 8


def test_no_intervention_touched_a_non_doable_variable(environments):
    for env in environments:
        assert env.non_doable_interventions == []


def test_fitted_room_diagnoses_the_presence():
    scm = build_scenario(living_room_config())
    network = fit_mle(scm.diagram, sample_dataset(scm, 2000, 17))
    prior = enumerate_posterior(network)
    beliefs, _ = propagate(network, {'L': False})
    assert beliefs['P'][0] > prior['P'][0]
    assert beliefs['W'] == pytest.approx(prior['W'], abs=1e-9)
    oracle = enumerate_posterior(network, {'L': False})
    assert beliefs.keys() == oracle.keys()
    for name in oracle:
        assert beliefs[name] == pytest.approx(oracle[name], abs=1e-9), name
