from pathlib import Path

import numpy as np
import pytest

from conftest import LIVING_ROOM_ARROWS
from discovery import EdgeEvidence, EdgeKind, LearnedGraph, diff_graphs
from models import CausalDiagram, ConfigError, DataFormatError, Intervention, make_variables
from simulator import (
    build_scenario, living_room_config, sample_dataset, sample_under_do, scenario_from_scm,
)
from utils.datasetFile import parse_regime, read_dataset, write_dataset
from utils.dotGraph import parse_dot, render_dot
from utils.scenarioFile import load_scenario, load_scm, parse_scenario, render_scenario

GOLDEN = Path(__file__).resolve().parent / 'golden'


def test_minimal_scenario():
    scm = build_scenario(parse_scenario("variable A doable\ncpt A : 0.5\n"))
    assert scm.diagram.names == ('A',)
    assert scm.mechanisms['A'].probabilities == (0.5,)


def test_shipped_living_room_matches_the_template(scenario_dir):
    scm = load_scm(scenario_dir / 'living_room.scenario')
    template = build_scenario(living_room_config())
    assert scm.diagram.arrows == LIVING_ROOM_ARROWS
    for name in scm.diagram.names:
        assert scm.mechanisms[name].probabilities == pytest.approx(template.mechanisms[name].probabilities)


def test_shipped_templates(scenario_dir):
    assert ('L', 'T') in load_scm(scenario_dir / 'bathroom.scenario').diagram.arrows
    weak = load_scenario(scenario_dir / 'weak_light.scenario')
    assert weak.effect_strengths == {'light_power_effect': 0.05}


def test_nd_override_on_load(scenario_dir):
    scm = load_scm(scenario_dir / 'living_room.scenario', nd_set={'T'})
    assert not scm.diagram.variable('T').doable


@pytest.mark.parametrize('text, line', [
    ("variable A doable\nvariable A nd\n", 2),
    ("variable A doable\ncpt A 1: 0.5\n", 2),
    ("variable A doable\nparents A: B\n", 2),
    ("variable A maybe\n", 1),
    ("variable A doable\nfrobnicate A\n", 2),
    ("variable A doable\ncpt A : 1.5\n", 2),
    ("variable A doable\ncpt A : 0.5\ncpt A : 0.5\n", 3),
    ("variable A doable\nvariable B doable\nparents B: A\ncpt A : 0.5\ncpt B 0: 0.5\n", 2),
    ("option colour blue\n", 1),
    ("variable A doable\n: 0.5\n", 2),
])
def test_diagnostics_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as caught:
        parse_scenario(text)
    assert caught.value.line == line


def test_comments_and_blank_lines_are_ignored():
    config = parse_scenario("# header\n\nvariable A nd  # trailing\ncpt A : 0.25\n")
    assert config.variables == (('A', False),)


def test_scenario_round_trip(living_room):
    config = scenario_from_scm(build_scenario(living_room_config(nd_set={'Pr'})))
    assert parse_scenario(render_scenario(config)) == config
    template = living_room_config(nd_set={'T', 'Pr'}, proximity_edge=True,
                                  effect_strengths={'light_power_effect': 0.05})
    assert parse_scenario(render_scenario(template, header="bathroom")) == template


def test_dataset_file_round_trip(tmp_path: Path, living_room):
    data = sample_dataset(living_room, 40, 1).concat(
        sample_under_do(living_room, Intervention({'L': True, 'H': False}), 10, 2))
    path = tmp_path / 'data.csv'
    write_dataset(data, path)
    assert path.read_text().splitlines()[0] == 'regime,P,Pr,L,Pow,H,W,O,T'
    assert 'do(L=1;H=0)' in path.read_text()
    assert read_dataset(path, living_room.diagram.names) == data


def test_dataset_columns_are_reordered(tmp_path: Path):
    path = tmp_path / 'data.csv'
    path.write_text("regime,B,A\nobs,1,0\n")
    data = read_dataset(path, ['A', 'B'])
    assert data.variables == ('A', 'B')
    assert np.array_equal(data.values, [[0, 1]])


@pytest.mark.parametrize('content, line', [
    ("regime,A\nobs,2\n", 2),
    ("regime,A\nsometimes,1\n", 2),
    ("state,A\nobs,1\n", 1),
    ("regime,B\nobs,1\n", 1),
])
def test_bad_dataset_files(tmp_path: Path, content, line):
    path = tmp_path / 'bad.csv'
    path.write_text(content)
    with pytest.raises(DataFormatError) as caught:
        read_dataset(path, ['A'])
    assert caught.value.line == line


def test_empty_dataset_file(tmp_path: Path):
    path = tmp_path / 'empty.csv'
    path.write_text("")
    with pytest.raises(DataFormatError):
        read_dataset(path)


def test_regime_parsing():
    assert parse_regime('obs') is None
    assert parse_regime('do(A=1;B=0)') == Intervention({'A': True, 'B': False})
    with pytest.raises(DataFormatError):
        parse_regime('do(A=1;A=0)')


def test_empty_graph_dot():
    assert render_dot(CausalDiagram(())) == "digraph causal {\n}\n"


def room_learned():
    variables = make_variables(['P', 'Pr', 'L', 'Pow', 'H', 'W', 'O', 'T'], nd=['Pr', 'Pow', 'T'])
    evidence = {
        ('P', 'Pr'): EdgeEvidence(EdgeKind.DO_CONFIRMED, 31.25),
        ('Pr', 'L'): EdgeEvidence(EdgeKind.FLAGGED, 412.5),
        ('H', 'Pow'): EdgeEvidence(EdgeKind.DO_CONFIRMED, 40.0),
        ('H', 'T'): EdgeEvidence(EdgeKind.DO_CONFIRMED, 25.0),
        ('W', 'T'): EdgeEvidence(EdgeKind.DO_CONFIRMED, 22.5),
        ('O', 'T'): EdgeEvidence(EdgeKind.DO_CONFIRMED, 20.0),
        ('Pow', 'O'): EdgeEvidence(EdgeKind.FLAGGED, 6.0),
    }
    return CausalDiagram(variables, frozenset(evidence)), evidence


def test_learned_graph_golden_file():
    diagram, evidence = room_learned()
    text = render_dot(diagram, evidence)
    assert text == (GOLDEN / 'living_room_learned.dot').read_text()
    assert text.count('label="flagged"') == 2
    assert text.count(' -> ') == 7


def test_dot_round_trip():
    diagram, evidence = room_learned()
    parsed, parsed_evidence = parse_dot(render_dot(diagram, evidence))
    assert parsed == diagram
    assert parsed_evidence == evidence


def test_diff_colors(room_variables):
    diagram, evidence = room_learned()
    truth = CausalDiagram(room_variables, LIVING_ROOM_ARROWS)
    diff = diff_graphs(LearnedGraph(diagram, evidence), truth)
    text = render_dot(diagram, evidence, diff=diff, name="diff")
    assert text.count('color=red') == 1
    assert '"L" -> "Pow" [color=red];' in text
    assert text.count('color=yellow') == 1
    assert text.count('color=green') == 6


@pytest.mark.parametrize('text', [
    'graph g {\n}\n',
    'digraph g {\n  "A" [shape=circle];\n  "A" -> "B";\n}\n',
    'digraph g {\n  "A" [shape=circle];\n',
    'digraph g {\n  node A;\n}\n',
])
def test_bad_dot(text):
    with pytest.raises(DataFormatError):
        parse_dot(text)
