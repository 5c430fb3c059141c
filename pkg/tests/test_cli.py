from pathlib import Path

import pytest
from click.testing import CliRunner

from __init__ import create_app
from config import TestingConfig
from utils.datasetFile import read_dataset
from utils.dotGraph import parse_dot

GOLDEN = Path(__file__).resolve().parent / 'golden'


@pytest.fixture
def app():
    return create_app(TestingConfig)


@pytest.fixture
def runner():
    return CliRunner()


def beliefs_from(output):
    rows = {}
    for line in output.splitlines()[1:]:
        name, p0, p1 = line.split()
        rows[name] = (p0, p1)
    return rows


def test_gen_data_is_reproducible(app, runner, scenario_dir, tmp_path):
    scenario = str(scenario_dir / 'living_room.scenario')
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    for out in (first, second):
        result = runner.invoke(app, ['gen-data', '--scenario', scenario, '--obs', '500',
                                     '--seed', '42', '--out', str(out)])
        assert result.exit_code == 0, result.output
    assert first.read_bytes() == second.read_bytes()
    assert len(read_dataset(first)) == 500


def test_gen_data_with_interventions(app, runner, scenario_dir, tmp_path):
    out = tmp_path / 'data.csv'
    result = runner.invoke(app, ['gen-data', '--scenario', str(scenario_dir / 'living_room.scenario'),
                                 '--obs', '30', '--do', 'H=1', '--do', 'L=0,W=1', '--out', str(out)])
    assert result.exit_code == 0, result.output
    data = read_dataset(out)
    assert len(data) == 90
    assert len(data.observational()) == 30
    assert data.column('H')[30:60].all()


def test_gen_data_refuses_non_doable_interventions(app, runner, tmp_path):
    scenario = tmp_path / 'nd.scenario'
    scenario.write_text("variable A nd\ncpt A : 0.5\n")
    result = runner.invoke(app, ['gen-data', '--scenario', str(scenario), '--do', 'A=1',
                                 '--out', str(tmp_path / 'x.csv')])
    assert result.exit_code == 2
    assert 'error:' in result.output


def test_discover_writes_learned_and_raw_graphs(app, runner, scenario_dir, tmp_path):
    out, raw = tmp_path / 'learned.dot', tmp_path / 'raw.dot'
    result = runner.invoke(app, ['discover', '--scenario', str(scenario_dir / 'living_room.scenario'),
                                 '--nd', 'Pr,Pow,T', '--seed', '3', '--out', str(out), '--raw', str(raw)])
    assert result.exit_code == 0, result.output
    learned, evidence = parse_dot(out.read_text())
    candidate, _ = parse_dot(raw.read_text())
    assert not learned.variable('Pow').doable
    assert learned.arrows <= candidate.arrows | {(b, a) for a, b in candidate.arrows}
    assert learned.arrows


def test_discover_uses_supplied_observations(app, runner, scenario_dir, tmp_path):
    scenario = str(scenario_dir / 'living_room.scenario')
    data, out = tmp_path / 'obs.csv', tmp_path / 'learned.dot'
    runner.invoke(app, ['gen-data', '--scenario', scenario, '--obs', '300', '--out', str(data)])
    result = runner.invoke(app, ['discover', '--scenario', scenario, '--data', str(data), '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert out.read_text().startswith('digraph causal {')


def test_fit_then_infer(app, runner, scenario_dir, tmp_path):
    scenario = str(scenario_dir / 'living_room.scenario')
    data, network = tmp_path / 'obs.csv', tmp_path / 'fitted.scenario'
    assert runner.invoke(app, ['gen-data', '--scenario', scenario, '--obs', '2000',
                               '--seed', '8', '--out', str(data)]).exit_code == 0
    result = runner.invoke(app, ['fit', '--scenario', scenario, '--structure',
                                 str(GOLDEN / 'living_room_learned.dot'), '--data', str(data),
                                 '--out', str(network), '--augment'])
    assert result.exit_code == 0, result.output
    assert network.read_text().startswith('# fitted from obs.csv')

    prior = beliefs_from(runner.invoke(app, ['infer', '--cbn', str(network)]).output)
    result = runner.invoke(app, ['infer', '--cbn', str(network), '--evidence', 'L=0'])
    assert result.exit_code == 0, result.output
    posterior = beliefs_from(result.output)
    assert posterior['L'] == ('1.0000', '0.0000')
    assert float(posterior['P'][0]) > float(prior['P'][0])


def test_fit_rejects_graph_over_other_variables(app, runner, scenario_dir, tmp_path):
    graph = tmp_path / 'g.dot'
    graph.write_text('digraph g {\n  "A" [shape=circle];\n}\n')
    data = tmp_path / 'obs.csv'
    scenario = str(scenario_dir / 'living_room.scenario')
    runner.invoke(app, ['gen-data', '--scenario', scenario, '--obs', '10', '--out', str(data)])
    result = runner.invoke(app, ['fit', '--scenario', scenario, '--structure', str(graph),
                                 '--data', str(data), '--out', str(tmp_path / 'n.scenario')])
    assert result.exit_code == 2


def test_infer_methods_agree(app, runner, scenario_dir):
    network = str(scenario_dir / 'living_room.scenario')
    outputs = [runner.invoke(app, ['infer', '--cbn', network, '--evidence', 'T=1,H=0', '--method', method])
               for method in ('bp', 'enum')]
    assert [o.exit_code for o in outputs] == [0, 0]
    assert outputs[0].output == outputs[1].output
    assert outputs[0].output.splitlines()[0].split() == ['variable', 'P(=0)', 'P(=1)']


def test_usage_errors_exit_with_one(app, runner, scenario_dir):
    network = str(scenario_dir / 'living_room.scenario')
    assert runner.invoke(app, ['infer', '--cbn', network, '--method', 'gibbs']).exit_code == 1
    assert runner.invoke(app, ['infer', '--cbn', network, '--evidence', 'L=2']).exit_code == 1
    assert runner.invoke(app, ['infer']).exit_code == 1


def test_data_errors_exit_with_two(app, runner, scenario_dir, tmp_path):
    network = str(scenario_dir / 'living_room.scenario')
    result = runner.invoke(app, ['infer', '--cbn', network, '--evidence', 'Z=1'])
    assert result.exit_code == 2
    assert 'error:' in result.output

    broken = tmp_path / 'broken.scenario'
    broken.write_text("variable A doable\nbogus\n")
    result = runner.invoke(app, ['infer', '--cbn', str(broken)])
    assert result.exit_code == 2
    assert 'line 2' in result.output

    broken.write_text("variable A doable\n: 0.5\n")
    result = runner.invoke(app, ['gen-data', '--scenario', str(broken), '--out', str(tmp_path / 'x.csv')])
    assert result.exit_code == 2
    assert 'line 2' in result.output


def test_compare_reports_the_diff(app, runner, scenario_dir, tmp_path):
    out = tmp_path / 'diff.dot'
    result = runner.invoke(app, ['compare', '--learned', str(GOLDEN / 'living_room_learned.dot'),
                                 '--truth', str(scenario_dir / 'living_room.scenario'), '--out', str(out)])
    assert result.exit_code == 0, result.output
    lines = dict(line.split(': ', 1) for line in result.output.splitlines())
    assert lines['missed'] == 'L->Pow'
    assert lines['added'] == 'Pow->O'
    assert lines['flagged spurious'] == 'Pow->O'
    assert lines['precision'] == '0.8571'
    assert lines['recall'] == '0.8571'
    assert out.read_text().count('color=red') == 1


def test_sweep_prints_one_row_per_configuration(app, runner, scenario_dir):
    result = runner.invoke(app, ['sweep', '--scenario', str(scenario_dir / 'living_room.scenario'),
                                 '--nd', '', '--nd', 'Pr,Pow,T'])
    assert result.exit_code == 0, result.output
    rows = result.output.splitlines()
    assert rows[0].split('\t')[0] == 'nd'
    assert [row.split('\t')[0] for row in rows[1:]] == ['-', 'Pow,Pr,T']
