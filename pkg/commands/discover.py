import logging
from pathlib import Path

import click

from commands.options import format_probability, parse_names
from discovery import DiscoveryConfig, learn_structure, sweep_nd_configurations
from models import ConfigError
from simulator import RecordingEnvironment, SimulatedEnvironment
from utils.datasetFile import read_dataset
from utils.dotGraph import render_candidate, render_dot
from utils.scenarioFile import load_scenario, load_scm

logger = logging.getLogger(__name__)


def discovery_options(command):
    for option in reversed([
        click.option('--scenario', required=True, type=click.Path(exists=True, dir_okay=False)),
        click.option('--alpha', type=click.FloatRange(0, 1, min_open=True, max_open=True), default=None),
        click.option('--interventions', type=click.IntRange(min=1), default=None,
                     help='Samples per arm for each lock assignment.'),
        click.option('--obs', 'observations', type=click.IntRange(min=1), default=None),
        click.option('--max-order', type=click.IntRange(min=0), default=None),
        click.option('--seed', type=click.IntRange(min=0), default=None),
    ]):
        command = option(command)
    return command


def _discovery_config(settings, alpha, interventions, observations, max_order, seed):
    try:
        return DiscoveryConfig.from_settings(
            settings, alpha=alpha, interventions_per_assignment=interventions,
            observational_samples=observations, max_conditioning_order=max_order, seed=seed,
        )
    except ValueError as error:
        raise ConfigError(str(error)) from error


@click.command()
@discovery_options
@click.option('--nd', default=None, help='Comma-separated variables to treat as non-doable.')
@click.option('--data', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Observational records to use instead of sampling new ones.')
@click.option('--out', required=True, type=click.Path(dir_okay=False, writable=True))
@click.option('--raw', type=click.Path(dir_okay=False, writable=True), default=None,
              help='Also write the candidate graph before DAG resolution.')
@click.pass_obj
def discover(settings, scenario, alpha, interventions, observations, max_order, seed, nd, data, out, raw):
    """Learn the causal structure of a scenario and write it as DOT."""
    config = _discovery_config(settings, alpha, interventions, observations, max_order, seed)
    scm = load_scm(scenario, parse_names(nd))
    env = RecordingEnvironment(SimulatedEnvironment(scm), enforce_policy=True)
    records = read_dataset(data, scm.diagram.names) if data else None

    candidate, learned = learn_structure(env, config, records)
    Path(out).write_text(render_dot(learned.diagram, learned.evidence), encoding='utf-8')
    if raw:
        Path(raw).write_text(render_candidate(candidate), encoding='utf-8')

    do_calls = sum(1 for record in env.log if record.kind == 'do')
    logger.info("%d do-operations, %d refused", do_calls, sum(not r.granted for r in env.log))
    click.echo(f"{len(learned.diagram.arrows)} arrows ({len(learned.flagged())} flagged) "
               f"from {do_calls} interventions -> {out}")


@click.command()
@discovery_options
@click.option('--nd', 'nd_sets', multiple=True,
              help='One non-doable configuration, comma-separated. Repeatable; "" means none.')
@click.pass_obj
def sweep(settings, scenario, alpha, interventions, observations, max_order, seed, nd_sets):
    """Compare learned graphs across non-doable configurations."""
    config = _discovery_config(settings, alpha, interventions, observations, max_order, seed)
    scenario_config = load_scenario(scenario)
    configurations = [parse_names(text) for text in nd_sets] or [frozenset()]

    click.echo("nd\tcorrect\tmissed\tadded\tflagged\tprecision\trecall")
    for nd_set, diff in sweep_nd_configurations(scenario_config, configurations, config):
        click.echo("\t".join([
            ",".join(sorted(nd_set)) or "-",
            str(len(diff.correct)), str(len(diff.missed)), str(len(diff.added)),
            str(len(diff.flagged_spurious)),
            format_probability(diff.precision), format_probability(diff.recall),
        ]))
