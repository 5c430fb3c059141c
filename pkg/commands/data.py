import logging

import click

from commands.options import parse_assignments
from models import Intervention
from simulator import RecordingEnvironment, SimulatedEnvironment, derive_seed
from utils.datasetFile import write_dataset
from utils.scenarioFile import load_scm

logger = logging.getLogger(__name__)


@click.command('gen-data')
@click.option('--scenario', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Scenario file describing the ground truth.')
@click.option('--obs', 'observations', type=click.IntRange(min=0), default=None,
              help='Observational records (and records per --do).')
@click.option('--do', 'interventions', multiple=True,
              help='Also record samples under this intervention, e.g. "H=1,W=0". Repeatable.')
@click.option('--seed', type=click.IntRange(min=0), default=None)
@click.option('--out', required=True, type=click.Path(dir_okay=False, writable=True))
@click.pass_obj
def gen_data(settings, scenario, observations, interventions, seed, out):
    """Sample a dataset from a scenario."""
    n = settings['CBN_OBSERVATIONS'] if observations is None else observations
    seed = settings['CBN_SEED'] if seed is None else seed
    env = RecordingEnvironment(SimulatedEnvironment(load_scm(scenario)), enforce_policy=True)

    dataset = env.observe(n, seed)
    for number, text in enumerate(interventions, start=1):
        assignments = parse_assignments(text, option='--do')
        if not assignments:
            raise click.BadParameter("empty intervention", param_hint='--do')
        intervention = Intervention(assignments)
        dataset = dataset.concat(env.intervene(intervention, n, derive_seed(seed, number)))

    write_dataset(dataset, out)
    logger.info("wrote %d records to %s", len(dataset), out)
    click.echo(f"{len(dataset)} records -> {out}")
