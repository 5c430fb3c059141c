import logging
from pathlib import Path

import click

from cbn import augment_with_interventions, fit_mle, to_scm, validate_cbn
from models import CausalDiagram, StructuralError, check_acyclic
from simulator import RecordingEnvironment, SimulatedEnvironment, scenario_from_scm
from utils.datasetFile import read_dataset
from utils.dotGraph import parse_dot
from utils.scenarioFile import load_scm, render_scenario

logger = logging.getLogger(__name__)


def load_structure(path: str, scm) -> CausalDiagram:
    """Arrows of a DOT graph over the scenario's variables."""
    diagram, _ = parse_dot(Path(path).read_text(encoding='utf-8'))
    if set(diagram.names) != set(scm.diagram.names):
        raise StructuralError(f"{path}: graph variables {sorted(diagram.names)} "
                              f"differ from the scenario's {sorted(scm.diagram.names)}")
    structure = scm.diagram.with_arrows(diagram.arrows)
    acyclic, witness = check_acyclic(structure)
    if not acyclic:
        raise StructuralError(f"{path}: cycle {' -> '.join(witness)}")
    return structure


@click.command()
@click.option('--scenario', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Scenario supplying variable order, doable flags and the environment for --augment.')
@click.option('--structure', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--data', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--out', required=True, type=click.Path(dir_okay=False, writable=True))
@click.option('--pseudo-count', type=click.FloatRange(min=0), default=None)
@click.option('--augment', is_flag=True, help='Re-estimate sparse rows from interventions.')
@click.option('--min-count', type=click.IntRange(min=1), default=None)
@click.option('--samples', type=click.IntRange(min=1), default=None)
@click.option('--seed', type=click.IntRange(min=0), default=None)
@click.pass_obj
def fit(settings, scenario, structure, data, out, pseudo_count, augment, min_count, samples, seed):
    """Estimate CPTs for a learned structure and write the network as a scenario."""
    scm = load_scm(scenario)
    diagram = load_structure(structure, scm)
    dataset = read_dataset(data, scm.diagram.names)

    network = fit_mle(diagram, dataset,
                      settings['CBN_PSEUDO_COUNT'] if pseudo_count is None else pseudo_count)
    if augment:
        env = RecordingEnvironment(SimulatedEnvironment(scm), enforce_policy=True)
        network = augment_with_interventions(
            network, env,
            min_count=settings['CBN_MIN_ROW_COUNT'] if min_count is None else min_count,
            samples=settings['CBN_AUGMENT_SAMPLES'] if samples is None else samples,
            seed=settings['CBN_SEED'] if seed is None else seed,
        )

    report = validate_cbn(network)
    if not report.ok:
        raise StructuralError("; ".join(report.violations))
    for name, row in report.smoothed_rows:
        logger.info("%s row %d has no records and stays at 0.5", name, row)

    header = f"fitted from {Path(data).name} on {Path(structure).name}"
    Path(out).write_text(render_scenario(scenario_from_scm(to_scm(network)), header=header),
                         encoding='utf-8')
    click.echo(f"{len(network.cpts)} CPTs ({len(report.smoothed_rows)} smoothed rows) -> {out}")
