import click

from cbn import from_scm
from commands.options import format_probability, parse_assignments
from inference import query
from utils.scenarioFile import load_scm


@click.command()
@click.option('--cbn', 'network_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Fitted network (scenario format).')
@click.option('--evidence', default='', help='Observed values, e.g. "L=0,H=1".')
@click.option('--method', type=click.Choice(['bp', 'enum']), default='bp', show_default=True)
def infer(network_path, evidence, method):
    """Print posterior beliefs given evidence."""
    network = from_scm(load_scm(network_path))
    beliefs = query(network, parse_assignments(evidence), method)

    width = max([len('variable'), *(len(name) for name in network.names)])
    click.echo(f"{'variable':<{width}}  P(=0)   P(=1)")
    for name in network.names:
        p0, p1 = beliefs[name]
        click.echo(f"{name:<{width}}  {format_probability(p0)}  {format_probability(p1)}")
