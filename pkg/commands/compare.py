from pathlib import Path

import click

from commands.options import format_arrows, format_probability
from discovery import LearnedGraph, diff_graphs
from models import StructuralError
from utils.dotGraph import parse_dot, render_dot
from utils.scenarioFile import load_scm


@click.command()
@click.option('--learned', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--truth', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Scenario holding the ground truth.')
@click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
              help='Write the colored diff graph as DOT.')
def compare(learned, truth, out):
    """Score a learned graph against the ground truth."""
    truth_diagram = load_scm(truth).diagram
    diagram, evidence = parse_dot(Path(learned).read_text(encoding='utf-8'))
    if set(diagram.names) != set(truth_diagram.names):
        raise StructuralError(f"{learned}: variables differ from the ground truth")
    graph = LearnedGraph(truth_diagram.with_arrows(diagram.arrows), evidence)
    diff = diff_graphs(graph, truth_diagram)

    for label, arrows in [("correct", diff.correct), ("missed", diff.missed), ("added", diff.added),
                          ("flagged spurious", diff.flagged_spurious),
                          ("bidirectional", diff.bidirectional)]:
        click.echo(f"{label}: {format_arrows(arrows, truth_diagram)}")
    click.echo(f"precision: {format_probability(diff.precision)}")
    click.echo(f"recall: {format_probability(diff.recall)}")

    if out:
        Path(out).write_text(render_dot(graph.diagram, evidence, diff=diff, name="diff"), encoding='utf-8')
