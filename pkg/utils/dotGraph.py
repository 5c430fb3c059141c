"""DOT export of causal graphs and the small subset of DOT read back by ``fit``.

Non-doable variables are rounded blue boxes, doable ones circles. Flagged
arrows are dashed and labelled ``flagged``; an undirected remnant is drawn
with ``dir=both``. Against a ground truth, correct arrows are green, missed
red, wrongly added yellow and bidirectional blue.
"""
from __future__ import annotations

import re
from typing import Mapping

from discovery import CandidateGraph, EdgeDiff, EdgeEvidence, EdgeKind
from models import Arrow, CausalDiagram, DataFormatError, make_variables

DIFF_COLORS = {"correct": "green", "missed": "red", "added": "yellow", "bidirectional": "blue"}

NODE_LINE = re.compile(r'^"([^"]+)"\s*(?:\[(.*)\])?\s*;?$')
EDGE_LINE = re.compile(r'^"([^"]+)"\s*->\s*"([^"]+)"\s*(?:\[(.*)\])?\s*;?$')
ATTRIBUTE = re.compile(r'(\w+)\s*=\s*(?:"([^"]*)"|([^,\s]+))')


def _node(name: str, doable: bool) -> str:
    if doable:
        return f'  "{name}" [shape=circle];'
    return f'  "{name}" [shape=box, style="rounded,filled", fillcolor=lightblue];'


def _attributes(evidence: EdgeEvidence | None, color: str | None = None) -> str:
    attrs = []
    if evidence is not None:
        if evidence.kind is EdgeKind.FLAGGED:
            attrs += ['style=dashed', 'label="flagged"']
        elif evidence.kind is EdgeKind.ND_CANDIDATE:
            attrs.append('style=dotted')
        else:
            attrs.append('style=solid')
        if evidence.undirected:
            attrs.append('dir=both')
        if evidence.best_statistic:
            attrs.append(f'comment="chi2={evidence.best_statistic:.4f}"')
    if color:
        attrs.append(f'color={color}')
    return f' [{", ".join(attrs)}]' if attrs else ''


def render_dot(diagram: CausalDiagram, evidence: Mapping[Arrow, EdgeEvidence] | None = None,
               diff: EdgeDiff | None = None, name: str = "causal") -> str:
    evidence = evidence or {}
    lines = [f"digraph {name} {{"]
    for variable in sorted(diagram.variables, key=lambda v: v.index):
        lines.append(_node(variable.name, variable.doable))

    if diff is None:
        edges = [(arrow, _attributes(evidence.get(arrow))) for arrow in diagram.sorted_arrows()]
    else:
        edges = []
        classes = [("correct", diff.correct), ("missed", diff.missed), ("added", diff.added)]
        for label, arrows in classes:
            for arrow in arrows:
                edges.append((arrow, _attributes(evidence.get(arrow), DIFF_COLORS[label])))
        for arrow in diff.bidirectional:
            if arrow in diagram.arrows:
                shown = evidence.get(arrow, EdgeEvidence(EdgeKind.FLAGGED, undirected=True))
                edges.append((arrow, _attributes(shown, DIFF_COLORS["bidirectional"])))
        edges.sort(key=lambda edge: (diagram.index(edge[0][0]), diagram.index(edge[0][1])))

    for (a, b), attrs in edges:
        lines.append(f'  "{a}" -> "{b}"{attrs};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_candidate(candidate: CandidateGraph, name: str = "candidate") -> str:
    """Pre-resolution graph: every surviving arrow, both directions drawn separately."""
    diagram = CausalDiagram(tuple(sorted(candidate.variables, key=lambda v: v.index)),
                            frozenset(candidate.arrows))
    return render_dot(diagram, candidate.arrows, name=name)


def parse_dot(text: str) -> tuple[CausalDiagram, dict[Arrow, EdgeEvidence]]:
    """Read a graph written by ``render_dot``. Missed (red) edges of a diff are skipped."""
    nodes: dict[str, bool] = {}
    arrows: dict[Arrow, EdgeEvidence] = {}
    opened = closed = False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if not opened:
            if not re.match(r"^(strict\s+)?digraph(\s+\w+)?\s*\{$", line):
                raise DataFormatError("expected 'digraph <name> {'", number)
            opened = True
            continue
        if line == "}":
            closed = True
            continue
        if closed:
            raise DataFormatError("content after the closing brace", number)

        edge = EDGE_LINE.match(line)
        if edge:
            a, b, body = edge.groups()
            attrs = _parse_attributes(body or "")
            for endpoint in (a, b):
                if endpoint not in nodes:
                    raise DataFormatError(f"edge uses undeclared node {endpoint}", number)
            if a == b:
                raise DataFormatError(f"self-loop on {a}", number)
            if attrs.get("color") == DIFF_COLORS["missed"]:
                continue
            arrows[(a, b)] = _evidence(attrs, number)
            continue

        node = NODE_LINE.match(line)
        if node:
            name, body = node.groups()
            if name in nodes:
                raise DataFormatError(f"duplicate node {name}", number)
            attrs = _parse_attributes(body or "")
            nodes[name] = attrs.get("shape", "circle") != "box"
            continue
        raise DataFormatError(f"unsupported DOT statement {line!r}", number)

    if not closed:
        raise DataFormatError("missing closing brace")
    variables = make_variables(list(nodes), nd=[n for n, doable in nodes.items() if not doable])
    return CausalDiagram(variables, frozenset(arrows)), arrows


def _parse_attributes(body: str) -> dict[str, str]:
    return {m.group(1): m.group(2) if m.group(2) is not None else m.group(3)
            for m in ATTRIBUTE.finditer(body)}


def _evidence(attrs: Mapping[str, str], line: int) -> EdgeEvidence:
    if attrs.get("label") == "flagged":
        kind = EdgeKind.FLAGGED
    elif attrs.get("style") == "dotted":
        kind = EdgeKind.ND_CANDIDATE
    else:
        kind = EdgeKind.DO_CONFIRMED
    statistic = 0.0
    comment = attrs.get("comment", "")
    if comment.startswith("chi2="):
        try:
            statistic = float(comment[len("chi2="):])
        except ValueError:
            raise DataFormatError(f"bad statistic in {comment!r}", line) from None
    return EdgeEvidence(kind, statistic, undirected=attrs.get("dir") == "both")
