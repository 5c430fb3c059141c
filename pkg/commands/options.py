"""Parsing and formatting shared by the commands."""
from __future__ import annotations

import re
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Iterable

import click

from models import Arrow, CausalDiagram

ASSIGNMENT = re.compile(r"^\s*(\w+)\s*=\s*([01])\s*$")
FOUR_PLACES = Decimal("0.0001")


def parse_assignments(text: str | None, option: str = "--evidence") -> dict[str, bool]:
    """'L=0,H=1' (commas or semicolons) -> {'L': False, 'H': True}."""
    values: dict[str, bool] = {}
    for part in re.split(r"[,;]", text or ""):
        if not part.strip():
            continue
        match = ASSIGNMENT.match(part)
        if not match:
            raise click.BadParameter(f"expected NAME=0 or NAME=1, got {part.strip()!r}", param_hint=option)
        name, value = match.groups()
        if name in values:
            raise click.BadParameter(f"{name} assigned twice", param_hint=option)
        values[name] = value == "1"
    return values


def parse_names(text: str | None) -> frozenset[str]:
    return frozenset(name.strip() for name in (text or "").split(",") if name.strip())


def format_probability(p: float) -> str:
    return str(Decimal(repr(float(p))).quantize(FOUR_PLACES, rounding=ROUND_HALF_EVEN))


def format_arrows(arrows: Iterable[Arrow], diagram: CausalDiagram) -> str:
    ordered = sorted(arrows, key=lambda ab: (diagram.index(ab[0]), diagram.index(ab[1])))
    return ", ".join(f"{a}->{b}" for a, b in ordered) or "-"
