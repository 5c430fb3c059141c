"""Line-oriented scenario files.

    # comment
    variable P doable
    variable Pr nd
    parents Pr: P
    cpt P : 0.2
    cpt Pr 0: 0.03
    cpt Pr 1: 0.97
    option nd_set Pr,Pow,T

A file with options only describes the living-room template.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from models import ConfigError, Scm, row_bits, row_index
from simulator import DEFAULT_EFFECTS, ROOM_VARIABLES, ScenarioConfig, build_scenario

TRUE_WORDS = {"true", "yes", "1", "on"}
FALSE_WORDS = {"false", "no", "0", "off"}


def _parse_bool(text: str, line: int) -> bool:
    word = text.lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    raise ConfigError(f"expected true or false, got {text!r}", line)


def _parse_probability(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}", line) from None
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"probability {value} outside [0, 1]", line)
    return value


def parse_scenario(text: str) -> ScenarioConfig:
    variables: dict[str, bool] = {}
    declared_at: dict[str, int] = {}
    parents: dict[str, tuple[str, ...]] = {}
    rows: dict[str, dict[int, float]] = {}
    nd_set, nd_line = frozenset(), None
    proximity_edge = False
    effects: dict[str, float] = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, colon, body = line.partition(":")
        words = head.split()
        if not words:
            raise ConfigError("missing directive before ':'", number)
        directive = words[0]

        if directive == "variable":
            if len(words) != 3 or body:
                raise ConfigError("expected 'variable <name> doable|nd'", number)
            name, kind = words[1], words[2]
            if kind not in ("doable", "nd"):
                raise ConfigError(f"variable kind must be doable or nd, got {kind!r}", number)
            if name in variables:
                raise ConfigError(f"duplicate variable {name}", number)
            variables[name] = kind == "doable"
            declared_at[name] = number

        elif directive == "parents":
            if len(words) != 2 or not colon:
                raise ConfigError("expected 'parents <name>: <parent> ...'", number)
            name = words[1]
            if name not in variables:
                raise ConfigError(f"parents for undeclared variable {name}", number)
            if name in parents:
                raise ConfigError(f"parents of {name} declared twice", number)
            if name in rows:
                raise ConfigError(f"parents of {name} declared after its cpt rows", number)
            listed = tuple(body.split())
            for parent in listed:
                if parent not in variables:
                    raise ConfigError(f"undeclared parent {parent} of {name}", number)
            if len(set(listed)) != len(listed):
                raise ConfigError(f"repeated parent of {name}", number)
            parents[name] = listed

        elif directive == "cpt":
            if len(words) not in (2, 3) or not colon:
                raise ConfigError("expected 'cpt <name> <parent-bits>: <probability>'", number)
            name = words[1]
            if name not in variables:
                raise ConfigError(f"cpt for undeclared variable {name}", number)
            bits = words[2] if len(words) == 3 else ""
            width = len(parents.get(name, ()))
            if len(bits) != width or any(b not in "01" for b in bits):
                raise ConfigError(f"{name} has {width} parents; {bits!r} is not a parent assignment", number)
            index = row_index([b == "1" for b in bits])
            table = rows.setdefault(name, {})
            if index in table:
                raise ConfigError(f"duplicate cpt row {bits!r} for {name}", number)
            table[index] = _parse_probability(body.strip(), number)

        elif directive == "option":
            if len(words) != 3 or body:
                raise ConfigError("expected 'option <key> <value>'", number)
            key, value = words[1], words[2]
            if key == "nd_set":
                nd_set = frozenset(n for n in value.split(",") if n)
                nd_line = number
            elif key == "proximity_edge":
                proximity_edge = _parse_bool(value, number)
            elif key in DEFAULT_EFFECTS:
                effects[key] = _parse_probability(value, number)
            else:
                raise ConfigError(f"unknown option {key}", number)

        else:
            raise ConfigError(f"unknown directive {directive!r}", number)

    if not variables:
        unknown = nd_set - set(ROOM_VARIABLES)
        if unknown:
            raise ConfigError(f"nd_set names unknown variables {sorted(unknown)}", nd_line)
        return ScenarioConfig(nd_set=nd_set, proximity_edge=proximity_edge, effect_strengths=effects)

    if proximity_edge or effects:
        raise ConfigError("template options cannot be combined with explicit variables")
    unknown = nd_set - set(variables)
    if unknown:
        raise ConfigError(f"nd_set names unknown variables {sorted(unknown)}", nd_line)
    cpts = {}
    for name, line in declared_at.items():
        width = len(parents.get(name, ()))
        table = rows.get(name, {})
        missing = [i for i in range(2 ** width) if i not in table]
        if missing:
            shown = "".join(map(str, row_bits(missing[0], width))) or "(root)"
            raise ConfigError(f"{name} is missing cpt row {shown}", line)
        cpts[name] = tuple(table[i] for i in range(2 ** width))
    return ScenarioConfig(
        variables=tuple(variables.items()),
        parents={name: parents.get(name, ()) for name in variables},
        cpts=cpts,
        nd_set=nd_set,
    )


def render_scenario(config: ScenarioConfig, header: str | None = None) -> str:
    lines = [f"# {text}" for text in (header or "").splitlines()]
    if config.is_template:
        if config.proximity_edge:
            lines.append("option proximity_edge true")
        for key in sorted(config.effect_strengths):
            lines.append(f"option {key} {config.effect_strengths[key]!r}")
    else:
        for name, doable in config.variables:
            lines.append(f"variable {name} {'doable' if doable else 'nd'}")
        for name, _ in config.variables:
            if config.parents.get(name):
                lines.append(f"parents {name}: {' '.join(config.parents[name])}")
        for name, _ in config.variables:
            width = len(config.parents.get(name, ()))
            for index, p in enumerate(config.cpts[name]):
                bits = "".join(map(str, row_bits(index, width)))
                lines.append(f"cpt {name} {bits}: {float(p)!r}")
    if config.nd_set:
        order = [n for n, _ in config.variables] if config.variables else list(ROOM_VARIABLES)
        lines.append(f"option nd_set {','.join(sorted(config.nd_set, key=order.index))}")
    return "\n".join(lines) + "\n"


def load_scenario(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"cannot read scenario {path}: {error.strerror}") from error
    try:
        return parse_scenario(text)
    except ConfigError as error:
        raise ConfigError(f"{path}: {error}") from error


def load_scm(path: str | Path, nd_set=()) -> Scm:
    config = load_scenario(path)
    if nd_set:
        config = replace(config, nd_set=config.nd_set | frozenset(nd_set))
    return build_scenario(config)
