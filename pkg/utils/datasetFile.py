"""Dataset CSV files: header ``regime,<var1>,...``, regime ``obs`` or ``do(A=1;B=0)``."""
from __future__ import annotations

import re
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from models import DataFormatError, Intervention
from simulator import Dataset

OBSERVATIONAL = "obs"
REGIME_PATTERN = re.compile(r"^do\((\w+=[01](?:;\w+=[01])*)\)$")


def parse_regime(text: str, variables: Sequence[str] = (), line: int | None = None) -> Intervention | None:
    if text == OBSERVATIONAL:
        return None
    match = REGIME_PATTERN.match(text)
    if not match:
        raise DataFormatError(f"bad regime {text!r}", line)
    assignments = {}
    for part in match.group(1).split(";"):
        name, value = part.split("=")
        if variables and name not in variables:
            raise DataFormatError(f"regime names unknown variable {name}", line)
        if name in assignments:
            raise DataFormatError(f"regime assigns {name} twice", line)
        assignments[name] = value == "1"
    return Intervention(assignments)


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    frame = pd.DataFrame(np.asarray(dataset.values, dtype=np.int64), columns=list(dataset.variables))
    frame.insert(0, "regime", [OBSERVATIONAL if r is None else r.label() for r in dataset.regimes])
    return frame


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    dataset_frame(dataset).to_csv(path, index=False, lineterminator="\n")


def read_dataset(path: str | Path, variables: Sequence[str] | None = None) -> Dataset:
    """Load a dataset; with `variables` the header must name exactly those columns."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path}: empty dataset file") from None
    except pd.errors.ParserError as error:
        raise DataFormatError(f"{path}: {error}") from error
    except OSError as error:
        raise DataFormatError(f"cannot read dataset {path}: {error.strerror}") from error

    columns = list(frame.columns)
    if not columns or columns[0] != "regime":
        raise DataFormatError(f"{path}: first column must be 'regime'", 1)
    names = columns[1:]
    if len(set(names)) != len(names) or any(n.startswith("Unnamed") or not n for n in names):
        raise DataFormatError(f"{path}: malformed header", 1)
    if variables is not None and set(names) != set(variables):
        raise DataFormatError(f"{path}: header {names} does not match variables {list(variables)}", 1)

    cells = frame[names].to_numpy(dtype=str) if names else np.zeros((len(frame), 0), dtype=str)
    bad = np.argwhere(~np.isin(cells, ["0", "1"]))
    if len(bad):
        row, column = bad[0]
        raise DataFormatError(f"{path}: cell {names[column]}={cells[row, column]!r} is not 0 or 1",
                              int(row) + 2)
    regimes = [parse_regime(text, names, number + 2) for number, text in enumerate(frame["regime"])]
    dataset = Dataset(names, (cells == "1").astype(np.uint8), regimes)
    if variables is not None and list(variables) != names:
        order = [names.index(v) for v in variables]
        dataset = Dataset(list(variables), dataset.values[:, order], dataset.regimes)
    return dataset
