import csv
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union

import yaml

from dara_alloc import errors

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def geometric_sum(delta: float, T: Optional[int]) -> float:
    """Sum of delta^(t-1) for t = 1..T, T=None meaning an infinite horizon"""
    if T is None:
        if delta >= 1:
            raise errors.DeltaOne()
        return 1.0 / (1.0 - delta)
    if delta == 1:
        return float(T)
    return (1.0 - delta ** T) / (1.0 - delta)


def splitmix64(value: int) -> int:
    """One splitmix64 output step, used to derive independent seeds"""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, repetition: int) -> int:
    return splitmix64(seed + repetition * GOLDEN_GAMMA)


def format_value(value) -> str:
    """CSV cell text: shortest round-trip repr for floats, empty for None"""
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(float(value))
    return str(value)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])


def read_csv(path: Union[str, Path]) -> List[dict]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fieldnames = reader.fieldnames
            rows = list(reader)
    except (OSError, UnicodeDecodeError) as err:
        raise errors.ValidationError(f"cannot read {path}: {err}") from err
    if fieldnames is None:
        raise errors.ValidationError(f"{path}: empty CSV file")
    logger.debug("[CSV] Read %s rows from %s", len(rows), path)
    return rows


def read_yaml(path: Union[str, Path]) -> dict:
    """Load a YAML (or JSON) mapping document"""
    try:
        with open(path) as fh:
            document = yaml.safe_load(fh)
    except (OSError, UnicodeDecodeError) as err:
        raise errors.ConfigError(f"cannot read config {path}: {err}") from err
    except yaml.YAMLError as err:
        raise errors.ConfigError(f"malformed config {path}: {err}") from err
    if not isinstance(document, dict):
        raise errors.ConfigError(f"config {path} must be a mapping")
    return document
