"""
Serialization and deserialization utility functions
"""

import csv
import json
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import yaml

PathLike = Union[str, Path]

_FLOAT_TOKEN = "@@float{}@@"
_FLOAT_TOKEN_RE = re.compile(r'"@@float(\d+)@@"')


def format_float(value: float, digits: int = 17) -> str:
    """
    Render a float with a fixed number of significant digits

    Integral values keep a trailing ``.0`` so they read back as floats.
    Non-finite values become ``inf``, ``-inf`` or ``nan``.

    Args:
        value: Number to format
        digits: Significant digits

    Returns:
        Text representation
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, f".{digits}g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _prepare(obj: Any, digits: int, tokens: List[str]) -> Any:
    """Replace floats by placeholder tokens and convert numpy/enum values"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, np.bool_):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            # JSON has no literal for these
            return format_float(value)
        tokens.append(format_float(value, digits))
        return _FLOAT_TOKEN.format(len(tokens) - 1)
    if isinstance(obj, Enum):
        return _prepare(obj.value, digits, tokens)
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [_prepare(v, digits, tokens) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _prepare(v, digits, tokens) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v, digits, tokens) for v in obj]
    return str(obj)


def to_json(obj: Any, indent: int = 2, sort_keys: bool = True, digits: int = 17) -> str:
    """
    Convert object to JSON string

    Floats are written with ``digits`` significant digits so that
    identical values always produce identical text.

    Args:
        obj: Object to serialize
        indent: Indentation for pretty printing
        sort_keys: Whether to sort keys
        digits: Significant digits of floats

    Returns:
        JSON string representation
    """
    tokens: List[str] = []
    prepared = _prepare(obj, digits, tokens)
    text = json.dumps(prepared, indent=indent, sort_keys=sort_keys)
    return _FLOAT_TOKEN_RE.sub(lambda m: tokens[int(m.group(1))], text)


def from_json(text: str) -> Any:
    """
    Parse JSON string to object

    Args:
        text: JSON string

    Returns:
        Parsed object
    """
    return json.loads(text)


def save_json_file(
    obj: Any, file_path: PathLike, indent: int = 2, sort_keys: bool = True, digits: int = 17
) -> None:
    """
    Save object to JSON file

    Args:
        obj: Object to save
        file_path: Path to save file
        indent: Indentation for pretty printing
        sort_keys: Whether to sort keys
        digits: Significant digits of floats
    """
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_json(obj, indent=indent, sort_keys=sort_keys, digits=digits))
        f.write("\n")


def load_json_file(file_path: PathLike) -> Any:
    """
    Load JSON from file

    Args:
        file_path: Path to JSON file

    Returns:
        Parsed object
    """
    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)


def to_yaml(obj: Any, indent: int = 2) -> str:
    """
    Convert object to YAML string

    Args:
        obj: Object to serialize
        indent: Indentation for pretty printing

    Returns:
        YAML string representation
    """
    return yaml.safe_dump(obj, default_flow_style=False, indent=indent, sort_keys=True)


def load_yaml_file(file_path: PathLike) -> Any:
    """
    Load YAML from file

    Args:
        file_path: Path to YAML file

    Returns:
        Parsed object
    """
    with open(file_path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def load_toml_file(file_path: PathLike) -> Dict[str, Any]:
    """
    Load TOML from file

    Args:
        file_path: Path to TOML file

    Returns:
        Parsed mapping
    """
    with open(file_path, "rb") as f:
        return tomllib.load(f)


def load_config_file(file_path: PathLike) -> Dict[str, Any]:
    """
    Load a configuration mapping, choosing the parser from the extension

    Args:
        file_path: ``.toml``, ``.yaml``/``.yml`` or ``.json`` file

    Returns:
        Parsed mapping (empty for an empty file)

    Raises:
        OSError: If the file cannot be read
        ValueError: On an unsupported extension, a parse error or a
            top level that is not a mapping
    """
    path = Path(file_path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            data = load_toml_file(path)
        elif suffix in (".yaml", ".yml"):
            data = load_yaml_file(path)
        elif suffix == ".json":
            data = load_json_file(path)
        else:
            raise ValueError(f"Unsupported config file format: {suffix or path.name}")
    except (tomllib.TOMLDecodeError, yaml.YAMLError, json.JSONDecodeError) as e:
        raise ValueError(f"Failed to parse {path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return data


def format_cell(value: Any, digits: int = 17) -> str:
    """CSV cell text: floats with fixed digits, None as an empty cell"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value, digits)
    return str(value)


def write_metrics_csv(
    file_path: PathLike,
    rows: Iterable[Dict[str, Any]],
    columns: Sequence[str],
    digits: int = 17,
) -> None:
    """
    Write rows of metrics as CSV

    Args:
        file_path: Destination file
        rows: Mappings keyed by column name
        columns: Column order
        digits: Significant digits of floats
    """
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(c), digits) for c in columns])


def read_metrics_csv(file_path: PathLike) -> List[Dict[str, Optional[float]]]:
    """
    Read a metrics CSV written by ``write_metrics_csv``

    Returns:
        Rows with empty cells as None and other cells as floats
    """
    with open(file_path, "r", newline="", encoding="utf-8") as f:
        return [
            {k: (float(v) if v != "" else None) for k, v in row.items()}
            for row in csv.DictReader(f)
        ]
