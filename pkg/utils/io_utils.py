"""

This module will contain functions pertaining to loading configurations and reading or
writing the JSON and CSV documents exchanged by the toolkit.
"""
import functools
import json
import pathlib
import sys
from typing import IO, Any

import pandas as pd
import yaml

# packaged configuration shipped next to this module
DEFAULT_CONFIG_PATH = pathlib.Path(__file__).parent / "config.yaml"

# sections read through `config_value`; a replacement file must carry all of them
REQUIRED_SECTIONS = (
    "general_configs",
    "gowers_configs",
    "search_configs",
    "symmetrize_configs",
    "hyperplane_configs",
    "verify_configs",
)


def load_config(fpath: str | pathlib.Path, sections: tuple[str, ...] = ()) -> dict:
    """Loads a configuration file made of `*_configs` sections.

    Parameters
    ----------
    fpath : str | pathlib.Path
        Path to the YAML configuration file.
    sections : tuple[str, ...], optional
        Sections the caller needs; a missing one raises ValueError.

    Returns
    -------
    dict
        Mapping of section name to that section's key/value pairs.
    """
    if not isinstance(fpath, (str, pathlib.Path)):
        raise TypeError("'fpath' must be a string or pathlib.Path object")
    fpath = pathlib.Path(fpath).resolve(strict=True)

    with open(fpath) as content:
        configs = yaml.safe_load(content)

    if not isinstance(configs, dict):
        raise ValueError(f"Invalid config file: {fpath}. Expected a mapping of *_configs sections.")
    for name, section in configs.items():
        if not str(name).endswith("_configs") or not isinstance(section, dict):
            raise ValueError(
                f"Invalid config section: {name}. Sections must be mappings named '*_configs'."
            )
    missing = [name for name in sections if name not in configs]
    if missing:
        raise ValueError(f"Config file {fpath} is missing sections: {missing}")
    return configs


@functools.lru_cache(maxsize=None)
def _cached_config(fpath: str) -> dict:
    return load_config(fpath, sections=REQUIRED_SECTIONS)


# path selected with `use_config`; None means the packaged configuration
_active_config_path: pathlib.Path | None = None


def use_config(fpath: str | pathlib.Path | None) -> None:
    """Selects the configuration file returned by `load_default_configs`.

    Parameters
    ----------
    fpath : str | pathlib.Path | None
        Path to a configuration file, or None to go back to the packaged one.
    """
    global _active_config_path
    if fpath is not None and not isinstance(fpath, (str, pathlib.Path)):
        raise TypeError("'fpath' must be a string, pathlib.Path object or None")

    if fpath is None:
        _active_config_path = None
        return
    path = pathlib.Path(fpath).resolve(strict=True)
    _cached_config(str(path))
    _active_config_path = path


def load_default_configs() -> dict:
    """Returns the active configuration (packaged `config.yaml` unless replaced)."""
    path = _active_config_path or DEFAULT_CONFIG_PATH
    return _cached_config(str(path))


def config_value(section: str, key: str) -> Any:
    """Reads a single value from the active configuration.

    Parameters
    ----------
    section : str
        Name of the `*_configs` section, e.g. "search_configs".
    key : str
        Key inside the section.

    Returns
    -------
    Any
        The configured value.
    """
    return load_default_configs()[section][key]


def load_json_input(value: str | pathlib.Path) -> Any:
    """Loads a JSON document given either inline or as a path to a file.

    The CLI accepts both forms for every document flag; a string that names an existing
    file is read from disk, anything else is parsed as a JSON literal.

    Parameters
    ----------
    value : str | pathlib.Path
        Inline JSON text or a path to a JSON file.

    Returns
    -------
    Any
        The decoded document.
    """
    if isinstance(value, pathlib.Path):
        return json.loads(value.resolve(strict=True).read_text())
    if not isinstance(value, str):
        raise TypeError("'value' must be a string or pathlib.Path object")

    stripped = value.strip()
    if not stripped.startswith(("{", "[")):
        candidate = pathlib.Path(stripped)
        if candidate.is_file():
            return json.loads(candidate.read_text())
    return json.loads(stripped)


def dumps_compact(document: Any) -> str:
    """Serializes with the compact separators used by the polynomial format."""
    return json.dumps(document, separators=(",", ":"))


def report_frame(report: dict | list[dict] | pd.DataFrame) -> pd.DataFrame:
    """Turns a report into a table; nested values are JSON-encoded into their cell."""
    if isinstance(report, pd.DataFrame):
        return report
    rows = report if isinstance(report, list) else [report]
    flat_rows = [
        {
            key: (dumps_compact(val) if isinstance(val, (dict, list)) else val)
            for key, val in row.items()
        }
        for row in rows
    ]
    return pd.DataFrame(flat_rows)


def write_report(
    report: dict | list[dict] | pd.DataFrame,
    fmt: str = "json",
    stream: IO[str] | None = None,
) -> None:
    """Writes exactly one report document on the given stream.

    Parameters
    ----------
    report : dict | list[dict] | pd.DataFrame
        Report to emit. DataFrames are converted to a list of records for JSON.
    fmt : str, optional
        Either "json" or "csv", by default "json".
    stream : IO[str] | None, optional
        Output stream, by default standard output.
    """
    if fmt not in ("json", "csv"):
        raise ValueError(f"Invalid format: {fmt}. Choose either 'json' or 'csv'.")
    stream = stream if stream is not None else sys.stdout

    if fmt == "csv":
        report_frame(report).to_csv(stream, index=False)
        return

    if isinstance(report, pd.DataFrame):
        report = report.to_dict(orient="records")
    stream.write(json.dumps(report))
    stream.write("\n")
