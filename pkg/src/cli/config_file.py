"""
INI problem configuration files, validated into a RunConfig.

    [run]
    kind = sl
    E = 70

    [sl]
    hi = 1
    unit = pi
    V = 4 + 4cos(2x)

A preset supplies a base text; keys of a config file override it. Validation
errors come back as ConfigError carrying the line and field of the offending
key (line numbers refer to the file when the key came from it).
"""

import configparser
import re
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError

from src.cli.presets import preset_text
from src.core.errors import ConfigError
from src.core.models import SECTION_FOR_KIND, RunConfig

_SECTION = re.compile(r"^\s*\[(?P<name>[^\]]+)\]\s*$")
_KEY = re.compile(r"^(?P<key>[A-Za-z_]\w*)\s*[=:]")

KNOWN_SECTIONS = {"run"} | set(SECTION_FOR_KIND.values())

LineMap = Dict[Tuple[str, str], int]


def _line_map(text: str) -> LineMap:
    """(section, key) -> line number; (section, '') is the section header"""
    lines: LineMap = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        m = _SECTION.match(raw)
        if m:
            section = m["name"].strip()
            lines[(section, "")] = number
            continue
        m = _KEY.match(raw)
        if m and section is not None:
            lines[(section, m["key"])] = number
    return lines


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case sensitive (E, V)
    return parser


def _read(parser: configparser.ConfigParser, text: str, source: str):
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {source}", line=getattr(exc, "lineno", None),
                          reason=exc.message.splitlines()[0]) from exc


def _locate(loc: Tuple[Any, ...], lines: LineMap) -> Tuple[Optional[int], Optional[str]]:
    parts = [str(p) for p in loc]
    if not parts:
        return lines.get(("run", "kind")), None
    section = parts[0]
    key = parts[1] if len(parts) > 1 else ""
    if section == "partition" and key == "graph" and len(parts) > 2:
        section, key = "graph", parts[2]
    field = f"{section}.{key}" if key else section
    return lines.get((section, key), lines.get((section, ""))), field


def parse_config(text: str, base: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None,
                 source: str = "<config>") -> RunConfig:
    parser = _parser()
    lines: LineMap = {}
    if base is not None:
        _read(parser, base, "<preset>")
    _read(parser, text, source)
    lines.update(_line_map(text))

    unknown = [s for s in parser.sections() if s not in KNOWN_SECTIONS]
    if unknown:
        raise ConfigError(f"unknown section [{unknown[0]}]", line=lines.get((unknown[0], "")), field=unknown[0])
    if not parser.has_section("run"):
        raise ConfigError("missing [run] section", field="run")

    data: Dict[str, Any] = {name: dict(parser[name]) for name in parser.sections()}
    for key, value in (overrides or {}).items():
        if value is not None:
            data["run"][key] = value
    if data["run"].get("kind") == "graph-partition" and "partition" in data:
        data["partition"]["graph"] = data.pop("graph", {})
        if "edges" in data["partition"]["graph"]:
            data["partition"]["graph"].setdefault("edges_line", lines.get(("graph", "edges"), 1))
    elif "graph" in data and "edges" in data["graph"]:
        data["graph"].setdefault("edges_line", lines.get(("graph", "edges"), 1))

    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        line, field = _locate(tuple(first["loc"]), lines)
        raise ConfigError(first["msg"], line=line, field=field) from exc


def load_run_config(path: Optional[str] = None, preset: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """A config file, a preset, or a preset with a file layered on top"""
    if path is None and preset is None:
        raise ConfigError("give a config file or --preset")
    base = preset_text(preset) if preset is not None else None
    if path is None:
        return parse_config(base, overrides=overrides, source=f"<preset {preset}>")
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(file.read_text(), base=base, overrides=overrides, source=str(file))
