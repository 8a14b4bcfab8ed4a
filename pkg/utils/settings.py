# utils/settings.py
"""
Config files: YAML with a `scenario:` section (SimConfig fields) and an optional
`campaign:` section (CampaignSpec fields). A run manifest is accepted too.
"""
from __future__ import annotations

import logging
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from csd.allocator import Scheme
from csd.config import DEFAULT_CAMPAIGN, DEFAULT_SETTINGS, REQUIRED_SCENARIO_KEYS, ConfigError
from csd.scenario import SimConfig
from csd.simkit import CampaignSpec

logger = logging.getLogger(__name__)

__all__ = ["ConfigError", "load_config", "parse_config", "spec_to_dict", "spec_from_dict"]

SECTIONS = ("scenario", "campaign")
_SCENARIO_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _key_lines(text: str) -> Dict[str, int]:
    """1-based line of every `section` and `section.key` in the document."""
    lines: Dict[str, int] = {}
    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if not isinstance(root, yaml.MappingNode):
        return lines
    if any(getattr(k, "value", None) == "spec" for k, _ in root.value):
        root = next(v for k, v in root.value if k.value == "spec")
        if not isinstance(root, yaml.MappingNode):
            return lines
    for key_node, value_node in root.value:
        section = str(key_node.value)
        lines[section] = key_node.start_mark.line + 1
        if isinstance(value_node, yaml.MappingNode):
            for k, _ in value_node.value:
                lines[f"{section}.{k.value}"] = k.start_mark.line + 1
    return lines


def _coerce(field_name: str, value: Any, kind: str, line: Optional[int]) -> Any:
    if isinstance(value, bool) or value is None:
        raise ConfigError(field_name, f"expected {kind}, got {value!r}", line)
    if kind == "int":
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if not isinstance(value, int):
            raise ConfigError(field_name, f"expected an integer, got {value!r}", line)
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(field_name, f"expected a number, got {value!r}", line)
    return float(value)


def _list(field_name: str, value: Any, kind: str, line: Optional[int]) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(field_name, f"expected a list, got {value!r}", line)
    return tuple(_coerce(field_name, v, kind, line) for v in value)


def _parse_scenario(raw: Any, lines: Dict[str, int]) -> SimConfig:
    if not isinstance(raw, dict):
        raise ConfigError("scenario", "section must be a mapping", lines.get("scenario"))
    for key in REQUIRED_SCENARIO_KEYS:
        if key not in raw:
            raise ConfigError(f"scenario.{key}", "missing required key", lines.get("scenario"))
    for key in raw:
        if key not in _SCENARIO_TYPES:
            raise ConfigError(f"scenario.{key}", "unknown key", lines.get(f"scenario.{key}"))

    # backfill optional engineering constants
    data = dict(raw)
    for k, v in DEFAULT_SETTINGS.items():
        data.setdefault(k, v)

    values = {
        k: _coerce(f"scenario.{k}", v, _SCENARIO_TYPES[k], lines.get(f"scenario.{k}"))
        for k, v in data.items()
    }
    config = SimConfig(**values)
    try:
        return config.validate()
    except ConfigError as e:
        raise ConfigError(e.field, e.message, lines.get(e.field)) from None


def _parse_campaign(raw: Any, base: SimConfig, lines: Dict[str, int]) -> CampaignSpec:
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ConfigError("campaign", "section must be a mapping", lines.get("campaign"))
    for key in raw:
        if key not in DEFAULT_CAMPAIGN:
            raise ConfigError(f"campaign.{key}", "unknown key", lines.get(f"campaign.{key}"))
    data = {**DEFAULT_CAMPAIGN, **raw}

    def line(k):
        return lines.get(f"campaign.{k}")

    schemes = []
    for s in data["schemes"] or []:
        try:
            schemes.append(Scheme(s))
        except ValueError:
            known = ", ".join(x.value for x in Scheme)
            raise ConfigError("campaign.schemes", f"unknown scheme '{s}' (known: {known})", line("schemes")) from None

    drops = base.drops if data["drops"] is None else _coerce("campaign.drops", data["drops"], "int", line("drops"))
    spec = CampaignSpec(
        base=base,
        pair_counts=_list("campaign.pair_counts", data["pair_counts"], "int", line("pair_counts")),
        pt_dbm_values=_list("campaign.pt_dbm_values", data["pt_dbm_values"], "float", line("pt_dbm_values")),
        tau_n_values_db=_list("campaign.tau_n_values_db", data["tau_n_values_db"], "float", line("tau_n_values_db")),
        schemes=tuple(schemes),
        drops=drops,
        capacity_tau_n_db=_coerce("campaign.capacity_tau_n_db", data["capacity_tau_n_db"], "float",
                                  line("capacity_tau_n_db")),
        sweep_pair_counts=_list("campaign.sweep_pair_counts", data["sweep_pair_counts"], "int",
                                line("sweep_pair_counts")),
    )
    try:
        return spec.validate()
    except ConfigError as e:
        raise ConfigError(e.field, e.message, lines.get(e.field)) from None


def spec_from_dict(data: Any, lines: Optional[Dict[str, int]] = None) -> CampaignSpec:
    lines = lines or {}
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping with a 'scenario' section", 1)
    if "spec" in data:
        data = data["spec"]
        if not isinstance(data, dict):
            raise ConfigError("spec", "manifest spec must be a mapping", lines.get("spec"))
    for key in data:
        if key not in SECTIONS:
            raise ConfigError(str(key), "unknown section", lines.get(str(key)))
    if "scenario" not in data:
        raise ConfigError("scenario", "missing required section")
    base = _parse_scenario(data["scenario"], lines)
    return _parse_campaign(data.get("campaign"), base, lines)


def parse_config(text: str) -> CampaignSpec:
    try:
        data = yaml.safe_load(text)
        lines = _key_lines(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError("config", f"invalid YAML: {getattr(e, 'problem', None) or e}",
                          mark.line + 1 if mark is not None else None) from None
    return spec_from_dict(data, lines)


def load_config(path: str | Path, drops: Optional[int] = None, seed: Optional[int] = None) -> CampaignSpec:
    """Read and validate a config file; `drops`/`seed` override the file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")  # OSError propagates
    spec = parse_config(text)
    if seed is not None:
        spec = spec.with_overrides(base=spec.base.with_overrides(rng_seed=int(seed)))
    if drops is not None:
        spec = spec.with_overrides(drops=int(drops), base=spec.base.with_overrides(drops=int(drops)))
        spec.validate()
    logger.info(f"[config] loaded {p} (drops={spec.drops}, seed={spec.base.rng_seed})")
    return spec


def spec_to_dict(spec: CampaignSpec) -> Dict[str, Any]:
    return {
        "scenario": spec.base.to_dict(),
        "campaign": {
            "pair_counts": list(spec.pair_counts),
            "pt_dbm_values": list(spec.pt_dbm_values),
            "tau_n_values_db": list(spec.tau_n_values_db),
            "schemes": [Scheme(s).value for s in spec.schemes],
            "drops": spec.drops,
            "capacity_tau_n_db": spec.capacity_tau_n_db,
            "sweep_pair_counts": list(spec.sweep_pair_counts),
        },
    }
