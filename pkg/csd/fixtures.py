# csd/fixtures.py
"""Checked-in golden drops with hand-set gains and neighbor relations."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict

import numpy as np

from csd.config import FIXTURES, TABLE1_SCENARIO, ConfigError
from csd.igraph import NeighborRelations
from csd.scenario import Scenario, SimConfig
from utils.storageClient import load_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Fixture:
    key: str
    name: str
    config: SimConfig
    scenario: Scenario
    relations: NeighborRelations
    expected: Dict[str, Any] = field(default_factory=dict)


def _resolve_fixture(rel_path: str) -> Path | None:
    """Try several locations to find a fixture file on disk."""
    rel = Path(rel_path)
    here = Path(__file__).resolve().parent
    for p in (Path.cwd() / rel, here / rel, here.parent / rel):
        if p.is_file():
            return p
    return None


def _linear(db) -> np.ndarray:
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def load_fixture(key: str) -> Fixture:
    meta = FIXTURES.get(key)
    if meta is None:
        raise ConfigError("fixture", f"unknown fixture '{key}' (known: {', '.join(sorted(FIXTURES))})")
    path = _resolve_fixture(meta["path"])
    data = load_file(str(path)) if path else None
    if not data:
        raise OSError(f"fixture file not found or unreadable: {meta['path']}")

    config = SimConfig(**{**TABLE1_SCENARIO, **data["scenario"]}).validate()
    pos, g = data["positions"], data["gains_db"]
    scenario = Scenario(
        enb_pos=np.asarray(pos["enb"], dtype=float),
        cue_pos=np.asarray(pos["cues"], dtype=float),
        pair_tx=np.asarray(pos["pair_tx"], dtype=float),
        pair_rx=np.asarray(pos["pair_rx"], dtype=float),
        gain_cue_enb=_linear(g["cue_enb"]),
        gain_due_enb=_linear(g["due_enb"]),
        gain_txj_rxj=_linear(g["direct"]),
        gain_txi_rxj=_linear(g["txi_rxj"]),
        gain_cue_rxj=_linear(g["cue_rxj"]),
        labels={"fixture": key},
    )

    D = scenario.num_pairs
    adjacency = np.zeros((D, D), dtype=bool)
    for i, j in data["relations"]["due_edges"]:
        adjacency[i, j] = adjacency[j, i] = True
    relations = NeighborRelations(
        cue_neighbor=np.asarray(data["relations"]["cue_neighbor"], dtype=bool),
        due_adjacency=adjacency,
    ).validate()

    logger.debug(f"[fixture] loaded '{key}' from {path}")
    return Fixture(key=key, name=data.get("name", meta["name"]), config=config,
                   scenario=scenario, relations=relations, expected=data.get("expected", {}))
