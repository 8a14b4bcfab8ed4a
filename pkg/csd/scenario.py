# csd/scenario.py
"""
Random drops: node placement, D2D pairing and the linear channel-gain matrices.

Gains are deterministic (path loss only) and frequency-flat, so one value per
link covers every RB of a drop.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from hashlib import blake2b
from typing import Any, Dict

import numpy as np

from csd.config import (
    CELLULAR_PL_A,
    CELLULAR_PL_B,
    D2D_PL_A,
    D2D_PL_B,
    MIN_DISTANCE_M,
    P_MAX_DBM,
    RB_BANDWIDTH_HZ,
    RB_SYMBOLS,
    SE_CAP_BITS,
    ConfigError,
)

logger = logging.getLogger(__name__)


class LinkKind(str, Enum):
    CELLULAR = "cellular"  # UE <-> eNB
    D2D = "d2d"            # UE <-> UE


@dataclass(frozen=True)
class SimConfig:
    area_side_m: float = 500.0
    num_cues: int = 20
    num_pairs: int = 25
    max_pair_dist_m: float = 200.0
    carrier_ghz: float = 2.0
    bandwidth_mhz: float = 20.0
    rb_total: int = 2000
    overhead_fraction: float = 0.25
    n_s: int = 750
    n_d: int = 750
    pt_cue_dbm: float = 10.0
    pt_due_dedicated_dbm: float = 10.0
    tau_due: float = 10.0
    tau_n_db: float = 0.0
    gamma_min_db: float = -9.478
    noise_psd_dbm_hz: float = -174.0
    drops: int = 200
    rng_seed: int = 1
    p_max_dbm: float = P_MAX_DBM
    rb_bandwidth_hz: float = RB_BANDWIDTH_HZ
    rb_symbols: int = RB_SYMBOLS
    se_cap_bits: float = SE_CAP_BITS
    min_distance_m: float = MIN_DISTANCE_M
    cellular_pl_a: float = CELLULAR_PL_A
    cellular_pl_b: float = CELLULAR_PL_B
    d2d_pl_a: float = D2D_PL_A
    d2d_pl_b: float = D2D_PL_B

    def validate(self) -> "SimConfig":
        """Raise ConfigError on the first violated invariant; returns self."""
        for name in ("num_cues", "rb_total", "drops", "rb_symbols"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"scenario.{name}", "must be > 0")
        for name in ("num_pairs", "n_s", "n_d"):
            if getattr(self, name) < 0:
                raise ConfigError(f"scenario.{name}", "must be >= 0")
        for name in ("area_side_m", "max_pair_dist_m", "tau_due", "rb_bandwidth_hz",
                     "se_cap_bits", "min_distance_m", "carrier_ghz", "bandwidth_mhz"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"scenario.{name}", "must be > 0")
        if not 0.0 <= self.overhead_fraction < 1.0:
            raise ConfigError("scenario.overhead_fraction", "must be in [0, 1)")
        if self.max_pair_dist_m > self.area_side_m:
            raise ConfigError("scenario.max_pair_dist_m", "must not exceed area_side_m")
        usable = self.rb_total * (1.0 - self.overhead_fraction)
        if abs((self.n_s + self.n_d) - usable) > 1e-9:
            raise ConfigError(
                "scenario.n_s",
                f"n_s + n_d = {self.n_s + self.n_d} but rb_total*(1-overhead) = {usable:g}",
            )
        return self

    def with_overrides(self, **changes: Any) -> "SimConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    One Monte-Carlo drop. Index conventions:
      gain_txi_rxj[i, j]  DUE-T of pair i -> DUE-R of pair j (diagonal = direct link)
      gain_cue_rxj[c, j]  CUE c -> DUE-R of pair j
    """
    enb_pos: np.ndarray
    cue_pos: np.ndarray
    pair_tx: np.ndarray
    pair_rx: np.ndarray
    gain_cue_enb: np.ndarray
    gain_due_enb: np.ndarray
    gain_txj_rxj: np.ndarray
    gain_txi_rxj: np.ndarray
    gain_cue_rxj: np.ndarray
    drop_index: int = 0
    labels: Dict[str, Any] = field(default_factory=dict)

    @property
    def num_cues(self) -> int:
        return int(self.cue_pos.shape[0])

    @property
    def num_pairs(self) -> int:
        return int(self.pair_tx.shape[0])

    @property
    def pair_pos(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.pair_tx, self.pair_rx))

    def pair_distances(self) -> np.ndarray:
        return np.linalg.norm(self.pair_tx - self.pair_rx, axis=1)

    def same_as(self, other: "Scenario") -> bool:
        """Bit-for-bit equality of every array."""
        names = ("enb_pos", "cue_pos", "pair_tx", "pair_rx", "gain_cue_enb", "gain_due_enb",
                 "gain_txj_rxj", "gain_txi_rxj", "gain_cue_rxj")
        return all(
            getattr(self, n).shape == getattr(other, n).shape
            and getattr(self, n).tobytes() == getattr(other, n).tobytes()
            for n in names
        )


# -----------------------------------------------------------------------------
# Seeding
# -----------------------------------------------------------------------------
def stable_seed(*parts: Any) -> int:
    """64-bit seed from a blake2b digest of the parts (stable across runs and platforms)."""
    text = "|".join(str(p) for p in parts)
    h = blake2b(text.encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "big")


# -----------------------------------------------------------------------------
# Path loss and gains
# -----------------------------------------------------------------------------
def path_loss_db(link_kind: LinkKind | str, distance_m, config: SimConfig | None = None):
    """
    cellular: A + B*log10(d_km) with 128.1/37.6; d2d: 148/40.
    Distances below min_distance_m are clamped. Accepts scalars or arrays.
    """
    cfg = config or SimConfig()
    kind = LinkKind(link_kind)
    d_m = np.maximum(np.asarray(distance_m, dtype=float), cfg.min_distance_m)
    if kind is LinkKind.CELLULAR:
        a, b = cfg.cellular_pl_a, cfg.cellular_pl_b
    else:
        a, b = cfg.d2d_pl_a, cfg.d2d_pl_b
    pl = a + b * np.log10(d_m / 1000.0)
    return float(pl) if pl.ndim == 0 else pl


def _gain(kind: LinkKind, dist: np.ndarray, config: SimConfig) -> np.ndarray:
    # Gains stay in (0, 1]: very short links cannot amplify
    return np.minimum(10.0 ** (-np.asarray(path_loss_db(kind, dist, config)) / 10.0), 1.0)


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a_i - b_j| as an (len(a), len(b)) matrix."""
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)


def compute_gains(
    config: SimConfig,
    enb_pos: np.ndarray,
    cue_pos: np.ndarray,
    pair_tx: np.ndarray,
    pair_rx: np.ndarray,
) -> Dict[str, np.ndarray]:
    """Linear gains g = 10^(-PL/10) for every link of the drop."""
    enb = np.asarray(enb_pos, dtype=float).reshape(1, 2)
    return {
        "gain_cue_enb": _gain(LinkKind.CELLULAR, _pairwise(cue_pos, enb)[:, 0], config),
        "gain_due_enb": _gain(LinkKind.CELLULAR, _pairwise(pair_tx, enb)[:, 0], config),
        "gain_txj_rxj": _gain(LinkKind.D2D, np.linalg.norm(pair_tx - pair_rx, axis=1), config),
        "gain_txi_rxj": _gain(LinkKind.D2D, _pairwise(pair_tx, pair_rx), config),
        "gain_cue_rxj": _gain(LinkKind.D2D, _pairwise(cue_pos, pair_rx), config),
    }


# -----------------------------------------------------------------------------
# Placement
# -----------------------------------------------------------------------------
def _place_receivers(rng: np.random.Generator, tx: np.ndarray, radius: float, side: float) -> np.ndarray:
    """Uniform point in the disk around each Tx, redrawn until it lies inside the area."""
    rx = np.empty_like(tx)
    for k, (x, y) in enumerate(tx):
        while True:
            r = radius * np.sqrt(rng.random())
            theta = 2.0 * np.pi * rng.random()
            cx, cy = x + r * np.cos(theta), y + r * np.sin(theta)
            if 0.0 <= cx <= side and 0.0 <= cy <= side:
                rx[k] = (cx, cy)
                break
    return rx


def generate_drop(config: SimConfig, drop_index: int) -> Scenario:
    """
    Uniform CUE and DUE-T placement over the square area, DUE-R uniform within
    max_pair_dist_m of its DUE-T. Same (rng_seed, drop_index) -> same Scenario.
    """
    rng = np.random.default_rng(stable_seed(config.rng_seed, drop_index))
    side = float(config.area_side_m)
    enb = np.array([side / 2.0, side / 2.0])
    cues = rng.uniform(0.0, side, size=(config.num_cues, 2))
    tx = rng.uniform(0.0, side, size=(config.num_pairs, 2))
    rx = _place_receivers(rng, tx, float(config.max_pair_dist_m), side)

    gains = compute_gains(config, enb, cues, tx, rx)
    logger.debug(
        f"[drop {drop_index}] placed {config.num_cues} CUEs and {config.num_pairs} pairs "
        f"(seed={config.rng_seed})"
    )
    return Scenario(enb_pos=enb, cue_pos=cues, pair_tx=tx, pair_rx=rx, drop_index=drop_index, **gains)
