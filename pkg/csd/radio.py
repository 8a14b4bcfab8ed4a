# csd/radio.py
"""
Link budget: noise floor, shared-region DUE power restriction, the eNB / shared /
dedicated SINR expressions and the per-RB transmission efficiency.

All powers here are linear watts per RB.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np

from csd.scenario import Scenario, SimConfig

if TYPE_CHECKING:  # pragma: no cover
    from csd.allocator import AllocationPlan

logger = logging.getLogger(__name__)


class PlanError(ValueError):
    """A SINR query does not match the allocation plan (wrong owner / not transmitting)."""


# -----------------------------------------------------------------------------
# Unit helpers
# -----------------------------------------------------------------------------
def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def dbm_to_watt(dbm) -> float:
    return float(10.0 ** (float(dbm) / 10.0) / 1000.0)


def watt_to_dbm(w) -> float:
    return float(10.0 * np.log10(float(w) * 1000.0)) if w > 0 else float("-inf")


# -----------------------------------------------------------------------------
# Models
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class NoiseModel:
    ni_per_rb: float
    ni_enb: float
    ni_rx: np.ndarray  # one entry per DUE-R

    def __post_init__(self):
        if not self.ni_per_rb > 0:
            raise ValueError("ni_per_rb must be > 0")


@dataclass(frozen=True)
class PowerProfile:
    p_cue: float
    p_due_dedicated: float
    p_due_shared: np.ndarray  # restricted, one entry per pair
    p_max: float


def noise_per_rb(noise_psd_dbm_hz: float, rb_bandwidth_hz: float) -> float:
    """Thermal noise over one RB in watts."""
    if rb_bandwidth_hz <= 0:
        raise ValueError("rb_bandwidth_hz must be > 0")
    return 10.0 ** ((noise_psd_dbm_hz + 10.0 * np.log10(rb_bandwidth_hz)) / 10.0) / 1000.0


def restricted_shared_power(gain_to_enb, ni_enb: float, tau_due: float, p_max: float):
    """
    Shared-region DUE-T power so that its signal at the eNB is ni_enb / tau_due,
    never above p_max. Vectorizes over gain_to_enb.
    """
    g = np.asarray(gain_to_enb, dtype=float)
    p = np.minimum(p_max, ni_enb / (tau_due * g))
    return float(p) if p.ndim == 0 else p


def build_noise(config: SimConfig, scenario: Scenario) -> NoiseModel:
    # single cell: no adjacent-cell interference on top of thermal noise
    ni = noise_per_rb(config.noise_psd_dbm_hz, config.rb_bandwidth_hz)
    return NoiseModel(ni_per_rb=ni, ni_enb=ni, ni_rx=np.full(scenario.num_pairs, ni))


def build_powers(config: SimConfig, scenario: Scenario, noise: NoiseModel) -> PowerProfile:
    p_max = dbm_to_watt(config.p_max_dbm)
    shared = restricted_shared_power(scenario.gain_due_enb, noise.ni_enb, config.tau_due, p_max)
    return PowerProfile(
        p_cue=dbm_to_watt(config.pt_cue_dbm),
        p_due_dedicated=dbm_to_watt(config.pt_due_dedicated_dbm),
        p_due_shared=np.atleast_1d(np.asarray(shared, dtype=float)),
        p_max=p_max,
    )


# -----------------------------------------------------------------------------
# Transmission efficiency
# -----------------------------------------------------------------------------
def efficiency(sinr, gamma_min_db: float = -9.478, rb_symbols: int = 168, se_cap_bits: float = 6.0):
    """Bits per RB: zero below gamma_min, else capped Shannon over rb_symbols."""
    s = np.asarray(sinr, dtype=float)
    bits = rb_symbols * np.minimum(np.log2(1.0 + np.maximum(s, 0.0)), se_cap_bits)
    out = np.where(s < db_to_linear(gamma_min_db), 0.0, bits)
    return float(out) if out.ndim == 0 else out


def config_efficiency(config: SimConfig):
    """efficiency() bound to a config's threshold and RB shape."""
    def gamma(sinr):
        return efficiency(sinr, config.gamma_min_db, config.rb_symbols, config.se_cap_bits)
    return gamma


# -----------------------------------------------------------------------------
# Selection SINRs (evaluated before the final interference pattern exists)
# -----------------------------------------------------------------------------
def shared_selection_sinr(scenario: Scenario, powers: PowerProfile, noise: NoiseModel) -> np.ndarray:
    """C x D: pair j reusing CUE c's RBs alone (CUE + noise only)."""
    signal = scenario.gain_txj_rxj * powers.p_due_shared
    return signal[None, :] / (noise.ni_rx[None, :] + scenario.gain_cue_rxj * powers.p_cue)


def dedicated_selection_sinr(scenario: Scenario, powers: PowerProfile, noise: NoiseModel) -> np.ndarray:
    """D x D [owner z, member j]: j on z's default RBs with only z interfering; diagonal = z alone."""
    p = powers.p_due_dedicated
    signal = scenario.gain_txj_rxj * p
    interf = scenario.gain_txi_rxj * p
    np.fill_diagonal(interf, 0.0)
    return signal[None, :] / (noise.ni_rx[None, :] + interf)


# -----------------------------------------------------------------------------
# Block SINR: every transmitter of one RB at once
# -----------------------------------------------------------------------------
def block_sinr(
    scenario: Scenario,
    noise: NoiseModel,
    transmitters: Iterable[int],
    tx_power: np.ndarray,
    cue: int | None = None,
    p_cue: float = 0.0,
) -> dict[int, float]:
    """
    SINR at each transmitting pair's DUE-R on one RB.
    tx_power is indexed by pair id; cue=None means no CUE on the RB (dedicated region).
    """
    ids = np.array(sorted(transmitters), dtype=int)
    if ids.size == 0:
        return {}
    p = tx_power[ids]
    signal = scenario.gain_txj_rxj[ids] * p
    cross = scenario.gain_txi_rxj[np.ix_(ids, ids)] * p[:, None]
    np.fill_diagonal(cross, 0.0)
    interf = cross.sum(axis=0)
    denom = noise.ni_rx[ids] + interf
    if cue is not None:
        denom = denom + scenario.gain_cue_rxj[cue, ids] * p_cue
    return {int(j): float(s) for j, s in zip(ids, signal / denom)}


def sinr_enb(cue: int, rb: int, plan: "AllocationPlan", scenario: Scenario,
             powers: PowerProfile, noise: NoiseModel) -> float:
    """SINR of the owning CUE at the eNB on shared RB rb."""
    if int(plan.shared_owner[rb]) != cue:
        raise PlanError(f"shared RB {rb} is owned by CUE {int(plan.shared_owner[rb])}, not {cue}")
    tx = sorted(plan.shared_tx[rb])
    interf = float(np.sum(scenario.gain_due_enb[tx] * plan.shared_power[tx, rb])) if tx else 0.0
    return float(scenario.gain_cue_enb[cue] * powers.p_cue / (noise.ni_enb + interf))


def sinr_shared(j: int, rb: int, plan: "AllocationPlan", scenario: Scenario,
                powers: PowerProfile, noise: NoiseModel) -> float:
    """SINR at pair j's DUE-R on shared RB rb (co-reusers + owning CUE interfere)."""
    tx = plan.shared_tx[rb]
    if j not in tx:
        raise PlanError(f"pair {j} does not transmit on shared RB {rb}")
    owner = int(plan.shared_owner[rb])
    return block_sinr(scenario, noise, tx, plan.shared_power[:, rb], cue=owner, p_cue=powers.p_cue)[j]


def sinr_dedicated(j: int, rb: int, plan: "AllocationPlan", scenario: Scenario,
                   powers: PowerProfile, noise: NoiseModel) -> float:
    """SINR at pair j's DUE-R on dedicated RB rb (co-channel pairs only)."""
    tx = plan.dedicated_tx[rb]
    if j not in tx:
        raise PlanError(f"pair {j} does not transmit on dedicated RB {rb}")
    return block_sinr(scenario, noise, tx, plan.dedicated_power[:, rb])[j]
