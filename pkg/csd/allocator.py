# csd/allocator.py
"""
Combined shared/dedicated (CSD) allocation and the Max S/D baseline.

CSD steps:
  1. split the shared region into contiguous per-CUE blocks
  2. CUE/DUE neighbor relations
  3. maximal cliques of every shared subgraph
  4. shared RBs: per-clique winners by transmission efficiency
  5. default dedicated quotas proportional to the dedicated clique counts
  6. dedicated subgraphs (who may reuse whose default RBs)
  7. dedicated RBs: owner plus per-clique winners

Gains are frequency-flat, so every RB of one owner's block carries the same
transmitter set; selection and capacity work per block.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from csd.igraph import (
    Clique,
    CliqueSet,
    NeighborRelations,
    SubgraphSet,
    build_relations,
    build_subgraphs,
    enumerate_cliques,
    maximal_cliques,
)
from csd.radio import (
    NoiseModel,
    PowerProfile,
    block_sinr,
    build_noise,
    build_powers,
    config_efficiency,
    dedicated_selection_sinr,
    shared_selection_sinr,
)
from csd.scenario import Scenario, SimConfig

logger = logging.getLogger(__name__)

UNASSIGNED = -1
MODE_ROUNDS = 6  # Max S/D mode-split iterations


class Scheme(str, Enum):
    CSD = "CSD"
    MAX_SD = "MaxSD"


# -----------------------------------------------------------------------------
# Types
# -----------------------------------------------------------------------------
@dataclass
class AllocationPlan:
    """
    Per-RB assignment. Shared RBs are indexed 0..n_s-1, dedicated RBs 0..n_d-1.
    Power arrays are (num_pairs, n_rb) and hold 0 where a pair is silent.
    """
    num_pairs: int
    cue_blocks: List[range]
    shared_owner: np.ndarray
    shared_tx: List[frozenset]
    shared_power: np.ndarray
    dedicated_owner: np.ndarray
    dedicated_tx: List[frozenset]
    dedicated_power: np.ndarray
    quotas: List[int] = field(default_factory=list)
    pair_blocks: List[range] = field(default_factory=list)

    @classmethod
    def empty(cls, num_pairs: int, n_s: int, n_d: int) -> "AllocationPlan":
        return cls(
            num_pairs=num_pairs,
            cue_blocks=[],
            shared_owner=np.full(n_s, UNASSIGNED, dtype=int),
            shared_tx=[frozenset()] * n_s,
            shared_power=np.zeros((num_pairs, n_s)),
            dedicated_owner=np.full(n_d, UNASSIGNED, dtype=int),
            dedicated_tx=[frozenset()] * n_d,
            dedicated_power=np.zeros((num_pairs, n_d)),
        )

    @property
    def n_s(self) -> int:
        return len(self.shared_tx)

    @property
    def n_d(self) -> int:
        return len(self.dedicated_tx)


@dataclass(frozen=True)
class CapacityReport:
    c_shared: float
    c_dedicated: float
    c_sum: float
    per_pair: Tuple[float, ...]
    shared_reuse: float = 0.0     # mean transmitters per used shared RB
    dedicated_reuse: float = 0.0  # mean transmitters per used dedicated RB

    @classmethod
    def from_bits(cls, shared_bits: np.ndarray, dedicated_bits: np.ndarray,
                  shared_reuse: float = 0.0, dedicated_reuse: float = 0.0) -> "CapacityReport":
        per_pair = np.asarray(shared_bits, dtype=float) + np.asarray(dedicated_bits, dtype=float)
        c_s = float(np.sum(shared_bits))
        c_d = float(np.sum(dedicated_bits))
        return cls(c_shared=c_s, c_dedicated=c_d, c_sum=c_s + c_d,
                   per_pair=tuple(float(b) for b in per_pair),
                   shared_reuse=shared_reuse, dedicated_reuse=dedicated_reuse)

    @property
    def starved_pairs(self) -> int:
        return sum(1 for b in self.per_pair if b <= 0.0)


@dataclass(frozen=True)
class AllocationContext:
    """Everything steps 2-7 derive from one drop."""
    config: SimConfig
    scenario: Scenario
    noise: NoiseModel
    powers: PowerProfile
    relations: NeighborRelations
    subgraphs: SubgraphSet
    cliques: CliqueSet
    gamma_shared: np.ndarray     # C x D selection efficiency (bits/RB)
    gamma_dedicated: np.ndarray  # D x D [owner, member] selection efficiency


@dataclass
class Allocation:
    scheme: Scheme
    plan: AllocationPlan
    report: CapacityReport
    context: AllocationContext
    shared_mode: Optional[np.ndarray] = None  # Max S/D: True where the pair chose shared


# -----------------------------------------------------------------------------
# Step 1 / 5: RB splits
# -----------------------------------------------------------------------------
def allocate_cue_rbs(n_s: int, num_cues: int) -> List[range]:
    """Contiguous equal split; the first n_s mod C CUEs get one extra RB."""
    if num_cues <= 0:
        raise ValueError("num_cues must be > 0")
    base, extra = divmod(n_s, num_cues)
    blocks, start = [], 0
    for c in range(num_cues):
        size = base + (1 if c < extra else 0)
        blocks.append(range(start, start + size))
        start += size
    return blocks


def default_dedicated_quota(n_d: int, nmc_counts: Sequence[int]) -> List[int]:
    """
    n_d * N_mc[i] / sum(N_mc) with largest-remainder rounding (ties -> lowest id).
    All zeros when n_d == 0 or no pair has a clique.
    """
    counts = [int(c) for c in nmc_counts]
    total = sum(counts)
    if n_d <= 0 or total == 0:
        return [0] * len(counts)
    quotas, remainders = [], []
    for c in counts:
        q, r = divmod(n_d * c, total)
        quotas.append(q)
        remainders.append(r)
    left = n_d - sum(quotas)
    order = sorted(range(len(counts)), key=lambda i: (-remainders[i], i))
    for i in order[:left]:
        quotas[i] += 1
    return quotas


def assign_dedicated_blocks(quotas: Sequence[int]) -> List[range]:
    """Contiguous default RB ranges in pair-id order."""
    blocks, start = [], 0
    for q in quotas:
        blocks.append(range(start, start + q))
        start += q
    return blocks


# -----------------------------------------------------------------------------
# Clique winners
# -----------------------------------------------------------------------------
def _winners(cliques: Sequence[Clique], gamma: np.ndarray, exclude: Optional[int] = None) -> frozenset:
    """
    Per clique, the member with the highest gamma (ties -> lowest id). A pair
    transmits only if it wins every clique it belongs to and has gamma > 0.
    """
    wins: Dict[int, int] = Counter()
    memberships: Dict[int, int] = Counter()
    for clique in cliques:
        members = [j for j in clique if j != exclude]
        if not members:
            continue
        best = max(members, key=lambda j: (gamma[j], -j))
        wins[best] += 1
        for j in members:
            memberships[j] += 1
    return frozenset(j for j, n in memberships.items() if wins[j] == n and gamma[j] > 0.0)


# -----------------------------------------------------------------------------
# Step 4 / 7
# -----------------------------------------------------------------------------
def allocate_shared(plan: AllocationPlan, subgraphs: SubgraphSet, cliques: CliqueSet,
                    efficiencies: np.ndarray, powers: PowerProfile) -> AllocationPlan:
    """Shared RBs of CUE z go to the clique winners of subgraph z at the restricted power."""
    for z, block in enumerate(plan.cue_blocks):
        tx = _winners(cliques.shared[z], efficiencies[z])
        ids = sorted(tx)
        for rb in block:
            plan.shared_tx[rb] = tx
        if ids and len(block):
            plan.shared_power[np.ix_(ids, list(block))] = powers.p_due_shared[ids][:, None]
        logger.debug(f"[shared] CUE {z}: {len(block)} RBs -> pairs {ids}")
    return plan


def allocate_dedicated(plan: AllocationPlan, subgraphs: SubgraphSet, cliques: CliqueSet,
                       efficiencies: np.ndarray, powers: PowerProfile) -> AllocationPlan:
    """Owner always transmits on its default RBs; reusers are the clique winners of its subgraph."""
    for z, block in enumerate(plan.pair_blocks):
        if not len(block):
            continue
        reusers = _winners(cliques.dedicated[z], efficiencies[z], exclude=z)
        tx = frozenset({z}) | reusers
        ids = sorted(tx)
        for rb in block:
            plan.dedicated_owner[rb] = z
            plan.dedicated_tx[rb] = tx
        plan.dedicated_power[np.ix_(ids, list(block))] = powers.p_due_dedicated
        logger.debug(f"[dedicated] pair {z}: {len(block)} RBs -> pairs {ids}")
    return plan


# -----------------------------------------------------------------------------
# Capacity
# -----------------------------------------------------------------------------
def compute_capacity(plan: AllocationPlan, scenario: Scenario, powers: PowerProfile,
                     noise: NoiseModel, config: SimConfig) -> CapacityReport:
    """Bits per pair with the final transmitter sets (full cross-interference)."""
    gamma = config_efficiency(config)
    D = plan.num_pairs
    shared_bits = np.zeros(D)
    dedicated_bits = np.zeros(D)

    shared_groups = Counter((int(plan.shared_owner[rb]), plan.shared_tx[rb])
                            for rb in range(plan.n_s) if plan.shared_tx[rb])
    used_s, tx_s = 0, 0
    for (owner, tx), count in shared_groups.items():
        rb = next(r for r in plan.cue_blocks[owner] if plan.shared_tx[r] == tx)
        sinr = block_sinr(scenario, noise, tx, plan.shared_power[:, rb], cue=owner, p_cue=powers.p_cue)
        for j, s in sinr.items():
            shared_bits[j] += count * gamma(s)
        used_s += count
        tx_s += count * len(tx)

    dedicated_groups = Counter((int(plan.dedicated_owner[rb]), plan.dedicated_tx[rb])
                               for rb in range(plan.n_d) if plan.dedicated_tx[rb])
    used_d, tx_d = 0, 0
    for (owner, tx), count in dedicated_groups.items():
        rb = next(r for r in plan.pair_blocks[owner] if plan.dedicated_tx[r] == tx)
        sinr = block_sinr(scenario, noise, tx, plan.dedicated_power[:, rb])
        for j, s in sinr.items():
            dedicated_bits[j] += count * gamma(s)
        used_d += count
        tx_d += count * len(tx)

    return CapacityReport.from_bits(
        shared_bits,
        dedicated_bits,
        shared_reuse=tx_s / used_s if used_s else 0.0,
        dedicated_reuse=tx_d / used_d if used_d else 0.0,
    )


# -----------------------------------------------------------------------------
# Drivers
# -----------------------------------------------------------------------------
def prepare_context(
    scenario: Scenario,
    config: SimConfig,
    relations: Optional[NeighborRelations] = None,
    shared_pairs: Optional[np.ndarray] = None,
    dedicated_pairs: Optional[np.ndarray] = None,
) -> AllocationContext:
    """Steps 2, 3 and 6: relations (or the supplied ones), subgraphs, cliques, selection efficiencies."""
    noise = build_noise(config, scenario)
    powers = build_powers(config, scenario, noise)
    if relations is None:
        relations = build_relations(scenario, powers, noise, config.gamma_min_db, config.tau_n_db)
    relations.validate()
    subgraphs = build_subgraphs(relations, shared_pairs=shared_pairs, dedicated_pairs=dedicated_pairs)
    cliques = enumerate_cliques(subgraphs)
    gamma = config_efficiency(config)
    return AllocationContext(
        config=config,
        scenario=scenario,
        noise=noise,
        powers=powers,
        relations=relations,
        subgraphs=subgraphs,
        cliques=cliques,
        gamma_shared=np.asarray(gamma(shared_selection_sinr(scenario, powers, noise))).reshape(
            scenario.num_cues, scenario.num_pairs),
        gamma_dedicated=np.asarray(gamma(dedicated_selection_sinr(scenario, powers, noise))).reshape(
            scenario.num_pairs, scenario.num_pairs),
    )


def _allocate(ctx: AllocationContext, quota_counts: Sequence[int]) -> AllocationPlan:
    cfg = ctx.config
    plan = AllocationPlan.empty(ctx.scenario.num_pairs, cfg.n_s, cfg.n_d)
    plan.cue_blocks = allocate_cue_rbs(cfg.n_s, ctx.scenario.num_cues)
    for c, block in enumerate(plan.cue_blocks):
        plan.shared_owner[block.start:block.stop] = c
    if ctx.scenario.num_pairs == 0:
        return plan
    allocate_shared(plan, ctx.subgraphs, ctx.cliques, ctx.gamma_shared, ctx.powers)
    plan.quotas = default_dedicated_quota(cfg.n_d, quota_counts)
    plan.pair_blocks = assign_dedicated_blocks(plan.quotas)
    allocate_dedicated(plan, ctx.subgraphs, ctx.cliques, ctx.gamma_dedicated, ctx.powers)
    return plan


def solve_csd(scenario: Scenario, config: SimConfig,
              relations: Optional[NeighborRelations] = None) -> Allocation:
    ctx = prepare_context(scenario, config, relations)
    if scenario.num_pairs:
        # every pair's own subgraph holds at least the clique {z}
        assert sum(ctx.cliques.nmc_dedicated) > 0, "dedicated subgraphs without cliques"
    plan = _allocate(ctx, ctx.cliques.nmc_dedicated)
    report = compute_capacity(plan, scenario, ctx.powers, ctx.noise, config)
    logger.debug(
        f"[csd] drop {scenario.drop_index}: C_s={report.c_shared:.0f} C_d={report.c_dedicated:.0f} "
        f"bits, reuse s={report.shared_reuse:.2f} d={report.dedicated_reuse:.2f}"
    )
    return Allocation(scheme=Scheme.CSD, plan=plan, report=report, context=ctx)


def run_csd(scenario: Scenario, config: SimConfig,
            relations: Optional[NeighborRelations] = None) -> Tuple[AllocationPlan, CapacityReport]:
    a = solve_csd(scenario, config, relations)
    return a.plan, a.report


def _shared_estimates(ctx: AllocationContext, plan: AllocationPlan) -> np.ndarray:
    """Per-pair bits over the CUE RBs the full CSD selection lets each pair reuse."""
    est = np.zeros(ctx.scenario.num_pairs)
    for z, block in enumerate(plan.cue_blocks):
        if len(block):
            for j in plan.shared_tx[block.start]:
                est[j] += len(block) * ctx.gamma_shared[z, j]
    return est


def _dedicated_estimates(full: AllocationContext, dedicated_mode: np.ndarray) -> np.ndarray:
    """
    Per-pair dedicated bits with the quotas split among `dedicated_mode` pairs only.
    A pair outside the set is scored on the quota it would get by joining it alone.
    """
    cfg, adj = full.config, full.relations.due_adjacency
    ctx = prepare_context(full.scenario, cfg, full.relations, dedicated_pairs=dedicated_mode)
    counts = ctx.cliques.nmc_dedicated
    est = np.zeros(full.scenario.num_pairs)
    for z, block in enumerate(assign_dedicated_blocks(default_dedicated_quota(cfg.n_d, counts))):
        if len(block):
            tx = frozenset({z}) | _winners(ctx.cliques.dedicated[z], ctx.gamma_dedicated[z], exclude=z)
            for j in tx:
                est[j] += len(block) * ctx.gamma_dedicated[z, j]

    total = sum(counts)
    for j in np.flatnonzero(~dedicated_mode):
        members = ~adj[j] & dedicated_mode
        members[j] = True
        verts = [int(v) for v in np.flatnonzero(members)]
        own = len(maximal_cliques(verts, adj[np.ix_(verts, verts)]))
        est[j] = cfg.n_d * own / (total + own) * full.gamma_dedicated[j, j]
    return est


def solve_max_sd(scenario: Scenario, config: SimConfig,
                 relations: Optional[NeighborRelations] = None) -> Allocation:
    """
    Each pair uses either the shared or the dedicated region, whichever the CSD
    machinery estimates gives it more bits (ties -> dedicated). The dedicated
    estimate splits the quotas among dedicated-mode pairs only, so the split is
    iterated until it stops changing. Allocation then runs per region over that
    region's pairs only.
    """
    full = prepare_context(scenario, config, relations)
    D = scenario.num_pairs
    if D == 0:
        plan = _allocate(full, [])
        return Allocation(Scheme.MAX_SD, plan, compute_capacity(plan, scenario, full.powers, full.noise, config),
                          full, shared_mode=np.zeros(0, dtype=bool))

    est_shared = _shared_estimates(full, _allocate(full, full.cliques.nmc_dedicated))
    shared_mode = np.zeros(D, dtype=bool)
    for rounds in range(1, MODE_ROUNDS + 1):
        nxt = est_shared > _dedicated_estimates(full, ~shared_mode)
        if np.array_equal(nxt, shared_mode):
            break
        shared_mode = nxt
    logger.debug(
        f"[maxsd] drop {scenario.drop_index}: {int(shared_mode.sum())}/{D} pairs in shared mode "
        f"after {rounds} round(s)"
    )

    ctx = prepare_context(scenario, config, full.relations,
                          shared_pairs=shared_mode, dedicated_pairs=~shared_mode)
    plan = _allocate(ctx, ctx.cliques.nmc_dedicated)
    report = compute_capacity(plan, scenario, ctx.powers, ctx.noise, config)
    return Allocation(scheme=Scheme.MAX_SD, plan=plan, report=report, context=ctx, shared_mode=shared_mode)


def run_max_sd(scenario: Scenario, config: SimConfig,
               relations: Optional[NeighborRelations] = None) -> Tuple[AllocationPlan, CapacityReport]:
    a = solve_max_sd(scenario, config, relations)
    return a.plan, a.report


SOLVERS = {
    Scheme.CSD: solve_csd,
    Scheme.MAX_SD: solve_max_sd,
}


def solve(scheme: Scheme | str, scenario: Scenario, config: SimConfig,
          relations: Optional[NeighborRelations] = None) -> Allocation:
    return SOLVERS[Scheme(scheme)](scenario, config, relations)
