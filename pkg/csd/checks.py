# csd/checks.py
"""Invariant checker for finished allocations. Returns violations as readable strings."""
from __future__ import annotations

import logging
from itertools import combinations
from typing import List

import numpy as np

from csd.allocator import Allocation

logger = logging.getLogger(__name__)

RTOL = 1e-9


def _independent(tx, adj: np.ndarray) -> List[tuple]:
    return [(i, j) for i, j in combinations(sorted(tx), 2) if adj[i, j]]


def check_plan(allocation: Allocation) -> List[str]:
    plan, ctx = allocation.plan, allocation.context
    adj = ctx.relations.due_adjacency
    cue_nb = ctx.relations.cue_neighbor
    cfg = ctx.config
    out: List[str] = []

    # shared region
    if np.any(plan.shared_owner < 0):
        out.append(f"shared RBs without owner: {np.flatnonzero(plan.shared_owner < 0).tolist()}")
    for z, block in enumerate(plan.cue_blocks):
        cliques = ctx.cliques.shared[z]
        for rb in block:
            tx = plan.shared_tx[rb]
            for i, j in _independent(tx, adj):
                out.append(f"shared RB {rb}: adjacent pairs {i} and {j} both transmit")
            for j in sorted(tx):
                if cue_nb[z, j]:
                    out.append(f"shared RB {rb}: pair {j} is a neighbor of CUE {z}")
                expected = ctx.powers.p_due_shared[j]
                if not np.isclose(plan.shared_power[j, rb], expected, rtol=RTOL, atol=0.0):
                    out.append(f"shared RB {rb}: pair {j} power {plan.shared_power[j, rb]:.3e} W != {expected:.3e} W")
                # CUE protection: each reuser lands at most NI_eNB / tau_DUE at the eNB
                at_enb = ctx.scenario.gain_due_enb[j] * plan.shared_power[j, rb]
                if at_enb > ctx.noise.ni_enb / cfg.tau_due * (1.0 + RTOL):
                    out.append(f"shared RB {rb}: pair {j} exceeds the eNB interference limit")
            for clique in cliques:
                if len(tx.intersection(clique)) > 1:
                    out.append(f"shared RB {rb}: clique {clique} has several transmitters")

    # dedicated region
    if plan.quotas:
        total = sum(plan.quotas)
        expected_total = cfg.n_d if sum(ctx.cliques.nmc_dedicated) > 0 else 0
        if total != expected_total:
            out.append(f"dedicated quotas sum to {total}, expected {expected_total}")
    for z, block in enumerate(plan.pair_blocks):
        cliques = ctx.cliques.dedicated[z]
        for rb in block:
            tx = plan.dedicated_tx[rb]
            if z not in tx:
                out.append(f"dedicated RB {rb}: owner {z} does not transmit")
            for i, j in _independent(tx, adj):
                out.append(f"dedicated RB {rb}: adjacent pairs {i} and {j} both transmit")
            for j in sorted(tx):
                if not np.isclose(plan.dedicated_power[j, rb], ctx.powers.p_due_dedicated, rtol=RTOL, atol=0.0):
                    out.append(f"dedicated RB {rb}: pair {j} power differs from the dedicated power")
            for clique in cliques:
                if len(tx.intersection(clique)) > 1:
                    out.append(f"dedicated RB {rb}: clique {clique} has several transmitters")

    # silent pairs carry no power
    for name, tx_list, power in (("shared", plan.shared_tx, plan.shared_power),
                                 ("dedicated", plan.dedicated_tx, plan.dedicated_power)):
        for rb, tx in enumerate(tx_list):
            silent = [j for j in range(plan.num_pairs) if j not in tx and power[j, rb] != 0.0]
            if silent:
                out.append(f"{name} RB {rb}: silent pairs {silent} have power")

    report = allocation.report
    if not np.isclose(report.c_sum, report.c_shared + report.c_dedicated):
        out.append("c_sum != c_shared + c_dedicated")
    if not np.isclose(sum(report.per_pair), report.c_sum):
        out.append("per-pair capacities do not sum to c_sum")

    if out:
        logger.warning(f"[checks] drop {ctx.scenario.drop_index}: {len(out)} violation(s)")
    return out
