# commands/inspect.py
"""Human-readable dump of one drop's relations, cliques and allocation plan."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

from csd.allocator import Allocation, Scheme, solve
from csd.checks import check_plan
from csd.fixtures import load_fixture
from csd.radio import watt_to_dbm
from csd.scenario import generate_drop
from utils.settings import ConfigError, load_config

logger = logging.getLogger(__name__)

SCHEME_CHOICES = {"csd": Scheme.CSD, "maxsd": Scheme.MAX_SD}


def _ids(pairs) -> str:
    return "{" + ",".join(str(j + 1) for j in sorted(pairs)) + "}"


def _runs(keys: Sequence) -> List[Tuple[int, int, object]]:
    """Consecutive equal keys as (first, last, key)."""
    out: List[Tuple[int, int, object]] = []
    for i, k in enumerate(keys):
        if out and out[-1][2] == k and out[-1][1] == i - 1:
            out[-1] = (out[-1][0], i, k)
        else:
            out.append((i, i, k))
    return out


def _rb_label(first: int, last: int) -> str:
    return f"RB {first}" if first == last else f"RB {first}-{last}"


def _powers(tx, power_col: np.ndarray) -> str:
    return ", ".join(f"{j + 1}: {watt_to_dbm(power_col[j]):.2f} dBm" for j in sorted(tx))


def format_allocation(a: Allocation) -> List[str]:
    ctx, plan, rep = a.context, a.plan, a.report
    cfg, sc = ctx.config, ctx.scenario
    C, D = sc.num_cues, sc.num_pairs
    lines = [
        f"Drop {sc.drop_index} ({a.scheme.value}): {C} CUEs, {D} pairs, n_s={cfg.n_s}, n_d={cfg.n_d}, "
        f"Pt={cfg.pt_due_dedicated_dbm:.2f} dBm, tau_N={cfg.tau_n_db:.2f} dB",
    ]

    if D:
        lines.append("CUE neighbors (X = pair may not reuse the CUE's RBs):")
        for c in range(C):
            row = " ".join("X" if v else "." for v in ctx.relations.cue_neighbor[c])
            lines.append(f"  CUE {c + 1:>3}: {row}")
        lines.append("DUE adjacency (X = neighbors):")
        for i in range(D):
            row = " ".join("X" if v else "." for v in ctx.relations.due_adjacency[i])
            lines.append(f"  pair {i + 1:>3}: {row}")

        lines.append("Shared subgraphs:")
        for g, cl in zip(ctx.subgraphs.shared, ctx.cliques.shared):
            lines.append(f"  CUE {g.owner + 1}: vertices {_ids(g.vertices)} cliques "
                         + (" ".join(_ids(q) for q in cl) or "-"))
        lines.append("Dedicated subgraphs:")
        for g, cl in zip(ctx.subgraphs.dedicated, ctx.cliques.dedicated):
            lines.append(f"  pair {g.owner + 1}: vertices {_ids(g.vertices)} cliques "
                         + (" ".join(_ids(q) for q in cl) or "-"))
        if a.shared_mode is not None:
            modes = ", ".join(f"{j + 1}: {'shared' if m else 'dedicated'}" for j, m in enumerate(a.shared_mode))
            lines.append(f"Modes: {modes}")
        lines.append("Quotas: " + ", ".join(f"{j + 1}={q}" for j, q in enumerate(plan.quotas)))

    lines.append("Shared region:")
    for first, last, (owner, tx) in _runs(list(zip(plan.shared_owner.tolist(), plan.shared_tx))):
        tail = f"  tx {_ids(tx)}  {_powers(tx, plan.shared_power[:, first])}" if tx else ""
        lines.append(f"  {_rb_label(first, last)}: CUE {owner + 1}{tail}")

    if not D:
        return lines

    lines.append("Dedicated region:")
    for first, last, (owner, tx) in _runs(list(zip(plan.dedicated_owner.tolist(), plan.dedicated_tx))):
        if owner < 0:
            lines.append(f"  {_rb_label(first, last)}: unassigned")
            continue
        lines.append(f"  {_rb_label(first, last)}: pair {owner + 1}  tx {_ids(tx)}  "
                     f"{_powers(tx, plan.dedicated_power[:, first])}")

    lines.append("Capacity per pair (bits): " + ", ".join(f"{j + 1}={b:.0f}" for j, b in enumerate(rep.per_pair)))
    lines.append(f"C_shared={rep.c_shared:.0f}  C_dedicated={rep.c_dedicated:.0f}  C_sum={rep.c_sum:.0f}  "
                 f"reuse s={rep.shared_reuse:.2f} d={rep.dedicated_reuse:.2f}  starved={rep.starved_pairs}")
    return lines


def cmd_inspect(config_file: Optional[str], drop_index: int = 0, fixture: Optional[str] = None,
                scheme: str = "csd", out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        if fixture:
            fx = load_fixture(fixture)
            allocation = solve(SCHEME_CHOICES[scheme], fx.scenario, fx.config, fx.relations)
        else:
            if not config_file:
                raise ConfigError("config", "a config file is required unless --fixture is given")
            spec = load_config(config_file)
            if drop_index < 0:
                raise ConfigError("drop", f"must be >= 0, got {drop_index}")
            # same placement as campaign drop `drop_index` at this pair count
            cfg = spec.drop_config(spec.base.num_pairs)
            allocation = solve(SCHEME_CHOICES[scheme], generate_drop(cfg, drop_index), cfg)
    except ConfigError as e:
        logger.error(f"[inspect] {e}")
        return 2
    except OSError as e:
        logger.error(f"[inspect] {e}")
        return 3

    lines = format_allocation(allocation)
    violations = check_plan(allocation)
    if violations:
        lines.append(f"Invariant check: {len(violations)} violation(s)")
        lines.extend(f"  {v}" for v in violations)
    else:
        lines.append("Invariant check: OK")
    print("\n".join(lines), file=out)
    return 0


def _run(args: argparse.Namespace) -> int:
    return cmd_inspect(args.config, args.drop, fixture=args.fixture, scheme=args.scheme)


def setup(subparsers) -> None:
    p = subparsers.add_parser("inspect", help="Print one drop's neighbor graphs, cliques and allocation.")
    p.add_argument("config", nargs="?", default=None, help="YAML config (not needed with --fixture)")
    p.add_argument("--drop", type=int, default=0, help="drop index (default 0)")
    p.add_argument("--fixture", default=None, help="use a checked-in golden drop instead, e.g. fig1")
    p.add_argument("--scheme", choices=sorted(SCHEME_CHOICES), default="csd")
    p.set_defaults(func=_run)
