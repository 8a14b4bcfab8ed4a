# csd/simkit.py
"""
Monte-Carlo campaign driver: drops over the (#pairs, Pt, tau_N) grid for every
scheme, aggregated per cell, plus the tau_N grid search.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from csd.allocator import Scheme, solve
from csd.config import THREADS_ENV, ConfigError
from csd.scenario import Scenario, SimConfig, generate_drop, stable_seed

logger = logging.getLogger(__name__)

PROGRESS_LOG_SECS = 5.0

CellKey = Tuple[str, int, float, float]  # (scheme, num_pairs, pt_dbm, tau_n_db)

# -----------------------------------------------------------------------------
# Log throttling
# -----------------------------------------------------------------------------
_last_log_ts: Dict[str, float] = {}


def _should_log(key: str, interval: float) -> bool:
    """Return True if enough time has passed since last log for this key."""
    now = time.monotonic()
    last = _last_log_ts.get(key, 0.0)
    if now - last >= interval:
        _last_log_ts[key] = now
        return True
    return False
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignSpec:
    base: SimConfig
    pair_counts: Tuple[int, ...] = tuple(range(5, 80, 5))
    pt_dbm_values: Tuple[float, ...] = (10.0, 15.0, 20.0)
    tau_n_values_db: Tuple[float, ...] = tuple(float(t) for t in range(-30, 2, 2))
    schemes: Tuple[Scheme, ...] = (Scheme.CSD, Scheme.MAX_SD)
    drops: int = 200
    capacity_tau_n_db: float = 0.0
    sweep_pair_counts: Tuple[int, ...] = (25, 50, 75)

    def validate(self) -> "CampaignSpec":
        self.base.validate()
        for name in ("pair_counts", "pt_dbm_values", "tau_n_values_db", "schemes"):
            if not getattr(self, name):
                raise ConfigError(f"campaign.{name}", "must not be empty")
        if self.drops < 1:
            raise ConfigError("campaign.drops", "must be >= 1")
        for name in ("pair_counts", "sweep_pair_counts"):
            if any(n < 0 for n in getattr(self, name)):
                raise ConfigError(f"campaign.{name}", "pair counts must be >= 0")
        return self

    def with_overrides(self, **changes) -> "CampaignSpec":
        return replace(self, **changes)

    def capacity_cells(self) -> List[Tuple[int, float, float]]:
        return [(n, pt, self.capacity_tau_n_db) for n in self.pair_counts for pt in self.pt_dbm_values]

    def sweep_cells(self) -> List[Tuple[int, float, float]]:
        return [(n, pt, tau) for n in self.sweep_pair_counts
                for pt in self.pt_dbm_values for tau in self.tau_n_values_db]

    def cells(self) -> List[Tuple[int, float, float]]:
        """(num_pairs, pt_dbm, tau_n_db) grid, each cell once."""
        return sorted(set(self.capacity_cells()) | set(self.sweep_cells()))

    def drop_config(self, num_pairs: int) -> SimConfig:
        """Placement config for one pair count; Pt and tau_N cells share its drops."""
        return self.base.with_overrides(num_pairs=num_pairs, rng_seed=stable_seed(self.base.rng_seed, num_pairs))


@dataclass(frozen=True)
class CellStats:
    scheme: str
    num_pairs: int
    pt_dbm: float
    tau_n_db: float
    drops: int
    mean_csum: float
    stderr: float
    mean_cshared: float
    mean_cdedicated: float
    mean_shared_reuse: float = 0.0
    mean_dedicated_reuse: float = 0.0
    mean_starved: float = 0.0

    @property
    def key(self) -> CellKey:
        return (self.scheme, self.num_pairs, self.pt_dbm, self.tau_n_db)


@dataclass
class CampaignResult:
    spec: CampaignSpec
    cells: Dict[CellKey, CellStats] = field(default_factory=dict)
    elapsed_s: float = 0.0

    def get(self, scheme: Scheme | str, num_pairs: int, pt_dbm: float, tau_n_db: float) -> CellStats:
        return self.cells[(Scheme(scheme).value, num_pairs, float(pt_dbm), float(tau_n_db))]

    def rows(self) -> List[CellStats]:
        order = {s.value: k for k, s in enumerate(self.spec.schemes)}
        return sorted(self.cells.values(),
                      key=lambda c: (order.get(c.scheme, 99), c.num_pairs, c.pt_dbm, c.tau_n_db))

    def capacity_rows(self) -> List[CellStats]:
        wanted = set(self.spec.capacity_cells())
        return [c for c in self.rows() if (c.num_pairs, c.pt_dbm, c.tau_n_db) in wanted]

    def sweep_rows(self) -> List[CellStats]:
        wanted = set(self.spec.sweep_cells())
        return [c for c in self.rows() if (c.num_pairs, c.pt_dbm, c.tau_n_db) in wanted]


@dataclass(frozen=True)
class TauCurve:
    scheme: str
    num_pairs: int
    pt_dbm: float
    taus: Tuple[float, ...]
    means: Tuple[float, ...]
    best_tau: float


# -----------------------------------------------------------------------------
# Drop evaluation (runs inside workers)
# -----------------------------------------------------------------------------
DropRecord = Tuple[CellKey, float, float, float, float, float, int]


def evaluate_drop(spec: CampaignSpec, num_pairs: int, drop_index: int,
                  cells: Sequence[Tuple[float, float]]) -> List[DropRecord]:
    """Every scheme on every (Pt, tau_N) cell of one drop; all see the same Scenario."""
    cfg = spec.drop_config(num_pairs)
    scenario: Scenario = generate_drop(cfg, drop_index)
    out: List[DropRecord] = []
    for pt, tau in cells:
        cell_cfg = cfg.with_overrides(pt_cue_dbm=pt, pt_due_dedicated_dbm=pt, tau_n_db=tau)
        for scheme in spec.schemes:
            r = solve(scheme, scenario, cell_cfg).report
            out.append((
                (Scheme(scheme).value, num_pairs, float(pt), float(tau)),
                r.c_shared, r.c_dedicated, r.c_sum, r.shared_reuse, r.dedicated_reuse, r.starved_pairs,
            ))
    return out


def _drop_task(args) -> Tuple[int, int, List[DropRecord]]:
    spec, num_pairs, drop_index, cells = args
    try:
        return num_pairs, drop_index, evaluate_drop(spec, num_pairs, drop_index, cells)
    except Exception:
        logger.error(f"[campaign] drop failed (num_pairs={num_pairs}, drop={drop_index})", exc_info=True)
        raise


# -----------------------------------------------------------------------------
# Aggregation
# -----------------------------------------------------------------------------
def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def _aggregate(records: Iterable[DropRecord]) -> Dict[CellKey, CellStats]:
    grouped: Dict[CellKey, List[DropRecord]] = {}
    for rec in records:
        grouped.setdefault(rec[0], []).append(rec)
    cells: Dict[CellKey, CellStats] = {}
    for key, recs in grouped.items():
        arr = np.array([r[1:] for r in recs], dtype=float)
        c_shared, c_ded, c_sum, s_reuse, d_reuse, starved = arr.T
        cells[key] = CellStats(
            scheme=key[0], num_pairs=key[1], pt_dbm=key[2], tau_n_db=key[3],
            drops=len(recs),
            mean_csum=float(c_sum.mean()),
            stderr=_stderr(c_sum),
            mean_cshared=float(c_shared.mean()),
            mean_cdedicated=float(c_ded.mean()),
            mean_shared_reuse=float(s_reuse.mean()),
            mean_dedicated_reuse=float(d_reuse.mean()),
            mean_starved=float(starved.mean()),
        )
    return cells


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise ConfigError(THREADS_ENV, f"expected an integer, got '{env}'")
        else:
            workers = os.cpu_count() or 1
    return max(1, int(workers))


def run_campaign(spec: CampaignSpec, workers: Optional[int] = None) -> CampaignResult:
    """
    One task per (num_pairs, drop). Results are merged in (num_pairs, drop)
    order whatever the completion order, so the result only depends on spec.
    """
    spec.validate()
    t0 = time.monotonic()
    by_pairs: Dict[int, List[Tuple[float, float]]] = {}
    for n, pt, tau in spec.cells():
        by_pairs.setdefault(n, []).append((pt, tau))
    tasks = [(spec, n, d, cells) for n, cells in sorted(by_pairs.items()) for d in range(spec.drops)]
    n_workers = min(resolve_workers(workers), len(tasks)) or 1
    logger.info(
        f"[campaign] {len(spec.cells())} cells x {len(spec.schemes)} schemes x {spec.drops} drops "
        f"({len(tasks)} tasks, {n_workers} worker(s))"
    )

    done: Dict[Tuple[int, int], List[DropRecord]] = {}

    def _progress():
        if _should_log("campaign:progress", PROGRESS_LOG_SECS):
            logger.info(f"[campaign] {len(done)}/{len(tasks)} drops done")

    if n_workers == 1:
        for task in tasks:
            n, d, recs = _drop_task(task)
            done[(n, d)] = recs
            _progress()
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as ex:
            futures = [ex.submit(_drop_task, task) for task in tasks]
            for fut in as_completed(futures):
                n, d, recs = fut.result()
                done[(n, d)] = recs
                _progress()

    records = [rec for key in sorted(done) for rec in done[key]]
    result = CampaignResult(spec=spec, cells=_aggregate(records), elapsed_s=time.monotonic() - t0)
    logger.info(f"[campaign] finished {len(result.cells)} cells in {result.elapsed_s:.1f}s")
    return result


def sweep_tau(spec: CampaignSpec, result: Optional[CampaignResult] = None,
              workers: Optional[int] = None) -> List[TauCurve]:
    """
    Mean c_sum vs tau_N for every (scheme, #pairs, Pt) of the sweep grid and the
    maximizing tau_N (ties -> lower tau_N). Runs the campaign when no result is given.
    """
    if result is None:
        result = run_campaign(spec, workers=workers)
    taus = tuple(sorted(float(t) for t in spec.tau_n_values_db))
    curves: List[TauCurve] = []
    for scheme in spec.schemes:
        s = Scheme(scheme).value
        for n in spec.sweep_pair_counts:
            for pt in spec.pt_dbm_values:
                means = tuple(result.cells[(s, n, float(pt), t)].mean_csum for t in taus)
                best = taus[int(np.argmax(means))]  # first max -> lowest tau
                curves.append(TauCurve(scheme=s, num_pairs=n, pt_dbm=float(pt),
                                       taus=taus, means=means, best_tau=best))
                logger.debug(f"[sweep] {s} D={n} Pt={pt:g} dBm: tau_opt={best:g} dB")
    return curves
