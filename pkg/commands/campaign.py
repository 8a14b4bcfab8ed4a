# commands/campaign.py
from __future__ import annotations

import argparse
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional

from csd.simkit import CampaignResult, CellStats, TauCurve, run_campaign, sweep_tau
from utils.manifest import MANIFEST_NAME, RunManifest, save_manifest, utc_now
from utils.settings import ConfigError, load_config

logger = logging.getLogger(__name__)

FIG3_COLUMNS = ["scheme", "num_pairs", "pt_dbm", "tau_n_db", "mean_csum_bits", "stderr", "drops"]
FIG4_COLUMNS = FIG3_COLUMNS + ["is_optimum"]
REGIONS_COLUMNS = ["scheme", "num_pairs", "pt_dbm", "tau_n_db", "mean_cshared_bits",
                   "mean_cdedicated_bits", "mean_shared_reuse", "mean_dedicated_reuse", "mean_starved_pairs",
                   "drops"]


def _db(v: float) -> str:
    return f"{v:.2f}"


def _bits(v: float) -> str:
    return str(int(round(v)))


def _base_row(c: CellStats) -> dict:
    return {
        "scheme": c.scheme,
        "num_pairs": c.num_pairs,
        "pt_dbm": _db(c.pt_dbm),
        "tau_n_db": _db(c.tau_n_db),
        "drops": c.drops,
    }


def _write_csv(path: Path, columns: List[str], rows: Iterable[dict]) -> int:
    n = 0
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
            n += 1
    logger.info(f"[campaign] wrote {path} ({n} rows)")
    return n


def write_fig3(path: Path, result: CampaignResult) -> int:
    return _write_csv(path, FIG3_COLUMNS, (
        {**_base_row(c), "mean_csum_bits": _bits(c.mean_csum), "stderr": _bits(c.stderr)}
        for c in result.capacity_rows()
    ))


def write_fig4(path: Path, result: CampaignResult, curves: List[TauCurve]) -> int:
    optima = {(t.scheme, t.num_pairs, t.pt_dbm): t.best_tau for t in curves}
    return _write_csv(path, FIG4_COLUMNS, (
        {
            **_base_row(c),
            "mean_csum_bits": _bits(c.mean_csum),
            "stderr": _bits(c.stderr),
            "is_optimum": int(optima.get((c.scheme, c.num_pairs, c.pt_dbm)) == c.tau_n_db),
        }
        for c in result.sweep_rows()
    ))


def write_regions(path: Path, result: CampaignResult) -> int:
    return _write_csv(path, REGIONS_COLUMNS, (
        {
            **_base_row(c),
            "mean_cshared_bits": _bits(c.mean_cshared),
            "mean_cdedicated_bits": _bits(c.mean_cdedicated),
            "mean_shared_reuse": f"{c.mean_shared_reuse:.3f}",
            "mean_dedicated_reuse": f"{c.mean_dedicated_reuse:.3f}",
            "mean_starved_pairs": f"{c.mean_starved:.3f}",
        }
        for c in result.rows()
    ))


def cmd_campaign(config_file: str, out_dir: str, drops: Optional[int] = None,
                 seed: Optional[int] = None, workers: Optional[int] = None) -> int:
    """Run the campaign and write fig3.csv, fig4.csv, regions.csv and the manifest. Returns an exit code."""
    started = utc_now()
    try:
        spec = load_config(config_file, drops=drops, seed=seed)
    except ConfigError as e:
        logger.error(f"[campaign] invalid config {config_file}: {e}")
        return 2
    except OSError as e:
        logger.error(f"[campaign] cannot read {config_file}: {e}")
        return 3

    try:
        # fail on an unwritable out dir before spending time on drops
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result = run_campaign(spec, workers=workers)
        curves = sweep_tau(spec, result) if spec.sweep_pair_counts else []

        outputs = {
            "fig3": out / "fig3.csv",
            "fig4": out / "fig4.csv",
            "regions": out / "regions.csv",
        }
        write_fig3(outputs["fig3"], result)
        write_fig4(outputs["fig4"], result, curves)
        write_regions(outputs["regions"], result)

        manifest = RunManifest(
            config_path=str(config_file),
            spec=spec,
            started_at=started,
            finished_at=utc_now(),
            outputs={k: str(p) for k, p in outputs.items()},
        )
        save_manifest(str(out / MANIFEST_NAME), manifest)
    except ConfigError as e:
        logger.error(f"[campaign] {e}")
        return 2
    except OSError as e:
        logger.error(f"[campaign] I/O failure under {out_dir}: {e}", exc_info=True)
        return 3

    for t in curves:
        logger.info(f"[campaign] {t.scheme} D={t.num_pairs} Pt={t.pt_dbm:g} dBm -> tau_N opt {t.best_tau:g} dB")
    return 0


def _run(args: argparse.Namespace) -> int:
    return cmd_campaign(args.config, args.out, drops=args.drops, seed=args.seed, workers=args.workers)


def setup(subparsers) -> None:
    p = subparsers.add_parser("campaign", help="Run the Monte-Carlo campaign and write CSV results.")
    p.add_argument("config", help="YAML config (or a manifest.json from an earlier run)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--drops", type=int, default=None, help="override the number of drops per cell")
    p.add_argument("--seed", type=int, default=None, help="override scenario.rng_seed")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $CSD_SIM_THREADS or CPU count)")
    p.set_defaults(func=_run)
