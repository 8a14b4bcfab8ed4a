# csd/config.py
from pathlib import Path

# Fixture catalog
FIXTURES = {
    "fig1": {
        "name": "Four-pair reuse walkthrough",
        "path": "data/fixtures/fig1.json",
    },
}

# Physical layer constants
RB_BANDWIDTH_HZ = 180_000.0
RB_SYMBOLS = 168          # resource elements per RB (12 subcarriers x 14 symbols)
SE_CAP_BITS = 6.0         # bits/symbol, 64-QAM ceiling
MIN_DISTANCE_M = 3.0
P_MAX_DBM = 23.0          # UE power class 3

# 3GPP-style path loss: A + B*log10(d_km)
CELLULAR_PL_A = 128.1
CELLULAR_PL_B = 37.6
D2D_PL_A = 148.0
D2D_PL_B = 40.0

# Keys a config file must spell out
REQUIRED_SCENARIO_KEYS = (
    "area_side_m",
    "num_cues",
    "num_pairs",
    "max_pair_dist_m",
    "carrier_ghz",
    "bandwidth_mhz",
    "rb_total",
    "overhead_fraction",
    "n_s",
    "n_d",
    "pt_cue_dbm",
    "pt_due_dedicated_dbm",
    "tau_due",
    "tau_n_db",
    "gamma_min_db",
    "noise_psd_dbm_hz",
    "drops",
    "rng_seed",
)

# Optional engineering constants, backfilled when absent
DEFAULT_SETTINGS = {
    "p_max_dbm": P_MAX_DBM,
    "rb_bandwidth_hz": RB_BANDWIDTH_HZ,
    "rb_symbols": RB_SYMBOLS,
    "se_cap_bits": SE_CAP_BITS,
    "min_distance_m": MIN_DISTANCE_M,
    "cellular_pl_a": CELLULAR_PL_A,
    "cellular_pl_b": CELLULAR_PL_B,
    "d2d_pl_a": D2D_PL_A,
    "d2d_pl_b": D2D_PL_B,
}

# Default evaluation scenario
TABLE1_SCENARIO = {
    "area_side_m": 500.0,
    "num_cues": 20,
    "num_pairs": 25,
    "max_pair_dist_m": 200.0,
    "carrier_ghz": 2.0,
    "bandwidth_mhz": 20.0,
    "rb_total": 2000,
    "overhead_fraction": 0.25,
    "n_s": 750,
    "n_d": 750,
    "pt_cue_dbm": 10.0,
    "pt_due_dedicated_dbm": 10.0,
    "tau_due": 10.0,
    "tau_n_db": 0.0,
    "gamma_min_db": -9.478,
    "noise_psd_dbm_hz": -174.0,
    "drops": 200,
    "rng_seed": 1,
    **DEFAULT_SETTINGS,
}

DEFAULT_CAMPAIGN = {
    "pair_counts": list(range(5, 80, 5)),
    "pt_dbm_values": [10.0, 15.0, 20.0],
    "tau_n_values_db": [float(t) for t in range(-30, 2, 2)],
    "schemes": ["CSD", "MaxSD"],
    "drops": None,               # None -> scenario.drops
    "capacity_tau_n_db": 0.0,
    "sweep_pair_counts": [25, 50, 75],
}

# Env var that caps campaign worker processes
THREADS_ENV = "CSD_SIM_THREADS"


def repo_root() -> Path:
    return Path(__file__).resolve().parent.parent


class ConfigError(ValueError):
    """Invalid simulation/campaign configuration. Message always names the key."""

    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{field}: {message}")
