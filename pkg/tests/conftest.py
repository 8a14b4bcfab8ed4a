# tests/conftest.py
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from csd.fixtures import load_fixture  # noqa: E402
from csd.scenario import Scenario, SimConfig  # noqa: E402

SMALL_YAML = """\
scenario:
  area_side_m: 200.0
  num_cues: 4
  num_pairs: 6
  max_pair_dist_m: 50.0
  carrier_ghz: 2.0
  bandwidth_mhz: 20.0
  rb_total: 24
  overhead_fraction: 0.0
  n_s: 12
  n_d: 12
  pt_cue_dbm: 10.0
  pt_due_dedicated_dbm: 10.0
  tau_due: 10.0
  tau_n_db: 0.0
  gamma_min_db: -9.478
  noise_psd_dbm_hz: -174.0
  drops: 2
  rng_seed: 7

campaign:
  pair_counts: [3, 6]
  pt_dbm_values: [10]
  tau_n_values_db: [-4, 0]
  schemes: [CSD, MaxSD]
  capacity_tau_n_db: 0
  sweep_pair_counts: [6]
"""


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale campaign, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def fig1():
    return load_fixture("fig1")


@pytest.fixture
def small_config():
    return SimConfig(
        area_side_m=200.0, num_cues=4, num_pairs=6, max_pair_dist_m=50.0,
        rb_total=24, overhead_fraction=0.0, n_s=12, n_d=12, drops=2, rng_seed=7,
    )


@pytest.fixture
def small_yaml():
    return SMALL_YAML


@pytest.fixture
def small_config_file(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL_YAML, encoding="utf-8")
    return p


def _hand_scenario(gain_cue_enb, gain_due_enb, gain_txi_rxj, gain_cue_rxj):
    """Scenario with hand-set linear gains; positions are placeholders."""
    g = np.asarray(gain_txi_rxj, dtype=float)
    C, D = len(gain_cue_enb), g.shape[0]
    return Scenario(
        enb_pos=np.zeros(2),
        cue_pos=np.zeros((C, 2)),
        pair_tx=np.zeros((D, 2)),
        pair_rx=np.zeros((D, 2)),
        gain_cue_enb=np.asarray(gain_cue_enb, dtype=float),
        gain_due_enb=np.asarray(gain_due_enb, dtype=float),
        gain_txj_rxj=np.diag(g).copy(),
        gain_txi_rxj=g,
        gain_cue_rxj=np.asarray(gain_cue_rxj, dtype=float).reshape(C, D),
    )


@pytest.fixture
def hand_scenario():
    return _hand_scenario


@pytest.fixture
def hand_config():
    return SimConfig(num_cues=1, num_pairs=2, rb_total=8, overhead_fraction=0.0, n_s=4, n_d=4)
