import random

import numpy as np
import pytest

from csd.allocator import (
    UNASSIGNED,
    allocate_cue_rbs,
    assign_dedicated_blocks,
    default_dedicated_quota,
    run_csd,
    run_max_sd,
    solve_csd,
    solve_max_sd,
)
from csd.checks import check_plan
from csd.igraph import NeighborRelations
from csd.scenario import SimConfig, generate_drop


# -----------------------------------------------------------------------------
# RB splits
# -----------------------------------------------------------------------------
@pytest.mark.parametrize("n_s, cues, sizes", [
    (750, 20, [38] * 10 + [37] * 10),
    (8, 3, [3, 3, 2]),
    (8, 8, [1] * 8),
    (2, 4, [1, 1, 0, 0]),
])
def test_allocate_cue_rbs(n_s, cues, sizes):
    blocks = allocate_cue_rbs(n_s, cues)
    assert [len(b) for b in blocks] == sizes
    assert blocks[0].start == 0 and blocks[-1].stop == n_s
    for a, b in zip(blocks, blocks[1:]):
        assert a.stop == b.start


def test_allocate_cue_rbs_needs_cues():
    with pytest.raises(ValueError):
        allocate_cue_rbs(10, 0)


@pytest.mark.parametrize("n_d, counts, quotas", [
    (8, [2, 2, 2, 2], [2, 2, 2, 2]),
    (10, [1, 1, 1], [4, 3, 3]),
    (0, [3, 1], [0, 0]),
    (750, [1, 2, 3], [125, 250, 375]),
    (5, [0, 0], [0, 0]),
])
def test_default_dedicated_quota(n_d, counts, quotas):
    assert default_dedicated_quota(n_d, counts) == quotas


def test_quota_conservation_random():
    rng = random.Random(11)
    for _ in range(300):
        counts = [rng.randint(0, 9) for _ in range(rng.randint(1, 30))]
        n_d = rng.randint(0, 800)
        q = default_dedicated_quota(n_d, counts)
        if sum(counts) and n_d:
            assert sum(q) == n_d
        exact = [n_d * c / max(sum(counts), 1) for c in counts]
        assert all(abs(a - b) < 1 for a, b in zip(q, exact))


def test_assign_dedicated_blocks_contiguous():
    blocks = assign_dedicated_blocks([2, 0, 3])
    assert blocks == [range(0, 2), range(2, 2), range(2, 5)]


# -----------------------------------------------------------------------------
# Walkthrough fixture
# -----------------------------------------------------------------------------
def test_walkthrough_allocation(fig1):
    plan, report = run_csd(fig1.scenario, fig1.config, fig1.relations)
    exp = fig1.expected

    assert [len(b) for b in plan.cue_blocks] == exp["cue_block_sizes"]
    assert plan.quotas == exp["quotas"]
    for z, block in enumerate(plan.cue_blocks):
        for rb in block:
            assert plan.shared_owner[rb] == z
            assert sorted(plan.shared_tx[rb]) == exp["shared_tx"][z]
    for z, block in enumerate(plan.pair_blocks):
        assert len(block) == 2
        for rb in block:
            assert plan.dedicated_owner[rb] == z
            assert sorted(plan.dedicated_tx[rb]) == exp["dedicated_tx"][z]

    # 1-based: pair 2 takes CUE 3, pair 4 takes CUE 2, pair 1 is on CUE 1
    assert 0 in plan.shared_tx[plan.cue_blocks[0].start]
    assert plan.shared_tx[plan.cue_blocks[2].start] == frozenset({1})
    assert plan.shared_tx[plan.cue_blocks[1].start] == frozenset({3})
    # dedicated reuse pattern 1<->4 and 2<->3
    assert plan.dedicated_tx[plan.pair_blocks[0].start] == frozenset({0, 3})
    assert plan.dedicated_tx[plan.pair_blocks[1].start] == frozenset({1, 2})
    assert report.c_sum > 0


def test_walkthrough_powers(fig1):
    a = solve_csd(fig1.scenario, fig1.config, fig1.relations)
    plan, powers = a.plan, a.context.powers
    rb = plan.cue_blocks[0].start
    assert plan.shared_power[0, rb] == powers.p_due_shared[0]
    assert plan.shared_power[1, rb] == 0.0
    assert np.all(plan.dedicated_power[[0, 3]][:, list(plan.pair_blocks[0])] == powers.p_due_dedicated)
    assert check_plan(a) == []


def test_report_invariants(fig1):
    _, r = run_csd(fig1.scenario, fig1.config, fig1.relations)
    assert r.c_sum == pytest.approx(r.c_shared + r.c_dedicated)
    assert sum(r.per_pair) == pytest.approx(r.c_sum)
    assert r.shared_reuse == pytest.approx((3 * 2 + 3 * 1 + 2 * 1) / 8)
    assert r.dedicated_reuse == pytest.approx(2.0)


def test_zero_pairs(small_config):
    cfg = small_config.with_overrides(num_pairs=0)
    s = generate_drop(cfg, 0)
    for solver in (run_csd, run_max_sd):
        plan, report = solver(s, cfg)
        assert report.c_sum == 0
        assert report.per_pair == ()
        assert (plan.shared_owner >= 0).all()
        assert all(not tx for tx in plan.shared_tx)
        assert (plan.dedicated_owner == UNASSIGNED).all()


def test_single_pair_subgraph_takes_all_cue_rbs(fig1):
    # CUE 2 (0-based 1) only admits pair 4
    plan, _ = run_csd(fig1.scenario, fig1.config, fig1.relations)
    for rb in plan.cue_blocks[1]:
        assert plan.shared_tx[rb] == frozenset({3})


def test_deterministic(small_config):
    s = generate_drop(small_config, 5)
    a, _ = run_csd(s, small_config)
    b, _ = run_csd(s, small_config)
    assert a.shared_tx == b.shared_tx
    assert a.dedicated_tx == b.dedicated_tx
    np.testing.assert_array_equal(a.shared_power, b.shared_power)


@pytest.mark.parametrize("tau", [-30.0, -10.0, 0.0])
def test_plan_invariants_random_drops(small_config, tau):
    cfg = small_config.with_overrides(tau_n_db=tau)
    for k in range(20):
        s = generate_drop(cfg, k)
        for solver in (solve_csd, solve_max_sd):
            a = solver(s, cfg)
            assert check_plan(a) == [], f"drop {k} {a.scheme}"
            for z, block in enumerate(a.plan.pair_blocks):
                for rb in block:
                    assert z in a.plan.dedicated_tx[rb]


@pytest.mark.slow
def test_plan_invariants_fuzz_full_grid():
    rng = random.Random(5)
    for k in range(1000):
        cfg = SimConfig(
            num_pairs=rng.choice(range(5, 80, 5)),
            pt_cue_dbm=rng.choice([10.0, 15.0, 20.0]),
            tau_n_db=float(rng.choice(range(-30, 2, 2))),
        )
        cfg = cfg.with_overrides(pt_due_dedicated_dbm=cfg.pt_cue_dbm)
        s = generate_drop(cfg, k)
        for solver in (solve_csd, solve_max_sd):
            a = solver(s, cfg)
            assert check_plan(a) == [], f"drop {k} {a.scheme}"


# -----------------------------------------------------------------------------
# Max S/D
# -----------------------------------------------------------------------------
def test_max_sd_pair_blocked_everywhere_goes_dedicated(fig1):
    cue_nb = fig1.relations.cue_neighbor.copy()
    cue_nb[:, 0] = True
    rel = NeighborRelations(cue_neighbor=cue_nb, due_adjacency=fig1.relations.due_adjacency)
    a = solve_max_sd(fig1.scenario, fig1.config, rel)
    assert not a.shared_mode[0]
    assert all(0 not in tx for tx in a.plan.shared_tx)
    assert check_plan(a) == []


def test_max_sd_modes_are_exclusive(fig1):
    a = solve_max_sd(fig1.scenario, fig1.config, fig1.relations)
    plan = a.plan
    for j in range(plan.num_pairs):
        on_shared = any(j in tx for tx in plan.shared_tx)
        on_dedicated = any(j in tx for tx in plan.dedicated_tx)
        assert not (on_shared and on_dedicated)
        if on_shared:
            assert a.shared_mode[j]
        if on_dedicated:
            assert not a.shared_mode[j]
    assert sum(plan.quotas) in (0, fig1.config.n_d)


def test_max_sd_deterministic(small_config):
    s = generate_drop(small_config, 3)
    a = solve_max_sd(s, small_config)
    b = solve_max_sd(s, small_config)
    np.testing.assert_array_equal(a.shared_mode, b.shared_mode)
    assert a.report == b.report


@pytest.mark.parametrize("n_s, n_d, shared", [(7, 1, True), (1, 7, False), (4, 4, False)])
def test_max_sd_single_pair_takes_larger_region(hand_scenario, n_s, n_d, shared):
    # one CUE and one 3 m pair: both regions run at the efficiency cap
    s = hand_scenario(
        gain_cue_enb=[1e-11],
        gain_due_enb=[1e-12],
        gain_txi_rxj=[[2e-5]],
        gain_cue_rxj=[[1e-15]],
    )
    cfg = SimConfig(num_cues=1, num_pairs=1, rb_total=8, overhead_fraction=0.0, n_s=n_s, n_d=n_d)
    a = solve_max_sd(s, cfg)
    gamma_s, gamma_d = a.context.gamma_shared[0, 0], a.context.gamma_dedicated[0, 0]
    assert gamma_s == gamma_d == pytest.approx(cfg.rb_symbols * cfg.se_cap_bits)
    assert bool(a.shared_mode[0]) is shared
    assert a.report.c_sum == pytest.approx(max(n_s, n_d) * gamma_d)
    assert check_plan(a) == []
    assert solve_max_sd(s, cfg).report == a.report


def test_max_sd_dedicated_quota_split_among_dedicated_pairs(fig1):
    a = solve_max_sd(fig1.scenario, fig1.config, fig1.relations)
    for j, q in enumerate(a.plan.quotas):
        if a.shared_mode[j]:
            assert q == 0
    if not a.shared_mode.all():
        assert sum(a.plan.quotas) == fig1.config.n_d


def test_checker_flags_enb_overshoot(fig1):
    a = solve_csd(fig1.scenario, fig1.config, fig1.relations)
    rb = a.plan.cue_blocks[0].start
    a.plan.shared_power[0, rb] *= 1.0 + 1e-7
    assert any("eNB interference limit" in v for v in check_plan(a))
