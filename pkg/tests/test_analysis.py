import math

import numpy as np
import pytest

from ghznet.analysis import (
    ThresholdQuery,
    advantage_profile,
    find_threshold,
    optimize_pkey,
    optimized_fraction,
    scenario_qbers,
)
from ghznet.finite import FiniteSizeParams
from ghznet.network import Family, NetworkConfig, ProtocolSpec
from ghznet.noise import NoiseParams, memoryless_qber
from ghznet.rates import asymptotic_rate


def test_noiseless_distance_thresholds():
    res3 = find_threshold(ThresholdQuery("distance", 3, fixed_noise=0.0), (1.0, 30.0))
    res4 = find_threshold(ThresholdQuery("distance", 4, fixed_noise=0.0), (1.0, 30.0))
    assert res3.value == pytest.approx(15.0515, abs=1e-3)
    assert res4.value == pytest.approx(25.0 * math.log10(3.0), abs=1e-3)


def test_threshold_gap_refinement():
    query = ThresholdQuery("distance", 3, fixed_noise=0.0)
    res = find_threshold(query, (1.0, 30.0), gap_rtol=1e-9)
    cfg = NetworkConfig.make_symmetric(3, res.value)
    multi = asymptotic_rate(cfg, ProtocolSpec(Family.MQSS), memoryless_qber(0.0, 3))
    bi = asymptotic_rate(cfg, ProtocolSpec(Family.BQSS), memoryless_qber(0.0, 2))
    assert abs(multi.raw - bi.raw) < 1e-9 * max(multi.raw, bi.raw)


def test_noise_threshold_matches_grid_scan():
    query = ThresholdQuery("noise", 3, fixed_distance_km=0.0)
    res = find_threshold(query, (1e-9, 0.5), xtol=1e-8)
    grid = np.linspace(1e-6, 0.2, 4001)

    def gap(f):
        cfg = NetworkConfig.make_symmetric(3, 0.0)
        multi = asymptotic_rate(cfg, ProtocolSpec(Family.MQSS), memoryless_qber(f, 3))
        bi = asymptotic_rate(cfg, ProtocolSpec(Family.BQSS), memoryless_qber(f, 2))
        return multi.raw - bi.raw

    values = np.array([gap(f) for f in grid])
    crossing = grid[np.argmax(values < 0.0)]
    assert res.value == pytest.approx(crossing, abs=grid[1] - grid[0])


def test_threshold_requires_sign_change():
    res = find_threshold(ThresholdQuery("distance", 3, fixed_noise=0.0), (1.0, 5.0))
    assert res.value is None
    assert res.status == "no-sign-change"


def test_threshold_query_validation():
    with pytest.raises(ValueError):
        ThresholdQuery("noise", 3)
    with pytest.raises(ValueError):
        ThresholdQuery("frequency", 3, fixed_noise=0.0)


def test_finite_noise_threshold_below_asymptotic():
    asym = find_threshold(
        ThresholdQuery("noise", 3, fixed_distance_km=4.0), (1e-9, 0.5), xtol=1e-6
    )
    finite = find_threshold(
        ThresholdQuery("noise", 3, fixed_distance_km=4.0, block_size=1e8),
        (1e-9, 0.5),
        xtol=1e-6,
    )
    assert finite.value < asym.value
    assert finite.value > 0.5 * asym.value


def test_finite_cka_threshold_at_least_qss():
    # conference keys can fall back to the switching protocol, so their
    # noise tolerance is never below the secret-sharing one
    qss = find_threshold(
        ThresholdQuery("noise", 3, fixed_distance_km=4.0, task="QSS", block_size=1e10),
        (1e-9, 0.5),
        xtol=1e-6,
    )
    cka = find_threshold(
        ThresholdQuery("noise", 3, fixed_distance_km=4.0, task="CKA", block_size=1e10),
        (1e-9, 0.5),
        xtol=1e-6,
    )
    assert cka.value >= qss.value - 1e-6
    assert cka.value > qss.value + 1e-4  # pre-shared key helps at this block size


def test_optimize_pkey_grid_guarantee():
    # the refined optimum can never undercut the coarse grid
    def spiky(p):
        return max(0.0, 1.0 - 400.0 * (p - 0.731) ** 2)

    best = optimize_pkey(spiky)
    assert not best.indeterminate
    assert best.value >= spiky(0.731) - 1e-6
    assert best.x == pytest.approx(0.731, abs=1e-4)


def test_optimize_pkey_flags_dead_objective():
    best = optimize_pkey(lambda p: 0.0)
    assert best.indeterminate
    assert best.value == 0.0
    assert math.isnan(best.x)


def test_optimize_pkey_near_boundary_optimum():
    def near_one(p):
        return max(0.0, 1.0 - abs(math.log(max(1.0 - p, 1e-300)) + math.log(1e4)))

    best = optimize_pkey(near_one)
    assert best.x == pytest.approx(1.0 - 1e-4, rel=1e-2)


def test_optimal_pkey_approaches_one_for_large_blocks():
    cfg = NetworkConfig(3, 50.0, 4.0)
    qb = memoryless_qber(0.01, 3)
    fsp = FiniteSizeParams(epsilon=1e-10, block_size=1e12)
    opt, _ = optimized_fraction(cfg, Family.MQSS, fsp, qb)
    assert opt.x > 0.99


def test_conference_key_strategy_structure():
    # trusted players can always fall back to the switching protocol, so the
    # best conference rate coincides with secret sharing at small blocks and
    # rises above it once the pre-shared basis string pays off
    from ghznet.analysis import best_cka_fraction
    from ghznet.network import BasisStrategy

    cfg = NetworkConfig(3, 50.0, 4.0)
    noise = NoiseParams(0.01, t2_s=1.0, prep_time_s=2e-6)
    qb = scenario_qbers(cfg, ProtocolSpec(Family.MQSS, memories=True), noise, 1000, 1)
    for exponent, expect in ((5, BasisStrategy.SWITCHING), (12, BasisStrategy.PRESHARED)):
        fsp = FiniteSizeParams(epsilon=1e-10, block_size=10.0**exponent)
        _, res_qss = optimized_fraction(cfg, Family.MQSS, fsp, qb, memories=True)
        _, res_cka, strategy = best_cka_fraction(cfg, fsp, qb, memories=True)
        assert strategy is expect
        assert res_cka.secret_fraction >= res_qss.secret_fraction - 1e-15
        if expect is BasisStrategy.SWITCHING:
            assert res_cka.secret_fraction == pytest.approx(
                res_qss.secret_fraction, rel=1e-12
            )


def test_scenario_qbers_dispatch():
    cfg = NetworkConfig(4, 50.0, 4.0)
    noise = NoiseParams(0.01, t2_s=1.0, prep_time_s=2e-6)
    plain = scenario_qbers(cfg, ProtocolSpec(Family.MQSS), noise)
    assert plain == memoryless_qber(0.01, 4)
    bi = scenario_qbers(cfg, ProtocolSpec(Family.BQSS), noise)
    assert bi == memoryless_qber(0.01, 2)
    mem = scenario_qbers(cfg, ProtocolSpec(Family.MQSS, memories=True), noise, 500, 3)
    again = scenario_qbers(cfg, ProtocolSpec(Family.MQSS, memories=True), noise, 500, 3)
    assert mem == again
    assert mem.q_x > plain.q_x - 0.01


def test_advantage_ratio_with_ideal_memories():
    # noiseless, dephasing-free memory network: the ratio is exactly N-1
    cfg = NetworkConfig(2, 50.0, 4.0)
    noise = NoiseParams(0.0, t2_s=math.inf)
    profile = advantage_profile(cfg, noise, 8, memories=True, seed=2)
    for row in profile.rows:
        assert row.status == "ok"
        assert row.ratio == pytest.approx(row.n_parties - 1, rel=1e-12)
        assert row.bi_choice == "memory"
    assert profile.max_n_advantage == 8
    assert profile.max_n_linear == 8


def test_advantage_profile_dead_network_rows():
    cfg = NetworkConfig(2, 400.0, 400.0)
    noise = NoiseParams(0.45)
    profile = advantage_profile(cfg, noise, 4, memories=False)
    assert all(row.status == "both-zero" for row in profile.rows)
    assert profile.max_n_advantage is None
    assert profile.max_n_linear is None


def test_linear_growth_extent_anchor_points():
    # at a 30 km long link the ratio grows monotonically up to ~11 players
    # with memories and only ~5 without
    cfg = NetworkConfig(2, 30.0, 4.0)
    noise = NoiseParams(0.01, t2_s=1.0, prep_time_s=2e-6)
    with_mem = advantage_profile(cfg, noise, 16, memories=True, mc_samples=1000, seed=1)
    without = advantage_profile(cfg, noise, 16, memories=False, mc_samples=1000, seed=1)
    assert with_mem.max_n_linear == pytest.approx(11, abs=1)
    assert without.max_n_linear == pytest.approx(5, abs=1)


def test_memories_dominate_for_long_coherence():
    cfg = NetworkConfig(2, 30.0, 4.0)
    noise = NoiseParams(0.01, t2_s=100.0, prep_time_s=2e-6)
    with_mem = advantage_profile(cfg, noise, 12, memories=True, seed=5)
    without = advantage_profile(cfg, noise, 12, memories=False, seed=5)
    for row_m, row_n in zip(with_mem.rows, without.rows):
        if row_m.status == "ok" and row_n.status == "ok":
            assert row_m.ratio >= row_n.ratio - 1e-9


def test_finite_profile_reports_pkey_and_choice():
    cfg = NetworkConfig(2, 50.0, 4.0)
    noise = NoiseParams(0.01, t2_s=1.0, prep_time_s=2e-6)
    fsp = FiniteSizeParams(epsilon=1e-10, block_size=1e6)
    profile = advantage_profile(cfg, noise, 4, memories=False, fsp=fsp, seed=1)
    for row in profile.rows:
        assert row.status == "ok"
        assert 0.0 < row.p_key_multi < 1.0
        assert row.bi_choice in ("bQSS", "bCKA")
