import math

import numpy as np
import pytest

from conftest import FakeRng
from fuzzcluster.energy import RadioParams, threshold_distance
from fuzzcluster.fis1 import default_rulebase1, eval_fis1
from fuzzcluster.fis2 import default_rulebase2
from fuzzcluster.network import deploy, network_from_positions, normalize_inputs
from fuzzcluster.protocols import (
    DIRECTION_ABOVE,
    Engines,
    ProtocolParams,
    build_routes,
    ch_threshold,
    compete_final_chs,
    compute_radius_chance,
    run_protocol_round,
    select_provisional,
)
from fuzzcluster.rng import Xorshift64Star

RADIO = RadioParams(
    e_elec=50e-9, eps_fs=10e-12, eps_mp=0.0013e-12, e_da=5e-9, packet_bits=4000, ctrl_bits=200
)
LEACH = ProtocolParams(kind="leach", p=0.05, r_min=10.0, r_max=40.0)
FUZZY = ProtocolParams(kind="fuzzy_unequal", p=0.05, r_min=10.0, r_max=40.0)
TYPE2 = ProtocolParams(kind="type2fl", p=0.95, r_min=10.0, r_max=40.0)


def engines():
    return Engines(rules1=default_rulebase1(), rules2=default_rulebase2())


# --- threshold -----------------------------------------------------------------


def test_ch_threshold_hand_values():
    assert ch_threshold(0.05, 0) == 0.05
    assert ch_threshold(0.05, 7) == 0.05 / 0.65
    assert ch_threshold(0.05, 19) == 1.0


def test_ch_threshold_epoch_wraps():
    assert ch_threshold(0.05, 20) == ch_threshold(0.05, 0)
    assert ch_threshold(0.1, 13) == ch_threshold(0.1, 3)


def test_ch_threshold_validation():
    with pytest.raises(ValueError):
        ch_threshold(0.0, 1)
    with pytest.raises(ValueError):
        ch_threshold(0.05, -1)


# --- provisional selection --------------------------------------------------------


def test_select_below_strict_inequality():
    net = deploy(3, 100.0, (50.0, 175.0), seed=1, initial_energy=0.5)
    selected, forced = select_provisional(net, LEACH, 0, FakeRng([0.03, 0.05, 0.9]))
    assert selected == [0]  # 0.03 < 0.05 selected; 0.05 == threshold is not
    assert not forced


def test_select_above_direction():
    net = deploy(3, 100.0, (50.0, 50.0), seed=1)
    selected, forced = select_provisional(net, TYPE2, 0, FakeRng([0.96, 0.95, 0.2]))
    assert selected == [0]  # draw must exceed the threshold strictly
    assert not forced


def test_select_empty_falls_back_to_max_energy():
    net = deploy(3, 100.0, (50.0, 175.0), seed=1, initial_energy=0.5)
    net.nodes[1].energy = 0.4
    net.nodes[0].energy = 0.3
    net.nodes[2].energy = 0.2
    selected, forced = select_provisional(net, LEACH, 0, FakeRng([0.9, 0.9, 0.9]))
    assert selected == [1]
    assert forced


def test_select_skips_dead_nodes():
    net = deploy(3, 100.0, (50.0, 175.0), seed=1, initial_energy=0.5)
    net.nodes[0].alive = False
    rng = FakeRng([0.01, 0.9])  # draws belong to nodes 1 and 2
    selected, _ = select_provisional(net, LEACH, 0, rng)
    assert selected == [1]
    assert rng.used == 2


# --- radius/chance mapping ----------------------------------------------------------


def test_radius_clamps_to_r_min_and_r_max():
    eng_low = Engines(rules2=default_rulebase2(w_radius={t: 0.0 for t in _t2_radius_terms()}))
    eng_high = Engines(rules2=default_rulebase2(w_radius={t: 1.0 for t in _t2_radius_terms()}))
    radius_lo, _, _ = compute_radius_chance((0.5, 0.5, 0.5), eng_low, TYPE2)
    radius_hi, _, _ = compute_radius_chance((0.5, 0.5, 0.5), eng_high, TYPE2)
    assert radius_lo == pytest.approx(TYPE2.r_min, abs=1e-12)
    assert radius_hi == pytest.approx(TYPE2.r_max, abs=1e-12)


def _t2_radius_terms():
    from fuzzcluster.fis2 import T2_RADIUS_TERMS

    return T2_RADIUS_TERMS


def test_close_high_high_chance_lands_in_very_strong():
    eng = engines()
    rb = eng.rules1
    inputs = (
        rb.inputs[0].peak("close"),
        rb.inputs[1].peak("high"),
        rb.inputs[2].peak("high"),
    )
    _, chance, fell_back = compute_radius_chance(inputs, eng, FUZZY)
    lo, hi = rb.outputs[1].term("very_strong").support
    assert lo < chance < hi
    assert not fell_back


# --- competition ----------------------------------------------------------------------


def test_competition_higher_chance_wins():
    net = network_from_positions([(0.0, 0.0), (10.0, 0.0)], 100.0, (50.0, 50.0))
    finals = compete_final_chs([(0, 30.0, 0.7), (1, 30.0, 0.5)], net)
    assert [f[0] for f in finals] == [0]


def test_competition_disjoint_radii_keep_both():
    net = network_from_positions([(0.0, 0.0), (80.0, 0.0)], 100.0, (50.0, 50.0))
    finals = compete_final_chs([(0, 30.0, 0.7), (1, 30.0, 0.5)], net)
    assert sorted(f[0] for f in finals) == [0, 1]


def test_competition_tie_breaks_to_lower_id():
    net = network_from_positions([(0.0, 0.0), (10.0, 0.0)], 100.0, (50.0, 50.0))
    finals = compete_final_chs([(1, 30.0, 0.5), (0, 30.0, 0.5)], net)
    assert [f[0] for f in finals] == [0]


def test_competition_either_radius_suppresses():
    # 20 m apart: loser's 30 m radius covers the pair even though the winner's doesn't
    net = network_from_positions([(0.0, 0.0), (20.0, 0.0)], 100.0, (50.0, 50.0))
    finals = compete_final_chs([(0, 5.0, 0.9), (1, 30.0, 0.5)], net)
    assert [f[0] for f in finals] == [0]


# --- joining ----------------------------------------------------------------------------


def test_single_final_collects_all_members():
    net = network_from_positions(
        [(10.0, 10.0), (20.0, 10.0), (30.0, 10.0)], 100.0, (50.0, 175.0)
    )
    plan = run_protocol_round(net, LEACH, engines(), 1, FakeRng([0.01, 0.9, 0.9]), RADIO)
    assert len(plan.clusters) == 1
    assert plan.clusters[0].head == 0
    assert sorted(plan.clusters[0].members) == [1, 2]


def test_equidistant_member_joins_lower_id():
    net = network_from_positions(
        [(0.0, 0.0), (20.0, 0.0), (10.0, 0.0)], 100.0, (50.0, 175.0)
    )
    plan = run_protocol_round(net, LEACH, engines(), 1, FakeRng([0.01, 0.01, 0.9]), RADIO)
    by_head = {c.head: c for c in plan.clusters}
    assert 2 in by_head[0].members
    assert by_head[1].members == []


def test_type2_uncovered_node_self_promotes():
    # node 2 sits farther than r_max from any possible head
    params = ProtocolParams(kind="type2fl", p=0.95, r_min=5.0, r_max=20.0)
    net = network_from_positions(
        [(0.0, 0.0), (5.0, 0.0), (90.0, 90.0)], 100.0, (50.0, 50.0)
    )
    plan = run_protocol_round(net, params, engines(), 1, FakeRng([0.99, 0.2, 0.2]), RADIO)
    heads = {c.head for c in plan.clusters}
    assert 2 in heads
    orphan = next(c for c in plan.clusters if c.head == 2)
    assert orphan.members == []
    assert plan.orphan_fallbacks >= 1


# --- routing ----------------------------------------------------------------------------


def test_route_direct_within_threshold():
    net = network_from_positions([(0.0, 40.0)], 200.0, (0.0, 0.0))
    routes = build_routes([0], net, threshold_distance(RADIO))
    assert routes == {0: None}


def test_route_relays_through_closer_head():
    # head 0 at 150 m from the sink, head 1 at 100 m from the sink and 60 m from head 0
    y1 = 28900.0 / 300.0
    x1 = math.sqrt(100.0**2 - y1**2)
    net = network_from_positions([(0.0, 150.0), (x1, y1)], 200.0, (0.0, 0.0))
    assert net.dist[0, 1] == pytest.approx(60.0, abs=1e-9)
    routes = build_routes([0, 1], net, threshold_distance(RADIO))
    assert routes[0] == 1
    assert routes[1] is None


def test_route_single_head_goes_direct():
    net = network_from_positions([(0.0, 150.0)], 200.0, (0.0, 0.0))
    routes = build_routes([0], net, threshold_distance(RADIO))
    assert routes == {0: None}


def test_leach_routes_always_direct():
    net = network_from_positions([(0.0, 150.0), (0.0, 100.0)], 200.0, (0.0, 0.0))
    routes = build_routes([0, 1], net, threshold_distance(RADIO), direct_only=True)
    assert routes == {0: None, 1: None}


# --- whole rounds -------------------------------------------------------------------------


def test_leach_two_nodes_forced_draw():
    net = network_from_positions([(10.0, 10.0), (20.0, 10.0)], 100.0, (50.0, 175.0))
    plan = run_protocol_round(net, LEACH, engines(), 1, FakeRng([0.01, 0.9]), RADIO)
    assert len(plan.clusters) == 1
    assert plan.clusters[0].members == [1]
    assert plan.routes == {0: None}


def test_partition_property_all_protocols():
    for params, seed in ((LEACH, 3), (FUZZY, 4), (TYPE2, 5)):
        net = deploy(60, 100.0, (50.0, 175.0), seed=seed, initial_energy=0.5)
        rng = Xorshift64Star(seed)
        for r in range(1, 16):
            plan = run_protocol_round(net, params, engines(), r, rng, RADIO)
            seen = []
            for c in plan.clusters:
                seen.append(c.head)
                seen.extend(c.members)
                assert c.head not in c.members
            assert sorted(seen) == net.alive_ids()


def test_final_ch_separation_fuzzy():
    net = deploy(80, 100.0, (50.0, 175.0), seed=11, initial_energy=0.5)
    rng = Xorshift64Star(11)
    eng = engines()
    for r in range(1, 21):
        plan = run_protocol_round(net, FUZZY, eng, r, rng, RADIO)
        chs = [(c.head, c.radius) for c in plan.clusters if c.radius > 0.0]
        for i, (h1, r1) in enumerate(chs):
            for h2, r2 in chs[i + 1 :]:
                assert net.dist[h1, h2] > min(r1, r2)


def test_route_soundness_over_rounds():
    for params, seed in ((FUZZY, 21), (TYPE2, 22)):
        net = deploy(80, 100.0, (50.0, 175.0), seed=seed, initial_energy=0.5)
        rng = Xorshift64Star(seed)
        eng = engines()
        for r in range(1, 21):
            plan = run_protocol_round(net, params, eng, r, rng, RADIO)
            heads = set(plan.routes)
            for start in heads:
                hops = 0
                cur = start
                while plan.routes[cur] is not None:
                    nxt = plan.routes[cur]
                    assert net.bs_dist[nxt] < net.bs_dist[cur]
                    cur = nxt
                    hops += 1
                    assert hops <= len(heads)


def test_unequal_radius_near_vs_far():
    net = deploy(100, 100.0, (50.0, 175.0), seed=31, initial_energy=0.5)
    rng = Xorshift64Star(31)
    eng = engines()
    lo = net.bs_dist.min()
    span = net.bs_dist.max() - lo
    near, far = [], []
    for r in range(1, 31):
        plan = run_protocol_round(net, FUZZY, eng, r, rng, RADIO)
        for c in plan.clusters:
            if c.radius <= 0.0:
                continue
            d = net.bs_dist[c.head]
            if d <= lo + span / 3:
                near.append(c.radius)
            elif d >= lo + 2 * span / 3:
                far.append(c.radius)
    assert near and far
    assert np.mean(near) < np.mean(far)


def test_leach_selection_rate_binomial_at_epoch_start():
    net = deploy(100, 100.0, (50.0, 175.0), seed=8, initial_energy=0.5)
    rng = Xorshift64Star(8)
    total = 0
    trials = 1000
    for _ in range(trials):
        selected, forced = select_provisional(net, LEACH, 0, rng)
        if not forced:
            total += len(selected)
    mean = trials * 100 * 0.05
    sigma = math.sqrt(trials * 100 * 0.05 * 0.95)
    assert abs(total - mean) <= 3.0 * sigma


def test_control_traffic_can_be_disabled():
    net = deploy(30, 100.0, (50.0, 175.0), seed=2, initial_energy=0.5)
    silent = ProtocolParams(kind="fuzzy_unequal", p=0.05, r_min=10.0, r_max=40.0, control_traffic=False)
    plan = run_protocol_round(net, silent, engines(), 1, Xorshift64Star(2), RADIO)
    assert plan.control_spend.sum() == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        ProtocolParams(kind="bogus", p=0.05, r_min=10.0, r_max=40.0)
    with pytest.raises(ValueError):
        ProtocolParams(kind="leach", p=1.5, r_min=10.0, r_max=40.0)
    with pytest.raises(ValueError):
        ProtocolParams(kind="leach", p=0.05, r_min=40.0, r_max=10.0)
    assert TYPE2.direction == DIRECTION_ABOVE


# --- golden trace -----------------------------------------------------------------------


def oracle_fuzzy_round(net, params, rng, radio):
    """Straight-line re-implementation of one unequal-clustering round."""
    th = ch_threshold(params.p, 0)
    provisionals = [nd.id for nd in net.nodes if nd.alive and rng.random() < th]
    if not provisionals:
        provisionals = [max(net.nodes, key=lambda nd: nd.energy).id]
    rb = default_rulebase1()
    nbr = threshold_distance(radio)
    cands = []
    for pid in provisionals:
        db, re, conc = normalize_inputs(net, pid, nbr)
        out = eval_fis1(rb, {"distance": db, "energy": re, "concentration": conc})
        cands.append((pid, params.r_min + out["radius"] * (params.r_max - params.r_min), out["chance"]))
    finals = []
    for cand in sorted(cands, key=lambda c: (-c[2], c[0])):
        if all(net.dist[cand[0], f[0]] > max(cand[1], f[1]) for f in finals):
            finals.append(cand)
    partition = {fid: [] for fid, _, _ in finals}
    for nd in net.nodes:
        if not nd.alive or nd.id in partition:
            continue
        best = min(partition, key=lambda h: (net.dist[nd.id, h], h))
        partition[best].append(nd.id)
    return {h: sorted(m) for h, m in partition.items()}


def test_fuzzy_round_matches_hand_trace():
    net = deploy(10, 100.0, (50.0, 175.0), seed=77, initial_energy=0.5)
    plan = run_protocol_round(net, FUZZY, engines(), 1, Xorshift64Star(123), RADIO)
    got = {c.head: sorted(c.members) for c in plan.clusters}

    oracle_net = deploy(10, 100.0, (50.0, 175.0), seed=77, initial_energy=0.5)
    expected = oracle_fuzzy_round(oracle_net, FUZZY, Xorshift64Star(123), RADIO)
    assert got == expected
    # frozen golden partition for this topology and seed
    assert got == GOLDEN_PARTITION


GOLDEN_PARTITION = {9: [0, 1, 3, 4, 6, 8], 7: [2, 5]}  # verified against the oracle above
