from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import line, network, od, single_line
from netgen import random_flows, random_network
from transit_dtue.costs import (
    CostModel, CostWeights, MTR_WEIGHTS, UndefinedSRGError, individual_cost, od_gap, relative_gap,
)
from transit_dtue.loading import FlowDistribution, simulate

PRE = [100, 100, 80, 100, 100]
POST = [80, 120, 80, 100, 100]


def test_on_time_without_wait_is_free():
    assert individual_cost(19000, 18000, 1000, CostWeights(), 19000) == 0


def test_early_arrival_cost():
    t_star = 20000
    a = t_star - 600
    assert individual_cost(a, a - 300 - 900, 900, CostWeights(10, 1, 10), t_star) == 3600


def test_late_arrival_cost():
    assert individual_cost(20100, 19000, 1100, MTR_WEIGHTS, 20000) == 1200


def test_negative_wait_is_a_bug():
    with pytest.raises(AssertionError):
        individual_cost(18999, 18000, 1000, CostWeights(), 19000)


def test_two_od_option_costs(two_od_model):
    table = two_od_model.evaluate(FlowDistribution(two_od_model.network, POST))
    assert table.option_cost == [600, 560, 800, 1400, 2000]
    # 80 users at 1600 and 20 users at 1600 - 1000
    assert table.option_cost[3] == (1600 * 80 + (1600 - 1000) * 20) / 100
    assert table.option_cost[1] == (500 * 100 + (500 + 360) * 20) / 120


def test_two_od_gaps(two_od_model):
    net = two_od_model.network
    pre = two_od_model.evaluate(FlowDistribution(net, PRE))
    post = two_od_model.evaluate(FlowDistribution(net, POST))
    assert pre.option_cost == [600, 500, 800, 1600, 2000]
    assert pre.gap == 74000 and post.gap == 82400
    # shifting OD1 users to its best option raises the gap of OD2
    assert post.od_gap["O1-D1"] < pre.od_gap["O1-D1"]
    assert post.od_gap["O2-D1"] > pre.od_gap["O2-D1"]


def test_two_od_srg_denominator(two_od_model):
    post = two_od_model.evaluate(FlowDistribution(two_od_model.network, POST))
    denom = 280 * 560 + 200 * 1400
    assert post.ideal_cost() == denom == 436800
    assert relative_gap(post) == pytest.approx(82400 / 436800, rel=1e-12)


def test_unused_option_takes_free_flow_cost(two_od_model):
    net = two_od_model.network
    q = FlowDistribution(net, [280, 0, 0, 200, 0])
    table = two_od_model.evaluate(q)
    assert table.option_cost[1:3] == table.free_flow[1:3]
    assert table.option_cost[4] == table.free_flow[4]


def test_identical_users_average():
    net = single_line(demand=4, capacity=10)
    model = CostModel(net)
    k = net.option_keys[0]
    table = model.evaluate(FlowDistribution.from_mapping(net, {k: 4}))
    assert table.cost(k) == table.free_flow[0]


def test_hand_sum_gap():
    assert od_gap([500, 600], [100, 100]) == 10000
    assert od_gap([700, 700, 700], [1, 5, 0]) == 0


def test_zero_gap_gives_zero_srg():
    net = single_line(demand=2, capacity=10)
    model = CostModel(net)
    table = model.evaluate(FlowDistribution.from_mapping(net, {net.option_keys[1]: 2}))
    assert table.gap == 0
    assert relative_gap(table) == 0


def test_zero_optimal_cost_makes_srg_undefined():
    # one option arrives exactly on time without waiting
    net = single_line(demand=1, capacity=10, t_star=18600)
    model = CostModel(net)
    table = model.evaluate(FlowDistribution.from_mapping(net, {net.option_keys[0]: 1}))
    assert table.od_star["AB"] == 0
    with pytest.raises(UndefinedSRGError, match="AB"):
        relative_gap(table)


def test_zero_demand_srg():
    net = single_line(demand=0, capacity=10)
    assert relative_gap(CostModel(net).evaluate(FlowDistribution.zeros(net))) == 0


def test_stranded_users_pay_penalty():
    net = single_line(demand=7, capacity=2)
    model = CostModel(net)
    table = model.evaluate(FlowDistribution.from_mapping(net, {net.option_keys[0]: 7}))
    assert table.stranded == 1
    assert table.penalty >= 10 * max(model.free_flow)
    assert table.option_sum[0] > table.penalty


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_gap_properties_and_weight_scaling(seed, lam):
    rng = random.Random(seed)
    net = random_network(rng)
    q = random_flows(rng, net)
    res = simulate(net, q)
    w = CostWeights(rng.randint(0, 20), rng.randint(0, 20), rng.randint(0, 20))
    a = CostModel(net, w).table(res)
    b = CostModel(net, w.scaled(lam)).table(res)
    assert a.gap >= 0 and all(g >= 0 for g in a.od_gap.values())
    assert a.gap == pytest.approx(sum(a.od_gap.values()))
    for od_id, idx in ((o, [net.option_index[k] for k in ks]) for o, ks in net.od_options.items()):
        costs = [a.option_cost[i] for i in idx]
        assert min(costs) == a.od_star[od_id]
        assert a.od_gap[od_id] == pytest.approx(od_gap(costs, [q.counts[i] for i in idx]), rel=1e-9, abs=1e-6)
    assert b.gap == pytest.approx(lam * a.gap, rel=1e-9, abs=1e-6)
    assert b.ideal_cost() == pytest.approx(lam * a.ideal_cost(), rel=1e-9)
    try:
        srg_a = relative_gap(a)
    except UndefinedSRGError:
        return
    assert relative_gap(b) == pytest.approx(srg_a, rel=1e-9, abs=1e-12)


def test_integer_costs_are_exact(two_od_model):
    table = two_od_model.evaluate(FlowDistribution(two_od_model.network, PRE))
    assert all(isinstance(s, int) for s in table.option_sum)
