#!/usr/bin/env python3
"""
Test the mobility policies: CAP scoring and selection, the repel-pheromone baseline, and CACOC2
"""

import copy
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from scripts.base_policy import CandidateEvaluation, UavAgent
from scripts.cacoc2_policy import (
    Cacoc2Policy,
    Turn,
    cacoc2_select,
    cacoc2_velocity,
    cacoc_direction,
    flock_force,
)
from scripts.cap_policy import (
    CapPolicy,
    best_by_score,
    cap_evaluate,
    cap_select,
    connectivity_factor,
    score_candidates,
)
from scripts.comms import NeighborTable, build_hello
from scripts.config import ScenarioConfig
from scripts.kinematics import Direction, UavState
from scripts.pheromone_field import GridSpec, new_field
from scripts.pheromone_policy import PheromonePolicy, pheromone_select
from scripts.rossler import new_chaotic_state, rossler_next

GRID = GridSpec.from_map(6000.0, 100.0)
DIRECTIONS = list(Direction)


def make_uav(uav_id=0, cell=(30, 30), heading=0.0, next_cell=None, position=None):
    next_cell = next_cell or cell
    return UavState(
        uav_id=uav_id,
        position=position or GRID.cell_center(cell),
        heading=heading,
        speed=20.0,
        current_cell=cell,
        next_waypoint_cell=next_cell,
        target_point=GRID.cell_center(next_cell),
        max_turn_rate=math.radians(60.0),
        arrival_tolerance=50.0,
    )


def make_field():
    return new_field(GRID, 0.006, 0.006, 4.0)


def announce(table, sender, cell, next_cell, t=0.0, position=None):
    uav = make_uav(sender, cell, next_cell=next_cell, position=position)
    table.upsert(build_hello(uav, make_field(), t))


def random_evaluations(rng, n=5):
    return [
        CandidateEvaluation(
            cell=(10 + i, 10),
            direction=DIRECTIONS[i],
            turn=i - 2,
            look_ahead=float(rng.uniform(0.0, 1.5)),
            k_estimate=float(rng.uniform(0.0, 6.0)),
        )
        for i in range(n)
    ]


def test_connectivity_factor():
    assert connectivity_factor(1.0, 4.0) == 0.25
    assert connectivity_factor(5.0, 4.0) == 1.0
    assert connectivity_factor(0.0, 0.0) == 1.0
    assert connectivity_factor(0.0, 2.0) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(1000):
        alpha = connectivity_factor(float(rng.uniform(0, 10)), float(rng.uniform(0, 5)))
        assert 0.0 <= alpha <= 1.0
    with pytest.raises(ValueError):
        connectivity_factor(1.0, -1.0)
    print("✅ alpha is K / beta saturating at 1")


def test_cap_hand_example():
    evaluations = [
        CandidateEvaluation(cell=(31, 31), direction=Direction.NE, turn=1, look_ahead=0.2, k_estimate=5.0),
        CandidateEvaluation(cell=(30, 31), direction=Direction.N, turn=0, look_ahead=0.0, k_estimate=1.0),
    ]
    score_candidates(evaluations, 4.0)
    assert evaluations[0].score == pytest.approx(0.8)
    assert evaluations[1].score == pytest.approx(0.25)
    assert evaluations[0].share == pytest.approx(0.8 / 1.05)
    assert best_by_score(evaluations).cell == (31, 31)
    print("✅ W = alpha (1 - P') picks the better-scored candidate")


def test_cap_symmetric_picks_ahead():
    table = NeighborTable(4.0)
    announce(table, 1, (30, 32), (30, 32))
    uav = make_uav()
    assert cap_select(uav, make_field(), table, 1.0, GRID, 1, 1000.0, now_s=0.0) == (30, 31)
    print("✅ all-equal candidates resolve to ahead")


def test_cap_ignores_stale_neighbours():
    table = NeighborTable(ScenarioConfig().effective_neighbor_max_age_s)
    announce(table, 1, (30, 32), (30, 32), t=0.0)
    uav = make_uav()
    fresh = cap_evaluate(uav, make_field(), table, 2.0, GRID, 1, 1000.0, now_s=4.0)
    assert [e.k_estimate for e in fresh if e.cell == (30, 31)] == [1.0]
    stale = cap_evaluate(uav, make_field(), table, 2.0, GRID, 1, 1000.0, now_s=5.0)
    assert all(e.k_estimate == 0.0 for e in stale)
    print("✅ claims older than two hello periods do not count toward K")


def test_cap_deposits_at_current_cell():
    field = make_field()
    cap_select(make_uav(), field, NeighborTable(4.0), 2.0, GRID, 1, 1000.0)
    field.step()
    assert field.value((30, 30)) == pytest.approx(0.994)
    print("✅ CAP deposits one unit where the decision is made")


def test_cap_low_beta_is_pure_coverage():
    rng = np.random.default_rng(42)
    table = NeighborTable(4.0)
    announce(table, 1, (30, 31), (30, 31))
    for _ in range(200):
        field = make_field()
        field.values[1:-1, 1:-1] = rng.uniform(0.0, 0.9, size=(58, 58))
        uav = make_uav(heading=float(rng.uniform(0, 2 * math.pi)))
        expected = pheromone_select(uav, field.copy(), GRID, 1)
        assert cap_select(uav, field, table, 0.5, GRID, 1, 1000.0) == expected
        assert cap_select(uav, field.copy(), NeighborTable(4.0), 0.0, GRID, 1, 1000.0) == expected
    print("✅ saturated alpha reduces CAP to argmin P'")


def test_cap_argmax_invariant_under_saturation():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        beta = float(rng.uniform(0.5, 4.0))
        evaluations = random_evaluations(rng)
        for e in evaluations:
            e.k_estimate = beta + float(rng.uniform(0.0, 3.0))
        first = best_by_score(score_candidates(evaluations, beta)).cell
        scaled = copy.deepcopy(evaluations)
        factor = float(rng.uniform(1.0, 5.0))
        for e in scaled:
            e.k_estimate *= factor
        assert best_by_score(score_candidates(scaled, beta)).cell == first
    print("✅ scaling saturated K leaves the choice unchanged")


def test_cap_rank_monotonicity():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        beta = float(rng.uniform(0.0, 4.0))
        evaluations = score_candidates(random_evaluations(rng), beta)
        total_share = sum(e.share for e in evaluations)
        if any(e.score > 0 for e in evaluations):
            assert total_share == pytest.approx(1.0)
        for a in evaluations:
            assert 0.0 <= a.alpha <= 1.0
            for b in evaluations:
                if a.clamped_look_ahead <= b.clamped_look_ahead and a.k_estimate >= b.k_estimate:
                    assert a.score >= b.score - 1e-12
        best = best_by_score(evaluations)
        assert best.score == max(e.score for e in evaluations)
    print("✅ W is monotone in lower P' and higher K")


def test_pheromone_select():
    field = make_field()
    field.values[1:-1, 1:-1] = 1.0
    field.values[30:33, 29:32] = 0.0
    assert pheromone_select(make_uav(), field, GRID, 1) == (31, 30)

    assert pheromone_select(make_uav(), make_field(), GRID, 1) == (30, 31)
    print("✅ baseline flies toward the least pheromone, ties go ahead")


def test_policy_objects():
    agent = UavAgent(state=make_uav(), pheromone_field=make_field(), neighbor_table=NeighborTable(4.0))
    cap = CapPolicy(beta=2.0, tx_m=1000.0)
    cell = cap.decide(agent, GRID, 1, 0.0)
    assert agent.waypoints == [cell]
    stats = cap.get_stats()
    assert stats['name'] == "cap"
    assert stats['params'] == {'beta': 2.0}
    assert stats['stats']['decisions'] == 1

    baseline = PheromonePolicy()
    assert baseline.decide(agent, GRID, 1, 0.0) == (30, 31)
    assert baseline.describe() == {}

    with pytest.raises(ValueError):
        CapPolicy(beta=-1.0, tx_m=1000.0)
    with pytest.raises(ValueError):
        Cacoc2Policy(f=0.6).select(agent, GRID, 1, 0.0)
    print("✅ policy objects book-keep decisions")


def test_cacoc_direction():
    for value in (0.0, 1.0):
        assert cacoc_direction(value, value, value, 0.2) == Turn.RIGHT
        assert cacoc_direction(value, value, value, 0.5) == Turn.LEFT
        assert cacoc_direction(value, value, value, 0.9) == Turn.AHEAD
    assert cacoc_direction(0.0, 0.0, 0.0, 0.1) == Turn.RIGHT
    assert cacoc_direction(10.0, 10.0, 0.0, 0.3) == Turn.RIGHT
    assert cacoc_direction(10.0, 10.0, 0.0, 0.55) == Turn.LEFT
    # p_L = 0.5, p_R = 0.25: the band between p_R and p_L is ahead, not left
    assert cacoc_direction(0.0, 10.0, 10.0, 0.3) == Turn.AHEAD
    assert cacoc_direction(0.0, 10.0, 10.0, 0.5) == Turn.AHEAD
    assert cacoc_direction(0.0, 10.0, 10.0, 0.6) == Turn.LEFT
    assert cacoc_direction(0.0, 10.0, 10.0, 0.8) == Turn.AHEAD
    assert cacoc_direction(0.0, 10.0, 10.0, 0.1) == Turn.RIGHT
    print("✅ return-map thresholds favour low-pheromone sides")


def test_flock_force():
    uav = make_uav()
    table = NeighborTable(4.0)
    assert np.array_equal(flock_force(uav, table, GRID, 0.0), np.zeros(2))

    announce(table, 1, (20, 20), (20, 24))
    announce(table, 2, (40, 20), (40, 21))
    assert np.allclose(flock_force(uav, table, GRID, 0.0), [0.0, 1.0])

    table = NeighborTable(4.0)
    announce(table, 1, (20, 20), (20, 24))
    announce(table, 2, (40, 20), (43, 20))
    assert np.allclose(flock_force(uav, table, GRID, 0.0), [0.5, 0.5])

    assert np.array_equal(flock_force(uav, table, GRID, 100.0), np.zeros(2))
    print("✅ flock force is the mean neighbour direction")


def test_cacoc2_velocity():
    north, east = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    assert np.allclose(cacoc2_velocity(north, east, 0.0, 20.0), [0.0, 20.0])
    assert np.allclose(cacoc2_velocity(north, north, 3.0, 20.0), [0.0, 20.0])
    combined = cacoc2_velocity(north, east, 1.0, 20.0)
    assert np.hypot(*combined) == pytest.approx(20.0)
    assert math.degrees(math.atan2(combined[0], combined[1])) == pytest.approx(45.0)
    assert np.allclose(cacoc2_velocity(north, -north, 1.0, 20.0), [0.0, 20.0])
    print("✅ velocity is the normalised force sum at constant speed")


def test_cacoc2_follows_chaos_without_flocking():
    uav = make_uav()
    for seed in range(5):
        chaotic = new_chaotic_state(np.random.default_rng(seed))
        probe = copy.deepcopy(chaotic)
        rho = rossler_next(probe)
        turn = cacoc_direction(0.0, 0.0, 0.0, rho)
        expected = {Turn.LEFT: (29, 31), Turn.AHEAD: (30, 31), Turn.RIGHT: (31, 31)}[turn]
        assert cacoc2_select(uav, make_field(), NeighborTable(4.0), chaotic, 0.0, GRID, 1) == expected

        lone_a = copy.deepcopy(probe)
        lone_b = copy.deepcopy(probe)
        assert (cacoc2_select(uav, make_field(), NeighborTable(4.0), lone_a, 0.0, GRID, 1)
                == cacoc2_select(uav, make_field(), NeighborTable(4.0), lone_b, 0.9, GRID, 1))
    print("✅ f = 0 or no neighbours follows the chaotic choice")


def test_cacoc2_strong_flocking():
    uav = make_uav()
    table = NeighborTable(4.0)
    announce(table, 1, (30, 27), (33, 27))
    announce(table, 2, (28, 26), (31, 26))
    for seed in range(5):
        chaotic = new_chaotic_state(np.random.default_rng(seed))
        assert cacoc2_select(uav, make_field(), table, chaotic, 100.0, GRID, 1) == (31, 30)
    print("✅ large f follows the flock heading")


def main():
    """Run all tests."""
    print("🧭 Mobility Policy Test Suite")
    print("=" * 40)

    tests = [
        test_connectivity_factor,
        test_cap_hand_example,
        test_cap_symmetric_picks_ahead,
        test_cap_ignores_stale_neighbours,
        test_cap_deposits_at_current_cell,
        test_cap_low_beta_is_pure_coverage,
        test_cap_argmax_invariant_under_saturation,
        test_cap_rank_monotonicity,
        test_pheromone_select,
        test_policy_objects,
        test_cacoc_direction,
        test_flock_force,
        test_cacoc2_velocity,
        test_cacoc2_follows_chaos_without_flocking,
        test_cacoc2_strong_flocking,
    ]

    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            failed += 1
            print(f"❌ {test.__name__}: {e}")

    print("=" * 40)
    if failed:
        print(f"❌ {failed} test(s) failed")
        return 1
    print("🎉 All policy tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
