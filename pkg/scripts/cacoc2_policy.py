"""
CACOC2 mobility: chaotic left/ahead/right choice blended with a flock-centering force.

The chaotic choice reads one Rossler return-map value per decision and biases
it away from pheromone-heavy candidates. The chosen direction F_C is added to
f * F_flock and the sum is normalised to the constant UAV speed.
"""

import math
from enum import Enum
from typing import Any, Dict, List

import numpy as np

from scripts.base_policy import BasePolicy, CandidateEvaluation, UavAgent, evaluate_candidates
from scripts.comms import NeighborTable
from scripts.kinematics import UavState, discretize_heading, heading_vector, wrap_angle
from scripts.pheromone_field import Cell, GridSpec, PheromoneField
from scripts.rossler import ChaoticState, rossler_next


class Turn(Enum):
    LEFT = -1
    AHEAD = 0
    RIGHT = 1


def cacoc_direction(pher_left: float, pher_ahead: float, pher_right: float, rho: float) -> Turn:
    """Map a return-map value to L/A/R. Low-pheromone sides get the wider rho intervals.

    rho below p_R is right, rho strictly between p_L and p_R + p_L is left,
    anything else is ahead.
    """
    total = pher_left + pher_ahead + pher_right
    if total > 0:
        p_left = (total - pher_left) / (2.0 * total)
        p_right = (total - pher_right) / (2.0 * total)
    else:
        p_left = p_right = 1.0 / 3.0
    if rho < p_right:
        return Turn.RIGHT
    if p_left < rho < p_right + p_left:
        return Turn.LEFT
    return Turn.AHEAD


def flock_force(uav: UavState, table: NeighborTable, grid: GridSpec, now_s: float) -> np.ndarray:
    """Mean of the fresh neighbours' unit vectors toward their announced next waypoints."""
    vectors = []
    for uav_id, entry in table.fresh(now_s).items():
        if uav_id == uav.uav_id:
            continue
        tx, ty = grid.cell_center(entry.next_waypoint_cell)
        dx = tx - entry.position[0]
        dy = ty - entry.position[1]
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            continue
        vectors.append((dx / norm, dy / norm))
    if not vectors:
        return np.zeros(2)
    return np.mean(np.array(vectors), axis=0)


def cacoc2_velocity(chaotic_force: np.ndarray, flock: np.ndarray, f: float, speed: float) -> np.ndarray:
    if speed <= 0:
        raise ValueError(f"speed must be positive, got {speed}")
    chaotic_force = np.asarray(chaotic_force, dtype=np.float64)
    total = chaotic_force + f * np.asarray(flock, dtype=np.float64)
    norm = float(np.hypot(total[0], total[1]))
    if norm == 0.0:
        return speed * chaotic_force
    return speed * total / norm


def closest_to_bearing(evaluations: List[CandidateEvaluation], target: float) -> CandidateEvaluation:
    """Candidate whose nominal direction is nearest ``target``; ties prefer the smaller turn."""
    return min(
        evaluations,
        key=lambda e: (round(abs(wrap_angle(e.direction.angle - target)), 12), abs(e.turn), int(e.direction)),
    )


def _choose(uav: UavState, pheromone_field: PheromoneField, table: NeighborTable, chaotic: ChaoticState,
            f: float, grid: GridSpec, step_cells: int, now_s: float):
    evaluations = evaluate_candidates(uav, pheromone_field, grid, step_cells)
    # candidates are ordered d-2..d+2, so L/A/R sit at 1, 2, 3
    left, ahead, right = evaluations[1], evaluations[2], evaluations[3]
    rho = rossler_next(chaotic)
    turn = cacoc_direction(max(left.look_ahead, 0.0), max(ahead.look_ahead, 0.0),
                           max(right.look_ahead, 0.0), rho)
    base = discretize_heading(uav.heading).rotate(turn.value)
    chaotic_force = heading_vector(base.angle)
    velocity = cacoc2_velocity(chaotic_force, flock_force(uav, table, grid, now_s), f, uav.speed)
    target = math.atan2(velocity[0], velocity[1])
    return closest_to_bearing(evaluations, target), turn


def cacoc2_select(uav: UavState, pheromone_field: PheromoneField, table: NeighborTable, chaotic: ChaoticState,
                  f: float, grid: GridSpec, step_cells: int, now_s: float = 0.0,
                  deposit_amount: float = 1.0) -> Cell:
    pheromone_field.deposit(uav.current_cell, deposit_amount)
    chosen, _ = _choose(uav, pheromone_field, table, chaotic, f, grid, step_cells, now_s)
    return chosen.cell


class Cacoc2Policy(BasePolicy):
    """Chaotic ant colony coverage with flock centering, weighted by ``f``."""

    name = "cacoc2"

    def __init__(self, f: float, deposit_amount: float = 1.0):
        if f < 0:
            raise ValueError(f"flocking weight must be non-negative, got {f}")
        super().__init__(deposit_amount)
        self.f = f
        self.stats.update({'left': 0, 'ahead': 0, 'right': 0})

    def select(self, agent: UavAgent, grid: GridSpec, step_cells: int, now_s: float) -> Cell:
        if agent.chaotic is None:
            raise ValueError(f"UAV {agent.state.uav_id} has no chaotic state")
        agent.pheromone_field.deposit(agent.state.current_cell, self.deposit_amount)
        chosen, turn = _choose(agent.state, agent.pheromone_field, agent.neighbor_table, agent.chaotic,
                               self.f, grid, step_cells, now_s)
        self.stats[turn.name.lower()] += 1
        return chosen.cell

    def describe(self) -> Dict[str, Any]:
        return {'f': self.f}
