"""Repel-pheromone baseline: fly toward the least-visited candidate."""

from typing import Any, Dict, List

from scripts.base_policy import BasePolicy, CandidateEvaluation, UavAgent, evaluate_candidates, tie_break
from scripts.kinematics import UavState
from scripts.pheromone_field import Cell, GridSpec, PheromoneField


def lowest_pheromone(evaluations: List[CandidateEvaluation]) -> CandidateEvaluation:
    return min(evaluations, key=lambda e: (e.look_ahead,) + tie_break(e))


def pheromone_select(uav: UavState, pheromone_field: PheromoneField, grid: GridSpec, step_cells: int,
                     deposit_amount: float = 1.0) -> Cell:
    pheromone_field.deposit(uav.current_cell, deposit_amount)
    return lowest_pheromone(evaluate_candidates(uav, pheromone_field, grid, step_cells)).cell


class PheromonePolicy(BasePolicy):

    name = "pheromone"

    def select(self, agent: UavAgent, grid: GridSpec, step_cells: int, now_s: float) -> Cell:
        return pheromone_select(agent.state, agent.pheromone_field, grid, step_cells, self.deposit_amount)

    def describe(self) -> Dict[str, Any]:
        return {}
