"""
Connectivity-aware pheromone (CAP) waypoint selection.

Each candidate i is scored W_i = alpha_i * (1 - P'_i), where P'_i is the
look-ahead pheromone clamped to [0, 1] and alpha_i = min(K_i / beta, 1)
discounts candidates at which the UAV is predicted to be poorly connected.
"""

from typing import Any, Dict, List

from scripts.base_policy import BasePolicy, CandidateEvaluation, UavAgent, evaluate_candidates, tie_break
from scripts.comms import NeighborTable
from scripts.connectivity import estimate_k_at
from scripts.kinematics import UavState
from scripts.pheromone_field import Cell, GridSpec, PheromoneField


def connectivity_factor(k_estimate: float, beta: float) -> float:
    """alpha = K / beta below beta, 1 at or above it. beta = 0 is the coverage-only limit."""
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    if beta == 0 or k_estimate >= beta:
        return 1.0
    return k_estimate / beta


def score_candidates(evaluations: List[CandidateEvaluation], beta: float) -> List[CandidateEvaluation]:
    """Fill alpha, W and the normalised share from each candidate's P' and K."""
    for evaluation in evaluations:
        evaluation.alpha = connectivity_factor(evaluation.k_estimate, beta)
        evaluation.score = evaluation.alpha * (1.0 - evaluation.clamped_look_ahead)
    total = sum(e.score for e in evaluations)
    for evaluation in evaluations:
        evaluation.share = evaluation.score / total if total > 0 else 0.0
    return evaluations


def best_by_score(evaluations: List[CandidateEvaluation]) -> CandidateEvaluation:
    """Highest W; ties go to lower raw P', then the smaller turn, then lower direction index."""
    return min(evaluations, key=lambda e: (-e.score, e.look_ahead) + tie_break(e))


def cap_evaluate(uav: UavState, pheromone_field: PheromoneField, table: NeighborTable, beta: float,
                 grid: GridSpec, step_cells: int, tx_m: float, now_s: float) -> List[CandidateEvaluation]:
    evaluations = evaluate_candidates(uav, pheromone_field, grid, step_cells)
    claims = table.claims(now_s)
    for evaluation in evaluations:
        evaluation.k_estimate = estimate_k_at(evaluation.cell, claims, grid, tx_m)
    return score_candidates(evaluations, beta)


def cap_select(uav: UavState, pheromone_field: PheromoneField, table: NeighborTable, beta: float,
               grid: GridSpec, step_cells: int, tx_m: float, now_s: float = 0.0,
               deposit_amount: float = 1.0) -> Cell:
    """Deposit at the reached cell, then pick the candidate with maximum W."""
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    pheromone_field.deposit(uav.current_cell, deposit_amount)
    evaluations = cap_evaluate(uav, pheromone_field, table, beta, grid, step_cells, tx_m, now_s)
    return best_by_score(evaluations).cell


class CapPolicy(BasePolicy):
    """CAP: trades coverage for predicted connectivity through beta."""

    name = "cap"

    def __init__(self, beta: float, tx_m: float, deposit_amount: float = 1.0):
        if beta < 0:
            raise ValueError(f"beta must be non-negative, got {beta}")
        super().__init__(deposit_amount)
        self.beta = beta
        self.tx_m = tx_m
        self.stats['saturated_choices'] = 0

    def select(self, agent: UavAgent, grid: GridSpec, step_cells: int, now_s: float) -> Cell:
        uav = agent.state
        agent.pheromone_field.deposit(uav.current_cell, self.deposit_amount)
        evaluations = cap_evaluate(uav, agent.pheromone_field, agent.neighbor_table, self.beta,
                                   grid, step_cells, self.tx_m, now_s)
        best = best_by_score(evaluations)
        if best.alpha >= 1.0:
            self.stats['saturated_choices'] += 1
        return best.cell

    def describe(self) -> Dict[str, Any]:
        return {'beta': self.beta}
