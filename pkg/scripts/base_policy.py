"""Base class for the mobility decision policies."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from scripts.comms import NeighborTable
from scripts.kinematics import Direction, UavState, candidate_waypoints
from scripts.pheromone_field import Cell, GridSpec, PheromoneField
from scripts.rossler import ChaoticState


@dataclass
class UavAgent:
    """Everything one UAV owns: flight state, private map, neighbour table."""

    state: UavState
    pheromone_field: PheromoneField
    neighbor_table: NeighborTable
    chaotic: Optional[ChaoticState] = None
    waypoints: List[Cell] = field(default_factory=list)


@dataclass
class CandidateEvaluation:
    cell: Cell
    direction: Direction
    turn: int
    look_ahead: float
    k_estimate: float = 0.0
    alpha: float = 1.0
    score: float = 0.0
    share: float = 0.0

    @property
    def clamped_look_ahead(self) -> float:
        return min(max(self.look_ahead, 0.0), 1.0)


def tie_break(evaluation: CandidateEvaluation) -> Tuple[int, int]:
    """Smaller absolute turn first, then lower direction index."""
    return (abs(evaluation.turn), int(evaluation.direction))


def evaluate_candidates(state: UavState, pheromone_field: PheromoneField, grid: GridSpec,
                        step_cells: int) -> List[CandidateEvaluation]:
    """Five candidates with their look-ahead pheromone filled in."""
    return [
        CandidateEvaluation(
            cell=cell,
            direction=direction,
            turn=index - 2,
            look_ahead=pheromone_field.look_ahead(cell),
        )
        for index, (direction, cell) in enumerate(candidate_waypoints(state, grid, step_cells))
    ]


class BasePolicy(ABC):
    """A policy picks the next waypoint cell each time a UAV reaches its current one."""

    name = "base"

    def __init__(self, deposit_amount: float = 1.0):
        self.deposit_amount = deposit_amount
        self.logger = logging.getLogger(f"Policy.{self.name}")
        self.stats = {
            'decisions': 0,
        }

    def decide(self, agent: UavAgent, grid: GridSpec, step_cells: int, now_s: float) -> Cell:
        """Run :meth:`select` and book-keep the decision."""
        cell = self.select(agent, grid, step_cells, now_s)
        self.stats['decisions'] += 1
        agent.waypoints.append(cell)
        return cell

    @abstractmethod
    def select(self, agent: UavAgent, grid: GridSpec, step_cells: int, now_s: float) -> Cell:
        """Deposit at the reached cell and return the next waypoint cell."""

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Policy name and tuning parameters for output metadata."""

    def get_stats(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'params': self.describe(),
            'stats': dict(self.stats),
        }
