"""Fixed-wing point-mass motion on the search grid.

Headings are radians, 0 = north (+y), positive clockwise.
"""

import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from scripts.pheromone_field import Cell, GridSpec, Point

TWO_PI = 2.0 * math.pi
SECTOR = math.pi / 4.0


class Direction(IntEnum):
    """Eight-way compass rose, clockwise from north."""

    N = 0
    NE = 1
    E = 2
    SE = 3
    S = 4
    SW = 5
    W = 6
    NW = 7

    @property
    def offset(self) -> Tuple[int, int]:
        return _OFFSETS[self.value]

    @property
    def angle(self) -> float:
        return self.value * SECTOR

    def rotate(self, steps: int) -> "Direction":
        return Direction((self.value + steps) % 8)


_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))


@dataclass(frozen=True)
class UavState:
    uav_id: int
    position: Point
    heading: float
    speed: float
    current_cell: Cell
    next_waypoint_cell: Cell
    target_point: Point
    max_turn_rate: float
    arrival_tolerance: float


def wrap_angle(angle: float) -> float:
    """Wrap to [-pi, pi)."""
    return (angle + math.pi) % TWO_PI - math.pi


def bearing(p0: Point, p1: Point) -> float:
    return math.atan2(p1[0] - p0[0], p1[1] - p0[1])


def heading_vector(heading: float) -> np.ndarray:
    return np.array([math.sin(heading), math.cos(heading)])


def discretize_heading(heading: float) -> Direction:
    """Nearest of the 8 sector centres; exact sector boundaries round clockwise."""
    degrees = math.degrees(heading) % 360.0
    return Direction(int(math.floor((degrees + 22.5) / 45.0)) % 8)


def step_cells_for(speed: float, decision_interval: float, cell_size: float) -> int:
    return max(1, int(round(speed * decision_interval / cell_size)))


def _clamp_to_interior(cell: Cell, grid: GridSpec) -> Cell:
    inner_last = grid.cells_per_side - 2
    return (min(max(cell[0], 1), inner_last), min(max(cell[1], 1), inner_last))


def candidate_directions(state: UavState) -> List[Direction]:
    """Directions d-2..d+2 around the discretized heading, in that order."""
    d = discretize_heading(state.heading)
    return [d.rotate(k) for k in (-2, -1, 0, 1, 2)]


def candidate_waypoints(state: UavState, grid: GridSpec, step_cells: int) -> List[Tuple[Direction, Cell]]:
    """The five forward next-waypoint cells as (direction, cell) pairs.

    Out-of-interior candidates are pulled back along their own offset ray;
    if even one step along the ray leaves the interior, coordinates are clamped.
    """
    if step_cells < 1:
        raise ValueError(f"step_cells must be >= 1, got {step_cells}")
    cx, cy = state.current_cell
    candidates = []
    for direction in candidate_directions(state):
        ox, oy = direction.offset
        chosen = None
        for m in range(step_cells, 0, -1):
            cell = (cx + m * ox, cy + m * oy)
            if grid.is_interior(cell):
                chosen = cell
                break
        if chosen is None:
            chosen = _clamp_to_interior((cx + ox, cy + oy), grid)
        candidates.append((direction, chosen))
    return candidates


def advance(state: UavState, dt: float, grid: GridSpec, evade: bool = False) -> UavState:
    """Turn toward the target (rate-limited), then fly speed * dt along the new heading.

    With ``evade`` set the UAV ignores its target and turns right at full rate.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    max_delta = state.max_turn_rate * dt
    if evade:
        delta = max_delta
    else:
        if state.target_point == state.position:
            delta = 0.0
        else:
            error = wrap_angle(bearing(state.position, state.target_point) - state.heading)
            delta = min(max(error, -max_delta), max_delta)
    heading = (state.heading + delta) % TWO_PI
    distance = state.speed * dt
    x = state.position[0] + distance * math.sin(heading)
    y = state.position[1] + distance * math.cos(heading)
    # failsafe: never leave the map
    x = min(max(x, 0.0), grid.width_m)
    y = min(max(y, 0.0), grid.height_m)
    return replace(state, position=(x, y), heading=heading, current_cell=grid.cell_of((x, y)))


def waypoint_reached(state: UavState) -> bool:
    dx = state.target_point[0] - state.position[0]
    dy = state.target_point[1] - state.position[1]
    return math.hypot(dx, dy) <= state.arrival_tolerance


def cells_traversed(p0: Point, p1: Point, grid: GridSpec) -> List[Cell]:
    """Cells crossed by segment p0 -> p1, in travel order (grid DDA).

    When a lattice corner is hit exactly, the x crossing is taken before the y one.
    An end point lying exactly on a grid line belongs to the cell being left.
    """
    size = grid.cell_size_m
    dx = p1[0] - p0[0]
    dy = p1[1] - p0[1]
    start = grid.cell_of(p0)
    end = _end_cell(p1, dx, dy, grid)
    cells = [start]
    if start == end:
        return cells
    step_x = 1 if end[0] > start[0] else -1
    step_y = 1 if end[1] > start[1] else -1
    if dx != 0.0:
        boundary_x = (start[0] + (1 if step_x > 0 else 0)) * size
        t_max_x = (boundary_x - p0[0]) / dx
        t_delta_x = size / abs(dx)
    else:
        t_max_x = t_delta_x = math.inf
    if dy != 0.0:
        boundary_y = (start[1] + (1 if step_y > 0 else 0)) * size
        t_max_y = (boundary_y - p0[1]) / dy
        t_delta_y = size / abs(dy)
    else:
        t_max_y = t_delta_y = math.inf
    x, y = start
    for _ in range(abs(end[0] - start[0]) + abs(end[1] - start[1])):
        if y == end[1] or (x != end[0] and t_max_x <= t_max_y):
            x += step_x
            t_max_x += t_delta_x
        else:
            y += step_y
            t_max_y += t_delta_y
        cells.append((x, y))
    return cells


def _end_cell(p1: Point, dx: float, dy: float, grid: GridSpec) -> Cell:
    x, y = grid.cell_of(p1)
    fx = p1[0] / grid.cell_size_m
    fy = p1[1] / grid.cell_size_m
    if dx > 0 and fx == math.floor(fx) and x == int(fx):
        x -= 1
    if dy > 0 and fy == math.floor(fy) and y == int(fy):
        y -= 1
    return (x, y)


def collision_avoidance(states: Sequence[UavState], d_min: float, release_distance: float,
                        active: Optional[Iterable[int]] = None) -> FrozenSet[int]:
    """Ids of UAVs that must evade this tick.

    For every pair closer than ``d_min`` the higher id yields. A yielding UAV
    keeps evading until its nearest other UAV is farther than ``release_distance``.
    """
    if len(states) < 2:
        return frozenset()
    ids = [s.uav_id for s in states]
    positions = np.array([s.position for s in states], dtype=np.float64)
    diff = positions[:, None, :] - positions[None, :, :]
    distances = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(distances, np.inf)
    overrides = set()
    close_i, close_j = np.nonzero(distances < d_min)
    for i, j in zip(close_i, close_j):
        overrides.add(max(ids[i], ids[j]))
    if active:
        index = {uav_id: k for k, uav_id in enumerate(ids)}
        for uav_id in active:
            k = index.get(uav_id)
            if k is not None and distances[k].min() <= release_distance:
                overrides.add(uav_id)
    return frozenset(overrides)


def initial_states(n_uavs: int, grid: GridSpec, speed: float, spacing: float,
                   max_turn_rate: float) -> List[UavState]:
    """Row of UAVs centred at (width / 2, 2 cells up), all heading north."""
    cx = grid.width_m / 2.0
    cy = 2.0 * grid.cell_size_m
    states = []
    for uav_id in range(n_uavs):
        x = cx + (uav_id - (n_uavs - 1) / 2.0) * spacing
        x = min(max(x, 0.0), grid.width_m)
        position = (x, cy)
        cell = grid.cell_of(position)
        states.append(UavState(
            uav_id=uav_id,
            position=position,
            heading=0.0,
            speed=speed,
            current_cell=cell,
            next_waypoint_cell=cell,
            target_point=grid.cell_center(cell),
            max_turn_rate=max_turn_rate,
            arrival_tolerance=grid.cell_size_m / 2.0,
        ))
    return states
