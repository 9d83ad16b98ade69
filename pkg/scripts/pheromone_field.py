"""Digital repel-pheromone grid shared by every mobility policy."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple, Union

import numpy as np

Cell = Tuple[int, int]
Point = Tuple[float, float]

PATCH_RADIUS = 2

logger = logging.getLogger("PheromoneField")


@dataclass(frozen=True)
class GridSpec:
    """Square search map split into C x C cells.

    Cells are addressed as (x, y) with x growing east and y growing north;
    cell (0, 0) is the south-west corner.
    """

    width_m: float
    height_m: float
    cell_size_m: float
    cells_per_side: int

    def __post_init__(self):
        if self.cells_per_side < 3:
            raise ValueError(f"Grid needs at least 3 cells per side, got {self.cells_per_side}")
        if self.cell_size_m <= 0:
            raise ValueError(f"Cell size must be positive, got {self.cell_size_m}")
        expected = self.cells_per_side * self.cell_size_m
        if not (np.isclose(self.width_m, expected) and np.isclose(self.height_m, expected)):
            raise ValueError(
                f"Map must be square with side {expected} m, got {self.width_m} x {self.height_m} m"
            )

    @classmethod
    def from_map(cls, map_size_m: float, cell_size_m: float) -> "GridSpec":
        cells = map_size_m / cell_size_m
        if not np.isclose(cells, round(cells)):
            raise ValueError(f"Map size {map_size_m} m is not a multiple of cell size {cell_size_m} m")
        return cls(map_size_m, map_size_m, cell_size_m, int(round(cells)))

    @property
    def n_cells(self) -> int:
        return self.cells_per_side ** 2

    def in_map(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.cells_per_side and 0 <= y < self.cells_per_side

    def is_interior(self, cell: Cell) -> bool:
        x, y = cell
        last = self.cells_per_side - 1
        return 0 < x < last and 0 < y < last

    def cell_center(self, cell: Cell) -> Point:
        return ((cell[0] + 0.5) * self.cell_size_m, (cell[1] + 0.5) * self.cell_size_m)

    def cell_of(self, point: Point) -> Cell:
        """Cell containing a point; points on or past the outer edge map to the edge cell."""
        last = self.cells_per_side - 1
        x = min(max(int(np.floor(point[0] / self.cell_size_m)), 0), last)
        y = min(max(int(np.floor(point[1] / self.cell_size_m)), 0), last)
        return (x, y)


@dataclass
class PheromonePatch:
    """A (2r+1) x (2r+1) window of a field, indexed [dx + r, dy + r]."""

    center_cell: Cell
    values: np.ndarray
    present: np.ndarray
    radius: int = PATCH_RADIUS

    def __post_init__(self):
        side = 2 * self.radius + 1
        if self.values.shape != (side, side) or self.present.shape != (side, side):
            raise ValueError(f"Patch arrays must be {side}x{side}")

    @property
    def n_present(self) -> int:
        return int(self.present.sum())


@dataclass
class PheromoneField:
    """Per-UAV pheromone map.

    ``values`` is indexed ``[x, y]``. The outer ring of cells is pinned to
    ``boundary_value`` and acts as a repulsive wall. Deposits are buffered in
    ``pending_deposits`` and only become visible at the next :meth:`step`.
    """

    grid: GridSpec
    evaporation_rate: float
    diffusion_rate: float
    boundary_value: float
    values: np.ndarray = field(default=None, repr=False)
    pending_deposits: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for name, rate in (("evaporation_rate", self.evaporation_rate), ("diffusion_rate", self.diffusion_rate)):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be within [0, 1], got {rate}")
        side = self.grid.cells_per_side
        if self.values is None:
            self.values = np.zeros((side, side), dtype=np.float64)
            self._pin_border()
        if self.pending_deposits is None:
            self.pending_deposits = np.zeros((side, side), dtype=np.float64)

    def _pin_border(self):
        self.values[0, :] = self.boundary_value
        self.values[-1, :] = self.boundary_value
        self.values[:, 0] = self.boundary_value
        self.values[:, -1] = self.boundary_value

    def copy(self) -> "PheromoneField":
        return PheromoneField(
            grid=self.grid,
            evaporation_rate=self.evaporation_rate,
            diffusion_rate=self.diffusion_rate,
            boundary_value=self.boundary_value,
            values=self.values.copy(),
            pending_deposits=self.pending_deposits.copy(),
        )

    def value(self, cell: Cell) -> float:
        return float(self.values[cell[0], cell[1]])

    def deposit(self, cell: Cell, amount: float = 1.0):
        """Queue ``amount`` of repel pheromone for the next update interval."""
        if amount < 0:
            raise ValueError(f"Deposit amount must be non-negative, got {amount}")
        if not self.grid.is_interior(cell):
            logger.debug(f"Ignoring deposit on border cell {cell}")
            return
        self.pending_deposits[cell[0], cell[1]] += amount

    def step(self) -> "PheromoneField":
        """Advance one update interval (double-buffered, in place).

        new p = (1 - λ) * [(1 - ψ) * p + ∂p + (ψ / 8) * Σ p(8 neighbours)]
        """
        lam = self.evaporation_rate
        psi = self.diffusion_rate
        old = self.values
        padded = np.pad(old, 1, mode="constant", constant_values=0.0)
        neighbours = (
            padded[:-2, :-2] + padded[:-2, 1:-1] + padded[:-2, 2:]
            + padded[1:-1, :-2] + padded[1:-1, 2:]
            + padded[2:, :-2] + padded[2:, 1:-1] + padded[2:, 2:]
        )
        self.values = (1.0 - lam) * ((1.0 - psi) * old + self.pending_deposits + (psi / 8.0) * neighbours)
        self.pending_deposits = np.zeros_like(self.pending_deposits)
        self._pin_border()
        return self

    def look_ahead(self, cell: Cell) -> float:
        """Look-ahead pheromone P' = (4 p(cell) + Σ p(8 neighbours)) / 12.

        Neighbours outside the map count as ``boundary_value``.
        """
        if not self.grid.in_map(cell):
            raise ValueError(f"Cell {cell} is outside the map")
        window = self._window(cell, 1, self.boundary_value)
        return float((3.0 * window[1, 1] + window.sum()) / 12.0)

    def _window(self, cell: Cell, radius: int, fill: float) -> np.ndarray:
        side = 2 * radius + 1
        window = np.full((side, side), fill, dtype=np.float64)
        last = self.grid.cells_per_side - 1
        x0, y0 = cell[0] - radius, cell[1] - radius
        xs, xe = max(x0, 0), min(cell[0] + radius, last) + 1
        ys, ye = max(y0, 0), min(cell[1] + radius, last) + 1
        window[xs - x0:xe - x0, ys - y0:ye - y0] = self.values[xs:xe, ys:ye]
        return window

    def extract_patch(self, center: Cell, radius: int = PATCH_RADIUS) -> PheromonePatch:
        if not self.grid.in_map(center):
            raise ValueError(f"Patch center {center} is outside the map")
        values = self._window(center, radius, 0.0)
        offsets = np.arange(-radius, radius + 1)
        xs = center[0] + offsets[:, None]
        ys = center[1] + offsets[None, :]
        side = self.grid.cells_per_side
        present = (xs >= 0) & (xs < side) & (ys >= 0) & (ys < side)
        return PheromonePatch(center_cell=center, values=values, present=present, radius=radius)

    def merge_patch(self, patch: PheromonePatch):
        """Max-merge a received patch; border cells stay pinned."""
        r = patch.radius
        cx, cy = patch.center_cell
        inner_last = self.grid.cells_per_side - 2
        x0, y0 = cx - r, cy - r
        xs, xe = max(x0, 1), min(cx + r, inner_last) + 1
        ys, ye = max(y0, 1), min(cy + r, inner_last) + 1
        if xs >= xe or ys >= ye:
            return
        incoming = patch.values[xs - x0:xe - x0, ys - y0:ye - y0]
        present = patch.present[xs - x0:xe - x0, ys - y0:ye - y0]
        target = self.values[xs:xe, ys:ye]
        np.maximum(target, np.where(present, incoming, target), out=target)

    def total_interior(self) -> float:
        return float(self.values[1:-1, 1:-1].sum())

    def dump_csv(self, path: Union[str, Path]):
        """Write the field as C rows (y = 0 first) by C columns, 6 decimals."""
        np.savetxt(path, self.values.T, fmt="%.6f", delimiter=",", newline="\n")


def new_field(grid: GridSpec, evaporation_rate: float, diffusion_rate: float,
              boundary_value: float) -> PheromoneField:
    """Fresh field: interior zeros, border ring at ``boundary_value``."""
    return PheromoneField(
        grid=grid,
        evaporation_rate=evaporation_rate,
        diffusion_rate=diffusion_rate,
        boundary_value=boundary_value,
    )
