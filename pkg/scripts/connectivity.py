"""Distance-weighted connectivity and disk-graph network metrics."""

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from scripts.pheromone_field import Cell, GridSpec, Point

FULL_LINK_FRACTION = 0.6


class NeighborClaim(NamedTuple):
    """A neighbour's announced next-waypoint cell, as last heard."""

    uav_id: int
    next_waypoint_cell: Cell
    timestamp_s: float


@dataclass(frozen=True)
class LinkGraph:
    graph: nx.Graph
    timestamp_s: float = 0.0

    @property
    def n_nodes(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def n_edges(self) -> int:
        return self.graph.number_of_edges()


def gamma(d: float, tx_m: float) -> float:
    """Link weight: 1 up to 0.6 Tx, then linear down to 0 at Tx, 0 beyond."""
    if tx_m <= 0:
        raise ValueError(f"Transmission range must be positive, got {tx_m}")
    if d <= FULL_LINK_FRACTION * tx_m:
        return 1.0
    if d <= tx_m:
        return 2.5 * (1.0 - d / tx_m)
    return 0.0


def weighted_degree(u_position: Point, neighbor_positions: Iterable[Point], tx_m: float) -> float:
    """K = sum of gamma over the given neighbours."""
    ux, uy = u_position
    return sum(gamma(math.hypot(vx - ux, vy - uy), tx_m) for vx, vy in neighbor_positions)


def estimate_k_at(candidate_cell: Cell, neighbor_claims: Sequence[NeighborClaim], grid: GridSpec,
                  tx_m: float, now_s: Optional[float] = None,
                  max_age_s: Optional[float] = None) -> float:
    """Predicted K if this UAV sat at ``candidate_cell`` and every neighbour at its announced cell.

    Claims older than ``max_age_s`` (relative to ``now_s``) are ignored.
    """
    if now_s is not None and max_age_s is not None:
        neighbor_claims = [c for c in neighbor_claims if now_s - c.timestamp_s <= max_age_s]
    positions = [grid.cell_center(c.next_waypoint_cell) for c in neighbor_claims]
    return weighted_degree(grid.cell_center(candidate_cell), positions, tx_m)


def build_graph(positions: Sequence[Tuple[int, Point]], tx_m: float, timestamp_s: float = 0.0) -> LinkGraph:
    """Undirected disk graph; an edge joins every pair within ``tx_m`` (inclusive)."""
    graph = nx.Graph()
    graph.add_nodes_from(uav_id for uav_id, _ in positions)
    if len(positions) > 1:
        ids = [uav_id for uav_id, _ in positions]
        coords = np.array([p for _, p in positions], dtype=np.float64)
        diff = coords[:, None, :] - coords[None, :, :]
        distances = np.hypot(diff[..., 0], diff[..., 1])
        rows, cols = np.nonzero(np.triu(distances <= tx_m, k=1))
        graph.add_edges_from((ids[i], ids[j]) for i, j in zip(rows, cols))
    return LinkGraph(graph=graph, timestamp_s=timestamp_s)


def ncc(link_graph: LinkGraph) -> int:
    """Number of connected components."""
    return nx.number_connected_components(link_graph.graph)


def anc(link_graph: LinkGraph) -> float:
    """Average node degree, 2|E| / |V|."""
    if link_graph.n_nodes == 0:
        raise ValueError("ANC is undefined for an empty graph")
    return 2.0 * link_graph.n_edges / link_graph.n_nodes
