"""Idealized periodic hello exchange among 1-hop neighbours."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from scripts.connectivity import NeighborClaim
from scripts.kinematics import UavState
from scripts.pheromone_field import Cell, PheromoneField, PheromonePatch, Point

logger = logging.getLogger("Comms")


@dataclass(frozen=True)
class HelloMessage:
    sender_id: int
    position: Point
    next_waypoint_cell: Cell
    patch: PheromonePatch = field(compare=False)
    timestamp_s: float


@dataclass
class NeighborEntry:
    position: Point
    next_waypoint_cell: Cell
    timestamp_s: float


class NeighborTable:
    """Last hello heard from each neighbour. Entries older than ``max_age_s`` are invisible."""

    def __init__(self, max_age_s: float):
        self.max_age_s = max_age_s
        self.entries: Dict[int, NeighborEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def upsert(self, message: HelloMessage):
        current = self.entries.get(message.sender_id)
        if current is not None and current.timestamp_s > message.timestamp_s:
            return
        self.entries[message.sender_id] = NeighborEntry(
            position=message.position,
            next_waypoint_cell=message.next_waypoint_cell,
            timestamp_s=message.timestamp_s,
        )

    def fresh(self, now_s: float) -> Dict[int, NeighborEntry]:
        """Entries no older than ``max_age_s``, in ascending neighbour id."""
        return {
            uav_id: entry
            for uav_id, entry in sorted(self.entries.items())
            if now_s - entry.timestamp_s <= self.max_age_s
        }

    def claims(self, now_s: float) -> List[NeighborClaim]:
        return [
            NeighborClaim(uav_id, entry.next_waypoint_cell, entry.timestamp_s)
            for uav_id, entry in self.fresh(now_s).items()
        ]


def build_hello(uav: UavState, pheromone_field: PheromoneField, t: float) -> HelloMessage:
    return HelloMessage(
        sender_id=uav.uav_id,
        position=uav.position,
        next_waypoint_cell=uav.next_waypoint_cell,
        patch=pheromone_field.extract_patch(uav.current_cell),
        timestamp_s=t,
    )


def deliver(messages: Sequence[HelloMessage], positions: Sequence[Tuple[int, Point]],
            tx_m: float) -> Dict[int, List[HelloMessage]]:
    """Lossless same-tick delivery to every UAV within ``tx_m`` of the sender (inclusive)."""
    inboxes: Dict[int, List[HelloMessage]] = {uav_id: [] for uav_id, _ in positions}
    for message in sorted(messages, key=lambda m: m.sender_id):
        sx, sy = message.position
        for uav_id, (x, y) in positions:
            if uav_id == message.sender_id:
                continue
            if math.hypot(x - sx, y - sy) <= tx_m:
                inboxes[uav_id].append(message)
    return inboxes


def apply_inbox(uav: UavState, table: NeighborTable, pheromone_field: PheromoneField,
                inbox: Sequence[HelloMessage]):
    """Merge received patches into the private field and refresh the neighbour table."""
    for message in inbox:
        if message.sender_id == uav.uav_id:
            continue
        pheromone_field.merge_patch(message.patch)
        table.upsert(message)
    if inbox:
        logger.debug(f"UAV {uav.uav_id} applied {len(inbox)} hello messages")
