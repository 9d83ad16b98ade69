"""Coverage and connectivity metrics: scan ledger, Tc, Jain fairness, NCC/ANC samples, mean/SEM."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from scripts.pheromone_field import Cell


class ScanLedger:
    """Per-cell scan counts and first-scan times, indexed [x, y]."""

    def __init__(self, cells_per_side: int):
        self.shape = (cells_per_side, cells_per_side)
        self.counts = np.zeros(self.shape, dtype=np.int64)
        self.first_scan = np.full(self.shape, np.inf)
        self.n_covered = 0

    @property
    def n_cells(self) -> int:
        return self.counts.size

    def record(self, cell: Cell, t: float):
        x, y = cell
        if self.counts[x, y] == 0:
            self.first_scan[x, y] = t
            self.n_covered += 1
        self.counts[x, y] += 1

    def covered_fraction(self) -> float:
        return self.n_covered / self.n_cells


def fairness(ledger: ScanLedger) -> float:
    """Jain's index (sum x)^2 / (n sum x^2) over final scan counts; 0 before anything is scanned."""
    counts = ledger.counts.astype(np.float64)
    squares = float(np.sum(counts * counts))
    if squares == 0.0:
        return 0.0
    return float(counts.sum()) ** 2 / (ledger.n_cells * squares)


def coverage_time(ledger: ScanLedger, target: float, sim_time: float) -> Tuple[float, bool]:
    """Earliest t at which ceil(target * n) cells were scanned. Returns (sim_time, True) if never."""
    if not 0.0 < target <= 1.0:
        raise ValueError(f"coverage target must be in (0, 1], got {target}")
    need = max(1, math.ceil(target * ledger.n_cells - 1e-9))
    times = np.sort(ledger.first_scan, axis=None)
    reached = times[need - 1]
    if not np.isfinite(reached) or reached > sim_time:
        return sim_time, True
    return float(reached), False


@dataclass(frozen=True)
class MetricSample:
    t: float
    ncc: int
    anc: float
    covered_fraction: float


@dataclass
class MetricsRecord:
    samples: List[MetricSample] = field(default_factory=list)
    tc_s: float = 0.0
    tc_censored: bool = True
    fairness: float = 0.0

    def add(self, sample: MetricSample):
        self.samples.append(sample)

    def _mean(self, attr: str, until: float = math.inf) -> float:
        values = [getattr(s, attr) for s in self.samples if s.t <= until]
        return float(np.mean(values)) if values else 0.0

    @property
    def ncc_mean(self) -> float:
        return self._mean('ncc')

    @property
    def anc_mean(self) -> float:
        return self._mean('anc')

    @property
    def ncc_mean_to_tc(self) -> float:
        return self._mean('ncc', self.tc_s)

    @property
    def anc_mean_to_tc(self) -> float:
        return self._mean('anc', self.tc_s)

    def summary(self) -> Dict[str, float]:
        return {
            'tc_s': self.tc_s,
            'tc_censored': self.tc_censored,
            'fairness': self.fairness,
            'ncc_mean': self.ncc_mean,
            'anc_mean': self.anc_mean,
            'ncc_mean_to_tc': self.ncc_mean_to_tc,
            'anc_mean_to_tc': self.anc_mean_to_tc,
        }


def mean_and_sem(values: Sequence[float]) -> Tuple[float, float]:
    """Sample mean and standard error (ddof=1). SEM is 0 for a single value."""
    if len(values) == 0:
        raise ValueError("mean_and_sem needs at least one value")
    data = np.asarray(values, dtype=np.float64)
    if data.size == 1:
        return float(data[0]), 0.0
    return float(data.mean()), float(data.std(ddof=1) / math.sqrt(data.size))
