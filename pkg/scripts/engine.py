"""Discrete-time swarm simulation loop and seeded batch runs."""

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from scripts.base_policy import BasePolicy, UavAgent
from scripts.cacoc2_policy import Cacoc2Policy
from scripts.cap_policy import CapPolicy
from scripts.comms import NeighborTable, apply_inbox, build_hello, deliver
from scripts.config import ScenarioConfig
from scripts.connectivity import anc, build_graph, ncc
from scripts.kinematics import (
    advance,
    cells_traversed,
    collision_avoidance,
    initial_states,
    step_cells_for,
    waypoint_reached,
)
from scripts.metrics import MetricSample, MetricsRecord, ScanLedger, coverage_time, fairness, mean_and_sem
from scripts.pheromone_field import Cell, GridSpec, PheromoneField, new_field
from scripts.pheromone_policy import PheromonePolicy
from scripts.rossler import new_chaotic_state

SUMMARY_METRICS = ('tc_s', 'fairness', 'ncc_mean', 'anc_mean', 'ncc_mean_to_tc', 'anc_mean_to_tc')
TRACE_PERIOD_S = 1.0


def make_policy(config: ScenarioConfig) -> BasePolicy:
    """Policy object for the configured policy name."""
    if config.policy == "cap":
        return CapPolicy(config.beta, config.tx_range_m, config.deposit_amount)
    if config.policy == "pheromone":
        return PheromonePolicy(config.deposit_amount)
    if config.policy == "cacoc2":
        return Cacoc2Policy(config.f, config.deposit_amount)
    raise ValueError(f"Unknown policy: {config.policy}")


@dataclass
class RunTrace:
    trajectory: List[Tuple[float, int, float, float, float]] = field(default_factory=list)
    hellos: List[Tuple[float, int, int]] = field(default_factory=list)
    field_snapshot: Optional[PheromoneField] = None


@dataclass
class RunResult:
    config: ScenarioConfig
    metrics: MetricsRecord = field(default_factory=MetricsRecord)
    waypoint_log: Dict[int, List[Cell]] = field(default_factory=dict)
    policy_stats: Dict[str, Any] = field(default_factory=dict)
    trace: Optional[RunTrace] = None
    error: Optional[str] = None

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def failed(self) -> bool:
        return self.error is not None

    def row(self) -> Dict[str, Any]:
        """One self-describing results row: key columns, metric summary, then the full config echo."""
        config = self.config
        row: Dict[str, Any] = {'policy': config.policy}
        row.update(config.policy_params())
        row.update({'n_uavs': config.n_uavs, 'speed_mps': config.speed_mps, 'seed': config.seed})
        if self.failed:
            row.update({name: None for name in SUMMARY_METRICS})
            row['tc_censored'] = None
        else:
            row.update(self.metrics.summary())
        row['failed'] = self.failed
        row['error'] = self.error or ""
        for key, value in config.model_dump().items():
            if key not in row:
                row[key] = value
        return row


@dataclass
class BatchResult:
    config: ScenarioConfig
    runs: List[RunResult]
    aggregates: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.runs if r.failed)

    @classmethod
    def from_runs(cls, config: ScenarioConfig, runs: Sequence[RunResult]) -> "BatchResult":
        runs = sorted(runs, key=lambda r: r.seed)
        good = [r for r in runs if not r.failed]
        aggregates = {}
        for name in SUMMARY_METRICS:
            if good:
                aggregates[name] = mean_and_sem([r.metrics.summary()[name] for r in good])
            else:
                aggregates[name] = (math.nan, math.nan)
        if good:
            aggregates['tc_censored'] = mean_and_sem([float(r.metrics.tc_censored) for r in good])
        else:
            aggregates['tc_censored'] = (math.nan, math.nan)
        return cls(config=config, runs=runs, aggregates=aggregates)


class SimulationEngine:
    """One seeded run.

    Tick order: motion (with collision overrides) and scans, arrival decisions in
    ascending id, pheromone step, hellos, metric sampling.
    """

    def __init__(self, config: ScenarioConfig, policy: Optional[BasePolicy] = None, trace: bool = False):
        self.config = config
        self.logger = logging.getLogger("Engine")
        self.grid = GridSpec.from_map(config.map_size_m, config.cell_size_m)
        self.policy = policy if policy is not None else make_policy(config)
        self.step_cells = step_cells_for(config.speed_mps, config.effective_decision_interval_s,
                                         config.cell_size_m)
        self.ledger = ScanLedger(self.grid.cells_per_side)
        self.record = MetricsRecord()
        self.trace = RunTrace() if trace else None
        self.agents = self._initialize_agents()
        self.last_cell: Dict[int, Optional[Cell]] = {a.state.uav_id: None for a in self.agents}
        self.evading = frozenset()
        self.pheromone_ticks = config.ticks(config.pheromone_step_period_s)
        self.hello_ticks = config.ticks(config.hello_period_s)
        self.sample_ticks = config.ticks(config.metric_sample_period_s)
        self.trace_ticks = max(1, config.ticks(TRACE_PERIOD_S))

    def _initialize_agents(self) -> List[UavAgent]:
        config = self.config
        states = initial_states(config.n_uavs, self.grid, config.speed_mps, config.deployment_spacing_m,
                                config.max_turn_rate_rad_s)
        agents = []
        for state in states:
            rng = np.random.default_rng(np.random.SeedSequence([config.seed, state.uav_id]))
            chaotic = new_chaotic_state(rng) if self.policy.name == Cacoc2Policy.name else None
            agents.append(UavAgent(
                state=state,
                pheromone_field=new_field(self.grid, config.evaporation_rate, config.diffusion_rate,
                                          config.boundary_value),
                neighbor_table=NeighborTable(config.effective_neighbor_max_age_s),
                chaotic=chaotic,
            ))
        return agents

    def _decide(self, agent: UavAgent, t: float):
        # the decision treats the reached waypoint as the current cell
        agent.state = replace(agent.state, current_cell=agent.state.next_waypoint_cell)
        cell = self.policy.decide(agent, self.grid, self.step_cells, t)
        agent.state = replace(
            agent.state,
            current_cell=self.grid.cell_of(agent.state.position),
            next_waypoint_cell=cell,
            target_point=self.grid.cell_center(cell),
        )

    def _move_and_scan(self, t: float):
        config = self.config
        self.evading = collision_avoidance([a.state for a in self.agents], config.collision_distance_m,
                                           config.collision_release_m, active=self.evading)
        for agent in self.agents:
            uav_id = agent.state.uav_id
            start = agent.state.position
            agent.state = advance(agent.state, config.dt_s, self.grid, evade=uav_id in self.evading)
            for cell in cells_traversed(start, agent.state.position, self.grid):
                if cell != self.last_cell[uav_id]:
                    self.ledger.record(cell, t)
                    self.last_cell[uav_id] = cell

    def _exchange_hellos(self, t: float):
        messages = [build_hello(a.state, a.pheromone_field, t) for a in self.agents]
        positions = [(a.state.uav_id, a.state.position) for a in self.agents]
        inboxes = deliver(messages, positions, self.config.tx_range_m)
        for agent in self.agents:
            apply_inbox(agent.state, agent.neighbor_table, agent.pheromone_field, inboxes[agent.state.uav_id])
        if self.trace is not None:
            received = Counter(m.sender_id for inbox in inboxes.values() for m in inbox)
            for uav_id in sorted(inboxes):
                self.trace.hellos.append((t, uav_id, received[uav_id]))

    def _sample(self, t: float):
        positions = [(a.state.uav_id, a.state.position) for a in self.agents]
        graph = build_graph(positions, self.config.tx_range_m, t)
        self.record.add(MetricSample(t=t, ncc=ncc(graph), anc=anc(graph),
                                     covered_fraction=self.ledger.covered_fraction()))

    def _trace_positions(self, t: float):
        for agent in self.agents:
            x, y = agent.state.position
            self.trace.trajectory.append((t, agent.state.uav_id, x, y, math.degrees(agent.state.heading)))

    def start(self):
        """Initial decisions, hello exchange and trace row at t = 0."""
        config = self.config
        self.logger.info(f"Run start: policy={self.policy.name} {self.policy.describe()} "
                         f"n_uavs={config.n_uavs} speed={config.speed_mps} seed={config.seed}")
        for agent in self.agents:
            self._decide(agent, 0.0)
        self._exchange_hellos(0.0)
        if self.trace is not None:
            self._trace_positions(0.0)

    def tick(self, k: int):
        """Advance to t = k * dt."""
        config = self.config
        t = k * config.dt_s
        self._move_and_scan(t)
        for agent in self.agents:
            if waypoint_reached(agent.state):
                self._decide(agent, t)
        if k % self.pheromone_ticks == 0:
            for agent in self.agents:
                agent.pheromone_field.step()
        if k % self.hello_ticks == 0:
            self._exchange_hellos(t)
        if k % self.sample_ticks == 0:
            self._sample(t)
        if self.trace is not None and k % self.trace_ticks == 0:
            self._trace_positions(t)

    def run(self) -> RunResult:
        config = self.config
        self.start()
        for k in range(1, config.ticks(config.sim_time_s) + 1):
            self.tick(k)

        self.record.tc_s, self.record.tc_censored = coverage_time(self.ledger, config.coverage_target,
                                                                   config.sim_time_s)
        self.record.fairness = fairness(self.ledger)
        if self.trace is not None:
            self.trace.field_snapshot = self.agents[0].pheromone_field.copy()
        self.logger.info(f"Run done: seed={config.seed} Tc={self.record.tc_s:.1f}s "
                         f"censored={self.record.tc_censored} F={self.record.fairness:.3f} "
                         f"NCC={self.record.ncc_mean:.2f} ANC={self.record.anc_mean:.2f}")
        return RunResult(
            config=config,
            metrics=self.record,
            waypoint_log={a.state.uav_id: list(a.waypoints) for a in self.agents},
            policy_stats=self.policy.get_stats(),
            trace=self.trace,
        )


def run(config: ScenarioConfig, trace: bool = False) -> RunResult:
    return SimulationEngine(config, trace=trace).run()


def run_guarded(config: ScenarioConfig, trace: bool = False) -> RunResult:
    """Like :func:`run`, but a failure becomes a RunResult carrying the error text."""
    try:
        return run(config, trace=trace)
    except Exception as e:
        logging.getLogger("Engine").error(f"Run failed (policy={config.policy}, seed={config.seed}): {e}")
        return RunResult(config=config, error=f"{type(e).__name__}: {e}")


def run_batch(config: ScenarioConfig, seeds: Sequence[int], jobs: int = 1, trace: bool = False,
              catch_errors: bool = False) -> BatchResult:
    """Independent runs per seed, results ordered by seed, with mean and SEM per metric."""
    if not seeds:
        raise ValueError("run_batch needs at least one seed")
    configs = [config.model_copy(update={'seed': seed}) for seed in seeds]
    runner = run_guarded if catch_errors else run
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(configs))) as pool:
            runs = list(pool.map(runner, configs, [trace] * len(configs)))
    else:
        runs = [runner(c, trace) for c in configs]
    return BatchResult.from_runs(config, runs)
