"""Scenario and experiment configuration.

A config file is flat JSON: scenario keys (map, swarm, radio, pheromone,
timing) sit next to sweep keys (policies, betas, fs, uav_counts, speeds,
runs_per_point, ...). Environment variables ``SWARMCAP_<KEY>`` override the
file, and CLI flags override both.
"""

import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

ENV_PREFIX = "SWARMCAP_"
POLICIES = ("cap", "pheromone", "cacoc2")
PolicyName = Literal["cap", "pheromone", "cacoc2"]

logger = logging.getLogger("Config")


class ConfigError(ValueError):
    """Raised for any invalid or unreadable configuration."""


def _is_multiple(period: float, dt: float) -> bool:
    ratio = period / dt
    return abs(ratio - round(ratio)) <= 1e-9 * max(1.0, abs(ratio)) and round(ratio) >= 1


class ScenarioConfig(BaseModel):
    """One simulation run. Defaults follow the reference parameter table (6 km map, 20 UAVs)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    map_size_m: float = Field(6000.0, gt=0)
    cell_size_m: float = Field(100.0, gt=0)
    n_uavs: int = Field(20, ge=1)
    speed_mps: float = Field(20.0, gt=0)
    tx_range_m: float = Field(1000.0, gt=0)
    policy: PolicyName = "cap"
    beta: float = Field(2.0, ge=0)
    f: float = Field(0.6, ge=0)
    evaporation_rate: float = Field(0.006, ge=0, le=1)
    diffusion_rate: float = Field(0.006, ge=0, le=1)
    boundary_value: float = Field(4.0, ge=0)
    deposit_amount: float = Field(1.0, gt=0)
    sim_time_s: float = Field(8000.0, gt=0)
    decision_interval_s: Optional[float] = Field(None, gt=0)
    hello_period_s: float = Field(2.0, gt=0)
    neighbor_max_age_s: Optional[float] = Field(None, gt=0)
    metric_sample_period_s: float = Field(10.0, gt=0)
    pheromone_step_period_s: float = Field(1.0, gt=0)
    dt_s: float = Field(0.1, gt=0)
    coverage_target: float = Field(0.9, gt=0, le=1)
    max_turn_rate_deg_s: float = Field(60.0, gt=0)
    collision_distance_m: float = Field(30.0, ge=0)
    collision_release_m: float = Field(50.0, ge=0)
    deployment_spacing_m: float = Field(50.0, ge=0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioConfig":
        cells = self.map_size_m / self.cell_size_m
        if abs(cells - round(cells)) > 1e-9 or round(cells) < 3:
            raise ValueError(
                f"map_size_m ({self.map_size_m}) must be a multiple of cell_size_m ({self.cell_size_m}) "
                f"giving at least 3 cells per side"
            )
        for name in ("hello_period_s", "metric_sample_period_s", "pheromone_step_period_s", "sim_time_s"):
            if not _is_multiple(getattr(self, name), self.dt_s):
                raise ValueError(f"{name} must be an integer multiple of dt_s ({self.dt_s})")
        if self.collision_release_m < self.collision_distance_m:
            raise ValueError("collision_release_m must be >= collision_distance_m")
        return self

    @property
    def cells_per_side(self) -> int:
        return int(round(self.map_size_m / self.cell_size_m))

    @property
    def effective_decision_interval_s(self) -> float:
        if self.decision_interval_s is not None:
            return self.decision_interval_s
        return 5.0 if self.speed_mps <= 30.0 else 10.0

    @property
    def effective_neighbor_max_age_s(self) -> float:
        """Neighbour entries expire after two hello periods unless set explicitly."""
        if self.neighbor_max_age_s is not None:
            return self.neighbor_max_age_s
        return 2.0 * self.hello_period_s

    @property
    def max_turn_rate_rad_s(self) -> float:
        return math.radians(self.max_turn_rate_deg_s)

    def ticks(self, period_s: float) -> int:
        return int(round(period_s / self.dt_s))

    def policy_params(self) -> Dict[str, Any]:
        """beta / f as they apply to the configured policy; blanks for the other."""
        return {
            'beta': self.beta if self.policy == "cap" else None,
            'f': self.f if self.policy == "cacoc2" else None,
        }


class ExperimentSpec(BaseModel):
    """A sweep over policies and their parameters, swarm sizes and speeds."""

    model_config = ConfigDict(extra="forbid")

    base: ScenarioConfig = Field(default_factory=ScenarioConfig)
    policies: Optional[List[PolicyName]] = Field(None, min_length=1)
    betas: List[float] = Field(default_factory=list)
    fs: List[float] = Field(default_factory=list)
    uav_counts: List[int] = Field(default_factory=list)
    speeds: List[float] = Field(default_factory=list)
    runs_per_point: int = Field(1, ge=1)
    seed_base: int = Field(0, ge=0)
    output_dir: str = "results"
    timeseries: bool = False
    trace: bool = False
    jobs: Optional[int] = Field(None, ge=1)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    use_wandb: bool = False
    wandb_project: str = "swarmcap"

    @property
    def seeds(self) -> List[int]:
        return [self.seed_base + i for i in range(self.runs_per_point)]

    @property
    def effective_jobs(self) -> int:
        return self.jobs if self.jobs is not None else (os.cpu_count() or 1)

    def points(self) -> List[ScenarioConfig]:
        """Every sweep point as a scenario config; empty axes fall back to the base value."""
        uav_counts = self.uav_counts or [self.base.n_uavs]
        speeds = self.speeds or [self.base.speed_mps]
        configs = []
        for policy in dict.fromkeys(self.policies or [self.base.policy]):
            if policy == "cap":
                params = [{'beta': beta} for beta in (self.betas or [self.base.beta])]
            elif policy == "cacoc2":
                params = [{'f': f} for f in (self.fs or [self.base.f])]
            else:
                params = [{}]
            for param in params:
                for n_uavs in uav_counts:
                    for speed in speeds:
                        configs.append(_scenario(self.base, policy=policy, n_uavs=n_uavs, speed_mps=speed, **param))
        return configs


SCENARIO_KEYS = frozenset(ScenarioConfig.model_fields)
EXPERIMENT_KEYS = frozenset(ExperimentSpec.model_fields) - {'base'}


def _scenario(base: ScenarioConfig, **changes: Any) -> ScenarioConfig:
    # re-validate; model_copy(update=...) would skip the validators
    try:
        return ScenarioConfig(**{**base.model_dump(), **changes})
    except ValidationError as e:
        raise ConfigError(_format_validation(e)) from e


def _format_validation(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item['loc'] if p != 'base')
        message = item['msg'].replace("Value error, ", "")
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)


def _parse_env_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def env_overrides(environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    """``SWARMCAP_<KEY>`` values for known keys, parsed as JSON where possible."""
    if environ is None:
        load_dotenv()
        environ = dict(os.environ)
    overrides = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key in SCENARIO_KEYS or key in EXPERIMENT_KEYS:
            overrides[key] = _parse_env_value(raw)
        else:
            logger.warning(f"Ignoring unknown environment override {name}")
    return overrides


def build_spec(values: Dict[str, Any]) -> ExperimentSpec:
    """Validate a flat key/value mapping into an ExperimentSpec."""
    unknown = sorted(set(values) - SCENARIO_KEYS - EXPERIMENT_KEYS)
    if unknown:
        raise ConfigError(f"Unknown config key(s): {', '.join(unknown)}")
    scenario = {k: v for k, v in values.items() if k in SCENARIO_KEYS}
    sweep = {k: v for k, v in values.items() if k in EXPERIMENT_KEYS}
    try:
        return ExperimentSpec(base=ScenarioConfig(**scenario), **sweep)
    except ValidationError as e:
        raise ConfigError(_format_validation(e)) from e


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            values = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in config file {path}: {e}")
    if not isinstance(values, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return values


def parse_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None,
                 environ: Optional[Dict[str, str]] = None) -> ExperimentSpec:
    """File values, then environment overrides, then explicit ``overrides`` (CLI flags)."""
    values: Dict[str, Any] = load_config_file(path) if path is not None else {}
    values.update(env_overrides(environ))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    spec = build_spec(values)
    logger.debug(f"Loaded experiment with {len(spec.points())} sweep points from {path}")
    return spec
