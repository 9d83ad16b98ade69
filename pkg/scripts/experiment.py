"""Parameter sweeps over the mobility policies, results CSVs and summary tables."""

import logging
import math
import os
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

# Optional experiment tracking
try:
    import wandb
    WANDB_AVAILABLE = True
except ImportError:
    WANDB_AVAILABLE = False

from scripts.config import ExperimentSpec, ScenarioConfig
from scripts.engine import SUMMARY_METRICS, BatchResult, RunResult, run_batch

RUN_KEY_COLUMNS = ['policy', 'beta', 'f', 'n_uavs', 'speed_mps', 'seed']
POINT_KEY_COLUMNS = ['policy', 'beta', 'f', 'n_uavs', 'speed_mps']
REQUIRED_SUMMARY_COLUMNS = ['policy', 'tc_s', 'ncc_mean', 'anc_mean', 'fairness']


class SummaryError(ValueError):
    """A results CSV that cannot be summarized; ``line`` is 1-based."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def point_tag(config: ScenarioConfig) -> str:
    params = config.policy_params()
    if params['beta'] is not None:
        param = f"beta{params['beta']:g}"
    elif params['f'] is not None:
        param = f"f{params['f']:g}"
    else:
        param = "base"
    return f"{config.policy}_{param}_n{config.n_uavs}_v{config.speed_mps:g}"


def write_csv_atomic(frame: pd.DataFrame, path: Union[str, Path]):
    """Write through a temporary file and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    frame.to_csv(tmp, index=False, lineterminator="\n", encoding="utf-8")
    os.replace(tmp, path)


def summary_row(batch: BatchResult) -> Dict[str, Any]:
    config = batch.config
    row: Dict[str, Any] = {'policy': config.policy}
    row.update(config.policy_params())
    row.update({'n_uavs': config.n_uavs, 'speed_mps': config.speed_mps})
    for name in SUMMARY_METRICS:
        mean, sem = batch.aggregates[name]
        row[name] = mean
        row[f"{name}_sem"] = sem
    row['tc_censored_fraction'] = batch.aggregates['tc_censored'][0]
    row['runs'] = len(batch.runs)
    row['failed_runs'] = batch.n_failed
    return row


class ExperimentRunner:
    """Runs every sweep point of an ExperimentSpec and writes runs.csv and summary.csv."""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.output_dir = Path(spec.output_dir)
        self.logger = logging.getLogger("Experiment")
        self.wandb_table = None
        self.wandb_run = None

    def _init_wandb(self):
        if not self.spec.use_wandb:
            return
        if not WANDB_AVAILABLE:
            print("⚠️ W&B not available - install with: pip install wandb")
            return
        try:
            self.wandb_run = wandb.init(project=self.spec.wandb_project, config=self.spec.model_dump(mode="json"))
            self.wandb_table = wandb.Table(columns=RUN_KEY_COLUMNS + list(SUMMARY_METRICS) + ['failed'])
            print("✅ W&B logging initialized")
        except Exception as e:
            print(f"⚠️ W&B initialization failed: {e}")
            self.logger.warning(f"W&B initialization failed: {e}")

    def _log_run_to_wandb(self, row: Dict[str, Any]):
        if self.wandb_table is None:
            return
        try:
            self.wandb_table.add_data(*[row.get(c) for c in RUN_KEY_COLUMNS + list(SUMMARY_METRICS) + ['failed']])
            if not row['failed']:
                wandb.log({f"{row['policy']}/{name}": row[name] for name in SUMMARY_METRICS})
        except Exception as e:
            self.logger.warning(f"Failed to log to W&B: {e}")

    def _finish_wandb(self):
        if self.wandb_run is None:
            return
        try:
            wandb.log({"runs": self.wandb_table})
            wandb.finish()
        except Exception as e:
            self.logger.warning(f"Failed to finish W&B run: {e}")

    def _write_timeseries(self, result: RunResult):
        frame = pd.DataFrame(
            [(s.t, s.ncc, s.anc, s.covered_fraction) for s in result.metrics.samples],
            columns=['t', 'ncc', 'anc', 'covered_fraction'],
        )
        write_csv_atomic(frame, self.output_dir / "timeseries" / f"{point_tag(result.config)}_seed{result.seed}.csv")

    def _write_trace(self, result: RunResult):
        trace = result.trace
        if trace is None:
            return
        folder = self.output_dir / "traces" / f"{point_tag(result.config)}_seed{result.seed}"
        write_csv_atomic(pd.DataFrame(trace.trajectory, columns=['t', 'uav_id', 'x', 'y', 'heading_deg']),
                         folder / "trajectory.csv")
        write_csv_atomic(pd.DataFrame(trace.hellos, columns=['t', 'sender', 'receiver_count']),
                         folder / "hellos.csv")
        if trace.field_snapshot is not None:
            trace.field_snapshot.dump_csv(folder / "field_uav0.csv")

    def execute(self) -> int:
        """Run the full sweep. Returns 0 on success, 1 if any run failed."""
        spec = self.spec
        points = spec.points()
        jobs = spec.effective_jobs
        print(f"🚁 {len(points)} sweep points x {spec.runs_per_point} runs, {jobs} worker(s)")
        self.logger.info(f"Experiment start: {len(points)} points, seeds {spec.seeds}, output {self.output_dir}")
        self._init_wandb()

        run_rows: List[Dict[str, Any]] = []
        summary_rows: List[Dict[str, Any]] = []
        n_failed = 0
        for index, point in enumerate(points, start=1):
            tag = point_tag(point)
            batch = run_batch(point, spec.seeds, jobs=jobs, trace=spec.trace, catch_errors=True)
            for result in batch.runs:
                row = result.row()
                run_rows.append(row)
                self._log_run_to_wandb(row)
                if result.failed:
                    continue
                if spec.timeseries:
                    self._write_timeseries(result)
                if spec.trace:
                    self._write_trace(result)
            summary_rows.append(summary_row(batch))
            n_failed += batch.n_failed
            tc, tc_sem = batch.aggregates['tc_s']
            ncc_mean, _ = batch.aggregates['ncc_mean']
            status = "❌" if batch.n_failed else "✅"
            print(f"{status} [{index}/{len(points)}] {tag}: Tc={tc:.1f}±{tc_sem:.1f}s NCC={ncc_mean:.2f}")

        # partial results are written even when runs failed
        write_csv_atomic(pd.DataFrame(run_rows), self.output_dir / "runs.csv")
        write_csv_atomic(pd.DataFrame(summary_rows), self.output_dir / "summary.csv")
        self._finish_wandb()
        print(f"📊 Results written to {self.output_dir}")
        if n_failed:
            self.logger.error(f"{n_failed} run(s) failed")
            print(f"❌ {n_failed} run(s) failed")
            return 1
        return 0


def execute(spec: ExperimentSpec) -> int:
    return ExperimentRunner(spec).execute()


def _read_results(path: Union[str, Path]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise SummaryError(f"Results file not found: {path}")
    except pd.errors.EmptyDataError:
        raise SummaryError("results file is empty", line=1)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise SummaryError(f"malformed CSV: {e}", line=int(match.group(1)) if match else None)
    missing = [c for c in REQUIRED_SUMMARY_COLUMNS if c not in frame.columns]
    if missing:
        raise SummaryError(f"missing column(s): {', '.join(missing)}", line=1)
    return frame


def _number(value: Any, column: str, line: int) -> float:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return math.nan
    try:
        return float(value)
    except (TypeError, ValueError):
        raise SummaryError(f"column {column!r} holds non-numeric value {value!r}", line=line)


def _param(row: pd.Series) -> Optional[float]:
    for column in ('beta', 'f'):
        if column in row and not pd.isna(row[column]):
            return float(row[column])
    return None


def summarize(path: Union[str, Path]) -> str:
    """Text table of policy, param, Tc, NCC, ANC and F (each ± SEM), sorted by Tc.

    Accepts summary.csv or runs.csv; SEM columns that are absent are shown as 0.
    """
    frame = _read_results(path)
    if 'failed' in frame.columns and 'failed_runs' not in frame.columns:
        frame = frame[~frame['failed'].astype(str).str.lower().isin(['true', '1'])]
    entries = []
    for index, row in frame.iterrows():
        line = int(index) + 2
        values = {}
        for name in ('tc_s', 'ncc_mean', 'anc_mean', 'fairness'):
            values[name] = _number(row[name], name, line)
            sem_column = f"{name}_sem"
            values[sem_column] = _number(row[sem_column], sem_column, line) if sem_column in frame.columns else 0.0
        entries.append((str(row['policy']), _param(row), values))

    def sort_key(entry):
        policy, param, values = entry
        tc = values['tc_s']
        return (math.isnan(tc), tc if not math.isnan(tc) else 0.0, policy,
                param is None, param if param is not None else 0.0)

    entries.sort(key=sort_key)
    header = f"{'policy':<10} {'param':>6} {'Tc (s)':>18} {'NCC':>14} {'ANC':>14} {'F':>16}"
    lines = [header, "-" * len(header)]
    for policy, param, v in entries:
        param_text = f"{param:g}" if param is not None else "-"
        lines.append(
            f"{policy:<10} {param_text:>6} "
            f"{v['tc_s']:>9.1f} ± {v['tc_s_sem']:<6.1f} "
            f"{v['ncc_mean']:>6.2f} ± {v['ncc_mean_sem']:<5.2f} "
            f"{v['anc_mean']:>6.2f} ± {v['anc_mean_sem']:<5.2f} "
            f"{v['fairness']:>6.3f} ± {v['fairness_sem']:<6.3f}"
        )
    return "\n".join(lines)
