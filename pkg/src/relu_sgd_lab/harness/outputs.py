"""Trajectory CSV and run-summary JSON writers."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from relu_sgd_lab.harness.converters import format_float
from relu_sgd_lab.risk.lyapunov import norm_cap, step_bound_A, step_bound_intro, step_bound_V
from relu_sgd_lab.training.optimizer import TrajectoryRecord

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("step", "gamma", "emp_risk", "true_risk", "V", "grad_norm", "descent_residual")

SUMMARY_KEYS = (
    "seed",
    "mode",
    "config_hash",
    "steps_executed",
    "stopped_early",
    "final_true_risk",
    "final_emp_risk_running_mean",
    "final_V",
    "V0",
    "max_param_norm",
    "norm_cap",
    "norm_cap_held",
    "v_monotone",
    "bounds",
    "energy",
    "integration",
    "violations",
)

TRAJECTORY_FILE = "trajectory.csv"
SUMMARY_FILE = "summary.json"


def seed_directory(out_dir: Union[str, Path], seed: int) -> Path:
    return Path(out_dir) / f"seed-{seed}"


def write_trajectory_csv(record: TrajectoryRecord, path: Union[str, Path]) -> Path:
    """
    寫出軌跡 CSV：UTF-8、標題列、'.' 小數點，浮點數以 repr 表示。

    The wall-clock column of the in-memory rows is not written, so identical runs
    produce identical bytes.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in record.rows:
            writer.writerow(
                [
                    str(row.step),
                    format_float(row.gamma),
                    format_float(row.emp_risk),
                    format_float(row.true_risk),
                    format_float(row.V),
                    format_float(row.grad_norm),
                    format_float(row.descent_residual),
                ]
            )
    logger.debug(f"wrote {len(record.rows)} rows to {path}")
    return path


def build_summary(record: TrajectoryRecord, config_hash: Optional[str] = None) -> Dict[str, Any]:
    """整理單一軌跡的摘要 (鍵順序固定為 SUMMARY_KEYS)。"""
    cfg = record.config
    phi0 = record.initial_params
    dist = cfg.distribution
    v0 = record.V0
    verdict = record.verdict.to_dict()
    bounds = {
        "form": verdict["bound_form"],
        "bound": verdict["bound"],
        "threshold": verdict["threshold"],
        "gamma0": verdict["gamma0"],
        "accepted": verdict["accepted"],
        "reason": verdict["reason"],
        "step_bound_V": step_bound_V(phi0, cfg.a_param, cfg.shape.d, cfg.xi),
        "step_bound_A": step_bound_A(phi0, cfg.a_param, cfg.xi, cfg.shape.d),
        "step_bound_intro": step_bound_intro(phi0, dist.a, dist.b, cfg.xi, cfg.shape.d),
    }
    summary = {
        "seed": cfg.seed,
        "mode": cfg.mode,
        "config_hash": config_hash,
        "steps_executed": record.steps_executed,
        "stopped_early": record.stopped_early,
        "final_true_risk": record.final_true_risk,
        "final_emp_risk_running_mean": record.running_mean_emp_risk,
        "final_V": record.final_V,
        "V0": v0,
        "max_param_norm": record.max_norm,
        "norm_cap": norm_cap(v0),
        "norm_cap_held": record.norm_cap_held,
        "v_monotone": record.v_monotone,
        "bounds": bounds,
        "energy": {"sum": record.energy_sum, "ceiling": record.energy_limit},
        "integration": dict(record.integration),
        "violations": list(record.violations),
    }
    return {key: summary[key] for key in SUMMARY_KEYS}


def write_json(path: Union[str, Path], payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def write_run(record: TrajectoryRecord, out_dir: Union[str, Path], config_hash: Optional[str] = None) -> Dict[str, Any]:
    """Write ``seed-<s>/trajectory.csv`` and ``seed-<s>/summary.json``; returns the summary."""
    run_dir = seed_directory(out_dir, record.config.seed)
    write_trajectory_csv(record, run_dir / TRAJECTORY_FILE)
    summary = build_summary(record, config_hash)
    write_json(run_dir / SUMMARY_FILE, summary)
    logger.info(f"seed {record.config.seed}: wrote {run_dir}")
    return summary
