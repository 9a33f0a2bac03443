"""Seed sweeps: one trajectory per seed, fanned out over worker processes."""

import logging
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

from relu_sgd_lab.harness.config import HarnessConfig, config_hash, worker_limit
from relu_sgd_lab.harness.outputs import write_run
from relu_sgd_lab.risk.risk_engine import NonFiniteGradientError
from relu_sgd_lab.training.optimizer import ScheduleRejectedError, TrajectoryError, run

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_REJECTED = "rejected"
STATUS_TRAJECTORY = "trajectory_error"
STATUS_NON_FINITE = "non_finite"
STATUS_ERROR = "error"


@dataclass
class SeedOutcome:
    seed: int
    status: str
    summary: Optional[dict] = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


def run_seed(config: HarnessConfig, seed: int, out_dir: Union[str, Path], digest: str) -> SeedOutcome:
    """執行單一 seed 並寫出其輸出目錄；失敗以狀態回報而不拋出。"""
    try:
        record = run(config.to_run_config(seed))
    except ScheduleRejectedError as exc:
        return SeedOutcome(seed, STATUS_REJECTED, message=exc.verdict.reason)
    except TrajectoryError as exc:
        return SeedOutcome(seed, STATUS_TRAJECTORY, message=str(exc))
    except NonFiniteGradientError as exc:
        return SeedOutcome(seed, STATUS_NON_FINITE, message=str(exc))
    except Exception as exc:
        logger.error(f"seed {seed} failed", exc_info=True)
        return SeedOutcome(seed, STATUS_ERROR, message=f"{type(exc).__name__}: {exc}")
    try:
        summary = write_run(record, out_dir, digest)
    except OSError as exc:
        return SeedOutcome(seed, STATUS_ERROR, message=f"{type(exc).__name__}: {exc}")
    return SeedOutcome(seed, STATUS_OK, summary=summary)


def _collect(seed: int, future: Future) -> SeedOutcome:
    try:
        return future.result()
    except Exception as exc:
        # worker process died or the outcome could not be sent back
        logger.error(f"seed {seed}: worker failed: {exc!r}")
        return SeedOutcome(seed, STATUS_ERROR, message=f"{type(exc).__name__}: {exc}")


def run_sweep(
    config: HarnessConfig,
    out_dir: Union[str, Path],
    seeds: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
) -> List[SeedOutcome]:
    """
    Run every seed of the sweep; results come back in seed order.

    Workers are capped by $RELU_SGD_LAB_THREADS. Each seed writes only inside its own
    ``seed-<s>`` directory.
    """
    seeds = list(config.seeds if seeds is None else seeds)
    digest = config_hash(config)
    limit = worker_limit(workers if workers is not None else len(seeds))
    logger.info(f"running {len(seeds)} seed(s) with {limit} worker(s), config {digest[:12]}")
    if limit <= 1 or len(seeds) <= 1:
        return [run_seed(config, seed, out_dir, digest) for seed in seeds]
    with ProcessPoolExecutor(max_workers=limit) as pool:
        futures = [pool.submit(run_seed, config, seed, str(out_dir), digest) for seed in seeds]
        return [_collect(seed, future) for seed, future in zip(seeds, futures)]
