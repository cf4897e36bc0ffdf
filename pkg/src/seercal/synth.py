"""Synthetic data generators and the table-recovery experiment.

Used by the experiment scripts and the acceptance suite: draw a ground-truth
monotone table, synthesize projects whose actual efforts come from that
table (plus optional noise), perturb the table, and check that training
pulls the estimation error back down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import params
from .calibration import CalibrationConfig, TrainingTrace, enforce_monotone
from .cases import CaseResult, run_case
from .engine import effort_for_project
from .table import ValueTable, synthetic_table


def synthesize_projects(
    tbl: ValueTable,
    n: int,
    seed: int = 0,
    effort_noise: float = 0.05,
    size_range: tuple[float, float] = (5_000.0, 500_000.0),
    sibr_range: tuple[float, float] = (0.0, 0.5),
    id_prefix: str = "S",
) -> list[params.SeerProject]:
    """Random projects whose actual efforts are the table's own estimates.

    Ratings are continuous coordinates uniform on [1, 18]; sizes are
    log-uniform; actual effort is the model output times (1 + eps) with eps
    uniform in +-effort_noise.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        ratings = {
            sym: float(rng.uniform(1.0, 18.0)) for sym in params.RATED_SYMBOLS
        }
        size = float(np.exp(rng.uniform(np.log(size_range[0]), np.log(size_range[1]))))
        sibr = float(rng.uniform(*sibr_range))
        probe = params.SeerProject(
            id=f"{id_prefix}{i + 1:03d}", size=size, actual_effort=1.0,
            sibr=sibr, ratings=ratings,
        )
        effort = effort_for_project(probe, tbl).effort
        actual = effort * (1.0 + rng.uniform(-effort_noise, effort_noise))
        out.append(
            params.SeerProject(
                id=probe.id, size=size, actual_effort=actual, sibr=sibr,
                ratings=ratings,
            )
        )
    return out


def perturb_table(tbl: ValueTable, rel_noise: float = 0.2, seed: int = 0) -> ValueTable:
    """Multiplicative noise on every entry, then monotone repair per row."""
    rng = np.random.default_rng(seed)
    noisy = tbl.values * rng.uniform(1.0 - rel_noise, 1.0 + rel_noise, tbl.values.shape)
    repaired = np.empty_like(noisy)
    for j, direction in enumerate(tbl.directions):
        repaired[j] = enforce_monotone(noisy[j], direction)
    return tbl.with_values(repaired)


@dataclass
class RecoveryResult:
    """Outcome of one synthetic-recovery run."""

    truth_table: ValueTable
    start_table: ValueTable
    case: CaseResult

    @property
    def initial_mmre(self) -> float:
        return self.case.baseline.mmre

    @property
    def final_mmre(self) -> float:
        return self.case.calibrated.mmre

    @property
    def trace(self) -> TrainingTrace:
        return self.case.trace


def recovery_experiment(
    n_projects: int = 60,
    seed: int = 7,
    effort_noise: float = 0.05,
    table_noise: float = 0.2,
    config: CalibrationConfig | None = None,
) -> RecoveryResult:
    """Generate truth, perturb, train on everything, report both tables.

    The default config starts with a generous learning rate and lets
    backtracking shrink it, so the loss trace is non-increasing.
    """
    config = config or CalibrationConfig(
        learning_rate=0.1, max_epochs=300, tolerance=0.0, backtrack=True,
        max_halvings=60,
    )
    truth = synthetic_table()
    projects = synthesize_projects(
        truth, n_projects, seed=seed, effort_noise=effort_noise
    )
    start = perturb_table(truth, rel_noise=table_noise, seed=seed + 1)
    case = run_case(projects, start, "c2", config)
    return RecoveryResult(truth_table=truth, start_table=start, case=case)
