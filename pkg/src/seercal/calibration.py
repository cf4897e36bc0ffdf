"""Gradient-descent calibration of the value table against project history.

The loss is half the weighted sum of squared relative effort errors.  The
backward pass chains an analytic effort gradient per quantitative value
through the membership grade linking each value to its two active table
entries; the update is plain full-batch descent followed by a positivity
floor and a least-squares monotone repair (pool-adjacent-violators) of every
row, so the returned table always satisfies the declared directions.

Analytic gradients are validated against central finite differences in the
test suite; training optionally halves the learning rate whenever a step
would increase the loss, which keeps the recorded loss trace non-increasing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import engine, params
from .engine import (
    ADJUSTMENT_SINGLES,
    BASIC_TECH_SCALE,
    CTBX_PIVOT,
    CTBX_SINGLES,
    SIZE_EXPONENT,
    STAFFING_EXPONENT,
    TECH_EXP_COEFF,
    TURN_DAMPING,
    combined_partials,
)
from .errors import (
    DegenerateInputError,
    MetricsDomainError,
    TableFormatError,
    TrainingDivergedError,
)
from .nfbank import membership_weights
from .table import DECREASING, INCREASING, ValueTable, validate_table

log = logging.getLogger(__name__)

PROJECT_EACH_EPOCH = "project_each_epoch"
PROJECT_EACH_STEP = "project_each_step"
# Full-batch descent performs exactly one update step per epoch, so the two
# policies coincide here; both are accepted for config compatibility.
CONSTRAINT_POLICIES = (PROJECT_EACH_EPOCH, PROJECT_EACH_STEP)


@dataclass(frozen=True)
class CalibrationConfig:
    """Training knobs.  Full-batch descent, deterministic for a fixed config."""

    learning_rate: float = 1e-3
    max_epochs: int = 500
    tolerance: float = 1e-6  # stop when relative loss decrease falls below this
    constraint_policy: str = PROJECT_EACH_EPOCH
    seed: int = 0
    value_floor: float = 1e-6  # positivity floor applied after each update
    backtrack: bool = True     # halve the learning rate on loss increase
    max_halvings: int = 40

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate!r}")
        if not self.max_epochs >= 0:
            raise ValueError(f"max_epochs must be >= 0, got {self.max_epochs!r}")
        if not self.tolerance >= 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance!r}")
        if self.constraint_policy not in CONSTRAINT_POLICIES:
            raise ValueError(
                f"constraint_policy must be one of {CONSTRAINT_POLICIES}, "
                f"got {self.constraint_policy!r}"
            )
        if not self.value_floor > 0:
            raise ValueError(f"value_floor must be positive, got {self.value_floor!r}")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "max_epochs": self.max_epochs,
            "tolerance": self.tolerance,
            "constraint_policy": self.constraint_policy,
            "seed": self.seed,
            "value_floor": self.value_floor,
            "backtrack": self.backtrack,
            "max_halvings": self.max_halvings,
        }


@dataclass
class TrainingTrace:
    """Per-epoch record of one training run plus the final table."""

    initial_loss: float
    losses: list[float] = field(default_factory=list)
    projection_counts: list[int] = field(default_factory=list)
    floor_counts: list[int] = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)
    stop_reason: str = ""
    table: ValueTable | None = None

    @property
    def epochs_run(self) -> int:
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else self.initial_loss


class _Batch:
    """Projects unpacked into arrays once per training/loss call."""

    def __init__(self, projects: Sequence[params.SeerProject]):
        if not projects:
            raise DegenerateInputError("project list is empty")
        self.coords = np.array([p.coordinates() for p in projects])
        self.sizes = np.array([p.size for p in projects])
        self.sibrs = np.array([p.sibr for p in projects])
        self.actuals = np.array([p.actual_effort for p in projects])
        self.weights = np.array([p.weight for p in projects])
        if np.any(self.actuals <= 0):
            raise MetricsDomainError("every project needs a positive actual effort")
        # Lower active level (0-based) and upper-level membership weight.
        self.level_lo, self.level_frac = membership_weights(self.coords)
        self.columns = np.broadcast_to(np.arange(params.N_RATED), self.coords.shape)

    def bank_values(self, values_matrix: np.ndarray) -> np.ndarray:
        left = values_matrix[self.columns, self.level_lo]
        right = values_matrix[self.columns, self.level_lo + 1]
        return left * (1.0 - self.level_frac) + right * self.level_frac


def _col(symbol: str) -> int:
    return params.RATED_COLUMN[symbol]


def _batch_efforts(batch: _Batch, values_matrix: np.ndarray) -> np.ndarray:
    v = batch.bank_values(values_matrix)
    columns = {sym: v[:, _col(sym)] for sym in params.RATED_SYMBOLS}
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        *_, efforts = engine.effort_terms(
            batch.sizes, columns["D"], columns, batch.sibrs
        )
    return efforts


def _effort_and_value_gradients(values: np.ndarray, sizes, sibrs):
    """Efforts plus the analytic effort gradient per quantitative value.

    ``values`` is the (n, 34) bank-output matrix.  Returns (efforts (n,),
    gradients (n, 34)).  Closed forms per factor family, all sharing the
    evaluated effort E:

    - plain adjustment factor P:   1.2 * E / P
    - staffing complexity D:       0.4 * E / D
    - plain ctbx member P:         E * 1.2 * 3.70945 / (5 * TURN * P)
    - TURN:                        -E * 1.2 * 3.70945 * ln(ctbx/4.11) / (5 * TURN^2)
    - combined constituents: the matching family form, chained through the
      combination formula's partial derivative.
    """
    v = {sym: values[:, _col(sym)] for sym in params.RATED_SYMBOLS}
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        aexpappl, d_aexp, d_appl = combined_partials("AEXPAPPL", v["AEXP"], v["APPL"])
        langlexp, d_lang, d_lexp = combined_partials("LANGLEXP", v["LANG"], v["LEXP"])
        tsystexp, d_tsys, d_texp = combined_partials("TSYSTEXP", v["TSYS"], v["TEXP"])
        dsysdexp, d_dsy, d_dexp = combined_partials("DSYSDEXP", v["DSY"], v["DEXP"])
        psyspexp, d_psys, d_pexp = combined_partials("PSYSPEXP", v["PSYS"], v["PEXP"])
        sibrreus, _, d_reus = combined_partials("SIBRREUS", sibrs, v["REUS"])

        ctbx = v["ACAP"] * aexpappl * v["MODP"] * v["PCAP"] * v["TOOL"] * v["TERM"]
        adjustment = langlexp * tsystexp * dsysdexp * psyspexp * sibrreus
        for sym in ADJUSTMENT_SINGLES:
            adjustment = adjustment * v[sym]
        turn = v["TURN"]
        c_tb = BASIC_TECH_SCALE * np.exp(
            -TECH_EXP_COEFF * np.log(ctbx / CTBX_PIVOT) / (TURN_DAMPING * turn)
        )
        c_te = c_tb / adjustment
        efforts = (
            engine.DEV_FRACTION
            * v["D"] ** STAFFING_EXPONENT
            * (sizes / c_te) ** SIZE_EXPONENT
        )

        grads = np.empty_like(values)
        ctbx_sens = SIZE_EXPONENT * TECH_EXP_COEFF / (TURN_DAMPING * turn)
        for sym in CTBX_SINGLES:
            grads[:, _col(sym)] = efforts * ctbx_sens / v[sym]
        grads[:, _col("AEXP")] = efforts * ctbx_sens / aexpappl * d_aexp
        grads[:, _col("APPL")] = efforts * ctbx_sens / aexpappl * d_appl
        grads[:, _col("TURN")] = (
            -efforts * SIZE_EXPONENT * TECH_EXP_COEFF
            * np.log(ctbx / CTBX_PIVOT) / (TURN_DAMPING * turn**2)
        )
        grads[:, _col("D")] = STAFFING_EXPONENT * efforts / v["D"]
        for sym in ADJUSTMENT_SINGLES:
            grads[:, _col(sym)] = SIZE_EXPONENT * efforts / v[sym]
        for factor, pairs in (
            (langlexp, (("LANG", d_lang), ("LEXP", d_lexp))),
            (tsystexp, (("TSYS", d_tsys), ("TEXP", d_texp))),
            (dsysdexp, (("DSY", d_dsy), ("DEXP", d_dexp))),
            (psyspexp, (("PSYS", d_psys), ("PEXP", d_pexp))),
        ):
            for sym, part in pairs:
                grads[:, _col(sym)] = SIZE_EXPONENT * efforts / factor * part
        grads[:, _col("REUS")] = SIZE_EXPONENT * efforts / sibrreus * d_reus
    return efforts, grads


def loss(projects: Sequence[params.SeerProject], tbl: ValueTable) -> float:
    """Half the weighted sum of squared relative effort errors."""
    batch = _Batch(projects)
    return _loss_from_efforts(batch, _batch_efforts(batch, tbl.values))


def _loss_from_efforts(batch: _Batch, efforts: np.ndarray) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        rel = (efforts - batch.actuals) / batch.actuals
        return float(0.5 * np.sum(batch.weights * rel**2))


def effort_gradients(project: params.SeerProject, tbl: ValueTable) -> dict[str, float]:
    """Analytic d(effort)/d(value) for every rated parameter of one project."""
    batch = _Batch([project])
    values = batch.bank_values(tbl.values)
    _, grads = _effort_and_value_gradients(values, batch.sizes, batch.sibrs)
    return {sym: float(grads[0, _col(sym)]) for sym in params.RATED_SYMBOLS}


def grad_effort_wrt_value(
    project: params.SeerProject, tbl: ValueTable, symbol: str
) -> float:
    """Analytic sensitivity of one project's effort to one quantitative value."""
    return effort_gradients(project, tbl)[symbol]


def loss_gradient(projects: Sequence[params.SeerProject], tbl: ValueTable) -> np.ndarray:
    """Full (34, 18) gradient of the loss w.r.t. every table entry."""
    batch = _Batch(projects)
    return _loss_gradient(batch, tbl.values)


def _loss_gradient(batch: _Batch, values_matrix: np.ndarray) -> np.ndarray:
    bank_values = batch.bank_values(values_matrix)
    efforts, grads = _effort_and_value_gradients(bank_values, batch.sizes, batch.sibrs)
    coef = batch.weights * (efforts - batch.actuals) / batch.actuals**2
    contrib = coef[:, None] * grads
    out = np.zeros((params.N_RATED, params.N_LEVELS))
    np.add.at(out, (batch.columns, batch.level_lo), contrib * (1.0 - batch.level_frac))
    np.add.at(out, (batch.columns, batch.level_lo + 1), contrib * batch.level_frac)
    return out


def grad_loss_wrt_consequent(
    projects: Sequence[params.SeerProject], tbl: ValueTable, symbol: str, level: int
) -> float:
    """Loss gradient for one table entry (symbol, level in 1..18)."""
    if not 1 <= level <= params.N_LEVELS:
        raise MetricsDomainError(f"level must lie in 1..{params.N_LEVELS}, got {level}")
    return float(loss_gradient(projects, tbl)[_col(symbol), level - 1])


def _pava_increasing(y: np.ndarray) -> np.ndarray:
    """Least-squares non-decreasing fit by pool-adjacent-violators.

    Pools only on strict violations, so already-monotone input comes back
    bit-identical.
    """
    means: list[float] = []
    counts: list[int] = []
    for v in y:
        mean = float(v)
        count = 1
        while means and means[-1] > mean:
            prev_mean = means.pop()
            prev_count = counts.pop()
            mean = (prev_mean * prev_count + mean * count) / (prev_count + count)
            count += prev_count
        means.append(mean)
        counts.append(count)
    out = np.empty(len(y))
    pos = 0
    for mean, count in zip(means, counts):
        out[pos:pos + count] = mean
        pos += count
    return out


def enforce_monotone(row, direction: str) -> np.ndarray:
    """Closest (least-squares) monotone row in the declared direction.

    Idempotent; exact fixpoint on rows that already satisfy the direction.
    """
    row = np.asarray(row, dtype=float)
    if direction == INCREASING:
        return _pava_increasing(row)
    if direction == DECREASING:
        return -_pava_increasing(-row)
    raise TableFormatError(f"unknown direction {direction!r}")


def _project_rows(values: np.ndarray, directions: tuple[str, ...]) -> tuple[np.ndarray, int]:
    """Monotone-repair every row; returns (repaired matrix, #rows changed)."""
    out = values.copy()
    changed = 0
    for j, direction in enumerate(directions):
        repaired = enforce_monotone(out[j], direction)
        if not np.array_equal(repaired, out[j]):
            changed += 1
            out[j] = repaired
    return out, changed


def train(
    projects: Sequence[params.SeerProject],
    tbl: ValueTable,
    config: CalibrationConfig | None = None,
) -> TrainingTrace:
    """Full-batch gradient descent on the table under monotone constraints.

    Each epoch evaluates all gradients against the epoch-start table, updates
    every entry, floors values at ``config.value_floor``, and repairs every
    row to its declared direction.  Stops at ``max_epochs``, when the relative
    loss decrease falls below ``tolerance``, or when backtracking runs out of
    halvings.  Raises :class:`TrainingDivergedError` (carrying the trace so
    far) if the loss turns non-finite and cannot be rescued by backtracking.
    """
    config = config or CalibrationConfig()
    violations = validate_table(tbl)
    if violations:
        raise TableFormatError(f"refusing to train on an invalid table: {violations[0]}")
    batch = _Batch(projects)
    current = tbl.values.copy()
    current_loss = _loss_from_efforts(batch, _batch_efforts(batch, current))
    trace = TrainingTrace(initial_loss=current_loss)
    if not np.isfinite(current_loss):
        trace.table = tbl
        trace.stop_reason = "diverged"
        raise TrainingDivergedError("loss is non-finite under the initial table", trace)

    alpha = config.learning_rate
    halvings_left = config.max_halvings
    floor_warned = False
    stop_reason = "max_epochs"
    for _epoch in range(config.max_epochs):
        grad = _loss_gradient(batch, current)
        stalled = False
        while True:
            candidate = current - alpha * grad
            floor_count = int(np.count_nonzero(candidate < config.value_floor))
            if floor_count:
                candidate = np.maximum(candidate, config.value_floor)
                if not floor_warned:
                    log.warning(
                        "positivity floor %g activated on %d table entries",
                        config.value_floor, floor_count,
                    )
                    floor_warned = True
            candidate, projection_count = _project_rows(candidate, tbl.directions)
            candidate_loss = _loss_from_efforts(batch, _batch_efforts(batch, candidate))
            can_halve = config.backtrack and halvings_left > 0 and alpha > 0.0
            if not np.isfinite(candidate_loss):
                if can_halve:
                    alpha *= 0.5
                    halvings_left -= 1
                    continue
                trace.table = tbl.with_values(current)
                trace.stop_reason = "diverged"
                raise TrainingDivergedError("loss became non-finite during training", trace)
            if config.backtrack and candidate_loss > current_loss:
                if can_halve:
                    alpha *= 0.5
                    halvings_left -= 1
                    continue
                stalled = True
            break
        if stalled:
            stop_reason = "stalled"
            break
        previous_loss = current_loss
        current = candidate
        current_loss = candidate_loss
        trace.losses.append(current_loss)
        trace.projection_counts.append(projection_count)
        trace.floor_counts.append(floor_count)
        trace.alphas.append(alpha)
        relative_decrease = (
            (previous_loss - current_loss) / previous_loss if previous_loss > 0 else 0.0
        )
        if relative_decrease < config.tolerance:
            stop_reason = "converged"
            break
    trace.stop_reason = stop_reason
    trace.table = tbl.with_values(current)
    return trace
