"""Pure evaluation of the SEER-SEM effort model.

Development effort in person-years is a fixed fraction of lifecycle effort
K = D^0.4 * (Size / C_te)^1.2, where effective technology C_te divides basic
technology C_tb by a 21-factor adjustment product.  C_tb responds to the
product of the personnel/tooling factors (ctbx) through an exponential whose
sensitivity is damped by the turnaround parameter.  Six factor pairs enter
through published combination formulas rather than directly.

All functions work elementwise on scalars or numpy arrays; the public
entry points validate scalar inputs and raise domain errors by name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import params
from .errors import EngineDomainError, MissingParameterError
from .nfbank import bank_translate
from .table import ValueTable

# Published model constants.
DEV_FRACTION = 0.393469        # development share of lifecycle effort
BASIC_TECH_SCALE = 2000.0      # basic-technology scale
CTBX_PIVOT = 4.11              # ctbx value at which C_tb == BASIC_TECH_SCALE
TECH_EXP_COEFF = 3.70945       # exponential coefficient of the C_tb response
TURN_DAMPING = 5.0             # turnaround damping of that response
SIZE_EXPONENT = 1.2
STAFFING_EXPONENT = 0.4

COMBINED_KINDS = (
    "AEXPAPPL", "LANGLEXP", "TSYSTEXP", "DSYSDEXP", "PSYSPEXP", "SIBRREUS",
)

# (a, b) argument convention per kind.
COMBINED_ARGS = {
    "AEXPAPPL": ("AEXP", "APPL"),
    "LANGLEXP": ("LANG", "LEXP"),
    "TSYSTEXP": ("TSYS", "TEXP"),
    "DSYSDEXP": ("DSY", "DEXP"),
    "PSYSPEXP": ("PSYS", "PEXP"),
    "SIBRREUS": ("SIBR", "REUS"),
}

# Plain (non-combined) members of the ctbx product.
CTBX_SINGLES = ("ACAP", "MODP", "PCAP", "TOOL", "TERM")

# The 16 plain adjustment factors, in the published enumeration order.
ADJUSTMENT_SINGLES = (
    "MULT", "RDED", "RLOC", "DSVL", "PSVL", "RVOL", "SPEC", "TEST",
    "QUAL", "RHST", "DISP", "MEMC", "TIMC", "RTIM", "SECR", "TSVL",
)


@dataclass(frozen=True)
class EffortBreakdown:
    """Intermediate and final quantities of one effort evaluation."""

    ctbx: float
    parm_adjustment: float
    basic_technology: float      # C_tb
    effective_technology: float  # C_te
    lifecycle_effort: float      # K, person-years
    effort: float                # development effort, person-years


def _aexpappl(aexp, appl):
    return 0.82 + 0.47 * np.exp(-0.95977 * (aexp / appl))


def _langlexp(lang, lexp):
    return 1.0 + ((1.11 + 0.085 * lang) - 1.0) * np.exp(-lexp / (lang / 3.0))


def _tsystexp(tsy, texp):
    return 1.0 + (0.035 + 0.025 * tsy) * np.exp(-3.0 * texp / tsy)


def _dsysdexp(dsy, dexp):
    return 1.0 + (0.06 + 0.05 * dsy) * np.exp(-3.0 * dexp / dsy)


def _psyspexp(psys, pexp):
    psys = np.asarray(psys, dtype=float)
    safe = np.where(psys == 0.0, 1.0, psys)
    base = 0.91**safe + 0.23 * safe * np.exp(-3.0 * np.asarray(pexp, float) / safe)
    return np.where(psys == 0.0, 1.0, base**0.833)


def _sibrreus(sibr, reus):
    return np.asarray(sibr, float) * np.asarray(reus, float) + 1.0


_COMBINED_FN = {
    "AEXPAPPL": _aexpappl,
    "LANGLEXP": _langlexp,
    "TSYSTEXP": _tsystexp,
    "DSYSDEXP": _dsysdexp,
    "PSYSPEXP": _psyspexp,
    "SIBRREUS": _sibrreus,
}


def _validate_combined_args(kind: str, a: float, b: float) -> None:
    a_name, b_name = COMBINED_ARGS[kind]
    if kind == "AEXPAPPL" and not b > 0:
        raise EngineDomainError(f"{kind}: {b_name} must be positive, got {b!r}")
    if kind in ("LANGLEXP", "TSYSTEXP", "DSYSDEXP") and not a > 0:
        raise EngineDomainError(f"{kind}: {a_name} must be positive, got {a!r}")
    if kind == "PSYSPEXP" and not a >= 0:
        raise EngineDomainError(f"{kind}: {a_name} must be non-negative, got {a!r}")
    if kind == "SIBRREUS" and not 0.0 <= a <= 1.0:
        raise EngineDomainError(f"{kind}: {a_name} must lie in [0, 1], got {a!r}")


def compute_combined(kind: str, a: float, b: float) -> float:
    """Evaluate one combined-parameter formula with its (a, b) convention."""
    if kind not in _COMBINED_FN:
        raise EngineDomainError(f"unknown combined-parameter kind {kind!r}")
    _validate_combined_args(kind, float(a), float(b))
    return float(_COMBINED_FN[kind](float(a), float(b)))


def combined_partials(kind: str, a, b):
    """Value and partial derivatives (d/da, d/db) of a combined formula.

    Array-capable; used by the calibration backward pass.  At the PSYS == 0
    special point the formula is the constant 1, so both partials are zero.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if kind == "AEXPAPPL":
        e = np.exp(-0.95977 * (a / b))
        val = 0.82 + 0.47 * e
        da = 0.47 * e * (-0.95977 / b)
        db = 0.47 * e * (0.95977 * a / b**2)
        return val, da, db
    if kind in ("LANGLEXP", "TSYSTEXP", "DSYSDEXP"):
        c0, c1 = {
            "LANGLEXP": (0.11, 0.085),
            "TSYSTEXP": (0.035, 0.025),
            "DSYSDEXP": (0.06, 0.05),
        }[kind]
        e = np.exp(-3.0 * b / a)
        coeff = c0 + c1 * a
        val = 1.0 + coeff * e
        da = c1 * e + coeff * e * (3.0 * b / a**2)
        db = coeff * e * (-3.0 / a)
        return val, da, db
    if kind == "PSYSPEXP":
        safe = np.where(a == 0.0, 1.0, a)
        e = np.exp(-3.0 * b / safe)
        base = 0.91**safe + 0.23 * safe * e
        val = np.where(a == 0.0, 1.0, base**0.833)
        outer = 0.833 * base ** (0.833 - 1.0)
        dbase_da = 0.91**safe * np.log(0.91) + 0.23 * e + 0.23 * safe * e * (3.0 * b / safe**2)
        dbase_db = -0.69 * e
        da = np.where(a == 0.0, 0.0, outer * dbase_da)
        db = np.where(a == 0.0, 0.0, outer * dbase_db)
        return val, da, db
    if kind == "SIBRREUS":
        return a * b + 1.0, b, a
    raise EngineDomainError(f"unknown combined-parameter kind {kind!r}")


def _get(values: Mapping[str, float], symbol: str):
    try:
        return values[symbol]
    except KeyError:
        raise MissingParameterError(
            f"missing quantitative value for {symbol}"
        ) from None


def compute_ctbx(values: Mapping[str, float]) -> float:
    """Personnel/tooling product feeding basic technology."""
    aexpappl = compute_combined("AEXPAPPL", _get(values, "AEXP"), _get(values, "APPL"))
    out = _get(values, "ACAP") * aexpappl
    for sym in ("MODP", "PCAP", "TOOL", "TERM"):
        out = out * _get(values, sym)
    return float(out)


def compute_parm_adjustment(values: Mapping[str, float], sibr: float) -> float:
    """21-factor adjustment product: 5 combined factors then 16 singles."""
    out = 1.0
    for kind in ("LANGLEXP", "TSYSTEXP", "DSYSDEXP", "PSYSPEXP", "SIBRREUS"):
        a_name, b_name = COMBINED_ARGS[kind]
        a = sibr if a_name == "SIBR" else _get(values, a_name)
        out = out * compute_combined(kind, a, _get(values, b_name))
    for sym in ADJUSTMENT_SINGLES:
        out = out * _get(values, sym)
    return float(out)


def basic_technology(ctbx, turn):
    """C_tb: exponential response to ctbx, damped by turnaround."""
    return BASIC_TECH_SCALE * np.exp(
        -TECH_EXP_COEFF * np.log(ctbx / CTBX_PIVOT) / (TURN_DAMPING * turn)
    )


def effort_terms(size, d, values: Mapping[str, object], sibr):
    """Array-capable core evaluation, no validation.

    Returns (ctbx, c_tb, parm_adjustment, c_te, k, effort); every argument
    and every map entry may be a scalar or a broadcastable array.
    """
    aexpappl = _aexpappl(_get(values, "AEXP"), _get(values, "APPL"))
    ctbx = _get(values, "ACAP") * aexpappl
    for sym in ("MODP", "PCAP", "TOOL", "TERM"):
        ctbx = ctbx * _get(values, sym)
    c_tb = basic_technology(ctbx, _get(values, "TURN"))
    adjustment = (
        _langlexp(_get(values, "LANG"), _get(values, "LEXP"))
        * _tsystexp(_get(values, "TSYS"), _get(values, "TEXP"))
        * _dsysdexp(_get(values, "DSY"), _get(values, "DEXP"))
        * _psyspexp(_get(values, "PSYS"), _get(values, "PEXP"))
        * _sibrreus(sibr, _get(values, "REUS"))
    )
    for sym in ADJUSTMENT_SINGLES:
        adjustment = adjustment * _get(values, sym)
    c_te = c_tb / adjustment
    k = np.asarray(d, float) ** STAFFING_EXPONENT * (size / c_te) ** SIZE_EXPONENT
    return ctbx, c_tb, adjustment, c_te, k, DEV_FRACTION * k


def compute_effort(
    size: float, d: float, values: Mapping[str, float], sibr: float
) -> EffortBreakdown:
    """Full effort evaluation; all intermediate quantities returned.

    ``size`` is effective size in SLOC, ``d`` the staffing-complexity value,
    ``values`` the quantitative parameter values (bank outputs), ``sibr`` the
    reuse fraction.  Efforts are person-years.
    """
    if not size > 0:
        raise EngineDomainError(f"size must be positive, got {size!r}")
    if not d > 0:
        raise EngineDomainError(f"staffing complexity must be positive, got {d!r}")
    turn = _get(values, "TURN")
    if not turn > 0:
        raise EngineDomainError(f"TURN must be positive, got {turn!r}")
    ctbx = compute_ctbx(values)
    if not ctbx > 0:
        raise EngineDomainError(f"ctbx must be positive, got {ctbx!r}")
    c_tb = float(basic_technology(ctbx, turn))
    parm_adjustment = compute_parm_adjustment(values, sibr)
    c_te = c_tb / parm_adjustment
    k = d**STAFFING_EXPONENT * (size / c_te) ** SIZE_EXPONENT
    effort = DEV_FRACTION * k
    breakdown = EffortBreakdown(ctbx, parm_adjustment, c_tb, c_te, k, effort)
    if not np.isfinite(effort):
        raise EngineDomainError(f"effort is non-finite for the given inputs: {breakdown}")
    return breakdown


def effort_for_project(project: params.SeerProject, tbl: ValueTable) -> EffortBreakdown:
    """Translate a project's ratings through the bank, then evaluate effort."""
    values = bank_translate(project, tbl)
    return compute_effort(project.size, values["D"], values, project.sibr)
