"""Inclusion conditions, their corollary forms, and the growth-trend verdicts.

Every condition has the form "some positive quantity E(m) = O(m^target)".
E(m) is sampled on a grid of m, and a least-squares slope of log E against
log m over the upper half of the grid decides the verdict:

* ``Bounded``   if slope <= target + bounded_slack   (default 0.1)
* ``Unbounded`` if slope >= target + unbounded_slack (default 0.3)
* ``Inconclusive`` otherwise.

This is a heuristic; O(1) cannot be decided from finitely many samples.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError
from .operator import InclusionMatrix, log_pivot, ratio_gap
from .transform import ExponentPair
from .weights import constant, cumulative

BOUNDED, UNBOUNDED, INCONCLUSIVE = "Bounded", "Unbounded", "Inconclusive"
IMPLIES, DOES_NOT_IMPLY = "Implies", "DoesNotImply"

CONDITION_IDS = (
    "Thm_i", "Thm_ii", "Cor1_i", "Cor1_ii", "Cor2_i", "Cor2_ii",
    "Cor3_i", "Cor3_ii", "Cor4_13", "Cor4_14", "Bennett",
)

TAIL_MIN_TERMS = 10


@dataclass(frozen=True)
class TrendConfig:
    bounded_slack: float = 0.1
    unbounded_slack: float = 0.3


DEFAULT_TREND = TrendConfig()


def default_grid():
    return [2**j for j in range(4, 13)]


def _check_grid(grid):
    grid = [int(m) for m in (default_grid() if grid is None else grid)]
    if not grid:
        raise ConfigError("grid must be nonempty")
    if grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid must be strictly increasing positive integers")
    return grid


@dataclass
class ConditionReport:
    condition_id: str
    samples: list
    log_values: list
    fitted_exponent: float
    target_exponent: float
    verdict: str
    sup_estimate: float
    tail_note: str = ""

    def to_dict(self):
        return {
            "conditionId": self.condition_id,
            "samples": [[m, v] for m, v in self.samples],
            "logValues": list(self.log_values),
            "fittedExponent": self.fitted_exponent,
            "targetExponent": self.target_exponent,
            "verdict": self.verdict,
            "supEstimate": self.sup_estimate,
            "tailNote": self.tail_note,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            condition_id=d["conditionId"],
            samples=[(int(m), float(v)) for m, v in d["samples"]],
            log_values=[float(v) for v in d["logValues"]],
            fitted_exponent=float(d["fittedExponent"]),
            target_exponent=float(d["targetExponent"]),
            verdict=d["verdict"],
            sup_estimate=float(d["supEstimate"]),
            tail_note=d.get("tailNote", ""),
        )


@dataclass
class InclusionVerdict:
    condition_i: ConditionReport
    condition_ii: ConditionReport
    overall: str
    label: str = "theorem"
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "label": self.label,
            "params": dict(self.params),
            "overall": self.overall,
            "conditionI": self.condition_i.to_dict(),
            "conditionII": self.condition_ii.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            condition_i=ConditionReport.from_dict(d["conditionI"]),
            condition_ii=ConditionReport.from_dict(d["conditionII"]),
            overall=d["overall"],
            label=d.get("label", "theorem"),
            params=dict(d.get("params", {})),
        )


def fit_growth_exponent(m, log_values, upper_half=True):
    """Least-squares slope of ``log E`` against ``log m``.

    Samples with ``E = 0`` carry no slope information and are dropped; if the
    last sample is zero the slope is ``-inf``.
    """
    m = np.asarray(m, dtype=float)
    lv = np.asarray(log_values, dtype=float)
    if upper_half:
        start = len(m) // 2 if len(m) > 2 else 0
        m, lv = m[start:], lv[start:]
    if np.isneginf(lv[-1]):
        return -math.inf
    keep = np.isfinite(lv)
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(m[keep]), lv[keep], 1)[0])


def classify(fitted, target, trend=DEFAULT_TREND):
    if math.isnan(fitted):
        return INCONCLUSIVE
    if fitted <= target + trend.bounded_slack:
        return BOUNDED
    if fitted >= target + trend.unbounded_slack:
        return UNBOUNDED
    return INCONCLUSIVE


def make_report(condition_id, grid, log_values, target=0.0, tail_note="", tail_divergent=False, trend=DEFAULT_TREND):
    """Assemble a :class:`ConditionReport` from log samples on ``grid``."""
    lv = np.asarray(log_values, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        values = np.exp(lv)
    fitted = fit_growth_exponent(grid, lv)
    verdict = classify(fitted, target, trend)
    # a vanishing column factor makes every sample zero whatever the tail does
    if tail_divergent and verdict == BOUNDED and not np.all(np.isneginf(lv)):
        verdict = INCONCLUSIVE
    return ConditionReport(
        condition_id=condition_id,
        samples=[(int(m), float(v)) for m, v in zip(grid, values)],
        log_values=lv.tolist(),
        fitted_exponent=fitted,
        target_exponent=float(target),
        verdict=verdict,
        sup_estimate=float(values.max()),
        tail_note=tail_note,
    )


def _overall(ri, rii):
    if ri.verdict == BOUNDED and rii.verdict == BOUNDED:
        return IMPLIES
    if UNBOUNDED in (ri.verdict, rii.verdict):
        return DOES_NOT_IMPLY
    return INCONCLUSIVE


def tail_sums(log_terms):
    """Log of ``sum_{n >= i} t_n`` for each ``i``, including an extrapolated tail.

    The decay ratio ``r`` is fitted on the last ten terms; when ``r < 1`` the
    remainder past the truncation point is ``t_M r / (1 - r)``. Otherwise no
    remainder is added and the tail is flagged as divergent.

    Returns ``(log_sums, tail_note, divergent)``.
    """
    t = np.asarray(log_terms, dtype=float)
    if t.size <= TAIL_MIN_TERMS:
        raise ConfigError("truncation too short to estimate the tail")
    log_r = (t[-1] - t[-1 - TAIL_MIN_TERMS]) / TAIL_MIN_TERMS
    with np.errstate(invalid="ignore"):
        suffix = np.logaddexp.accumulate(t[::-1])[::-1]
    if np.isfinite(log_r) and log_r < 0:
        log_rest = t[-1] + log_r - math.log(-math.expm1(log_r))
        note = f"geometric tail extrapolated past n={t.size} (decay ratio {math.exp(log_r):.6g})"
        return np.logaddexp(suffix, log_rest), note, False
    if np.isneginf(t[-1]):
        return suffix, "tail terms vanish", False
    note = f"tail divergent or slowly decaying (ratio {math.exp(min(log_r, 700.0)):.6g}); truncated at n={t.size}"
    return suffix, note, True


def bennett_product(log_row, log_col, exp, grid, tail_shift=0):
    """Log of ``(sum_{n>=m+shift} b_n^s)^{1/s} (sum_{v<=m} |c_v|^{k*})^{1/k*}`` on ``grid``.

    ``log_row[i]`` and ``log_col[i]`` hold ``log b_n`` and ``log|c_v|`` for the
    1-based index ``i + 1``; ``log_row`` extends to the truncation point.
    """
    s, kstar = exp.s, exp.kstar
    log_row = np.asarray(log_row, dtype=float)
    log_col = np.asarray(log_col, dtype=float)
    if log_col.size < grid[-1] or log_row.size < grid[-1] + tail_shift + TAIL_MIN_TERMS:
        raise ConfigError("factor sequences are too short for the grid")
    tails, note, divergent = tail_sums(s * log_row)
    with np.errstate(invalid="ignore"):
        heads = np.logaddexp.accumulate(kstar * log_col)
    idx = np.asarray(grid)
    log_e = tails[idx - 1 + tail_shift] / s + heads[idx - 1] / kstar
    return log_e, note, divergent


def _truncation(grid, M):
    M = 4 * grid[-1] if M is None else int(M)
    if M < 4 * grid[-1]:
        raise ConfigError(f"truncation M={M} must be at least 4*max(grid) = {4 * grid[-1]}")
    return M


def _log_row_factor(qv, s, M):
    n = np.arange(1, M + 1, dtype=float)
    return (1.0 - 1.0 / s) * np.log(n) + qv.logp[1:] - qv.logP[1:] - qv.logP[:-1]


def eval_condition_i(p, q, exp, grid=None, trend=DEFAULT_TREND):
    """Sample ``n^{1/k-1/s} q_n P_n / (p_n Q_n)`` and classify against O(1)."""
    grid = _check_grid(grid)
    pv, qv = cumulative(p, grid[-1]), cumulative(q, grid[-1])
    n = np.asarray(grid)
    lv = (1.0 / exp.k - 1.0 / exp.s) * np.log(n) + pv.logR[n] - qv.logR[n]
    return make_report("Thm_i", grid, lv, trend=trend)


def eval_condition_ii(p, q, exp, grid=None, M=None, trend=DEFAULT_TREND, condition_id="Thm_ii"):
    """Sample the product condition with the tail starting at ``n = m``."""
    grid = _check_grid(grid)
    M = _truncation(grid, M)
    qv = cumulative(q, M)
    log_row = _log_row_factor(qv, exp.s, M)
    psign, plog = log_pivot(p, q, grid[-1])
    v = np.arange(1, grid[-1] + 1, dtype=float)
    # |Q_v - q_v P_v/p_v|^{k*} / v  ==  |c_v|^{k*}
    log_col = np.where(psign[1:] != 0, plog[1:] - np.log(v) / exp.kstar, -np.inf)
    lv, note, divergent = bennett_product(log_row, log_col, exp, grid)
    return make_report(condition_id, grid, lv, tail_note=note, tail_divergent=divergent, trend=trend)


def eval_theorem(p, q, exp, grid=None, M=None, trend=DEFAULT_TREND):
    """Decide ``|N,p|_k => |N,q|_s`` from both conditions."""
    ri = eval_condition_i(p, q, exp, grid, trend)
    rii = eval_condition_ii(p, q, exp, grid, M, trend)
    params = {"p": p.to_dict(), "q": q.to_dict(), "k": exp.k, "s": exp.s}
    return InclusionVerdict(ri, rii, _overall(ri, rii), label="theorem", params=params)


def bennett_factorable_bound(B, exp, grid=None, M=None, trend=DEFAULT_TREND):
    """Bennett's product criterion for a strictly lower factorable matrix.

    ``B`` is an :class:`InclusionMatrix` (its ``b`` and ``c`` factors are used,
    ``N`` must cover the truncation) or a pair ``(b, c)`` of factor arrays
    indexed from 1. Column factors enter through their absolute values.
    """
    grid = _check_grid(grid)
    if isinstance(B, InclusionMatrix):
        log_row = B.log_b
        log_col = np.where(B.sign_c != 0, B.log_c, -np.inf)
    else:
        b, c = (np.asarray(a, dtype=float) for a in B)
        with np.errstate(divide="ignore"):
            log_row, log_col = np.log(np.abs(b)), np.log(np.abs(c))
    if M is not None:
        M = _truncation(grid, M)
        if log_row.size < M:
            raise ConfigError(f"row factors have {log_row.size} entries; truncation needs {M}")
        log_row = log_row[:M]
    lv, note, divergent = bennett_product(log_row, log_col, exp, grid)
    return make_report("Bennett", grid, lv, tail_note=note, tail_divergent=divergent, trend=trend)


# --- corollaries -----------------------------------------------------------------


def _require_constant(w, role, corollary):
    if w is not None and w.kind != "constant":
        raise ConfigError(f"Corollary {corollary} fixes {role} = 1; got {w.describe()}")


def _require_equal_exponents(exp, corollary):
    if exp.s != exp.k:
        raise ConfigError(f"Corollary {corollary} requires s = k (got k={exp.k}, s={exp.s})")


def corollary_1(q, exp, grid=None, M=None, trend=DEFAULT_TREND):
    """``|C,1|_k => |N,q|_s``; ``p = 1`` so ``P_n/p_n = n + 1`` exactly."""
    grid = _check_grid(grid)
    M = _truncation(grid, M)
    qv = cumulative(q, M)
    n = np.asarray(grid, dtype=float)
    lv_i = (1.0 + 1.0 / exp.k - 1.0 / exp.s) * np.log(n) - qv.logR[np.asarray(grid)]
    ri = make_report("Cor1_i", grid, lv_i, trend=trend)

    top = grid[-1]
    exact_lRp = np.log(np.arange(1, top + 2, dtype=float))  # P_v/p_v = v + 1
    sign, lgap = ratio_gap(constant(), q, top, logRp=exact_lRp)
    v = np.arange(1, top + 1, dtype=float)
    # |Q_v - (v+1) q_v| = q_v |Q_v/q_v - (v+1)|
    log_col = np.where(sign[1:] != 0, qv.logp[1 : top + 1] + lgap[1:] - np.log(v) / exp.kstar, -np.inf)
    log_row = _log_row_factor(qv, exp.s, M)
    lv_ii, note, divergent = bennett_product(log_row, log_col, exp, grid, tail_shift=1)
    rii = make_report("Cor1_ii", grid, lv_ii, tail_note=note, tail_divergent=divergent, trend=trend)
    params = {"p": {"kind": "constant", "offset": 0}, "q": q.to_dict(), "k": exp.k, "s": exp.s}
    return InclusionVerdict(ri, rii, _overall(ri, rii), label="corollary 1", params=params)


def corollary_2(p, exp, grid=None, trend=DEFAULT_TREND):
    """``|N,p|_k => |C,1|_s``; condition (ii) is an O(m) bound on a single sum."""
    grid = _check_grid(grid)
    top = grid[-1]
    pv = cumulative(p, top)
    n = np.asarray(grid)
    lv_i = (1.0 / exp.k - 1.0 / exp.s - 1.0) * np.log(n) + pv.logR[n]
    ri = make_report("Cor2_i", grid, lv_i, trend=trend)

    # v + 1 - P_v/p_v = R^q_v - R^p_v with q = 1
    sign, lgap = ratio_gap(p, constant(), top)
    v = np.arange(1, top + 1, dtype=float)
    with np.errstate(invalid="ignore"):
        terms = np.where(sign[1:] != 0, exp.kstar * lgap[1:] - np.log(v), -np.inf)
        heads = np.logaddexp.accumulate(terms)
    lv_ii = heads[n - 1] / exp.kstar
    rii = make_report("Cor2_ii", grid, lv_ii, target=1.0, trend=trend)
    params = {"p": p.to_dict(), "q": {"kind": "constant", "offset": 0}, "k": exp.k, "s": exp.s}
    return InclusionVerdict(ri, rii, _overall(ri, rii), label="corollary 2", params=params)


def corollary_3(p, q, exp, grid=None, M=None, trend=DEFAULT_TREND):
    """``|N,p|_k => |N,q|_k``: the theorem with ``s = k``."""
    _require_equal_exponents(exp, 3)
    grid = _check_grid(grid)
    pv, qv = cumulative(p, grid[-1]), cumulative(q, grid[-1])
    n = np.asarray(grid)
    ri = make_report("Cor3_i", grid, pv.logR[n] - qv.logR[n], trend=trend)
    rii = eval_condition_ii(p, q, exp, grid, M, trend, condition_id="Cor3_ii")
    params = {"p": p.to_dict(), "q": q.to_dict(), "k": exp.k, "s": exp.s}
    return InclusionVerdict(ri, rii, _overall(ri, rii), label="corollary 3", params=params)


def corollary_4(p, exp, grid=None, trend=DEFAULT_TREND):
    """Equivalence of ``|C,1|_k`` and ``|N,p|_k``: ``n p_n/P_n = O(1)`` and ``P_n/(n p_n) = O(1)``."""
    _require_equal_exponents(exp, 4)
    grid = _check_grid(grid)
    pv = cumulative(p, grid[-1])
    n = np.asarray(grid)
    r13 = make_report("Cor4_13", grid, np.log(n) - pv.logR[n], trend=trend)
    r14 = make_report("Cor4_14", grid, pv.logR[n] - np.log(n), trend=trend)
    params = {"p": p.to_dict(), "k": exp.k, "s": exp.s}
    return InclusionVerdict(r13, r14, _overall(r13, r14), label="corollary 4", params=params)


def eval_corollary(corollary, p=None, q=None, exp=None, grid=None, M=None, trend=DEFAULT_TREND):
    """Dispatch to the corollary evaluators, enforcing each one's fixed sequence."""
    if exp is None:
        raise ConfigError("exponents are required")
    if corollary == 1:
        _require_constant(p, "p", 1)
        if q is None:
            raise ConfigError("Corollary 1 needs q")
        return corollary_1(q, exp, grid, M, trend)
    if corollary == 2:
        _require_constant(q, "q", 2)
        if p is None:
            raise ConfigError("Corollary 2 needs p")
        return corollary_2(p, exp, grid, trend)
    if corollary == 3:
        if p is None or q is None:
            raise ConfigError("Corollary 3 needs p and q")
        return corollary_3(p, q, exp, grid, M, trend)
    if corollary == 4:
        if q is not None:
            raise ConfigError("Corollary 4 takes a single sequence p")
        if p is None:
            raise ConfigError("Corollary 4 needs p")
        return corollary_4(p, exp, grid, trend)
    raise ConfigError(f"corollary must be 1, 2, 3 or 4, got {corollary!r}")
