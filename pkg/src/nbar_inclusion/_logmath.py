"""Signed log-domain arithmetic shared by the transform and operator code.

A signed log number is a pair ``(sign, logmag)`` with ``sign`` in {-1, 0, 1}
and ``logmag = log|x|`` (``-inf`` when ``sign == 0``).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import LinearOverflowError

NEG_INF = -np.inf


def to_signed_log(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sign(x), np.log(np.abs(x))


def from_signed_log(sign, logmag):
    try:
        with np.errstate(over="raise"):
            return np.asarray(sign) * np.exp(logmag)
    except FloatingPointError as exc:
        raise LinearOverflowError("value exceeds the double range; use the log-domain API") from exc


def log_diff(la, lb):
    """Return ``(sign, log|e^la - e^lb|)`` elementwise."""
    la = np.asarray(la, dtype=float)
    lb = np.asarray(lb, dtype=float)
    hi = np.maximum(la, lb)
    with np.errstate(invalid="ignore"):
        gap = np.abs(la - lb)
    sign = np.where(la > lb, 1.0, np.where(la < lb, -1.0, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = hi + np.log(-np.expm1(-gap))
    mag = np.where(sign == 0, NEG_INF, mag)
    # one side is -inf: the difference is the other side exactly
    mag = np.where(np.isneginf(lb) & (sign != 0), la, mag)
    mag = np.where(np.isneginf(la) & (sign != 0), lb, mag)
    return sign, mag


def signed_add(sa, la, sb, lb):
    """Add two signed log numbers (scalars, pure Python)."""
    if sa == 0:
        return sb, lb
    if sb == 0:
        return sa, la
    if sa == sb:
        hi, lo = (la, lb) if la >= lb else (lb, la)
        return sa, hi + math.log1p(math.exp(lo - hi))
    if la == lb:
        return 0.0, -math.inf
    if la > lb:
        return sa, la + math.log(-math.expm1(lb - la))
    return sb, lb + math.log(-math.expm1(la - lb))


def signed_logcumsumexp(sign, logmag, reverse=False, exclusive=False):
    """Cumulative sum of signed log numbers.

    Positive and negative parts are accumulated separately with a running
    log-sum-exp and subtracted once at the end, so the absolute error is that
    of an ordinary summation of the magnitudes.

    With ``exclusive=True`` entry ``i`` holds the sum over indices strictly
    before ``i`` (strictly after, when ``reverse``).
    """
    sign = np.asarray(sign, dtype=float)
    logmag = np.asarray(logmag, dtype=float)
    pos = np.where(sign > 0, logmag, NEG_INF)
    neg = np.where(sign < 0, logmag, NEG_INF)
    if reverse:
        pos, neg = pos[::-1], neg[::-1]
    with np.errstate(invalid="ignore"):
        cpos = np.logaddexp.accumulate(pos) if pos.size else pos
        cneg = np.logaddexp.accumulate(neg) if neg.size else neg
    if exclusive:
        cpos = np.concatenate(([NEG_INF], cpos[:-1]))
        cneg = np.concatenate(([NEG_INF], cneg[:-1]))
    if reverse:
        cpos, cneg = cpos[::-1], cneg[::-1]
    return log_diff(cpos, cneg)


def neumaier_cumsum(values):
    """Running compensated (Neumaier) sum; returns every prefix total."""
    out = np.empty(len(values))
    total = 0.0
    comp = 0.0
    for i, v in enumerate(np.asarray(values, dtype=float).tolist()):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out


def signed_add_arrays(sa, la, sb, lb):
    """Elementwise sum of two signed log arrays."""
    sa, la, sb, lb = (np.asarray(v, dtype=float) for v in (sa, la, sb, lb))
    with np.errstate(invalid="ignore"):
        pos = np.logaddexp(np.where(sa > 0, la, NEG_INF), np.where(sb > 0, lb, NEG_INF))
        neg = np.logaddexp(np.where(sa < 0, la, NEG_INF), np.where(sb < 0, lb, NEG_INF))
    return log_diff(pos, neg)
