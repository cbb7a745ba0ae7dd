"""Weighted-mean transforms of partial sums and the absolute summability functionals.

For a weight sequence ``p`` and series terms ``a_0, a_1, ...`` with partial sums
``s_n``, the weighted mean is ``T_n = (1/P_n) sum_{v<=n} p_v s_v`` and its
differences ``X_n = T_n - T_{n-1}`` (``n >= 1``) satisfy

    X_n = p_n / (P_n P_{n-1}) * sum_{v=1}^{n} P_{v-1} a_v.

Both routes are implemented independently in the log domain so that the
result is unchanged under ``p -> c p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._logmath import from_signed_log, neumaier_cumsum, signed_add_arrays, signed_logcumsumexp, to_signed_log
from .errors import ConfigError, ExponentError
from .weights import cumulative


@dataclass(frozen=True)
class ExponentPair:
    """Exponents ``1 < k <= s < inf`` with their conjugates."""

    k: float
    s: float

    def __post_init__(self):
        k, s = float(self.k), float(self.s)
        if not (math.isfinite(k) and math.isfinite(s) and 1.0 < k <= s):
            raise ExponentError(
                f"exponents must satisfy 1 < k <= s < infinity (got k={self.k!r}, s={self.s!r})"
            )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "s", s)

    @property
    def kstar(self):
        return self.k / (self.k - 1.0)

    @property
    def sstar(self):
        return self.s / (self.s - 1.0)


@dataclass(frozen=True)
class Series:
    """A finite prefix ``a_0, ..., a_{N-1}`` of a series."""

    terms: np.ndarray

    def __post_init__(self):
        terms = np.array(self.terms, dtype=float)
        if terms.ndim != 1 or terms.size < 2:
            raise ConfigError("a series prefix needs at least 2 terms")
        if not np.all(np.isfinite(terms)):
            raise ConfigError("series terms must be finite")
        terms.setflags(write=False)
        object.__setattr__(self, "terms", terms)

    def __len__(self):
        return self.terms.size

    @property
    def partial_sums(self):
        return np.cumsum(self.terms)


def impulse(j, length):
    """Unit impulse at index ``j``."""
    a = np.zeros(length)
    a[j] = 1.0
    return Series(a)


def alternating(length):
    """``a_n = (-1)^n``."""
    return Series((-1.0) ** np.arange(length))


def random_series(length, seed):
    """Standard normal terms from a seeded generator."""
    return Series(np.random.default_rng(seed).standard_normal(length))


@dataclass(frozen=True)
class TransformResult:
    """Weighted means ``T`` and differences ``X`` of one series prefix.

    ``X[0]`` is ``nan`` (the difference is defined for ``n >= 1``). The
    ``*_partial`` arrays hold the functionals over prefixes ``1..n`` for
    ``n = 1..N-1``.
    """

    T: np.ndarray
    X: np.ndarray | None = None
    k: float | None = None
    old_partial: np.ndarray | None = field(default=None, repr=False)
    correct_partial: np.ndarray | None = field(default=None, repr=False)

    @property
    def functional_old(self):
        return None if self.old_partial is None else float(self.old_partial[-1])

    @property
    def functional_correct(self):
        return None if self.correct_partial is None else float(self.correct_partial[-1])

    def to_dict(self):
        d = {"T": self.T.tolist()}
        if self.X is not None:
            d["X"] = self.X[1:].tolist()
        if self.k is not None:
            d["k"] = self.k
            d["functional_old"] = self.functional_old
            d["functional_correct"] = self.functional_correct
        return d


def _as_series(series):
    return series if isinstance(series, Series) else Series(series)


def weighted_mean_transform(w, series):
    """``T_n = (1/P_n) sum_{v=0}^n p_v s_v`` for every ``n`` of the prefix."""
    series = _as_series(series)
    n = len(series) - 1
    view = cumulative(w, n)
    sgn, lmag = to_signed_log(series.partial_sums)
    csign, clog = signed_logcumsumexp(sgn, view.logp + lmag)
    return TransformResult(T=from_signed_log(csign, clog - view.logP))


def _differences_formula(view, terms):
    n = terms.size - 1
    X = np.full(n + 1, np.nan)
    sgn, lmag = to_signed_log(terms[1:])
    csign, clog = signed_logcumsumexp(sgn, view.logP[:-1] + lmag)
    scale = view.logp[1:] - view.logP[1:] - view.logP[:-1]
    X[1:] = from_signed_log(csign, clog + scale)
    return X


def _functionals(view, X, k):
    n = np.arange(1, X.size, dtype=float)
    with np.errstate(divide="ignore"):
        labs = np.log(np.abs(X[1:]))
    old_terms = np.exp((k - 1.0) * view.logR[1 : X.size] + k * labs)
    correct_terms = np.exp((k - 1.0) * np.log(n) + k * labs)
    return neumaier_cumsum(old_terms), neumaier_cumsum(correct_terms)


def transform_differences(w, series, exp=None):
    """Weighted means plus the differences ``X_n`` from the closed-form sum.

    When ``exp`` (an :class:`ExponentPair` or a bare ``k``) is supplied the two
    summability functionals are filled in as well.
    """
    series = _as_series(series)
    view = cumulative(w, len(series) - 1)
    T = weighted_mean_transform(w, series).T
    X = _differences_formula(view, series.terms)
    if exp is None:
        return TransformResult(T=T, X=X)
    k = exp.k if isinstance(exp, ExponentPair) else float(exp)
    old, correct = _functionals(view, X, k)
    return TransformResult(T=T, X=X, k=k, old_partial=old, correct_partial=correct)


def summability_functionals(w, series, exp, which="correct"):
    """Prefix value of ``sum (P_n/p_n)^{k-1}|X_n|^k`` (``old``) or ``sum n^{k-1}|X_n|^k`` (``correct``)."""
    res = transform_differences(w, series, exp)
    if which == "old":
        return res.functional_old
    if which == "correct":
        return res.functional_correct
    raise ConfigError(f"which must be 'old' or 'correct', got {which!r}")


def invert_differences(w, X):
    """Recover ``a_1..a_N`` from ``X_1..X_N``.

    ``a_n = (P_n/p_n) X_n - (P_{n-2}/p_{n-1}) X_{n-1}``, with the second term
    absent for ``n = 1``. ``a_0`` does not enter ``X`` and cannot be recovered.
    """
    X = np.asarray(X, dtype=float)
    if X.size < 2:
        raise ConfigError("need at least two differences to invert")
    view = cumulative(w, X.size)
    sx, lx = to_signed_log(X)
    s1, l1 = sx, view.logR[1:] + lx
    s2 = np.concatenate(([0.0], -sx[:-1]))
    l2 = np.concatenate(([-np.inf], view.logP[:-2] - view.logp[1:-1] + lx[:-1]))
    sign, lmag = signed_add_arrays(s1, l1, s2, l2)
    return from_signed_log(sign, lmag)


def starred(X, r):
    """``n^{1-1/r} X_n`` for an array indexed from ``n = 0`` (entry 0 passes through)."""
    X = np.asarray(X, dtype=float)
    n = np.arange(X.size, dtype=float)
    return n ** (1.0 - 1.0 / r) * X
