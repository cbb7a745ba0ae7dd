"""Positive weight sequences and their cumulative sums.

Sequences are indexed from ``n = 0`` with ``P_0 = p_0``. Everything that can
grow or shrink geometrically is kept in the log domain; the linear accessors
raise :class:`LinearOverflowError` instead of returning ``inf`` or ``0``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import LinearOverflowError, WeightError

KINDS = ("constant", "power", "geometric", "exponential", "explicit")


@dataclass(frozen=True)
class WeightSequence:
    """A positive sequence ``p_n = scale * f(n + offset)``.

    ``param`` is the family parameter: the exponent for ``power``
    (``f(m) = m**param``), the ratio for ``geometric`` (``f(m) = param**m``)
    and the rate for ``exponential`` (``f(m) = exp(param * m)``).
    ``explicit`` sequences read ``f(m) = values[m]`` and cannot be evaluated
    past the end of ``values``.
    """

    kind: str
    param: float = 0.0
    offset: int = 0
    values: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise WeightError(f"unknown weight family {self.kind!r}; expected one of {KINDS}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise WeightError(f"scale must be a positive finite number, got {self.scale!r}")
        if self.offset < 0:
            raise WeightError(f"offset must be >= 0, got {self.offset}")
        if self.kind == "geometric" and not (self.param > 0 and math.isfinite(self.param)):
            raise WeightError(f"geometric ratio must be > 0, got {self.param!r}", index=0)
        if self.kind == "power" and self.param != 0 and self.offset < 1:
            raise WeightError(
                "power weights need offset >= 1 (p_0 = 0**alpha is not positive)", index=0
            )
        if self.kind == "explicit":
            if len(self.values) == 0:
                raise WeightError("explicit weights need at least one value")
            for i, v in enumerate(self.values):
                if not (v > 0 and math.isfinite(v)):
                    raise WeightError(f"explicit weight at index {i} is not positive: {v!r}", index=i)
            if self.offset >= len(self.values):
                raise WeightError("offset runs past the explicit values", index=self.offset)

    @property
    def max_index(self):
        """Largest evaluable ``n`` (``None`` when unbounded)."""
        if self.kind == "explicit":
            return len(self.values) - 1 - self.offset
        return None

    def _check_range(self, n_max):
        if n_max < 0:
            raise WeightError(f"index must be >= 0, got {n_max}", index=n_max)
        top = self.max_index
        if top is not None and n_max > top:
            raise WeightError(
                f"explicit sequence has {top + 1} terms; cannot evaluate index {n_max}",
                index=top + 1,
            )

    def log_values(self, n_max):
        """``log p_n`` for ``n = 0..n_max``."""
        self._check_range(n_max)
        m = np.arange(n_max + 1, dtype=float) + self.offset
        ls = math.log(self.scale)
        if self.kind == "constant":
            out = np.zeros(n_max + 1)
        elif self.kind == "power":
            out = self.param * np.log(m) if self.param != 0 else np.zeros(n_max + 1)
        elif self.kind == "geometric":
            out = m * math.log(self.param)
        elif self.kind == "exponential":
            out = self.param * m
        else:
            out = np.log(np.asarray(self.values[self.offset : self.offset + n_max + 1], dtype=float))
        return out + ls

    def linear_values(self, n_max):
        """``p_n`` for ``n = 0..n_max`` evaluated directly (may overflow to ``inf``)."""
        self._check_range(n_max)
        m = np.arange(n_max + 1, dtype=float) + self.offset
        with np.errstate(over="ignore"):
            if self.kind == "constant":
                out = np.ones(n_max + 1)
            elif self.kind == "power":
                out = m**self.param
            elif self.kind == "geometric":
                out = self.param**m
            elif self.kind == "exponential":
                out = np.exp(self.param * m)
            else:
                out = np.asarray(self.values[self.offset : self.offset + n_max + 1], dtype=float)
            return out * self.scale

    def log_steps(self, n_max):
        """``log(p_{n-1} / p_n)`` for ``n = 1..n_max`` (entry 0 is unused).

        Closed forms are used where the family has one, so the result does not
        depend on ``scale`` at all.
        """
        self._check_range(n_max)
        out = np.zeros(n_max + 1)
        if n_max == 0:
            return out
        m = np.arange(1, n_max + 1, dtype=float) + self.offset
        if self.kind == "power" and self.param != 0:
            out[1:] = -self.param * np.log1p(1.0 / (m - 1.0))
        elif self.kind == "geometric":
            out[1:] = -math.log(self.param)
        elif self.kind == "exponential":
            out[1:] = -self.param
        elif self.kind == "explicit":
            lv = np.log(np.asarray(self.values[self.offset : self.offset + n_max + 1], dtype=float))
            out[1:] = lv[:-1] - lv[1:]
        return out

    def scaled(self, c):
        """The sequence ``c * p_n``."""
        return WeightSequence(self.kind, self.param, self.offset, self.values, self.scale * c)

    def to_dict(self):
        d = {"kind": self.kind, "offset": self.offset}
        if self.kind == "power":
            d["exponent"] = self.param
        elif self.kind == "geometric":
            d["ratio"] = self.param
        elif self.kind == "exponential":
            d["rate"] = self.param
        elif self.kind == "explicit":
            d["values"] = list(self.values)
        if self.scale != 1.0:
            d["scale"] = self.scale
        return d

    def describe(self):
        if self.kind in ("constant", "explicit"):
            base = self.kind if self.kind == "constant" else f"explicit[{len(self.values)}]"
        else:
            base = f"{self.kind}:{self.param:g}"
        if self.offset:
            base += f"+{self.offset}"
        return base


_PARAM_NAMES = {"power": "exponent", "geometric": "ratio", "exponential": "rate"}


def make_weights(kind, params=None, offset=0):
    """Build a :class:`WeightSequence` from a family name and parameters.

    ``params`` may be a number (the family parameter), a dict with the JSON
    key of the family (``exponent``/``ratio``/``rate``/``values``) or, for
    ``explicit``, a sequence of values.

    >>> make_weights("geometric", 2).log_values(3).round(6).tolist()
    [0.0, 0.693147, 1.386294, 2.079442]
    """
    kind = kind.lower()
    if kind not in KINDS:
        raise WeightError(f"unknown weight family {kind!r}; expected one of {KINDS}")
    if kind == "constant":
        return WeightSequence("constant", offset=offset)
    if kind == "explicit":
        if isinstance(params, dict):
            params = params.get("values")
        if params is None:
            raise WeightError("explicit weights need a list of values")
        return WeightSequence("explicit", values=tuple(float(v) for v in params), offset=offset)
    if isinstance(params, dict):
        name = _PARAM_NAMES[kind]
        if name not in params:
            raise WeightError(f"{kind} weights need the {name!r} parameter")
        params = params[name]
    if params is None:
        raise WeightError(f"{kind} weights need a parameter")
    return WeightSequence(kind, float(params), offset=offset)


def constant():
    return WeightSequence("constant")


def power(alpha, offset=1):
    return WeightSequence("power", float(alpha), offset=offset)


def geometric(ratio):
    return WeightSequence("geometric", float(ratio))


def exponential(rate):
    return WeightSequence("exponential", float(rate))


def explicit(values, offset=0):
    return WeightSequence("explicit", values=tuple(float(v) for v in values), offset=offset)


@dataclass(frozen=True, eq=False)
class CumulativeView:
    """Eagerly computed cumulative state of one sequence on ``0..n_max``.

    ``logR[n] = log(P_n / p_n)`` comes from the forward recurrence
    ``R_n = 1 + (p_{n-1}/p_n) R_{n-1}``, ``R_0 = 1``; ``logP`` from a running
    log-sum-exp of ``logp``.
    """

    source: WeightSequence
    n_max: int
    logp: np.ndarray
    logP: np.ndarray
    logR: np.ndarray
    log_step: np.ndarray

    def ratio_P_over_p(self, n):
        return _exp_checked(self.logR[n], f"P_n/p_n at n={n}")


def _ratio_recurrence(log_step):
    out = np.empty(len(log_step))
    prev = 0.0
    out[0] = 0.0
    for n, ls in enumerate(log_step.tolist()[1:], start=1):
        # log(1 + exp(ls + prev))
        t = ls + prev
        prev = t + math.log1p(math.exp(-t)) if t > 0 else math.log1p(math.exp(t))
        out[n] = prev
    return out


@lru_cache(maxsize=64)
def _cumulative_cached(w, n_max):
    logp = w.log_values(n_max)
    logP = np.logaddexp.accumulate(logp)
    steps = w.log_steps(n_max)
    logR = _ratio_recurrence(steps)
    for a in (logp, logP, logR, steps):
        a.setflags(write=False)
    return CumulativeView(w, n_max, logp, logP, logR, steps)


def cumulative(w, n_max):
    """Return the (cached, read-only) :class:`CumulativeView` of ``w`` up to ``n_max``."""
    w._check_range(n_max)
    return _cumulative_cached(w, int(n_max))


def _exp_checked(logx, what):
    if logx > 709.78:
        raise LinearOverflowError(f"{what} overflows double precision (log = {logx:.6g}); use the log-domain accessor")
    if logx < -745.1:
        raise LinearOverflowError(f"{what} underflows double precision (log = {logx:.6g}); use the log-domain accessor")
    return math.exp(logx)


def log_partial_sum(w, n):
    """``log P_n`` via a running log-sum-exp."""
    return float(cumulative(w, n).logP[n])


def partial_sum(w, n):
    """``P_n = sum_{i=0}^n p_i`` in the linear domain.

    Raises :class:`LinearOverflowError` rather than returning ``inf``.
    """
    p = w.linear_values(n)
    if not np.all(np.isfinite(p)):
        raise LinearOverflowError(f"p_n overflows double precision below n={n}; use log_partial_sum")
    try:
        total = math.fsum(p.tolist())
    except OverflowError:
        total = math.inf
    if not math.isfinite(total):
        raise LinearOverflowError(f"P_{n} overflows double precision; use log_partial_sum")
    return total


def ratio_P_over_p(w, n):
    """``P_n / p_n`` from the forward recurrence (never forms ``P_n`` or ``p_n``)."""
    return cumulative(w, n).ratio_P_over_p(n)


def from_json(obj):
    """Parse a JSON weight spec such as ``{"kind": "geometric", "ratio": 2.0}``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise WeightError("weight spec must be an object with a 'kind' field")
    kind = str(obj["kind"]).lower()
    offset = int(obj.get("offset", 1 if kind == "power" else 0))
    w = make_weights(kind, obj, offset=offset)
    if "scale" in obj:
        w = w.scaled(float(obj["scale"]))
    return w


def read_csv_values(path):
    """Read one real per line (blank lines and ``#`` comments skipped)."""
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            values.append(float(row[0]))
    return values


def from_csv(path):
    """Explicit weights from a CSV file with one positive real per line."""
    return explicit(read_csv_values(path))


def parse_weight_spec(text):
    """Parse a command-line weight spec.

    Accepted forms: ``family[:param[:offset]]`` (e.g. ``geometric:2``,
    ``exponential:-1``, ``power:1.5``), inline JSON (``{"kind": ...}``), or a
    path to a ``.json`` spec or ``.csv`` list of values.
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            return from_json(text)
        except json.JSONDecodeError as exc:
            raise WeightError(f"malformed JSON weight spec: {exc}") from None
    path = Path(text)
    if path.suffix.lower() in (".json", ".csv"):
        if path.suffix.lower() == ".csv":
            return from_csv(path)
        with open(path) as fh:
            return from_json(json.load(fh))
    parts = text.split(":")
    kind = parts[0].lower()
    if kind not in KINDS or kind == "explicit":
        raise WeightError(f"malformed weight spec {text!r}; expected family[:param[:offset]]")
    try:
        param = float(parts[1]) if len(parts) > 1 else None
        offset = int(parts[2]) if len(parts) > 2 else (1 if kind == "power" else 0)
    except ValueError:
        raise WeightError(f"malformed weight spec {text!r}; parameter is not a number") from None
    if len(parts) > 3:
        raise WeightError(f"malformed weight spec {text!r}; too many fields")
    return make_weights(kind, param, offset=offset)
