"""The inclusion matrix mapping starred p-differences to starred q-differences.

With ``X*_n = n^{1-1/k} X_n`` (weights ``p``) and ``Y*_n = n^{1-1/s} Y_n``
(weights ``q``) one has ``Y*_n = sum_{v<=n} a_{nv} X*_v`` where

    a_{nv} = b_n c_v                    for 1 <= v < n
    a_{nn} = d_n
    b_n = n^{1-1/s} q_n / (Q_n Q_{n-1})
    c_v = (Q_v - q_v P_v / p_v) / v^{1-1/k}
    d_n = n^{1/k-1/s} (q_n P_n) / (p_n Q_n)

All factors are stored as sign plus log-magnitude; ``b_n`` and ``c_v`` on
their own over- or underflow for geometric weights long before their
products do.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ._logmath import from_signed_log, signed_add, signed_logcumsumexp, to_signed_log
from .errors import ConfigError, LinearOverflowError
from .weights import cumulative


LINEAR_LOG_LIMIT = 600.0


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _ratio_gap_compensated(plin, qlin, logp, logq, logP, logQ):
    """``E_v`` from ``D_v = p_v Q_{v-1} - q_v P_{v-1}`` in double-double arithmetic.

    Runs while every magnitude stays inside ``exp(+-LINEAR_LOG_LIMIT)``;
    returns the signs, log magnitudes and the last index reached.
    """
    n_max = len(plin) - 1
    sign = np.zeros(n_max + 1)
    logmag = np.full(n_max + 1, -np.inf)
    ph, pl = float(plin[0]), 0.0
    qh, ql = float(qlin[0]), 0.0
    lim = LINEAR_LOG_LIMIT
    last = 0
    for v in range(1, n_max + 1):
        lp, lq = logp[v], logq[v]
        if not (
            abs(lp) < lim and abs(lq) < lim and abs(logP[v]) < lim and abs(logQ[v]) < lim
            and abs(lp + logQ[v - 1]) < lim and abs(lq + logP[v - 1]) < lim
        ):
            break
        pv, qv = float(plin[v]), float(qlin[v])
        h1, e1 = _two_prod(pv, qh)
        e1 += pv * ql
        h2, e2 = _two_prod(qv, ph)
        e2 += qv * pl
        h, e = _two_sum(h1, -h2)
        d = h + (e + (e1 - e2))
        if d != 0.0:
            sign[v] = 1.0 if d > 0 else -1.0
            logmag[v] = math.log(abs(d)) - lp - lq
        ph, t = _two_sum(ph, pv)
        pl += t
        qh, t = _two_sum(qh, qv)
        ql += t
        last = v
    return sign, logmag, last


def _ratio_gap_core(lsp, lsq, lRp, sign=None, logmag=None, start=0):
    """Continue ``E_v = Q_v/q_v - P_v/p_v`` in the log domain from index ``start``."""
    n_max = len(lsp) - 1
    lsp, lsq, lRp = list(lsp), list(lsq), list(lRp)
    sign = np.zeros(n_max + 1) if sign is None else np.array(sign)
    logmag = np.full(n_max + 1, -np.inf) if logmag is None else np.array(logmag)
    se, le = float(sign[start]), float(logmag[start])
    for v in range(start + 1, n_max + 1):
        # E_v = a_v E_{v-1} + (a_v - b_v) R^p_{v-1},
        # a_v = q_{v-1}/q_v, b_v = p_{v-1}/p_v;  a_v - b_v = b_v expm1(log a_v - log b_v)
        delta = lsq[v] - lsp[v]
        s1, l1 = se, lsq[v] + le
        if delta == 0.0:
            s2, l2 = 0.0, -math.inf
        else:
            s2 = 1.0 if delta > 0 else -1.0
            l2 = lsp[v] + math.log(abs(math.expm1(delta))) + lRp[v - 1]
        se, le = signed_add(s1, l1, s2, l2)
        sign[v], logmag[v] = se, le
    sign.setflags(write=False)
    logmag.setflags(write=False)
    return sign, logmag


def ratio_gap(p, q, n_max, logRp=None):
    """Signed log of ``E_v = Q_v/q_v - P_v/p_v`` for ``v = 0..n_max``.

    Uses the compensated linear form while magnitudes allow, then the log
    recurrence. ``logRp`` may supply exact values of ``log(P_v/p_v)``.
    """
    return _ratio_gap(p, q, int(n_max), None if logRp is None else tuple(logRp))


@lru_cache(maxsize=64)
def _ratio_gap(p, q, n_max, logRp):
    pv, qv = cumulative(p, n_max), cumulative(q, n_max)
    with np.errstate(over="ignore"):
        plin, qlin = p.linear_values(n_max), q.linear_values(n_max)
    sign, logmag, last = _ratio_gap_compensated(
        plin.tolist(), qlin.tolist(), pv.logp.tolist(), qv.logp.tolist(), pv.logP.tolist(), qv.logP.tolist()
    )
    lRp = pv.logR if logRp is None else np.asarray(logRp)
    return _ratio_gap_core(pv.log_step, qv.log_step, lRp, sign, logmag, start=last)


def log_pivot(p, q, n_max):
    """Signed log of ``Q_v - q_v P_v / p_v`` for ``v = 0..n_max``.

    Evaluated as ``q_v (Q_v/q_v - P_v/p_v)``, with the gap taken from
    ``p_v Q_v - q_v P_v = p_v Q_{v-1} - q_v P_{v-1}`` in compensated arithmetic
    so that nearly equal ``Q_v`` and ``q_v P_v / p_v`` do not lose digits.
    """
    sign, lgap = ratio_gap(p, q, n_max)
    return sign, cumulative(q, n_max).logp + lgap


@dataclass(frozen=True, eq=False)
class InclusionMatrix:
    """Finite ``N x N`` section (indices ``1..N``) in factorable form.

    Arrays are 0-based storage for 1-based indices: ``log_b[i]`` is row
    ``n = i + 1``.
    """

    N: int
    k: float
    s: float
    log_b: np.ndarray
    sign_c: np.ndarray
    log_c: np.ndarray
    sign_d: np.ndarray
    log_d: np.ndarray

    @property
    def shape(self):
        return (self.N, self.N)

    def section(self, n):
        """Leading ``n x n`` section."""
        if not 1 <= n <= self.N:
            raise ConfigError(f"section size must be in 1..{self.N}, got {n}")
        return replace(
            self,
            N=n,
            log_b=self.log_b[:n],
            sign_c=self.sign_c[:n],
            log_c=self.log_c[:n],
            sign_d=self.sign_d[:n],
            log_d=self.log_d[:n],
        )

    def entry(self, n, v):
        """``a_{nv}`` for 1-based indices."""
        if v > n:
            return 0.0
        if v == n:
            return float(from_signed_log(self.sign_d[n - 1], self.log_d[n - 1]))
        return float(from_signed_log(self.sign_c[v - 1], self.log_b[n - 1] + self.log_c[v - 1]))

    def to_dense(self):
        try:
            with np.errstate(under="ignore"):
                A = np.tril(self.sign_c[None, :] * np.exp(self.log_b[:, None] + self.log_c[None, :]), -1)
                A[np.diag_indices(self.N)] = self.sign_d * np.exp(self.log_d)
        except FloatingPointError:
            raise LinearOverflowError("matrix entries overflow double precision") from None
        return A

    def matvec(self, x):
        """``y_n = b_n sum_{v<n} c_v x_v + d_n x_n`` in O(N)."""
        x = np.asarray(x, dtype=float)
        sx, lx = to_signed_log(x)
        gs, gl = signed_logcumsumexp(self.sign_c * sx, self.log_c + lx, exclusive=True)
        lower = from_signed_log(gs, gl + self.log_b)
        return lower + from_signed_log(self.sign_d * sx, self.log_d + lx)

    def rmatvec(self, z):
        """``(A^T z)_v = c_v sum_{n>v} b_n z_n + d_v z_v`` in O(N)."""
        z = np.asarray(z, dtype=float)
        sz, lz = to_signed_log(z)
        hs, hl = signed_logcumsumexp(sz, self.log_b + lz, reverse=True, exclusive=True)
        upper = from_signed_log(hs * self.sign_c, hl + self.log_c)
        return upper + from_signed_log(self.sign_d * sz, self.log_d + lz)

    def column_log_norms(self, r):
        """``log ||A e_v||_r`` for every column."""
        tail = np.logaddexp.accumulate((r * self.log_b)[::-1])[::-1]
        tail = np.concatenate((tail[1:], [-np.inf]))
        with np.errstate(invalid="ignore"):
            lower = np.where(self.sign_c != 0, r * self.log_c + tail, -np.inf)
            diag = np.where(self.sign_d != 0, r * self.log_d, -np.inf)
            return np.logaddexp(lower, diag) / r

    def as_linear_operator(self):
        return LinearOperator(self.shape, matvec=self.matvec, rmatvec=self.rmatvec, dtype=float)

    def to_csv(self, path):
        """Dense dump as ``row,col,value`` lines (nonzero lower triangle)."""
        if self.N > 100:
            raise ConfigError("dense CSV dumps are limited to N <= 100")
        A = self.to_dense()
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["row", "col", "value"])
            for n in range(1, self.N + 1):
                for v in range(1, n + 1):
                    out.writerow([n, v, repr(float(A[n - 1, v - 1]))])


def build_inclusion_matrix(p, q, exp, N):
    """Build the ``N x N`` section of the inclusion matrix for ``(p, k) -> (q, s)``."""
    if N < 2:
        raise ConfigError(f"section size must be >= 2, got {N}")
    k, s = exp.k, exp.s
    pv, qv = cumulative(p, N), cumulative(q, N)
    n = np.arange(1, N + 1, dtype=float)
    logn = np.log(n)
    log_b = (1.0 - 1.0 / s) * logn + qv.logp[1:] - qv.logP[1:] - qv.logP[:-1]
    psign, plog = log_pivot(p, q, N)
    log_c = np.where(psign[1:] != 0, plog[1:] - (1.0 - 1.0 / k) * logn, -np.inf)
    log_d = (1.0 / k - 1.0 / s) * logn + pv.logR[1:] - qv.logR[1:]
    arrays = [log_b, np.array(psign[1:]), log_c, np.ones(N), log_d]
    for a in arrays:
        a.setflags(write=False)
    return InclusionMatrix(N, k, s, *arrays)


def apply_section(A, x):
    """``A x`` for a length-``N`` vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.N,):
        raise ConfigError(f"vector length {x.size} does not match section size {A.N}")
    return A.matvec(x)


def split_BC(A):
    """Split into the strictly lower factorable part ``B`` and the diagonal ``C``."""
    zeros = np.zeros(A.N)
    B = replace(A, sign_d=zeros, log_d=np.full(A.N, -np.inf))
    C = replace(A, sign_c=zeros, log_c=np.full(A.N, -np.inf))
    return B, C
