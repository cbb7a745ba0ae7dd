"""Lower-bound estimates of finite-section l^k -> l^s operator norms.

Uses the nonlinear power iteration for mixed norms: from a unit ``x`` in
``l^k`` form ``y = A x``, the dual vector ``z = sign(y)|y|^{s-1}``, the
pull-back ``u = A^T z`` and the next iterate ``x ~ sign(u)|u|^{k*-1}``. For
signed matrices the objective is not concave, so several starts are tried and
the best value is kept. Every reported value is attained by the returned
witness, hence is a certified lower bound on the norm.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .errors import ConfigError
from .operator import InclusionMatrix, build_inclusion_matrix

MAX_ITER = 500
REL_TOL = 1e-8
STABLE_ITERS = 3


def mixed_norm(x, r):
    """``(sum |x_i|^r)^{1/r}``, scaled by ``max|x_i|`` so extreme magnitudes stay finite.

    >>> mixed_norm([3.0, 4.0], 2)
    5.0
    """
    if r < 1:
        raise ConfigError(f"norm exponent must be >= 1, got {r}")
    a = np.abs(np.asarray(x, dtype=float))
    top = a.max() if a.size else 0.0
    if top == 0.0:
        return 0.0
    return float(top * math.fsum(((a / top) ** r).tolist()) ** (1.0 / r))


def _dual_power(v, exponent):
    """``sign(v)|v|^exponent`` up to a positive factor, without overflow."""
    a = np.abs(v)
    top = a.max()
    if top == 0.0 or not np.isfinite(top):
        return np.zeros_like(v)
    with np.errstate(under="ignore", divide="ignore"):
        logs = np.log(np.where(a > 0, a, top)) - math.log(top)
        return np.sign(v) * np.exp(exponent * logs) * (a > 0)


@dataclass
class NormEstimate:
    value: float
    iterations: int
    restarts: int
    seed: int
    converged: bool
    witness: np.ndarray

    def to_dict(self, include_witness=False):
        d = {
            "value": self.value,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "seed": self.seed,
            "converged": self.converged,
        }
        if include_witness:
            d["witness"] = self.witness.tolist()
        return d


def _as_operator(A):
    if isinstance(A, InclusionMatrix):
        return A.as_linear_operator()
    if isinstance(A, LinearOperator):
        return A
    return aslinearoperator(np.asarray(A, dtype=float))


def _column_norm_start(A, s):
    """Unit vector on the column of largest ``l^s`` norm (lowest index on ties)."""
    if isinstance(A, InclusionMatrix):
        lognorms = A.column_log_norms(s)
    elif isinstance(A, LinearOperator):
        return None
    else:
        with np.errstate(divide="ignore"):
            lognorms = np.log(np.linalg.norm(np.asarray(A, dtype=float), ord=s, axis=0))
    x = np.zeros(len(lognorms))
    x[int(np.argmax(lognorms))] = 1.0
    return x


def _ratio(op, x, k, s):
    nx = mixed_norm(x, k)
    if nx == 0.0:
        return 0.0
    return mixed_norm(op.matvec(x), s) / nx


def _iterate(op, x, k, s, max_iter, tol):
    kstar = k / (k - 1.0)
    x = x / mixed_norm(x, k)
    best_x, best = x, _ratio(op, x, k, s)
    prev, stable, it = best, 0, 0
    converged = False
    for it in range(1, max_iter + 1):
        y = op.matvec(x)
        if not np.any(y):
            break
        u = op.rmatvec(_dual_power(y, s - 1.0))
        x_new = _dual_power(u, kstar - 1.0)
        nx = mixed_norm(x_new, k)
        if nx == 0.0:
            break
        x = x_new / nx
        val = _ratio(op, x, k, s)
        if val > best:
            best, best_x = val, x
        stable = stable + 1 if abs(val - prev) <= tol * max(val, 1e-300) else 0
        prev = val
        if stable >= STABLE_ITERS:
            converged = True
            break
    return best, best_x, it, converged


def _start_vector(i, n, rng, first):
    if i == 0 and first is not None:
        return first
    if i <= 1:
        return np.ones(n)
    return rng.choice([-1.0, 1.0], size=n)


def estimate_norm(A, exp, restarts=4, seed=0, x0=None, max_iter=MAX_ITER, tol=REL_TOL, workers=None):
    """Best ``||A x||_s / ||x||_k`` found by power iteration from several starts.

    Start 0 is ``x0`` when given, otherwise the unit vector on the column of
    largest norm; start 1 is the all-ones vector; later starts use random
    signs drawn from ``seed``. Results are merged by value with the lowest
    start index winning ties, so they do not depend on ``workers``.
    """
    if restarts < 1:
        raise ConfigError("restarts must be >= 1")
    k, s = exp.k, exp.s
    op = _as_operator(A)
    n = op.shape[1]
    if n < 1:
        raise ConfigError("empty section")
    first = np.asarray(x0, dtype=float) if x0 is not None else _column_norm_start(A, s)
    children = np.random.SeedSequence(seed).spawn(restarts)
    starts = [_start_vector(i, n, np.random.default_rng(children[i]), first) for i in range(restarts)]

    def run(x):
        return _iterate(op, x, k, s, max_iter, tol)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(x) for x in starts]

    best_i = 0
    for i, r in enumerate(results):
        if r[0] > results[best_i][0]:
            best_i = i
    value, witness, _, converged = results[best_i]
    return NormEstimate(
        value=float(value),
        iterations=int(sum(r[2] for r in results)),
        restarts=restarts,
        seed=seed,
        converged=bool(converged),
        witness=witness,
    )


@dataclass
class ProfileEntry:
    N: int
    estimate: NormEstimate
    growth_ratio: float | None

    def to_dict(self):
        return {"N": self.N, "growthRatio": self.growth_ratio, "estimate": self.estimate.to_dict()}


def norm_growth_profile(p, q, exp, sections, restarts=4, seed=0):
    """Norm estimates on nested sections, warm-starting from the previous witness."""
    sections = [int(N) for N in sections]
    if not sections or sections[0] < 2 or any(b <= a for a, b in zip(sections, sections[1:])):
        raise ConfigError("sections must be increasing integers >= 2")
    A_full = build_inclusion_matrix(p, q, exp, sections[-1])
    out = []
    prev = None
    for N in sections:
        A = A_full.section(N)
        x0 = None
        if prev is not None:
            x0 = np.zeros(N)
            x0[: prev.witness.size] = prev.witness
            # keep the column-norm start too: compare and keep the better one
            col = _column_norm_start(A, exp.s)
            if _ratio(A, col, exp.k, exp.s) > _ratio(A, x0, exp.k, exp.s):
                x0 = col
        est = estimate_norm(A, exp, restarts=restarts, seed=seed, x0=x0)
        ratio = est.value / prev.value if prev is not None and prev.value > 0 else None
        out.append(ProfileEntry(N, est, ratio))
        prev = est
    return out
