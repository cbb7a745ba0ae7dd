import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbar_inclusion import transform as T
from nbar_inclusion import weights as W
from nbar_inclusion.errors import ConfigError, ExponentError

from conftest import FAMILIES, rel_err


def dense_means(p, a):
    """O(N^2) weighted means from the definition, in exact rationals."""
    p = [Fraction(x) for x in p]
    s = np.cumsum(a).tolist()
    out = []
    for n in range(len(a)):
        num = sum(p[v] * Fraction(s[v]) for v in range(n + 1))
        out.append(float(num / sum(p[: n + 1])))
    return np.array(out)


def test_cesaro_means_of_impulse():
    res = T.weighted_mean_transform(W.constant(), [0, 1, 0, 0])
    np.testing.assert_allclose(res.T, [0, 1 / 2, 2 / 3, 3 / 4], rtol=1e-15)


def test_constant_partial_sums_give_constant_means(family):
    res = T.weighted_mean_transform(family, [2.5] + [0.0] * 30)
    np.testing.assert_allclose(res.T, 2.5, rtol=1e-14)


def test_geometric_means_small():
    res = T.weighted_mean_transform(W.explicit([1, 2, 4]), [1, 1, 1])
    np.testing.assert_allclose(res.T, [1, 5 / 3, 17 / 7], rtol=1e-15)


def test_differences_of_impulse():
    X = T.transform_differences(W.constant(), [0, 1, 0, 0]).X
    np.testing.assert_allclose(X[1:], [1 / 2, 1 / 6, 1 / 12], rtol=1e-14)
    assert math.isnan(X[0])


def test_differences_formula_uses_upper_limit_n():
    X = T.transform_differences(W.explicit([1, 2, 4]), [1, 1, 1]).X
    assert X[1] == pytest.approx(2 / 3, rel=1e-15)
    assert X[2] == pytest.approx(16 / 21, rel=1e-15)
    assert X[2] == pytest.approx(17 / 7 - 5 / 3, rel=1e-14)


def test_zero_series():
    res = T.transform_differences(W.geometric(2), np.zeros(10), 2.0)
    assert np.all(res.X[1:] == 0)
    assert res.functional_old == 0 and res.functional_correct == 0


@pytest.mark.parametrize("seed", range(3))
def test_means_match_exact_oracle(family, seed):
    a = T.random_series(60, seed).terms
    p = family.linear_values(59)
    np.testing.assert_allclose(T.weighted_mean_transform(family, a).T, dense_means(p, a), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_formula_matches_direct_differencing(family, seed):
    a = T.random_series(201, seed)
    res = T.transform_differences(family, a)
    assert rel_err(res.X[1:], np.diff(res.T)) < 1e-9


def test_inversion_of_impulse():
    a = T.invert_differences(W.constant(), [1 / 2, 1 / 6, 1 / 12])
    np.testing.assert_allclose(a, [1, 0, 0], atol=1e-15)
    assert T.invert_differences(W.constant(), [1 / 2, 1 / 6])[1] == pytest.approx(0.0, abs=1e-15)
    assert np.all(T.invert_differences(W.geometric(2), np.zeros(5)) == 0)


@pytest.mark.parametrize("seed", range(4))
def test_round_trip(family, seed):
    a = T.random_series(201, seed)
    X = T.transform_differences(family, a).X
    assert rel_err(T.invert_differences(family, X[1:]), a.terms[1:]) < 1e-9


@pytest.mark.parametrize("c", [1e-6, 1e6])
def test_scale_invariance(family, c):
    a = T.random_series(120, 7)
    base = T.transform_differences(family, a)
    scaled = T.transform_differences(family.scaled(c), a)
    np.testing.assert_allclose(scaled.T, base.T, rtol=1e-10, atol=1e-14)
    assert rel_err(scaled.X[1:], base.X[1:]) < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    alpha=st.floats(-10, 10),
    beta=st.floats(-10, 10),
    seed=st.integers(0, 10_000),
    name=st.sampled_from(sorted(FAMILIES)),
)
def test_linearity(alpha, beta, seed, name):
    w = FAMILIES[name]
    a = T.random_series(80, seed).terms
    b = T.random_series(80, seed + 1).terms
    combo = T.transform_differences(w, alpha * a + beta * b)
    ra, rb = T.transform_differences(w, a), T.transform_differences(w, b)
    scale = max(1.0, abs(alpha), abs(beta))
    np.testing.assert_allclose(combo.T, alpha * ra.T + beta * rb.T, atol=1e-10 * scale * np.max(np.abs(ra.T) + np.abs(rb.T)))
    np.testing.assert_allclose(combo.X[1:], alpha * ra.X[1:] + beta * rb.X[1:], atol=1e-10 * scale * np.max(np.abs(ra.X[1:]) + np.abs(rb.X[1:])))


def test_functionals_direct_oracle_cesaro_k2():
    # p = 1, k = 2: old weights (n+1) |X_n|^2, correct weights n |X_n|^2
    a = [0, 1] + [0] * 8
    res = T.transform_differences(W.constant(), a, 2.0)
    X = [1 / ((n + 1) * n) for n in range(1, 10)]  # T_n = n/(n+1)
    old = math.fsum((n + 1) * x * x for n, x in zip(range(1, 10), X))
    correct = math.fsum(n * x * x for n, x in zip(range(1, 10), X))
    assert res.functional_old == pytest.approx(old, rel=1e-13)
    assert res.functional_correct == pytest.approx(correct, rel=1e-13)
    assert T.summability_functionals(W.constant(), a, T.ExponentPair(2, 2), "old") == res.functional_old


def test_functionals_monotone_in_prefix(family):
    res = T.transform_differences(family, T.random_series(150, 3), 1.7)
    assert np.all(np.diff(res.old_partial) >= 0)
    assert np.all(np.diff(res.correct_partial) >= 0)
    assert res.old_partial[0] >= 0


def test_functionals_equivalent_for_cesaro_weights():
    for seed in range(20):
        res = T.transform_differences(W.constant(), T.random_series(201, seed), 2.0)
        ratio = res.old_partial / res.correct_partial
        assert np.all((ratio >= 1.0 - 1e-12) & (ratio <= 2.0 + 1e-12))


def test_series_generators():
    assert T.impulse(2, 4).terms.tolist() == [0, 0, 1, 0]
    assert T.alternating(4).terms.tolist() == [1, -1, 1, -1]
    np.testing.assert_array_equal(T.random_series(5, 1).terms, T.random_series(5, 1).terms)
    with pytest.raises(ConfigError):
        T.Series([1.0])


@pytest.mark.parametrize("k, s", [(1.0, 2.0), (2.0, 1.5), (0.5, 0.7), (2.0, math.inf)])
def test_exponent_pair_validation(k, s):
    with pytest.raises(ExponentError):
        T.ExponentPair(k, s)


@settings(max_examples=50, deadline=None)
@given(k=st.floats(1.0001, 50.0))
def test_conjugate_exponent(k):
    e = T.ExponentPair(k, k)
    assert abs(1 / e.k + 1 / e.kstar - 1) <= 1e-15 * 4
    assert e.sstar == e.kstar
