import math
from fractions import Fraction

import numpy as np
import pytest

from nbar_inclusion import operator as O
from nbar_inclusion import transform as T
from nbar_inclusion import weights as W
from nbar_inclusion.errors import ConfigError, LinearOverflowError

from conftest import FAMILIES, rel_err

PAIRS = [(a, b) for a in sorted(FAMILIES) for b in sorted(FAMILIES)]


def dense_entries(p, q, k, s, N):
    """Entries a_{nv}, 1 <= v <= n <= N, straight from the three-case definition."""
    pl = [Fraction(x) for x in p.linear_values(N)]
    ql = [Fraction(x) for x in q.linear_values(N)]
    P = np.cumsum(np.array(pl, dtype=object))
    Q = np.cumsum(np.array(ql, dtype=object))
    A = np.zeros((N, N))
    for n in range(1, N + 1):
        for v in range(1, n + 1):
            if v == n:
                val = n ** (1 / k - 1 / s) * float(ql[n] * P[n] / (pl[n] * Q[n]))
            else:
                row = n ** (1 - 1 / s) * float(ql[n] / (Q[n] * Q[n - 1]))
                col = float(Q[v] - ql[v] * P[v] / pl[v]) / v ** (1 - 1 / k)
                val = row * col
            A[n - 1, v - 1] = val
    return A


def test_equal_weights_equal_exponents_is_identity(family):
    A = O.build_inclusion_matrix(family, family, T.ExponentPair(2, 2), 40)
    assert np.all(A.sign_c == 0)
    np.testing.assert_allclose(np.exp(A.log_d), 1.0, rtol=1e-13)
    np.testing.assert_allclose(A.to_dense(), np.eye(40), atol=1e-13)


def test_cesaro_to_cesaro_k_lt_s_is_diagonal():
    A = O.build_inclusion_matrix(W.constant(), W.constant(), T.ExponentPair(2, 3), 30)
    n = np.arange(1, 31.0)
    np.testing.assert_allclose(A.to_dense(), np.diag(n ** (1 / 6)), rtol=1e-13, atol=0)


@pytest.mark.parametrize("N", [3, 5])
def test_factorable_matches_dense_small(N):
    p, q = W.constant(), W.exponential(-1)
    A = O.build_inclusion_matrix(p, q, T.ExponentPair(2, 2), N)
    np.testing.assert_allclose(A.to_dense(), dense_entries(p, q, 2, 2, N), rtol=1e-12)


@pytest.mark.parametrize("pname, qname", PAIRS)
def test_factorable_matches_dense(pname, qname):
    p, q = FAMILIES[pname], FAMILIES[qname]
    k, s = 1.5, 2.5
    A = O.build_inclusion_matrix(p, q, T.ExponentPair(k, s), 50)
    ref = dense_entries(p, q, k, s, 50)
    got = A.to_dense()
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=0)
    for n, v in [(1, 1), (7, 3), (50, 49), (3, 9)]:
        assert A.entry(n, v) == pytest.approx(ref[n - 1, v - 1], rel=1e-12, abs=0)


def test_d_positive_c_signed():
    A = O.build_inclusion_matrix(W.geometric(2), W.constant(), T.ExponentPair(2, 2), 30)
    assert np.all(A.sign_d > 0)
    assert set(np.unique(A.sign_c)) <= {-1.0, 0.0, 1.0}
    A = O.build_inclusion_matrix(W.constant(), W.geometric(2), T.ExponentPair(2, 2), 30)
    assert np.all(A.sign_c[1:] < 0)


def test_unit_vector_gives_first_column():
    A = O.build_inclusion_matrix(W.constant(), W.exponential(-1), T.ExponentPair(2, 3), 12)
    e1 = np.zeros(12)
    e1[0] = 1
    y = O.apply_section(A, e1)
    b = np.exp(A.log_b)
    c1 = A.sign_c[0] * np.exp(A.log_c[0])
    assert y[0] == pytest.approx(np.exp(A.log_d[0]), rel=1e-14)
    np.testing.assert_allclose(y[1:], b[1:] * c1, rtol=1e-13)


def test_identity_apply():
    A = O.build_inclusion_matrix(W.geometric(2), W.geometric(2), T.ExponentPair(3, 3), 100)
    x = np.random.default_rng(0).standard_normal(100)
    np.testing.assert_allclose(O.apply_section(A, x), x, rtol=1e-13)


@pytest.mark.parametrize("pname, qname", PAIRS)
def test_apply_and_transpose_match_dense(pname, qname):
    p, q = FAMILIES[pname], FAMILIES[qname]
    A = O.build_inclusion_matrix(p, q, T.ExponentPair(2, 3), 60)
    D = A.to_dense()
    rng = np.random.default_rng(1)
    for _ in range(3):
        x = rng.standard_normal(60)
        assert rel_err(A.matvec(x), D @ x) < 1e-12
        assert rel_err(A.rmatvec(x), D.T @ x) < 1e-12
    np.testing.assert_allclose(np.exp(A.column_log_norms(3.0)), np.linalg.norm(D, ord=3, axis=0), rtol=1e-12)


@pytest.mark.parametrize("pname, qname", PAIRS)
def test_starred_transform_identity(pname, qname):
    p, q = FAMILIES[pname], FAMILIES[qname]
    k, s = 1.5, 3.0
    A = O.build_inclusion_matrix(p, q, T.ExponentPair(k, s), 200)
    for seed in range(5):
        a = T.random_series(201, seed)
        X = T.transform_differences(p, a).X
        Y = T.transform_differences(q, a).X
        got = O.apply_section(A, T.starred(X, k)[1:])
        assert rel_err(got, T.starred(Y, s)[1:]) < 1e-8


def test_split_BC():
    p, q = W.constant(), W.exponential(-1)
    A = O.build_inclusion_matrix(p, q, T.ExponentPair(2, 2), 3)
    B, C = O.split_BC(A)
    ref = dense_entries(p, q, 2, 2, 3)
    np.testing.assert_allclose(B.to_dense(), np.tril(ref, -1), rtol=1e-12, atol=0)
    np.testing.assert_allclose(C.to_dense(), np.diag(np.diag(ref)), rtol=1e-12, atol=0)
    assert np.all(B.to_dense()[0] == 0)

    A = O.build_inclusion_matrix(W.power(1), W.geometric(2), T.ExponentPair(2, 2.5), 80)
    B, C = O.split_BC(A)
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = rng.standard_normal(80)
        assert rel_err(B.matvec(x) + C.matvec(x), A.matvec(x)) < 1e-12


def test_split_of_identity():
    I = O.build_inclusion_matrix(W.constant(), W.constant(), T.ExponentPair(2, 2), 10)
    B, C = O.split_BC(I)
    assert np.all(B.to_dense() == 0)
    np.testing.assert_allclose(C.to_dense(), np.eye(10), rtol=1e-14)


@pytest.mark.parametrize("pname, qname", PAIRS)
def test_key_identity_exact(pname, qname):
    """P_v Q_{v-1} - Q_v P_{v-1} = p_v Q_v - q_v P_v, checked against exact rationals."""
    p, q = FAMILIES[pname], FAMILIES[qname]
    N = 200
    pl = [Fraction(x) for x in p.linear_values(N)]
    ql = [Fraction(x) for x in q.linear_values(N)]
    sign, lmag = O.log_pivot(p, q, N)
    logp = p.log_values(N)
    P = Q = Fraction(0)
    Pprev = Qprev = None
    for v in range(N + 1):
        P, Q = P + pl[v], Q + ql[v]
        if v >= 1:
            lhs = P * Qprev - Q * Pprev
            assert lhs == pl[v] * Q - ql[v] * P
            impl = 0.0 if sign[v] == 0 else sign[v] * math.exp(logp[v] + lmag[v])
            if lhs == 0:
                assert impl == 0.0
            else:
                assert abs(Fraction(impl) - lhs) <= Fraction(1, 10**12) * abs(lhs)
        Pprev, Qprev = P, Q


def test_large_sections_stay_finite():
    A = O.build_inclusion_matrix(W.exponential(-1), W.geometric(2), T.ExponentPair(2, 2), 4096)
    assert np.all(np.isfinite(A.log_b)) and np.all(np.isfinite(A.log_c))
    with pytest.raises(LinearOverflowError):
        A.matvec(np.ones(4096))
    x = np.exp(-np.arange(1, 4097.0))
    assert np.all(np.isfinite(A.matvec(x)))


def test_section_and_csv(tmp_path):
    A = O.build_inclusion_matrix(W.constant(), W.power(1), T.ExponentPair(2, 2), 20)
    np.testing.assert_allclose(A.section(8).to_dense(), A.to_dense()[:8, :8], rtol=0)
    path = tmp_path / "a.csv"
    A.section(4).to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,value" and len(lines) == 1 + 10
    with pytest.raises(ConfigError):
        O.build_inclusion_matrix(W.constant(), W.constant(), T.ExponentPair(2, 2), 101).to_csv(path)
    with pytest.raises(ConfigError):
        O.apply_section(A, np.ones(3))
