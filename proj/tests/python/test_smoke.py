import math
import os

import numpy as np
import pytest

import selinf


def orthonormal(n, p, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, p))
    A -= A.mean(axis=0)
    Q, _ = np.linalg.qr(A)
    return Q


def test_version():
    assert selinf.__version__ == "0.1.0"


def test_standardize():
    X, y, y_mean = selinf.standardize(np.array([[1.0], [2.0], [3.0]]), np.zeros(3), True)
    assert np.allclose(X[:, 0], np.array([-1.0, 0.0, 1.0]) / math.sqrt(2.0))
    assert y_mean == 0.0


def test_soft_threshold():
    X = orthonormal(8, 3, 1)
    y = X @ np.array([3.0, -1.0, 0.5])
    fit = selinf.lasso_fit(X, y, 1.0)
    assert np.allclose(fit["beta"], [2.0, 0.0, 0.0], atol=1e-10)
    assert fit["active"] == [0]


def test_lars_and_spacing():
    X = orthonormal(10, 4, 2)
    y = X @ np.array([3.0, -2.0, 0.5, 0.25])
    path = selinf.lars_path(X, y, 3)
    assert np.allclose(path["knots"], [3.0, 2.0, 0.5])
    assert path["order"] == [0, 1, 2]
    stat, p = selinf.spacing_test(X, y, 1, 1.0, "simplified")
    expect = math.erfc(3.0 / math.sqrt(2.0)) / math.erfc(2.0 / math.sqrt(2.0))
    assert stat == pytest.approx(expect, rel=1e-10)
    assert p == pytest.approx(2.0 * expect, rel=1e-10)
    t, _ = selinf.significance_test(X, y, 1, 1.0)
    assert t == pytest.approx(3.0)


def test_fs_and_lasso_inference():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 5))
    X -= X.mean(axis=0)
    X /= np.linalg.norm(X, axis=0)
    y = 3.0 * X[:, 1] + rng.standard_normal(30)
    y -= y.mean()
    assert selinf.fs_path(X, y, 2)["order"][0] == 1
    lam = 0.5 * np.abs(X.T @ y).max()
    reports = selinf.lasso_inference(X, y, lam, 1.0)
    assert reports
    for r in reports:
        assert 0.0 < r["p_value"] <= 1.0
        lo, hi = r["ci"]
        assert lo <= hi


def test_truncated_gaussian():
    assert selinf.tn_cdf(1.0, 0.0, 1.0, [(0.0, math.inf)]) == pytest.approx(0.6826894921370859, rel=1e-12)
    p = selinf.selective_pvalue(np.array([1.96]), np.array([1.0]), 1.0, [(-math.inf, math.inf)])
    assert p == pytest.approx(0.05, rel=1e-3)
    lo, hi = selinf.selective_ci(np.array([1.96]), np.array([1.0]), 1.0, [(-math.inf, math.inf)])
    z = 1.959963984540054
    assert lo == pytest.approx(1.96 - z, abs=1e-9)
    assert hi == pytest.approx(1.96 + z, rel=1e-10)


def test_errors_are_raised():
    with pytest.raises(selinf.SelinfError, match="ZeroVarianceColumn"):
        selinf.standardize(np.full((3, 1), 5.0), np.arange(3.0), True)


@pytest.mark.skipif("SELINF_FIXTURE" not in os.environ, reason="fixture path not provided")
def test_fixture_path():
    data = np.genfromtxt(os.environ["SELINF_FIXTURE"], delimiter=",", names=True)
    y = data["crime"]
    X = np.column_stack([data[n] for n in data.dtype.names if n != "crime"])
    Xs, ys, _ = selinf.standardize(X, y, True)
    path = selinf.lars_path(Xs, ys, 3)
    assert all(a >= b for a, b in zip(path["knots"], path["knots"][1:]))
