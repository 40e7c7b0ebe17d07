"""Smoke tests of the python bindings against exact degenerate cases."""

import math

import pytest

import apfront


def test_ap_function_eval_and_mean():
    f = apfront.APFunction(2.0, [(1.0, 1.0, 0.0), (math.sqrt(2.0), 1.0, 0.0)])
    assert f(0.0) == pytest.approx(4.0)
    assert f.mean == 2.0
    assert f.torus_dim == 2
    lo, hi = apfront.function_bounds(f, 1e-6)
    assert lo == pytest.approx(0.0, abs=1e-4)
    assert hi == pytest.approx(4.0, abs=1e-4)


def test_harmonic_mean_two_plus_cos():
    a = apfront.APFunction(2.0, [(1.0, 1.0, 0.0)])
    assert apfront.harmonic_mean(a, 1e-10) == pytest.approx(math.sqrt(3.0), rel=1e-8)


def test_constant_lambda_and_speed():
    cs = apfront.coefficients(
        apfront.APFunction(1.0), apfront.APFunction(1.0), apfront.APFunction(1.0),
        apfront.APFunction(0.0))
    for p in (-1.0, 0.0, 2.0):
        lam, bar = apfront.lambda_finite(cs, 1.0, p)
        assert lam == pytest.approx(p * p - p + 1.0, abs=1e-8)
    right = apfront.speed(cs, 1.0, e=1)
    left = apfront.speed(cs, 1.0, e=-1)
    assert right["omega"] == pytest.approx(1.0, abs=1e-3)
    assert left["omega"] == pytest.approx(3.0, abs=1e-3)


def test_validation_rejects_strong_drift():
    with pytest.raises(apfront.CoefficientError):
        apfront.coefficients(
            apfront.APFunction(1.0), apfront.APFunction(3.0), apfront.APFunction(1.0),
            apfront.APFunction(0.0))


def test_json_coefficients_and_limits():
    cs = apfront.coefficients_from_json(
        '{"a": {"constant": "2", "terms": [{"frequency": "1", "cos_amp": "1"}]},'
        ' "b": "0", "c": "1", "c_tilde": "0"}')
    lam, _ = apfront.lambda_zero(cs, 1.0)
    assert lam == pytest.approx(math.sqrt(3.0) + 1.0, rel=1e-5)
    sz = apfront.speed_zero(cs)
    assert sz["omega"] == pytest.approx(2.0 * 3.0 ** 0.25, rel=1e-4)


def test_rho_monotone():
    f = apfront.APFunction(0.0, [(1.0, 1.0, 0.0), (math.sqrt(2.0), 1.0, 0.0)])
    values = [apfront.rho(f, R) for R in (1.0, 5.0, 20.0)]
    assert values[0] >= values[1] >= values[2]
