import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from routerlab.model import (
    ParameterError,
    RouterParams,
    RouterState,
    load_difference,
    log_cosh,
    potential,
    sech2,
    softmax_probs,
    vector_field,
    vector_field_derivatives,
)

pos = st.floats(0.05, 10.0)
score = st.floats(-50.0, 50.0)
skew = st.floats(-5.0, 5.0)


@pytest.mark.parametrize("field", ["a", "gamma", "temp"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_params_reject_nonpositive(field, bad):
    kw = dict(a=1.0, gamma=1.0, temp=1.0)
    kw[field] = bad
    with pytest.raises(ParameterError, match=field):
        RouterParams(**kw)


def test_bare_h_splits_symmetrically():
    p = RouterParams(3.0, 1.0, 1.0, h=0.4)
    assert (p.b1, p.b2) == (0.2, -0.2)


def test_bias_pair_sets_h():
    p = RouterParams(3.0, 1.0, 1.0, b1=0.5, b2=0.1)
    assert p.h == pytest.approx(0.4)


def test_inconsistent_h_and_biases():
    with pytest.raises(ParameterError):
        RouterParams(3.0, 1.0, 1.0, h=1.0, b1=0.5, b2=0.1)
    with pytest.raises(ParameterError):
        RouterParams(3.0, 1.0, 1.0, b1=0.5)


def test_with_h_keeps_the_rest():
    p = RouterParams(3.0, 0.5, 2.0, h=1.0).with_h(-0.25)
    assert (p.a, p.gamma, p.temp, p.h) == (3.0, 0.5, 2.0, -0.25)


def test_state_from_difference():
    s = RouterState.from_difference(1.5)
    assert s.y == 1.5 and s.r1 == -s.r2


@given(score, score, pos)
def test_softmax_is_a_distribution(r1, r2, temp):
    p1, p2 = softmax_probs(RouterState(r1, r2), temp)
    assert 0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0
    assert p1 + p2 == pytest.approx(1.0, abs=1e-15)


@given(score, score, pos, st.floats(-100, 100))
def test_softmax_shift_invariant(r1, r2, temp, c):
    p = softmax_probs(RouterState(r1, r2), temp)
    q = softmax_probs(RouterState(r1 + c, r2 + c), temp)
    assert p == pytest.approx(q, abs=1e-9)


def test_softmax_huge_scores_do_not_overflow():
    p1, p2 = softmax_probs(RouterState(1e6, -1e6), 0.01)
    assert (p1, p2) == (1.0, 0.0)


@given(score, score, pos)
def test_load_difference_is_p1_minus_p2(r1, r2, temp):
    p1, p2 = softmax_probs(RouterState(r1, r2), temp)
    assert load_difference(r1 - r2, temp) == pytest.approx(p1 - p2, abs=1e-12)


@given(st.floats(-20, 20), pos, pos, pos)
def test_field_is_odd_without_skew(y, a, gamma, temp):
    p = RouterParams(a, gamma, temp)
    assert vector_field(-y, p) == pytest.approx(-vector_field(y, p), abs=1e-12)


@given(st.floats(-10, 10), pos, pos, pos, skew)
def test_field_is_minus_potential_gradient(y, a, gamma, temp, h):
    p = RouterParams(a, gamma, temp, h=h)
    eps = 1e-5
    dV = (potential(y + eps, p) - potential(y - eps, p)) / (2 * eps)
    assert -dV == pytest.approx(vector_field(y, p), rel=1e-5, abs=1e-5)


@given(st.floats(-8, 8), pos, pos, st.floats(0.2, 5.0))
def test_derivatives_match_finite_differences(y, a, gamma, temp):
    p = RouterParams(a, gamma, temp)
    eps = 1e-4 * temp
    f_y, f_yy, f_yyy = vector_field_derivatives(y, p)

    def fy(v):
        return vector_field_derivatives(v, p)[0]

    def fyy(v):
        return vector_field_derivatives(v, p)[1]

    scale = 1.0 + abs(a) / temp**3
    assert (vector_field(y + eps, p) - vector_field(y - eps, p)) / (2 * eps) == pytest.approx(f_y, abs=1e-6 * scale)
    assert (fy(y + eps) - fy(y - eps)) / (2 * eps) == pytest.approx(f_yy, abs=1e-5 * scale)
    assert (fyy(y + eps) - fyy(y - eps)) / (2 * eps) == pytest.approx(f_yyy, abs=1e-4 * scale)


@given(st.floats(-30, 30))
def test_log_cosh_and_sech2_match_naive(x):
    assert log_cosh(x) == pytest.approx(math.log(math.cosh(x)), abs=1e-12)
    assert sech2(x) == pytest.approx(1.0 / math.cosh(x) ** 2, rel=1e-12, abs=1e-300)


def test_log_cosh_large_argument():
    assert log_cosh(1e4) == pytest.approx(1e4 - math.log(2.0))
    assert sech2(1e4) == 0.0


def test_vector_field_vectorizes():
    p = RouterParams(4.0, 1.0, 1.0)
    y = np.linspace(-3, 3, 7)
    assert vector_field(y, p).shape == (7,)
