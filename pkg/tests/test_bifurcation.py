import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from routerlab.bifurcation import (
    classify,
    critical_feedback,
    critical_temperature,
    cusp_asymptote,
    cusp_normal_form,
    find_equilibria,
    fold_curve,
    hysteresis_boundary,
    hysteresis_width,
    n_expert_contrast_eigenvalue,
    n_expert_field,
    n_expert_threshold,
    n_expert_uniform_state,
)
from routerlab.model import ParameterError, RouterParams, vector_field, vector_field_derivatives

pos = st.floats(0.1, 5.0)


def test_symmetric_bistable_roots_match_oracle():
    eqs = find_equilibria(RouterParams(4.0, 1.0, 1.0))
    y_star = float(oracles.nonzero_root(4, 1, 1))
    assert eqs.roots == pytest.approx([-y_star, 0.0, y_star], abs=1e-10)
    assert [e.stability for e in eqs] == ["stable", "unstable", "stable"]
    assert eqs.regime == "bistable"


def test_subcritical_has_only_the_balanced_state():
    eqs = find_equilibria(RouterParams(1.5, 1.0, 1.0))
    assert eqs.roots == [0.0]
    assert eqs.equilibria[0].stability == "stable"
    assert eqs.regime == "monostable"


def test_at_threshold_origin_is_nonhyperbolic():
    eqs = find_equilibria(RouterParams(2.0, 1.0, 1.0))
    assert len(eqs) == 1 and eqs.equilibria[0].stability == "nonhyperbolic"


def test_large_skew_leaves_one_root():
    eqs = find_equilibria(RouterParams(4.0, 1.0, 1.0, h=1.2))
    assert len(eqs) == 1 and eqs.equilibria[0].y > 0


@given(pos, pos, pos, st.floats(-3.0, 3.0))
def test_every_reported_root_is_a_root(a, gamma, temp, h):
    p = RouterParams(a, gamma, temp, h=h)
    eqs = find_equilibria(p)
    assert len(eqs) >= 1
    scale = a + gamma * (a + abs(h)) / gamma + abs(h)
    for e in eqs:
        assert abs(vector_field(e.y, p)) <= 1e-9 * scale
        assert e.stability == classify(float(vector_field_derivatives(e.y, p)[0]))


@given(pos, pos, pos, st.floats(-3.0, 3.0))
def test_stability_alternates(a, gamma, temp, h):
    eqs = find_equilibria(RouterParams(a, gamma, temp, h=h))
    kinds = [e.stability for e in eqs if e.stability != "nonhyperbolic"]
    assume(len(kinds) == len(eqs))
    assert kinds[0] == "stable" and kinds[-1] == "stable"
    for u, v in zip(kinds, kinds[1:]):
        assert u != v


@given(pos, pos, pos, st.floats(-3.0, 3.0))
def test_root_count_matches_fold_band(a, gamma, temp, h):
    H = hysteresis_boundary(a, gamma, temp)
    margin = 1e-6 * (1 + H)
    assume(abs(abs(h) - H) > margin and abs(a - 2 * gamma * temp) > 1e-6)
    n = len(find_equilibria(RouterParams(a, gamma, temp, h=h)))
    assert n == (3 if abs(h) < H else 1)


def test_hysteresis_boundary_matches_tangency_oracle():
    for a in (2.2, 3.0, 4.0, 6.0):
        _, H = oracles.tangency(a, 1.0, 1.0)
        assert hysteresis_boundary(a, 1.0, 1.0) == pytest.approx(H, rel=1e-12)


def test_known_values():
    assert hysteresis_boundary(4.0, 1.0, 1.0) == pytest.approx(1.0656799507, rel=1e-9)
    assert hysteresis_width(4.0, 1.0, 1.0) == pytest.approx(2.1313599014, rel=1e-9)
    assert hysteresis_boundary(2.0, 1.0, 1.0) == 0.0
    assert hysteresis_width(-3.0, 1.0, 1.0) == 0.0


def test_boundary_rejects_negative_a():
    with pytest.raises(ParameterError):
        hysteresis_boundary(-0.1, 1.0, 1.0)


@given(pos, pos, st.floats(0.0, 20.0), st.floats(1e-3, 5.0))
def test_boundary_is_increasing_in_a(gamma, temp, a, da):
    assert hysteresis_boundary(a + da, gamma, temp) >= hysteresis_boundary(a, gamma, temp)


@given(st.floats(-3.0, 3.0), pos, pos)
def test_fold_points_are_tangencies(q, gamma, temp):
    assume(abs(q) > 1e-3)
    pt = fold_curve([q], gamma, temp)[0]
    p = RouterParams(pt.a, gamma, temp, h=pt.h)
    y = 2 * temp * q
    scale = pt.a + gamma * abs(y) + abs(pt.h)
    assert abs(vector_field(y, p)) <= 1e-12 * scale
    assert abs(vector_field_derivatives(y, p)[0]) <= 1e-12 * (pt.a / temp + gamma)


@given(st.floats(0.01, 3.0), pos, pos)
def test_fold_curve_meets_boundary(q, gamma, temp):
    pt = fold_curve([q], gamma, temp)[0]
    assert -pt.h == pytest.approx(hysteresis_boundary(pt.a, gamma, temp), rel=1e-9, abs=1e-12)


def test_cusp_coefficients():
    p = RouterParams(2.0 * 1.3 * 0.7, 1.3, 0.7, h=0.01)
    nf = cusp_normal_form(p)
    assert nf.mu == pytest.approx(0.0, abs=1e-15)
    assert nf.eps == 0.01
    # cubic coefficient is F_yyy(0) / 6 on the pitchfork line
    assert nf.cubic_coeff == pytest.approx(vector_field_derivatives(0.0, p)[2] / 6, rel=1e-12)


@given(pos, pos)
def test_cusp_asymptote_is_leading_order(gamma, temp):
    mu = 1e-5
    a = 2 * temp * (gamma + mu)
    assert hysteresis_boundary(a, gamma, temp) / cusp_asymptote(mu, gamma, temp) == pytest.approx(1.0, abs=1e-3)


def test_thresholds():
    assert critical_feedback(0.5, 3.0) == 3.0
    assert critical_temperature(3.0, 2.0) == 0.75
    with pytest.raises(ParameterError):
        critical_temperature(3.0, 0.0)


@given(st.integers(2, 6), pos, pos, pos)
def test_n_expert_jacobian_spectrum(n, a, gamma, temp):
    r0 = n_expert_uniform_state(n, a, gamma)
    assert np.allclose(n_expert_field(r0, a, gamma, temp), 0.0, atol=1e-12)
    J = oracles.numeric_jacobian(lambda r: n_expert_field(r, a, gamma, temp), r0)
    ev = np.sort(np.linalg.eigvals(J).real)
    lam = n_expert_contrast_eigenvalue(n, a, gamma, temp)
    expected = np.sort([-gamma] + [lam] * (n - 1))
    assert ev == pytest.approx(expected, abs=1e-6 * (1 + a / temp))


def test_n_expert_threshold_agrees_with_two_experts():
    assert n_expert_threshold(2, 1.0, 1.0) == critical_feedback(1.0, 1.0)
    assert n_expert_contrast_eigenvalue(3, 3.0, 1.0, 1.0) == pytest.approx(0.0)
    with pytest.raises(ParameterError):
        n_expert_threshold(1, 1.0, 1.0)


def test_n_expert_field_with_bias():
    r = np.zeros(3)
    out = n_expert_field(r, 3.0, 1.0, 1.0, b=[0.1, 0.0, -0.1])
    assert out == pytest.approx([1.1, 1.0, 0.9])


def test_near_fold_roots_not_missed():
    # just inside the band both fold-side roots must be present
    H = hysteresis_boundary(4.0, 1.0, 1.0)
    eqs = find_equilibria(RouterParams(4.0, 1.0, 1.0, h=H * (1 - 1e-9)))
    assert len(eqs) == 3
    assert math.isfinite(eqs.roots[0])
