from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from fracsym.errors import DomainError
from fracsym.fracderiv import (
    FracOrder,
    TimeGrid,
    frac_binomial,
    gl_weights,
    rl_derivative_grid,
    rl_derivative_power,
)


def test_frac_order_bracket():
    assert FracOrder(0.5).n == 1
    assert FracOrder(1.0).n == 1
    assert FracOrder(2.5).n == 3
    assert FracOrder(2.0, 2).is_integer
    with pytest.raises(DomainError, match="n = 3"):
        FracOrder(2.5, 2)
    with pytest.raises(DomainError):
        FracOrder(0.0)


@pytest.mark.parametrize(
    "alpha, k, want",
    [(0.7, 0, 1.0), (0.7, 1, 0.7), (2.0, 3, 0.0), (0.5, 2, -0.125)],
)
def test_frac_binomial_examples(alpha, k, want):
    assert frac_binomial(alpha, k) == pytest.approx(want, abs=1e-15)


@given(st.floats(0.05, 3.95).filter(lambda a: abs(a - round(a)) > 1e-3), st.integers(32, 200))
def test_frac_binomial_gamma_form_matches_product(alpha, k):
    prod = 1.0
    for i in range(k):
        prod *= (alpha - i) / (i + 1)
    assert frac_binomial(alpha, k) == pytest.approx(prod, rel=1e-10)


@pytest.mark.parametrize(
    "p, alpha, t, want",
    [(2.0, 1.0, 3.0, 6.0), (0.0, 0.5, 1.0, 0.5641895835477563), (-0.5, 0.5, 1.0, 0.0)],
)
def test_rl_power_examples(p, alpha, t, want):
    assert rl_derivative_power(p, FracOrder(alpha), t) == pytest.approx(want, rel=1e-14, abs=0)


def test_rl_power_rejects_nonintegrable():
    with pytest.raises(DomainError):
        rl_derivative_power(-1.0, FracOrder(0.5), 1.0)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.7, 2.0, 2.5])
def test_rl_power_kernel_is_exact_zero(alpha):
    order = FracOrder(alpha)
    for k in range(1, order.n + 1):
        if alpha - k > -1:
            assert rl_derivative_power(alpha - k, order, 1.7) == 0.0


@given(st.floats(-0.9, 3.0), st.floats(0.1, 2.9), st.floats(0.1, 5.0))
def test_rl_power_matches_oracle(p, alpha, t):
    got = rl_derivative_power(p, FracOrder(alpha), t)
    want = oracles.rl_power(p, alpha, t)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize(
    "alpha, count, want",
    [(1.0, 3, [1, -1, 0]), (0.5, 3, [1, -0.5, -0.125]), (2.0, 4, [1, -2, 1, 0])],
)
def test_gl_weights_examples(alpha, count, want):
    np.testing.assert_allclose(gl_weights(FracOrder(alpha), count), want, atol=1e-15)


@given(st.floats(0.05, 3.0), st.integers(0, 40))
def test_gl_weights_are_signed_binomials(alpha, k):
    w = gl_weights(FracOrder(alpha), k + 1)
    assert w[k] == pytest.approx((-1) ** k * frac_binomial(alpha, k), rel=1e-10, abs=1e-300)


def test_gl_weights_partial_sums_vanish():
    total = gl_weights(FracOrder(0.5), 10_001).sum()
    assert abs(total) < 0.1


def test_time_grid():
    g = TimeGrid(1e-3, 1001)
    assert g.t0 == 0.0
    assert g.t_max == pytest.approx(1.0)
    r = g.refined()
    assert r.dt == 5e-4 and r.count == 2001 and r.t_max == pytest.approx(g.t_max)
    back = TimeGrid.from_nodes(g.nodes)
    assert back.count == 1001 and back.dt == pytest.approx(1e-3, rel=1e-12)
    with pytest.raises(DomainError):
        TimeGrid.from_nodes([0.0, 0.1, 0.3])


def _grid(dt):
    g = TimeGrid(dt, int(round(1 / dt)) + 1)
    return g, g.nodes


@pytest.mark.parametrize(
    "alpha, f, want, tol",
    [
        (1.0, lambda t: t, 1.0, 2e-3),
        (0.5, lambda t: t**2, math.gamma(3) / math.gamma(2.5), 5e-3),
        (0.5, lambda t: np.ones_like(t), 1 / math.gamma(0.5), 5e-3),
    ],
)
def test_rl_grid_examples(alpha, f, want, tol):
    g, t = _grid(1e-3)
    d = rl_derivative_grid(f(t), FracOrder(alpha), g)
    assert abs(d[-1] - want) <= tol


@given(st.floats(0.1, 2.9), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_rl_grid_is_linear(alpha, a, b, seed):
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal((2, 200))
    order = FracOrder(alpha)
    lhs = rl_derivative_grid(a * u + b * v, order, 0.01)
    rhs = a * rl_derivative_grid(u, order, 0.01) + b * rl_derivative_grid(v, order, 0.01)
    scale = np.max(np.abs(rl_derivative_grid(np.abs(u) + np.abs(v), order, 0.01))) + 1.0
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale * (abs(a) + abs(b) + 1)


def test_rl_grid_accepts_node_array_and_rejects_bad_input():
    g, t = _grid(0.01)
    a = rl_derivative_grid(t**2, FracOrder(0.5), g)
    b = rl_derivative_grid(t**2, FracOrder(0.5), t)
    np.testing.assert_array_equal(a, b)
    with pytest.raises(DomainError):
        rl_derivative_grid([], FracOrder(0.5), 0.1)
    with pytest.raises(DomainError):
        rl_derivative_grid(t**2, FracOrder(0.5), t**2)
    with pytest.raises(DomainError):
        rl_derivative_grid([0.0, math.nan], FracOrder(0.5), 0.1)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.5, 2.5])
@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 2.0, "alpha"])
def test_rl_grid_converges_to_power_rule(alpha, p):
    p = alpha if p == "alpha" else p
    order = FracOrder(alpha)
    want = rl_derivative_power(p, order, 1.0)
    errs, hs = [], []
    for dt in (4e-3, 2e-3, 1e-3, 5e-4):
        g, t = _grid(dt)
        errs.append(abs(rl_derivative_grid(t**p, order, g)[-1] - want))
        hs.append(dt)
    if max(errs) <= 1e-6 * abs(want):
        # p = alpha > 1: the first-order term carries D^(alpha+1) t^alpha = 0, leaving roundoff
        return
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 0.8


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_starting_weights_make_singular_powers_exact(alpha):
    order = FracOrder(alpha)
    g, t = _grid(0.01)
    sig = [alpha - 1, alpha - 1 + alpha]
    u = t[1:] ** sig[0] + 2 * t[1:] ** sig[1]
    samples = np.concatenate([[np.nan], u])
    d = rl_derivative_grid(samples, order, g, correction_exponents=sig)
    want = np.array([rl_derivative_power(sig[0], order, x) + 2 * rl_derivative_power(sig[1], order, x) for x in t[1:]])
    assert np.isnan(d[0])
    np.testing.assert_allclose(d[1:], want, rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_integer_order_reduces_to_finite_differences(alpha):
    g, t = _grid(1e-3)
    u = np.sin(t)
    d = rl_derivative_grid(u, FracOrder(alpha), g)
    h = g.dt
    if alpha == 1.0:
        fd = (u[1:] - u[:-1]) / h
        np.testing.assert_allclose(d[1:], fd, rtol=1e-12, atol=1e-12)
    else:
        fd = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
        np.testing.assert_allclose(d[2:], fd, rtol=1e-9, atol=1e-9)
