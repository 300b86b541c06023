import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoconv.specfun import quad_singular
from autoconv.stepfn import (
    CoeffTable,
    PiecewiseLinear,
    StepFunction,
    autoconvolve,
    autocorrelate,
    convolve,
    fourier_hat,
    fourier_tilde,
    fourier_transform,
    hat_parseval,
    hfold_grid,
    inner_product,
    random_pdf,
    sup_norm,
    tilde_table,
    verify_parseval_u,
)

UNIFORM = StepFunction([-0.25, 0.25], [2.0])

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _reflect_shift(f: StepFunction, x: float) -> StepFunction:
    """y -> f(x - y) as a step function."""
    return StepFunction(x - f.breakpoints[::-1], f.values[::-1])


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        StepFunction([0.0, 0.0], [1.0])
    with pytest.raises(ValueError):
        StepFunction([0.0, 1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        StepFunction([0.0, math.nan], [1.0])
    with pytest.raises(ValueError):
        PiecewiseLinear([0.0, 1.0], [1.0])


def test_arrays_are_read_only():
    f = StepFunction([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        f.values[0] = 3.0


def test_from_intervals_fills_gaps():
    f = StepFunction.from_intervals([(0.5, 0.75), (0.0, 0.25)])
    assert list(f.breakpoints) == [0.0, 0.25, 0.5, 0.75]
    assert list(f.values) == [1.0, 0.0, 1.0]
    with pytest.raises(ValueError):
        StepFunction.from_intervals([(0.0, 0.5), (0.25, 0.75)])


def test_basic_quantities():
    f = StepFunction([-0.25, 0.0, 0.25], [1.0, 3.0])
    assert f.integral() == 1.0
    assert f.l2sq() == pytest.approx(2.5)
    assert f.total_variation() == 6.0
    assert f.halfwidth == 0.25
    assert f(0.1) == 3.0 and f(0.25) == 0.0 and f(-0.25) == 1.0
    assert UNIFORM.is_pdf()


def test_uniform_autoconvolution_is_tent():
    g = autoconvolve(UNIFORM)
    assert list(g.breakpoints) == [-0.5, 0.0, 0.5]
    assert list(g.node_values) == [0.0, 2.0, 0.0]
    assert sup_norm(g) == 2.0
    assert g.l2sq() == pytest.approx(4 / 3)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_autoconvolve_mass_and_pointwise_oracle(seed):
    rng = np.random.default_rng(seed)
    f = random_pdf(rng)
    g = autoconvolve(f)
    assert g.integral() == pytest.approx(f.integral() ** 2, abs=1e-10)
    assert g.node_values[0] == 0.0 and abs(g.node_values[-1]) < 1e-9
    for x in rng.uniform(-0.5, 0.5, 5):
        assert g(x) == pytest.approx(inner_product(f, _reflect_shift(f, x)), abs=1e-9)


def test_autoconvolve_matches_quadrature():
    f = random_pdf(np.random.default_rng(11))
    g = autoconvolve(f)
    for x in np.linspace(-0.45, 0.45, 7):
        ref = sum(quad_singular(lambda y: f(y) * f(x - y), a, b, vectorized=True)
                  for a, b in _pieces(f, x))
        assert g(x) == pytest.approx(ref, abs=1e-10)


def _pieces(f, x):
    # integrate piecewise so the integrand is smooth on each panel
    pts = np.union1d(f.breakpoints, x - f.breakpoints)
    pts = pts[(pts >= f.breakpoints[0]) & (pts <= f.breakpoints[-1])]
    return list(zip(pts[:-1], pts[1:]))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_convolution_commutes(seed):
    rng = np.random.default_rng(seed)
    f, g = random_pdf(rng), random_pdf(rng)
    a, b = convolve(f, g), convolve(g, f)
    np.testing.assert_array_equal(a.breakpoints, b.breakpoints)
    np.testing.assert_allclose(a.node_values, b.node_values, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_autocorrelation_even_with_peak_l2(seed):
    f = random_pdf(np.random.default_rng(seed))
    c = autocorrelate(f)
    np.testing.assert_allclose(c.breakpoints, -c.breakpoints[::-1], atol=1e-15)
    assert c(0.0) == pytest.approx(f.l2sq(), rel=1e-12)
    assert c.sup() == pytest.approx(f.l2sq(), rel=1e-12)
    assert c.integral() == pytest.approx(1.0, abs=1e-10)


def test_piecewise_linear_norms():
    g = PiecewiseLinear([0.0, 1.0, 3.0], [0.0, 2.0, -1.0])
    ref = quad_singular(lambda x: g(x) ** 2, 0.0, 3.0, vectorized=True)
    assert g.l2sq() == pytest.approx(ref, abs=1e-10)
    assert g.integral() == pytest.approx(2.0)
    lo, hi, c0, c1 = g.segments()
    np.testing.assert_allclose(c0 + c1 * hi, [2.0, -1.0])


def test_fourier_transform_closed_form():
    assert fourier_transform(UNIFORM, 0.0) == 1.0
    xi = 1.3
    expected = math.sin(math.pi * xi / 2) / (math.pi * xi / 2)
    assert fourier_transform(UNIFORM, xi) == pytest.approx(expected, abs=1e-15)


def test_fourier_transform_against_quadrature():
    f = random_pdf(np.random.default_rng(3))
    for xi in (0.7, 3.0, 11.5):
        re = sum(quad_singular(lambda x: f(x) * np.cos(2 * math.pi * xi * x), a, b, vectorized=True)
                 for a, b in zip(f.breakpoints[:-1], f.breakpoints[1:]))
        im = sum(quad_singular(lambda x: -f(x) * np.sin(2 * math.pi * xi * x), a, b, vectorized=True)
                 for a, b in zip(f.breakpoints[:-1], f.breakpoints[1:]))
        assert fourier_transform(f, xi) == pytest.approx(complex(re, im), abs=1e-11)


@settings(max_examples=50, deadline=None)
@given(seeds, st.floats(min_value=0.05, max_value=500.0))
def test_fourier_decay_bound(seed, xi):
    f = random_pdf(np.random.default_rng(seed))
    assert abs(fourier_transform(f, xi)) <= f.total_variation() / (2 * math.pi * xi) * (1 + 1e-12)


def test_tilde_requires_u_in_range():
    with pytest.raises(ValueError):
        fourier_tilde(UNIFORM, 1, 0.5)
    assert fourier_tilde(UNIFORM, 0, 0.63) == pytest.approx(1 / 0.63)
    assert fourier_hat(UNIFORM, 2) == pytest.approx(0.0, abs=1e-16)


def test_coeff_table_lookup():
    t = tilde_table(UNIFORM, 0.63, 8)
    assert t[0] == pytest.approx(1 / 0.63)
    np.testing.assert_allclose(t[np.array([-3, 3])], [t[3], t[3]])
    assert len(t.indices) == 17
    with pytest.raises(KeyError):
        t[9]
    with pytest.raises(ValueError):
        CoeffTable(0.63, np.zeros(3), 2, 0.0)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_parseval_u_within_tail(seed):
    rng = np.random.default_rng(seed)
    f, g = random_pdf(rng), random_pdf(rng)
    rep = verify_parseval_u(f, g, 0.63, 2000)
    assert rep.gap <= rep.tail_bound
    assert abs(rep.partial_sum.imag) < 1e-9


def test_parseval_u_rejects_wide_supports():
    wide = StepFunction([-0.4, 0.4], [1.25])
    with pytest.raises(ValueError):
        verify_parseval_u(wide, wide, 0.63, 10)


def test_hat_parseval_monotone_and_within_tail():
    f = random_pdf(np.random.default_rng(5))
    rep = hat_parseval(f, 5000)
    assert rep.monotone
    assert 0 <= rep.final_gap <= rep.tail_bound
    assert rep.partial_sums[0] == pytest.approx(1.0)


def test_hat_parseval_gap_decays_like_inverse_j():
    rep = hat_parseval(UNIFORM, 5000)
    # the uniform pdf has jumps, so the gap is of order 1/J and not smaller
    assert 4 / (math.pi**2 * 5001) < rep.final_gap < 4 / (math.pi**2 * 4999)


@pytest.mark.parametrize("seed", range(4))
def test_hfold_error_bound(seed):
    f = random_pdf(np.random.default_rng(seed))
    res = 2**10
    x, v = hfold_grid(f, 2, res)
    dx = (f.support[1] - f.support[0]) / res
    exact = autoconvolve(f)(x)
    assert np.max(np.abs(v - exact)) <= 2 * f.max_abs() * f.total_variation() * dx


def test_hfold_higher_order_keeps_mass():
    x, v = hfold_grid(UNIFORM, 4, 2**10)
    dx = x[1] - x[0]
    assert float(np.sum(v) * dx) == pytest.approx(1.0, abs=1e-9)
    assert x[0] > -1.0 and x[-1] < 1.0
    with pytest.raises(ValueError):
        hfold_grid(UNIFORM, 3, 2**10)
    with pytest.raises(ValueError):
        hfold_grid(UNIFORM, 2, 100)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_random_pdf_properties(seed):
    f = random_pdf(np.random.default_rng(seed))
    assert f.is_pdf(1e-12)
    assert f.halfwidth <= 0.25
    assert 2 <= len(f.values) <= 12
    assert np.all(f.breakpoints * 1024 == np.round(f.breakpoints * 1024))
    g = random_pdf(np.random.default_rng(seed))
    np.testing.assert_array_equal(f.values, g.values)
