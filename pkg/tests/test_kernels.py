import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoconv.kernels import (
    KssKernel,
    Params,
    build_selberg,
    integrate_against_kss,
    kss_coeff,
    kss_coeff_table,
    kss_l2sq,
    kss_moments,
    kss_value,
    selberg_c,
    selberg_coeff,
    selberg_eval,
    selberg_lipschitz,
    selberg_min,
)
from autoconv.specfun import QuadratureSpec, quad_singular
from autoconv.stepfn import PiecewiseLinear

P = Params(0.13, 22)


def _quad_kss(fn, a, b):
    # split at 0 where K_ss has its log singularity
    spec = QuadratureSpec(abs_tol=1e-12)
    total = 0.0
    for lo, hi in ((a, min(b, 0.0)), (max(a, 0.0), b)):
        if lo < hi:
            total += quad_singular(lambda x: fn(x) * kss_value(P, x), lo, hi, spec, vectorized=True)
    return total


def test_params_validation():
    assert P.u == pytest.approx(0.63)
    assert list(P.spec[:2]) == [-21, -20] and list(P.spec[-2:]) == [20, 21]
    with pytest.raises(ValueError):
        Params(0.25, 22)
    with pytest.raises(ValueError):
        Params(0.13, 22, u=0.7)
    with pytest.raises(ValueError):
        Params(0.13, 3)  # 2un - 2u - n < 0
    assert Params(0.13, None).n is None


def test_kss_is_pdf_on_delta_interval():
    assert _quad_kss(lambda x: 1.0, -P.delta, P.delta) == pytest.approx(1.0, abs=1e-10)
    assert kss_value(P, 0.2) == 0.0
    assert kss_value(P, 0.0) == math.inf


@pytest.mark.parametrize("j", [1, 2, 5, 13])
def test_kss_coeff_matches_direct_transform(j):
    direct = _quad_kss(lambda x: np.cos(2 * math.pi * j * x / P.u), -P.delta, P.delta) / P.u
    assert kss_coeff(P, j) == pytest.approx(direct, abs=1e-10)


def test_kss_coeff_positive_on_spec():
    assert np.all(kss_coeff(P, np.arange(1, P.n)) > 0)


def test_kss_coeff_table_tail_is_valid():
    J = 400
    t = kss_coeff_table(P, J)
    far = np.arange(J + 1, 200 * J)
    assert 2 * float(np.sum(kss_coeff(P, far) ** 2)) <= t.tail_bound


def test_kss_l2sq_two_routes():
    norm = kss_l2sq(P)
    assert norm.disagreement < 1e-6
    assert 0.574 < norm.value * P.delta < 0.5747
    assert norm.value * P.delta == pytest.approx(0.57469486204223, abs=1e-12)


def test_kss_l2sq_scales_as_inverse_delta():
    a = kss_l2sq(Params(0.1, None)).value
    b = kss_l2sq(Params(0.2, None)).value
    assert a * 0.1 == pytest.approx(b * 0.2, rel=1e-12)


@pytest.mark.parametrize("x", [-0.12, -0.05, 1e-4, 0.07, 0.13, 0.3])
def test_kss_moments_against_quadrature(x):
    m0, m1 = kss_moments(P, np.array([x]))
    b = min(abs(x), P.delta)
    ref0 = math.copysign(_quad_kss(lambda t: 1.0, 0.0, b), x)
    ref1 = _quad_kss(lambda t: t, 0.0, b)
    assert m0[0] == pytest.approx(ref0, abs=1e-12)
    assert m1[0] == pytest.approx(ref1, abs=1e-12)


def test_integrate_against_kss_matches_quadrature():
    g = PiecewiseLinear([-0.2, -0.01, 0.05, 0.3], [0.0, 1.5, 0.7, 0.0])
    assert integrate_against_kss(P, g) == pytest.approx(_quad_kss(g, -P.delta, P.delta), abs=1e-11)


def test_kernel_build():
    k = KssKernel.build(P, J=64)
    assert k.coeff_table.truncation_J == 64
    assert k.l2sq_err < 1e-9


def test_selberg_c_fold_agrees_with_direct_formula():
    u, n = 0.63, 22
    for k in range(1, n):
        direct = (1 - k / n) * (math.sin(math.pi * k / (2 * u)) / math.tan(math.pi * k / n)
                                + math.cos(math.pi * k / (2 * u))) + math.sin(math.pi * k / (2 * u)) / math.pi
        assert selberg_c(u, n, k) == pytest.approx(direct, abs=1e-13)
    with pytest.raises(ValueError):
        selberg_c(u, n, 0)
    with pytest.raises(ValueError):
        selberg_c(u, n, n)


def test_selberg_coefficients_reconstruct_function():
    u, n = P.u, P.n
    j = np.arange(-(n - 1), n)
    gt = np.array([selberg_coeff(u, n, int(k)) for k in j])
    x = np.linspace(-0.3, 0.3, 17)
    series = (gt[None, :] * np.exp(2j * math.pi * np.outer(x, j) / u)).sum(axis=1)
    np.testing.assert_allclose(series.real, selberg_eval(u, n, x), atol=1e-12)
    assert selberg_coeff(u, n, 0) == 0.0 and selberg_coeff(u, n, n) == 0.0


def test_selberg_parseval_identity():
    u, n = P.u, P.n
    # trapezoid rule on a full period is exact for trigonometric polynomials of this degree
    m = 4 * n
    x = np.arange(m) * u / m
    mean_sq = float(np.mean(selberg_eval(u, n, x) ** 2))
    coeff_sq = sum(selberg_coeff(u, n, j) ** 2 for j in range(-(n - 1), n))
    assert mean_sq == pytest.approx(coeff_sq, rel=1e-12)


def test_selberg_min_reference_point():
    m = selberg_min(0.63, 22)
    assert 1.006 <= m <= 1.012
    assert selberg_min(0.63, 22, M=10**4) < m


def test_selberg_lipschitz_dominates_derivative():
    u, n = 0.63, 22
    x = np.linspace(0, 0.25, 20001)
    slopes = np.abs(np.diff(selberg_eval(u, n, x))) / (x[1] - x[0])
    assert slopes.max() <= selberg_lipschitz(u, n)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-0.25, max_value=0.25))
def test_selberg_majorizes_on_quarter(x):
    sel = build_selberg(P, 10**5)
    assert sel(x) >= sel.min_on_quarter
    assert sel(x) >= 1.0


def test_build_selberg_fields():
    sel = build_selberg(P, 10**5)
    assert sel.min_on_quarter == pytest.approx(sel.grid_min - sel.min_gap)
    np.testing.assert_allclose(sel.coeff(np.array([3, -3, 0, 25])),
                               [selberg_coeff(P.u, P.n, 3)] * 2 + [0.0, 0.0])
