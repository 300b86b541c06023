"""Special functions and singularity-aware quadrature.

Only the pieces the kernel formulas need are here: the Bessel function J0,
complete elliptic integrals via the arithmetic-geometric mean, the
autocorrelation of the arcsine density, and an adaptive Gauss-Legendre
integrator that removes inverse-square-root endpoint singularities with a
``sin^2`` change of variables.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "agm",
    "arcsine_density",
    "bessel_j0",
    "ellipe",
    "ellipk",
    "quad_singular",
    "ss_autocorr",
]

PI = math.pi

# Large-argument J0: Hankel-type rational approximations (Cephes j0.c, x > 5).
_PP = np.array([
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
])
_PQ = np.array([
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
])
_QP = np.array([
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
])
# monic: leading coefficient 1 is implicit
_QQ = np.array([
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
])

_SERIES_CUTOFF = 8.0
_SERIES_TERMS = 45


def _polevl(x, coef):
    ans = np.full_like(x, coef[0])
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x, coef):
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _j0_series(x: np.ndarray) -> np.ndarray:
    t = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _SERIES_TERMS):
        term = term * t / (k * k)
        total = total + term
    return total


def _j0_asymptotic(x: np.ndarray) -> np.ndarray:
    w = 5.0 / x
    q = 25.0 / (x * x)
    p = _polevl(q, _PP) / _polevl(q, _PQ)
    qq = _polevl(q, _QP) / _p1evl(q, _QQ)
    # cos(x - pi/4), sin(x - pi/4) without rounding pi/4 into a large argument
    c, s = np.cos(x), np.sin(x)
    cos_xn = (c + s) / math.sqrt(2.0)
    sin_xn = (s - c) / math.sqrt(2.0)
    return math.sqrt(2.0 / PI) * (p * cos_xn - w * qq * sin_xn) / np.sqrt(x)


def bessel_j0(x):
    """Bessel function of the first kind of order zero.

    Power series for ``|x| <= 8``, rational Hankel approximation beyond.
    Accepts a float or an array; returns the same kind.
    """
    arr = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(arr)
    small = arr <= _SERIES_CUTOFF
    if np.any(small):
        out[small] = _j0_series(arr[small])
    if np.any(~small):
        out[~small] = _j0_asymptotic(arr[~small])
    if out.ndim == 0:
        return float(out)
    return out


def agm(a, b, max_iter: int = 60):
    """Arithmetic-geometric mean of nonnegative ``a`` and ``b`` (elementwise)."""
    a = np.asarray(a, dtype=float) + 0.0
    b = np.asarray(b, dtype=float) + 0.0
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("agm requires nonnegative arguments")
    for _ in range(max_iter):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= 4e-16 * a):
            break
    out = 0.5 * (a + b)
    if out.ndim == 0:
        return float(out)
    return out


def ellipk(m):
    """Complete elliptic integral of the first kind, parameter convention ``K(m)``, m < 1."""
    m = np.asarray(m, dtype=float)
    if np.any(m >= 1):
        raise ValueError("ellipk requires m < 1")
    out = PI / (2.0 * np.asarray(agm(1.0, np.sqrt(1.0 - m))))
    if out.ndim == 0:
        return float(out)
    return out


def ellipe(m, max_iter: int = 60):
    """Complete elliptic integral of the second kind ``E(m)``, m <= 1, via AGM."""
    m = float(m)
    if m > 1:
        raise ValueError("ellipe requires m <= 1")
    if m == 1:
        return 1.0
    a, b = 1.0, math.sqrt(1.0 - m)
    acc = 0.5 * m  # 2^{-1} c_0^2 with c_0^2 = m
    power = 0.5
    for _ in range(max_iter):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        acc += power * c * c
        if abs(c) <= 1e-17 * a:
            break
    return PI / (2.0 * a) * (1.0 - acc)


def arcsine_density(x):
    """``(2/pi) / sqrt(1 - 4x^2)`` on (-1/2, 1/2), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 0.5
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = (2.0 / PI) / np.sqrt((1.0 - 2.0 * xi) * (1.0 + 2.0 * xi))
    if out.ndim == 0:
        return float(out)
    return out


def ss_autocorr(x):
    """Autocorrelation of the arcsine density.

    For ``0 < |x| < 1`` this is ``2 / (pi^2 |x|) * K(1 - 1/x^2)`` with ``K`` the
    first-kind complete elliptic integral in the parameter convention; the
    AGM form of ``K`` reduces it to ``1 / (pi * agm(1, |x|))``. The function
    has a logarithmic singularity at 0, where ``inf`` is returned.
    """
    x = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    xi = x[inside]
    out[inside] = 2.0 / (PI * PI * xi) * np.asarray(ellipk(1.0 - 1.0 / (xi * xi)))
    out[x == 0] = math.inf
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""


_GL_COARSE = np.polynomial.legendre.leggauss(10)
_GL_FINE = np.polynomial.legendre.leggauss(20)


def _gl(g, lo, hi, rule):
    nodes, weights = rule
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(weights, g(mid + half * nodes)))


def quad_singular(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    *,
    vectorized: bool = False,
) -> float:
    """Integrate ``f`` over ``(a, b)`` allowing inverse-sqrt endpoint singularities.

    The substitution ``t = a + (b - a) sin^2(theta)`` maps ``(a, b)`` onto
    ``(0, pi/2)`` and cancels ``1/sqrt`` blow-ups at either end; the
    transformed integrand is then refined adaptively (globally, largest error
    first) with 10- and 20-point Gauss-Legendre rules on each panel.

    ``f`` is called with numpy arrays if ``vectorized`` is true, otherwise
    pointwise with floats. Raises :class:`QuadratureError` if ``abs_tol`` is
    not met within ``max_subdivisions`` panels.
    """
    spec = spec or QuadratureSpec()
    if not a < b:
        raise ValueError("quad_singular requires a < b")
    width = b - a

    if vectorized:
        def fx(t):
            return np.asarray(f(t), dtype=float)
    else:
        def fx(t):
            return np.array([float(f(float(ti))) for ti in t])

    def g(theta):
        s = np.sin(theta)
        t = a + width * s * s
        return fx(t) * (width * np.sin(2.0 * theta))

    def panel(lo, hi):
        fine = _gl(g, lo, hi, _GL_FINE)
        err = abs(fine - _gl(g, lo, hi, _GL_COARSE))
        return fine, err

    val, err = panel(0.0, 0.5 * PI)
    # heap of (-err, lo, hi, val); ties broken by lo so runs are deterministic
    heap = [(-err, 0.0, 0.5 * PI, val)]
    total_err = err
    count = 1
    while total_err > spec.abs_tol:
        if count >= spec.max_subdivisions:
            raise QuadratureError(
                f"no convergence on ({a}, {b}): error estimate {total_err:.3e} "
                f"> {spec.abs_tol:.3e} after {count} panels"
            )
        neg_err, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        lv, le = panel(lo, mid)
        rv, re = panel(mid, hi)
        heapq.heappush(heap, (-le, lo, mid, lv))
        heapq.heappush(heap, (-re, mid, hi, rv))
        total_err += le + re + neg_err
        count += 1
        if count % 64 == 0:
            total_err = sum(-e for e, *_ in heap)
    return math.fsum(item[3] for item in heap)
