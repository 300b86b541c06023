"""The two kernels of the bound: the arcsine autocorrelation and Selberg's majorant.

``K_ss(x) = (1/delta) (ss o ss)(x / delta)`` is a pdf on ``(-delta, delta)``
with u-periodic coefficients ``J0(pi delta j / u)^2 / u``. ``G_{u,n}`` is a
finite cosine series of period ``u`` that is at least 1 on ``[-1/4, 1/4]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import QuadratureSpec, bessel_j0, quad_singular, ss_autocorr
from .stepfn import CoeffTable, PiecewiseLinear

__all__ = [
    "KssKernel",
    "KssNorm",
    "Params",
    "SelbergKernel",
    "build_selberg",
    "integrate_against_kss",
    "kss_coeff",
    "kss_coeff_table",
    "kss_l2sq",
    "kss_moments",
    "kss_value",
    "selberg_c",
    "selberg_coeff",
    "selberg_eval",
    "selberg_lipschitz",
    "selberg_min",
]

PI = math.pi


def _check_un(u: float, n: int) -> None:
    if not 0.5 < u < 1:
        raise ValueError(f"u = {u} must lie in (1/2, 1)")
    if int(n) != n:
        raise ValueError("n must be an integer")
    if not 2 * u * n - 2 * u - n > 0:
        raise ValueError(f"n = {n} must exceed 2u/(2u-1) = {2 * u / (2 * u - 1):.6g}")


@dataclass(frozen=True)
class Params:
    """``(delta, u, n)`` with ``u = delta + 1/2`` filled in when omitted.

    ``n`` may be ``None`` when only the first kernel is needed.
    """

    delta: float
    n: int | None
    u: float | None = None

    def __post_init__(self):
        if not 0 < self.delta < 0.25:
            raise ValueError(f"delta = {self.delta} must lie in (0, 1/4)")
        u = self.delta + 0.5
        if self.u is None:
            object.__setattr__(self, "u", u)
        elif self.u != u:
            raise ValueError("u must equal delta + 1/2")
        if self.n is not None:
            _check_un(self.u, self.n)
            object.__setattr__(self, "n", int(self.n))

    @property
    def spec(self) -> np.ndarray:
        """Nonzero frequencies of ``G_{u,n}``: ``1 <= |j| <= n-1``."""
        k = np.arange(1, self.n)
        return np.concatenate((-k[::-1], k))


# ---------------------------------------------------------------- K_ss


def kss_value(params: Params, x):
    d = params.delta
    return ss_autocorr(np.asarray(x, dtype=float) / d) / d


def kss_coeff(params: Params, j):
    """``K~(j) = J0(pi delta j / u)^2 / u``."""
    arg = PI * params.delta * np.asarray(j, dtype=float) / params.u
    out = np.asarray(bessel_j0(arg)) ** 2 / params.u
    return float(out) if out.ndim == 0 else out


def kss_coeff_table(params: Params, J: int) -> CoeffTable:
    """``K~(j)`` for ``|j| <= J``; the tail bounds ``sum_{|j|>J} K~(j)^2``.

    From ``|J0(x)| < 1/sqrt(x)``: ``K~(j)^2 < 1/(pi delta j)^2``, summed over
    both signs with ``sum_{j>J} j^-2 < 1/J``.
    """
    j = np.arange(-J, J + 1)
    coeffs = kss_coeff(params, j)
    tail = 2.0 / ((PI * params.delta) ** 2 * J)
    return CoeffTable(params.u, coeffs, J, tail)


@lru_cache(maxsize=8)
def ss_autocorr_l2sq(abs_tol: float = 1e-12) -> float:
    """``||ss o ss||_2^2`` by quadrature (even integrand, log singularity at 0)."""
    spec = QuadratureSpec(abs_tol=abs_tol / 2)
    return 2.0 * quad_singular(lambda x: ss_autocorr(x) ** 2, 0.0, 1.0, spec, vectorized=True)


@dataclass(frozen=True)
class KssNorm:
    value: float
    error: float
    quadrature: float
    parseval: float
    certified_tail: float

    @property
    def disagreement(self) -> float:
        return abs(self.quadrature - self.parseval)


def _tail_inverse_squares(J: int) -> float:
    # sum_{j>J} j^-2, Euler-Maclaurin
    return 1.0 / J - 0.5 / J**2 + 1.0 / (6.0 * J**3) - 1.0 / (30.0 * J**5)


def kss_l2sq(params: Params, J: int = 100_000, tol: float = 1e-12, agree: float = 1e-6) -> KssNorm:
    """``||K_ss||_2^2`` by quadrature, cross-checked by the u-periodic Parseval sum.

    The Parseval route is ``(1/u) sum_j J0(a j)^4`` with ``a = pi delta / u``,
    summed exactly for ``|j| <= J`` and completed with the mean asymptotic
    tail ``(1/u) 3 / (pi^2 a^2) sum_{j>J} j^-2``. The two must agree within
    ``agree``; otherwise ``ArithmeticError``.
    """
    d, u = params.delta, params.u
    quad = ss_autocorr_l2sq(tol) / d
    a = PI * d / u
    j = np.arange(1, J + 1, dtype=float)
    head = (1.0 + 2.0 * math.fsum(np.asarray(bessel_j0(a * j)) ** 4)) / u
    tail_est = 3.0 / (PI**2 * a * a) * _tail_inverse_squares(J) / u
    parseval = head + tail_est
    certified = 2.0 / (a * a * J * u)
    diff = abs(quad - parseval)
    if diff > agree:
        raise ArithmeticError(
            f"||K||^2 routes disagree: quadrature {quad!r} vs Parseval {parseval!r}"
        )
    return KssNorm(quad, max(tol / d, diff), quad, parseval, certified)


# graded Gauss-Legendre panels [2^-(k+1), 2^-k] resolve the log singularity at 0
_MOMENT_LEVELS = 48
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_lo = 2.0 ** -(np.arange(_MOMENT_LEVELS) + 1.0)
_REL_T = (_lo[:, None] * (1.0 + 0.5 * (_GL_NODES + 1.0))).ravel()
_REL_W = (_lo[:, None] * 0.5 * _GL_WEIGHTS).ravel()
_REMAINDER = 2.0 ** -_MOMENT_LEVELS


def _ss_moments(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``int_0^y ss o ss`` and ``int_0^y t (ss o ss)(t) dt`` for ``0 <= y <= 1``."""
    t = np.multiply.outer(y, _REL_T)
    w = np.multiply.outer(y, _REL_W)
    s = np.zeros_like(t)
    pos = t > 0
    s[pos] = ss_autocorr(t[pos])
    s0 = np.sum(w * s, axis=-1)
    s1 = np.sum(w * t * s, axis=-1)
    # (ss o ss)(t) ~ (2/pi^2) log(4/t) on the untouched sliver [0, eps]
    eps = y * _REMAINDER
    with np.errstate(divide="ignore", invalid="ignore"):
        rem = np.where(eps > 0, 2.0 / PI**2 * eps * (np.log(4.0 / eps) + 1.0), 0.0)
    return s0 + rem, s1


def kss_moments(params: Params, x) -> tuple[np.ndarray, np.ndarray]:
    """``M0(x) = int_0^x K_ss`` and ``M1(x) = int_0^x t K_ss(t) dt`` (arrays)."""
    x = np.asarray(x, dtype=float)
    d = params.delta
    y = np.minimum(np.abs(x) / d, 1.0)
    s0, s1 = _ss_moments(y.ravel())
    return (np.sign(x) * s0.reshape(x.shape), d * s1.reshape(x.shape))


def integrate_against_kss(params: Params, g: PiecewiseLinear) -> float:
    """``int g K_ss`` for piecewise-linear ``g``, using the exact moment split."""
    lo, hi, c0, c1 = g.segments()
    m0, m1 = kss_moments(params, np.concatenate((lo, hi)))
    k = len(lo)
    return math.fsum(c0 * (m0[k:] - m0[:k]) + c1 * (m1[k:] - m1[:k]))


@dataclass(frozen=True, eq=False)
class KssKernel:
    params: Params
    l2sq: float
    l2sq_err: float
    coeff_table: CoeffTable

    @classmethod
    def build(cls, params: Params, J: int = 2**15) -> "KssKernel":
        norm = kss_l2sq(params)
        table = kss_coeff_table(params, J)
        if np.any(table.coeffs < 0):
            raise ArithmeticError("negative K~(j) encountered")
        return cls(params, norm.value, norm.error, table)


# ------------------------------------------------------------- Selberg G


def _cot(k: int, n: int) -> float:
    # fold k > n/2 onto n-k to keep the sine away from zero
    if 2 * k > n:
        m = n - k
        return -math.cos(PI * m / n) / math.sin(PI * m / n)
    return math.cos(PI * k / n) / math.sin(PI * k / n)


def selberg_c(u: float, n: int, k: int) -> float:
    """Selberg coefficient ``C_{u,n}(k)`` for ``1 <= k <= n-1``."""
    if int(k) != k or not 1 <= k <= n - 1:
        raise ValueError(f"k = {k} outside [1, {n - 1}]")
    k = int(k)
    s = math.sin(PI * k / (2 * u))
    c = math.cos(PI * k / (2 * u))
    return (1 - k / n) * (_cot(k, n) * s + c) + s / PI


def _c_values(u: float, n: int) -> np.ndarray:
    return np.array([selberg_c(u, n, k) for k in range(1, n)])


def _cos_amplitudes(u: float, n: int) -> np.ndarray:
    return 4 * u / (2 * u * n - 2 * u - n) * _c_values(u, n)


def selberg_coeff(u: float, n: int, j: int) -> float:
    """``G~(j)``: ``2u C(|j|) / (2un - 2u - n)`` for ``1 <= |j| < n``, else 0."""
    _check_un(u, n)
    j = abs(int(j))
    if not 1 <= j < n:
        return 0.0
    return 2 * u * selberg_c(u, n, j) / (2 * u * n - 2 * u - n)


def selberg_eval(u: float, n: int, x):
    """``G_{u,n}(x)`` (scalar or array)."""
    _check_un(u, n)
    x = np.asarray(x, dtype=float)
    amp = _cos_amplitudes(u, n)
    out = np.zeros_like(x)
    for k, a in enumerate(amp, start=1):
        out += a * np.cos(2 * PI * k * x / u)
    return float(out) if out.ndim == 0 else out


def selberg_lipschitz(u: float, n: int) -> float:
    """Upper bound on ``|G'|``: ``sum_k |amp_k| 2 pi k / u``."""
    amp = _cos_amplitudes(u, n)
    k = np.arange(1, n)
    return float(np.sum(np.abs(amp) * 2 * PI * k / u))


def _selberg_grid_min(u: float, n: int, M: int) -> tuple[float, float]:
    if M < 2:
        raise ValueError("grid needs at least 2 points")
    xs = np.linspace(0.0, 0.25, M)
    grid_min = float(np.min(selberg_eval(u, n, xs)))
    # every point of [0, 1/4] lies within half a grid step of the grid
    half_step = 0.125 / (M - 1)
    return grid_min, selberg_lipschitz(u, n) * half_step


def selberg_min(u: float, n: int, M: int = 10**6) -> float:
    """Certified lower bound for ``min_{[0, 1/4]} G_{u,n}``.

    Grid minimum over ``M`` equispaced points minus ``L_G / (8(M-1))``, the
    Lipschitz bound times the largest distance from any point to the grid.
    """
    grid_min, gap = _selberg_grid_min(u, n, M)
    return grid_min - gap


@dataclass(frozen=True, eq=False)
class SelbergKernel:
    params: Params
    c_values: np.ndarray
    min_on_quarter: float
    grid_min: float
    min_gap: float

    @property
    def spec(self) -> np.ndarray:
        return self.params.spec

    def coeff(self, j):
        u, n = self.params.u, self.params.n
        j = np.abs(np.asarray(j))
        scale = 2 * u / (2 * u * n - 2 * u - n)
        inside = (j >= 1) & (j < n)
        out = np.where(inside, scale * self.c_values[np.clip(j - 1, 0, n - 2)], 0.0)
        return float(out) if out.ndim == 0 else out

    def __call__(self, x):
        return selberg_eval(self.params.u, self.params.n, x)


def build_selberg(params: Params, M: int = 10**6) -> SelbergKernel:
    grid_min, gap = _selberg_grid_min(params.u, params.n, M)
    return SelbergKernel(params, _c_values(params.u, params.n), grid_min - gap, grid_min, gap)
