"""Step functions, their exact autoconvolutions, and Fourier coefficients.

A step function with jumps ``s_k`` at ``x_k`` is ``sum_k s_k H(x - x_k)``.
Since the jumps sum to zero, the convolution of two such functions is the
compactly supported ramp combination ``sum_{k,l} s_k t_l max(x - x_k - y_l, 0)``,
which is piecewise linear with corners only at the pairwise sums. That is the
representation used for ``f*f`` and ``f o f`` below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CoeffTable",
    "HatParsevalReport",
    "ParsevalReport",
    "PiecewiseLinear",
    "StepFunction",
    "autoconvolve",
    "autocorrelate",
    "convolve",
    "fourier_hat",
    "fourier_tilde",
    "fourier_transform",
    "hat_parseval",
    "hfold_grid",
    "inner_product",
    "random_pdf",
    "sup_norm",
    "verify_parseval_u",
]

TWO_PI = 2.0 * math.pi


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Value ``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``, zero outside."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = _frozen(self.breakpoints)
        v = _frozen(self.values)
        if x.ndim != 1 or v.ndim != 1 or len(x) != len(v) + 1 or len(v) == 0:
            raise ValueError("need len(values) == len(breakpoints) - 1 >= 1")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
            raise ValueError("breakpoints and values must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", v)

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        return cls([a, b], [height])

    @classmethod
    def from_intervals(cls, intervals) -> "StepFunction":
        """Indicator of a union of disjoint intervals given as ``(a, b)`` pairs."""
        ivs = sorted((float(a), float(b)) for a, b in intervals)
        if not ivs:
            raise ValueError("need at least one interval")
        xs, vs = [ivs[0][0]], []
        for i, (a, b) in enumerate(ivs):
            if not a < b:
                raise ValueError(f"empty interval ({a}, {b})")
            if i:
                prev = xs[-1]
                if a < prev:
                    raise ValueError("intervals overlap")
                if a > prev:
                    vs.append(0.0)
                    xs.append(a)
            vs.append(1.0)
            xs.append(b)
        return cls(xs, vs)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def halfwidth(self) -> float:
        """Smallest ``alpha`` with the support inside ``[-alpha, alpha]``."""
        return float(max(abs(self.breakpoints[0]), abs(self.breakpoints[-1])))

    def integral(self) -> float:
        return math.fsum(self.values * self.widths)

    def l2sq(self) -> float:
        return math.fsum(self.values**2 * self.widths)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def jumps(self) -> tuple[np.ndarray, np.ndarray]:
        """Jump positions and signed jump sizes (including the two ends)."""
        padded = np.concatenate(([0.0], self.values, [0.0]))
        return self.breakpoints, np.diff(padded)

    def total_variation(self) -> float:
        return math.fsum(np.abs(self.jumps()[1]))

    def is_pdf(self, tol: float = 1e-12) -> bool:
        return bool(np.all(self.values >= 0)) and abs(self.integral() - 1.0) <= tol

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.values))
        out = np.where(inside, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.0)
        if out.ndim == 0:
            return float(out)
        return out


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Linear interpolation of ``node_values`` at ``breakpoints``; zero outside."""

    breakpoints: np.ndarray
    node_values: np.ndarray

    def __post_init__(self):
        x = _frozen(self.breakpoints)
        v = _frozen(self.node_values)
        if x.ndim != 1 or x.shape != v.shape or len(x) == 0:
            raise ValueError("breakpoints and node_values must be equal-length 1-d")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "node_values", v)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def sup(self) -> float:
        return float(np.max(self.node_values))

    def integral(self) -> float:
        v = self.node_values
        return math.fsum(0.5 * (v[1:] + v[:-1]) * np.diff(self.breakpoints))

    def l1(self) -> float:
        """``||g||_1``; exact when no segment changes sign."""
        v = np.abs(self.node_values)
        return math.fsum(0.5 * (v[1:] + v[:-1]) * np.diff(self.breakpoints))

    def l2sq(self) -> float:
        a, b = self.node_values[:-1], self.node_values[1:]
        return math.fsum(np.diff(self.breakpoints) * (a * a + a * b + b * b) / 3.0)

    def segments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(lo, hi, intercept, slope)`` of every linear piece."""
        x, v = self.breakpoints, self.node_values
        slope = np.diff(v) / np.diff(x)
        intercept = v[:-1] - slope * x[:-1]
        return x[:-1], x[1:], intercept, slope

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.breakpoints, self.node_values,
                        left=0.0, right=0.0)
        if np.ndim(out) == 0:
            return float(out)
        return out


def _ramp_combination(positions: np.ndarray, weights: np.ndarray) -> PiecewiseLinear:
    # exact dedupe: the positions are sums of exactly representable breakpoints
    nodes, inverse = np.unique(positions.ravel(), return_inverse=True)
    w = np.bincount(inverse.ravel(), weights=weights.ravel(), minlength=len(nodes))
    slopes = np.cumsum(w)
    values = np.concatenate(([0.0], np.cumsum(slopes[:-1] * np.diff(nodes))))
    return PiecewiseLinear(nodes, values)


def convolve(f: StepFunction, g: StepFunction) -> PiecewiseLinear:
    """Exact ``f * g`` of two step functions."""
    xf, sf = f.jumps()
    xg, sg = g.jumps()
    return _ramp_combination(np.add.outer(xf, xg), np.multiply.outer(sf, sg))


def autoconvolve(f: StepFunction) -> PiecewiseLinear:
    return convolve(f, f)


def autocorrelate(f: StepFunction) -> PiecewiseLinear:
    """Exact ``(f o f)(x) = int f(y) f(x + y) dy``."""
    x, s = f.jumps()
    # reflection y -> -y turns a jump s at x into a jump -s at -x
    return _ramp_combination(np.add.outer(-x, x), np.multiply.outer(-s, s))


def sup_norm(g: PiecewiseLinear) -> float:
    return g.sup()


def inner_product(f: StepFunction, g: StepFunction) -> float:
    """Exact ``int f g`` of two real step functions."""
    xs = np.union1d(f.breakpoints, g.breakpoints)
    mids = 0.5 * (xs[1:] + xs[:-1])
    return math.fsum(f(mids) * g(mids) * np.diff(xs))


# ------------------------------------------------------------------- Fourier


def fourier_transform(f: StepFunction, xi):
    """``int f(x) exp(-2 pi i x xi) dx`` in closed form (scalar or array ``xi``)."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty(xi_arr.shape, dtype=complex)
    zero = xi_arr == 0
    out[zero] = f.integral()
    nz = xi_arr[~zero]
    if nz.size:
        e = np.exp(-1j * TWO_PI * np.multiply.outer(nz, f.breakpoints))
        out[~zero] = (e[:, :-1] - e[:, 1:]) @ f.values / (1j * TWO_PI * nz)
    if np.ndim(xi) == 0:
        return complex(out[0])
    return out


def fourier_hat(f: StepFunction, j):
    """1-periodic coefficient ``f^(j)``."""
    return fourier_transform(f, j)


def fourier_tilde(f: StepFunction, j, u: float):
    """u-periodic coefficient ``f~(j) = (1/u) f^(j/u)``."""
    if not 0.5 < u < 1:
        raise ValueError("u must lie in (1/2, 1)")
    return fourier_transform(f, np.asarray(j, dtype=float) / u) / u


@dataclass(frozen=True)
class CoeffTable:
    """Coefficients for ``|j| <= truncation_J`` plus a bound on the neglected tail.

    ``tail_bound`` bounds the absolute sum, over ``|j| > truncation_J``, of the
    quantity the table is summed into (documented by whoever builds it).
    """

    period_param: float
    coeffs: np.ndarray  # index j + truncation_J
    truncation_J: int
    tail_bound: float

    def __post_init__(self):
        c = np.array(self.coeffs)
        c.setflags(write=False)
        if len(c) != 2 * self.truncation_J + 1:
            raise ValueError("coeffs must cover every |j| <= truncation_J")
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound must be nonnegative")
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, j):
        j = np.asarray(j)
        if np.any(np.abs(j) > self.truncation_J):
            raise KeyError(f"|j| beyond truncation {self.truncation_J}")
        out = self.coeffs[j + self.truncation_J]
        return out.item() if out.ndim == 0 else out

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.truncation_J, self.truncation_J + 1)


def tilde_table(f: StepFunction, u: float, J: int) -> CoeffTable:
    """``f~(j)`` for ``|j| <= J``; tail bounds ``sum_{|j|>J} |f~(j)|^2``.

    Uses ``|f~(j)| <= TV(f) / (2 pi |j|)`` and ``sum_{j>J} j^-2 < 1/J``.
    """
    j = np.arange(-J, J + 1)
    coeffs = fourier_tilde(f, j, u)
    tv = f.total_variation()
    tail = 2.0 * (tv / TWO_PI) ** 2 / J if J > 0 else math.inf
    return CoeffTable(u, coeffs, J, tail)


@dataclass(frozen=True)
class ParsevalReport:
    lhs: float
    partial_sum: complex
    gap: float
    tail_bound: float
    J: int

    @property
    def passed(self) -> bool:
        return self.gap <= self.tail_bound + 1e-8


def verify_parseval_u(g1: StepFunction, g2: StepFunction, u: float, J: int) -> ParsevalReport:
    """Compare ``int g1 g2`` with ``u * sum_{|j|<=J} g1~(j) conj(g2~(j))``.

    Requires supports in ``(-a1, a1)``, ``(-a2, a2)`` with ``a1 + a2 <= u``;
    otherwise raises ``ValueError``. The tail bound is
    ``u TV1 TV2 / (2 pi^2 J)``.
    """
    if not 0.5 < u < 1:
        raise ValueError("u must lie in (1/2, 1)")
    if J < 1:
        raise ValueError("J must be >= 1")
    a1, a2 = g1.halfwidth, g2.halfwidth
    if a1 + a2 > u:
        raise ValueError(f"supports too wide: {a1} + {a2} > u = {u}")
    j = np.arange(-J, J + 1)
    t1 = fourier_tilde(g1, j, u)
    t2 = fourier_tilde(g2, j, u)
    partial = u * complex(np.sum(t1 * np.conj(t2)))
    lhs = inner_product(g1, g2)
    tail = u * g1.total_variation() * g2.total_variation() / (2.0 * math.pi**2 * J)
    return ParsevalReport(lhs, partial, abs(lhs - partial), tail, J)


@dataclass(frozen=True)
class HatParsevalReport:
    exact: float
    partial_sums: np.ndarray = field(repr=False)  # S_J for J = 0 .. Jmax
    tail_bound: float

    @property
    def final_gap(self) -> float:
        return self.exact - float(self.partial_sums[-1])

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.partial_sums) >= 0))


def hat_parseval(f: StepFunction, J: int) -> HatParsevalReport:
    """Partial sums ``sum_{|j|<=J'} |f^(j)|^2`` for ``J' = 0..J`` against ``int f^2``.

    ``f`` must be supported in an interval of length at most 1 centred at 0.
    """
    if f.halfwidth > 0.5:
        raise ValueError("support must lie in [-1/2, 1/2]")
    j = np.arange(1, J + 1)
    c = np.abs(fourier_hat(f, j)) ** 2
    # f real: |f^(-j)| = |f^(j)|
    sums = np.concatenate(([f.integral() ** 2], f.integral() ** 2 + 2.0 * np.cumsum(c)))
    tail = 2.0 * (f.total_variation() / TWO_PI) ** 2 / J
    return HatParsevalReport(f.l2sq(), sums, tail)


# ------------------------------------------------------------------ h-fold


def hfold_grid(f: StepFunction, h: int, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Approximate ``f^{*h}`` on a uniform grid by repeated discrete convolution.

    ``f`` is replaced by its midpoint samples on ``resolution`` equal cells;
    the result is the exact ``h``-fold convolution of that piecewise-constant
    approximation, sampled at the points where its cells' centres add up.
    Not certified. Returns ``(x, values)``.
    """
    if h < 2 or h % 2:
        raise ValueError("h must be an even integer >= 2")
    if resolution < 2**10:
        raise ValueError("resolution must be >= 2**10")
    lo, hi = f.support
    dx = (hi - lo) / resolution
    mids = lo + (np.arange(resolution) + 0.5) * dx
    base = f(mids)
    out = base
    for _ in range(h - 1):
        out = np.convolve(out, base) * dx
    x = h * lo + (np.arange(len(out)) + 0.5 * h) * dx
    return x, out


# ------------------------------------------------------------------ random


def random_pdf(
    rng: np.random.Generator,
    halfwidth: float = 0.25,
    pieces: tuple[int, int] = (2, 12),
    denominator: int = 1024,
) -> StepFunction:
    """Random step pdf inside ``[-halfwidth, halfwidth]`` with dyadic breakpoints.

    The piece count is uniform in ``pieces`` (inclusive); values are drawn
    positive and normalised to unit mass.
    """
    m = int(rng.integers(pieces[0], pieces[1] + 1))
    top = int(round(halfwidth * denominator))
    grid = np.arange(-top, top + 1)
    xs = np.sort(rng.choice(grid, size=m + 1, replace=False)) / denominator
    vals = rng.uniform(0.05, 1.0, size=m)
    vals = vals / float(np.dot(vals, np.diff(xs)))
    return StepFunction(xs, vals)
