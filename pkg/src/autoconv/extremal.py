"""The function ``h(x) = 1/sqrt(2x)`` on ``(0, 1/2)`` and probes of two conjectures.

``h`` is a pdf with ``h*h = pi/2`` on ``(0, 1/2]``, so it is a natural test
target for conjectured improvements. The probes only measure ratios on step
discretizations and log them; nothing here asserts a conjecture.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .specfun import QuadratureSpec, quad_singular
from .stepfn import StepFunction, autoconvolve

__all__ = [
    "CONJ1_CONSTANT",
    "CONJ2_CONSTANT",
    "HStats",
    "ProbeReport",
    "conjecture1_probe",
    "conjecture2_probe",
    "h_autoconv",
    "h_autoconv_quad",
    "h_stats",
    "h_step",
    "h_value",
    "implied_constant",
    "probe_levels",
]

log = logging.getLogger(__name__)

CONJ1_CONSTANT = math.pi / 2
CONJ2_CONSTANT = math.log(16) / math.pi


def h_value(x):
    """``1/sqrt(2x)`` on ``(0, 1/2)``, zero elsewhere (endpoints included)."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 0.5)
    out = np.zeros_like(x)
    out[inside] = 1.0 / np.sqrt(2.0 * x[inside])
    return float(out) if out.ndim == 0 else out


def h_autoconv(x):
    """Closed form of ``h*h``: ``pi/2`` on ``(0, 1/2]``, ``pi/2 - 2 atan sqrt(2x - 1)`` on ``(1/2, 1)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    flat = (x > 0) & (x <= 0.5)
    tail = (x > 0.5) & (x < 1)
    out[flat] = 0.5 * math.pi
    out[tail] = 0.5 * math.pi - 2.0 * np.arctan(np.sqrt(2.0 * x[tail] - 1.0))
    return float(out) if out.ndim == 0 else out


def h_autoconv_quad(x: float, spec: QuadratureSpec | None = None) -> float:
    """``int h(y) h(x - y) dy`` by quadrature, independent of the closed form."""
    lo, hi = max(0.0, x - 0.5), min(0.5, x)
    if not lo < hi:
        return 0.0
    # both factors blow up like 1/sqrt at the ends, which quad_singular absorbs
    return quad_singular(
        lambda y: 1.0 / np.sqrt(4.0 * y * (x - y)), lo, hi, spec, vectorized=True
    )


@dataclass(frozen=True)
class HStats:
    l1: float
    l1_err: float
    sup: float
    l2sq: float
    l2sq_err: float

    def to_dict(self) -> dict:
        return {"l1": self.l1, "l1_err": self.l1_err, "sup": self.sup, "sup_err": 0.0,
                "l2sq": self.l2sq, "l2sq_err": self.l2sq_err}


def h_stats(tol: float = 1e-10) -> HStats:
    """``(||h*h||_1, ||h*h||_inf, ||h*h||_2^2)`` from quadrature of the closed form.

    The reported errors are the distances to ``1`` and ``log 4``.
    """
    spec = QuadratureSpec(abs_tol=tol)
    flat = 0.5 * (0.5 * math.pi)
    flat_sq = 0.5 * (0.5 * math.pi) ** 2
    l1 = flat + quad_singular(h_autoconv, 0.5, 1.0, spec, vectorized=True)
    l2sq = flat_sq + quad_singular(lambda x: h_autoconv(x) ** 2, 0.5, 1.0, spec, vectorized=True)
    return HStats(l1, abs(l1 - 1.0), 0.5 * math.pi, l2sq, abs(l2sq - math.log(4)))


def h_step(k: int, rule: str = "midpoint") -> StepFunction:
    """``h`` discretized on ``2^k`` equal pieces of ``(0, 1/2)``.

    ``rule="midpoint"`` samples ``h`` at piece midpoints. ``rule="average"``
    uses the exact piece averages, which keeps the mass at 1 but makes
    ``f*f`` reach exactly 2 on the first piece at every level, so the probes
    then measure that spike rather than ``h``. Both probe ratios are
    scale-invariant, so the midpoint rule needs no normalization.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    x = np.linspace(0.0, 0.5, 2**k + 1)
    a, b = x[:-1], x[1:]
    if rule == "midpoint":
        return StepFunction(x, 1.0 / np.sqrt(a + b))
    if rule == "average":
        # int_a^b dx / sqrt(2x) = sqrt(2b) - sqrt(2a)
        return StepFunction(x, (np.sqrt(2 * b) - np.sqrt(2 * a)) / (b - a))
    raise ValueError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class ProbeReport:
    probe: int
    level: int | None
    ratio: float
    constant: float
    flagged: bool

    def to_dict(self) -> dict:
        return {"probe": self.probe, "level": self.level, "ratio": self.ratio,
                "constant": self.constant, "flagged": self.flagged}


def conjecture1_probe(f: StepFunction, level: int | None = None) -> ProbeReport:
    """``||f*f||_inf * 2I / ||f||_1^2`` with ``I`` the length of the support."""
    if np.any(f.values < 0):
        raise ValueError("f must be nonnegative")
    lo, hi = f.support
    mass = math.fsum(f.values * f.widths)
    ratio = autoconvolve(f).sup() * 2.0 * (hi - lo) / (mass * mass)
    flagged = ratio < CONJ1_CONSTANT
    if flagged:
        log.warning("probe 1: ratio %.12g below pi/2 (candidate counterexample)", ratio)
    else:
        log.info("probe 1: ratio %.12g", ratio)
    return ProbeReport(1, level, ratio, CONJ1_CONSTANT, flagged)


def conjecture2_probe(f: StepFunction, level: int | None = None) -> ProbeReport:
    """``||f*f||_2^2 / (||f*f||_inf ||f*f||_1)`` from exact piecewise-linear norms."""
    if np.any(f.values < 0):
        raise ValueError("f must be nonnegative")
    g = autoconvolve(f)
    ratio = g.l2sq() / (g.sup() * g.l1())
    flagged = ratio > CONJ2_CONSTANT
    if flagged:
        # recompute with the tent-wise formula on a refined split as a cross-check
        x = np.unique(np.concatenate([g.breakpoints, 0.5 * (g.breakpoints[1:] + g.breakpoints[:-1])]))
        v = g(x)
        a, b = v[:-1], v[1:]
        l2 = math.fsum(np.diff(x) * (a * a + a * b + b * b) / 3.0)
        log.warning("probe 2: ratio %.12g (recheck %.12g) above log16/pi (candidate counterexample)",
                    ratio, l2 / (g.sup() * g.l1()))
    else:
        log.info("probe 2: ratio %.12g", ratio)
    return ProbeReport(2, level, ratio, CONJ2_CONSTANT, flagged)


def probe_levels(probe: int, levels) -> list[ProbeReport]:
    """Run a probe on ``h_step(k)`` for each ``k`` in ``levels``."""
    fn = {1: conjecture1_probe, 2: conjecture2_probe}.get(probe)
    if fn is None:
        raise ValueError("probe must be 1 or 2")
    return [fn(h_step(k), level=k) for k in levels]


def implied_constant(L: float, R: float, c: float = CONJ2_CONSTANT, tol: float = 1e-12) -> float:
    """Smallest ``M`` with ``M + 1 + 2L sqrt(cM - 1) >= R``.

    With ``||f*f||_2^2 <= c ||f*f||_inf`` for pdfs, the autocorrelation term is
    at most ``1 + 2L sqrt(cM - 1)`` instead of ``1 + 2L sqrt(M - 1)``; the bound
    becomes the root of this monotone equation.
    """
    if not (L > 0 and 0 < c <= 1):
        raise ValueError("need L > 0 and 0 < c <= 1")

    def excess(m):
        return m + 1.0 + 2.0 * L * math.sqrt(max(c * m - 1.0, 0.0)) - R

    lo = 1.0
    if excess(lo) >= 0:
        return lo
    hi = max(R, 2.0)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi
