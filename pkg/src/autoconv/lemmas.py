"""Numerical check of the four inequalities behind the bound, on a concrete pdf.

For a step pdf ``f`` on ``[-1/4, 1/4]`` the integrals of ``f*f`` and ``f o f``
against ``K_ss`` are computed from exact piecewise-linear representations and
exact kernel moments; the Fourier side uses closed-form coefficients with a
certified truncation tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import KssKernel, Params, SelbergKernel, build_selberg, integrate_against_kss
from .stepfn import CoeffTable, StepFunction, autoconvolve, autocorrelate, fourier_tilde, random_pdf

__all__ = [
    "THEOREM_CONSTANT",
    "ChainReport",
    "SuiteSummary",
    "run_lemma_suite",
    "verify_lemma_chain",
]

THEOREM_CONSTANT = 1.262
CHECKS = ("astupper", "circupper", "equality", "improvedlower", "theorem")


@dataclass(frozen=True)
class ChainReport:
    sup: float
    i_conv: float
    i_corr: float
    circ_upper: float
    fourier_side: float
    equality_gap: float
    tail_bound: float
    quad_form: float
    improved_rhs: float
    checks: dict = field(default_factory=dict)

    @property
    def failed(self) -> list[str]:
        return [name for name in CHECKS if not self.checks.get(name, False)]

    @property
    def passed(self) -> bool:
        return not self.failed


def verify_lemma_chain(
    f: StepFunction,
    params: Params,
    kernel_coeffs: CoeffTable,
    kss_l2sq: float,
    selberg: SelbergKernel,
    slack: float = 1e-9,
) -> ChainReport:
    """Evaluate both sides of each inequality for ``f`` and report which hold.

    (a) ``int (f*f) K <= ||f*f||_inf``; (b) ``int (f o f) K <= 1 +
    sqrt(||f*f|| - 1) sqrt(||K||^2 - 1)``; (c) the Fourier identity for
    ``int (f*f + f o f) K`` within tail + 1e-6; (d) the quadratic-form lower
    bound through ``G``. The truncated quadratic form is a lower bound for the
    full series (all terms are nonnegative), so (d) is checked rigorously.
    """
    if not f.is_pdf(1e-9):
        raise ValueError("f must be a pdf")
    if f.halfwidth > 0.25:
        raise ValueError("f must be supported in [-1/4, 1/4]")
    u, delta = params.u, params.delta

    conv = autoconvolve(f)
    corr = autocorrelate(f)
    sup = conv.sup()
    i_conv = integrate_against_kss(params, conv)
    i_corr = integrate_against_kss(params, corr)
    circ_upper = 1.0 + math.sqrt(max(sup - 1.0, 0.0)) * math.sqrt(kss_l2sq - 1.0)

    J = kernel_coeffs.truncation_J
    j = np.arange(1, J + 1)
    re = fourier_tilde(f, j, u).real
    kt = np.asarray(kernel_coeffs[j], dtype=float)
    # f real and K~ even: the j < 0 half mirrors j > 0
    quad_form = u * u * 2.0 * math.fsum(re * re * kt)
    fourier_side = 2.0 / u + 2.0 * quad_form
    tv = f.total_variation()
    tail = u * u * tv * tv / (2.0 * math.pi**3 * delta * J * J)
    lhs = i_conv + i_corr

    spec_j = np.arange(1, params.n)
    gt = selberg.coeff(spec_j)
    kt_spec = np.asarray(kernel_coeffs[spec_j], dtype=float)
    improved_rhs = selberg.min_on_quarter**2 / (2.0 * math.fsum(gt * gt / kt_spec))

    checks = {
        "astupper": i_conv <= sup + slack,
        "circupper": i_corr <= circ_upper + slack,
        "equality": abs(lhs - fourier_side) <= tail + 1e-6,
        "improvedlower": quad_form >= improved_rhs - slack,
        "theorem": sup >= THEOREM_CONSTANT,
    }
    return ChainReport(
        sup=sup, i_conv=i_conv, i_corr=i_corr, circ_upper=circ_upper,
        fourier_side=fourier_side, equality_gap=abs(lhs - fourier_side),
        tail_bound=tail, quad_form=quad_form, improved_rhs=improved_rhs,
        checks=checks,
    )


@dataclass
class SuiteSummary:
    count: int
    seed: int
    passed: int
    min_sup: float
    failures: list[tuple[int, list[str]]]
    bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "seed": self.seed,
            "passed": self.passed,
            "failed": self.count - self.passed,
            "min_sup": self.min_sup,
            "bound": self.bound,
            "failures": [{"index": i, "checks": c} for i, c in self.failures],
        }


def run_lemma_suite(
    count: int,
    seed: int,
    params: Params | None = None,
    J: int = 2**15,
    grid: int = 10**6,
    bound: float | None = None,
) -> SuiteSummary:
    """Run :func:`verify_lemma_chain` on ``count`` random pdfs.

    Instance ``i`` draws from ``numpy.random.default_rng([seed, i])``, so any
    failing instance can be regenerated on its own. If ``bound`` is given,
    ``||f*f||_inf >= bound`` is checked as well.
    """
    params = params or Params(0.13, 22)
    kernel = KssKernel.build(params, J=J)
    selberg = build_selberg(params, grid)
    failures = []
    min_sup = math.inf
    for i in range(count):
        f = random_pdf(np.random.default_rng([seed, i]))
        rep = verify_lemma_chain(f, params, kernel.coeff_table, kernel.l2sq + kernel.l2sq_err, selberg)
        bad = rep.failed
        if bound is not None and rep.sup < bound:
            bad = bad + ["bound"]
        if bad:
            failures.append((i, bad))
        min_sup = min(min_sup, rep.sup)
    return SuiteSummary(count, seed, count - len(failures), min_sup, failures, bound)
