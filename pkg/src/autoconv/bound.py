"""Assembling the lower bound for ``||f*f||_inf``.

Upper side: ``int (f*f + f o f) K <= M + 1 + 2L sqrt(M - 1)``. Lower side:
``>= R``. With ``Q = sqrt(M - 1)`` the quadratic ``Q^2 + 2LQ + 2 - R >= 0``
forces ``M >= (sqrt(L^2 + R - 2) - L)^2 + 1``.

Every stage rounds against the bound: ``L`` up, ``R`` down, ``min G`` down.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .kernels import (
    KssKernel,
    Params,
    SelbergKernel,
    build_selberg,
    kss_coeff,
    kss_l2sq,
    selberg_c,
)
from .specfun import bessel_j0

__all__ = [
    "BoundReport",
    "CSV_COLUMNS",
    "SweepResult",
    "compute_L",
    "compute_R",
    "compute_R_closed_form",
    "delta_grid",
    "full_bound",
    "simple_bound",
    "solve_bound",
    "sweep",
    "write_csv",
]

log = logging.getLogger(__name__)

# absolute accuracy assumed for bessel_j0 when propagating into R
J0_ABS_ERR = 1e-13

CSV_COLUMNS = ("delta", "u", "n", "kss_l2sq", "min_g", "L", "R", "bound", "error_budget", "mode")


@dataclass(frozen=True)
class BoundReport:
    delta: float
    u: float
    n: int | None
    kss_l2sq: float
    kss_l2sq_err: float
    min_g: float | None
    min_g_err: float | None
    L: float
    L_err: float
    R: float
    R_err: float
    bound: float
    error_budget: float
    mode: str

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> list:
        d = self.to_dict()
        return ["" if d[c] is None else d[c] for c in CSV_COLUMNS]


def compute_L(kss_l2sq: float, error: float = 0.0) -> float:
    """``(1/2) sqrt(||K||^2 - 1)``, evaluated at the upper end ``||K||^2 + error``."""
    if not kss_l2sq > 1:
        raise ValueError(f"||K||_2^2 = {kss_l2sq} must exceed 1")
    return 0.5 * math.sqrt(kss_l2sq + error - 1.0)


def _spec_terms(params: Params, kernel: KssKernel | None, selberg: SelbergKernel):
    j = np.arange(1, params.n)
    if kernel is not None and kernel.coeff_table.truncation_J >= params.n - 1:
        kt = np.asarray(kernel.coeff_table[j], dtype=float)
    else:
        kt = kss_coeff(params, j)
    if np.any(kt <= 0):
        bad = j[kt <= 0].tolist()
        raise ValueError(f"K~(j) <= 0 on Spec(G) at j = {bad}; parameters rejected")
    gt = selberg.coeff(j)
    return kt, gt


def compute_R(
    params: Params,
    min_g: float,
    kernel: KssKernel | None,
    selberg: SelbergKernel,
    with_error: bool = False,
):
    """``2/u + 2 min_g^2 / sum_{Spec G} G~(j)^2 / K~(j)``, rounded down.

    The rounding covers the Bessel error: ``K~(j) = J0^2/u`` carries relative
    error ``2 eps / |J0|``. With ``with_error`` returns ``(R, R_err)``.
    """
    kt, gt = _spec_terms(params, kernel, selberg)
    terms = gt * gt / kt
    S = 2.0 * math.fsum(terms)
    extra = 2.0 * min_g * min_g / S
    value = 2.0 / params.u + extra
    j0 = np.sqrt(kt * params.u)
    rel_S = 2.0 * math.fsum(terms * 2.0 * J0_ABS_ERR / j0) / S
    err = extra * rel_S + 4 * math.ulp(value)
    if with_error:
        return value - err, err
    return value - err


def compute_R_closed_form(params: Params, min_g: float) -> float:
    """Same quantity via ``(2un - 2u - n)^2 / (4u^3)`` and the raw ``C(k)`` (unrounded)."""
    u, n, d = params.u, params.n, params.delta
    D = 2 * u * n - 2 * u - n
    s = math.fsum(
        selberg_c(u, n, k) ** 2 / bessel_j0(math.pi * d * k / u) ** 2 for k in range(1, n)
    )
    return 2.0 / u + min_g * min_g * D * D / (4 * u**3) / s


def solve_bound(L: float, R: float) -> float:
    """``(sqrt(L^2 + R - 2) - L)^2 + 1``, or 1 when ``R <= 2`` (nothing gained)."""
    if not L > 0:
        raise ValueError("L must be positive")
    if R <= 2:
        return 1.0
    # sqrt(L^2 + c) - L = c / (sqrt(L^2 + c) + L), free of cancellation
    c = R - 2.0
    q = c / (math.sqrt(L * L + c) + L)
    return q * q + 1.0


def simple_bound(delta: float) -> BoundReport:
    """The bound with every nonzero frequency dropped: ``R = 2/u``."""
    params = Params(delta, None)
    norm = kss_l2sq(params)
    L = compute_L(norm.value, norm.error)
    R = 2.0 / params.u
    bound = solve_bound(L, R)
    nominal = solve_bound(compute_L(norm.value), R)
    return BoundReport(
        delta=params.delta, u=params.u, n=None,
        kss_l2sq=norm.value, kss_l2sq_err=norm.error,
        min_g=None, min_g_err=None,
        L=L, L_err=L - compute_L(norm.value),
        R=R, R_err=0.0,
        bound=bound, error_budget=max(nominal - bound, 0.0),
        mode="simple",
    )


def full_bound(params: Params, grid: int = 10**6) -> BoundReport:
    """The full pipeline: ``||K||^2``, certified ``min G``, ``L``, ``R``, bound."""
    if params.n is None:
        raise ValueError("full bound needs n")
    kernel = KssKernel.build(params, J=params.n - 1)
    selberg = build_selberg(params, grid)
    L = compute_L(kernel.l2sq, kernel.l2sq_err)
    L_nominal = compute_L(kernel.l2sq)
    R, R_err = compute_R(params, selberg.min_on_quarter, kernel, selberg, with_error=True)
    R_nominal = compute_R(params, selberg.grid_min, kernel, selberg) + R_err
    bound = solve_bound(L, R)
    nominal = solve_bound(L_nominal, R_nominal)
    return BoundReport(
        delta=params.delta, u=params.u, n=params.n,
        kss_l2sq=kernel.l2sq, kss_l2sq_err=kernel.l2sq_err,
        min_g=selberg.min_on_quarter, min_g_err=selberg.min_gap,
        L=L, L_err=L - L_nominal,
        R=R, R_err=R_err,
        bound=bound, error_budget=max(nominal - bound, 0.0),
        mode="full",
    )


# -------------------------------------------------------------------- sweep


@dataclass
class SweepResult:
    reports: list[BoundReport] = field(default_factory=list)
    skipped: list[tuple[float, int, str]] = field(default_factory=list)

    @property
    def best(self) -> BoundReport | None:
        if not self.reports:
            return None
        # first maximal report in input order
        return max(self.reports, key=lambda r: r.bound)


def delta_grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be positive")
    if hi < lo:
        return []
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _sweep_point(args):
    delta, n, grid = args
    try:
        return full_bound(Params(delta, n), grid)
    except ValueError as exc:
        return str(exc)


def sweep(
    deltas: Iterable[float],
    ns: Iterable[int],
    grid: int = 10**5,
    workers: int = 1,
) -> SweepResult:
    """``full_bound`` over the grid ``deltas x ns`` in input order.

    Infeasible pairs (e.g. ``n <= 2u/(2u-1)``) are skipped and recorded.
    """
    points = [(float(d), int(n), grid) for d in deltas for n in ns]
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_point, points))
    else:
        outcomes = [_sweep_point(p) for p in points]
    result = SweepResult()
    for (d, n, _), out in zip(points, outcomes):
        if isinstance(out, str):
            log.info("skipping delta=%s n=%s: %s", d, n, out)
            result.skipped.append((d, n, out))
        else:
            result.reports.append(out)
    return result


def write_csv(reports: Iterable[BoundReport], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in r.csv_row()])
