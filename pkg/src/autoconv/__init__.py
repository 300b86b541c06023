"""Lower bounds for the sup-norm of autoconvolutions of pdfs.

Submodules: ``specfun`` (Bessel, elliptic, quadrature), ``stepfn`` (exact step
and piecewise-linear arithmetic), ``kernels`` (K_ss and the Selberg function),
``bound`` (the constant), ``lemmas`` (numerical check of each inequality),
``discrete`` (corollaries for integer sets and polynomials), ``extremal``
(the function h and conjecture probes) and ``cli``.
"""

from .bound import BoundReport, full_bound, simple_bound, solve_bound
from .kernels import Params
from .stepfn import PiecewiseLinear, StepFunction

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Params",
    "PiecewiseLinear",
    "StepFunction",
    "full_bound",
    "simple_bound",
    "solve_bound",
]
