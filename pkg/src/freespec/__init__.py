"""
freespec: spectra of sums of free operators.

The outer border of the spectrum of ``a_1 + ... + a_n`` for *-free
summands is located through an L2 resolvent criterion evaluated on the
analytic parametrization of free additive convolution.  Modules:

numkernel      polynomial roots, dense eigenvalues, Newton, bisection
distributions  operator models (cyclic generators, arcsine, rotations, moments)
selfadjoint    density, atoms and resolvent norms from the Cauchy transform
freesum        parameter solver, criterion, free convolution of moments
twoop          the two-summand (s, t) parametrization
boundary       boundary tracing, isolated points, eigenvalue method, writers
oracle         exact group-algebra arithmetic for Z_n1 * ... * Z_nk
"""

from .distributions import (ArcsineShift, Cyclic, FreeSumModel, MomentSeries, Rotated,
                            format_model, parse_model)
from .errors import FreeSpecError
from .freesum import (Classification, criterion, free_convolution_moments, solve_parameters)
from .boundary import filter_isolated, trace_boundary, trace_ray

__version__ = "0.1.0"

__all__ = [
    "ArcsineShift", "Cyclic", "FreeSumModel", "MomentSeries", "Rotated",
    "format_model", "parse_model", "FreeSpecError", "Classification", "criterion",
    "free_convolution_moments", "solve_parameters", "filter_isolated",
    "trace_boundary", "trace_ray",
]
