"""
Walk through the spectrum of u2 + v3, the sum of free generators of
orders 2 and 3 (the random walk operator of the modular group, up to scale).

Run from the repository root:  python demos/u2_plus_v3.py
Writes u2_plus_v3.svg to the current directory.
"""
import cmath
import math

import numpy as np

from freespec import Cyclic, solve_parameters, criterion, filter_isolated, trace_boundary
from freespec.boundary import curve_to_svg, implicit_curve_eval, implicit_curve_scale, trace_ray
from freespec.numkernel import ComplexPolynomial, poly_roots

models = (Cyclic(2), Cyclic(3))

# %% far from the origin every point is outside: Phi < 1
for lam in (5, 3j, -4 + 1j):
    rep = criterion(models, solve_parameters(models, lam))
    print(f"lambda={lam!s:>10}  Phi={rep.phi:.6f}  {rep.classification.value}")

# %% spectral radius: the crossing on the positive real axis
smp = trace_ray(models, 0.0)
roots = poly_roots(ComplexPolynomial((-3, -8, -3, 2, 1)))   # x^4 + 2x^3 - 3x^2 - 8x - 3
rho = max(r.real for r in roots if abs(r.imag) < 1e-12)
print("tracer    ", smp.r)
print("quartic   ", rho)

# %% the whole outer border.  From 0 some rays run into the gaps between the
# lobes, so the rays start from 0.8, which sees every part of the border.
curve = trace_boundary(models, rays=360, center=0.8)
print(len(curve.samples), "samples, closed:", curve.closed)
worst = max(abs(implicit_curve_eval(s.lam.real, s.lam.imag))
            / implicit_curve_scale(s.lam.real, s.lam.imag) for s in curve.samples)
print("worst relative residual of the degree-16 implicit curve:", worst)

# %% the polynomial system has extra solutions that are not in the spectrum
h = math.sqrt(3) / 2
for lam, label, phi in filter_isolated(models, [2, 0.5 + h * 1j, -1.5 + h * 1j]):
    print(f"{lam!s:>24}  {label}  Phi={phi:.4f}")

with open("u2_plus_v3.svg", "w") as fh:
    fh.write(curve_to_svg(curve))
print("wrote u2_plus_v3.svg")
