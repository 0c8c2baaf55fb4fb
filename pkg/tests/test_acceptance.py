"""
Acceptance suite: one test per criterion, run with ``pytest -v`` to get one
PASSED/FAILED line each.  Tolerances and runtime limits are the contractual
ones; nothing here is loosened to make a criterion pass.
"""

import cmath
import math
import time

import numpy as np
import pytest

from freespec.boundary import (eigmethod_boundary, eigmethod_run, filter_isolated,
                               implicit_curve_eval, implicit_curve_scale, trace_boundary,
                               trace_ray)
from freespec.distributions import ArcsineShift, Cyclic
from freespec.freesum import (continue_parameters, criterion, free_convolution_moments,
                              phi_value, scalar_alternating_sum, solve_parameters,
                              symmetric_criterion)
from freespec.numkernel import ComplexPolynomial, bisect_crossing, poly_roots
from freespec.oracle import trace_moment
from freespec.selfadjoint import atom_mass, density
from freespec.twoop import factorization_check, feasible_t

pytestmark = pytest.mark.acceptance

U2V3 = (Cyclic(2), Cyclic(3))
# positive root of x^4 + 2x^3 - 3x^2 - 8x - 3, computed independently
# (mpmath, 30 digits: 1.97148320525579514...)
SPECTRAL_RADIUS = 1.9714832052557951


def test_ac01_spectral_radius_u2v3():
    t0 = time.perf_counter()
    smp = trace_ray(U2V3, 0.0)
    roots = poly_roots(ComplexPolynomial((-3, -8, -3, 2, 1)))
    elapsed = time.perf_counter() - t0
    rho = max(r.real for r in roots if abs(r.imag) < 1e-12)
    assert abs(smp.r - SPECTRAL_RADIUS) <= 1e-6
    assert abs(smp.r - 1.97148) <= 5e-6
    assert abs(rho - smp.r) <= 1e-8
    assert elapsed < 5


def test_ac02_implicit_curve_u2v3():
    # seen from 0 the two lobes hide 1/3 of the directions; from the interior
    # point 0.8 every ray meets the outer border
    t0 = time.perf_counter()
    curve = trace_boundary(U2V3, rays=360, center=0.8)
    elapsed = time.perf_counter() - t0
    assert len(curve.samples) >= 360
    for smp in curve.samples:
        x, y = smp.lam.real, smp.lam.imag
        assert abs(implicit_curve_eval(x, y)) <= 1e-6 * implicit_curve_scale(x, y)
    assert elapsed < 30


def test_ac03_isolated_solutions_not_in_spectrum():
    h = math.sqrt(3) / 2
    cands = [2, 0.5 + h * 1j, 0.5 - h * 1j, -1.5 + h * 1j, -1.5 - h * 1j]
    labels = [label for _, label, _ in filter_isolated(U2V3, cands)]
    assert labels == ["NotInSpectrum"] * 5


def test_ac04_moment_cross_validation():
    t0 = time.perf_counter()
    seqs = [[1 if k % m == 0 else 0 for k in range(11)] for m in (2, 3)]
    conv = free_convolution_moments(seqs, 10)
    words = [trace_moment((2, 3), p) for p in range(11)]
    elapsed = time.perf_counter() - t0
    assert conv == words
    assert conv[5] == 5
    assert elapsed < 10


def test_ac05_factorization_identity():
    rng = np.random.default_rng(5)
    worst = {}
    for m, n in [(2, 2), (2, 3), (3, 3), (2, 4)]:
        worst[m, n] = 0.0
        for _ in range(20):
            s = 0.6 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            res = factorization_check(m, n, s, feasible_t(m, n, s))
            worst[m, n] = max(worst[m, n], res)
    assert max(worst.values()) <= 1e-12, worst


def test_ac06_alternating_sum_identity():
    # sampler fixed in advance: n uniform in 1..5, x_i uniform in [0, 1],
    # kept when Phi <= 0.9
    rng = np.random.default_rng(6)
    errors = []
    while len(errors) < 1000:
        x = rng.uniform(0, 1, rng.integers(1, 6))
        if phi_value(x) > 0.9:
            continue
        trunc, closed = scalar_alternating_sum(x, N=60)
        errors.append(abs(trunc - closed) / closed)
    assert max(errors) <= 1e-9, (
        f"{sum(e > 1e-9 for e in errors)} of 1000 exceed 1e-9, worst {max(errors):.3g}")


def test_ac07_symmetric_function_equivalence():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        x = 10 ** rng.uniform(-2, 1, rng.integers(1, 6))
        s, e, (a, b) = symmetric_criterion(x)
        assert a == b
    # n = 2: solving Phi = 1 for x2 lands on x1 x2 = 1
    for x1 in 10 ** rng.uniform(-2, 2, 200):
        x2 = bisect_crossing(lambda v: phi_value((x1, v)) - 1, 1e-8, 1e8, 1e-13)
        assert abs(x1 * x2 - 1) <= 1e-10


def test_ac08_selfadjoint_pipeline():
    arc = ArcsineShift()
    for t in (0, 1, -1, 1.9, -1.9):
        exact = 1 / (math.pi * math.sqrt(4 - t * t))
        assert abs(density(arc, t).extrapolated - exact) <= 1e-3
    for t in (2.1, -2.1, 2.5, 3.0, -4.0):
        assert abs(density(arc, t).extrapolated) <= 1e-6
    for t in (1, -1):
        assert abs(atom_mass(Cyclic(2), t) - 0.5) <= 1e-8


def test_ac09_eigenvalue_method():
    xs = np.linspace(-2.85, 2.85, 10)
    grid = (xs[:, None] + 1j * xs[None, :]).ravel()
    assert grid.size == 100
    for res in eigmethod_run(grid):
        assert res.trace_error <= 1e-9
        assert np.all(res.residuals <= 1e-8)
    # with 64 rays a quarter turn shifts the ray index by 16
    r = np.array([rad for _, rad in eigmethod_boundary(rays=64)])
    assert np.all(np.isfinite(r))
    assert np.max(np.abs(r - np.roll(r, 16))) <= 1e-8 * np.max(r)


def test_ac10_three_summands_closed_curve():
    models = (Cyclic(2), Cyclic(3), Cyclic(4))
    curve = trace_boundary(models, rays=360)
    assert curve.closed and not curve.gaps
    for smp in curve.samples:
        assert smp.phi_residual <= 1e-7
    for theta in (0.0, math.pi):
        smp = curve.sample_at(theta)
        d = cmath.exp(1j * theta)
        outer = solve_parameters(models, (smp.r * (1 + 1e-6)) * d)
        inner = continue_parameters(models, outer, (smp.r * (1 - 1e-6)) * d)
        assert criterion(models, outer).phi - 1 < 0 < criterion(models, inner).phi - 1
