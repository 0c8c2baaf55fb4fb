import cmath
import math

import numpy as np
import pytest

from freespec.boundary import trace_ray
from freespec.distributions import ArcsineShift, Cyclic, Rotated, x_value
from freespec.errors import ConstraintError, DegenerateError, InvalidInput
from freespec.freesum import Classification, continue_parameters, criterion, solve_parameters
from freespec.twoop import (classify_two, factorization_check, feasible_t, lambda_of_st,
                            product_spectral_radius)

U2, V3 = Cyclic(2), Cyclic(3)


def random_s(rng, n, radius=0.6):
    r = radius * np.sqrt(rng.uniform(size=n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


class TestLambda:
    def test_u2v3_linear_relation(self, rng):
        for s in random_s(rng, 50):
            t = feasible_t(2, 3, s)
            st = lambda_of_st(U2, V3, s, t)
            assert abs(st.lam - (1 / t + s)) <= 1e-10 * max(1, abs(st.lam))

    def test_equal_parameters(self):
        st = lambda_of_st(U2, U2, 0.1, 0.1)
        assert st.lam == pytest.approx(10.1, abs=1e-12)
        assert st.f == st.g

    def test_near_infinity(self):
        for s in (1e-2, 1e-4, 1e-6):
            st = lambda_of_st(U2, V3, s, feasible_t(2, 3, s))
            assert abs(st.t) < 2 * s
            assert abs(st.lam) > 0.5 / s

    def test_constraint(self):
        with pytest.raises(ConstraintError):
            lambda_of_st(U2, V3, 0.1, 0.2)

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            lambda_of_st(U2, V3, 0, 0)

    def test_state_invariants(self, rng):
        for s in random_s(rng, 20):
            st = lambda_of_st(U2, V3, s, feasible_t(2, 3, s))
            assert abs(st.s * st.f - st.t * st.g) <= st.residual + 1e-16
            assert abs(st.lam - (1 / st.s + 1 / st.t - 1 / (st.s * st.f))) <= 1e-10 * abs(st.lam)


class TestClassify:
    def test_small_pair_outside(self):
        s = 0.1
        t = feasible_t(2, 3, s)
        assert abs(x_value(U2, s) * x_value(V3, t) - abs(s) ** 2 * (abs(t) ** 2 + abs(t) ** 4)) < 1e-16
        assert classify_two(U2, V3, s, t) is Classification.OUTSIDE

    def test_boundary_pair(self):
        smp = trace_ray((U2, V3), 0.7)
        state = solve_parameters((U2, V3), smp.lam)
        s, t = state.s
        assert classify_two(U2, V3, s, t) is Classification.BOUNDARY
        xs, xt = abs(s) ** 2, abs(t) ** 2 + abs(t) ** 4
        assert abs(xs * xt - 1) <= 1e-7

    def test_symmetry(self, rng):
        for s in random_s(rng, 100, radius=1.2):
            try:
                t = feasible_t(2, 3, s)
                a = classify_two(U2, V3, s, t)
            except (ConstraintError, DegenerateError):
                continue
            assert a is classify_two(V3, U2, t, s)

    def test_agrees_with_criterion(self):
        # march towards the border along rays, comparing both classifications
        models = (U2, V3)
        compared = 0
        for k in range(20):
            theta = 2 * math.pi * (k + 0.25) / 20
            # from an interior center every ray meets the border
            smp = trace_ray(models, theta, center=0.8)
            d = cmath.exp(1j * theta)
            state = solve_parameters(models, 0.8 + (smp.r + 0.1) * d)
            for r in np.linspace(smp.r + 0.1, smp.r, 60):
                state = continue_parameters(models, state, 0.8 + r * d)
                rep = criterion(models, state)
                assert classify_two(U2, V3, *state.s) is rep.classification
                compared += 1
        assert compared >= 1000

    def test_arcsine_pair(self):
        a, b = ArcsineShift(), Rotated(ArcsineShift(), 1j)
        state = solve_parameters((a, b), 3 + 2j)
        rep = criterion((a, b), state)
        assert classify_two(a, b, *state.s) is rep.classification


class TestSpectralRadius:
    def test_haar_unitaries(self):
        assert product_spectral_radius(1, 1) == 1

    def test_scaling(self):
        assert product_spectral_radius(4, 0.25) == 1

    def test_negative(self):
        with pytest.raises(InvalidInput):
            product_spectral_radius(-1, 1)

    def test_boundary_equality(self):
        smp = trace_ray((U2, V3), 1.1, center=0.8)
        s, t = solve_parameters((U2, V3), smp.lam).s
        f, g = U2.mgf(s), V3.mgf(t)
        na = x_value(U2, s) * abs(f) ** 2
        nb = x_value(V3, t) * abs(g) ** 2
        assert product_spectral_radius(na, nb) == pytest.approx(abs(f * g), rel=1e-7)


class TestFactorization:
    @pytest.mark.parametrize("mn", [(2, 2), (2, 3), (3, 3), (2, 4)])
    def test_random_pairs(self, mn, rng):
        m, n = mn
        for s in random_s(rng, 20):
            t = feasible_t(m, n, s)
            assert factorization_check(m, n, s, t) <= 1e-12

    def test_equal_pair(self):
        assert factorization_check(2, 2, 0.3, 0.3) <= 1e-12

    def test_infeasible_pair(self):
        with pytest.raises(ConstraintError):
            factorization_check(2, 3, 0.3, 0.3)

    def test_root_of_unity(self):
        with pytest.raises(ConstraintError):
            factorization_check(2, 2, 1, 1)

    def test_feasible_t_branch(self):
        assert feasible_t(2, 3, 0) == 0
        t = feasible_t(2, 3, 1e-3)
        assert abs(t - 1e-3) < 1e-8
