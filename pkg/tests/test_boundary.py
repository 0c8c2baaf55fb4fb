import cmath
import json
import math
import re
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from freespec import boundary
from freespec.boundary import (BoundaryGap, BoundarySample, curve_to_csv, curve_to_json,
                               curve_to_svg, eigmethod_boundary, eigmethod_run, filter_isolated,
                               implicit_curve_eval, implicit_curve_scale, load_data,
                               trace_boundary, trace_ray, uuivv_equations, uuivv_ms)
from freespec.distributions import ArcsineShift, Cyclic, parse_model, x_value
from freespec.errors import InvalidInput, PoleError
from freespec.numkernel import ComplexPolynomial, poly_roots

U2V3 = (Cyclic(2), Cyclic(3))
SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "boundary_curve.schema.json").read_text())


def quartic(x):
    return x**4 + 2 * x**3 - 3 * x**2 - 8 * x - 3


QUARTIC_REAL = sorted(r.real for r in poly_roots(ComplexPolynomial((-3, -8, -3, 2, 1)))
                      if abs(r.imag) < 1e-12)


@pytest.fixture(scope="module")
def curve64():
    return trace_boundary(U2V3, rays=64, center=0.8)


class TestImplicitCurve:
    def test_known_zeros(self):
        assert implicit_curve_eval(2, 0) == 0
        assert implicit_curve_eval(0, 0) == 0
        rho = QUARTIC_REAL[-1]
        assert abs(implicit_curve_eval(rho, 0)) <= 1e-8 * implicit_curve_scale(rho, 0)

    def test_axis_factorization(self):
        # P16(x, 0) = x^8 (x - 2)^4 (x^4 + 2x^3 - 3x^2 - 8x - 3)
        for x in (-1.7, -0.3, 0.4, 1.1, 2.6, 3.3):
            expected = x**8 * (x - 2) ** 4 * quartic(x)
            assert implicit_curve_eval(x, 0) == pytest.approx(expected, rel=1e-12)

    def test_conjugation_symmetry(self, rng):
        for x, y in rng.uniform(-2, 2, size=(20, 2)):
            assert implicit_curve_eval(x, y) == pytest.approx(implicit_curve_eval(x, -y), rel=1e-12)

    def test_data_checksums(self):
        import hashlib
        root = Path(boundary.__file__).parent / "data"
        manifest = json.loads((root / "MANIFEST.json").read_text())["sha256"]
        for name in ("p16_u2v3.json", "ms_uuivv.json"):
            assert hashlib.sha256((root / name).read_bytes()).hexdigest() == manifest[name]
            assert load_data(name)
        with pytest.raises(InvalidInput):
            load_data("MANIFEST.json")


class TestTraceRay:
    def test_spectral_radius(self):
        smp = trace_ray(U2V3, 0.0)
        assert isinstance(smp, BoundarySample)
        assert abs(smp.r - QUARTIC_REAL[-1]) < 1e-9

    def test_left_crossing(self):
        smp = trace_ray(U2V3, math.pi)
        assert abs(-smp.r - QUARTIC_REAL[0]) < 1e-9

    def test_two_operator_equality(self):
        smp = trace_ray(U2V3, 0.4)
        from freespec.freesum import solve_parameters
        s, t = solve_parameters(U2V3, smp.lam).s
        assert abs(abs(s) ** 2 * (abs(t) ** 2 + abs(t) ** 4) - 1) <= 1e-7

    def test_gap_direction(self):
        # from center 0 the vertical directions run between the two lobes
        gap = trace_ray(U2V3, math.pi / 2)
        assert isinstance(gap, BoundaryGap)

    def test_single_arcsine_degenerates(self):
        # empty interior: no Phi = 1 crossing off the real axis
        for theta in (0.5, math.pi / 2, 2.0):
            assert isinstance(trace_ray([ArcsineShift()], theta), BoundaryGap)

    def test_single_cyclic_reports_estimate(self):
        gap = trace_ray([Cyclic(2)], 0.0)
        assert isinstance(gap, BoundaryGap)
        assert gap.r_estimate == pytest.approx(1.0, abs=1e-3)


class TestTraceBoundary:
    def test_closed(self, curve64):
        assert curve64.closed and not curve64.gaps
        assert curve64.certified_spectrum

    def test_sample_invariants(self, curve64):
        thetas = [s.theta for s in curve64.samples]
        assert all(a < b for a, b in zip(thetas, thetas[1:]))
        assert 0 <= thetas[0] and thetas[-1] < 2 * math.pi
        for smp in curve64.samples:
            assert smp.phi_residual <= 1e-8
            assert smp.solver_residual <= 1e-9
            assert abs(smp.lam - (curve64.center + smp.r * cmath.exp(1j * smp.theta))) < 1e-12

    def test_implicit_equation(self, curve64):
        for smp in curve64.samples:
            x, y = smp.lam.real, smp.lam.imag
            assert abs(implicit_curve_eval(x, y)) <= 1e-6 * implicit_curve_scale(x, y)

    def test_conjugation_symmetry(self, curve64):
        n = curve64.rays
        for k in range(1, n // 2):
            a = curve64.samples[k].lam
            b = curve64.samples[n - k].lam
            assert abs(a - b.conjugate()) < 1e-9

    def test_threads_do_not_change_result(self):
        a = trace_boundary(U2V3, rays=16, center=0.8)
        b = trace_boundary(U2V3, rays=16, center=0.8, threads=4)
        assert curve_to_json(a) == curve_to_json(b)

    def test_center_zero_has_gaps(self):
        c = trace_boundary(U2V3, rays=16)
        assert not c.closed and c.gaps
        assert all(abs(math.cos(g.theta)) < 0.5 for g in c.gaps)

    def test_too_few_rays(self):
        with pytest.raises(InvalidInput):
            trace_boundary(U2V3, rays=8)

    def test_three_summands_are_outer_bounds(self):
        c = trace_boundary((Cyclic(2), Cyclic(3), Cyclic(4)), rays=16)
        assert c.closed and not c.certified_spectrum


class TestFilterIsolated:
    def test_isolated_points(self):
        r3 = math.sqrt(3) / 2
        cands = [2, 0.5 + r3 * 1j, 0.5 - r3 * 1j, -1.5 + r3 * 1j, -1.5 - r3 * 1j]
        for lam, label, phi in filter_isolated(U2V3, cands):
            assert label == "NotInSpectrum"
            assert phi < 1

    def test_point_on_curve(self):
        rho = QUARTIC_REAL[-1]
        ((lam, label, phi),) = filter_isolated(U2V3, [rho])
        assert label != "NotInSpectrum"
        assert abs(phi - 1) < 1e-6

    def test_double_point(self):
        ((lam, label, phi),) = filter_isolated(U2V3, [0])
        assert label == "Undetermined"


@pytest.fixture(scope="module")
def grid():
    rng = np.random.default_rng(7)
    return rng.uniform(-3, 3, 100) + 1j * rng.uniform(-3, 3, 100)


class TestEigMethod:
    def test_poles(self):
        with pytest.raises(PoleError):
            uuivv_ms(0)
        # roots of z^4 + 24 z^2 + 16 lie on the imaginary axis
        w = cmath.sqrt(-12 + math.sqrt(128))
        with pytest.raises(PoleError):
            uuivv_ms(w)

    def test_trace_identity(self, grid):
        for res in eigmethod_run(grid):
            assert res.trace_error <= 1e-9

    def test_back_substitution(self, grid):
        results = eigmethod_run(grid)
        assert sum(int(r.admissible.sum()) for r in results) >= 100
        for res in results:
            for ok, r in zip(res.admissible, res.residuals):
                if ok:
                    assert r <= 1e-8
            for (s, t, f, g), ok in zip(res.points, res.admissible):
                if ok:
                    assert np.max(np.abs(uuivv_equations(res.z, s, t, f, g))) <= 1e-8

    def test_rotation_invariance(self):
        pts = eigmethod_boundary(rays=32)
        r = np.array([p[1] for p in pts])
        assert np.all(np.isfinite(r))
        assert np.max(np.abs(r - np.roll(r, 8))) <= 1e-9

    def test_matches_newton_tracer(self):
        models = parse_model("arcsine+rot:0,1:(arcsine)")
        for theta, r in eigmethod_boundary(rays=16)[:4]:
            smp = trace_ray(models, theta)
            assert abs(smp.r - r) < 1e-8


class TestWriters:
    def test_csv(self, curve64):
        text = curve_to_csv(curve64)
        lines = text.splitlines()
        assert lines[0] == "theta,r,x,y,phi_residual,solver_residual"
        assert len(lines) == 65
        theta, r, x, y, *_ = map(float, lines[1].split(","))
        assert (theta, r) == (curve64.samples[0].theta, curve64.samples[0].r)

    def test_json_schema(self, curve64):
        doc = json.loads(curve_to_json(curve64))
        jsonschema.validate(doc, SCHEMA)
        assert doc["closed"] and len(doc["samples"]) == 64

    def test_json_schema_with_gaps(self):
        c = trace_boundary([Cyclic(2)], rays=16)
        doc = json.loads(curve_to_json(c))
        jsonschema.validate(doc, SCHEMA)
        assert len(doc["gaps"]) == 16

    def test_svg(self, curve64):
        svg = curve_to_svg(curve64)
        assert svg.startswith("<?xml")
        assert svg.count("<polygon") + svg.count("<polyline") == 1
        assert "href" not in svg
        vb = [float(v) for v in re.search(r'viewBox="([^"]+)"', svg).group(1).split()]
        xs = [s.lam.real for s in curve64.samples]
        width = max(xs) - min(xs)
        assert vb[0] == pytest.approx(min(xs) - 0.05 * width, rel=1e-5)
        numbers = re.findall(r"-?\d+\.\d+", svg.split("points=")[1].split('"')[1])
        assert all(len(n.replace("-", "").replace(".", "").lstrip("0")) <= 6 for n in numbers)

    def test_svg_splits_components(self):
        c = trace_boundary(U2V3, rays=16)
        assert curve_to_svg(c).count("<polyline") == 2

    def test_deterministic(self):
        a = trace_boundary(U2V3, rays=16, center=0.8)
        b = trace_boundary(U2V3, rays=16, center=0.8)
        assert curve_to_csv(a) == curve_to_csv(b)
        assert curve_to_json(a) == curve_to_json(b)
        assert curve_to_svg(a) == curve_to_svg(b)
