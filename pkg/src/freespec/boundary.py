"""
Outer border of the spectrum of a free sum.

Rays are cast from a center point.  Along each ray the parameter branch is
continued inward from outside the norm bound and the first radius where
``Phi`` reaches 1 is located by bisection.  Continuation breakdown (pole or
branch point of the parameter system) counts as "not certified outside",
so the reported radius is always an outer bound.

Also here: the isolated-solution filter, the multiplication-matrix
eigenvalue method for ``u + u* + i(v + v*)``, the implicit degree-16
curve of ``u2 + v3`` and the CSV / JSON / SVG writers.
"""

from __future__ import annotations

import cmath
import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Optional, Sequence

import numpy as np

from .distributions import ArcsineShift, Rotated, format_model, x_value
from .errors import (DegenerateError, FreeSpecError, InvalidInput,
                     NumericFailure, PoleError)
from .freesum import (BOUNDARY_BAND, Classification, ParameterState,
                      _fresh, _models, continue_parameters, criterion,
                      outer_radius, phi_value, solve_parameters)
from .numkernel import _bisect, bisect_crossing, eig_dense_left

__all__ = [
    "BoundarySample", "BoundaryGap", "BoundaryCurve", "trace_boundary",
    "trace_ray", "filter_isolated", "EigMethodResult", "eigmethod_run",
    "eigmethod_boundary", "uuivv_ms", "uuivv_equations", "UUIVV_MODELS",
    "implicit_curve_eval", "implicit_curve_scale", "load_data",
    "curve_to_csv", "curve_to_json", "curve_to_svg",
]

SOLVER_RESIDUAL_MAX = 1e-9


# ---------------------------------------------------------------------------
# data files


@lru_cache(maxsize=None)
def load_data(name: str) -> dict:
    """Load a bundled data file after checking it against the manifest."""
    root = resources.files("freespec") / "data"
    manifest = json.loads((root / "MANIFEST.json").read_text())
    raw = (root / name).read_bytes()
    expected = manifest["sha256"].get(name)
    if expected is None:
        raise InvalidInput(f"{name} is not listed in the data manifest")
    if hashlib.sha256(raw).hexdigest() != expected:
        raise InvalidInput(f"checksum mismatch for data file {name}")
    return json.loads(raw)


def _p16_terms():
    return load_data("p16_u2v3.json")["terms"]


@lru_cache(maxsize=None)
def _p16_table():
    terms = _p16_terms()
    deg = max(i + j for i, j, _ in terms)
    C = np.zeros((deg + 1, deg + 1))
    for i, j, c in terms:
        C[i, j] = c
    return C


def implicit_curve_eval(x: float, y: float) -> float:
    """Degree-16 polynomial whose zero set contains the border of ``sigma(u2 + v3)``.

    Horner in ``y`` for every power of ``x``, then Horner in ``x``.
    """
    C = _p16_table()
    acc = 0.0
    for i in range(C.shape[0] - 1, -1, -1):
        row = 0.0
        for j in range(C.shape[1] - 1, -1, -1):
            row = row * y + C[i, j]
        acc = acc * x + row
    return float(acc)


def implicit_curve_scale(x: float, y: float) -> float:
    """``sum |c_ij x^i y^j|``, the rounding scale of :func:`implicit_curve_eval`."""
    return float(sum(abs(c * x**i * y**j) for i, j, c in _p16_terms()))


# ---------------------------------------------------------------------------
# tracing


@dataclass(frozen=True)
class BoundarySample:
    theta: float
    r: float
    lam: complex
    phi_residual: float
    solver_residual: float


@dataclass(frozen=True)
class BoundaryGap:
    theta: float
    reason: str
    r_estimate: Optional[float] = None


@dataclass
class BoundaryCurve:
    center: complex
    rays: int
    samples: list
    gaps: list
    model: str = ""
    certified_spectrum: bool = True

    @property
    def closed(self) -> bool:
        return not self.gaps and len(self.samples) == self.rays

    def sample_at(self, theta: float) -> Optional[BoundarySample]:
        for smp in self.samples:
            if abs(smp.theta - theta) < 1e-12:
                return smp
        return None


def _phi(models, state, form):
    return criterion(models, state, form=form).phi


def trace_ray(models, theta: float, center: complex = 0j, rtol: float = 1e-12,
              form: str = "standard", step_fraction: float = 0.02):
    """Outer crossing of ``Phi = 1`` along one ray; returns a sample or a gap."""
    models = _models(models)
    direction = cmath.exp(1j * theta)
    R = outer_radius(models) + abs(center)
    h = step_fraction * R

    def lam_at(r):
        return center + r * direction

    try:
        state = _fresh(models, lam_at(R))
        phi_prev = _phi(models, state, form)
    except FreeSpecError as exc:
        return BoundaryGap(theta, f"no start on the outer circle: {exc}")
    r_prev = R
    k = 1
    hit = None
    while R - k * h > 0.5 * h:
        r = R - k * h
        k += 1
        try:
            nxt = continue_parameters(models, state, lam_at(r))
            phi = _phi(models, nxt, form)
        except FreeSpecError:
            hit = (r, 1.0)
            break
        if phi >= 1.0:
            hit = (r, phi - 1.0)
            break
        state, r_prev, phi_prev = nxt, r, phi
    if hit is None:
        return BoundaryGap(theta, "no crossing of Phi = 1 before the center")

    best = {"r": r_prev, "state": state, "phi": phi_prev}

    def g(r):
        try:
            st = continue_parameters(models, best["state"], lam_at(r))
            val = _phi(models, st, form)
        except FreeSpecError:
            return 1.0
        if val < 1.0 and r < best["r"]:
            best.update(r=r, state=st, phi=val)
        return val - 1.0

    xtol = rtol * max(r_prev, 1.0)
    _bisect(g, hit[0], r_prev, xtol, ga=hit[1], gb=phi_prev - 1.0)
    st, phi = best["state"], best["phi"]
    if abs(phi - 1.0) > BOUNDARY_BAND:
        return BoundaryGap(theta, f"continuation breakdown before Phi = 1 (Phi = {phi:.6g})",
                           float(best["r"]))
    if st.residual > SOLVER_RESIDUAL_MAX:
        return BoundaryGap(theta, f"solver residual {st.residual:.3g}", float(best["r"]))
    return BoundarySample(float(theta), float(best["r"]), complex(st.lam),
                          float(abs(phi - 1.0)), float(st.residual))


def trace_boundary(models, rays: int = 360, center: complex = 0j, rtol: float = 1e-12,
                   form: str = "standard", threads: Optional[int] = None) -> BoundaryCurve:
    """Trace the outer border of the spectrum on ``rays`` equally spaced rays."""
    models = _models(models)
    if rays < 16:
        raise InvalidInput("need at least 16 rays")
    thetas = [2 * math.pi * k / rays for k in range(rays)]

    def one(theta):
        return trace_ray(models, theta, complex(center), rtol, form)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, thetas))
    else:
        results = [one(t) for t in thetas]
    samples = [r for r in results if isinstance(r, BoundarySample)]
    gaps = [r for r in results if isinstance(r, BoundaryGap)]
    return BoundaryCurve(complex(center), rays, samples, gaps, format_model(models),
                         certified_spectrum=len(models) <= 2)


def filter_isolated(models, candidates) -> list:
    """Decide which candidate points are outside the spectrum.

    Each candidate is reached by continuation along its ray from outside the
    norm bound.  Returns ``(lambda, label, phi)`` with label one of
    ``NotInSpectrum``, ``Boundary`` or ``Undetermined``.
    """
    models = _models(models)
    out = []
    for lam in candidates:
        lam = complex(lam)
        try:
            st = solve_parameters(models, lam)
            rep = criterion(models, st)
        except FreeSpecError:
            out.append((lam, "Undetermined", math.nan))
            continue
        label = {Classification.OUTSIDE: "NotInSpectrum",
                 Classification.BOUNDARY: "Boundary"}.get(rep.classification, "Undetermined")
        out.append((lam, label, rep.phi))
    return out


# ---------------------------------------------------------------------------
# eigenvalue method for u + u* + i(v + v*)

UUIVV_MODELS = (ArcsineShift(), Rotated(ArcsineShift(), 1j))


def _polyval(c, z):
    acc = 0j
    for a in reversed(c):
        acc = acc * z + a
    return acc


def uuivv_ms(z) -> np.ndarray:
    """Matrix of multiplication by ``[s]`` in the basis ``([g], [f], [t], [1])``."""
    z = complex(z)
    entries = load_data("ms_uuivv.json")["entries"]
    M = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(entries):
        for j, e in enumerate(row):
            den = _polyval(e["den"], z)
            scale = sum(abs(c) * max(1.0, abs(z)) ** k for k, c in enumerate(e["den"]))
            if abs(den) <= 1e-13 * scale:
                raise PoleError(f"z = {z} is a pole of the multiplication matrix")
            M[i, j] = _polyval(e["num"], z) / den
    return M


def uuivv_equations(lam, s, t, f, g) -> np.ndarray:
    return np.array([lam * s * f - f - g + 1,
                     s * f - t * g,
                     f * f * (1 - 4 * s * s) - 1,
                     g * g * (1 + 4 * t * t) - 1])


@dataclass
class EigMethodResult:
    z: complex
    eigenvalues: np.ndarray
    points: list            # recovered (s, t, f, g) per eigenvalue
    residuals: np.ndarray
    admissible: np.ndarray
    on_branch: np.ndarray
    phi: np.ndarray
    trace_error: float


def _recover_from_s(lam, s):
    # fallback when the [1]-coordinate of the eigenvector vanishes
    best = None
    for sign in (1, -1):
        f = sign / cmath.sqrt(1 - 4 * s * s)
        g = lam * s * f - f + 1
        if g == 0:
            continue
        t = s * f / g
        res = np.max(np.abs(uuivv_equations(lam, s, t, f, g)))
        if best is None or res < best[0]:
            best = (res, (s, t, f, g))
    return best[1]


def _on_branch(models, s, t, f, g, tol=1e-6):
    a, b = models
    try:
        fa, gb = a.mgf(s), b.mgf(t)
    except (PoleError, ZeroDivisionError):
        return False
    return abs(f - fa) <= tol * abs(fa) and abs(g - gb) <= tol * abs(gb)


def eigmethod_run(z_grid, M: Callable = uuivv_ms, equations: Callable = uuivv_equations,
                  models=UUIVV_MODELS, tol: float = 1e-8) -> list:
    """Solve the polynomial system at every ``z`` through eigenvalues of ``M(z)``.

    Eigenvalues of ``M(z)`` are the ``s``-coordinates of the solutions; the
    left eigenvector normalized on its ``[1]`` entry gives ``(g, f, t)``.
    A point is admissible when all equations hold to ``tol`` and on-branch
    when ``f``, ``g`` agree with the models' moment generating functions.
    """
    results = []
    for z in z_grid:
        z = complex(z)
        A = M(z)
        w, V = eig_dense_left(A)
        points, res, adm, onb, phis = [], [], [], [], []
        for k, s in enumerate(w):
            v = V[:, k]
            if abs(v[3]) > 1e-10 * np.max(np.abs(v)):
                g, f, t = v[0] / v[3], v[1] / v[3], v[2] / v[3]
                pt = (complex(s), complex(t), complex(f), complex(g))
            else:
                pt = _recover_from_s(z, complex(s))
            r = float(np.max(np.abs(equations(z, *pt))))
            ok = r <= tol
            branch = ok and _on_branch(models, *pt)
            if branch:
                xa, xb = x_value(models[0], pt[0]), x_value(models[1], pt[1])
                phis.append(phi_value((xa, xb)))
            else:
                phis.append(math.nan)
            points.append(pt)
            res.append(r)
            adm.append(ok)
            onb.append(branch)
        trace_err = float(abs(np.trace(A) - np.sum(w)))
        results.append(EigMethodResult(z, np.asarray(w), points, np.asarray(res),
                                       np.asarray(adm), np.asarray(onb), np.asarray(phis),
                                       trace_err))
    return results


def _eig_phi_margin(z, **kw):
    (res,) = eigmethod_run([z], **kw)
    vals = res.phi[res.on_branch]
    if vals.size == 0:
        return 1.0
    return float(np.min(vals) - 1.0)


def eigmethod_boundary(rays: int = 64, offset: float = 0.5, r_out: Optional[float] = None,
                       xtol: float = 1e-10, step_fraction: float = 0.02, **kw) -> list:
    """Outer border of ``u + u* + i(v + v*)`` from the eigenvalue method.

    A point counts as outside when some on-branch solution has ``Phi < 1``.
    Ray angles are ``2 pi (k + offset) / rays``; the default offset keeps the
    rays off the coordinate axes, where the matrix has its poles.
    """
    models = kw.get("models", UUIVV_MODELS)
    R = outer_radius(models) if r_out is None else r_out
    h = step_fraction * R
    out = []
    for k in range(rays):
        theta = 2 * math.pi * (k + offset) / rays
        d = cmath.exp(1j * theta)
        prev = R
        radius = math.nan
        r = R - h
        while r > 0.5 * h:
            if _eig_phi_margin(r * d, **kw) >= 0:
                radius = bisect_crossing(lambda q: _eig_phi_margin(q * d, **kw), r, prev, xtol)
                break
            prev = r
            r -= h
        out.append((theta, radius))
    return out


# ---------------------------------------------------------------------------
# writers

CSV_HEADER = ["theta", "r", "x", "y", "phi_residual", "solver_residual"]


def curve_to_csv(curve: BoundaryCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for smp in curve.samples:
        w.writerow([repr(smp.theta), repr(smp.r), repr(smp.lam.real), repr(smp.lam.imag),
                    repr(smp.phi_residual), repr(smp.solver_residual)])
    return buf.getvalue()


def curve_to_json(curve: BoundaryCurve) -> str:
    doc = {
        "model": curve.model,
        "center": [curve.center.real, curve.center.imag],
        "rays": curve.rays,
        "closed": curve.closed,
        "certified_spectrum": curve.certified_spectrum,
        "samples": [{"theta": s.theta, "r": s.r, "x": s.lam.real, "y": s.lam.imag,
                     "phi_residual": s.phi_residual, "solver_residual": s.solver_residual}
                    for s in curve.samples],
        "gaps": [{"theta": g.theta, "reason": g.reason, "r_estimate": g.r_estimate}
                 for g in curve.gaps],
    }
    return json.dumps(doc, indent=1) + "\n"


def _components(curve: BoundaryCurve) -> list:
    by_index = {round(s.theta * curve.rays / (2 * math.pi)): s for s in curve.samples}
    comps, cur = [], []
    for k in range(curve.rays):
        smp = by_index.get(k)
        if smp is None:
            if cur:
                comps.append(cur)
            cur = []
        else:
            cur.append(smp)
    if cur:
        if comps and 0 in by_index and (curve.rays - 1) in by_index:
            comps[0] = cur + comps[0]
        else:
            comps.append(cur)
    return comps


def curve_to_svg(curve: BoundaryCurve, size: int = 600) -> str:
    """Self-contained SVG, one polyline per connected run of samples."""
    comps = _components(curve)
    pts = [(s.lam.real, -s.lam.imag) for s in curve.samples]
    if pts:
        xs, ys = zip(*pts)
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0 = y0 = -1.0
        x1 = y1 = 1.0
    w, h = max(x1 - x0, 1e-9), max(y1 - y0, 1e-9)
    mx, my = 0.05 * w, 0.05 * h
    vb = f"{x0 - mx:.6g} {y0 - my:.6g} {w + 2 * mx:.6g} {h + 2 * my:.6g}"
    stroke = 0.003 * max(w, h)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{vb}" preserveAspectRatio="xMidYMid meet">',
        f'<title>{curve.model}</title>',
    ]
    closed = curve.closed
    for comp in comps:
        coords = [(s.lam.real, -s.lam.imag) for s in comp]
        if closed:
            coords.append(coords[0])
        body = " ".join(f"{x:.6g},{y:.6g}" for x, y in coords)
        lines.append(f'<polyline fill="none" stroke="black" stroke-width="{stroke:.6g}" '
                     f'points="{body}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
