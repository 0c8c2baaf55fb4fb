"""
Command line front end.

    freespec trace --model cyclic:2+cyclic:3 --rays 720 --out c.csv --svg c.svg
    freespec classify --model cyclic:2+cyclic:3 --lambda 2
    freespec moments --model cyclic:2+cyclic:3 --order 10 --check-oracle

Exit codes: 0 ok, 1 numeric failure, 2 partial result (gaps), 64 usage.
Complex numbers are written ``a+bi`` / ``a-bi`` without spaces.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import math
import sys

import numpy as np

from . import boundary, freesum, oracle, selfadjoint, twoop
from .distributions import Cyclic, parse_model
from .errors import CapError, CapacityError, FreeSpecError, InvalidInput, PoleError

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_GAPS = 2
EXIT_USAGE = 64

class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"1.5-2i"`` -> ``(1.5-2j)``; plain reals and pure imaginaries work too."""
    t = text.strip()
    if not t or any(c in t for c in " jJ"):
        raise UsageError(f"not a complex literal: {text!r}")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        z = complex(t)
    except ValueError:
        raise UsageError(f"not a complex literal: {text!r}") from None
    if not cmath.isfinite(z):
        raise UsageError(f"not a finite number: {text!r}")
    return z


def format_complex(z: complex, digits: int = 12) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and math.copysign(1, z.imag) < 0) else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model(text):
    try:
        return parse_model(text)
    except InvalidInput as exc:
        raise UsageError(f"bad model string {text!r}: {exc}") from exc


def _grid(text, default):
    """``a:b:n`` -> n equispaced points, or a comma separated list."""
    if text is None:
        text = default
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_trace(args):
    models = _model(args.model)
    center = parse_complex(args.center)
    if args.rays < 16:
        raise UsageError("--rays must be at least 16")
    curve = boundary.trace_boundary(models, rays=args.rays, center=center,
                                    rtol=args.tol, form=args.form, threads=args.threads)
    _emit(boundary.curve_to_csv(curve), args.out)
    if args.json:
        _emit(boundary.curve_to_json(curve), args.json)
    if args.svg:
        _emit(boundary.curve_to_svg(curve), args.svg)
    label = "spectrum border" if curve.certified_spectrum else "certified outer bound"
    print(f"# {len(curve.samples)} samples, {len(curve.gaps)} gaps ({label})", file=sys.stderr)
    for g in curve.gaps[:10]:
        print(f"# gap theta={g.theta!r}: {g.reason}", file=sys.stderr)
    if len(curve.gaps) > 10:
        print(f"# ... {len(curve.gaps) - 10} more gaps", file=sys.stderr)
    return EXIT_GAPS if curve.gaps else EXIT_OK


def cmd_radius(args):
    models = _model(args.model)
    status = EXIT_OK
    for name, theta in (("theta=0", 0.0), ("theta=pi", math.pi)):
        res = boundary.trace_ray(models, theta, rtol=args.tol, form=args.form)
        if isinstance(res, boundary.BoundarySample):
            print(f"{name} {res.r!r}")
        elif res.r_estimate is not None:
            # the support is hit without a Phi = 1 crossing (e.g. one summand)
            print(f"{name} {res.r_estimate:.8g} (estimate: {res.reason})")
        else:
            print(f"{name} none ({res.reason})")
            status = EXIT_GAPS
    return status


def cmd_classify(args):
    models = _model(args.model)
    lam = parse_complex(args.lam)
    try:
        state = freesum.solve_parameters(models, lam)
    except FreeSpecError as exc:
        print(f"lambda={format_complex(lam)} {freesum.Classification.UNDETERMINED.value}")
        print(f"reason: {exc}")
        return EXIT_OK
    rep = freesum.criterion(models, state, form=args.form)
    print(f"lambda={format_complex(lam)} {rep.classification.value}")
    print(f"Phi={rep.phi!r}")
    print(f"z={format_complex(state.z)}")
    for i, s in enumerate(state.s):
        print(f"s{i + 1}={format_complex(s)} x{i + 1}={rep.x[i]!r}")
    if rep.classification is freesum.Classification.OUTSIDE:
        print(f"l2_norm_sq={rep.l2_norm_sq!r}")
    return EXIT_OK


def _single(models, what):
    if len(models) != 1:
        raise UsageError(f"{what} works on a single model, got {len(models)} summands")
    (m,) = models
    if not m.selfadjoint:
        raise UsageError(f"{what} needs a self-adjoint model")
    return m


def cmd_density(args):
    m = _single(_model(args.model), "density")
    b = m.norm_bound
    rows = []
    for t in _grid(args.grid, f"{-b - 0.5}:{b + 0.5}:{args.samples}"):
        try:
            d = selfadjoint.density(m, t)
        except PoleError:
            rows.append([repr(float(t)), "nan", "", ""])
            continue
        rows.append([repr(d.t), repr(d.extrapolated), repr(d.values[-1]), repr(d.eps_ladder[-1])])
    _emit(_csv(["t", "density", "last_value", "last_eps"], rows), args.out)
    return EXIT_OK


def cmd_atoms(args):
    m = _single(_model(args.model), "atoms")
    b = m.norm_bound
    found = selfadjoint.atoms(m, _grid(args.grid, f"{-b}:{b}:{args.samples}"))
    _emit(_csv(["t", "mass"], [[repr(a.t), repr(a.mass)] for a in found]), args.out)
    return EXIT_OK


def _fmt_moment(v):
    if isinstance(v, complex):
        return format_complex(v, 15)
    return str(v)


def cmd_moments(args):
    models = _model(args.model)
    N = args.order
    if N < 0:
        raise UsageError("--order must be nonnegative")
    if args.check_oracle:
        if not all(isinstance(m, Cyclic) for m in models):
            raise UsageError("--check-oracle needs a sum of cyclic:m summands")
        if N > oracle.MAX_MOMENT_ORDER:
            raise CapError(f"order {N} exceeds the oracle cap {oracle.MAX_MOMENT_ORDER}")
    if N > freesum.MOMENT_CAP:
        raise CapError(f"order {N} exceeds the internal cap {freesum.MOMENT_CAP}")
    seqs = [m.moment_sequence(N) for m in models]
    mom = freesum.free_convolution_moments(seqs, N)
    header = ["k", "moment"]
    rows = [[k, _fmt_moment(v)] for k, v in enumerate(mom)]
    verdict = None
    if args.check_oracle:
        orders = tuple(m.m for m in models)
        ref = [oracle.trace_moment(orders, k) for k in range(N + 1)]
        header.append("oracle")
        for row, r in zip(rows, ref):
            row.append(str(r))
        verdict = "MATCH" if all(a == b for a, b in zip(mom, ref)) else "MISMATCH"
    _emit(_csv(header, rows), args.out)
    if verdict is not None:
        print(verdict)
        return EXIT_OK if verdict == "MATCH" else EXIT_NUMERIC
    return EXIT_OK


def cmd_identity_check(args):
    m, n = args.m, args.n
    if m < 2 or n < 2:
        raise UsageError("--m and --n must be at least 2")
    if args.s:
        s_values = [parse_complex(v) for v in args.s]
    else:
        rng = np.random.default_rng(args.seed)
        rad = 0.6 * np.sqrt(rng.uniform(size=args.samples))
        ang = rng.uniform(0, 2 * np.pi, size=args.samples)
        s_values = [complex(r * cmath.exp(1j * a)) for r, a in zip(rad, ang)]
    worst, used = 0.0, 0
    for s in s_values:
        if s == 0 or abs(1 - s**m) < 1e-12:
            print(f"skipped s={format_complex(s)}: s^{m} = 1 or s = 0 is infeasible")
            continue
        t = twoop.feasible_t(m, n, s)
        if abs(1 - t**n) < 1e-12:
            print(f"skipped s={format_complex(s)}: t^{n} = 1 is infeasible")
            continue
        worst = max(worst, twoop.factorization_check(m, n, s, t))
        used += 1
    print(f"m={m} n={n} samples={used} max_residual={worst!r}")
    if used and worst > args.tol:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_eigmethod(args):
    if args.example != "uuivv":
        raise UsageError(f"unknown example {args.example!r}; available: uuivv")
    pts = boundary.eigmethod_boundary(rays=args.grid, offset=args.offset, xtol=args.tol)
    rows, missing = [], 0
    for theta, r in pts:
        if math.isnan(r):
            missing += 1
            continue
        lam = r * cmath.exp(1j * theta)
        rows.append([repr(theta), repr(r), repr(lam.real), repr(lam.imag)])
    _emit(_csv(["theta", "r", "x", "y"], rows), args.out)
    return EXIT_GAPS if missing else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="freespec", description="Spectra of sums of free operators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=True):
        if model:
            sp.add_argument("--model", required=True, help="e.g. cyclic:2+cyclic:3")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--json", help="also write JSON here")
        sp.add_argument("--svg", help="also write SVG here")
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=None)
        return sp

    sp = common(sub.add_parser("trace", help="trace the outer spectrum border"))
    sp.add_argument("--rays", type=int, default=360)
    sp.add_argument("--center", default="0")
    sp.add_argument("--form", choices=("standard", "alternate"), default="standard")
    sp.set_defaults(func=cmd_trace)

    sp = common(sub.add_parser("radius", help="border crossings on the real axis"))
    sp.add_argument("--form", choices=("standard", "alternate"), default="standard")
    sp.set_defaults(func=cmd_radius)

    sp = common(sub.add_parser("classify", help="classify one point lambda"))
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--form", choices=("standard", "alternate"), default="standard")
    sp.set_defaults(func=cmd_classify)

    sp = common(sub.add_parser("density", help="density by Stieltjes inversion"))
    sp.add_argument("--grid", help="a:b:n or comma separated points")
    sp.add_argument("--samples", type=int, default=201)
    sp.set_defaults(func=cmd_density)

    sp = common(sub.add_parser("atoms", help="atoms of a self-adjoint model"))
    sp.add_argument("--grid", help="a:b:n or comma separated points")
    sp.add_argument("--samples", type=int, default=401)
    sp.set_defaults(func=cmd_atoms)

    sp = common(sub.add_parser("moments", help="moments of a free sum"))
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--check-oracle", action="store_true")
    sp.set_defaults(func=cmd_moments)

    sp = common(sub.add_parser("identity-check", help="verify the two-operator factorization"),
                model=False)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--s", action="append", help="explicit s value (repeatable)")
    sp.set_defaults(func=cmd_identity_check)

    sp = common(sub.add_parser("eigmethod", help="matrix eigenvalue method example"),
                model=False)
    sp.add_argument("--example", default="uuivv")
    sp.add_argument("--grid", type=int, default=64, help="number of rays")
    sp.add_argument("--offset", type=float, default=0.5)
    sp.set_defaults(func=cmd_eigmethod, tol=1e-10)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"freespec: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapError, CapacityError) as exc:
        print(f"freespec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FreeSpecError as exc:
        print(f"freespec: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
