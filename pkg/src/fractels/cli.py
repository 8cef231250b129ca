"""``fractels`` command line.

Exit status: 0 success or PASS, 1 verification FAIL, 2 usage or parse
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from fractions import Fraction

import numpy as np

from . import algebra, digit_eval, local_ifs, poly_fractel
from .core import DEFAULT_GRID, DEFAULT_TOL, AffineMap1D, FixtureRow, fixture, load_fixtures, scalar, verify_fractel
from .expr import Poly
from .errors import FractelError, UnknownFixtureError
from .rational import format_decimal, format_rational, parse_rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


# -- verify ---------------------------------------------------------------------


def random_fixtures(count: int, seed: int) -> list:
    """Affine fractels ``(l, s y + f(l x) - s f(x))`` of random rational cubics."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        coeffs = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in range(4)]
        sigma = Fraction(int(rng.integers(1, 8)), 8) * (1 if rng.random() < 0.5 else -1)
        lo = -sigma if sigma < 0 else 0
        tau = lo + Fraction(int(rng.integers(0, 9)), 8) * (1 - abs(sigma))
        s = Fraction(int(rng.integers(-7, 8)), 8)
        f = scalar(Poly(coeffs), label=f"poly:{','.join(map(format_rational, coeffs))}")
        ww = algebra.affine_fractel(f, AffineMap1D(sigma, tau), s)
        rows.append(FixtureRow(f"random_{i}", ww.w, f))
    return rows


def cmd_verify(args, out) -> int:
    name = args.fixture
    if name == "random":
        rows = random_fixtures(args.count, args.seed)
    elif os.path.exists(name):
        rows = load_fixtures(name)
    else:
        rows = fixture(name)
    ok = True
    for row in rows:
        rep = verify_fractel(row.fractel, row.witness, args.grid, args.tol)
        ok &= rep.passed
        out.write(f"{row.name} max_residual={rep.max_residual:.17g} "
                  f"{'PASS' if rep.passed else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


# -- approx ---------------------------------------------------------------------


def cmd_approx(args, out) -> int:
    ifs = local_ifs.build_sqrt_ifs(args.sigma, args.sigma, args.rule)
    exact = local_ifs.build_sqrt_ifs(args.sigma, args.sigma, "exact")
    sample = local_ifs.PiecewiseSample.on_grid(ifs.base, local_ifs.DEFAULT_SAMPLES)
    run = local_ifs.rb_fixed_point(ifs, sample, args.iterations, tol=0.0)
    profile = local_ifs.relative_error_profile(ifs, np.sqrt, args.grid, args.lo, args.iterations)
    local_ifs.write_profile_csv(profile, out)
    bound = local_ifs.error_bound(local_ifs.lambda_deviations(exact, ifs), ifs.s_max)
    sup = local_ifs.sup_error(ifs, np.sqrt, depth=args.iterations)
    print(f"rule={args.rule} sigma={args.sigma} iterations={args.iterations} "
          f"max|e|={profile.max_abs!r} sup_abs_err={sup!r} bound={bound!r} "
          f"contraction={run.contraction_ratio!r}", file=sys.stderr)
    return EXIT_OK


# -- polybasis -------------------------------------------------------------------


def cmd_polybasis(args, out) -> int:
    sigma, tau = parse_rational(args.sigma), parse_rational(args.tau)
    poly_fractel.semigroup_member(sigma, tau)
    bf = poly_fractel.basis_fractel(poly_fractel.named_basis(args.basis), sigma, tau)
    out.write(bf.M.to_text() + "\n")
    out.write(f"# stochastic: {'yes' if poly_fractel.stochastic_check(bf.M) else 'no'}\n")
    return EXIT_OK


# -- polyeval --------------------------------------------------------------------


def cmd_polyeval(args, out) -> int:
    coeffs = [parse_rational(c) for c in args.coeffs.split(",")]
    res = digit_eval.eval_digits(coeffs, args.x, args.mode, args.base)
    if args.mode == "exact":
        out.write(f"value: {format_rational(res.value)}\n")
        out.write(f"decimal: {format_decimal(res.value, args.digits)}\n")
        out.write("state: " + " ".join(format_rational(v) for v in res.state.vector) + "\n")
    else:
        out.write(f"value: {res.value:.17g}\n")
        out.write("state: " + " ".join(f"{v:.17g}" for v in res.state.vector) + "\n")
    return EXIT_OK


# -- bench -----------------------------------------------------------------------


def cmd_bench(args, out) -> int:
    with open(args.poly_file) as fh:
        polys = digit_eval.parse_poly_file(fh.read())
    rows = digit_eval.bench_rows(polys, args.repetitions)
    digit_eval.write_bench_csv(rows, out)
    for method in digit_eval.METHODS:
        ns = [r[5] for r in rows if r[2] == method]
        if ns:
            print(f"{method}: median {float(np.median(ns)):.1f} ns/eval", file=sys.stderr)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p = argparse.ArgumentParser(prog="fractels", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check a fixture's fractel identity")
    v.add_argument("fixture", help="built-in name, fixture file, or 'random'")
    v.add_argument("--grid", type=_positive_int, default=DEFAULT_GRID)
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--count", type=_positive_int, default=20, help="cases for 'random'")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("approx", parents=[common], help="relative-error profile CSV")
    a.add_argument("target", choices=["sqrt"])
    a.add_argument("--rule", choices=list(local_ifs.SQRT_MODES), default="midpoint")
    a.add_argument("--sigma", type=float, default=0.5)
    a.add_argument("--iterations", type=_positive_int, default=60)
    a.add_argument("--grid", type=_positive_int, default=2000)
    a.add_argument("--lo", type=float, default=1e-6, help="left end of the log grid")
    a.set_defaults(func=cmd_approx)

    b = sub.add_parser("polybasis", parents=[common], help="exact basis fractel matrix")
    b.add_argument("basis", choices=sorted(poly_fractel.BASES))
    b.add_argument("sigma")
    b.add_argument("tau")
    b.set_defaults(func=cmd_polybasis)

    e = sub.add_parser("polyeval", parents=[common], help="evaluate at a digit string")
    e.add_argument("coeffs", help="comma-separated a0,a1,...")
    e.add_argument("x", help="digit string such as 1.23")
    e.add_argument("--base", type=int, default=10)
    e.add_argument("--mode", choices=["exact", "float"], default="exact")
    e.add_argument("--digits", type=int, default=20, help="decimal places shown")
    e.set_defaults(func=cmd_polyeval)

    h = sub.add_parser("bench", parents=[common], help="Horner vs digit-chain table")
    h.add_argument("poly_file")
    h.add_argument("--repetitions", type=_positive_int, default=10_000)
    h.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _output(args.out) as out:
            return args.func(args, out)
    except OSError as e:
        print(f"fractels: {e}", file=sys.stderr)
        return EXIT_IO
    except UnknownFixtureError as e:
        print(f"fractels: unknown fixture {e.args[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    except (FractelError, ValueError) as e:
        print(f"fractels: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
