"""Command-line interface: ``hyperbound <tail|bounds|conjunction|experiment|entropy>``.

Exit status is 0 on success, 2 for usage or domain errors and 1 for
runtime failures such as unwritable output files.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import combinatorics as cb
from . import conjunctions as cj
from . import isoperimetry as iso
from .harness import ConfigError, format_aggregates, load_config, run_experiment, write_csv


class UsageError(Exception):
    pass


def _fmt(x, args, rounding=None) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, float):
        x = Fraction(repr(x))
    return cb.render(x, args.precision, rounding or args.rounding or "half-even")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _dimension(text: str) -> int:
    """Integer dimension; accepts forms like ``10000``, ``1e4`` or ``10^4``."""
    t = text.strip().replace("**", "^")
    try:
        if "^" in t:
            base, exp = t.split("^", 1)
            v = int(base) ** int(exp)
        elif "e" in t.lower():
            mant, exp = t.lower().split("e", 1)
            v = int(mant) * 10 ** int(exp)
        else:
            v = int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer dimension: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"dimension must be positive, got {text}")
    return v


def _dimension_list(text: str) -> list[int]:
    return [_dimension(p) for p in text.split(",") if p.strip()]


def _probability(text: str, *, open_right: bool = True) -> Fraction:
    try:
        p = cb.as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None
    if not (0 < p < 1 if open_right else 0 < p <= 1):
        raise UsageError(f"probability must lie in (0, 1{')' if open_right else ']'}, got {text}")
    return p


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", type=_positive_int, default=6,
                   help="significant digits for decimal output (default 6)")
    p.add_argument("--rounding", choices=("half-even", "down"), default=None,
                   help="decimal rounding; tail defaults to down, everything else to half-even")


# ---------------------------------------------------------------------------


def cmd_tail(args) -> None:
    kind = cb.TailKind.parse(args.kind)
    rounding = args.rounding or "down"
    if args.solve is not None:
        gamma = _probability(args.solve)
        tc = cb.threshold_crossing(kind, args.n, gamma)
        print(f"{kind.value}(t, {args.n}) crosses {args.solve} between t = {tc.t} and t + 1")
        print(f"{kind.value}({tc.t}, {args.n}) = {_fmt(tc.value_at_t, args, rounding)}")
        print(f"{kind.value}({tc.t + 1}, {args.n}) = {_fmt(tc.value_at_t_plus_1, args, rounding)}")
        print(f"nearest t = {tc.nearest}")
        return
    if args.t is None:
        raise UsageError("tail needs --t or --solve")
    print(_fmt(cb.binomial_tail(kind, args.n, args.t, strict_parity=args.strict_parity),
               args, rounding))


def cmd_bounds(args) -> None:
    mu = _probability(args.mu)
    if args.what == "table":
        if any(n < 100 for n in args.n):
            raise UsageError("table rows need n >= 100")
        for rep in iso.table1_generate(args.n, mu):
            k, lam = rep.ball_index
            print(f"n = {rep.n}, mu = {args.mu}, k = {k}, lambda = {_fmt(lam, args)}")
            print(f"{'quantity':<14} {'exact':>12} {'/sqrt(n)':>9} {'all-n':>12} "
                  f"{'/sqrt(n)':>9} {'limit/sqrt(n)':>13}")
            for q in iso.QUANTITIES:
                ex = rep.get(q, iso.BoundKind.EXACT)
                cl = rep.get(q, iso.BoundKind.CLOSED_FORM)
                li = rep.get(q, iso.BoundKind.ASYMPTOTIC)
                print(f"{q:<14} {_fmt(ex.value, args):>12} {ex.coefficient(rep.n):>9.4f} "
                      f"{cl.value:>12.2f} {cl.coefficient(rep.n):>9.4f} {li.value:>13.4f}")
        return
    if len(args.n) != 1:
        raise UsageError(f"bounds {args.what} takes a single --n")
    n = args.n[0]
    if args.what == "risk":
        if args.r is None:
            raise UsageError("bounds risk needs --r")
        print(_fmt(iso.risk_lower_bound(n, mu, args.r), args))
    elif args.what == "budget":
        if args.target is None:
            raise UsageError("bounds budget needs --target")
        target = _probability(args.target, open_right=False)
        if args.closed:
            print(_fmt(iso.budget_closed_form(n, float(mu), float(target)), args))
        elif args.limit:
            print(_fmt(iso.budget_asymptotic(float(mu), float(target)) * math.sqrt(n), args))
        else:
            print(iso.min_budget(n, mu, target))
    else:
        if args.closed:
            print(_fmt(iso.robustness_ub_closed(n, float(mu)), args))
        elif args.limit:
            print(_fmt(iso.robustness_ub_asymptotic(float(mu)) * math.sqrt(n), args))
        else:
            print(_fmt(iso.robustness_ub_exact(n, mu), args))


def cmd_conjunction(args) -> None:
    s = cj.ConjunctionStructure(args.m, args.u, args.w, args.n)
    defs = cj.ALL_DEFINITIONS if args.defn == "all" else (cj.AttackDefinition.parse(args.defn),)
    r = args.r
    print(f"structure: m = {s.m}, u = {s.u}, w = {s.w}, n = {s.n}, |h| = {s.h_size}, |c| = {s.c_size}")
    print(f"mu = {_fmt(cj.error_mass(s), args)}")
    for d in defs:
        tag = d.value
        print(f"{tag}: risk (r = {r}) = {_fmt(cj.risk_exact(d, s, r), args)}")
        print(f"{tag}: robustness = {_fmt(cj.robustness_exact(d, s), args)}")
        for line in _theorem_lines(d, s, r, args):
            print(f"{tag}: {line}")


def _theorem_lines(d, s, r, args):
    if d is cj.AttackDefinition.ER:
        if s.identical:
            yield "theorem: h = c, risk 0 and robustness inf"
            return
        yield f"theorem risk lower bound = {_fmt(cj.er_risk_theorem_lb(s, r), args)}"
        lo, hi = cj.er_robustness_theorem_bounds(s)
        yield f"theorem robustness in [{_fmt(lo, args)}, {_fmt(hi, args)}]"
    elif d is cj.AttackDefinition.PC:
        if s.h_size >= 1:
            yield f"theorem risk = {_fmt(cj.pc_risk_formula(s.h_size, r), args)}"
            yield f"theorem robustness = {_fmt(cj.pc_robustness_formula(s.h_size), args)}"
    elif s.h_size >= 1:
        yield f"theorem risk = {_fmt(cj.ci_risk_formula(s, r), args)}"
        if s.c_size >= 1:
            lo, hi = cj.ci_robustness_bounds(s)
            yield f"theorem robustness in ({_fmt(lo, args)}, {_fmt(hi, args)})"


def cmd_experiment(args) -> None:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.runs is not None:
        config.runs = args.runs
    if args.eval_samples is not None:
        config.eval_samples = args.eval_samples
    config.validate()

    step = max(1, len(config.target_sizes) * config.runs // 100)

    def progress(done, total):
        if done % step == 0 or done == total:
            print(f"\r{config.name}: {done}/{total} runs", end="", file=sys.stderr, flush=True)
            if done == total:
                print(file=sys.stderr)

    result = run_experiment(config, workers=args.workers, progress=progress)
    write_csv(result.records, args.out)
    print(format_aggregates(result.aggregates))


def cmd_entropy(args) -> None:
    c = float(args.solve)
    p = cb.entropy_solve(c)
    lo, hi = cb.entropy_bracket(c)
    assert lo < p <= hi or (c == 1 and p == 0.5), "root outside the bracketing interval"
    print(f"p = {_fmt(p, args)}")
    print(f"interval = ({_fmt(lo, args)}, {_fmt(hi, args)})")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperbound",
        description="Exact adversarial risk and robustness bounds on the Boolean hypercube.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tail", help="binomial tail quantities C, D, Ball, rho")
    _common(p)
    p.add_argument("--kind", required=True, choices=("C", "D", "Ball", "rho"))
    p.add_argument("--n", type=_dimension, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=_nonneg_int)
    g.add_argument("--solve", metavar="GAMMA", help="find the t where the tail crosses GAMMA")
    p.add_argument("--strict-parity", action="store_true",
                   help="reject D(t, n) when n + t is even instead of flooring its limits")
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("bounds", help="isoperimetric risk and robustness bounds")
    p.add_argument("what", choices=("table", "risk", "budget", "robustness"))
    _common(p)
    p.add_argument("--n", type=_dimension_list, required=True, help="dimension (comma list for table)")
    p.add_argument("--mu", required=True, help="initial risk, parsed as the exact decimal it denotes")
    p.add_argument("--r", type=_nonneg_int)
    p.add_argument("--target")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--closed", action="store_true", help="closed form valid for every n")
    g.add_argument("--limit", action="store_true", help="large-n asymptotic form")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("conjunction", help="exact attack analysis for a conjunction pair")
    _common(p)
    p.add_argument("--m", type=_nonneg_int, required=True)
    p.add_argument("--u", type=_nonneg_int, required=True)
    p.add_argument("--w", type=_nonneg_int, required=True)
    p.add_argument("--n", type=_nonneg_int, default=None)
    p.add_argument("--def", dest="defn", default="all", choices=("er", "pc", "ci", "all"))
    p.add_argument("--r", type=_nonneg_int, default=1)
    p.set_defaults(func=cmd_conjunction)

    p = sub.add_parser("experiment", help="learning + attack simulation, CSV output")
    _common(p)
    p.add_argument("--config", required=True, help="bundled config name or key=value file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--runs", type=_positive_int)
    p.add_argument("--eval-samples", type=_positive_int)
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker processes (default: HYPERBOUND_THREADS or 1)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("entropy", help="invert the binary entropy function")
    _common(p)
    p.add_argument("--solve", required=True, type=float, metavar="C")
    p.set_defaults(func=cmd_entropy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors (and --help) by exiting
        return int(exc.code or 0)
    try:
        args.func(args)
    except (UsageError, cb.DomainError, ConfigError) as exc:
        print(f"hyperbound: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hyperbound: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
