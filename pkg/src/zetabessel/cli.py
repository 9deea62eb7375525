"""Command-line entry point: ``zetabessel verify|suite|special|characters|arith``.

Exit codes: 0 pass, 1 residual failure, 2 usage or hypothesis error.
All numbers are written as decimal strings.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import HypothesisError, ZetaBesselError
from .precision import EvaluationBudget, PrecisionContext

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SUITES = ("main_theorems", "cohen", "voronoi", "oracles", "equivalences")
_PRECISE_SUITES = {"cohen", "voronoi", "all"}

# flags accepted by ``verify`` and forwarded as identity parameters
_PARAM_FLAGS = ("k", "nu", "a", "x", "theta", "psi", "q", "p", "N", "chi", "chi1", "chi2",
                "parity", "alpha", "beta", "f", "cutoff")


class UsageError(Exception):
    pass


def _digits(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("ZETABESSEL_DIGITS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"ZETABESSEL_DIGITS must be an integer, got {env!r}") from exc
    return 60


def _dec(x, digits=40):
    from .series import _dec as fmt

    return fmt(x, digits)


# --------------------------------------------------------------------------
# verify


def _budget(tol=None, options=None) -> EvaluationBudget:
    opts = dict(options or {})
    if tol is not None:
        Fraction(str(tol))  # validates the string
        opts["explicit"] = ("target_tolerance",)
        return EvaluationBudget(target_tolerance=str(tol), options=opts)
    return EvaluationBudget(options=opts)


def _run_case(payload):
    """Verify one grid entry; used directly and by worker processes."""
    from .identities import IdentityCase, verify

    entry, digits, tol = payload
    params = {k: v for k, v in entry.items() if k not in ("id", "notes", "options")}
    case = IdentityCase(entry["id"], params, entry.get("notes", ""))
    ctx = PrecisionContext(digits)
    try:
        report = verify(case, _budget(tol, entry.get("options")), ctx)
        return report.to_dict()
    except HypothesisError as exc:
        return {"case": {"id": case.id, "params": {k: str(v) for k, v in params.items()}, "notes": case.notes},
                "passed": False, "error": f"HypothesisError: {exc}", "hypothesis_error": True}


def cmd_verify(args) -> int:
    from .identities import IdentityCase, verify

    params = {}
    for name in _PARAM_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            params[name] = val
    for extra in args.param or ():
        key, sep, val = extra.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {extra!r}")
        params[key.strip()] = val.strip()
    options = {"allow_pole_set": True} if args.allow_pole_set else {}
    ctx = PrecisionContext(_digits(args.digits))
    report = verify(IdentityCase(args.id, params, args.notes or ""), _budget(args.tol, options), ctx)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_PASS if report.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# suites


@dataclass
class SuiteConfig:
    name: str
    digits: int
    report: str | None = None
    csv_path: str | None = None
    grid: str | None = None
    jobs: int = 1
    tolerance: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in SUITES + ("all",):
            raise UsageError(f"unknown suite {self.name!r}")
        if self.name in _PRECISE_SUITES and self.digits < 30:
            raise UsageError(f"suite {self.name} needs digits >= 30")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if self.tolerance is not None and not Fraction(str(self.tolerance)) > 0:
            raise UsageError("tolerance must be positive")


def load_grid(name: str, path: str | None = None) -> list:
    if path:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        names = SUITES if name == "all" else (name,)
        data = []
        for n in names:
            text = resources.files("zetabessel").joinpath("data", "grids", f"{n}.json").read_text("utf-8")
            data.extend(json.loads(text))
    if not isinstance(data, list) or not all(isinstance(e, dict) for e in data):
        raise UsageError("grid file must be a JSON array of parameter objects")
    return data


def _run_bridge(payload):
    """Character-average bridge check: averaged base side vs the target side."""
    from .identities import IdentityCase, _AVERAGE_FAMILIES, character_average, evaluate_lhs, evaluate_rhs

    entry, digits, tol = payload
    import time

    start = time.perf_counter()
    ctx = PrecisionContext(digits)
    mp = ctx.mp
    base = entry["bridge"]
    target = entry.get("target") or _AVERAGE_FAMILIES[base][0]
    q, h = int(entry["q"]), int(entry["h"])
    p = entry.get("p")
    h2 = entry.get("h2")
    params = dict(entry.get("params", {}))
    target_params = dict(entry.get("target_params", {}))
    tol = mp.mpf(tol or entry.get("tol", "1e-10"))
    budget = EvaluationBudget(options=entry.get("options", {}))
    results = {}
    passed = True
    for side in entry.get("sides", ["lhs", "rhs"]):
        avg = character_average(base, q, h, side, params, budget, ctx, p=int(p) if p else None,
                                h2=int(h2) if h2 else None)
        fn = evaluate_lhs if side == "lhs" else evaluate_rhs
        ref, _ = fn(IdentityCase(target, target_params), budget, ctx)
        diff = abs(avg - ref)
        rel = diff / max(abs(ref), abs(avg)) if max(abs(ref), abs(avg)) > 0 else diff
        ok = bool(rel <= tol)
        passed &= ok
        results[side] = {"average": _dec(avg), "target": _dec(ref), "rel_residual": _dec(rel, 10), "passed": ok}
    return {"case": {"id": f"{base}->{target}", "params": {"q": str(q), "h": str(h)}, "notes": entry.get("notes", "")},
            "bridge": results, "rel_residual": max((r["rel_residual"] for r in results.values()), key=lambda s: float(s)),
            "passed": passed, "runtime_ms": int((time.perf_counter() - start) * 1000), "tolerance": str(tol)}


def _dispatch(payload):
    entry = payload[0]
    if "bridge" in entry:
        return _run_bridge(payload)
    return _run_case(payload)


def run_suite(config: SuiteConfig) -> tuple[list, int]:
    grid = load_grid(config.name, config.grid)
    if not grid:
        raise UsageError("empty grid")
    for entry in grid:
        if "id" not in entry and "bridge" not in entry:
            raise UsageError("every grid entry needs an 'id' (or 'bridge') field")
    payloads = [(e, config.digits, config.tolerance) for e in grid]
    if config.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            reports = list(pool.map(_dispatch, payloads))
    else:
        reports = [_dispatch(p) for p in payloads]
    if any(r.get("hypothesis_error") for r in reports):
        bad = [r["case"]["id"] + ": " + r["error"] for r in reports if r.get("hypothesis_error")]
        raise UsageError("grid violates identity hypotheses: " + "; ".join(bad))
    failures = sum(1 for r in reports if not r["passed"])
    return reports, failures


def write_reports(reports, report_path, csv_path):
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(reports, fh, indent=2)
            fh.write("\n")
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["id", "rel_residual", "pass"])
            for r in reports:
                w.writerow([r["case"]["id"], r.get("rel_residual"), "true" if r["passed"] else "false"])


def cmd_suite(args) -> int:
    config = SuiteConfig(args.name, _digits(args.digits), args.report, args.csv, args.grid, args.jobs, args.tol)
    reports, failures = run_suite(config)
    csv_path = config.csv_path
    if csv_path is None and config.report:
        csv_path = os.path.splitext(config.report)[0] + ".csv"
    write_reports(reports, config.report, csv_path)
    if not config.report:
        print(json.dumps(reports, indent=2))
    print(f"{len(reports) - failures}/{len(reports)} cases passed", file=sys.stderr)
    if failures:
        print(f"{failures} failure(s)", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


# --------------------------------------------------------------------------
# thin wrappers


def _num(ctx, value, name):
    if value is None:
        raise UsageError(f"--{name} is required")
    try:
        return ctx.num(Fraction(str(value)))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--{name} must be a real number") from exc


def cmd_special(args) -> int:
    from . import special

    ctx = PrecisionContext(_digits(args.digits))
    fn = args.fn
    if fn in ("bessel_K", "bessel_I", "bessel_J", "bessel_Y", "bessel_M"):
        value = getattr(special, fn)(_num(ctx, args.nu, "nu"), _num(ctx, args.z, "z"), ctx)
    elif fn == "gamma":
        value = special.gamma(_num(ctx, args.s, "s"), ctx)
    elif fn == "digamma":
        value = special.digamma(_num(ctx, args.s, "s"), ctx)
    elif fn == "riemann_zeta":
        value = special.riemann_zeta(_num(ctx, args.s, "s"), ctx)
    elif fn == "hurwitz_zeta":
        value = special.hurwitz_zeta(_num(ctx, args.s, "s"), _num(ctx, args.alpha, "alpha"), ctx)
    elif fn == "bernoulli_poly":
        if args.n is None:
            raise UsageError("--n is required")
        value = special.bernoulli_poly(int(args.n), _num(ctx, args.alpha, "alpha"), ctx)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown function {fn}")
    print(ctx.mp.nstr(value, ctx.digits))
    return EXIT_PASS


def cmd_characters(args) -> int:
    from .characters import enumerate_characters, gauss_sum

    if args.q < 1:
        raise UsageError("--q must be positive")
    ctx = PrecisionContext(_digits(args.digits))
    rows = []
    for chi in enumerate_characters(args.q).characters:
        tau = gauss_sum(chi, ctx)
        rows.append({
            "label": list(chi.label),
            "angles": [None if a is None else str(a) for a in chi.angles],
            "parity": chi.parity,
            "primitive": chi.is_primitive,
            "principal": chi.is_principal,
            "conductor": chi.conductor,
            "tau": {"re": ctx.mp.nstr(tau.real, 30), "im": ctx.mp.nstr(tau.imag, 30)},
        })
    print(json.dumps(rows, indent=2))
    return EXIT_PASS


def cmd_arith(args) -> int:
    from .arithmetic import r2, r6_bruteforce, r6_formula, sigma_int

    if args.n < 0:
        raise UsageError("--n must be non-negative")
    if args.fn == "r6":
        value = r6_bruteforce(args.n) if args.method == "brute" else r6_formula(args.n)
    elif args.fn == "r2":
        value = r2(args.n)
    else:
        if args.n < 1:
            raise UsageError("--n must be positive for sigma")
        value = sigma_int(args.n, args.k)
    print(str(value))
    return EXIT_PASS


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetabessel", description="Verify Bessel-K divisor-series identities.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="verify one identity case")
    v.add_argument("--id", required=True)
    for name in _PARAM_FLAGS:
        v.add_argument(f"--{name}")
    v.add_argument("--param", action="append", help="extra parameter as key=value")
    v.add_argument("--digits", type=int)
    v.add_argument("--tol")
    v.add_argument("--notes")
    v.add_argument("--allow-pole-set", action="store_true",
                   help="evaluate Cohen tails by continuity when x lies in the excluded set")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("suite", help="run a parameter grid")
    s.add_argument("--name", required=True, choices=SUITES + ("all",))
    s.add_argument("--report")
    s.add_argument("--csv")
    s.add_argument("--grid")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--digits", type=int)
    s.add_argument("--tol")
    s.set_defaults(func=cmd_suite)

    sp = sub.add_parser("special", help="evaluate a special function")
    spsub = sp.add_subparsers(dest="action", parser_class=_Parser)
    spsub.required = True
    ev = spsub.add_parser("eval")
    ev.add_argument("--fn", required=True, choices=("bessel_K", "bessel_I", "bessel_J", "bessel_Y", "bessel_M",
                                                   "gamma", "digamma", "riemann_zeta", "hurwitz_zeta",
                                                   "bernoulli_poly"))
    for name in ("nu", "z", "s", "alpha", "n"):
        ev.add_argument(f"--{name}")
    ev.add_argument("--digits", type=int)
    ev.set_defaults(func=cmd_special)

    ch = sub.add_parser("characters", help="Dirichlet characters")
    chsub = ch.add_subparsers(dest="action", parser_class=_Parser)
    chsub.required = True
    ls = chsub.add_parser("list")
    ls.add_argument("--q", type=int, required=True)
    ls.add_argument("--digits", type=int)
    ls.set_defaults(func=cmd_characters)

    ar = sub.add_parser("arith", help="arithmetic functions")
    arsub = ar.add_subparsers(dest="fn", parser_class=_Parser)
    arsub.required = True
    r6 = arsub.add_parser("r6")
    r6.add_argument("--n", type=int, required=True)
    r6.add_argument("--method", choices=("brute", "formula"), default="formula")
    r2p = arsub.add_parser("r2")
    r2p.add_argument("--n", type=int, required=True)
    sg = arsub.add_parser("sigma")
    sg.add_argument("--n", type=int, required=True)
    sg.add_argument("--k", type=int, default=1)
    for p in (r6, r2p, sg):
        p.set_defaults(func=cmd_arith)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # bad argument values: sizes out of range, poles of the requested function
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZetaBesselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
