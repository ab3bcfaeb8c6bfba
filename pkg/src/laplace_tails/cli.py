"""Command-line front end: ``laplace-tails <command> [options]``.

Commands: analyze, invert, envelope, kernel, appendix, verify, catalog.
Every command prints a JSON report on stdout; ``--json`` and ``--csv``
also write the report and its table to files (atomically).

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 acceptance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__, catalog
from .errors import A3FitError, ExpressionSyntaxError, LaplaceTailsError
from .series import PrecisionConfig, to_float

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_grid(text: str) -> np.ndarray:
    """``log:a:b:n`` or ``lin:a:b:n``."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in ("log", "lin"):
        raise UsageError(f"grid {text!r} must look like log:a:b:n or lin:a:b:n")
    try:
        a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError(f"grid {text!r} has a non-numeric field") from None
    if n < 2:
        raise UsageError("grid needs n >= 2")
    if parts[0] == "log":
        if not (a > 0 and b > 0):
            raise UsageError("log grid endpoints must be positive")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, keys use ``-`` or ``_``."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def table_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    return v


# commands ------------------------------------------------------------------

def _precision(args) -> PrecisionConfig:
    return PrecisionConfig(args.prec_bits, args.jet_order)


def _entry(args):
    return catalog.resolve(args.fn)


def cmd_analyze(args):
    from .spectral import extend, radius_diagnostics

    entry = _entry(args)
    prec = _precision(args)
    kind = None if args.kind == "none" else (args.kind or entry.kind)
    ext = extend(entry.expr, prec, kind=kind)
    t = ext.taylor
    shown = min(args.coeffs, t.N)
    result = {
        "function": entry.expr.text(),
        "kind": kind,
        "omega0": ext.omega0,
        "taylor_at_zero": [to_float(c) if f else None for c, f in zip(t.coeffs[:shown + 1], t.finite_flags)],
        "finite_flags": list(t.finite_flags[:shown + 1]),
        "exact_taylor": t.exact,
        "radius": radius_diagnostics(t),
    }
    diag = result["radius"]
    result["radius_estimate"] = ext.radius
    result["coeff_window"] = diag["coeff_window"]
    result["branch_check_residual"] = ext.branch_check()
    certificates = {}
    if kind == "cm":
        certificates.update(_cm_certificates(ext, result))
    elif kind == "bf":
        from .bernstein import beta_of
        certificates["beta"] = beta_of(entry.expr, prec)
    return result, certificates, None


def _cm_certificates(ext, result):
    from .tails import envelope, fit_a3

    try:
        a3 = fit_a3(ext)
    except A3FitError as exc:
        result["a3_fit"] = str(exc)
        return {}
    env = envelope(ext, a3)
    result["a3_flags"] = list(a3.flags)
    return env.as_dict()


def cmd_invert(args):
    from .inversion import invert_cdf, invert_density
    from .spectral import extend

    entry = _entry(args)
    prec = _precision(args)
    xs = parse_grid(args.grid)
    rows = []
    if args.cdf:
        for x in xs:
            r = invert_cdf(entry.expr, float(x), args.lam, prec)
            rows.append((r.x, r.lambda_used, r.partial_sum, r.error_estimate))
        columns = ["x", "lambda", "cdf", "last_term"]
    else:
        shift = 0.0
        if args.tilt:
            w = extend(entry.expr, prec, kind=None).omega0
            shift = w if math.isfinite(w) else 0.0
        p = prec.with_order(max(prec.jet_order, args.n))
        for x in xs:
            v = invert_density(entry.expr, float(x), args.n, p, shift=shift, richardson=args.richardson)
            exact = float(entry.density(float(x))) if entry.density else None
            rows.append((float(x), v, exact, abs(v / exact - 1) if exact else None))
        columns = ["x", "density", "closed_form", "rel_err"]
    result = {"function": entry.expr.text(), "points": len(rows),
              "mode": "cdf" if args.cdf else "density"}
    return result, {}, (columns, rows)


def cmd_envelope(args):
    from .inversion import density_oracle
    from .spectral import extend
    from .tails import envelope, eval_envelope, fit_a3

    entry = _entry(args)
    prec = _precision(args)
    ts = parse_grid(args.grid)
    rows = []
    if args.levy:
        from .bernstein import levy_envelope
        dens = (lambda t: float(entry.density(t))) if entry.density else None
        lev = levy_envelope(entry.expr, prec, density=dens)
        certificates = dict(lev.certificate.as_dict(), beta=lev.beta)
        for t in ts:
            lo, hi = lev.bounds(float(t))
            exact = dens(float(t)) if dens else None
            rows.append((float(t), exact, lo, hi,
                         exact / lo if exact and lo else None, exact / hi if exact else None))
        columns = ["t", "mu", "lower", "upper", "ratio_low", "ratio_up"]
    else:
        ext = extend(entry.expr, prec, kind="cm")
        env = envelope(ext, fit_a3(ext))
        certificates = env.as_dict()
        oracle = density_oracle(ext, args.n)
        for t in ts:
            lo, hi = eval_envelope(env, ext, float(t))
            nu = float(entry.density(float(t))) if entry.density else oracle(float(t))
            rows.append((float(t), nu, lo, hi, nu / lo if lo else None, nu / hi))
        columns = ["t", "nu_hat", "lower", "upper", "ratio_low", "ratio_up"]
    return {"function": entry.expr.text(), "levy": args.levy}, certificates, (columns, rows)


def cmd_kernel(args):
    from .bernstein import beta_of, triple_of
    from .inversion import TabulatedDensity
    from .spectral import extend
    from .subordination import SubordinationSpec, j_envelope, k_envelope, kappa_of, kernel_table

    entry = _entry(args)
    prec = _precision(args)
    rs = parse_grid(args.grid)
    if args.kind == "fundamental":
        ext = extend(entry.expr, prec, kind="cm")
        if entry.density is not None:
            weight = entry.density
        else:
            shift = ext.omega0 if math.isfinite(ext.omega0) else 0.0
            weight = TabulatedDensity(ext, shift, prec=prec)
        kappa = kappa_of(entry.expr, prec)
        spec = SubordinationSpec("fundamental", weight, args.d, kappa=kappa)
        rows = kernel_table(spec, rs, lambda r: k_envelope(ext, args.d, r))
        certificates = {"kappa": kappa}
    else:
        beta = beta_of(entry.expr, prec)
        levy = entry.density if entry.density is not None else triple_of(entry.expr, prec).levy
        phi_ext = extend(entry.expr, prec, kind="bf")
        spec = SubordinationSpec("jump", levy, args.d, beta=beta)
        rows = kernel_table(spec, rs, lambda r: j_envelope(phi_ext, beta, args.d, r))
        certificates = {"beta": beta}
    table = (["r", "value", "envelope", "ratio", "regime"],
             [(row.r, row.value, row.envelope, row.ratio, row.regime) for row in rows])
    ratios = [row.ratio for row in rows]
    result = {"function": entry.expr.text(), "kind": args.kind, "d": args.d,
              "ratio_min": min(ratios), "ratio_max": max(ratios)}
    return result, certificates, table


def cmd_appendix(args):
    from .series import parse_expression
    from .subordination import AppendixIntegral, appendix_F, appendix_envelope

    expr = parse_expression(args.f)
    p = PrecisionConfig(64, 1)
    f = np.vectorize(lambda t: to_float(expr.value(float(t), p)), otypes=[float])
    ai = AppendixIntegral(f, args.a, args.b, args.c)
    cert = None
    if args.certificate:
        try:
            cert = tuple(float(v) for v in args.certificate.split(","))
        except ValueError:
            raise UsageError("--certificate must be c,gamma,R") from None
        if len(cert) != 3:
            raise UsageError("--certificate must be c,gamma,R")
    rows = []
    for r in parse_grid(args.grid):
        F = appendix_F(ai, float(r))
        env = appendix_envelope(ai, float(r), cert)
        rows.append((float(r), F, env, F / env))
    result = {"f": expr.text(), "a": args.a, "b": args.b, "c": args.c}
    return result, {"certificate": list(cert) if cert else None}, (["r", "F", "envelope", "ratio"], rows)


def cmd_verify(args):
    from .acceptance import run_all

    results = run_all(echo=lambda line: print(line, file=sys.stderr))
    rows = [(r.number, r.title, "pass" if r.passed else "fail", r.seconds) for r in results]
    summary = {"passed": sum(r.passed for r in results), "total": len(results),
               "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                             "measured": r.measured} for r in results]}
    return summary, {}, (["criterion", "title", "status", "seconds"], rows)


def cmd_catalog(args):
    rows = sorted(catalog.FAMILIES.items())
    return {"families": dict(rows)}, {}, (["name", "description"], rows)


COMMANDS = {
    "analyze": cmd_analyze, "invert": cmd_invert, "envelope": cmd_envelope,
    "kernel": cmd_kernel, "appendix": cmd_appendix, "verify": cmd_verify,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--prec-bits", type=int, default=256, help="significand bits (default 256)")
    common.add_argument("--jet-order", type=int, default=64, help="jet order (default 64)")
    common.add_argument("--json", dest="json_path", help="write the JSON report here")
    common.add_argument("--csv", dest="csv_path", help="write the result table here")

    parser = _Parser(prog="laplace-tails", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("analyze", parents=[common], help="abscissa, Taylor data and envelope constants")
    p.add_argument("--fn", required=True, help="formula in x or catalog name")
    p.add_argument("--kind", choices=["cm", "bf", "none"], help="sign check (default from catalog)")
    p.add_argument("--coeffs", type=int, default=8, help="Taylor coefficients to report")

    p = sub.add_parser("invert", parents=[common], help="Post-Widder inversion on a grid")
    p.add_argument("--fn", required=True)
    p.add_argument("--grid", default="log:0.1:10:32")
    p.add_argument("--n", type=int, default=64, help="Post-Widder order")
    p.add_argument("--richardson", type=int, choices=[0, 1, 2], default=1)
    p.add_argument("--tilt", action="store_true", help="invert f(. + omega0) and multiply back")
    p.add_argument("--cdf", action="store_true", help="distribution function instead of density")
    p.add_argument("--lam", type=float, help="lambda for --cdf (default jet_order/(2x))")

    p = sub.add_parser("envelope", parents=[common], help="two-sided density envelope")
    p.add_argument("--fn", required=True)
    p.add_argument("--grid", default="log:0.01:30:32")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--levy", action="store_true", help="Levy-density envelope of a Bernstein function")

    p = sub.add_parser("kernel", parents=[common], help="subordinated heat kernel and its envelope")
    p.add_argument("--phi", "--fn", dest="fn", required=True,
                   help="Phi (fundamental) or phi (jump): formula or catalog name")
    p.add_argument("--kind", choices=["fundamental", "jump"], default="fundamental")
    p.add_argument("--d", type=int, default=1, help="space dimension")
    p.add_argument("--grid", default="log:0.1:10:16")

    p = sub.add_parser("appendix", parents=[common], help="integral F(r) and its envelope")
    p.add_argument("--f", default="1", help="formula in x for f(t)")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--certificate", help="decay certificate c,gamma,R (needed when b = 0)")
    p.add_argument("--grid", default="log:1:50:8")

    sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    sub.add_parser("catalog", parents=[common], help="list catalog families")
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        defaults = {}
        for key, raw in read_config(args.config).items():
            action = known.get(key)
            if action is None or key == "config":
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            if action.const is True:
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    defaults[key] = action.type(raw) if action.type else raw
                except ValueError:
                    raise UsageError(f"config key {key!r}: bad value {raw!r}") from None
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    if args.prec_bits < 64 or args.jet_order < 1:
        raise UsageError("--prec-bits must be >= 64 and --jet-order >= 1")
    return args


def run(args) -> tuple[dict, int]:
    start = time.perf_counter()
    result, certificates, table = COMMANDS[args.command](args)
    report = {
        "command": args.command,
        "inputs": {k: v for k, v in sorted(vars(args).items()) if k not in ("json_path", "csv_path")},
        "result": result,
        "certificates": certificates,
        "version": __version__,
        "precision": {"significand_bits": args.prec_bits, "jet_order": args.jet_order},
        "wall_time": time.perf_counter() - start,
    }
    if table is not None:
        report["table"] = {"columns": table[0], "rows": [list(r) for r in table[1]]}
        if args.csv_path:
            atomic_write(args.csv_path, table_to_csv(*table))
    text = json.dumps(_jsonable(report), indent=2)
    if args.json_path:
        atomic_write(args.json_path, text + "\n")
    status = EXIT_OK
    if args.command == "verify" and result["passed"] != result["total"]:
        status = EXIT_ACCEPTANCE
    return report, status


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        report, status = run(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ExpressionSyntaxError as exc:
        print(f"laplace-tails: bad formula: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LaplaceTailsError as exc:
        print(f"laplace-tails {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        print(f"laplace-tails: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(_jsonable(report), indent=2))
    return status


if __name__ == "__main__":
    sys.exit(main())
