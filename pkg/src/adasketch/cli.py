"""Command line interface.

Subcommands: ``adaptive``, ``nonadaptive``, ``compare``, ``params``,
``audit``. Flags may also come from a flat key=value config file via
``--config`` (explicit flags override the file). Results are written as
UTF-8 CSV with a header row; the exit code is 0 on success, 1 on a cost-cap
violation, 2 on a parameter error.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .discover import PRECONDITIONED
from .errors import CapViolationError, ParameterError
from .families import VectorFamily
from .harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    compare_methods,
    cost_audit,
    estimate_error,
    make_method,
    param_table,
    write_csv,
)

_VARIANT_FLAGS = {"basic": "basic", "precond": PRECONDITIONED}

DEFAULT_SEED = 20250801
DEFAULT_TRIALS = 200


def _split_values(text, cast):
    return [cast(part) for part in str(text).split(",") if part != ""]


def read_config(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _add_common_flags(sub):
    sub.add_argument("--config", help="flat key = value file with defaults for the flags")
    sub.add_argument("--m", type=int, help="ambient dimension")
    sub.add_argument("--p", type=float, help="norm of the input ball (default 1)")
    sub.add_argument("--q", type=float, help="norm of the error (default 2)")
    sub.add_argument("--eps", help="target accuracy (or comma list for params)")
    sub.add_argument("--budget", help="measurement budget (or comma list)")
    sub.add_argument("--L", type=int, dest="levels", help="sensitivity levels")
    sub.add_argument("--R", type=int, dest="reps", help="passes per level")
    sub.add_argument("--variant", choices=sorted(_VARIANT_FLAGS),
                     help="adaptive variant (default precond)")
    sub.add_argument("--family", help="vector family, e.g. spikes:4 (comma list for compare)")
    sub.add_argument("--trials", type=int, help="Monte Carlo trials")
    sub.add_argument("--seed", type=int, help="root seed")
    sub.add_argument("--out", help="CSV output path (default stdout)")
    sub.add_argument("--method", help="method name (nonadaptive/audit)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adasketch",
        description="recover high-dimensional vectors from few linear measurements",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("adaptive", "estimate the error of the multi-sensitivity algorithm"),
        ("nonadaptive", "estimate the error of a sketching baseline"),
        ("compare", "error/cost table of all methods over budgets and families"),
        ("params", "derived parameter table for accuracies or budgets"),
        ("audit", "verify measured costs against the closed-form cap"),
    ):
        _add_common_flags(commands.add_parser(name, help=text))
    return parser


def _resolved(args: argparse.Namespace, argv) -> argparse.Namespace:
    if args.config:
        file_values = read_config(args.config)
        aliases = {"L": "levels", "R": "reps"}
        given = {flag.lstrip("-").split("=", 1)[0].replace("-", "_")
                 for flag in argv if flag.startswith("--")}
        given = {aliases.get(name, name) for name in given}
        for key, value in file_values.items():
            dest = aliases.get(key, key)
            if dest in given or getattr(args, dest, None) not in (None, ()):
                continue  # explicit flags win
            setattr(args, dest, value)
    if args.variant and args.variant not in _VARIANT_FLAGS:
        raise ParameterError(f"unknown variant {args.variant!r} (use basic or precond)")
    args.variant = _VARIANT_FLAGS[args.variant] if args.variant else PRECONDITIONED
    args.m = int(args.m) if args.m is not None else None
    args.p = float(args.p) if args.p is not None else 1.0
    args.q = float(args.q) if args.q is not None else 2.0
    args.levels = int(args.levels) if args.levels is not None else None
    args.reps = int(args.reps) if args.reps is not None else None
    args.trials = int(args.trials) if args.trials is not None else DEFAULT_TRIALS
    args.seed = int(args.seed) if args.seed is not None else DEFAULT_SEED
    return args


def _require(value, flag):
    if value is None:
        raise ParameterError(f"missing required flag {flag}")
    return value


def _single_budget(args):
    if args.budget is None:
        return None
    budgets = _split_values(args.budget, int)
    if len(budgets) != 1:
        raise ParameterError("expected a single --budget value")
    return budgets[0]


def _emit(rows, columns, out):
    if out:
        write_csv(out, rows, columns)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c, "") for c in columns])


def _family(args) -> VectorFamily:
    return VectorFamily.parse(_require(args.family, "--family"), args.p)


def _estimate_row(args, method, family):
    cfg = ExperimentConfig(method=method, family=family, m=args.m, q=args.q,
                           trials=args.trials, seed=args.seed)
    est = estimate_error(cfg)
    return {
        "method": method.name, "variant": method.variant,
        "m": args.m, "p": args.p, "q": args.q,
        "budget": "" if args.budget is None else _single_budget(args),
        "L": "" if method.levels is None else method.levels,
        "R": "" if method.reps is None else method.reps,
        "family": family.label(), "trials": args.trials,
        "mean_err": est.mean_err, "qmoment_err": est.qmoment_err, "ci": est.ci,
        "mean_cost": est.mean_cost, "max_cost": est.max_cost, "seed": args.seed,
    }


def _cmd_adaptive(args) -> int:
    _require(args.m, "--m")
    levels = args.levels
    if levels is None and args.eps is not None:
        from .adaptive import levels_for_accuracy
        levels = levels_for_accuracy(float(args.eps), args.p, args.q)
    method = make_method("adaptive", args.m, args.p, args.q,
                         budget=_single_budget(args), levels=levels,
                         reps=args.reps, variant=args.variant)
    _emit([_estimate_row(args, method, _family(args))], CSV_COLUMNS, args.out)
    return 0


def _cmd_nonadaptive(args) -> int:
    _require(args.m, "--m")
    name = _require(args.method, "--method")
    method = make_method(name, args.m, args.p, args.q,
                         budget=_single_budget(args), levels=args.levels)
    _emit([_estimate_row(args, method, _family(args))], CSV_COLUMNS, args.out)
    return 0


def _cmd_compare(args) -> int:
    _require(args.m, "--m")
    budgets = _split_values(_require(args.budget, "--budget"), int)
    families = [VectorFamily.parse(text, args.p)
                for text in _split_values(_require(args.family, "--family"), str)]
    rows = compare_methods(args.m, args.p, args.q, budgets, families,
                           args.trials, args.seed)
    _emit(rows, CSV_COLUMNS, args.out)
    return 0


def _cmd_params(args) -> int:
    _require(args.m, "--m")
    eps_values = _split_values(args.eps, float) if args.eps is not None else None
    budgets = _split_values(args.budget, int) if args.budget is not None else None
    rows = param_table(args.p, args.q, args.m, eps_values=eps_values,
                       budgets=budgets, variant=args.variant)
    columns = ["mode", "value", "L", "R", "variant", "cost_cap", "error_bound",
               "buckets_per_level"]
    _emit(rows, columns, args.out)
    return 0


def _cmd_audit(args) -> int:
    _require(args.m, "--m")
    name = args.method or "adaptive"
    method = make_method(name, args.m, args.p, args.q,
                         budget=_single_budget(args), levels=args.levels,
                         reps=args.reps, variant=args.variant)
    cfg = ExperimentConfig(method=method, family=_family(args), m=args.m,
                           q=args.q, trials=args.trials, seed=args.seed)
    report = cost_audit(cfg)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


_COMMANDS = {
    "adaptive": _cmd_adaptive,
    "nonadaptive": _cmd_nonadaptive,
    "compare": _cmd_compare,
    "params": _cmd_params,
    "audit": _cmd_audit,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolved(args, argv)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:  # ParameterError is a ValueError
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapViolationError as exc:
        print(f"cap violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
