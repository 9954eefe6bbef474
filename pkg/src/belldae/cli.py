"""Command-line front end: solve a built-in or JSON problem and tabulate errors.

Usage::

    belldae solve --example 1 --order 10,15,20 --grid 0.1:0.9:0.1
    belldae solve --spec problem.json --format csv --out table.csv

Exit status: 0 success, 2 configuration, 3 schema, 4 planning, 5 numeric.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import FRACTIONAL_RULES, compile_spec, load_spec, parse_alpha, solve, verify_constraints
from .errors import DTMError, NumericError, ParseError, PlanningError, SchemaError, SeriesError
from .metrics import error_report
from .problems import EXAMPLE_NUMBERS, get_example

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SCHEMA = 3
EXIT_PLANNING = 4
EXIT_NUMERIC = 5


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    example: int | None = None
    spec_path: str | None = None
    orders: tuple = ()
    grid: tuple = ()
    alpha: str | None = None
    lam: float | None = None
    fmt: str = "md"
    out: str | None = None
    check_constraints: bool = False
    fractional_rule: str | None = None

    def __post_init__(self):
        if (self.example is None) == (self.spec_path is None):
            raise ConfigError("give exactly one of --example and --spec")
        if self.example is not None and self.example not in EXAMPLE_NUMBERS:
            raise ConfigError(f"--example must be one of {EXAMPLE_NUMBERS}")
        if any(n < 1 for n in self.orders):
            raise ConfigError("orders must be >= 1")
        if self.fmt not in ("md", "csv", "json"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.lam is not None and self.example != 3:
            raise ConfigError("--lambda applies to example 3 only")
        if self.fractional_rule is not None and self.fractional_rule not in FRACTIONAL_RULES:
            raise ConfigError(f"--fractional-rule must be one of {FRACTIONAL_RULES}")


def parse_orders(text: str) -> tuple:
    try:
        orders = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot read orders {text!r}") from None
    if not orders:
        raise ConfigError("at least one order is needed")
    return orders


def parse_grid(text: str) -> tuple:
    """``a:b:h`` to the points ``a, a+h, ..., b`` (``b`` included when hit)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like a:b:h, got {text!r}")
    try:
        a, b, h = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"cannot read grid {text!r}") from None
    if not all(map(math.isfinite, (a, b, h))):
        raise ConfigError("grid bounds must be finite")
    if h <= 0:
        raise ConfigError("grid step must be positive")
    if b < a:
        raise ConfigError("grid stop must not be below its start")
    n = int(math.floor((b - a) / h + 1e-9))
    return tuple(round(a + i * h, 12) for i in range(n + 1))


# ---------------------------------------------------------------------------

def _load(config: RunConfig):
    """Problem spec, closed forms and default grid/orders for a config."""
    if config.example is not None:
        kwargs = {}
        if config.lam is not None:
            kwargs["lam"] = config.lam
        if config.alpha is not None:
            if config.example != 5:
                raise ConfigError("--alpha applies to fractional problems only (example 5)")
            kwargs["alpha"] = parse_alpha(config.alpha)
        if config.fractional_rule is not None:
            kwargs["rule"] = config.fractional_rule
        case = get_example(config.example, **kwargs)
        return case.spec, case.exact, case.grid, (case.default_order,)
    path = Path(config.spec_path)
    if not path.is_file():
        raise ConfigError(f"spec file not found: {path}")
    spec = load_spec(path)
    if config.fractional_rule is not None:
        spec = spec.with_fractional_rule(config.fractional_rule)
    if config.alpha is not None:
        if spec.alpha is None:
            raise ConfigError("--alpha given but the problem has no fractional order")
        spec = spec.with_alpha(config.alpha)
    compile_spec(spec)
    grid = tuple(round(spec.expansion_point + 0.1 * i, 12) for i in range(1, 10))
    return spec, spec.exact_solutions(), grid, (spec.order,)


def _runs(config: RunConfig, stderr):
    spec, exact, grid, orders = _load(config)
    grid = config.grid or grid
    orders = config.orders or orders
    runs = []
    for n in orders:
        report = solve(spec.with_order(n))
        print(f"{spec.name}: N={n} solved in {report.wall_time:.3f} s", file=stderr)
        errors = error_report(report.series, exact, grid, n) if exact else None
        residual = verify_constraints(report, grid) if config.check_constraints else None
        runs.append((n, report, errors, residual))
    return spec, np.asarray(grid, dtype=float), runs


def _g17(x):
    return "" if x is None else format(float(x), ".17g")


def _format_csv(spec, grid, runs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["record", "order", "variable", "v", "exact", "approx", "abs_error", "rel_error"])
    for n, report, errors, residual in runs:
        for name, s in report.series.items():
            values = report.value(name, grid)
            table = errors.variables.get(name) if errors else None
            for i, v in enumerate(grid):
                if table is None:
                    w.writerow(["point", n, name, _g17(v), "", _g17(values[i]), "", ""])
                else:
                    _, ex, ap, e, r = list(table.rows())[i]
                    w.writerow(["point", n, name, _g17(v), _g17(ex), _g17(ap), _g17(e), _g17(r)])
        if errors:
            for name, e in errors.max_errors.items():
                w.writerow(["max", n, name, "", "", "", _g17(e), ""])
        if residual is not None:
            w.writerow(["constraint", n, "", "", "", "", _g17(residual), ""])
    return buf.getvalue()


def _format_json(spec, grid, runs) -> str:
    out = {"problem": spec.name, "grid": grid.tolist(), "runs": []}
    if spec.alpha is not None:
        out["alpha"] = f"{spec.alpha.numerator}/{spec.alpha.denominator}"
    for n, report, errors, residual in runs:
        run = {"order": n, "variables": {}, "max_error": {}}
        for name in report.series:
            entry = {"approx": report.value(name, grid).tolist()}
            table = errors.variables.get(name) if errors else None
            if table is not None:
                entry["exact"] = table.exact.tolist()
                entry["abs_error"] = table.abs_error.tolist()
                entry["rel_error"] = [None if np.isnan(r) else float(r) for r in table.rel_error]
                run["max_error"][name] = table.max_error
            run["variables"][name] = entry
        run["newton_iterations"] = list(report.newton_iterations)
        run["max_constraint_coefficient"] = report.max_constraint_residual
        if residual is not None:
            run["constraint_residual"] = residual
        out["runs"].append(run)
    return json.dumps(out, indent=2) + "\n"


def _f10(x):
    return f"{x:.10f}"


def _e2(x):
    return "-" if x is None else f"{x:.1E}"


def _format_md(spec, grid, runs) -> str:
    lines = []
    title = spec.name if spec.alpha is None else f"{spec.name} (alpha = {spec.alpha})"
    for n, report, errors, residual in runs:
        lines.append(f"## {title}, N = {n}")
        lines.append("")
        for name in report.series:
            table = errors.variables.get(name) if errors else None
            lines.append(f"### {name}")
            lines.append("")
            if table is None:
                lines.append(f"| v | {name}_N(v) |")
                lines.append("|---|---|")
                for v, y in zip(grid, report.value(name, grid)):
                    lines.append(f"| {v:.2f} | {_f10(y)} |")
            else:
                lines.append(f"| v | {name}(v) | {name}_N(v) | E_N(v) | R_N(v) |")
                lines.append("|---|---|---|---|---|")
                for v, ex, ap, e, r in table.rows():
                    lines.append(f"| {v:.2f} | {_f10(ex)} | {_f10(ap)} | {_e2(e)} | {_e2(r)} |")
            lines.append("")
        if residual is not None:
            lines.append(f"max constraint residual on grid: {_e2(residual)}")
            lines.append("")
    if any(errors for _, _, errors, _ in runs):
        names = [name for name in runs[0][2].variables] if runs[0][2] else []
        lines.append(f"## {title}: maximum absolute error on grid")
        lines.append("")
        lines.append("| N | " + " | ".join(f"E_{name}" for name in names) + " |")
        lines.append("|---|" + "---|" * len(names))
        for n, _, errors, _ in runs:
            row = [_e2(errors.max_errors.get(name)) if errors else "-" for name in names]
            lines.append(f"| {n} | " + " | ".join(row) + " |")
        lines.append("")
    return "\n".join(lines)


_FORMATTERS = {"md": _format_md, "csv": _format_csv, "json": _format_json}


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute a run; returns the exit status.  Diagnostics go to ``stderr``."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        spec, grid, runs = _runs(config, stderr)
        text = _FORMATTERS[config.fmt](spec, grid, runs)
        if config.out:
            Path(config.out).write_text(text, encoding="utf-8")
        else:
            stdout.write(text)
        return EXIT_OK
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (SchemaError, ParseError) as exc:
        print(f"schema error: {exc}", file=stderr)
        return EXIT_SCHEMA
    except PlanningError as exc:
        print(f"planning error: {exc}", file=stderr)
        return EXIT_PLANNING
    except (NumericError, SeriesError, DTMError) as exc:
        print(f"numeric error: {exc}", file=stderr)
        return EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belldae",
        description="Solve nonlinear and fractional DAEs by the differential transform method.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="solve a problem and tabulate values and errors")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", type=int, help="built-in example number (1-5)")
    src.add_argument("--spec", help="path to a problem description in JSON")
    p.add_argument("--order", default=None, help="truncation order(s), e.g. 10,15,20")
    p.add_argument("--grid", default=None, help="evaluation grid a:b:h")
    p.add_argument("--alpha", default=None, help="fractional order p/q")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="parameter of example 3")
    p.add_argument("--fractional-rule", choices=FRACTIONAL_RULES, default=None,
                   help="transform rule for fractional derivatives")
    p.add_argument("--format", dest="fmt", choices=("md", "csv", "json"), default="md")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--check-constraints", action="store_true",
                   help="report the max pointwise constraint residual on the grid")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            example=args.example,
            spec_path=args.spec,
            orders=parse_orders(args.order) if args.order else (),
            grid=parse_grid(args.grid) if args.grid else (),
            alpha=args.alpha,
            lam=args.lam,
            fmt=args.fmt,
            out=args.out,
            check_constraints=args.check_constraints,
            fractional_rule=args.fractional_rule,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
