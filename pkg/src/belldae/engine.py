"""Recurrence planning and order-by-order solution of DAE systems.

A problem has differential variables ``x`` with equations ``D^m x = rhs``
(integer ``m`` or a single fractional order ``alpha = p/q``), algebraic
variables without equations, and constraints ``g == 0``.  After transforming,
each differential variable obeys an explicit forward rule

    X(k + P) = RHS(k) * factor(k),

with ``P`` the derivative order measured in grid steps.  Algebraic
coefficients are found by *shifted-constraint resolution*: the coefficient of
an algebraic variable at order ``k`` first enters constraint ``j`` at order
``k + s_j``; that transformed constraint coefficient is driven to zero by a
damped Newton iteration.  The shifts are found by probing, which reproduces
the hand derivation of index-1 to index-3 recurrences.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import (
    ConvergenceError,
    InconsistentInitialDataError,
    ParseError,
    PlanningError,
    SchemaError,
    UnsupportedOrderError,
)
from .expr import evaluate_expr, parse, state_names
from .series import TruncSeries, evaluate
from .transform import Evaluator, Pending

MAX_GRID_DENOMINATOR = 10

NEWTON_TOL = 1e-14
NEWTON_MAXITER = 50
FD_STEP = 1e-7
CONSISTENCY_TOL = 1e-10


def parse_alpha(value) -> Fraction:
    """Fractional order from ``"p/q"`` text or a number, as an exact fraction."""
    if isinstance(value, Fraction):
        a = value
    elif isinstance(value, bool):
        raise SchemaError(f"invalid fractional order {value!r}")
    elif isinstance(value, int):
        a = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise UnsupportedOrderError(f"fractional order {value} is not finite")
        a = Fraction(repr(value))
    elif isinstance(value, str):
        try:
            a = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"cannot read fractional order {value!r}") from None
    else:
        raise SchemaError(f"invalid fractional order {value!r}")
    if not 0 < a <= 1:
        raise SchemaError(f"fractional order must lie in (0, 1], got {a}")
    if a.denominator > MAX_GRID_DENOMINATOR:
        raise UnsupportedOrderError(
            f"order {value} is not a rational p/q with q <= {MAX_GRID_DENOMINATOR}"
        )
    return a


def _parse_order(value):
    if isinstance(value, str) and value.strip() == "alpha":
        return "alpha"
    if isinstance(value, bool):
        raise SchemaError(f"invalid derivative order {value!r}")
    if isinstance(value, int) or (isinstance(value, float) and float(value).is_integer()):
        m = int(value)
        if m < 1:
            raise SchemaError(f"derivative order must be >= 1, got {m}")
        return Fraction(m)
    a = parse_alpha(value)
    return a


def _format_order(o):
    if o == "alpha":
        return "alpha"
    if o.denominator == 1:
        return int(o)
    return f"{o.numerator}/{o.denominator}"


# ---------------------------------------------------------------------------
# Problem description

@dataclass(frozen=True)
class Variable:
    id: str
    kind: str = "differential"
    deriv_order: Fraction | str | None = None
    initial: tuple = ()

    @property
    def is_differential(self):
        return self.kind == "differential"


@dataclass(frozen=True)
class Equation:
    var: str
    order: Fraction | str
    rhs: str


@dataclass(frozen=True)
class ProblemSpec:
    """Declarative DAE problem.

    ``initial`` of a differential variable holds derivative values
    ``w^(i)(v0)`` for ``i < ceil(order)``; for an algebraic variable it holds
    an optional Newton guess for coefficient 0.  ``functions`` are named
    forcing terms in the independent variable; ``exact`` optional closed-form
    solutions used for error tables.

    ``fractional_rule`` selects how ``D^alpha`` (``alpha = p/q``) acts:

    ``"grid"``
        Coefficients live on ``(v - v0)**(k/q)``; ``D^alpha`` shifts the index
        by ``p`` with factor ``G(1 + k/q) / G(1 + (k+p)/q)``.  This is the
        generalized transform of the Caputo derivative.
    ``"power"``
        Coefficients of integer powers of ``v - v0``; ``D^alpha`` shifts the
        index by one with factor ``G(1 + alpha*k) / G(1 + alpha*(k+1))``.
        Not Caputo-consistent, but it is the scheme behind the published
        fractional benchmark values.
    """

    name: str
    variables: tuple
    equations: tuple
    constraints: tuple = ()
    order: int = 10
    indep_var: str = "v"
    expansion_point: float = 0.0
    alpha: Fraction | None = None
    functions: tuple = ()
    exact: tuple = ()
    fractional_rule: str = "grid"

    @property
    def diff_vars(self):
        return tuple(v for v in self.variables if v.is_differential)

    @property
    def alg_vars(self):
        return tuple(v for v in self.variables if not v.is_differential)

    def with_order(self, order: int) -> ProblemSpec:
        return replace(self, order=int(order))

    def with_alpha(self, alpha) -> ProblemSpec:
        return replace(self, alpha=parse_alpha(alpha))

    def with_fractional_rule(self, rule: str) -> ProblemSpec:
        return replace(self, fractional_rule=rule)

    def exact_solutions(self):
        """Closed forms as ``{id: callable(v)}`` (empty if none are given)."""
        defs = _parse_definitions(self)
        out = {}
        for name, text in self.exact:
            tree = parse(text, variables=(), indep_var=self.indep_var, definitions=defs)
            out[name] = _closed_form(tree)
        return out


def _closed_form(tree):
    def f(v):
        val = evaluate_expr(tree, v)
        return val * np.ones_like(v) if np.ndim(v) else val

    f.tree = tree
    return f


def spec_from_dict(data: dict) -> ProblemSpec:
    """Build a :class:`ProblemSpec` from the canonical JSON mapping."""
    if not isinstance(data, dict):
        raise SchemaError("problem description must be a JSON object")
    try:
        variables = []
        for item in data["variables"]:
            kind = item.get("kind", "differential")
            if kind not in ("differential", "algebraic"):
                raise SchemaError(f"variable {item.get('id')!r}: unknown kind {kind!r}")
            order = _parse_order(item.get("deriv_order", 1)) if kind == "differential" else None
            initial = tuple(float(x) for x in item.get("initial", ()))
            variables.append(Variable(str(item["id"]), kind, order, initial))
        equations = []
        for item in data.get("equations", ()):
            lhs = item["lhs"]
            equations.append(Equation(str(lhs["var"]), _parse_order(lhs.get("order", 1)), str(item["rhs"])))
        alpha = data.get("alpha")
        spec = ProblemSpec(
            name=str(data.get("name", "problem")),
            variables=tuple(variables),
            equations=tuple(equations),
            constraints=tuple(str(c) for c in data.get("constraints", ())),
            order=int(data.get("order", 10)),
            indep_var=str(data.get("indep_var", "v")),
            expansion_point=float(data.get("expansion_point", 0.0)),
            alpha=None if alpha is None else parse_alpha(alpha),
            functions=tuple((str(k), str(v)) for k, v in data.get("functions", {}).items()),
            exact=tuple((str(k), str(v)) for k, v in data.get("exact", {}).items()),
            fractional_rule=str(data.get("fractional_rule", "grid")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed problem description: {exc!r}") from None
    compile_spec(spec)
    return spec


def spec_to_dict(spec: ProblemSpec) -> dict:
    out = {
        "name": spec.name,
        "indep_var": spec.indep_var,
        "expansion_point": spec.expansion_point,
        "order": spec.order,
    }
    if spec.alpha is not None:
        out["alpha"] = _format_order(spec.alpha)
    if spec.fractional_rule != "grid":
        out["fractional_rule"] = spec.fractional_rule
    if spec.functions:
        out["functions"] = dict(spec.functions)
    out["variables"] = []
    for v in spec.variables:
        item = {"id": v.id, "kind": v.kind}
        if v.is_differential:
            item["deriv_order"] = _format_order(v.deriv_order)
        if v.initial:
            item["initial"] = list(v.initial)
        out["variables"].append(item)
    out["equations"] = [
        {"lhs": {"var": e.var, "order": _format_order(e.order)}, "rhs": e.rhs} for e in spec.equations
    ]
    out["constraints"] = list(spec.constraints)
    if spec.exact:
        out["exact"] = dict(spec.exact)
    return out


def load_spec(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return spec_from_dict(data)


def dump_spec(spec: ProblemSpec, path=None) -> str:
    text = json.dumps(spec_to_dict(spec), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# Compilation

def _gamma_ratio(a: float, b: float) -> float:
    """``G(a) / G(b)`` for ``a, b > 0``."""
    if b < 170:
        return math.gamma(a) / math.gamma(b)
    return math.exp(math.lgamma(a) - math.lgamma(b))


FRACTIONAL_RULES = ("grid", "power")


@dataclass(frozen=True)
class UpdateRule:
    """``X(k + shift) = RHS(k) * factor(k)``, with fixed leading coefficients."""

    var: str
    shift: int
    grid: int
    initial: tuple
    alpha: Fraction | None = None

    def factor(self, k: int) -> float:
        if self.alpha is not None:
            a = float(self.alpha)
            return _gamma_ratio(1 + a * k, 1 + a * (k + 1))
        if self.grid == 1:
            prod = 1.0
            for j in range(1, self.shift + 1):
                prod *= k + j
            return 1.0 / prod
        return _gamma_ratio(1 + k / self.grid, 1 + (k + self.shift) / self.grid)

    def describe(self) -> str:
        if self.alpha is not None:
            a = self.alpha
            return f"{self.var}[k+1] = G(1+{a}*k) / G(1+{a}*(k+1)) * rhs[k]"
        if self.grid == 1:
            den = "*".join(f"(k+{j})" for j in range(1, self.shift + 1))
            return f"{self.var}[k+{self.shift}] = rhs[k] / ({den})"
        q = self.grid
        return f"{self.var}[k+{self.shift}] = G(1+k/{q}) / G(1+(k+{self.shift})/{q}) * rhs[k]"


@dataclass
class _Compiled:
    spec: ProblemSpec
    grid: int
    rules: dict
    rhs: dict
    constraints: list
    alg_names: list
    alg_guess: list


def _parse_definitions(spec):
    defs = {}
    for name, text in spec.functions:
        defs[name] = parse(text, variables=(), indep_var=spec.indep_var, definitions=defs)
    return defs


def _parse_in(text, ids, spec, defs, where):
    try:
        return parse(text, ids, spec.indep_var, defs)
    except ParseError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def compile_spec(spec: ProblemSpec) -> _Compiled:
    """Validate a spec and parse its expressions.  Raises :class:`SchemaError`."""
    ids = [v.id for v in spec.variables]
    if len(set(ids)) != len(ids):
        raise SchemaError("duplicate variable ids")
    if spec.indep_var in ids:
        raise SchemaError(f"independent variable {spec.indep_var!r} clashes with a state name")
    if spec.order < 1:
        raise SchemaError("truncation order must be >= 1")
    for name, _ in spec.functions:
        if name in ids or name == spec.indep_var:
            raise SchemaError(f"function name {name!r} clashes with a variable")

    def resolve(o, where):
        if o == "alpha":
            if spec.alpha is None:
                raise SchemaError(f"{where} uses 'alpha' but the problem sets no alpha")
            return spec.alpha
        return o

    diff = {v.id: v for v in spec.diff_vars}
    eq_for = {}
    for eq in spec.equations:
        if eq.var not in diff:
            raise SchemaError(f"equation for {eq.var!r}, which is not a differential variable")
        if eq.var in eq_for:
            raise SchemaError(f"more than one equation for {eq.var!r}")
        eq_for[eq.var] = eq
    missing = set(diff) - set(eq_for)
    if missing:
        raise SchemaError(f"no equation for {sorted(missing)}")
    if len(spec.constraints) != len(spec.alg_vars):
        raise SchemaError(
            f"{len(spec.constraints)} constraints for {len(spec.alg_vars)} algebraic variables"
        )

    orders = {}
    for name, var in diff.items():
        o_var = resolve(var.deriv_order, f"variable {name!r}")
        o_eq = resolve(eq_for[name].order, f"equation for {name!r}")
        if o_var != o_eq:
            raise SchemaError(f"order of {name!r} differs between variable ({o_var}) and equation ({o_eq})")
        orders[name] = o_eq
    fractional = {o for o in orders.values() if o.denominator != 1}
    if len(fractional) > 1:
        raise SchemaError("all fractional derivatives must share one order")
    for o in fractional:
        if not 0 < o <= 1:
            raise SchemaError(f"fractional order {o} outside (0, 1]")
        if o.denominator > MAX_GRID_DENOMINATOR:
            raise UnsupportedOrderError(f"grid denominator {o.denominator} exceeds {MAX_GRID_DENOMINATOR}")
    if spec.fractional_rule not in FRACTIONAL_RULES:
        raise SchemaError(f"fractional_rule must be one of {FRACTIONAL_RULES}, got {spec.fractional_rule!r}")
    power = spec.fractional_rule == "power"
    q = fractional.pop().denominator if fractional and not power else 1

    rules = {}
    for name, o in orders.items():
        n_init = math.ceil(o)
        var = diff[name]
        if len(var.initial) != n_init:
            raise SchemaError(f"{name!r} needs {n_init} initial value(s), got {len(var.initial)}")
        if o.denominator != 1 and power:
            rules[name] = UpdateRule(name, 1, 1, (var.initial[0],), o)
            continue
        shift = int(o * q)
        lead = []
        for j in range(shift):
            if j % q:
                lead.append(0.0)
            else:
                i = j // q
                lead.append(var.initial[i] / math.factorial(i))
        rules[name] = UpdateRule(name, shift, q, tuple(lead))

    try:
        defs = _parse_definitions(spec)
        rhs = {name: _parse_in(eq.rhs, ids, spec, defs, f"equation for {name!r}") for name, eq in eq_for.items()}
        constraints = [_parse_in(c, ids, spec, defs, f"constraint {j}") for j, c in enumerate(spec.constraints)]
    except ParseError as exc:
        raise SchemaError(f"function definition: {exc}") from None
    alg = spec.alg_vars
    for v in alg:
        if len(v.initial) > 1:
            raise SchemaError(f"algebraic variable {v.id!r} takes at most one initial guess")
    for name, _ in spec.exact:
        if name not in ids:
            raise SchemaError(f"exact solution given for unknown variable {name!r}")
    try:
        spec.exact_solutions()
    except ParseError as exc:
        raise SchemaError(f"exact solution: {exc}") from None
    return _Compiled(
        spec=spec,
        grid=q,
        rules={name: rules[name] for name in diff},
        rhs=rhs,
        constraints=constraints,
        alg_names=[v.id for v in alg],
        alg_guess=[v.initial[0] if v.initial else 0.0 for v in alg],
    )


# ---------------------------------------------------------------------------
# Plan

@dataclass(frozen=True)
class Binding:
    var: str
    constraint: int
    shift: int


@dataclass(frozen=True)
class RecurrencePlan:
    grid_denominator: int
    update_rules: tuple
    constraint_bindings: tuple
    constraint_shifts: tuple
    schedule: tuple

    def describe(self) -> str:
        lines = [r.describe() for r in self.update_rules]
        for b in self.constraint_bindings:
            lines.append(f"{b.var}[k] from constraint {b.constraint} at order k+{b.shift}")
        return "\n".join(lines)


class _Machine:
    """Coefficient store of one solve; owns the evaluator and the alg frontier."""

    def __init__(self, compiled: _Compiled):
        self.c = compiled
        spec = compiled.spec
        self.ev = Evaluator(self._source, compiled.grid, spec.expansion_point)
        self.alg = {name: [] for name in compiled.alg_names}
        self.trial = None

    def _source(self, name, k):
        rule = self.c.rules.get(name)
        if rule is not None:
            key = ("var", name, k)
            memo = self.ev.memo
            if key in memo:
                return memo[key]
            if k < rule.shift:
                val = rule.initial[k]
            else:
                j = k - rule.shift
                val = self.ev.coef(self.c.rhs[name], j) * rule.factor(j)
            memo[key] = val
            return val
        known = self.alg[name]
        if k < len(known):
            return known[k]
        if self.trial is not None and k == len(known):
            return self.trial[name]
        raise Pending(name, k)

    def constraint_values(self, x, orders):
        """Transformed constraints at ``orders`` with trial algebraic values ``x``."""
        self.trial = dict(zip(self.c.alg_names, x))
        self.ev.begin()
        try:
            return np.array([self.ev.coef(self.c.constraints[j], o) for j, o in orders])
        finally:
            self.ev.rollback()
            self.trial = None

    def accept(self, x, orders):
        self.trial = dict(zip(self.c.alg_names, x))
        self.ev.begin()
        try:
            vals = np.array([self.ev.coef(self.c.constraints[j], o) for j, o in orders])
            self.ev.commit()
        finally:
            self.ev.rollback()
            self.trial = None
        for name, xi in zip(self.c.alg_names, x):
            self.alg[name].append(float(xi))
        return vals

    # -- planning --------------------------------------------------------
    def plan(self) -> RecurrencePlan:
        c = self.c
        rules = tuple(c.rules.values())
        n_alg = len(c.alg_names)
        if n_alg == 0:
            return RecurrencePlan(c.grid, rules, (), (), self._schedule(rules, ()))
        cap = 2 * max((r.shift for r in rules), default=0) + 2
        rng = np.random.default_rng(20240601)
        base = rng.uniform(0.5, 1.5, n_alg)
        bump = rng.uniform(0.25, 0.75, n_alg)

        shifts = []
        depends = []
        for j in range(len(c.constraints)):
            found = None
            for s in range(cap + 1):
                try:
                    r0 = self.constraint_values(base, [(j, s)])[0]
                    hits = []
                    for i in range(n_alg):
                        x = base.copy()
                        x[i] += bump[i]
                        r1 = self.constraint_values(x, [(j, s)])[0]
                        hits.append(abs(r1 - r0) > 1e-13 * max(1.0, abs(r0), abs(r1)))
                except Pending as exc:
                    raise PlanningError(
                        f"constraint {j} at order {s} needs {exc.name}[{exc.k}] before any "
                        "algebraic coefficient at order 0 enters it"
                    ) from None
                if any(hits):
                    found = s
                    depends.append(hits)
                    break
            if found is None:
                raise PlanningError(
                    f"constraint {j} does not determine any algebraic variable within shift {cap} "
                    "(index too high, or the constraint ignores the algebraic variables)"
                )
            shifts.append(found)

        used = set()
        bindings = []
        for i, name in enumerate(c.alg_names):
            cands = [j for j in range(len(shifts)) if j not in used and depends[j][i]]
            if not cands:
                raise PlanningError(f"no constraint left to determine {name!r}")
            j = min(cands, key=lambda jj: (shifts[jj], jj))
            used.add(j)
            bindings.append(Binding(name, j, shifts[j]))

        orders = [(j, shifts[j]) for j in range(len(shifts))]
        jac = self.jacobian(base, orders)
        if np.linalg.matrix_rank(jac) < n_alg:
            raise PlanningError("shifted constraints are singular in the algebraic unknowns")
        return RecurrencePlan(c.grid, rules, tuple(bindings), tuple(shifts), self._schedule(rules, bindings))

    @staticmethod
    def _schedule(rules, bindings):
        steps = []
        if bindings:
            names = ", ".join(b.var for b in bindings)
            cons = ", ".join(f"c{b.constraint}@k+{b.shift}" for b in bindings)
            steps.append(f"newton {names}[k] from {cons}")
        for r in rules:
            steps.append(f"update {r.var}[k+{r.shift}]")
        return tuple(steps)

    def jacobian(self, x, orders):
        n = len(x)
        jac = np.empty((len(orders), n))
        for i in range(n):
            h = FD_STEP * max(1.0, abs(x[i]))
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            jac[:, i] = (self.constraint_values(xp, orders) - self.constraint_values(xm, orders)) / (2 * h)
        return jac

    # -- solving ---------------------------------------------------------
    def check_consistency(self, plan):
        for j, s in enumerate(plan.constraint_shifts):
            for o in range(s):
                try:
                    val = self.ev.coef(self.c.constraints[j], o)
                except Pending as exc:
                    raise PlanningError(f"constraint {j} at order {o} needs {exc.name}[{exc.k}]") from None
                if abs(val) > CONSISTENCY_TOL:
                    raise InconsistentInitialDataError(
                        f"initial data violate constraint {j} ({self.c.spec.constraints[j]}) "
                        f"at order {o}: residual {val:.3e}"
                    )

    def newton(self, k, plan, x0):
        """Damped Newton for the algebraic coefficients at order ``k``.

        Stops when the shifted-constraint residual is below ``NEWTON_TOL``,
        then takes one polishing step with the last Jacobian: the residual
        is a coefficient that can be much smaller than the unknown it
        determines, so the tolerance alone would leave ~1e-12 errors.
        """
        orders = [(j, k + s) for j, s in enumerate(plan.constraint_shifts)]
        x = np.array(x0, dtype=float)
        jac = None
        try:
            r = self.constraint_values(x, orders)
            for it in range(NEWTON_MAXITER + 1):
                rn = np.max(np.abs(r))
                if rn <= NEWTON_TOL:
                    if rn > 0:
                        x, r = self._polish(x, r, jac, orders)
                    return x, it, float(np.max(np.abs(r)))
                if it == NEWTON_MAXITER:
                    break
                jac = self.jacobian(x, orders)
                try:
                    dx = np.linalg.solve(jac, -r)
                except np.linalg.LinAlgError:
                    raise ConvergenceError(
                        f"singular Jacobian at order {k}", order=k, residual=rn
                    ) from None
                t = 1.0
                while True:
                    xt = x + t * dx
                    rt = self.constraint_values(xt, orders)
                    if np.max(np.abs(rt)) < rn or t < 1e-4:
                        break
                    t *= 0.5
                step = np.max(np.abs(xt - x))
                x, r = xt, rt
                if step <= 4 * np.finfo(float).eps * max(1.0, np.max(np.abs(x))):
                    # stagnated at roundoff level
                    rn = np.max(np.abs(r))
                    if rn <= 1e-8 * max(1.0, np.max(np.abs(x))):
                        return x, it + 1, float(rn)
                    break
        except Pending as exc:
            raise PlanningError(
                f"order {k}: constraint needs {exc.name}[{exc.k}], beyond the current unknowns"
            ) from None
        raise ConvergenceError(
            f"Newton iteration did not converge at order {k} (residual {np.max(np.abs(r)):.3e})",
            order=k,
            residual=float(np.max(np.abs(r))),
        )

    def _polish(self, x, r, jac, orders):
        if jac is None:
            jac = self.jacobian(x, orders)
        try:
            xt = x + np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return x, r
        rt = self.constraint_values(xt, orders)
        if np.max(np.abs(rt)) <= np.max(np.abs(r)):
            return xt, rt
        return x, r


def plan(spec: ProblemSpec) -> RecurrencePlan:
    """Build the recurrence plan: update rules and shifted-constraint bindings."""
    return _Machine(compile_spec(spec)).plan()


# ---------------------------------------------------------------------------
# Reports

@dataclass(frozen=True)
class SolveReport:
    spec: ProblemSpec
    plan: RecurrencePlan
    series: dict
    newton_iterations: tuple
    max_constraint_residual: float
    constraint_coefficients: tuple
    wall_time: float = field(compare=False)

    @property
    def order(self) -> int:
        return self.spec.order

    @property
    def grid_denominator(self) -> int:
        return self.plan.grid_denominator

    def __getitem__(self, name) -> TruncSeries:
        return self.series[name]

    def value(self, name, v):
        return evaluate(self.series[name], v)

    def values(self, v) -> dict:
        return {name: evaluate(s, v) for name, s in self.series.items()}


def solve(spec: ProblemSpec) -> SolveReport:
    """Solve ``spec`` up to its truncation order.

    The series of every variable holds coefficients ``0 .. order * q`` on the
    grid ``(v - v0)**(1/q)``, i.e. up to ``(v - v0)**order``.
    """
    t0 = time.perf_counter()
    compiled = compile_spec(spec)
    m = _Machine(compiled)
    rp = m.plan()
    m.check_consistency(rp)
    q = compiled.grid
    top = spec.order * q

    iterations = []
    if compiled.alg_names:
        x = np.array(compiled.alg_guess, dtype=float)
        for k in range(top + 1):
            x, its, _ = m.newton(k, rp, x)
            m.accept(x, [(j, k + s) for j, s in enumerate(rp.constraint_shifts)])
            iterations.append(its)

    origin = spec.expansion_point
    series = {}
    for v in spec.variables:
        if v.is_differential:
            coeffs = [m._source(v.id, k) for k in range(top + 1)]
        else:
            coeffs = m.alg[v.id]
        series[v.id] = TruncSeries(coeffs, origin, q)

    con = []
    for j, s in enumerate(rp.constraint_shifts):
        con.append(np.array([m.ev.coef(compiled.constraints[j], o) for o in range(top + s + 1)]))
    max_res = max((float(np.max(np.abs(c))) for c in con), default=0.0)
    return SolveReport(
        spec=spec,
        plan=rp,
        series=series,
        newton_iterations=tuple(iterations),
        max_constraint_residual=max_res,
        constraint_coefficients=tuple(con),
        wall_time=time.perf_counter() - t0,
    )


def solve_fractional(spec: ProblemSpec, alpha=None, rule: str | None = None) -> SolveReport:
    """Solve with fractional order ``alpha`` (``"p/q"`` text or number).

    ``rule`` overrides ``spec.fractional_rule``.  At ``alpha == 1`` both
    rules run exactly the integer-grid path of :func:`solve`.
    """
    if rule is not None:
        spec = spec.with_fractional_rule(rule)
    if alpha is not None:
        spec = spec.with_alpha(alpha)
    elif spec.alpha is not None:
        parse_alpha(spec.alpha)
    return solve(spec)


def verify_constraints(report: SolveReport, grid, spec: ProblemSpec | None = None) -> float:
    """Largest pointwise ``|g(v)|`` over the grid, using the solved series."""
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        return 0.0
    spec = spec or report.spec
    compiled = compile_spec(spec)
    values = report.values(grid)
    worst = 0.0
    for g in compiled.constraints:
        res = evaluate_expr(g, grid, values)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


__all__ = [
    "Binding",
    "Equation",
    "FRACTIONAL_RULES",
    "ProblemSpec",
    "RecurrencePlan",
    "SolveReport",
    "UpdateRule",
    "Variable",
    "compile_spec",
    "dump_spec",
    "load_spec",
    "parse_alpha",
    "plan",
    "solve",
    "solve_fractional",
    "spec_from_dict",
    "spec_to_dict",
    "state_names",
    "verify_constraints",
]
