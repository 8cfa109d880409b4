"""Turning a parsed spec into objects, running its checks and serializing the outcome."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

from . import dsl
from .certificate import Certificate, Verdict, jsonable
from .ideal import DEFAULT_STEP_LIMIT, Ideal, count_steps, intersect_all, step_limit
from .irreducibility import component_poset, irreducibility_verdict, is_directed
from .noether import main_prop_witness
from .poly import GF, QQ, Field, Polynomial
from .topology import (
    ClosedSetTower,
    SeparationProblem,
    density_certificate_power_chain,
    ind_closed_check,
    proper_check,
    separation_witness,
    stabilization_check,
)
from .tower import Component, GeneratorRule, RegularFunctionTower, Tower, check_filtration, check_regular_function, interleaves

SCHEMA = "indvar-report/1"
DEFAULTS = {"depth": 6, "degbound": 8, "seed": 42}
MAX_EXPONENT = 10_000
MAX_RANGE = 100_000


class EvalError(ValueError):
    """A spec that parses but cannot be evaluated (bad index, non-constant exponent, ...)."""


# ---------- evaluation ----------


def _number(e: dsl.Expr, env: Mapping[str, int]) -> Fraction:
    """Value of an expression that may not mention variables."""
    if isinstance(e, dsl.Num):
        return Fraction(e.value)
    if isinstance(e, dsl.Name):
        return Fraction(env[e.name])
    if isinstance(e, dsl.Neg):
        return -_number(e.operand, env)
    if isinstance(e, dsl.BinOp):
        a, b = _number(e.left, env), _number(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0:
                raise EvalError(f"division by zero at line {e.line}")
            return a / b
        return a ** _exponent(b, e)
    if isinstance(e, dsl.Reduce):
        acc = Fraction(0 if e.op == "sum" else 1)
        for i in _range(e.lo, e.hi, env, e):
            v = _number(e.body, {**env, e.var: i})
            acc = acc + v if e.op == "sum" else acc * v
        return acc
    raise EvalError(f"line {e.line}: index and bound expressions may not mention {e.name}[...]")


def _integer(e: dsl.Expr, env: Mapping[str, int]) -> int:
    v = _number(e, env)
    if v.denominator != 1:
        raise EvalError(f"line {getattr(e, 'line', 0)}: expected an integer, got {v}")
    return int(v)


def _exponent(v: Fraction, node) -> int:
    if v.denominator != 1 or v < 0:
        raise EvalError(f"line {node.line}: exponent must be a nonnegative integer, got {v}")
    if v > MAX_EXPONENT:
        raise EvalError(f"line {node.line}: exponent {v} exceeds {MAX_EXPONENT}")
    return int(v)


def _range(lo: dsl.Expr, hi: dsl.Expr, env: Mapping[str, int], node) -> range:
    a, b = _integer(lo, env), _integer(hi, env)
    if b - a + 1 > MAX_RANGE:
        raise EvalError(f"line {getattr(node, 'line', 0)}: range {a}..{b} is too long")
    return range(a, b + 1)


class _TowerEnv:
    """Evaluates expressions and ideals in the scope of one tower declaration."""

    def __init__(self, model: "Model", decl: dsl.TowerDecl):
        self.model = model
        self.decl = decl
        self.field: Field = QQ if decl.field is None else GF(decl.field)
        self.family = decl.family

    def const(self, c) -> Polynomial:
        return Polynomial.constant(c, self.field)

    def plain(self, i: int) -> Polynomial:
        return Polynomial.variable(i, self.field)

    def poly(self, e: dsl.Expr, env: Mapping[str, int], sigma: Callable[[int], Polynomial] | None = None, prev: Polynomial | None = None) -> Polynomial:
        sigma = sigma or self.plain
        if isinstance(e, dsl.Num):
            return self.const(e.value)
        if isinstance(e, dsl.Name):
            return self.const(env[e.name])
        if isinstance(e, dsl.Neg):
            return -self.poly(e.operand, env, sigma, prev)
        if isinstance(e, dsl.BinOp):
            if e.op == "^":
                return self.poly(e.left, env, sigma, prev) ** _exponent(_number(e.right, env), e)
            a = self.poly(e.left, env, sigma, prev)
            b = self.poly(e.right, env, sigma, prev)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if not b.is_constant() or b.is_zero():
                raise EvalError(f"line {e.line}: division only by nonzero constants")
            return a / b.constant_value()
        if isinstance(e, dsl.Reduce):
            acc = self.const(0 if e.op == "sum" else 1)
            for i in _range(e.lo, e.hi, env, e):
                v = self.poly(e.body, {**env, e.var: i}, sigma, prev)
                acc = acc + v if e.op == "sum" else acc * v
            return acc
        if isinstance(e, dsl.Index):
            i = _integer(e.index, env)
            if e.name == self.family:
                if i < 1:
                    raise EvalError(f"line {e.line}: variable index {i} is not positive")
                return sigma(i)
            if prev is not None:
                return prev
            if i < 1:
                raise EvalError(f"line {e.line}: rule index {i} is not positive")
            return self.model.rule(self.decl.name, e.name)(i)
        raise TypeError(e)

    def ideal(self, I: dsl.IdealExpr, env: Mapping[str, int], n: int, level_of: int | None = None) -> Ideal:
        if isinstance(I, dsl.IdealSum):
            out = Ideal([], n, self.field)
            for p in I.parts:
                out = out + self.ideal(p, env, n, level_of)
            return out
        if isinstance(I, dsl.IdealGens):
            gens = []
            for g in I.gens:
                if g.range is None:
                    gens.append(self.poly(g.expr, env))
                else:
                    for i in _range(g.range.lo, g.range.hi, env, I):
                        gens.append(self.poly(g.expr, {**env, g.range.var: i}))
            try:
                return Ideal(gens, n, self.field)
            except ValueError as exc:
                raise EvalError(f"line {I.line}: {exc}") from None
        if isinstance(I, dsl.Intersect):
            members = []
            for m in I.members:
                if m.range is None:
                    members.append(self.ideal(m.ideal, env, n, level_of))
                else:
                    for i in _range(m.range.lo, m.range.hi, env, I):
                        members.append(self.ideal(m.ideal, {**env, m.range.var: i}, n, level_of))
            return intersect_all(members) if members else Ideal.unit(n, self.field)
        if isinstance(I, dsl.Splice):
            j = _integer(I.index, env)
            if j < 1:
                raise EvalError(f"line {I.line}: level index {j} is not positive")
            if I.name == self.decl.level_name:
                if level_of is not None and j >= level_of:
                    raise EvalError(f"line {I.line}: level {level_of} may only use earlier levels of its own tower")
                J = self.model.towers[self.decl.name].ideal(j)
            elif I.name in self.model.towers:
                J = self.model.towers[I.name].ideal(j)
            else:
                J = self.model.closedsets[I.name].ideal(j)
            if J.field != self.field:
                raise EvalError(f"line {I.line}: {I.name} lives over a different field")
            if J.ambient > n:
                raise EvalError(f"line {I.line}: {I.name}[{j}] lives in A^{J.ambient}, larger than A^{n}")
            return J.embedded(n) if J.ambient < n else J
        raise TypeError(I)


class Model:
    """The towers, rules and closed sets a spec declares, built lazily."""

    def __init__(self, spec: dsl.SpecFile):
        self.spec = spec
        self.towers: dict[str, Tower] = {}
        self.closedsets: dict[str, ClosedSetTower] = {}
        self.envs: dict[str, _TowerEnv] = {}
        self._rules: dict[tuple[str, str], GeneratorRule] = {}
        for item in spec.items:
            if isinstance(item, dsl.TowerDecl):
                self._build_tower(item)
            elif isinstance(item, dsl.ClosedSetDecl):
                self._build_closedset(item)

    def rule(self, tower: str, name: str) -> GeneratorRule:
        key = (tower, name)
        if key not in self._rules:
            env = self.envs[tower]
            decls = {str(d.index): d for d in env.decl.rules()[name]}
            if "k" in decls:
                body = decls["k"].body
                base = lambda sigma, b=body: env.poly(b, {"k": 1}, sigma)  # noqa: E731
                step = lambda prev, k, sigma, b=body: env.poly(b, {"k": k + 1}, sigma)  # noqa: E731
            else:
                b0, b1 = decls["1"].body, decls["k+1"].body
                base = lambda sigma, b=b0: env.poly(b, {"k": 1}, sigma)  # noqa: E731
                step = lambda prev, k, sigma, b=b1: env.poly(b, {"k": k}, sigma, prev)  # noqa: E731
            self._rules[key] = GeneratorRule(name, base, step, env.field)
        return self._rules[key]

    def _build_tower(self, decl: dsl.TowerDecl) -> None:
        env = _TowerEnv(self, decl)
        self.envs[decl.name] = env
        ambient_expr = next((s.expr for s in decl.body if isinstance(s, dsl.AmbientDecl)), None)
        levels = {s.index: s for s in decl.body if isinstance(s, dsl.LevelDecl)}
        decomps = {s.index: s for s in decl.body if isinstance(s, dsl.DecomposeDecl)}

        def ambient(k: int) -> int:
            if ambient_expr is None:
                return k
            n = _integer(ambient_expr, {"k": k})
            if n < 0:
                raise EvalError(f"ambient dimension {n} at level {k} is negative")
            return n

        def level(k: int) -> Ideal:
            stmt = levels.get(k, levels.get("k"))
            if stmt is None:
                raise EvalError(f"tower {decl.name} has no level {k}")
            return env.ideal(stmt.ideal, {"k": k}, ambient(k), level_of=k)

        def components(k: int) -> list[Component] | None:
            stmt = decomps.get(k, decomps.get("k"))
            if stmt is None:
                return None
            n = ambient(k)
            out = []
            for j, part in enumerate(stmt.parts, 1):
                label = f"{part.label or f'C{j}'}[{k}]"
                out.append(Component(env.ideal(part.ideal, {"k": k}, n), label, part.declared, part.note or ""))
            return out

        self.towers[decl.name] = Tower(decl.name, level, ambient, components if decomps else None, env.field)

    def _build_closedset(self, decl: dsl.ClosedSetDecl) -> None:
        env = self.envs[decl.tower]
        tower = self.towers[decl.tower]
        levels = {lv.index: lv for lv in decl.levels}

        def rule(k: int) -> Ideal:
            stmt = levels.get(k, levels.get("k"))
            if stmt is None:
                raise EvalError(f"closed set {decl.name} has no level {k}")
            return env.ideal(stmt.ideal, {"k": k}, tower.ambient(k))

        self.closedsets[decl.name] = ClosedSetTower(decl.name, tower, rule)


# ---------- running checks ----------


@dataclass
class CheckResult:
    index: int
    kind: str
    targets: list[str]
    params: dict[str, Any]
    status: str  # pass | fail | error
    verdict: str | None = None
    label: str | None = None
    expect: str | None = None
    evidence: list[str] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    replay: dict[str, Any] = field(default_factory=dict)
    error: str | None = None
    seconds: float | None = None


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)
    source: str | None = None
    schema: str = SCHEMA

    @property
    def summary(self) -> dict[str, int]:
        statuses = [c.status for c in self.checks]
        return {
            "total": len(statuses),
            "passed": statuses.count("pass"),
            "failed": statuses.count("fail"),
            "errors": statuses.count("error"),
        }

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        checks = []
        for c in self.checks:
            d = asdict(c)
            if not timing:
                d.pop("seconds")
            checks.append(d)
        return {"schema": self.schema, "source": self.source, "summary": self.summary, "checks": checks}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Report":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls([CheckResult(**c) for c in d["checks"]], d.get("source"), d["schema"])


def effective_params(check: dsl.CheckDecl, overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Defaults, then the directive's own values, then command-line overrides."""
    params: dict[str, Any] = dict(DEFAULTS)
    for p in check.params:
        if p.name in ("expect", "h"):
            continue
        params[p.name] = p.value
    for k, v in (overrides or {}).items():
        if v is not None and k in DEFAULTS:
            params[k] = v
    return params


def _dispatch(model: Model, check: dsl.CheckDecl, params: Mapping[str, Any]) -> Certificate:
    depth, D, seed = params["depth"], params["degbound"], params["seed"]
    names = [t.name for t in check.targets]
    kind = check.kind
    if kind == "filtration":
        return check_filtration(model.towers[names[0]], depth)
    if kind == "indclosed":
        return ind_closed_check(model.closedsets[names[0]], depth)
    if kind == "proper":
        return proper_check(model.closedsets[names[0]], depth)
    if kind == "density":
        cs = next(c for c in model.spec.closedsets if c.name == names[0])
        tower = next(t for t in model.spec.towers if t.name == cs.tower)
        return density_certificate_power_chain(model.rule(tower.name, dsl.density_rule(cs, tower)), depth, D)
    if kind == "separation":
        point = params.get("point", (1,))
        return separation_witness(SeparationProblem(model.closedsets[names[0]], tuple(point), depth, D))
    if kind == "stabilize":
        env = model.envs[names[0]]
        h = [env.poly(e, {}) for e in check.param("h")]
        return stabilization_check(model.towers[names[0]], h, params["N"], depth)
    if kind == "directed":
        return is_directed(component_poset(model.towers[names[0]], depth), depth)
    if kind == "irreducible":
        return irreducibility_verdict(model.towers[names[0]], depth, D, params.get("maxcomp"), params.get("point"))
    if kind == "noether":
        T = model.towers[names[0]]
        point = params.get("point") or (0,) * T.ambient(1)
        _, cert = main_prop_witness(T, tuple(point), depth, D, seed=seed, c_fixed=params.get("cfix"))
        return cert
    if kind == "interleaves":
        return interleaves(model.towers[names[0]], model.towers[names[1]], depth)
    if kind == "regular":
        tgt = check.targets[0]
        phi = RegularFunctionTower(str(tgt), model.rule(tgt.name, tgt.member))
        return check_regular_function(phi, model.towers[tgt.name], depth)
    raise ValueError(f"unknown check kind {kind}")


def _status(cert: Certificate, expect: str | None) -> str:
    if expect is not None:
        return "pass" if expect in (cert.verdict.value, cert.data.get("verdict")) else "fail"
    return "fail" if cert.verdict.is_negative else "pass"


def run_check(spec: dsl.SpecFile, index: int, overrides: Mapping[str, Any] | None = None, steps: int = DEFAULT_STEP_LIMIT) -> CheckResult:
    """Run the ``index``-th check directive on freshly built objects.

    Building fresh objects per check keeps the step counts in the replay data
    independent of which other checks ran first, or in which process.
    """
    check = spec.checks[index]
    params = effective_params(check, overrides)
    expect = check.param("expect")
    shown = {k: jsonable(v) for k, v in params.items()}
    if check.param("h") is not None:
        shown["h"] = [dsl.format_expr(e) for e in check.param("h")]
    result = CheckResult(index + 1, check.kind, [str(t) for t in check.targets], shown, "error", expect=expect)
    result.replay = {"seed": params["seed"], "step_limit": steps}
    start = time.perf_counter()
    with step_limit(steps), count_steps() as box:
        try:
            cert = _dispatch(Model(spec), check, params)
        except Exception as exc:  # captured into the report, never fatal
            result.error = f"{type(exc).__name__}: {exc}"
        else:
            d = cert.to_dict()
            result.verdict = d["verdict"]
            result.label = d["data"].get("verdict") if isinstance(d["data"].get("verdict"), str) else None
            result.evidence = d["evidence"]
            result.data = d["data"]
            result.status = _status(cert, expect)
    result.replay["gb_steps"] = box[0]
    result.seconds = round(time.perf_counter() - start, 6)
    return result


def _run_star(args) -> CheckResult:
    return run_check(*args)


def run_checks(
    spec: dsl.SpecFile,
    overrides: Mapping[str, Any] | None = None,
    jobs: int = 1,
    steps: int = DEFAULT_STEP_LIMIT,
    source: str | None = None,
) -> Report:
    """Execute every check directive; results follow declaration order."""
    n = len(spec.checks)
    tasks = [(spec, i, dict(overrides or {}), steps) for i in range(n)]
    if jobs > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, n)) as pool:
            results = list(pool.map(_run_star, tasks))
    else:
        results = [_run_star(t) for t in tasks]
    return Report(results, source)


def exit_code(report: Report) -> int:
    """0 all checks passed, 1 some check failed, 2 some check hit an error."""
    s = report.summary
    if s["errors"]:
        return 2
    return 1 if s["failed"] else 0


# ---------- serialization ----------

_TEXT_EVIDENCE_LINES = 12


def emit_report(report: Report, format: str = "structured", timing: bool = True) -> bytes:
    """Deterministic serialization; ``timing=False`` drops the only run-dependent field."""
    if format == "structured":
        text = json.dumps(report.to_dict(timing), indent=2, sort_keys=True, ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    lines = [f"indvar report ({report.schema})"]
    if report.source:
        lines.append(f"source: {report.source}")
    for c in report.checks:
        params = " ".join(f"{k}={_short(v)}" for k, v in sorted(c.params.items()))
        lines.append(f"[{c.index}] {c.kind} {', '.join(c.targets)}  {params}")
        head = f"    status: {c.status}"
        if c.verdict:
            head += f"  verdict: {c.verdict}"
        if c.label:
            head += f"  label: {c.label}"
        if c.expect:
            head += f"  expected: {c.expect}"
        head += f"  gb_steps: {c.replay.get('gb_steps')}"
        if timing and c.seconds is not None:
            head += f"  time: {c.seconds:.3f}s"
        lines.append(head)
        if c.error:
            lines.append(f"    error: {c.error}")
        for ev in c.evidence[:_TEXT_EVIDENCE_LINES]:
            lines.append(f"    - {ev}")
        if len(c.evidence) > _TEXT_EVIDENCE_LINES:
            lines.append(f"    ... {len(c.evidence) - _TEXT_EVIDENCE_LINES} more evidence lines")
    s = report.summary
    lines.append(f"summary: {s['total']} checks, {s['passed']} passed, {s['failed']} failed, {s['errors']} errors")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _short(v: Any) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(str(x) for x in v) + ")"
    return str(v)


def load_report(data: bytes | str) -> Report:
    """Inverse of the structured format."""
    return Report.from_dict(json.loads(data))


def verdict_names() -> list[str]:
    return [v.value for v in Verdict]
