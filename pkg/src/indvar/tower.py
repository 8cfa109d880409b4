"""Filtrations X_1 -> X_2 -> ... inside A^infinity with standard embeddings."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .certificate import Certificate, Verdict
from .ideal import Ideal
from .points import sample_point
from .poly import QQ, Field, Polynomial

Substitution = Callable[[int], Polynomial]
StepFn = Callable[[Polynomial, int, Substitution], Polynomial]


class GeneratorRule:
    """A sequence f_1, f_2, ... given by a base value and a recursion.

    ``step(prev, k, x)`` returns f_{k+1} from f_k, where ``x(i)`` supplies
    the variable x_i. Because the step is a polynomial expression in ``prev``
    and the variables, applying a ring homomorphism commutes with it; this
    lets :meth:`image` compute sigma(f_k) level by level without ever
    expanding f_k itself.
    """

    def __init__(self, name: str, base: Callable[[Substitution], Polynomial] | Polynomial, step: StepFn, field: Field = QQ):
        self.name = name
        self.field = field
        self._base = base if callable(base) else (lambda x, b=base: b.substitute({v: x(v) for v in b.variables()}) if b.variables() else b)
        self._step = step
        self._values: list[Polynomial] = []
        self._lock = threading.RLock()

    def _plain(self, i: int) -> Polynomial:
        return Polynomial.variable(i, self.field)

    def __call__(self, k: int) -> Polynomial:
        if k < 1:
            raise ValueError("rule levels start at 1")
        with self._lock:
            while len(self._values) < k:
                if not self._values:
                    self._values.append(self._base(self._plain))
                else:
                    n = len(self._values)
                    self._values.append(self._step(self._values[-1], n, self._plain))
            return self._values[k - 1]

    def image(self, k: int, sigma: Substitution | Mapping[int, Polynomial]) -> Polynomial:
        """sigma(f_k) for the homomorphism x_i -> sigma(i)."""
        if isinstance(sigma, Mapping):
            table = sigma
            sigma = lambda i: table.get(i, Polynomial.constant(0, self.field))  # noqa: E731
        value = self._base(sigma)
        for n in range(1, k):
            value = self._step(value, n, sigma)
        return value

    def restricted(self, k: int, m: int) -> Polynomial:
        """restrict(f_k, m) computed through the recursion."""
        zero = Polynomial.constant(0, self.field)
        return self.image(k, lambda i: self._plain(i) if i <= m else zero)

    def values(self, depth: int) -> list[Polynomial]:
        return [self(k) for k in range(1, depth + 1)]

    def __repr__(self):
        return f"GeneratorRule({self.name})"


def square_plus(coefficient: Callable[[int], object] = lambda k: 1, field: Field = QQ, name: str = "f") -> GeneratorRule:
    """f_1 = c_1 x_1, f_{k+1} = f_k^2 + c_{k+1} x_{k+1}."""
    return GeneratorRule(
        name,
        lambda x: coefficient(1) * x(1),
        lambda prev, k, x: prev * prev + coefficient(k + 1) * x(k + 1),
        field,
    )


def shifted_product(field: Field = QQ, name: str = "g") -> GeneratorRule:
    """g_1 = x_1 - 1, g_{k+1} = (x_1 - (k+1)) g_k - x_{k+1}."""
    return GeneratorRule(
        name,
        lambda x: x(1) - 1,
        lambda prev, k, x: (x(1) - (k + 1)) * prev - x(k + 1),
        field,
    )


def running_sum(field: Field = QQ, name: str = "g") -> GeneratorRule:
    """g_1 = x_1, g_{k+1} = g_k + x_{k+1}."""
    return GeneratorRule(name, lambda x: x(1), lambda prev, k, x: prev + x(k + 1), field)


# ---------- towers ----------


@dataclass
class Component:
    """One piece of a level decomposition.

    ``declared`` components carry no machine-checked irreducibility proof;
    ``note`` records the justification given for them.
    """

    ideal: Ideal
    label: str = ""
    declared: bool = False
    note: str = ""

    def __repr__(self):
        return f"Component({self.label or self.ideal!r})"


@dataclass
class Level:
    index: int
    ambient: int
    ideal: Ideal
    components: list[Component] | None = None


class Tower:
    """Filtration given by a level rule k -> I_k with ambient dimension n_k.

    Levels are materialized on demand and memoized; concurrent callers
    compute each level once.
    """

    def __init__(
        self,
        name: str,
        level_rule: Callable[[int], Ideal | Sequence[Polynomial]],
        ambient_rule: Callable[[int], int] = lambda k: k,
        components_rule: Callable[[int], list[Component] | None] | None = None,
        field: Field = QQ,
    ):
        self.name = name
        self.field = field
        self._level_rule = level_rule
        self._ambient_rule = ambient_rule
        self._components_rule = components_rule
        self._memo: dict[int, Level] = {}
        self._lock = threading.RLock()

    @classmethod
    def explicit(cls, name: str, levels: Mapping[int, Ideal], components: Mapping[int, list[Component]] | None = None) -> "Tower":
        """Finitely many levels listed outright."""
        levels = dict(levels)
        comps = dict(components or {})

        def rule(k):
            if k not in levels:
                raise KeyError(f"tower {name} has no level {k}")
            return levels[k]

        return cls(name, rule, lambda k: rule(k).ambient, (lambda k: comps.get(k)) if comps else None)

    def materialize_level(self, k: int) -> Level:
        if k < 1:
            raise ValueError("levels start at 1")
        lvl = self._memo.get(k)
        if lvl is not None:
            return lvl
        with self._lock:
            lvl = self._memo.get(k)
            if lvl is None:
                n = self._ambient_rule(k)
                raw = self._level_rule(k)
                I = raw if isinstance(raw, Ideal) else Ideal(raw, n, self.field)
                if I.ambient != n:
                    I = Ideal(I.generators, n, I.field)
                comps = self._components_rule(k) if self._components_rule else None
                if comps is not None:
                    comps = [
                        Component(Ideal(c.ideal.generators, n, c.ideal.field), c.label, c.declared, c.note)
                        if c.ideal.ambient != n
                        else c
                        for c in comps
                    ]
                lvl = Level(k, n, I, comps)
                self._memo[k] = lvl
        return lvl

    def level(self, k: int) -> Level:
        return self.materialize_level(k)

    def ideal(self, k: int) -> Ideal:
        return self.materialize_level(k).ideal

    def ambient(self, k: int) -> int:
        return self.materialize_level(k).ambient

    def components(self, k: int) -> list[Component]:
        """Declared or default decomposition; a level with none counts as one piece."""
        lvl = self.materialize_level(k)
        if lvl.components is not None:
            return lvl.components
        return [Component(lvl.ideal, f"{self.name}[{k}]", declared=True, note="level taken as a single piece")]

    def has_decompositions(self) -> bool:
        return self._components_rule is not None

    def __repr__(self):
        return f"Tower({self.name})"


def materialize_level(T: Tower, k: int) -> tuple[int, Ideal]:
    lvl = T.materialize_level(k)
    return lvl.ambient, lvl.ideal


# ---------- containment ----------


def contained_in(sub: Ideal, sup: Ideal) -> bool:
    """V(sub) is contained in V(sup), both read inside A^infinity via zero padding."""
    n, m = sub.ambient, sup.ambient
    fld = sub.field
    if n > m and any(not sub.radical_contains(Polynomial.variable(j, fld)) for j in range(m + 1, n + 1)):
        return False
    return all(sub.radical_contains(g.restrict(n)) for g in sup.generators)


def containment_witness(sub: Ideal, sup: Ideal, seed: int = 0) -> dict | None:
    """A rational point of V(sub) outside V(sup), if one is found by sampling."""
    n, m = sub.ambient, sup.ambient
    fld = sub.field
    tests = [g.restrict(n) for g in sup.generators] + [Polynomial.variable(j, fld) for j in range(m + 1, n + 1)]
    for s in range(seed, seed + 6):
        p = sample_point(sub, seed=s)
        if p is None:
            return None
        if any(t.evaluate(p) != 0 for t in tests):
            return {v: p[v] for v in range(1, n + 1)}
    return None


def point_str(point: Mapping[int, object] | Sequence[object], n: int | None = None) -> str:
    if isinstance(point, Mapping):
        n = n if n is not None else max([v for v in point if v > 0], default=0)
        coords = [point.get(i, 0) for i in range(1, n + 1)]
    else:
        coords = list(point)
    return "(" + ", ".join(str(c) for c in coords) + ")"


# ---------- checks ----------


def check_filtration(T: Tower, depth: int) -> Certificate:
    """X_k is contained in X_{k+1} for all k < depth."""
    cert = Certificate("filtration", Verdict.CERTIFIED_TRUE, depth=depth)
    for k in range(1, depth):
        lo, hi = T.materialize_level(k), T.materialize_level(k + 1)
        if hi.ambient < lo.ambient:
            cert.verdict = Verdict.CERTIFIED_FALSE
            cert.note(f"ambient dimension decreases from {lo.ambient} to {hi.ambient} at level {k + 1}")
            return cert
        bad = [g for g in hi.ideal.generators if not lo.ideal.radical_contains(g.restrict(lo.ambient))]
        if bad:
            cert.verdict = Verdict.CERTIFIED_FALSE
            cert.note(f"level {k} is not contained in level {k + 1}: {bad[0].restrict(lo.ambient)} does not vanish on level {k}")
            w = containment_witness(lo.ideal, hi.ideal)
            if w is not None:
                cert.note(f"witness point {point_str(w, lo.ambient)} lies on level {k} but not on level {k + 1}")
                cert.data["witness"] = {"level": k, "point": [w[i] for i in range(1, lo.ambient + 1)]}
            return cert
        cert.note(f"level {k} is contained in level {k + 1}")
    return cert


class RegularFunctionTower:
    """A sequence phi_k of representatives, one per level."""

    def __init__(self, name: str, value_rule: Callable[[int], Polynomial]):
        self.name = name
        self._rule = value_rule
        self._memo: dict[int, Polynomial] = {}
        self._lock = threading.Lock()

    def __call__(self, k: int) -> Polynomial:
        with self._lock:
            if k not in self._memo:
                self._memo[k] = self._rule(k)
            return self._memo[k]

    def restricted(self, k: int, m: int) -> Polynomial:
        rule = self._rule
        if isinstance(rule, GeneratorRule):
            return rule.restricted(k, m)
        return self(k).restrict(m)


def check_regular_function(phi: RegularFunctionTower, T: Tower, depth: int) -> Certificate:
    """restrict(phi_{k+1}, n_k) - phi_k lies in I_k for all k < depth."""
    cert = Certificate("regular_function", Verdict.CERTIFIED_TRUE, depth=depth)
    for k in range(1, depth):
        lvl = T.materialize_level(k)
        diff = phi.restricted(k + 1, lvl.ambient) - phi(k)
        if not lvl.ideal.contains(diff):
            cert.verdict = Verdict.CERTIFIED_FALSE
            cert.note(f"restriction of {phi.name}[{k + 1}] differs from {phi.name}[{k}] modulo I[{k}]")
            cert.data["failing_level"] = k
            return cert
        cert.note(f"{phi.name}[{k + 1}] restricts to {phi.name}[{k}] modulo I[{k}]")
    return cert


def _first_container(sub: Ideal, other: Tower, depth: int) -> int | None:
    for j in range(1, depth + 1):
        if contained_in(sub, other.ideal(j)):
            return j
    return None


def interleaves(T: Tower, U: Tower, depth: int) -> Certificate:
    """Each level i < depth of either tower lies in some level j <= depth of the other."""
    cert = Certificate("interleaves", Verdict.CERTIFIED_TRUE, depth=depth)
    maps: dict[str, dict[int, int]] = {}
    for a, b, tag in ((T, U, "forward"), (U, T, "backward")):
        m: dict[int, int] = {}
        for i in range(1, depth):
            j = _first_container(a.ideal(i), b, depth)
            if j is None:
                far = i <= depth // 2
                cert.verdict = Verdict.CERTIFIED_FALSE if far else Verdict.INCONCLUSIVE
                cert.note(f"{a.name}[{i}] lies in no level of {b.name} up to {depth}")
                w = containment_witness(a.ideal(i), b.ideal(depth))
                if w is not None:
                    cert.note(f"point {point_str(w, a.ambient(i))} of {a.name}[{i}] is off {b.name}[{depth}]")
                if not far:
                    cert.note("failure is near the truncation depth; a deeper level may still contain it")
                cert.data[tag] = m
                return cert
            m[i] = j
            cert.note(f"{a.name}[{i}] <= {b.name}[{j}]")
        maps[tag] = m
    cert.data.update(maps)
    return cert
