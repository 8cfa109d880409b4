import os
from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from indvar.poly import QQ, GF, Polynomial, make_monomial

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


def sym(v: int) -> sympy.Symbol:
    return sympy.Symbol(f"x{v}" if v > 0 else f"y{-v}")


def to_sympy(f: Polynomial):
    """The same polynomial as a sympy expression (coefficients as exact rationals)."""
    out = sympy.Integer(0)
    for m, c in f:
        c = Fraction(c.v) if hasattr(c, "v") else Fraction(c)
        term = sympy.Rational(c.numerator, c.denominator)
        for v, e in m:
            term *= sym(v) ** e
        out += term
    return sympy.expand(out)


def from_sympy(expr, field=QQ) -> Polynomial:
    expr = sympy.expand(expr)
    gens = sorted(expr.free_symbols, key=lambda s: s.name)
    if not gens:
        return Polynomial.constant(Fraction(str(sympy.Rational(expr))), field)
    poly = sympy.Poly(expr, *gens)
    index = {s: (int(s.name[1:]) if s.name[0] == "x" else -int(s.name[1:])) for s in gens}
    terms = {}
    for exps, c in poly.terms():
        m = make_monomial([(index[s], e) for s, e in zip(gens, exps) if e])
        terms[m] = Fraction(str(c))
    return Polynomial(terms, field)


def polynomials(max_var: int = 3, max_exp: int = 3, max_terms: int = 5, field=QQ, coeff=st.integers(-6, 6)):
    """Hypothesis strategy for small sparse polynomials in x1..x_max_var."""
    mono = st.lists(st.tuples(st.integers(1, max_var), st.integers(1, max_exp)), max_size=max_var).map(make_monomial)
    return st.dictionaries(mono, coeff, max_size=max_terms).map(lambda d: Polynomial(d, field))


@pytest.fixture(scope="session")
def gf101():
    return GF(101)


def catalog_ideals(max_ambient: int = 4, max_level: int = 5):
    """(label, Ideal) for the levels, components and closed-set levels of every shipped spec."""
    from indvar import catalog
    from indvar.dsl import parse_spec
    from indvar.report import Model

    out = []
    for name in catalog.NAMES:
        model = Model(parse_spec(catalog.read(name)))
        for tname, T in model.towers.items():
            for k in range(1, max_level + 1):
                if T.ambient(k) > max_ambient:
                    break
                out.append((f"{name}:{tname}[{k}]", T.ideal(k)))
                if T.has_decompositions():
                    for c in T.components(k):
                        out.append((f"{name}:{tname}:{c.label}", c.ideal))
        for cname, Y in model.closedsets.items():
            for k in range(1, max_level + 1):
                if Y.ambient(k) > max_ambient:
                    break
                out.append((f"{name}:{cname}[{k}]", Y.ideal(k)))
    seen, unique = set(), []
    for label, I in out:
        key = (I.ambient, frozenset(I.generators))
        if key not in seen:
            seen.add(key)
            unique.append((label, I))
    return unique


_MODELS: dict = {}


def model(name: str):
    """A fresh model of a shipped spec file (towers memoize, so one per name is shared)."""
    from indvar import catalog
    from indvar.dsl import parse_spec
    from indvar.report import Model

    if name not in _MODELS:
        _MODELS[name] = Model(parse_spec(catalog.read(name)))
    return _MODELS[name]
