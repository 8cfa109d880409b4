"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Every test builds fresh objects, so the measured time covers all the work.
"""

import random
import time
from contextlib import contextmanager

import sympy

from conftest import ACCEPTANCE_LINES, catalog_ideals, sym, to_sympy
from indvar import catalog
from indvar.certificate import Verdict
from indvar.dsl import parse_spec
from indvar.ideal import (
    Ideal,
    algebra_kernel,
    eliminate,
    finiteness_test,
    ideal_membership,
    intersect,
    normal_form,
    reduced_groebner,
    saturate,
)
from indvar.irreducibility import (
    IRREDUCIBLE,
    REDUCIBLE,
    component_poset,
    irreducibility_verdict,
    is_directed,
    level_components,
)
from indvar.noether import Normalization, check_extension, extend_normalization, main_prop_witness, noether_normalize
from indvar.points import enumerate_points_mod_p
from indvar.poly import GF, GREVLEX, CurveRule, Polynomial, const, var
from indvar.report import Model, run_checks
from indvar.topology import (
    SeparationProblem,
    density_certificate_power_chain,
    ind_closed_check,
    proper_check,
    separating_space,
    separation_witness,
    stabilization_check,
    verify_separator,
)
from indvar.tower import Tower, check_filtration, square_plus

x1, x2, x3 = var(1), var(2), var(3)
K101 = GF(101)


@contextmanager
def criterion(number: int, title: str, budget: float):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"took {elapsed:.1f} s, budget {budget:.0f} s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"criterion {number} ({title}): FAIL after {elapsed:.1f} s: {type(exc).__name__}: {exc}".splitlines()[0]
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"criterion {number} ({title}): PASS in {elapsed:.1f} s (budget {budget:.0f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def fresh(name: str) -> Model:
    return Model(parse_spec(catalog.read(name)))


def affine_space() -> Tower:
    return Tower("A", lambda k: Ideal([], k))


def test_criterion_1_top_example():
    with criterion(1, "top example: ind-closed, dense, proper", 10):
        m = fresh("top_exa")
        Y = m.closedsets["Y"]
        f = m.rule("A", "f")
        assert ind_closed_check(Y, 6).verdict is Verdict.CERTIFIED_TRUE
        assert density_certificate_power_chain(f, 6, 8).verdict is Verdict.CERTIFIED_TRUE
        assert proper_check(Y, 6).verdict is Verdict.CERTIFIED_TRUE
        assert all(not Ideal([f(n)], n).is_unit() for n in range(1, 7))
        report = run_checks(m.spec, {"depth": 6, "degbound": 8})
        assert [c.verdict for c in report.checks] == ["CERTIFIED_TRUE", "CERTIFIED_TRUE"]


def _sympy_separating_space(depth: int, D: int) -> int:
    """Dimension of L by independent linear algebra.

    f_k = f_{k-1}^2 + x_k, so phi restricted to level k lies in (f_k) exactly
    when substituting x_k -> -f_{k-1}^2 turns it into the zero polynomial.
    """
    xs = [sym(i) for i in range(1, depth + 1)]
    monos = sorted(sympy.itermonomials(xs, D), key=sympy.default_sort_key)
    cs = sympy.symbols(f"c0:{len(monos)}")
    phi = sum(c * m for c, m in zip(cs, monos))
    f = [None, xs[0]]
    for k in range(2, depth + 1):
        f.append(sympy.expand(f[k - 1] ** 2 + xs[k - 1]))
    rows = []
    for k in range(1, depth + 1):
        restricted = phi.subs({x: 0 for x in xs[k:]}, simultaneous=True)
        replacement = 0 if k == 1 else -f[k - 1] ** 2
        reduced = sympy.expand(restricted.subs(xs[k - 1], replacement))
        gens = xs[: k - 1] or [sympy.Symbol("t")]
        for coeff in sympy.Poly(reduced, *gens).coeffs():
            rows.append([coeff.coeff(c) for c in cs])
    return len(sympy.Matrix(rows).nullspace())


def test_criterion_2_brute_force_oracle():
    with criterion(2, "separation space L = {0} at depth 4, D = 4", 30):
        Y = fresh("top_exa").closedsets["Y"]
        monos, basis = separating_space(Y, 4, 4)
        assert basis == []
        assert _sympy_separating_space(4, 4) == 0
        sep = separation_witness(SeparationProblem(Y, (1, 1, 1, 1), 4, 4))
        assert sep.verdict is Verdict.INCONCLUSIVE and sep.data["space_dimension"] == 0
        chain = density_certificate_power_chain(square_plus(), 4, 4)
        assert chain.verdict is Verdict.CERTIFIED_TRUE and chain.data["truncation_zero"]
        # the oracle is not vacuous: a set that is Zariski closed gets a nonzero L
        H = fresh("negative_control").closedsets["Y"]
        assert len(separating_space(H, 3, 2)[1]) > 0


def test_criterion_3_irred2():
    with criterion(3, "second irreducibility example", 20):
        m = fresh("irred2")
        X = m.towers["X"]
        g = m.rule("X", "g")
        for n in range(2, 7):
            rest = [var(i) for i in range(2, n + 1)]
            prod = Polynomial.constant(1)
            for i in range(1, n + 1):
                prod = prod * (x1 - i)
            ours = Ideal([g(n)] + rest, n).groebner().elements
            assert ours == Ideal([prod] + rest, n).groebner().elements
            # independent oracle
            theirs = sympy.groebner([to_sympy(g(n))] + [sym(i) for i in range(2, n + 1)], *[sym(i) for i in range(n, 0, -1)], order="lex")
            assert sympy.expand(theirs.exprs[-1] - to_sympy(prod)) == 0
        for n in range(2, 9):
            assert len(level_components(X, n)) == 2
        directed = is_directed(component_poset(X, 8))
        assert directed.verdict is Verdict.FAILS_UP_TO_DEPTH
        assert directed.data["pair"] == ["Y[2]", "Z[2]"]
        verdict = irreducibility_verdict(X, 6, 4)
        assert verdict.data["verdict"] == IRREDUCIBLE
        assert verdict.data["chain"] == {k: f"Y[{k}]" for k in range(2, 7)}
        lines = verdict.data["dense_chain"].data["line_density"]
        assert all(len(v["points"]) == 6 and v["certificate"].ok for v in lines.values())


def test_criterion_4_irred1():
    with criterion(4, "first irreducibility example", 10):
        m = fresh("irred1")
        X = m.towers["X"]
        f, g = m.rule("X", "f"), m.rule("X", "g")
        verdict = irreducibility_verdict(X, 6, 8)
        assert verdict.data["verdict"] == REDUCIBLE
        cover = verdict.data["cover"]
        assert cover.data["cover"] == ["F[6]", "G[6]"]
        assert all(c.verdict is Verdict.CERTIFIED_TRUE for c in cover.data["ind_closed"])
        w_f, w_g = cover.data["witnesses"]
        assert f(len(w_f)).evaluate(w_f) == 0 and g(len(w_f)).evaluate(w_f) != 0
        assert g(len(w_g)).evaluate(w_g) == 0 and f(len(w_g)).evaluate(w_g) != 0
        gamma = CurveRule((1, -1), (1, -1))
        for n in range(2, 9):
            assert gamma.compose(g(n), n).is_zero()
        for i in range(1, 9):
            assert gamma.compose(f(i), i).degree() == 2 ** (i - 1)


def test_criterion_5_lines():
    with criterion(5, "lines example: filtration and stabilization", 10):
        L = fresh("lines").towers["L"]
        assert check_filtration(L, 7).verdict is Verdict.CERTIFIED_TRUE
        h = [x1 - 1, x2 - 1, x3 - 1]
        assert stabilization_check(L, h, 3, 7).verdict is Verdict.CERTIFIED_TRUE


def test_criterion_6_noether_suite():
    with criterion(6, "Noether normalization suite, 100 seeds", 60):
        ideals = [Ideal([x1 * x2], 2), Ideal([x2 - x1**2], 2), Ideal([], 2)]
        parabola, axis = Ideal([x2 - x1**2], 2), Ideal([x2], 2)
        extensions = [(Ideal([], 2), parabola), (parabola, parabola), (Ideal([], 2), axis)]
        for (Y, Z), expected in zip(extensions, [[x1, x2 - x1**2], [x1], [x1, x2]]):
            NZ = _normalization(Z, [x1])
            N = extend_normalization(Y, Z, NZ)
            assert N.coordinates == expected
            assert check_extension(N, Z, NZ).verdict is Verdict.CERTIFIED_TRUE
        for seed in range(100):
            for I in ideals:
                N = noether_normalize(I, seed=seed, retries=20)
                assert N.verify().verdict is Verdict.CERTIFIED_TRUE
                assert algebra_kernel(N.coordinates, I).is_zero()
            for Y, Z in extensions:
                NZ = noether_normalize(Z, seed=seed, retries=20)
                N = extend_normalization(Y, Z, NZ, seed=seed, retries=20)
                assert check_extension(N, Z, NZ).verdict is Verdict.CERTIFIED_TRUE
        Y, cert = main_prop_witness(affine_space(), (0,), 6, 8, c_fixed=1)
        top = fresh("top_exa").rule("A", "f")
        assert cert.verdict is Verdict.CERTIFIED_TRUE
        assert all(cert.data["rule"](k) == top(k) for k in range(1, 7))


def _normalization(I, coords):
    return Normalization(I, coords, finiteness_test(I, coords))


def _fp(I: Ideal) -> Ideal:
    return Ideal([g.to_field(K101) for g in I.generators], I.ambient, K101)


def test_criterion_7_kernel_properties():
    with criterion(7, "Groebner kernel property suite", 120):
        ideals = catalog_ideals()
        for label, I in ideals:
            rng = random.Random(label)
            reference = reduced_groebner(I, GREVLEX).elements
            gens = list(I.generators)
            for _ in range(50):
                rng.shuffle(gens)
                assert reduced_groebner(Ideal(gens, I.ambient, I.field), GREVLEX).elements == reference, label
        rng = random.Random(7)
        for label, I in ideals:
            G = reduced_groebner(I)
            for _ in range(5):
                f = sum((var(rng.randint(1, I.ambient)) ** rng.randint(0, 4) * rng.randint(-5, 5) for _ in range(4)), Polynomial())
                r = normal_form(f, G)
                assert normal_form(r, G) == r
                assert ideal_membership(f - r, I)
        for label, I in ideals:
            if I.ambient > 3:
                continue
            J = _fp(I)
            pts = enumerate_points_mod_p(J)
            mons = [const(1, K101)] + [var(i, K101) for i in range(1, J.ambient + 1)]
            for _ in range(5):
                f = Polynomial(field=K101)
                for g in J.generators:
                    f = f + g * rng.choice(mons) * rng.randint(1, 100)
                assert ideal_membership(f, J)
                assert all(f.evaluate(p) == 0 for p in pts)
            for _ in range(5):
                f = sum((m * rng.randint(0, 100) for m in mons), Polynomial(field=K101))
                if any(f.evaluate(p) != 0 for p in pts):
                    assert not ideal_membership(f, J), label
        pairs = [
            (Ideal([x1 * x2], 2), Ideal([x1 - 1], 2)),
            (Ideal([x1**2 - x2], 2), Ideal([x2 - 4], 2)),
            (Ideal([x1 * x3, x2 - x1], 3), Ideal([x3 - x2**2], 3)),
        ]
        for I, J in pairs:
            I, J = _fp(I), _fp(J)
            VI, VJ = set(enumerate_points_mod_p(I)), set(enumerate_points_mod_p(J))
            assert set(enumerate_points_mod_p(intersect(I, J))) == VI | VJ
            VS = set(enumerate_points_mod_p(saturate(I, J)))
            assert VI - VJ <= VS <= VI
        I = _fp(Ideal([x1 * x3 - 1, x2 - x3**2], 3))
        E = eliminate(I, [3])
        assert {p[:2] for p in enumerate_points_mod_p(I)} == set(enumerate_points_mod_p(Ideal(E.generators, 2, K101)))


def test_criterion_8_negative_control():
    with criterion(8, "negative control does not fire", 30):
        m = fresh("negative_control")
        f = m.rule("A", "f")
        chain = density_certificate_power_chain(f, 4, 4)
        assert chain.verdict is Verdict.INCONCLUSIVE
        assert chain.data["failed_hypothesis"] == "b"
        Y = m.closedsets["Y"]
        sep = separation_witness(SeparationProblem(Y, (1,), 4, 2))
        assert sep.verdict is Verdict.CERTIFIED_FALSE
        phi = sep.data["witness_polynomial"]
        assert verify_separator(Y, phi, (1,), 4)
        report = run_checks(m.spec)
        assert [c.status for c in report.checks] == ["pass", "pass"]
