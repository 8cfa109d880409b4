from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import model
from indvar.certificate import Verdict
from indvar.ideal import Ideal
from indvar.poly import Polynomial, var
from indvar.topology import (
    ClosedSetTower,
    CoefficientSpaceTooLarge,
    SeparationProblem,
    density_certificate_power_chain,
    ind_closed_check,
    line_density_certificate,
    nullspace,
    proper_check,
    separating_space,
    separation_witness,
    stabilization_check,
    verify_separator,
)
from indvar.tower import GeneratorRule, Tower, running_sum, shifted_product, square_plus

x1, x2 = var(1), var(2)
F = square_plus()
G2 = shifted_product()


def affine_space():
    return Tower("A", lambda k: Ideal([], k))


def power_chain_zeros(rule=F):
    return ClosedSetTower("Y", affine_space(), lambda k: [rule(k)])


def irred2_points():
    """The points k*e_1 (k <= n) at level n of irred2, as a closed set."""
    X = model("irred2").towers["X"]
    return ClosedSetTower("P", X, lambda k: [G2(k)] + [var(i) for i in range(2, k + 1)])


# ---------- ind-closedness ----------


def test_power_chain_zeros_are_ind_closed():
    assert ind_closed_check(power_chain_zeros(), 6).verdict is Verdict.CERTIFIED_TRUE


def test_moving_hyperplanes_are_not_ind_closed():
    Y = ClosedSetTower("M", affine_space(), lambda k: [x1 - k])
    cert = ind_closed_check(Y, 4)
    assert cert.verdict is Verdict.CERTIFIED_FALSE
    # the point x1 = 1 lies on level 1 of Y but not on the trace of level 2
    assert cert.data["witness"] == {"level": 1, "point": [1]}


@pytest.mark.parametrize("name", ["irred2", "lines", "irred1"])
def test_whole_tower_is_ind_closed(name):
    X = model(name).towers[next(iter(model(name).towers))]
    assert ind_closed_check(ClosedSetTower("X", X, X.ideal), 5).ok


def test_catalog_closed_set_is_ind_closed_and_inside():
    Y = model("top_exa").closedsets["Y"]
    assert ind_closed_check(Y, 6).ok
    assert Y.check_inside(6).ok


def test_closed_set_outside_its_tower_is_flagged():
    X = Tower("X", lambda k: Ideal([x1], k))
    Y = ClosedSetTower("Y", X, lambda k: [x1 - 1])
    assert Y.check_inside(2).verdict is Verdict.CERTIFIED_FALSE


def test_proper_check():
    assert proper_check(power_chain_zeros(), 6).ok
    empty = ClosedSetTower("E", affine_space(), lambda k: [x1, x1 - 1] if k == 3 else [x1])
    cert = proper_check(empty, 5)
    assert cert.verdict is Verdict.CERTIFIED_FALSE
    assert cert.data["level"] == 3


# ---------- separation ----------


def test_power_chain_zeros_admit_no_separator():
    cert = separation_witness(SeparationProblem(power_chain_zeros(), (1,), 4, 4))
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert cert.data["space_dimension"] == 0


def test_coordinate_hyperplane_is_separated_by_x1():
    Y = ClosedSetTower("H", affine_space(), lambda k: [x1])
    cert = separation_witness(SeparationProblem(Y, (1, 0), 3, 2))
    assert cert.verdict is Verdict.CERTIFIED_FALSE
    phi = cert.data["witness_polynomial"]
    assert verify_separator(Y, phi, (1, 0), 3)
    # the space is x1 * (monomials of degree <= 1), and x1 itself is a separator
    assert cert.data["space_dimension"] == 4
    assert Ideal([x1], 3).contains(phi)


def test_points_on_the_axis_are_dense_in_the_axis():
    Y = irred2_points()
    cert = separation_witness(SeparationProblem(Y, (Fraction(1, 2), 0, 0, 0, 0), 6, 4))
    assert cert.verdict is Verdict.INCONCLUSIVE


def test_separation_rejects_points_of_the_set():
    with pytest.raises(ValueError):
        separation_witness(SeparationProblem(power_chain_zeros(), (0,), 3, 2))


def test_coefficient_space_bound():
    with pytest.raises(CoefficientSpaceTooLarge):
        separation_witness(SeparationProblem(power_chain_zeros(), (1,), 6, 8, max_monomials=100))


@settings(max_examples=25)
@given(
    st.lists(st.integers(-3, 3), min_size=1, max_size=3),
    st.integers(1, 3),
    st.sampled_from(["hyperplane", "moving", "axis"]),
)
def test_found_separators_replay(point, D, kind):
    rules = {
        "hyperplane": lambda k: [x1 * x2 - 1] if k > 1 else [x1 - 1],
        "moving": lambda k: [x1 - 2],
        "axis": lambda k: [var(i) for i in range(2, k + 1)] or [x1 * 0],
    }
    Y = ClosedSetTower(kind, affine_space(), rules[kind])
    depth = 3
    try:
        cert = separation_witness(SeparationProblem(Y, tuple(point), depth, D))
    except ValueError:
        return
    if cert.verdict is Verdict.CERTIFIED_FALSE:
        assert verify_separator(Y, cert.data["witness_polynomial"], point, depth)


def test_nullspace_against_sympy():
    import sympy

    rows = [{0: 1, 1: 2, 3: -1}, {1: 1, 2: 1}, {0: 1, 2: -2, 3: -1}]
    ours = nullspace(rows, 4)
    M = sympy.Matrix([[r.get(c, 0) for c in range(4)] for r in rows])
    assert len(ours) == len(M.nullspace())
    for v in ours:
        assert M * sympy.Matrix(v) == sympy.zeros(3, 1)


# ---------- power chain ----------


def test_power_chain_certificate_top():
    cert = density_certificate_power_chain(F, 6, 8)
    assert cert.verdict is Verdict.CERTIFIED_TRUE
    assert cert.data["truncation_zero"] is True
    assert cert.data["zero_levels"] == [5, 6]


def test_power_chain_running_sum_fails_restriction_law():
    cert = density_certificate_power_chain(running_sum(name="f"), 4, 4)
    assert cert.verdict is Verdict.INCONCLUSIVE
    # g_1 = x1 passes (a) and (c); the first failure is the restriction law
    assert cert.data["failed_hypothesis"] == "b"
    assert cert.data["failing_level"] == 1


def test_running_sum_zeros_are_cut_out_by_a_compatible_function():
    Y = power_chain_zeros(running_sum())
    cert = separation_witness(SeparationProblem(Y, (1,), 3, 1))
    assert cert.verdict is Verdict.CERTIFIED_FALSE


def test_power_chain_tiny_scale():
    cert = density_certificate_power_chain(F, 2, 1)
    assert cert.verdict is Verdict.CERTIFIED_TRUE
    assert cert.data["truncation_zero"] is True


def test_power_chain_degree_hypothesis():
    doubled = GeneratorRule("h", lambda x: x(1) ** 2, lambda prev, k, x: prev * prev + x(k + 1))
    cert = density_certificate_power_chain(doubled, 3, 2)
    assert cert.data["failed_hypothesis"] in ("a", "c")
    assert cert.verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("depth", [2, 3, 4])
@pytest.mark.parametrize("D", [1, 2, 3, 4])
def test_density_routes_agree(depth, D):
    # brute-force linear algebra against the certificate's truncated statement
    chain = density_certificate_power_chain(F, depth, D)
    _, basis = separating_space(power_chain_zeros(), depth, D)
    assert chain.ok
    assert (len(basis) == 0) == chain.data["truncation_zero"]


def test_density_routes_agree_at_reference_scale():
    chain = density_certificate_power_chain(F, 4, 4)
    sep = separation_witness(SeparationProblem(power_chain_zeros(), (1,), 4, 4))
    assert chain.verdict is Verdict.CERTIFIED_TRUE
    assert sep.data["space_dimension"] == 0


@pytest.mark.parametrize("d", [2, 4, 6])
def test_power_chain_monotone_in_depth(d):
    assert density_certificate_power_chain(F, d, 8).ok
    assert all(density_certificate_power_chain(F, e, 8).ok for e in range(1, d))


def test_ind_closed_but_not_zariski_closed_at_truncation():
    Y = power_chain_zeros()
    assert ind_closed_check(Y, 4).ok
    p = (1, 1, 1, 1)
    assert all(F(k).evaluate(p) != 0 for k in range(1, 5))
    assert separation_witness(SeparationProblem(Y, p, 4, 4)).verdict is Verdict.INCONCLUSIVE


# ---------- line density ----------


def test_line_density_enough_points():
    assert line_density_certificate([(k,) for k in range(1, 10)], 8).verdict is Verdict.CERTIFIED_TRUE


def test_line_density_too_few_points():
    assert line_density_certificate([(k,) for k in range(1, 4)], 8).verdict is Verdict.INCONCLUSIVE


def test_line_density_irred2_points():
    pts = [(k, 0, 0, 0, 0) for k in range(1, 7)]
    cert = line_density_certificate(pts, 4)
    assert cert.verdict is Verdict.CERTIFIED_TRUE
    assert cert.data["points"] == 6


def test_line_density_rejects_bad_input():
    with pytest.raises(ValueError):
        line_density_certificate([(1, 1)], 2)
    with pytest.raises(ValueError):
        line_density_certificate([(1,), (1,)], 2)


@given(st.sets(st.integers(-20, 20), min_size=1, max_size=8), st.integers(0, 7))
def test_line_density_matches_root_count(xs, D):
    # oracle: the product of (x - t) over the points has degree len(xs) and vanishes there
    cert = line_density_certificate([(t,) for t in xs], D)
    if len(xs) <= D:
        assert cert.verdict is Verdict.INCONCLUSIVE
    else:
        assert cert.ok


# ---------- stabilization ----------


def test_lines_stabilize_off_the_hyperplanes():
    L = model("lines").towers["L"]
    cert = stabilization_check(L, [x1 - 1, x2 - 1, var(3) - 1], 3, 7)
    assert cert.verdict is Verdict.CERTIFIED_TRUE


def test_affine_space_never_stabilizes():
    cert = stabilization_check(affine_space(), [x1], 1, 4)
    assert cert.verdict is Verdict.CERTIFIED_FALSE
    w = cert.data["witness"]
    assert w["level"] == 2
    assert w["point"][0] != 0 and w["point"][1] != 0


def test_constant_tower_stabilizes():
    C = Tower("C", lambda k: Ideal([x1 * x2 - 1], 2), ambient_rule=lambda k: 2)
    assert stabilization_check(C, [x1 + 3], 1, 5).ok
    assert stabilization_check(C, [Polynomial.constant(1)], 1, 5).ok
