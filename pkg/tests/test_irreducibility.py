import random

import pytest

from conftest import model
from indvar.certificate import Verdict
from indvar.ideal import Ideal
from indvar.irreducibility import (
    IRREDUCIBLE,
    REDUCIBLE,
    UNDECIDED,
    certify_prime,
    component_poset,
    find_dense_chain,
    find_reducible_cover,
    irreducibility_verdict,
    is_directed,
    level_components,
    prune_components,
    verify_decomposition,
)
from indvar.points import enumerate_points_mod_p
from indvar.poly import Polynomial, var
from indvar.topology import ind_closed_check
from indvar.tower import Component, Tower, running_sum, shifted_product, square_plus

x1, x2, x3 = var(1), var(2), var(3)
F = square_plus()
G = running_sum()
G2 = shifted_product()


def affine_space():
    return Tower("A", lambda k: Ideal([], k))


def irred2_pieces(n):
    return Ideal([G2(n)], n), Ideal([var(i) for i in range(2, n + 1)], n)


# ---------- primality ----------


def test_certify_prime_cases():
    assert certify_prime(Ideal([], 3)).ok
    assert certify_prime(Ideal([F(3)], 3)).ok
    assert certify_prime(Ideal([x2, x3], 3)).ok
    assert certify_prime(Ideal([x2 - x1**2, x3 - x1 * x2], 3)).ok
    assert not certify_prime(Ideal([x1 * x2], 2)).ok
    assert not certify_prime(Ideal([Polynomial.constant(1)], 1)).ok


# ---------- decompositions ----------


def test_irred1_level_two_decomposes():
    cert = verify_decomposition(Ideal([F(2) * G(2)], 2), [Ideal([F(2)], 2), Ideal([G(2)], 2)])
    assert cert.verdict is Verdict.CERTIFIED_TRUE


@pytest.mark.parametrize("n", range(2, 7))
def test_irred2_levels_decompose(n):
    X = model("irred2").towers["X"]
    cert = verify_decomposition(X.ideal(n), list(irred2_pieces(n)))
    assert cert.verdict is Verdict.CERTIFIED_TRUE


def test_dropped_component_is_detected():
    X = model("irred2").towers["X"]
    Y2, _ = irred2_pieces(2)
    cert = verify_decomposition(X.ideal(2), [Y2])
    assert cert.verdict is Verdict.CERTIFIED_FALSE
    w = cert.data["witness"]
    # the witness lies on Z_2 (x2 = 0) and off Y_2
    assert w[1] == 0 and G2(2).evaluate(w) != 0


def test_foreign_component_is_detected():
    cert = verify_decomposition(Ideal([x1 * x2], 2), [Ideal([x1], 2), Ideal([x2], 2), Ideal([x1 - 1], 2)])
    assert cert.verdict is Verdict.CERTIFIED_FALSE


def test_declared_component_downgrades_to_conditional():
    pieces = [Component(Ideal([x1], 2), "A"), Component(Ideal([x2 * (x2 - 1)], 2), "B", declared=True, note="two lines")]
    cert = verify_decomposition(Ideal([x1 * x2 * (x2 - 1)], 2), pieces)
    assert cert.verdict is Verdict.CONDITIONAL
    assert any("two lines" in e for e in cert.evidence)


def test_unproven_component_is_inconclusive():
    cert = verify_decomposition(Ideal([x1 * (x2**2 - x1**3)], 2), [Ideal([x1], 2), Ideal([x2**2 - x1**3], 2)])
    assert cert.verdict is Verdict.INCONCLUSIVE


def test_redundant_pieces_are_reported():
    comps = [Component(Ideal([x1], 2), "L"), Component(Ideal([x1, x2], 2), "P")]
    keep, notes = prune_components(comps)
    assert [c.label for c in keep] == ["L"]
    assert notes == ["P lies in L"]


# ---------- component posets ----------


def test_power_chain_tower_is_a_single_chain():
    T = Tower("V", lambda k: [F(k)])
    P = component_poset(T, 5)
    assert P.nodes == [(k, 0) for k in range(1, 6)]
    for a in range(1, 6):
        for b in range(a, 6):
            assert P.below((a, 0), (b, 0))


@pytest.mark.parametrize("n", range(2, 9))
def test_irred2_has_two_components_per_level(n):
    assert len(level_components(model("irred2").towers["X"], n)) == 2


def test_irred2_poset_has_no_cross_inclusions():
    P = component_poset(model("irred2").towers["X"], 8)
    label = {n: P.label(n) for n in P.nodes}
    for a, b in P.leq:
        assert label[a][0] == label[b][0]
    for k in range(2, 8):
        ys = [n for n in P.level(k) if label[n].startswith("Y")]
        zs = [n for n in P.level(k) if label[n].startswith("Z")]
        ys1 = [n for n in P.level(k + 1) if label[n].startswith("Y")]
        zs1 = [n for n in P.level(k + 1) if label[n].startswith("Z")]
        assert P.below(ys[0], ys1[0]) and P.below(zs[0], zs1[0])
        assert not P.below(ys[0], zs1[0]) and not P.below(zs[0], ys1[0])
    # the separating point (k+1)e_1 lies on Z but on no Y_m for m <= k
    for m in range(2, 8):
        for k in range(m, 8):
            assert G2(m).evaluate([k + 1]) != 0


@pytest.mark.parametrize("name", ["irred2", "irred1", "lines"])
def test_poset_inclusions_hold_at_points_mod_101(name):
    T = model(name).towers[next(iter(model(name).towers))]
    P = component_poset(T, 4)
    rng = random.Random(7)
    checked = 0
    for a, b in sorted(P.leq):
        A, B = P.components[a].ideal, P.components[b].ideal
        if A.ambient > 3:
            continue
        pts = enumerate_points_mod_p(A, 101)
        for pt in rng.sample(pts, min(20, len(pts))):
            for g in B.generators:
                r = g.restrict(A.ambient)
                assert _mod(r.evaluate(list(pt))) == 0
            checked += 1
    assert checked > 0


def _mod(value, p=101):
    return (value.numerator * pow(value.denominator, -1, p)) % p


# ---------- directedness ----------


def test_irred2_is_not_directed_to_depth_eight():
    cert = is_directed(component_poset(model("irred2").towers["X"], 8))
    assert cert.verdict is Verdict.FAILS_UP_TO_DEPTH
    assert cert.data["pair"] == ["Y[2]", "Z[2]"]
    assert set(cert.data["separating_points"]) == set(range(2, 9))


def test_affine_space_is_directed():
    assert is_directed(component_poset(affine_space(), 5)).verdict is Verdict.CERTIFIED_TRUE


def test_irred1_is_not_directed_to_depth_eight():
    cert = is_directed(component_poset(model("irred1").towers["X"], 8))
    assert cert.verdict is Verdict.FAILS_UP_TO_DEPTH
    assert cert.data["pair"] == ["F[2]", "G[2]"]


@pytest.mark.parametrize("d", [2, 3, 5])
def test_directedness_is_monotone(d):
    for T in (affine_space(), Tower("V", lambda k: [F(k)]), model("lines").towers["L"]):
        P = component_poset(T, d)
        if is_directed(P, d).ok:
            assert all(is_directed(P, e).ok for e in range(1, d))


def test_pair_at_truncation_level_is_inconclusive():
    comps = {1: [Component(Ideal([], 1), "A1")], 2: [Component(Ideal([x1], 2), "P"), Component(Ideal([x1 - 1], 2), "Q")]}
    T = Tower.explicit("T", {1: Ideal([], 1), 2: Ideal([x1 * (x1 - 1)], 2)}, comps)
    assert is_directed(component_poset(T, 2)).verdict is Verdict.INCONCLUSIVE


# ---------- verdicts ----------


def test_irred2_is_irreducible_through_the_y_chain():
    cert = irreducibility_verdict(model("irred2").towers["X"], 6, 4)
    assert cert.data["verdict"] == IRREDUCIBLE
    assert cert.verdict is Verdict.CERTIFIED_TRUE
    assert cert.data["chain"] == {k: f"Y[{k}]" for k in range(2, 7)}
    lines = cert.data["dense_chain"].data["line_density"]
    assert lines["Z[5]"]["points"] == [str(k) for k in range(1, 7)]
    assert lines["Z[5]"]["certificate"].ok


def test_irred2_with_zariski_evidence():
    cert = irreducibility_verdict(model("irred2").towers["X"], 5, 4, zariski_point=(7, 0, 0, 0, 0))
    assert cert.data["verdict"] == IRREDUCIBLE
    assert cert.data["zariski_separation"].verdict is Verdict.INCONCLUSIVE


def test_irred1_is_reducible_with_ind_closed_covers():
    T = model("irred1").towers["X"]
    cert = irreducibility_verdict(T, 6, 8)
    assert cert.data["verdict"] == REDUCIBLE
    assert cert.verdict is Verdict.CERTIFIED_FALSE
    cover = cert.data["cover"]
    assert cover.data["cover"] == ["F[6]", "G[6]"]
    assert all(c.ok for c in cover.data["ind_closed"])
    w_f, w_g = cover.data["witnesses"]
    assert F(len(w_f)).evaluate(w_f) == 0 and G(len(w_f)).evaluate(w_f) != 0
    assert G(len(w_g)).evaluate(w_g) == 0 and F(len(w_g)).evaluate(w_g) != 0


def test_affine_space_is_irreducible():
    cert = irreducibility_verdict(affine_space(), 4, 4)
    assert cert.data["verdict"] == IRREDUCIBLE
    assert cert.data["directed"].ok


def test_component_bound():
    cert = irreducibility_verdict(model("irred2").towers["X"], 4, 4, max_components=1)
    assert cert.data["verdict"] == UNDECIDED
    assert cert.verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("name", ["irred1", "irred2", "lines"])
def test_verdicts_are_never_both(name):
    T = model(name).towers[next(iter(model(name).towers))]
    P = component_poset(T, 5)
    chain, cover = find_dense_chain(P, 4), find_reducible_cover(P)
    assert not (chain.ok and cover.ok)
    if cover.ok:
        assert all(c.ok for c in cover.data["ind_closed"])


def test_reducible_cover_halves_are_ind_closed_independently():
    from indvar.ideal import intersect_all
    from indvar.topology import ClosedSetTower

    T = model("irred1").towers["X"]
    P = component_poset(T, 5)
    for label in ("F", "G"):
        Y = ClosedSetTower(label, T, lambda k, s=label: intersect_all([c.ideal for c in level_components(T, k) if c.label.startswith(s) or k == 1]))
        assert ind_closed_check(Y, 5).ok
    assert find_reducible_cover(P).ok
