"""Closed sets of a filtration in the two topologies, checked at finite depth.

A set Y is tracked through its levels Y_k = V(J_k). Ind-closedness is a
levelwise compatibility condition and can be certified outright; Zariski
closure is quantified over all global functions, so it is probed with an
exact degree-bounded search for separating functions and with the
power-chain argument over affine space.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from .certificate import Certificate, Verdict
from .ideal import Ideal, normal_form
from .points import sample_point
from .poly import Polynomial, graph_irreducible
from .tower import GeneratorRule, Tower, point_str

DEFAULT_MONOMIAL_BOUND = 5000


class ClosedSetTower:
    """Levelwise closed subsets Y_k = V(J_k) of a tower's levels."""

    def __init__(self, name: str, tower: Tower, J_rule: Callable[[int], Ideal | Sequence[Polynomial]]):
        self.name = name
        self.tower = tower
        self._rule = J_rule
        self._memo: dict[int, Ideal] = {}
        self._lock = threading.RLock()

    def ideal(self, k: int) -> Ideal:
        with self._lock:
            J = self._memo.get(k)
            if J is None:
                n = self.tower.ambient(k)
                raw = self._rule(k)
                J = raw if isinstance(raw, Ideal) else Ideal(raw, n, self.tower.field)
                if J.ambient != n:
                    J = Ideal(J.generators, n, J.field)
                self._memo[k] = J
            return J

    def ambient(self, k: int) -> int:
        return self.tower.ambient(k)

    def check_inside(self, depth: int) -> Certificate:
        """Y_k lies in X_k for k <= depth."""
        cert = Certificate("closed_set_inside", Verdict.CERTIFIED_TRUE, depth=depth)
        for k in range(1, depth + 1):
            J, I = self.ideal(k), self.tower.ideal(k)
            if not J.variety_contained_in(I):
                cert.verdict = Verdict.CERTIFIED_FALSE
                cert.note(f"{self.name}[{k}] is not contained in {self.tower.name}[{k}]")
                return cert
        cert.note(f"{self.name}[k] lies in {self.tower.name}[k] for k <= {depth}")
        return cert

    def __repr__(self):
        return f"ClosedSetTower({self.name} in {self.tower.name})"


def ind_closed_check(Y: ClosedSetTower, depth: int) -> Certificate:
    """Y_{k+1} meets X_k exactly in Y_k, for every k < depth."""
    cert = Certificate("ind_closed", Verdict.CERTIFIED_TRUE, depth=depth)
    X = Y.tower
    for k in range(1, depth):
        n = X.ambient(k)
        Jk = Y.ideal(k)
        R = Ideal([g.restrict(n) for g in Y.ideal(k + 1).generators], n, Jk.field)
        trace = R + X.ideal(k)
        # V(J_k) inside the trace: the trace generators vanish on Y_k
        down = Jk.variety_contained_in(trace)
        # the trace inside V(J_k); try the smaller ideal R first
        up = R.variety_contained_in(Jk) or trace.variety_contained_in(Jk)
        if not (down and up):
            cert.verdict = Verdict.CERTIFIED_FALSE
            which = f"{Y.name}[{k}] is not contained in {Y.name}[{k + 1}]" if not down else f"{Y.name}[{k + 1}] meets level {k} outside {Y.name}[{k}]"
            cert.note(f"level {k}: {which}")
            src, dst = (Jk, trace) if not down else (trace, Jk)
            for s in range(4):
                p = sample_point(src, seed=s)
                if p is not None and any(g.evaluate(p) != 0 for g in dst.generators):
                    cert.note(f"witness point {point_str(p, n)}")
                    cert.data["witness"] = {"level": k, "point": [p.get(i, 0) for i in range(1, n + 1)]}
                    break
            return cert
        cert.note(f"level {k}: {Y.name}[{k + 1}] cut down to level {k} equals {Y.name}[{k}]")
    return cert


# ---------- exact linear algebra ----------


def nullspace(rows: list[dict[int, Any]], ncols: int) -> list[list[Fraction]]:
    """Basis of the right kernel of a sparse matrix over QQ (rows as {col: value})."""
    pivots: list[tuple[int, dict[int, Any]]] = []
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        for pc, prow in pivots:
            if pc in r:
                f = r[pc]
                for c, v in prow.items():
                    nv = r.get(c, 0) - f * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
        if not r:
            continue
        pc = min(r)
        inv = 1 / r[pc]
        r = {c: v * inv for c, v in r.items()}
        for i, (qc, qrow) in enumerate(pivots):
            if pc in qrow:
                f = qrow[pc]
                for c, v in r.items():
                    nv = qrow.get(c, 0) - f * v
                    if nv:
                        qrow[c] = nv
                    else:
                        qrow.pop(c, None)
        pivots.append((pc, r))
    pivot_cols = {pc for pc, _ in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for pc, prow in pivots:
            vec[pc] = -prow.get(free, Fraction(0))
        basis.append(vec)
    return basis


def monomials_up_to(variables: Sequence[int], D: int) -> list[tuple]:
    """All monomials of total degree <= D in the given variables, graded."""
    out = []
    n = len(variables)
    for d in range(D + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            exps: dict[int, int] = {}
            for i in combo:
                exps[variables[i]] = exps.get(variables[i], 0) + 1
            out.append(tuple(sorted(exps.items())))
    return out


# ---------- separation ----------


@dataclass
class SeparationProblem:
    Y: ClosedSetTower
    point: tuple
    depth: int
    degree_bound: int
    max_monomials: int = DEFAULT_MONOMIAL_BOUND


class CoefficientSpaceTooLarge(ValueError):
    pass


def _coords(point: Sequence[Any], n: int) -> dict[int, Fraction]:
    return {i: Fraction(point[i - 1]) if i <= len(point) else Fraction(0) for i in range(1, n + 1)}


def separating_space(Y: ClosedSetTower, depth: int, D: int, max_monomials: int = DEFAULT_MONOMIAL_BOUND) -> tuple[list[tuple], list[list[Fraction]]]:
    """The space L of phi, deg phi <= D at level ``depth``, with restrict(phi, n_k) in J_k for all k <= depth.

    Returns the monomial basis and a basis of L as coefficient vectors.
    """
    n = Y.ambient(depth)
    monos = monomials_up_to(list(range(1, n + 1)), D)
    if len(monos) > max_monomials:
        raise CoefficientSpaceTooLarge(f"{len(monos)} monomials exceed the bound {max_monomials}")
    rows: list[dict[int, Any]] = []
    for k in range(1, depth + 1):
        nk = Y.ambient(k)
        G = Y.ideal(k).groebner()
        by_mono: dict[tuple, dict[int, Any]] = {}
        for col, m in enumerate(monos):
            if any(v > nk for v, _ in m):
                continue
            r = normal_form(Polynomial.monomial(m, 1, Y.tower.field), G)
            for mm, c in r:
                by_mono.setdefault(mm, {})[col] = c
        rows.extend(by_mono.values())
    return monos, nullspace(rows, len(monos))


def separation_witness(P: SeparationProblem) -> Certificate:
    """Search for a function of degree <= D vanishing on Y up to depth but not at the point.

    CERTIFIED_FALSE means the point is certified outside the Zariski closure
    of Y (the witness is a genuine separating function); INCONCLUSIVE means
    every candidate vanishes at the point at this truncation.
    """
    Y, depth, D = P.Y, P.depth, P.degree_bound
    n = Y.ambient(depth)
    cert = Certificate("separation", Verdict.INCONCLUSIVE, depth=depth, degree_bound=D)
    for k in range(1, depth + 1):
        pk = _coords(P.point, Y.ambient(k))
        if any(abs(v) for i, v in enumerate(P.point, 1) if i > Y.ambient(k)):
            continue
        if all(g.evaluate(pk) == 0 for g in Y.ideal(k).generators):
            raise ValueError(f"the point lies on {Y.name}[{k}]")
    monos, basis = separating_space(Y, depth, D, P.max_monomials)
    pt = _coords(P.point, n)
    values = [Polynomial.monomial(m).evaluate(pt) for m in monos]
    cert.data["space_dimension"] = len(basis)
    cert.data["monomials"] = len(monos)
    cert.note(f"{len(monos)} monomials of degree <= {D} in x1..x{n}; the vanishing space has dimension {len(basis)}")
    for vec in basis:
        if sum((a * b for a, b in zip(vec, values)), Fraction(0)) != 0:
            phi = Polynomial({m: c for m, c in zip(monos, vec) if c}, Y.tower.field)
            cert.verdict = Verdict.CERTIFIED_FALSE
            cert.data["witness"] = str(phi)
            cert.data["witness_value"] = phi.evaluate(pt)
            cert.data["witness_polynomial"] = phi
            cert.note(f"separating function {phi} vanishes on {Y.name} up to level {depth} and equals {phi.evaluate(pt)} at the point")
            return cert
    cert.note("every candidate vanishes at the point: no separator at this truncation")
    return cert


def verify_separator(Y: ClosedSetTower, phi: Polynomial, point: Sequence[Any], depth: int) -> bool:
    """Independent replay of a separating function."""
    for k in range(1, depth + 1):
        if not Y.ideal(k).contains(phi.restrict(Y.ambient(k))):
            return False
    return phi.evaluate(_coords(point, Y.ambient(depth))) != 0


# ---------- density certificates ----------


def density_certificate_power_chain(f_rule: GeneratorRule, depth: int, D: int) -> Certificate:
    """No nonzero function of degree <= D vanishes on the union of V(f_k) in A^infinity.

    Hypotheses, each checked for k <= depth: (a) f_k is graph-irreducible,
    so (f_k) is prime; (b) f_{k+1} restricts to f_k^2; (c) deg f_k = 2^(k-1).
    A vanishing phi then has phi_k in (f_k^(2^i)) whenever the hypotheses
    reach level k + i, a principal ideal generated in degree 2^(k-1+i), so
    phi_k = 0 once that degree exceeds D. The verdict is CERTIFIED_TRUE when
    the hypotheses hold up to depth. ``data["truncation_zero"]`` records the
    stronger truncated statement, that every compatible phi of degree <= D
    vanishing on V(f_1), ..., V(f_depth) is already zero, which needs
    2^(depth-1) > D; otherwise the argument uses levels beyond depth, where
    the hypotheses are not checked.
    """
    cert = Certificate("density_power_chain", Verdict.CERTIFIED_TRUE, depth=depth, degree_bound=D)
    failed = None
    for k in range(1, depth + 1):
        fk = f_rule(k)
        if fk.is_constant() or not graph_irreducible(fk).ok:
            failed = ("a", k, f"{f_rule.name}[{k}] is not certified irreducible")
            break
        if fk.degree() != 2 ** (k - 1):
            failed = ("c", k, f"deg {f_rule.name}[{k}] = {fk.degree()}, expected {2 ** (k - 1)}")
            break
        if k < depth and f_rule.restricted(k + 1, k) != fk * fk:
            failed = ("b", k, f"{f_rule.name}[{k + 1}] does not restrict to {f_rule.name}[{k}]^2")
            break
    if failed:
        cert.verdict = Verdict.INCONCLUSIVE
        cert.data["failed_hypothesis"] = failed[0]
        cert.data["failing_level"] = failed[1]
        cert.note(f"hypothesis ({failed[0]}) fails: {failed[2]}")
        return cert
    cert.note(f"(a) {f_rule.name}[k] graph-irreducible for k <= {depth}")
    cert.note(f"(b) {f_rule.name}[k+1] restricts to {f_rule.name}[k]^2 for k < {depth}")
    cert.note(f"(c) deg {f_rule.name}[k] = 2^(k-1) for k <= {depth}")
    top = 2 ** (depth - 1)
    cert.data["top_degree"] = top
    cert.data["truncation_zero"] = top > D
    cert.data["zero_levels"] = [k for k in range(1, depth + 1) if 2 ** (k - 1) > D]
    if top > D:
        cert.note(f"a vanishing function of degree <= {D} restricts into ({f_rule.name}[k]^(2^({depth}-k))), generated in degree {top}, so it is 0 at every level up to {depth}")
    else:
        cert.note(f"2^({depth}-1) = {top} <= {D}: the truncated statement needs deeper levels; the conclusion rests on the hypotheses continuing past level {depth}")
    return cert


def line_density_certificate(points: Sequence[Sequence[Any]], D: int) -> Certificate:
    """Distinct points on the x1-axis force degree-<=D functions to vanish on the whole axis once there are D+1 of them."""
    xs = set()
    for p in points:
        if any(Fraction(c) != 0 for c in p[1:]):
            raise ValueError(f"point {tuple(p)} is not on the x1-axis")
        xs.add(Fraction(p[0]))
    if len(xs) != len(points):
        raise ValueError("points must be distinct")
    cert = Certificate("line_density", Verdict.CERTIFIED_TRUE, degree_bound=D)
    cert.data["points"] = len(xs)
    if len(xs) >= D + 1:
        cert.note(f"{len(xs)} distinct points on the x1-axis; a univariate polynomial of degree <= {D} vanishing there is 0")
    else:
        cert.verdict = Verdict.INCONCLUSIVE
        cert.note(f"only {len(xs)} points for degree bound {D}")
    return cert


def proper_check(Y: ClosedSetTower, depth: int) -> Certificate:
    """No J_k, k <= depth, is the unit ideal."""
    cert = Certificate("proper", Verdict.CERTIFIED_TRUE, depth=depth)
    for k in range(1, depth + 1):
        if Y.ideal(k).is_unit():
            cert.verdict = Verdict.CERTIFIED_FALSE
            cert.note(f"{Y.name}[{k}] is empty: 1 lies in its ideal")
            cert.data["level"] = k
            return cert
    cert.note(f"1 is not in J_k for k <= {depth}")
    return cert


def stabilization_check(T: Tower, h: Sequence[Polynomial], N: int, depth: int) -> Certificate:
    """Off V(h), the levels stop growing: X_{n+1} minus V(h_j) lies in X_n for N <= n < depth."""
    cert = Certificate("stabilization", Verdict.CERTIFIED_TRUE, depth=depth)
    for n in range(N, depth):
        lo, hi = T.materialize_level(n), T.materialize_level(n + 1)
        lower = lo.ideal.embedded(hi.ambient)
        for j, hj in enumerate(h, 1):
            bad = next((g for g in lower.generators if not hi.ideal.radical_contains(g * hj)), None)
            if bad is not None:
                cert.verdict = Verdict.CERTIFIED_FALSE
                cert.note(f"level {n + 1} has points off V({hj}) outside level {n}: {bad}*({hj}) does not vanish on level {n + 1}")
                for s in range(6):
                    p = sample_point(hi.ideal, seed=s)
                    if p is not None and hj.evaluate(p) != 0 and bad.evaluate(p) != 0:
                        cert.note(f"witness point {point_str(p, hi.ambient)}")
                        cert.data["witness"] = {"level": n + 1, "point": [p.get(i, 0) for i in range(1, hi.ambient + 1)]}
                        break
                return cert
        cert.note(f"level {n + 1} agrees with level {n} off V(h)")
    return cert
