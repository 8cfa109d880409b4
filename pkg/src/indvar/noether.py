"""Noether normalizations, their extension along closed embeddings, and the
f_k = f_{k-1}^2 + c_k t_k witness construction along a filtration.

Random choices come from a seeded ``random.Random`` local to each call; every
property used later is re-verified on the objects actually produced.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .certificate import Certificate, Verdict, combine
from .ideal import Ideal, ResourceError, algebra_kernel, finiteness_test, krull_dimension, monic_relation
from .poly import Polynomial, graph_irreducible
from .topology import ClosedSetTower, density_certificate_power_chain, ind_closed_check
from .tower import GeneratorRule, Tower, point_str

DEFAULT_RETRIES = 20
COEFFICIENT_RANGE = 100
SUBSET_CAP = 64


class RetryLimitExceeded(ResourceError):
    def __init__(self, message: str, last: Certificate | None = None):
        super().__init__(message)
        self.last = last


@dataclass
class Normalization:
    """Coordinates u_1..u_d with k[x]/I finite over k[u] and the u algebraically independent."""

    ideal: Ideal
    coordinates: list[Polynomial]
    finiteness: Certificate
    log: list[str] = field(default_factory=list)
    seed: int | None = None
    attempts: int = 0

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def verify(self) -> Certificate:
        """Re-check finiteness and algebraic independence from scratch."""
        fin = finiteness_test(self.ideal, self.coordinates)
        ker = algebra_kernel(self.coordinates, self.ideal)
        kcert = Certificate("independence", Verdict.CERTIFIED_TRUE if ker.is_zero() else Verdict.CERTIFIED_FALSE)
        kcert.note("kernel of k[y] -> k[x]/I is " + ("zero" if ker.is_zero() else str(ker)))
        return combine("normalization", {"finite": fin, "independent": kcert})

    def __repr__(self):
        return f"Normalization([{', '.join(str(c) for c in self.coordinates)}])"


def _nonzero(rng: random.Random) -> int:
    c = 0
    while c == 0:
        c = rng.randint(-COEFFICIENT_RANGE, COEFFICIENT_RANGE)
    return c


def _independent(F: Sequence[Polynomial], I: Ideal) -> bool:
    return algebra_kernel(F, I).is_zero()


def noether_normalize(I: Ideal, seed: int = 0, retries: int = DEFAULT_RETRIES) -> Normalization:
    """Coordinate subsets first, then seeded random linear forms."""
    if I.is_unit():
        raise ValueError("noether_normalize needs a proper ideal")
    d = krull_dimension(I)
    n = I.ambient
    fld = I.field
    xs = [Polynomial.variable(i, fld) for i in range(1, n + 1)]
    log: list[str] = []
    last = None
    for subset in itertools.islice(itertools.combinations(range(n), d), SUBSET_CAP):
        F = [xs[i] for i in subset]
        cert = finiteness_test(I, F)
        if cert.ok and _independent(F, I):
            log.append(f"coordinate subset {{{', '.join(str(f) for f in F)}}} is a normalization")
            return Normalization(I, F, cert, log, seed, 0)
        last = cert
    log.append(f"no coordinate subset of size {d} works")
    rng = random.Random(seed)
    for attempt in range(1, retries + 1):
        F = [sum((_nonzero(rng) * x for x in xs), Polynomial.constant(0, fld)) for _ in range(d)]
        cert = finiteness_test(I, F)
        if cert.ok and _independent(F, I):
            log.append(f"attempt {attempt}: random linear forms succeed")
            return Normalization(I, F, cert, log, seed, attempt)
        log.append(f"attempt {attempt}: {'not finite' if not cert.ok else 'dependent'}")
        last = cert
    raise RetryLimitExceeded(f"no normalization after {retries} random attempts (seed {seed})", last)


def extend_normalization(
    I_Y: Ideal,
    I_Z: Ideal,
    N_Z: Normalization,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> Normalization:
    """Normalization of Y whose leading coordinates restrict to those of N_Z and whose trailing ones vanish on Z.

    Requires V(I_Z) to lie in V(I_Y). Working set: the given coordinates plus
    h_j = p_j(x_j) for monic relations p_j of x_j over k[N_Z] modulo I_Z.
    While the working set is algebraically dependent, the last h is folded
    into the others with random coefficients.
    """
    n = max(I_Y.ambient, I_Z.ambient)
    I_Y = I_Y.at_ambient(n)
    I_Z = I_Z.at_ambient(n)
    if not I_Z.variety_contained_in(I_Y):
        raise ValueError("V(I_Z) is not contained in V(I_Y)")
    base = list(N_Z.coordinates)
    log = [f"lifting {len(base)} coordinates from Z"]
    hs: list[Polynomial] = []
    for j in range(1, n + 1):
        p = monic_relation(I_Z, base, j)
        if p is None:
            raise ValueError(f"x{j} is not integral over the given coordinates of Z")
        h = p.substitute({-(i + 1): b for i, b in enumerate(base)}, partial=True)
        if h.is_constant() or I_Y.contains(h):
            continue
        log.append(f"x{j}: monic relation {p}; h = {h}")
        hs.append(h)
    # generators of B already in ker(Z) have relation T itself; when they
    # alone complete the lifted coordinates, the folding loop is not needed
    direct = [h for h in hs if len(h) == 1 and h.degree() == 1]
    if len(direct) < len(hs):
        cert = finiteness_test(I_Y, base + direct)
        if cert.ok and _independent(base + direct, I_Y):
            log.append("the coordinates vanishing on Z already complete a normalization")
            return Normalization(I_Y, base + direct, cert, log, seed, 0)
    rng = random.Random(seed)
    attempts = 0
    while not _independent(base + hs, I_Y):
        if not hs:
            raise ValueError("the given coordinates of Z are dependent on Y")
        last = hs[-1]
        for _ in range(retries + 1):
            attempts += 1
            if attempts > retries:
                raise RetryLimitExceeded(f"extension needs more than {retries} random draws (seed {seed})")
            cs = [_nonzero(rng) for _ in range(len(base) + len(hs) - 1)]
            nb = [b - c * last for b, c in zip(base, cs)]
            nh = [h - c * last for h, c in zip(hs[:-1], cs[len(base):])]
            if finiteness_test(I_Y, nb + nh).ok:
                log.append(f"folded {last} into the others with coefficients {cs}")
                base, hs = nb, nh
                break
            log.append(f"draw {cs} loses finiteness")
    coords = base + hs
    cert = finiteness_test(I_Y, coords)
    if not cert.ok:
        raise RetryLimitExceeded("final coordinates are not finite", cert)
    return Normalization(I_Y, coords, cert, log, seed, attempts)


def check_extension(N_Y: Normalization, I_Z: Ideal, N_Z: Normalization) -> Certificate:
    """Finiteness, independence, and the restriction property, all recomputed."""
    I_Z = I_Z.at_ambient(N_Y.ideal.ambient)
    d = N_Z.dimension
    restr = Certificate("restriction", Verdict.CERTIFIED_TRUE)
    for u, v in zip(N_Y.coordinates[:d], N_Z.coordinates):
        if not I_Z.radical_contains(u - v):
            restr.verdict = Verdict.CERTIFIED_FALSE
            restr.note(f"{u} does not restrict to {v} on Z")
    for u in N_Y.coordinates[d:]:
        if not I_Z.radical_contains(u):
            restr.verdict = Verdict.CERTIFIED_FALSE
            restr.note(f"trailing coordinate {u} does not vanish on Z")
    if restr.ok:
        restr.note(f"the first {d} coordinates restrict to those of Z; the other {N_Y.dimension - d} vanish on Z")
    base = N_Y.verify()
    return combine("extension", {**base.data["certificates"], "restriction": restr})


# ---------- witness construction along a filtration ----------


def _is_affine_space(T: Tower, depth: int) -> bool:
    return all(T.ideal(k).is_zero() and T.ambient(k) == k for k in range(1, depth + 1))


def _through(ideal: Ideal, point: dict[int, Fraction]) -> bool:
    return all(g.evaluate(point) == 0 for g in ideal.generators)


def main_prop_witness(
    T: Tower,
    x: Sequence[Any],
    depth: int,
    D: int,
    seed: int = 0,
    c_fixed: Any = None,
    retries: int = DEFAULT_RETRIES,
) -> tuple[ClosedSetTower, Certificate]:
    """Build f_1 = c_1 u_1, f_k = f_{k-1}^2 + c_k t_k along a coordinate flag and certify Y = union of V(f_k).

    ``t_k`` is the first coordinate added at level k (it vanishes on the
    previous level); levels that add no coordinate use f_k = f_{k-1}^2.
    ``c_fixed`` replaces the seeded random coefficients by a constant.
    """
    try:
        base = [Fraction(c) for c in x]
    except (TypeError, ValueError) as exc:
        raise ValueError(f"base point must have rational coordinates: {exc}") from None
    rng = random.Random(seed)
    fld = T.field

    def point(n: int) -> dict[int, Fraction]:
        return {i: base[i - 1] if i <= len(base) else Fraction(0) for i in range(1, n + 1)}

    if any(c != 0 for c in base[T.ambient(1):]) or not _through(T.ideal(1), point(T.ambient(1))):
        raise ValueError(f"base point {point_str(base)} is not on level 1")

    flag: list[Normalization] = []
    N = noether_normalize(T.ideal(1), seed=seed, retries=retries)
    shifted = [u - u.evaluate(point(T.ambient(1))) for u in N.coordinates]
    N = Normalization(N.ideal, shifted, finiteness_test(N.ideal, shifted), N.log + ["coordinates shifted to vanish at the base point"], seed, N.attempts)
    flag.append(N)
    for k in range(2, depth + 1):
        prev = flag[-1]
        lower = Ideal(T.ideal(k - 1).generators, T.ambient(k - 1), fld).at_ambient(T.ambient(k))
        flag.append(extend_normalization(T.ideal(k), lower, prev, seed=seed + k, retries=retries))

    def coefficient() -> Fraction:
        return Fraction(c_fixed) if c_fixed is not None else Fraction(_nonzero(rng))

    cs: dict[int, Fraction] = {}
    trailing: dict[int, Polynomial] = {}
    if flag[0].dimension:
        cs[1] = coefficient()
        trailing[1] = flag[0].coordinates[0]
    for k in range(2, depth + 1):
        new = flag[k - 1].coordinates[flag[k - 2].dimension:]
        if new:
            cs[k] = coefficient()
            trailing[k] = new[0]

    zero = Polynomial.constant(0, fld)

    def sub(p: Polynomial, xv) -> Polynomial:
        return p.substitute({v: xv(v) for v in p.variables()}) if p.variables() else p

    rule = GeneratorRule(
        "f",
        lambda xv: cs[1] * sub(trailing[1], xv) if 1 in cs else zero,
        lambda prev, k, xv: prev * prev + (cs[k + 1] * sub(trailing[k + 1], xv) if k + 1 in cs else zero),
        fld,
    )
    Y = ClosedSetTower("Y", T, lambda k: T.ideal(k) + Ideal([rule(k)], T.ambient(k), fld))
    parts: dict[str, Certificate] = {}

    flag_cert = Certificate("coordinate_flag", Verdict.CERTIFIED_TRUE, depth=depth)
    for k, Nk in enumerate(flag, 1):
        v = Nk.verify() if k == 1 else check_extension(Nk, Ideal(T.ideal(k - 1).generators, T.ambient(k - 1), fld), flag[k - 2])
        flag_cert.note(f"level {k}: coordinates [{', '.join(str(c) for c in Nk.coordinates)}]: {v.verdict}")
        if not v.ok:
            flag_cert.verdict = v.verdict
    parts["coordinate_flag"] = flag_cert

    vanish = Certificate("vanishes_at_point", Verdict.CERTIFIED_TRUE, depth=depth)
    law = Certificate("restriction_law", Verdict.CERTIFIED_TRUE, depth=depth)
    for k in range(1, depth + 1):
        fk = rule(k)
        if fk.evaluate(point(T.ambient(k))) != 0:
            vanish.verdict = Verdict.CERTIFIED_FALSE
            vanish.note(f"f[{k}] is nonzero at the base point")
        if k < depth:
            diff = rule.restricted(k + 1, T.ambient(k)) - fk * fk
            if not T.ideal(k).radical_contains(diff):
                law.verdict = Verdict.CERTIFIED_FALSE
                law.note(f"f[{k + 1}] does not restrict to f[{k}]^2 on level {k}")
    vanish.note(f"f[k] vanishes at {point_str(base)} for k <= {depth}")
    law.note(f"f[k+1] restricts to f[k]^2 on level k for k < {depth}")
    parts["vanishes_at_point"] = vanish
    parts["restriction_law"] = law

    nonvan = Certificate("component_nonvanishing", Verdict.CERTIFIED_TRUE, depth=depth)
    for k in range(1, depth + 1):
        fk = rule(k)
        if fk.is_zero():
            nonvan.note(f"f[{k}] = 0: level {k} has dimension 0 at the base point, nothing to check")
            continue
        for comp in T.components(k):
            if not _through(comp.ideal, point(T.ambient(k))):
                continue
            if comp.ideal.radical_contains(fk):
                nonvan.verdict = Verdict.CERTIFIED_FALSE
                nonvan.note(f"f[{k}] vanishes on the component {comp.label}")
            else:
                nonvan.note(f"f[{k}] is not identically zero on {comp.label}")
    parts["component_nonvanishing"] = nonvan

    parts["ind_closed"] = ind_closed_check(Y, depth)

    reduced = Certificate("reduced_quotient", Verdict.CONDITIONAL, depth=depth)
    if _is_affine_space(T, depth):
        parts["density"] = density_certificate_power_chain(rule, depth, D)
        if all(graph_irreducible(rule(k)).ok for k in range(2, depth + 1) if not rule(k).is_constant()):
            reduced.verdict = Verdict.CERTIFIED_TRUE
            reduced.note("every f[k] is graph-irreducible, so (f[k]) is prime and the quotient is reduced")
        else:
            reduced.verdict = Verdict.INCONCLUSIVE
            reduced.note("some f[k] is not certified irreducible")
    else:
        reduced.note("UNVERIFIED: reducedness of the local quotient is not checked on general towers")
    parts["reduced_quotient"] = reduced

    cert = combine("noether_witness", parts, depth=depth, degree_bound=D)
    cert.data["coefficients"] = {k: c for k, c in sorted(cs.items())}
    cert.data["f"] = {k: str(rule(k)) for k in range(1, min(depth, 4) + 1)}
    cert.data["flag"] = [[str(c) for c in N.coordinates] for N in flag]
    cert.data["rule"] = rule
    return Y, cert
