"""Exact points on varieties: seeded rational sampling and full enumeration over small prime fields."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from .poly import QQ, Polynomial, PrimeField

if TYPE_CHECKING:
    from .ideal import Ideal

_ROOT_SEARCH_CAP = 10**7


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def rational_roots(f: Polynomial) -> list[Fraction]:
    """Distinct rational roots of a univariate polynomial over QQ, sorted.

    Gives up (returns the roots found so far among 0 and small candidates)
    when the coefficients are too large for divisor enumeration.
    """
    vs = f.variables()
    if len(vs) > 1:
        raise ValueError("rational_roots expects a univariate polynomial")
    if f.is_constant():
        return []
    (v,) = vs
    coeffs: dict[int, Fraction] = {}
    for m, c in f:
        coeffs[m[0][1] if m else 0] = Fraction(c)
    low = min(coeffs)
    roots: set[Fraction] = {Fraction(0)} if low > 0 else set()
    coeffs = {e - low: c for e, c in coeffs.items()}
    top = max(coeffs)
    if top == 0:
        return sorted(roots)
    scale = math.lcm(*(c.denominator for c in coeffs.values()))
    ints = {e: int(c * scale) for e, c in coeffs.items()}
    a0, an = ints[0], ints[top]

    def value(x: Fraction) -> Fraction:
        return sum((c * x**e for e, c in ints.items()), Fraction(0))

    if abs(a0) > _ROOT_SEARCH_CAP or abs(an) > _ROOT_SEARCH_CAP:
        for num in range(-20, 21):
            if num and value(Fraction(num)) == 0:
                roots.add(Fraction(num))
        return sorted(roots)
    for p in _divisors(a0):
        for q in _divisors(an):
            for s in (p, -p):
                x = Fraction(s, q)
                if x not in roots and value(x) == 0:
                    roots.add(x)
    return sorted(roots)


def _linear_solve(g: Polynomial) -> tuple[int, Polynomial] | None:
    """If g = c*v + B with c constant and B free of v, return (v, -B/c)."""
    for v in sorted(g.variables(), key=lambda v: (v < 0, -abs(v))):
        if g.degree_in(v) != 1:
            continue
        d = g.diff(v)
        if d.is_constant() and d:
            c = d.constant_value()
            rest = g - c * Polynomial.variable(v, g.field)
            return v, -rest / c
    return None


def sample_point(I: "Ideal", seed: int = 0, attempts: int = 8, spread: int = 7) -> dict[int, Any] | None:
    """A point of V(I) with rational coordinates, or None if none was found.

    The returned mapping assigns every ambient variable and every variable of
    the generators; the point is checked exactly against all generators.
    Deterministic for a fixed seed.
    """
    if I.field != QQ:
        return None
    rng = random.Random(seed)
    variables = sorted(set(range(1, I.ambient + 1)) | I.variables(), key=lambda v: (v < 0, abs(v)))
    for attempt in range(attempts):
        point = _attempt(I, variables, rng, spread, zero_bias=attempt % 2 == 0)
        if point is not None and all(g.evaluate(point) == 0 for g in I.generators):
            return point
    return None


def _attempt(I, variables, rng, spread, zero_bias) -> dict[int, Any] | None:
    fld = I.field
    values: dict[int, Any] = {}
    solved: list[tuple[int, Polynomial]] = []
    gens = [g for g in I.generators]
    for _ in range(4 * len(variables) + 8):
        gens = [g for g in gens if g]
        if any(g.is_constant() for g in gens):
            return None
        if not gens:
            break
        step = None
        for g in gens:
            if len(g.variables()) == 1:
                (v,) = g.variables()
                roots = rational_roots(g)
                if not roots:
                    return None
                step = (v, Polynomial.constant(rng.choice(roots), fld))
                break
        if step is None:
            candidates = [s for s in map(_linear_solve, gens) if s is not None]
            if candidates:
                step = min(candidates, key=lambda s: (len(s[1]), -abs(s[0])))
        if step is None:
            occurring = sorted(set().union(*(g.variables() for g in gens)), key=lambda v: (v < 0, -abs(v)))
            v = occurring[0]
            val = 0 if zero_bias and rng.random() < 0.5 else rng.randint(-spread, spread)
            step = (v, Polynomial.constant(val, fld))
        v, expr = step
        if expr.is_constant():
            values[v] = expr.constant_value()
        else:
            solved.append((v, expr))
        gens = [g.substitute({v: expr}, partial=True) if v in g.variables() else g for g in gens]
        solved = [(w, e.substitute({v: expr}, partial=True) if v in e.variables() else e) for w, e in solved]
    else:
        return None
    pending = {w for w, _ in solved}
    for v in variables:
        if v not in values and v not in pending:
            values[v] = Fraction(rng.randint(-spread, spread))
    for w, e in reversed(solved):
        values[w] = e.evaluate(values)
    return values


def enumerate_points_mod_p(I: "Ideal", p: int | None = None) -> list[tuple[int, ...]]:
    """All points of V(I) in F_p^n, n = ambient dimension (keep n <= 3)."""
    if p is None:
        if not isinstance(I.field, PrimeField):
            raise ValueError("pass p for an ideal over QQ")
        p = I.field.characteristic
    n = I.ambient
    if n > 4:
        raise ValueError("enumeration is limited to ambient dimension <= 4")
    if n == 0:
        alive = all(_coeff_mod(g.constant_value(), p) == 0 for g in I.generators)
        return [()] if alive else []
    grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * n), indexing="ij")
    coords = [g.ravel() for g in grids]
    mask = np.ones(coords[0].shape, dtype=bool)
    for g in I.generators:
        if any(v < 0 or v > n for v in g.variables()):
            raise ValueError("generator uses variables outside the ambient space")
        val = np.zeros_like(coords[0])
        for m, c in g:
            term = np.full_like(coords[0], _coeff_mod(c, p))
            for v, e in m:
                term = term * _powmod(coords[v - 1], e, p) % p
            val = (val + term) % p
        mask &= val == 0
    pts = np.stack(coords, axis=1)[mask]
    return [tuple(int(x) for x in row) for row in pts]


def _coeff_mod(c: Any, p: int) -> int:
    if hasattr(c, "v"):
        return c.v % p
    c = Fraction(c)
    return c.numerator * pow(c.denominator, -1, p) % p


def _powmod(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            out = out * base % p
        e >>= 1
        if e:
            base = base * base % p
    return out
