"""Groebner-basis kernel.

Buchberger completion with the coprime and chain criteria, normal-strategy
pair selection, and full heap-based reduction. Everything above it
(membership, radicals, elimination, intersections, saturation, dimension,
finiteness) is expressed through reduced bases in suitable orders.
"""

from __future__ import annotations

import contextvars
import heapq
import itertools
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

from .certificate import Certificate, Verdict
from .poly import (
    GREVLEX,
    QQ,
    DenseContext,
    Field,
    MonomialOrder,
    Polynomial,
    block,
    mono_str,
    var_name,
)

DEFAULT_STEP_LIMIT = 1_000_000

_step_limit: contextvars.ContextVar[int] = contextvars.ContextVar("step_limit", default=DEFAULT_STEP_LIMIT)
_step_counter: contextvars.ContextVar[list | None] = contextvars.ContextVar("step_counter", default=None)


class ResourceError(RuntimeError):
    pass


class StepLimitExceeded(ResourceError):
    """Raised when one Groebner computation exceeds the reduction-step budget.

    ``partial`` holds the basis elements found so far.
    """

    def __init__(self, limit: int, partial: list[Polynomial]):
        super().__init__(f"Groebner computation exceeded {limit} reduction steps ({len(partial)} basis elements so far)")
        self.limit = limit
        self.partial = partial


class EmptyVarietyError(ValueError):
    pass


@contextmanager
def step_limit(limit: int) -> Iterator[None]:
    """Set the per-computation reduction-step budget within the block."""
    if limit < 1:
        raise ValueError("step limit must be positive")
    token = _step_limit.set(limit)
    try:
        yield
    finally:
        _step_limit.reset(token)


@contextmanager
def count_steps() -> Iterator[list]:
    """Accumulate reduction steps of all computations in the block into ``box[0]``."""
    box = [0]
    token = _step_counter.set(box)
    try:
        yield box
    finally:
        _step_counter.reset(token)


# ---------- dense kernel ----------
#
# Exponent vectors are packed into one int, the largest variable in the top
# field. Every field carries a guard bit, so divisibility is a single
# subtraction and a mask test. Order keys are linear forms in the exponents,
# which makes the key of a shifted monomial a plain sum.

_WIDTH = 32
_GUARD_BIT = 1 << (_WIDTH - 1)


def _divides(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _linear_weights(kind: str, n: int) -> list[int]:
    base = 1 << _WIDTH
    if kind == "lex":
        return [base ** (n - 1 - i) for i in range(n)]
    # grevlex: total degree first, then the smaller exponent of the last variable wins
    return [base**n - base**i for i in range(n)]


def order_weights(ctx: DenseContext) -> list[int]:
    """Integer weights w with ``sum(w_i * e_i)`` ordering exponent vectors like ``ctx.key``.

    Valid while every exponent stays below ``2**31``.
    """
    s = ctx.first_block
    if ctx.order.kind != "block":
        return _linear_weights(ctx.order.kind, ctx.n)
    first = _linear_weights(ctx.order.inner[0], s)
    rest = _linear_weights(ctx.order.inner[1], ctx.n - s)
    spread = (1 << _WIDTH) ** (ctx.n - s + 2)
    return [w * spread for w in first] + rest


class _Dense:
    """A polynomial as terms (packed exps, order key, coeff) by decreasing order."""

    __slots__ = ("terms", "lm", "lk", "lc", "lt")

    def __init__(self, terms: list[tuple[int, int, Any]], lead: tuple | None = None):
        self.terms = terms
        if terms:
            self.lm, self.lk, self.lc = terms[0]
        else:
            self.lm = self.lk = self.lc = None
        self.lt = lead


class _Kernel:
    def __init__(self, ctx: DenseContext, fld: Field):
        self.ctx = ctx
        self.field = fld
        self.limit = _step_limit.get()
        self.steps = 0
        # over QQ, integral coefficients are carried as int: Fraction
        # arithmetic dominates the cost of large reductions otherwise
        self.rational = fld is QQ
        n = ctx.n
        self.shifts = [_WIDTH * (n - 1 - i) for i in range(n)]
        self.guard = sum(_GUARD_BIT << s for s in self.shifts)
        self.weights = order_weights(ctx)

    # coefficients

    def _lower(self, c: Any) -> Any:
        if self.rational and c.denominator == 1:
            return int(c.numerator)
        return c

    def div(self, a: Any, b: Any) -> Any:
        if b == 1:
            return a
        if b == -1:
            return -a
        if self.rational:
            return self._lower(Fraction(a) / b)
        return a / b

    # monomials

    def pack(self, e: tuple) -> int:
        p = 0
        for x, s in zip(e, self.shifts):
            if x >= _GUARD_BIT:
                raise ResourceError(f"exponent {x} too large for the Groebner kernel")
            p |= x << s
        return p

    def unpack(self, p: int) -> tuple:
        mask = (1 << _WIDTH) - 1
        return tuple((p >> s) & mask for s in self.shifts)

    def weigh(self, e: tuple) -> int:
        return sum(w * x for w, x in zip(self.weights, e))

    def term(self, e: tuple, c: Any) -> tuple[int, int, Any]:
        return (self.pack(e), self.weigh(e), c)

    def dense(self, terms: list[tuple[int, int, Any]]) -> _Dense:
        return _Dense(terms, self.unpack(terms[0][0]) if terms else None)

    # conversion

    def to_dense(self, f: Polynomial) -> _Dense:
        ctx, low = self.ctx, self._lower
        terms = [self.term(ctx.dense(m), low(c)) for m, c in f]
        terms.sort(key=lambda t: t[1], reverse=True)
        return self.dense(terms)

    def to_poly(self, d: _Dense) -> Polynomial:
        sp, up = self.ctx.sparse, self.unpack
        if self.rational:
            return Polynomial._raw({sp(up(e)): Fraction(c) for e, _, c in d.terms}, self.field)
        return Polynomial._raw({sp(up(e)): c for e, _, c in d.terms}, self.field)

    def monic(self, d: _Dense) -> _Dense:
        if not d.terms or d.lc == 1:
            return d
        lc, div = d.lc, self.div
        return _Dense([(e, k, div(c, lc)) for e, k, c in d.terms], d.lt)

    def tick(self, partial: Sequence[_Dense]) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise StepLimitExceeded(self.limit, [self.to_poly(g) for g in partial])

    def reduce(self, terms: Iterable[tuple[int, int, Any]], basis: Sequence[_Dense]) -> _Dense:
        """Full remainder on division by ``basis``."""
        # shortest reducer first: a big divisor applied to a term a monomial
        # generator would kill inflates the quotient enormously
        basis = sorted(basis, key=lambda g: len(g.terms))
        reducers = [(g.lm, g.lk, g.lc, g.terms[1:]) for g in basis]
        coeff: dict[int, Any] = {}
        exps: dict[int, int] = {}
        for e, k, c in terms:
            if k in coeff:
                coeff[k] += c
            else:
                coeff[k] = c
                exps[k] = e
        heap = [-k for k in coeff]
        heapq.heapify(heap)
        guard, div = self.guard, self.div
        pop, push = heapq.heappop, heapq.heappush
        rem: list[tuple[int, int, Any]] = []
        while heap:
            k = -pop(heap)
            c = coeff.pop(k)
            e = exps.pop(k)
            if not c:
                continue
            for lm, lk, lc, tail in reducers:
                if ((e | guard) - lm) & guard != guard:
                    continue
                self.tick(basis)
                qe, qk = e - lm, k - lk
                scale = div(c, lc)
                for ge, gk, gc in tail:
                    mk = gk + qk
                    v = coeff.get(mk)
                    if v is None:
                        m = ge + qe
                        if m & guard:
                            raise ResourceError("exponent overflow in the Groebner kernel")
                        coeff[mk] = -scale * gc
                        exps[mk] = m
                        push(heap, -mk)
                    else:
                        coeff[mk] = v - scale * gc
                break
            else:
                rem.append((e, k, c))
        return self.dense(rem)

    def spoly(self, a: _Dense, b: _Dense) -> list[tuple[int, int, Any]]:
        l = self.term(_lcm(a.lt, b.lt), 0)
        out = []
        for g, sign in ((a, 1), (b, -1)):
            qe, qk = l[0] - g.lm, l[1] - g.lk
            for e, k, c in g.terms[1:]:
                out.append((e + qe, k + qk, sign * self.div(c, g.lc)))
        return out

    def buchberger(self, gens: list[_Dense]) -> list[_Dense]:
        G: list[_Dense] = []
        pairs: list[tuple] = []
        pending: set[tuple[int, int]] = set()

        def add(h: _Dense) -> None:
            t = len(G)
            G.append(h)
            for i in range(t):
                if _coprime(G[i].lt, h.lt):
                    continue
                pending.add((i, t))
                heapq.heappush(pairs, (self.weigh(_lcm(G[i].lt, h.lt)), i, t))

        for g in gens:
            r = self.reduce(g.terms, G) if G else g
            if r.terms:
                r = self.monic(r)
                if not any(r.lt):
                    return [r]
                add(r)

        while pairs:
            _, i, j = heapq.heappop(pairs)
            pending.discard((i, j))
            lij = _lcm(G[i].lt, G[j].lt)
            chain = False
            for k in range(len(G)):
                if k == i or k == j:
                    continue
                if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                    continue
                if _divides(G[k].lt, lij):
                    chain = True
                    break
            if chain:
                continue
            s = self.spoly(G[i], G[j])
            if not s:
                continue
            r = self.reduce(s, G)
            if r.terms:
                r = self.monic(r)
                if not any(r.lt):
                    return [r]
                add(r)
        return self.interreduce(G)

    def interreduce(self, G: list[_Dense]) -> list[_Dense]:
        minimal = []
        for i, g in enumerate(G):
            if any(_divides(h.lt, g.lt) and (h.lt != g.lt or j < i) for j, h in enumerate(G) if j != i):
                continue
            minimal.append(g)
        out = []
        for i, g in enumerate(minimal):
            others = minimal[:i] + minimal[i + 1:]
            tail = self.reduce(g.terms[1:], others) if len(g.terms) > 1 else _Dense([])
            out.append(_Dense([g.terms[0]] + tail.terms, g.lt))
        out.sort(key=lambda d: d.lk, reverse=True)
        return out

    def finish(self) -> None:
        box = _step_counter.get()
        if box is not None:
            box[0] += self.steps


# ---------- public types ----------


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis: monic, autoreduced, sorted by decreasing leading monomial."""

    order: MonomialOrder
    elements: tuple[Polynomial, ...]
    field: Field = QQ

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def leading_monomials(self) -> list:
        return [g.leading_monomial(self.order) for g in self.elements]

    def is_unit(self) -> bool:
        return len(self.elements) == 1 and self.elements[0].is_constant()

    def variables(self) -> frozenset[int]:
        return frozenset().union(*(g.variables() for g in self.elements)) if self.elements else frozenset()

    def __str__(self):
        return "{" + ", ".join(str(g) for g in self.elements) + "}"


def _kernel_for(order: MonomialOrder, variables: Iterable[int], fld: Field) -> _Kernel:
    return _Kernel(order.context(variables), fld)


def _groebner(gens: Sequence[Polynomial], order: MonomialOrder, fld: Field) -> GroebnerBasis:
    gens = [g for g in gens if g]
    if not gens:
        return GroebnerBasis(order, (), fld)
    variables = frozenset().union(*(g.variables() for g in gens))
    if not variables:
        return GroebnerBasis(order, (Polynomial.constant(1, fld),), fld)
    k = _kernel_for(order, variables, fld)
    try:
        dense = [k.to_dense(g) for g in gens]
        # process smaller generators first; ties keep input order
        dense.sort(key=lambda d: d.lk)
        basis = k.buchberger(dense)
    finally:
        k.finish()
    return GroebnerBasis(order, tuple(k.to_poly(k.monic(d)) for d in basis), fld)


class Ideal:
    """Ideal of k[x_1..x_ambient], possibly also involving auxiliary variables.

    Reduced Groebner bases are cached per monomial order; the cache is filled
    at most once per order even under concurrent access.
    """

    def __init__(self, generators: Iterable[Polynomial] = (), ambient: int | None = None, field: Field | None = None):
        gens = [g for g in generators]
        fld = field or (gens[0].field if gens else QQ)
        clean = []
        for g in gens:
            if not isinstance(g, Polynomial):
                g = Polynomial.constant(g, fld)
            if g.field != fld:
                raise TypeError("generators over different fields")
            if g and g not in clean:
                clean.append(g)
        self.generators: tuple[Polynomial, ...] = tuple(clean)
        top = max((v for g in clean for v in g.variables() if v > 0), default=0)
        if ambient is None:
            ambient = top
        elif ambient < top:
            raise ValueError(f"generator uses x{top} beyond ambient dimension {ambient}")
        self.ambient = ambient
        self.field = fld
        self._gb: dict[MonomialOrder, GroebnerBasis] = {}
        self._lock = threading.Lock()
        self._order_locks: dict[MonomialOrder, threading.Lock] = {}

    def __getstate__(self):
        return {"generators": self.generators, "ambient": self.ambient, "field": self.field, "_gb": dict(self._gb)}

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()
        self._order_locks = {}

    # -- construction --

    @classmethod
    def unit(cls, ambient: int = 0, field: Field = QQ) -> "Ideal":
        return cls([Polynomial.constant(1, field)], ambient, field)

    @classmethod
    def zero(cls, ambient: int = 0, field: Field = QQ) -> "Ideal":
        return cls([], ambient, field)

    def embedded(self, n: int) -> "Ideal":
        """The same variety inside A^n via v -> (v, 0): add x_{a+1}, ..., x_n."""
        if n < self.ambient:
            raise ValueError("cannot embed into a smaller ambient space")
        extra = [Polynomial.variable(i, self.field) for i in range(self.ambient + 1, n + 1)]
        return Ideal(list(self.generators) + extra, n, self.field)

    def restricted(self, n: int) -> "Ideal":
        """Intersection of the variety with A^n (coordinates beyond n set to 0)."""
        return Ideal([g.restrict(n) for g in self.generators], n, self.field)

    def at_ambient(self, n: int) -> "Ideal":
        return self.embedded(n) if n >= self.ambient else self.restricted(n)

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.generators + other.generators, max(self.ambient, other.ambient), self.field)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal([a * b for a in self.generators for b in other.generators], max(self.ambient, other.ambient), self.field)

    # -- bases --

    def groebner(self, order: MonomialOrder = GREVLEX) -> GroebnerBasis:
        gb = self._gb.get(order)
        if gb is not None:
            return gb
        with self._lock:
            lock = self._order_locks.setdefault(order, threading.Lock())
        with lock:
            gb = self._gb.get(order)
            if gb is None:
                gb = _groebner(self.generators, order, self.field)
                self._gb[order] = gb
        return gb

    def is_unit(self) -> bool:
        return self.groebner().is_unit()

    def is_zero(self) -> bool:
        return not self.generators

    def contains(self, f: Polynomial) -> bool:
        return ideal_membership(f, self)

    def __contains__(self, f: Polynomial) -> bool:
        return self.contains(f)

    def radical_contains(self, f: Polynomial) -> bool:
        return radical_membership(f, self)

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.generators)

    def variety_contained_in(self, other: "Ideal") -> bool:
        """V(self) is contained in V(other): every generator of other lies in the radical of self."""
        return all(self.radical_contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ambient == other.ambient and self.field == other.field and self.groebner().elements == other.groebner().elements

    def __hash__(self):
        return hash((self.ambient, self.groebner().elements))

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"Ideal({gens}; A^{self.ambient})"

    def variables(self) -> frozenset[int]:
        return frozenset().union(*(g.variables() for g in self.generators)) if self.generators else frozenset()


# ---------- operations ----------


def reduced_groebner(I: Ideal, order: MonomialOrder = GREVLEX) -> GroebnerBasis:
    return I.groebner(order)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    if not f or not G.elements:
        return f
    if G.is_unit():
        return Polynomial.constant(0, f.field)
    k = _kernel_for(G.order, f.variables() | G.variables(), G.field)
    try:
        basis = [k.to_dense(g) for g in G.elements]
        r = k.reduce(k.to_dense(f).terms, basis)
    finally:
        k.finish()
    return k.to_poly(r)


def ideal_membership(f: Polynomial, I: Ideal) -> bool:
    return normal_form(f, I.groebner()).is_zero()


def fresh_tag(*polys_or_ideals: Any) -> int:
    """A negative variable index unused by any of the arguments."""
    used = [0]
    for x in polys_or_ideals:
        vs = x.variables() if hasattr(x, "variables") else ()
        used.extend(v for v in vs if v < 0)
    return min(used) - 1


_POWER_TERM_CAP = 4000


def radical_membership(f: Polynomial, I: Ideal, use_points: bool = True) -> bool:
    """Decide whether f vanishes on V(I) over the algebraic closure."""
    if f.is_zero():
        return True
    G = I.groebner()
    if G.is_unit():
        return True
    if f.is_constant():
        return False
    if use_points:
        # a rational point of V(I) off V(f) refutes cheaply; normal forms of
        # non-members can be very large
        from .points import sample_point

        for attempt in range(3):
            p = sample_point(I, seed=attempt)
            if p is None:
                break
            if f.evaluate(p) != 0:
                return False
    if normal_form(f, G).is_zero():
        return True
    power = f
    for _ in range(2):
        if len(power) * len(f) > _POWER_TERM_CAP:
            break
        power = power * f
        if normal_form(power, G).is_zero():
            return True
    y = Polynomial.variable(fresh_tag(f, I), f.field)
    J = Ideal(I.generators + (1 - y * f,), I.ambient, I.field)
    return J.groebner().is_unit()


def eliminate(I: Ideal, drop: Iterable[int], ambient: int | None = None) -> Ideal:
    """I intersected with the polynomial ring in the variables not in ``drop``."""
    drop = sorted(set(drop), key=lambda v: (v < 0, abs(v)))
    if not drop:
        return Ideal(I.generators, I.ambient if ambient is None else ambient, I.field)
    G = I.groebner(block(drop))
    dset = set(drop)
    kept = [g for g in G.elements if not (g.variables() & dset)]
    amb = I.ambient if ambient is None else ambient
    if ambient is None:
        amb = max([amb] + [v for g in kept for v in g.variables() if v > 0])
    return Ideal(kept, amb, I.field)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    amb = max(I.ambient, J.ambient)
    if I.is_zero() or J.is_zero():
        return Ideal.zero(amb, I.field)
    tag = fresh_tag(I, J)
    t = Polynomial.variable(tag, I.field)
    gens = [t * g for g in I.generators] + [(1 - t) * g for g in J.generators]
    return eliminate(Ideal(gens, amb, I.field), [tag], ambient=amb)


def intersect_all(ideals: Sequence[Ideal]) -> Ideal:
    if not ideals:
        raise ValueError("empty intersection")
    out = ideals[0]
    for J in ideals[1:]:
        out = intersect(out, J)
    return out


def saturate_by(I: Ideal, h: Polynomial) -> Ideal:
    """I : h^infinity."""
    if h.is_zero():
        return Ideal.unit(I.ambient, I.field)
    tag = fresh_tag(I, h)
    y = Polynomial.variable(tag, I.field)
    J = Ideal(I.generators + (1 - y * h,), I.ambient, I.field)
    return eliminate(J, [tag], ambient=I.ambient)


def saturate(I: Ideal, J: Ideal) -> Ideal:
    """I : J^infinity, as the intersection of the single-generator saturations."""
    if not J.generators:
        return Ideal.unit(I.ambient, I.field)
    return intersect_all([saturate_by(I, h) for h in J.generators])


def krull_dimension(I: Ideal) -> int:
    G = I.groebner()
    if G.is_unit():
        raise EmptyVarietyError("the unit ideal defines the empty variety")
    supports = [frozenset(v for v, _ in m) for m in G.leading_monomials()]
    n = I.ambient
    variables = range(1, n + 1)
    if any(any(v < 0 or v > n for v in s) for s in supports):
        raise ValueError("krull_dimension expects an ideal in the ambient variables only")
    if not supports:
        return n
    for size in range(0, n + 1):
        for hit in itertools.combinations(variables, size):
            hs = set(hit)
            if all(s & hs for s in supports):
                return n - size
    return 0


def _tags(F: Sequence[Polynomial], I: Ideal) -> list[int]:
    start = fresh_tag(I, *F)
    return [start - j for j in range(len(F))]


def finiteness_test(I: Ideal, F: Sequence[Polynomial], with_relations: bool = False) -> Certificate:
    """Is k[x_1..x_n]/I a finite module over the subalgebra generated by F?

    ``data["relations"]`` holds, per variable, the basis element whose leading
    monomial is a pure power of it. With ``with_relations`` the univariate
    monic relations over k[F] are extracted too (``data["monic_relations"]``,
    one elimination per variable).
    """
    F = list(F)
    tags = _tags(F, I)
    fld = I.field
    gens = list(I.generators) + [Polynomial.variable(y, fld) - f for y, f in zip(tags, F)]
    xs = list(range(1, I.ambient + 1))
    order = block(xs, tags)
    G = Ideal(gens, I.ambient, fld).groebner(order)
    cert = Certificate("finiteness", Verdict.CERTIFIED_TRUE)
    cert.data["tags"] = {var_name(y): str(f) for y, f in zip(tags, F)}
    relations = {}
    for g in G.elements:
        lm = g.leading_monomial(order)
        if len(lm) == 1 and lm[0][0] > 0 and lm[0][0] not in relations:
            relations[lm[0][0]] = g
    if G.is_unit():
        cert.note("the ideal is the unit ideal; the quotient is zero")
        cert.data["relations"] = {}
        return cert
    missing = [i for i in xs if i not in relations]
    for i in xs:
        if i in relations:
            cert.note(f"x{i}: relation with leading monomial {mono_str(relations[i].leading_monomial(order))}: {relations[i]}")
    if missing:
        cert.verdict = Verdict.CERTIFIED_FALSE
        cert.note("no monic relation for " + ", ".join(f"x{i}" for i in missing))
    cert.data["relations"] = {f"x{i}": str(g) for i, g in sorted(relations.items())}
    cert.data["missing"] = missing
    if with_relations and not missing:
        monic = {}
        for i in xs:
            p = monic_relation(I, F, i)
            monic[f"x{i}"] = str(p)
            cert.note(f"x{i} is a root of {p}")
        cert.data["monic_relations"] = monic
    return cert


def monic_relation(I: Ideal, F: Sequence[Polynomial], i: int) -> Polynomial | None:
    """A polynomial p(T) monic in T with coefficients in k[F] and p(x_i) in I.

    Returned with T = x_i and the coefficients written in tag variables
    y1, y2, ... standing for F[0], F[1], ...; None if x_i is not integral.
    """
    F = list(F)
    tags = _tags(F, I)
    fld = I.field
    gens = list(I.generators) + [Polynomial.variable(y, fld) - f for y, f in zip(tags, F)]
    others = [j for j in range(1, max(I.ambient, i) + 1) if j != i]
    order = MonomialOrder("block", tuple(others) + (i,) + tuple(tags), len(others), ("grevlex", "lex"))
    G = Ideal(gens, max(I.ambient, i), fld).groebner(order)
    best = None
    for g in G.elements:
        lm = g.leading_monomial(order)
        if len(lm) == 1 and lm[0][0] == i and not (g.variables() & set(others)):
            if best is None or lm[0][1] < best.degree_in(i):
                best = g
    if best is None:
        return None
    rename = {y: -(j + 1) for j, y in enumerate(tags)}
    return best.rename(rename)


def algebra_kernel(F: Sequence[Polynomial], I: Ideal) -> Ideal:
    """Relations among F modulo I, as an ideal of k[x_1..x_len(F)] (x_j standing for F[j-1])."""
    F = list(F)
    tags = _tags(F, I)
    fld = I.field
    gens = list(I.generators) + [Polynomial.variable(y, fld) - f for y, f in zip(tags, F)]
    xs = sorted(set(range(1, I.ambient + 1)) | {v for f in F for v in f.variables() if v > 0})
    J = Ideal(gens, max([I.ambient] + xs), fld)
    K = eliminate(J, xs, ambient=0)
    rename = {y: j + 1 for j, y in enumerate(tags)}
    return Ideal([g.rename(rename) for g in K.generators], len(F), fld)
