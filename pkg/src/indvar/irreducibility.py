"""Irreducible components across levels and irreducibility verdicts for filtrations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .certificate import Certificate, Verdict
from .ideal import Ideal, eliminate, intersect_all
from .points import rational_roots, sample_point
from .poly import Polynomial, graph_irreducible, lex
from .topology import ClosedSetTower, SeparationProblem, ind_closed_check, line_density_certificate, separation_witness
from .tower import Component, Tower, contained_in, containment_witness, point_str

IRREDUCIBLE = "IRREDUCIBLE"
REDUCIBLE = "REDUCIBLE"
UNDECIDED = "INCONCLUSIVE"


def certify_prime(I: Ideal) -> Certificate:
    """Sufficient primality tests: zero ideal, graph-irreducible principal ideal, or a graph of coordinates."""
    cert = Certificate("prime", Verdict.INCONCLUSIVE)
    if I.is_zero():
        cert.verdict = Verdict.CERTIFIED_TRUE
        cert.note("zero ideal: the quotient is a polynomial ring")
        return cert
    if I.is_unit():
        cert.note("unit ideal: empty variety")
        return cert
    if len(I.generators) == 1:
        g = graph_irreducible(I.generators[0])
        if g.ok:
            cert.verdict = Verdict.CERTIFIED_TRUE
            cert.note(f"principal ideal of a graph polynomial: {g.evidence[0]}")
            return cert
    # a lex basis whose leading terms are distinct variables presents V(I) as a graph
    for order in (lex(), lex(*range(I.ambient, 0, -1))):
        G = I.groebner(order)
        lms = [g.leading_monomial(order) for g in G.elements]
        leading_vars = [m[0][0] for m in lms if len(m) == 1 and m[0][1] == 1]
        if len(leading_vars) == len(lms) and len(set(leading_vars)) == len(lms):
            cert.verdict = Verdict.CERTIFIED_TRUE
            cert.note(f"reduced {order} basis solves for " + ", ".join(f"x{v}" for v in leading_vars) + " in the remaining variables")
            return cert
    cert.note("no primality criterion applies")
    return cert


def prune_components(components: Sequence[Component]) -> tuple[list[Component], list[str]]:
    """Drop components contained in another one (keeping the first of equal ones)."""
    keep: list[Component] = []
    notes: list[str] = []
    for i, c in enumerate(components):
        redundant = False
        for j, d in enumerate(components):
            if i == j or not contained_in(c.ideal, d.ideal):
                continue
            if not contained_in(d.ideal, c.ideal) or j < i:
                redundant = True
                notes.append(f"{c.label or i} lies in {d.label or j}")
                break
        if not redundant:
            keep.append(c)
    return keep, notes


def verify_decomposition(I: Ideal, claimed: Sequence[Component | Ideal]) -> Certificate:
    """V(I) is the union of the claimed pieces, each certified irreducible."""
    comps = [c if isinstance(c, Component) else Component(c, f"C{j + 1}") for j, c in enumerate(claimed)]
    comps = [Component(c.ideal.at_ambient(I.ambient), c.label, c.declared, c.note) if c.ideal.ambient != I.ambient else c for c in comps]
    cert = Certificate("decomposition", Verdict.CERTIFIED_TRUE)
    if not comps:
        if I.is_unit():
            cert.note("empty variety, empty decomposition")
            return cert
        cert.verdict = Verdict.CERTIFIED_FALSE
        cert.note("nonempty variety with no components")
        return cert
    for c in comps:
        if not contained_in(c.ideal, I):
            cert.verdict = Verdict.CERTIFIED_FALSE
            cert.note(f"{c.label} is not contained in the variety")
            w = containment_witness(c.ideal, I)
            if w is not None:
                cert.data["witness"] = [w[i] for i in range(1, I.ambient + 1)]
                cert.note(f"witness point {point_str(w, I.ambient)}")
            return cert
    products = [Polynomial.constant(1, I.field)]
    for c in comps:
        products = [p * g for p in products for g in c.ideal.generators] if c.ideal.generators else products
    if not all(I.radical_contains(p) for p in products):
        cert.verdict = Verdict.CERTIFIED_FALSE
        cert.note("the claimed pieces do not cover the variety")
        for s in range(8):
            p = sample_point(I, seed=s)
            if p is not None and all(any(g.evaluate(p) != 0 for g in c.ideal.generators) for c in comps):
                cert.data["witness"] = [p.get(i, 0) for i in range(1, I.ambient + 1)]
                cert.note(f"witness point {point_str(p, I.ambient)} lies on no claimed piece")
                break
        return cert
    cert.note("the pieces cover the variety and lie in it")
    _, redundant = prune_components(comps)
    if redundant:
        cert.data["redundant"] = redundant
        cert.note("redundant pieces: " + "; ".join(redundant))
    for c in comps:
        if c.declared:
            cert.note(f"{c.label}: irreducibility declared ({c.note or 'no justification given'})")
            if cert.verdict is Verdict.CERTIFIED_TRUE:
                cert.verdict = Verdict.CONDITIONAL
            continue
        p = certify_prime(c.ideal)
        cert.note(f"{c.label}: {p.evidence[-1]}")
        if not p.ok:
            cert.verdict = Verdict.INCONCLUSIVE
    return cert


# ---------- component poset ----------


Node = tuple[int, int]


@dataclass
class ComponentPoset:
    tower: Tower
    depth: int
    nodes: list[Node]
    components: dict[Node, Component]
    leq: set[tuple[Node, Node]] = field(default_factory=set)
    evidence: dict[tuple[Node, Node], str] = field(default_factory=dict)

    def label(self, node: Node) -> str:
        c = self.components[node]
        return c.label or f"{self.tower.name}[{node[0]}].{node[1]}"

    def below(self, a: Node, b: Node) -> bool:
        return a == b or (a, b) in self.leq

    def upper_bounds(self, a: Node, b: Node) -> list[Node]:
        return [u for u in self.nodes if self.below(a, u) and self.below(b, u)]

    def level(self, k: int) -> list[Node]:
        return [n for n in self.nodes if n[0] == k]


def level_components(T: Tower, k: int) -> list[Component]:
    comps, _ = prune_components(T.components(k))
    return comps


def component_poset(T: Tower, depth: int) -> ComponentPoset:
    """All inclusions C <= C' between components of levels k <= k' <= depth."""
    nodes: list[Node] = []
    comps: dict[Node, Component] = {}
    for k in range(1, depth + 1):
        for j, c in enumerate(level_components(T, k)):
            nodes.append((k, j))
            comps[(k, j)] = c
    P = ComponentPoset(T, depth, nodes, comps)
    for a, b in itertools.permutations(nodes, 2):
        if a[0] > b[0]:
            continue
        if contained_in(comps[a].ideal, comps[b].ideal):
            P.leq.add((a, b))
            P.evidence[(a, b)] = f"generators of {P.label(b)} vanish on {P.label(a)}"
    return P


def _separating_points(P: ComponentPoset, a: Node, b: Node) -> dict[int, str] | None:
    """For each level from max(a, b) to depth, points showing no component there contains both."""
    out: dict[int, str] = {}
    for k in range(max(a[0], b[0]), P.depth + 1):
        reasons = []
        for u in P.level(k):
            for x in (a, b):
                if not P.below(x, u):
                    w = containment_witness(P.components[x].ideal, P.components[u].ideal)
                    if w is not None:
                        reasons.append(f"{point_str(w, P.tower.ambient(x[0]))} on {P.label(x)} is off {P.label(u)}")
                        break
            else:
                return None
        out[k] = "; ".join(reasons)
    return out


def is_directed(P: ComponentPoset, depth: int | None = None) -> Certificate:
    """Every pair of components has a common upper bound within depth."""
    depth = P.depth if depth is None else depth
    cert = Certificate("directed", Verdict.CERTIFIED_TRUE, depth=depth)
    nodes = [n for n in P.nodes if n[0] <= depth]
    pairs = sorted(
        itertools.combinations(nodes, 2),
        key=lambda ab: (ab[0][0] != ab[1][0], max(ab[0][0], ab[1][0]), ab),
    )
    top_level_failures = []
    for a, b in pairs:
        ub = [u for u in P.upper_bounds(a, b) if u[0] <= depth]
        if ub:
            continue
        if max(a[0], b[0]) >= depth:
            top_level_failures.append((a, b))
            continue
        seps = _separating_points(P, a, b)
        cert.data["pair"] = [P.label(a), P.label(b)]
        if seps is None:
            cert.verdict = Verdict.INCONCLUSIVE
            cert.note(f"{P.label(a)} and {P.label(b)} have no upper bound up to level {depth}, but separating points were not found at every level")
            return cert
        cert.verdict = Verdict.FAILS_UP_TO_DEPTH
        cert.note(f"{P.label(a)} and {P.label(b)} have no common upper bound up to level {depth}")
        for k, why in seps.items():
            cert.note(f"level {k}: {why}")
        cert.data["separating_points"] = seps
        return cert
    if top_level_failures:
        a, b = top_level_failures[0]
        cert.verdict = Verdict.INCONCLUSIVE
        cert.note(f"{P.label(a)} and {P.label(b)} at the truncation level have no upper bound yet")
        return cert
    cert.note(f"all {len(pairs)} pairs of components have an upper bound up to level {depth}")
    return cert


# ---------- verdict ----------


def _chain_from(P: ComponentPoset, top: Node) -> dict[int, Node]:
    chain = {top[0]: top}
    cur = top
    for k in range(top[0] - 1, 0, -1):
        below = [n for n in P.level(k) if P.below(n, cur)]
        if not below:
            break
        cur = below[0]
        chain[k] = cur
    return dict(sorted(chain.items()))


def _axis_line(C: Ideal) -> int | None:
    """If V(C) is a line parallel to a coordinate axis, the free coordinate."""
    if C.is_unit():
        return None
    G = C.groebner(lex())
    fixed = set()
    for g in G.elements:
        vs = g.variables()
        if len(vs) != 1 or g.degree() != 1:
            return None
        fixed |= vs
    free = [i for i in range(1, C.ambient + 1) if i not in fixed]
    return free[0] if len(free) == 1 else None


def _line_points(P: ComponentPoset, chain: dict[int, Node], C: Ideal, axis: int) -> list[Fraction]:
    """Rational points of the chain members meeting the line V(C), as values of the free coordinate."""
    values: set[Fraction] = set()
    for k, node in chain.items():
        F = P.components[node].ideal
        N = max(F.ambient, C.ambient)
        meet = F.at_ambient(N) + C.at_ambient(N)
        if meet.is_unit():
            continue
        uni = eliminate(meet, [i for i in range(1, N + 1) if i != axis])
        gens = [g for g in uni.generators if g]
        if not gens:
            continue
        values.update(rational_roots(min(gens, key=lambda g: g.degree())))
    return sorted(values)


def find_dense_chain(P: ComponentPoset, D: int) -> Certificate:
    """A chain F_s <= ... <= F_depth whose union is dense against every other component."""
    cert = Certificate("dense_chain", Verdict.INCONCLUSIVE, depth=P.depth, degree_bound=D)
    for top in P.level(P.depth):
        chain = _chain_from(P, top)
        members = set(chain.values())
        reasons = []
        ok = True
        for node in P.nodes:
            if node in members:
                continue
            holder = next((chain[m] for m in sorted(chain) if m >= node[0] and P.below(node, chain[m])), None)
            if holder is not None:
                reasons.append(f"{P.label(node)} <= {P.label(holder)}")
                continue
            C = P.components[node].ideal
            axis = _axis_line(C)
            if axis is None:
                ok = False
                break
            pts = _line_points(P, chain, C, axis)
            line = line_density_certificate([(t,) for t in pts], D)
            if not line.ok:
                ok = False
                break
            reasons.append(f"{P.label(node)} is the x{axis}-line; {len(pts)} chain points on it: {line.evidence[-1]}")
            cert.data.setdefault("line_density", {})[P.label(node)] = {"points": [str(t) for t in pts], "certificate": line}
        if not ok:
            continue
        bad = [n for n in chain.values() if not P.components[n].declared and not certify_prime(P.components[n].ideal).ok]
        if bad:
            continue
        cert.verdict = Verdict.CERTIFIED_TRUE
        cert.data["chain"] = {k: P.label(n) for k, n in chain.items()}
        cert.note("chain " + " <= ".join(P.label(n) for n in chain.values()))
        for r in reasons:
            cert.note(r)
        return cert
    cert.note("no chain of components is dense against all others at this truncation")
    return cert


def find_reducible_cover(P: ComponentPoset) -> Certificate:
    """Two ind-closed unions of component chains covering the tower, each missing a point of the other."""
    cert = Certificate("reducible_cover", Verdict.INCONCLUSIVE, depth=P.depth)
    T, depth = P.tower, P.depth
    tops = P.level(depth)
    for c1, c2 in itertools.combinations(tops, 2):
        sides = []
        for top in (c1, c2):
            per_level = {k: [n for n in P.level(k) if P.below(n, top)] for k in range(1, depth + 1)}
            sides.append(per_level)
        if any(not all(side[k] for k in side) for side in sides):
            continue
        if not all(set(sides[0][k]) | set(sides[1][k]) == set(P.level(k)) for k in range(1, depth + 1)):
            continue
        towers = []
        for name, side in zip(("A", "B"), sides):
            ideals = {k: intersect_all([P.components[n].ideal for n in side[k]]) for k in side}
            towers.append(ClosedSetTower(f"{name}", T, lambda k, ideals=ideals: ideals[k]))
        closed = [ind_closed_check(Y, depth) for Y in towers]
        if not all(c.ok for c in closed):
            continue
        witnesses = []
        for mine, other in ((towers[0], towers[1]), (towers[1], towers[0])):
            found = None
            for k in range(1, depth + 1):
                for s in range(6):
                    p = sample_point(mine.ideal(k), seed=s)
                    if p is None:
                        break
                    if all(any(g.evaluate(p) != 0 for g in other.ideal(j).generators) for j in range(k, depth + 1)):
                        found = (k, p)
                        break
                if found:
                    break
            witnesses.append(found)
        if not all(witnesses):
            continue
        cert.verdict = Verdict.CERTIFIED_TRUE
        labels = [P.label(c1), P.label(c2)]
        cert.data["cover"] = labels
        cert.data["ind_closed"] = closed
        for (k, p), name, other in zip(witnesses, labels, labels[::-1]):
            cert.note(f"point {point_str(p, T.ambient(k))} of the chain under {name} is off the chain under {other} up to level {depth}")
        cert.data["witnesses"] = [[w[1].get(i, 0) for i in range(1, T.ambient(w[0]) + 1)] for w in witnesses]
        cert.note("both covers are ind-closed and together contain every component")
        return cert
    cert.note("no pair of ind-closed chain covers separates the tower")
    return cert


def irreducibility_verdict(
    T: Tower,
    depth: int,
    D: int,
    max_components: int | None = None,
    zariski_point: Sequence | None = None,
) -> Certificate:
    """IRREDUCIBLE / REDUCIBLE / INCONCLUSIVE in the ind-topology, at truncation (depth, D).

    The label is ``data["verdict"]``; the certificate verdict is
    CERTIFIED_TRUE for IRREDUCIBLE and CERTIFIED_FALSE for REDUCIBLE.
    """
    cert = Certificate("irreducible", Verdict.INCONCLUSIVE, depth=depth, degree_bound=D)
    P = component_poset(T, depth)
    counts = {k: len(P.level(k)) for k in range(1, depth + 1)}
    cert.data["component_counts"] = counts
    if max_components is not None and max(counts.values()) > max_components:
        cert.note(f"component count exceeds the bound {max_components}")
        cert.data["verdict"] = UNDECIDED
        return cert
    directed = is_directed(P, depth)
    cert.data["directed"] = directed
    if directed.ok:
        cert.verdict = Verdict.CERTIFIED_TRUE
        cert.data["verdict"] = IRREDUCIBLE
        cert.note("components are directed under inclusion")
    else:
        cert.note(f"directedness: {directed.verdict}")
        chain = find_dense_chain(P, D)
        cert.data["dense_chain"] = chain
        if chain.ok:
            cert.verdict = Verdict.CERTIFIED_TRUE
            cert.data["verdict"] = IRREDUCIBLE
            cert.data["chain"] = chain.data["chain"]
            cert.evidence.extend(chain.evidence)
        else:
            cover = find_reducible_cover(P)
            cert.data["cover"] = cover
            if cover.ok:
                cert.verdict = Verdict.CERTIFIED_FALSE
                cert.data["verdict"] = REDUCIBLE
                cert.evidence.extend(cover.evidence)
            else:
                cert.data["verdict"] = UNDECIDED
                cert.note("neither a dense chain nor a separating cover was found")
    if zariski_point is not None and "chain" in cert.data:
        Y = ClosedSetTower("chain", T, lambda k: _chain_ideal(P, cert.data["chain"], k, T))
        try:
            cert.data["zariski_separation"] = separation_witness(SeparationProblem(Y, tuple(zariski_point), depth, D))
        except ValueError as exc:
            cert.note(f"no Zariski evidence: {exc}")
    return cert


def _chain_ideal(P: ComponentPoset, chain: dict, k: int, T: Tower) -> Ideal:
    labels = {P.label(n): n for n in P.nodes}
    if k in chain:
        return P.components[labels[chain[k]]].ideal
    first = min(chain)
    if k < first:
        return P.components[labels[chain[first]]].ideal.at_ambient(T.ambient(k)) + T.ideal(k)
    return P.components[labels[chain[max(chain)]]].ideal.at_ambient(T.ambient(k))
