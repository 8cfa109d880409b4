"""A small declarative language for towers, closed sets and check directives.

Grammar (LL(2); ``#`` starts a comment that runs to the end of the line)::

    file      := item* EOF
    item      := tower | closedset | check
    tower     := 'tower' NAME ['over' field] '{' tstmt* '}'
    field     := 'QQ' | 'GF' '(' INT ')'
    tstmt     := 'vars' NAME ';'
               | 'ambient' '[' 'k' ']' '=' expr ';'
               | 'rule' NAME '[' ( INT | 'k' | 'k' '+' '1' ) ']' '=' expr ';'
               | 'level' NAME '[' ( INT | 'k' ) ']' '=' ideal ';'
               | 'decompose' 'level' ( INT | 'k' ) ':' comp (',' comp)* ';'
    comp      := [NAME '='] ideal ['declared' [STRING]]
    closedset := 'closedset' NAME 'in' NAME '{' ('level' NAME '[' (INT | 'k') ']' '=' ideal ';')* '}'
    check     := 'check' KIND target (',' target)* (NAME '=' value)* ';'
    target    := NAME ['.' NAME]
    value     := rational | '(' [rational (',' rational)*] ')' | '[' [expr (',' expr)*] ']' | NAME
    ideal     := iatom ('+' iatom)*
    iatom     := 'ideal' '(' [gen (',' gen)*] ')'
               | 'intersect' '(' member (',' member)* ')'
               | NAME '[' expr ']'
               | '(' ideal ')'
    gen       := expr [range]
    member    := ideal [range]
    range     := 'for' NAME 'in' expr '..' expr
    expr      := term (('+' | '-') term)*
    term      := unary (('*' | '/') unary)*
    unary     := '-' unary | power
    power     := atom ['^' unary]
    atom      := INT | NAME | NAME '[' expr ']' | '(' expr ')'
               | ('sum' | 'prod') '(' NAME 'in' expr '..' expr ',' expr ')'
    rational  := ['-'] INT ['/' INT]

Rule ``f[1]`` with ``f[k+1]`` defines a recursion (the step may use ``f[k]``,
the variables and ``k``); ``f[k]`` alone is a closed form. A level statement
with index ``k`` is the generic rule, one with a number overrides that level.
``NAME[e]`` inside an ideal splices in a level of this tower, another tower or
a closed set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

KEYWORDS = frozenset(
    {
        "tower", "closedset", "check", "vars", "ambient", "rule", "level", "decompose",
        "ideal", "intersect", "in", "for", "declared", "sum", "prod", "over", "k",
    }
)
CHECK_KINDS = (
    "filtration", "indclosed", "proper", "density", "separation", "stabilize",
    "directed", "irreducible", "noether", "interleaves", "regular",
)
VERDICT_NAMES = ("CERTIFIED_TRUE", "CERTIFIED_FALSE", "FAILS_UP_TO_DEPTH", "CONDITIONAL", "INCONCLUSIVE")
LABEL_NAMES = ("IRREDUCIBLE", "REDUCIBLE", "UNDECIDED")

# parameter name -> value shape
PARAM_SHAPES = {
    "depth": "int",
    "degbound": "int",
    "seed": "int",
    "N": "int",
    "maxcomp": "int",
    "cfix": "rational",
    "point": "point",
    "h": "exprs",
    "expect": "name",
}
# check kind -> (target signature, allowed extra parameters)
CHECK_SIGNATURES: dict[str, tuple[tuple[str, ...], frozenset[str]]] = {
    "filtration": (("tower",), frozenset()),
    "indclosed": (("closedset",), frozenset()),
    "proper": (("closedset",), frozenset()),
    "density": (("closedset",), frozenset()),
    "separation": (("closedset",), frozenset({"point"})),
    "stabilize": (("tower",), frozenset({"h", "N"})),
    "directed": (("tower",), frozenset()),
    "irreducible": (("tower",), frozenset({"point", "maxcomp"})),
    "noether": (("tower",), frozenset({"point", "cfix"})),
    "interleaves": (("tower", "tower"), frozenset()),
    "regular": (("rule",), frozenset()),
}
COMMON_PARAMS = frozenset({"depth", "degbound", "seed", "expect"})
MAX_NESTING = 200


class DslError(Exception):
    """A lexical, syntax or name-resolution diagnostic with its source location."""

    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        super().__init__(str(self))

    def __str__(self) -> str:
        text = f"line {self.line}, col {self.col}: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        return text


# ---------- AST ----------


@dataclass(frozen=True)
class Num:
    value: int
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Index:
    """``name[index]``: a variable, a rule value or a level splice."""

    name: str
    index: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Reduce:
    op: str  # "sum" or "prod"
    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Expr = Union[Num, Name, Index, BinOp, Neg, Reduce]


@dataclass(frozen=True)
class Range:
    var: str
    lo: Expr
    hi: Expr


@dataclass(frozen=True)
class Gen:
    expr: Expr
    range: Range | None = None


@dataclass(frozen=True)
class IdealGens:
    gens: tuple[Gen, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Member:
    ideal: "IdealExpr"
    range: Range | None = None


@dataclass(frozen=True)
class Intersect:
    members: tuple[Member, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Splice:
    name: str
    index: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class IdealSum:
    parts: tuple["IdealExpr", ...]


IdealExpr = Union[IdealGens, Intersect, Splice, IdealSum]


@dataclass(frozen=True)
class VarsDecl:
    family: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AmbientDecl:
    expr: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RuleDecl:
    """``index`` is an int (base value), ``"k"`` (closed form) or ``"k+1"`` (step)."""

    name: str
    index: int | str
    body: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LevelDecl:
    name: str
    index: int | str
    ideal: IdealExpr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ComponentDecl:
    ideal: IdealExpr
    label: str | None = None
    declared: bool = False
    note: str | None = None


@dataclass(frozen=True)
class DecomposeDecl:
    index: int | str
    parts: tuple[ComponentDecl, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Statement = Union[VarsDecl, AmbientDecl, RuleDecl, LevelDecl, DecomposeDecl]


@dataclass(frozen=True)
class TowerDecl:
    name: str
    field: int | None  # None = QQ, otherwise the prime p of GF(p)
    body: tuple[Statement, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def family(self) -> str:
        return next((s.family for s in self.body if isinstance(s, VarsDecl)), "x")

    @property
    def level_name(self) -> str | None:
        return next((s.name for s in self.body if isinstance(s, LevelDecl)), None)

    def rules(self) -> dict[str, list[RuleDecl]]:
        out: dict[str, list[RuleDecl]] = {}
        for s in self.body:
            if isinstance(s, RuleDecl):
                out.setdefault(s.name, []).append(s)
        return out


@dataclass(frozen=True)
class ClosedSetDecl:
    name: str
    tower: str
    levels: tuple[LevelDecl, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Target:
    name: str
    member: str | None = None

    def __str__(self) -> str:
        return self.name if self.member is None else f"{self.name}.{self.member}"


@dataclass(frozen=True)
class Param:
    name: str
    value: object  # int | Fraction | tuple[Fraction, ...] | tuple[Expr, ...] | str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CheckDecl:
    kind: str
    targets: tuple[Target, ...]
    params: tuple[Param, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def param(self, name: str, default=None):
        return next((p.value for p in self.params if p.name == name), default)


Item = Union[TowerDecl, ClosedSetDecl, CheckDecl]


@dataclass(frozen=True)
class SpecFile:
    items: tuple[Item, ...]

    @property
    def towers(self) -> list[TowerDecl]:
        return [i for i in self.items if isinstance(i, TowerDecl)]

    @property
    def closedsets(self) -> list[ClosedSetDecl]:
        return [i for i in self.items if isinstance(i, ClosedSetDecl)]

    @property
    def checks(self) -> list[CheckDecl]:
        return [i for i in self.items if isinstance(i, CheckDecl)]


# ---------- lexer ----------


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, STRING, OP, EOF
    text: str
    line: int
    col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "EOF" else repr(self.text)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<INT>[0-9]+)
  | (?P<STRING>"[^"\\\n]*")
  | (?P<OP>\.\.|[{}()\[\];,:=+\-*/^.])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if ch == '"':
                raise DslError("unterminated string", line, col)
            raise DslError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def decode_source(data: bytes | str) -> str:
    """UTF-8 decode, reporting the first invalid byte as a diagnostic."""
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        head = data[: exc.start]
        line = head.count(b"\n") + 1
        col = exc.start - (head.rfind(b"\n") + 1) + 1
        raise DslError(f"invalid UTF-8 byte 0x{data[exc.start]:02x}", line, col) from None


# ---------- parser ----------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.nesting = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, ahead: int = 1) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def error(self, expected, message: str | None = None) -> DslError:
        t = self.tok
        expected = frozenset([expected] if isinstance(expected, str) else expected)
        return DslError(message or f"unexpected {t.describe()}", t.line, t.col, expected)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("OP", "NAME")

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            raise self.error(f"'{text}'")
        return t

    def name(self, what: str = "NAME") -> Token:
        t = self.tok
        if t.kind != "NAME" or t.text in KEYWORDS:
            raise self.error(what)
        self.i += 1
        return t

    def integer(self) -> int:
        t = self.tok
        if t.kind != "INT":
            raise self.error("INT")
        self.i += 1
        return int(t.text)

    def nest(self):
        self.nesting += 1
        if self.nesting > MAX_NESTING:
            raise self.error(frozenset(), "nesting too deep")

    # -- file --

    def parse_file(self) -> SpecFile:
        items = []
        while self.tok.kind != "EOF":
            if self.at("tower"):
                items.append(self.tower())
            elif self.at("closedset"):
                items.append(self.closedset())
            elif self.at("check"):
                items.append(self.check())
            else:
                raise self.error(frozenset({"'tower'", "'closedset'", "'check'", "end of input"}))
        return SpecFile(tuple(items))

    def tower(self) -> TowerDecl:
        start = self.expect("tower")
        name = self.name().text
        fld = None
        if self.accept("over"):
            if self.accept("QQ"):
                fld = None
            elif self.accept("GF"):
                self.expect("(")
                fld = self.integer()
                self.expect(")")
            else:
                raise self.error(frozenset({"'QQ'", "'GF'"}))
        self.expect("{")
        body = []
        while not self.accept("}"):
            body.append(self.statement())
        return TowerDecl(name, fld, tuple(body), start.line, start.col)

    def statement(self) -> Statement:
        t = self.tok
        if self.accept("vars"):
            fam = self.name().text
            self.expect(";")
            return VarsDecl(fam, t.line, t.col)
        if self.accept("ambient"):
            self.expect("[")
            self.expect("k")
            self.expect("]")
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return AmbientDecl(e, t.line, t.col)
        if self.accept("rule"):
            name = self.name().text
            self.expect("[")
            if self.tok.kind == "INT":
                index: int | str = self.integer()
            elif self.accept("k"):
                index = "k"
                if self.accept("+"):
                    if self.tok.kind != "INT" or self.tok.text != "1":
                        raise self.error("'1'")
                    self.i += 1
                    index = "k+1"
            else:
                raise self.error(frozenset({"INT", "'k'"}))
            self.expect("]")
            self.expect("=")
            body = self.expr()
            self.expect(";")
            return RuleDecl(name, index, body, t.line, t.col)
        if self.at("level"):
            return self.level_decl()
        if self.accept("decompose"):
            self.expect("level")
            index = self.level_index()
            self.expect(":")
            parts = [self.component()]
            while self.accept(","):
                parts.append(self.component())
            self.expect(";")
            return DecomposeDecl(index, tuple(parts), t.line, t.col)
        raise self.error(frozenset({"'vars'", "'ambient'", "'rule'", "'level'", "'decompose'", "'}'"}))

    def level_index(self) -> int | str:
        if self.tok.kind == "INT":
            t = self.tok
            v = self.integer()
            if v < 1:
                raise DslError("level indices start at 1", t.line, t.col)
            return v
        if self.accept("k"):
            return "k"
        raise self.error(frozenset({"INT", "'k'"}))

    def level_decl(self) -> LevelDecl:
        t = self.expect("level")
        name = self.name().text
        self.expect("[")
        index = self.level_index()
        self.expect("]")
        self.expect("=")
        ideal = self.ideal()
        self.expect(";")
        return LevelDecl(name, index, ideal, t.line, t.col)

    def component(self) -> ComponentDecl:
        label = None
        if self.tok.kind == "NAME" and self.tok.text not in KEYWORDS and self.peek().text == "=":
            label = self.name().text
            self.expect("=")
        ideal = self.ideal()
        declared, note = False, None
        if self.accept("declared"):
            declared = True
            if self.tok.kind == "STRING":
                note = self.tok.text[1:-1]
                self.i += 1
        return ComponentDecl(ideal, label, declared, note)

    def closedset(self) -> ClosedSetDecl:
        t = self.expect("closedset")
        name = self.name().text
        self.expect("in")
        tower = self.name().text
        self.expect("{")
        levels = []
        while not self.accept("}"):
            if not self.at("level"):
                raise self.error(frozenset({"'level'", "'}'"}))
            levels.append(self.level_decl())
        return ClosedSetDecl(name, tower, tuple(levels), t.line, t.col)

    def check(self) -> CheckDecl:
        t = self.expect("check")
        k = self.tok
        if k.kind != "NAME" or k.text not in CHECK_KINDS:
            raise self.error(frozenset(CHECK_KINDS), f"unknown check kind {k.describe()}")
        self.i += 1
        targets = [self.target()]
        while self.accept(","):
            targets.append(self.target())
        params = []
        while not self.accept(";"):
            p = self.tok
            if p.kind != "NAME" or p.text not in PARAM_SHAPES:
                raise self.error(frozenset(PARAM_SHAPES) | {"';'"})
            self.i += 1
            self.expect("=")
            params.append(Param(p.text, self.param_value(PARAM_SHAPES[p.text]), p.line, p.col))
        return CheckDecl(k.text, tuple(targets), tuple(params), t.line, t.col)

    def target(self) -> Target:
        name = self.name("target name").text
        member = None
        if self.accept("."):
            member = self.name().text
        return Target(name, member)

    def rational(self) -> Fraction:
        sign = -1 if self.accept("-") else 1
        num = self.integer()
        if self.accept("/"):
            t = self.tok
            den = self.integer()
            if den == 0:
                raise DslError("zero denominator", t.line, t.col)
            return Fraction(sign * num, den)
        return Fraction(sign * num)

    def param_value(self, shape: str):
        if shape == "int":
            return self.integer()
        if shape == "rational":
            return self.rational()
        if shape == "name":
            t = self.tok
            if t.kind != "NAME":
                raise self.error("NAME")
            self.i += 1
            return t.text
        if shape == "point":
            self.expect("(")
            vals = []
            if not self.accept(")"):
                vals.append(self.rational())
                while self.accept(","):
                    vals.append(self.rational())
                self.expect(")")
            return tuple(vals)
        self.expect("[")
        exprs = []
        if not self.accept("]"):
            exprs.append(self.expr())
            while self.accept(","):
                exprs.append(self.expr())
            self.expect("]")
        return tuple(exprs)

    # -- ideals --

    def ideal(self) -> IdealExpr:
        parts = [self.ideal_atom()]
        while self.accept("+"):
            parts.append(self.ideal_atom())
        return parts[0] if len(parts) == 1 else IdealSum(tuple(parts))

    def ideal_atom(self) -> IdealExpr:
        t = self.tok
        self.nest()
        try:
            if self.accept("ideal"):
                self.expect("(")
                gens = []
                if not self.accept(")"):
                    gens.append(self.gen())
                    while self.accept(","):
                        gens.append(self.gen())
                    self.expect(")")
                return IdealGens(tuple(gens), t.line, t.col)
            if self.accept("intersect"):
                self.expect("(")
                members = [self.member()]
                while self.accept(","):
                    members.append(self.member())
                self.expect(")")
                return Intersect(tuple(members), t.line, t.col)
            if self.accept("("):
                inner = self.ideal()
                self.expect(")")
                return inner
            if t.kind == "NAME" and t.text not in KEYWORDS:
                self.i += 1
                self.expect("[")
                idx = self.expr()
                self.expect("]")
                return Splice(t.text, idx, t.line, t.col)
            raise self.error(frozenset({"'ideal'", "'intersect'", "'('", "NAME"}))
        finally:
            self.nesting -= 1

    def range_(self) -> Range | None:
        if not self.accept("for"):
            return None
        var = self.name().text
        self.expect("in")
        lo = self.expr()
        self.expect("..")
        hi = self.expr()
        return Range(var, lo, hi)

    def gen(self) -> Gen:
        e = self.expr()
        return Gen(e, self.range_())

    def member(self) -> Member:
        ideal = self.ideal()
        return Member(ideal, self.range_())

    # -- expressions --

    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            t = self.tok
            self.i += 1
            left = BinOp(t.text, left, self.operand(t, self.term), t.line, t.col)
        return left

    def operand(self, op: Token, parse):
        """Parse the right operand of ``op``; a missing one is reported at ``op``."""
        t = self.tok
        starts = t.kind == "INT" or t.text in ("(", "-") or (t.kind == "NAME" and (t.text not in KEYWORDS or t.text in ("k", "sum", "prod")))
        if not starts:
            raise DslError(f"missing operand after '{op.text}' (found {t.describe()})", op.line, op.col, _OPERAND_START)
        return parse()

    def term(self) -> Expr:
        left = self.unary()
        while self.at("*") or self.at("/"):
            t = self.tok
            self.i += 1
            left = BinOp(t.text, left, self.operand(t, self.unary), t.line, t.col)
        return left

    def unary(self) -> Expr:
        t = self.tok
        self.nest()
        try:
            if self.accept("-"):
                return Neg(self.operand(t, self.unary), t.line, t.col)
            base = self.atom()
            if self.at("^"):
                op = self.tok
                self.i += 1
                return BinOp("^", base, self.operand(op, self.unary), op.line, op.col)
            return base
        finally:
            self.nesting -= 1

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return Num(int(t.text), t.line, t.col)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.at("sum") or self.at("prod"):
            self.i += 1
            self.expect("(")
            var = self.name().text
            self.expect("in")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            self.expect(",")
            body = self.expr()
            self.expect(")")
            return Reduce(t.text, var, lo, hi, body, t.line, t.col)
        if t.kind == "NAME" and (t.text not in KEYWORDS or t.text == "k"):
            self.i += 1
            if t.text != "k" and self.accept("["):
                idx = self.expr()
                self.expect("]")
                return Index(t.text, idx, t.line, t.col)
            return Name(t.text, t.line, t.col)
        raise self.error(_OPERAND_START)


_OPERAND_START = frozenset({"INT", "NAME", "'('", "'-'", "'sum'", "'prod'"})


def parse_spec(text: bytes | str) -> SpecFile:
    """Parse and name-check a spec; raises :class:`DslError` on any problem."""
    source = decode_source(text)
    spec = _Parser(tokenize(source)).parse_file()
    resolve(spec)
    return spec


# ---------- name resolution ----------


@dataclass
class _Scope:
    """Names visible inside one tower or closed set."""

    tower: TowerDecl
    towers: dict[str, TowerDecl]
    closedsets: dict[str, ClosedSetDecl]
    rules: dict[str, list[RuleDecl]]

    @property
    def family(self) -> str:
        return self.tower.family


def _loc(node) -> tuple[int, int]:
    return getattr(node, "line", 0), getattr(node, "col", 0)


def _check_expr(e: Expr, scope: _Scope, bound: frozenset[str], self_rule: str | None = None, in_rule: bool = False) -> None:
    if isinstance(e, Num):
        return
    if isinstance(e, Name):
        if e.name not in bound:
            raise DslError(f"undeclared name {e.name!r}", *_loc(e))
        return
    if isinstance(e, Neg):
        _check_expr(e.operand, scope, bound, self_rule, in_rule)
        return
    if isinstance(e, BinOp):
        _check_expr(e.left, scope, bound, self_rule, in_rule)
        _check_expr(e.right, scope, bound, self_rule, in_rule)
        return
    if isinstance(e, Reduce):
        _check_expr(e.lo, scope, bound, self_rule, in_rule)
        _check_expr(e.hi, scope, bound, self_rule, in_rule)
        _check_expr(e.body, scope, bound | {e.var}, self_rule, in_rule)
        return
    if isinstance(e, Index):
        _check_expr(e.index, scope, bound, self_rule, in_rule)
        if e.name == scope.family:
            return
        if e.name in scope.rules:
            if in_rule:
                if e.name != self_rule:
                    raise DslError(f"rule bodies may not use other rules ({e.name!r})", *_loc(e))
                if not (isinstance(e.index, Name) and e.index.name == "k"):
                    raise DslError(f"a recursion may only refer to {e.name}[k]", *_loc(e))
            return
        raise DslError(f"undeclared name {e.name!r}", *_loc(e))
    raise TypeError(e)


def _check_ideal(I: IdealExpr, scope: _Scope, bound: frozenset[str], own_level: str | None) -> None:
    if isinstance(I, IdealSum):
        for p in I.parts:
            _check_ideal(p, scope, bound, own_level)
    elif isinstance(I, IdealGens):
        for g in I.gens:
            inner = bound
            if g.range is not None:
                _check_expr(g.range.lo, scope, bound)
                _check_expr(g.range.hi, scope, bound)
                inner = bound | {g.range.var}
            _check_expr(g.expr, scope, inner)
    elif isinstance(I, Intersect):
        for m in I.members:
            inner = bound
            if m.range is not None:
                _check_expr(m.range.lo, scope, bound)
                _check_expr(m.range.hi, scope, bound)
                inner = bound | {m.range.var}
            _check_ideal(m.ideal, scope, inner, own_level)
    elif isinstance(I, Splice):
        _check_expr(I.index, scope, bound)
        if I.name == own_level or I.name == scope.tower.level_name:
            return
        if I.name in scope.towers or I.name in scope.closedsets:
            return
        raise DslError(f"undeclared name {I.name!r}", *_loc(I))
    else:
        raise TypeError(I)


def resolve(spec: SpecFile) -> None:
    """All names declared before use, one meaning per name, consistent rule shapes."""
    towers: dict[str, TowerDecl] = {}
    closedsets: dict[str, ClosedSetDecl] = {}
    for item in spec.items:
        if isinstance(item, TowerDecl):
            if item.name in towers or item.name in closedsets:
                raise DslError(f"duplicate name {item.name!r}", *_loc(item))
            if item.field is not None and not _is_prime(item.field):
                raise DslError(f"GF({item.field}) needs a prime", *_loc(item))
            _resolve_tower(item, towers, closedsets)
            towers[item.name] = item
        elif isinstance(item, ClosedSetDecl):
            if item.name in towers or item.name in closedsets:
                raise DslError(f"duplicate name {item.name!r}", *_loc(item))
            if item.tower not in towers:
                raise DslError(f"undeclared tower {item.tower!r}", *_loc(item))
            _resolve_closedset(item, towers, closedsets)
            closedsets[item.name] = item
        else:
            _resolve_check(item, towers, closedsets)


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def _resolve_tower(t: TowerDecl, towers, closedsets) -> None:
    rules = t.rules()
    scope = _Scope(t, towers, closedsets, rules)
    fam = t.family
    names_seen = {fam}
    if sum(isinstance(s, VarsDecl) for s in t.body) > 1:
        raise DslError("more than one 'vars' statement", *_loc(next(s for s in t.body if isinstance(s, VarsDecl))))
    if sum(isinstance(s, AmbientDecl) for s in t.body) > 1:
        raise DslError("more than one 'ambient' statement", *_loc(next(s for s in t.body if isinstance(s, AmbientDecl))))
    for name, decls in rules.items():
        if name in names_seen or name in towers or name in closedsets:
            raise DslError(f"rule name {name!r} is already in use", *_loc(decls[0]))
        names_seen.add(name)
        shapes = sorted(str(d.index) for d in decls)
        if shapes not in (["1", "k+1"], ["k"]):
            raise DslError(f"rule {name!r} needs either {name}[1] and {name}[k+1], or a single {name}[k]", *_loc(decls[0]))
    level_names = {s.name for s in t.body if isinstance(s, LevelDecl)}
    if len(level_names) > 1:
        raise DslError(f"tower {t.name!r} uses several level names {sorted(level_names)}", *_loc(t))
    if level_names & (names_seen | set(towers) | set(closedsets)):
        raise DslError(f"level name {next(iter(level_names))!r} is already in use", *_loc(t))
    if not level_names:
        raise DslError(f"tower {t.name!r} has no level statement", *_loc(t))
    seen_levels: set = set()
    seen_decomp: set = set()
    for s in t.body:
        if isinstance(s, AmbientDecl):
            _check_expr(s.expr, scope, frozenset({"k"}))
        elif isinstance(s, RuleDecl):
            _check_expr(s.body, scope, frozenset({"k"}), self_rule=s.name if s.index == "k+1" else None, in_rule=True)
        elif isinstance(s, LevelDecl):
            if s.index in seen_levels:
                raise DslError(f"level {s.name}[{s.index}] declared twice", *_loc(s))
            seen_levels.add(s.index)
            _check_ideal(s.ideal, scope, frozenset({"k"}), s.name)
        elif isinstance(s, DecomposeDecl):
            if s.index in seen_decomp:
                raise DslError(f"decomposition of level {s.index} declared twice", *_loc(s))
            seen_decomp.add(s.index)
            for part in s.parts:
                _check_ideal(part.ideal, scope, frozenset({"k"}), None)


def _resolve_closedset(c: ClosedSetDecl, towers, closedsets) -> None:
    t = towers[c.tower]
    scope = _Scope(t, towers, closedsets, t.rules())
    names = {lv.name for lv in c.levels}
    if not c.levels:
        raise DslError(f"closed set {c.name!r} has no level statement", *_loc(c))
    if len(names) > 1:
        raise DslError(f"closed set {c.name!r} uses several level names", *_loc(c))
    seen: set = set()
    for lv in c.levels:
        if lv.index in seen:
            raise DslError(f"level {lv.name}[{lv.index}] declared twice", *_loc(lv))
        seen.add(lv.index)
        if lv.name in t.rules() or lv.name == t.family or lv.name in towers or lv.name in closedsets:
            raise DslError(f"level name {lv.name!r} is already in use", *_loc(lv))
        _check_ideal(lv.ideal, scope, frozenset({"k"}), None)


def _resolve_check(c: CheckDecl, towers, closedsets) -> None:
    kinds, extra = CHECK_SIGNATURES[c.kind]
    if len(c.targets) != len(kinds):
        raise DslError(f"check {c.kind} takes {len(kinds)} target(s), got {len(c.targets)}", *_loc(c))
    for tgt, want in zip(c.targets, kinds):
        if want == "rule":
            if tgt.name not in towers:
                raise DslError(f"undeclared tower {tgt.name!r}", *_loc(c))
            if tgt.member is None or tgt.member not in towers[tgt.name].rules():
                raise DslError(f"check {c.kind} needs TOWER.RULE, got {tgt}", *_loc(c))
            continue
        if tgt.member is not None:
            raise DslError(f"check {c.kind} takes a plain name, got {tgt}", *_loc(c))
        table = towers if want == "tower" else closedsets
        if tgt.name not in table:
            other = closedsets if want == "tower" else towers
            if tgt.name in other:
                raise DslError(f"{tgt.name!r} is not a {'tower' if want == 'tower' else 'closed set'}", *_loc(c))
            raise DslError(f"undeclared {'tower' if want == 'tower' else 'closed set'} {tgt.name!r}", *_loc(c))
    allowed = COMMON_PARAMS | extra
    seen: set[str] = set()
    for p in c.params:
        if p.name not in allowed:
            raise DslError(f"check {c.kind} does not take parameter {p.name!r}", p.line, p.col, frozenset(allowed))
        if p.name in seen:
            raise DslError(f"parameter {p.name!r} given twice", p.line, p.col)
        seen.add(p.name)
        if p.name == "expect" and p.value not in VERDICT_NAMES + LABEL_NAMES:
            raise DslError(f"unknown expectation {p.value!r}", p.line, p.col, frozenset(VERDICT_NAMES + LABEL_NAMES))
        if p.name in ("depth", "N") and p.value < 1:
            raise DslError(f"{p.name} must be positive", p.line, p.col)
        if p.name == "h":
            tower = towers[c.targets[0].name]
            scope = _Scope(tower, towers, closedsets, tower.rules())
            for e in p.value:
                _check_expr(e, scope, frozenset())
    if c.kind == "stabilize" and not {"h", "N"} <= seen:
        raise DslError("check stabilize needs h=[...] and N=...", *_loc(c))
    if c.kind == "density":
        cs = closedsets[c.targets[0].name]
        if density_rule(cs, towers[cs.tower]) is None:
            raise DslError(
                f"check density needs a closed set whose generic level is ideal(f[k]) for a rule f of {cs.tower}",
                *_loc(c),
            )


def density_rule(cs: ClosedSetDecl, tower: TowerDecl) -> str | None:
    """The rule f when ``cs`` is declared as ``level J[k] = ideal(f[k])``."""
    generic = [lv for lv in cs.levels if lv.index == "k"]
    if len(cs.levels) != 1 or not generic:
        return None
    I = generic[0].ideal
    if not isinstance(I, IdealGens) or len(I.gens) != 1 or I.gens[0].range is not None:
        return None
    e = I.gens[0].expr
    if isinstance(e, Index) and e.name in tower.rules() and isinstance(e.index, Name) and e.index.name == "k":
        return e.name
    return None


# ---------- pretty printer ----------


def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{format_expr(e.index)}]"
    if isinstance(e, Neg):
        return f"(-{format_expr(e.operand)})"
    if isinstance(e, BinOp):
        sep = "^" if e.op == "^" else f" {e.op} "
        return f"({format_expr(e.left)}{sep}{format_expr(e.right)})"
    if isinstance(e, Reduce):
        return f"{e.op}({e.var} in {format_expr(e.lo)}..{format_expr(e.hi)}, {format_expr(e.body)})"
    raise TypeError(e)


def _format_range(r: Range | None) -> str:
    return "" if r is None else f" for {r.var} in {format_expr(r.lo)}..{format_expr(r.hi)}"


def format_ideal(I: IdealExpr) -> str:
    if isinstance(I, IdealSum):
        return " + ".join(_format_ideal_atom(p) for p in I.parts)
    return _format_ideal_atom(I)


def _format_ideal_atom(I: IdealExpr) -> str:
    if isinstance(I, IdealSum):
        return f"({format_ideal(I)})"
    if isinstance(I, IdealGens):
        return "ideal(" + ", ".join(format_expr(g.expr) + _format_range(g.range) for g in I.gens) + ")"
    if isinstance(I, Intersect):
        return "intersect(" + ", ".join(format_ideal(m.ideal) + _format_range(m.range) for m in I.members) + ")"
    if isinstance(I, Splice):
        return f"{I.name}[{format_expr(I.index)}]"
    raise TypeError(I)


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_param(p: Param) -> str:
    shape = PARAM_SHAPES[p.name]
    v = p.value
    if shape == "int" or shape == "name":
        text = str(v)
    elif shape == "rational":
        text = _format_rational(v)
    elif shape == "point":
        text = "(" + ", ".join(_format_rational(q) for q in v) + ")"
    else:
        text = "[" + ", ".join(format_expr(e) for e in v) + "]"
    return f"{p.name}={text}"


def _format_statement(s: Statement) -> str:
    if isinstance(s, VarsDecl):
        return f"vars {s.family};"
    if isinstance(s, AmbientDecl):
        return f"ambient[k] = {format_expr(s.expr)};"
    if isinstance(s, RuleDecl):
        return f"rule {s.name}[{s.index}] = {format_expr(s.body)};"
    if isinstance(s, LevelDecl):
        return f"level {s.name}[{s.index}] = {format_ideal(s.ideal)};"
    if isinstance(s, DecomposeDecl):
        parts = []
        for c in s.parts:
            text = (f"{c.label} = " if c.label else "") + format_ideal(c.ideal)
            if c.declared:
                text += " declared" + (f' "{c.note}"' if c.note is not None else "")
            parts.append(text)
        return f"decompose level {s.index}: " + ", ".join(parts) + ";"
    raise TypeError(s)


def format_spec(spec: SpecFile) -> str:
    """Canonical source text; ``parse_spec(format_spec(s)) == s``."""
    out: list[str] = []
    for item in spec.items:
        if isinstance(item, TowerDecl):
            head = f"tower {item.name}" + (f" over GF({item.field})" if item.field is not None else "")
            out.append(head + " {")
            out.extend("  " + _format_statement(s) for s in item.body)
            out.append("}")
        elif isinstance(item, ClosedSetDecl):
            out.append(f"closedset {item.name} in {item.tower} {{")
            out.extend("  " + _format_statement(lv) for lv in item.levels)
            out.append("}")
        else:
            text = f"check {item.kind} " + ", ".join(str(t) for t in item.targets)
            if item.params:
                text += " " + " ".join(_format_param(p) for p in item.params)
            out.append(text + ";")
    return "\n".join(out) + ("\n" if out else "")

