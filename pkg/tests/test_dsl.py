import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indvar import catalog
from indvar.dsl import (
    BinOp,
    CheckDecl,
    ClosedSetDecl,
    DslError,
    TowerDecl,
    density_rule,
    format_expr,
    format_spec,
    parse_spec,
    tokenize,
)

HEADER = "tower A {\n  vars x;\n  rule f[1] = x[1];\n"


def diagnostic(text) -> DslError:
    with pytest.raises(DslError) as info:
        parse_spec(text)
    return info.value


# ---------- examples ----------


def test_top_exa_structure():
    spec = parse_spec(catalog.read("top_exa"))
    assert [type(i) for i in spec.items] == [TowerDecl, ClosedSetDecl, CheckDecl, CheckDecl]
    assert [c.kind for c in spec.checks] == ["indclosed", "density"]
    assert spec.closedsets[0].tower == "A"
    assert density_rule(spec.closedsets[0], spec.towers[0]) == "f"


def test_truncated_rule_points_at_the_plus():
    err = diagnostic(HEADER + "  rule f[k+1] = f[k]^2 +")
    assert (err.line, err.col) == (4, 24)
    assert "'+'" in err.message
    assert "INT" in err.expected and "NAME" in err.expected


def test_truncated_rule_inside_a_block():
    err = diagnostic(HEADER + "  rule f[k+1] = f[k]^2 + ;\n}")
    assert (err.line, err.col) == (4, 24)


def test_undeclared_tower_is_named():
    err = diagnostic("closedset Y in Z {\n  level J[k] = ideal(x[1]);\n}\n")
    assert "'Z'" in err.message
    assert (err.line, err.col) == (1, 1)


def test_undeclared_target_in_a_check():
    err = diagnostic(catalog.read("top_exa") + "check filtration Z;\n")
    assert "'Z'" in str(err)


def test_invalid_utf8_has_a_location():
    err = diagnostic(b"tower A {\n  vars \xc3\x28;\n}")
    assert (err.line, err.col) == (2, 8)
    assert "UTF-8" in err.message


def test_unterminated_string():
    err = diagnostic(HEADER + '  decompose level 2: ideal(x[1]) declared "oops\n}')
    assert (err.line, err.col) == (4, 43)


def test_syntax_error_lists_expected_tokens():
    err = diagnostic("tower A vars x;")
    assert err.expected == frozenset({"'{'", "'over'"}) or "'{'" in err.expected
    assert (err.line, err.col) == (1, 9)


@pytest.mark.parametrize(
    "text",
    [
        HEADER + "  level I[0] = ideal();\n}",
        "tower A over GF(4) { vars x; level I[k] = ideal(); }",
        HEADER + "  rule f[1] = x[2];\n}",
        "tower A { vars x; level I[k] = ideal(); } tower A { vars x; level I[k] = ideal(); }",
        "tower A { vars x; level I[k] = ideal(g[k]); }",
        "check bogus A;",
    ],
)
def test_semantic_errors_are_diagnostics(text):
    err = diagnostic(text)
    assert err.line >= 1 and err.col >= 1


def test_operator_precedence():
    spec = parse_spec(HEADER + "  rule f[k+1] = -f[k]^2 + x[k+1]*3;\n  level I[k] = ideal();\n}")
    step = spec.towers[0].body[2].body
    assert isinstance(step, BinOp) and step.op == "+"
    assert format_expr(step) == "((-(f[k]^2)) + (x[(k + 1)] * 3))"


def test_positions_do_not_affect_equality():
    a = parse_spec(catalog.read("top_exa"))
    b = parse_spec("\n\n" + catalog.read("top_exa").replace("  ", "      "))
    assert a == b


def test_check_parameters():
    spec = parse_spec(catalog.read("top_exa") + "check separation Y point=(1, -1/2, 0) depth=3 degbound=2;\n")
    c = spec.checks[-1]
    assert c.param("point") == (Fraction(1), Fraction(-1, 2), Fraction(0))
    assert c.param("depth") == 3 and c.param("degbound") == 2


@pytest.mark.parametrize("name", catalog.NAMES)
def test_catalog_files_round_trip(name):
    spec = parse_spec(catalog.read(name))
    text = format_spec(spec)
    assert parse_spec(text) == spec
    assert format_spec(parse_spec(text)) == text


def test_empty_spec():
    assert parse_spec("").items == ()
    assert parse_spec("# only a comment\n").items == ()
    assert format_spec(parse_spec("")) == ""


def test_deep_nesting_is_a_diagnostic():
    err = diagnostic(HEADER + "  rule f[k+1] = " + "(" * 5000 + "1" + ")" * 5000 + ";\n}")
    assert "nesting" in err.message


# ---------- parser totality ----------

_ALPHABET = [
    *"tower closedset check vars rule level decompose ideal intersect for in sum prod over GF QQ declared k x f".split(),
    *"{ } [ ] ( ) ; , . : = + - * / ^ .. # \" \n".split(" "),
    " ", "\n", "0", "1", "7", "2/3", "\xff", "\x00", "é",
]


def _random_bytes(rng: random.Random) -> bytes:
    if rng.random() < 0.5:
        return rng.randbytes(rng.randrange(0, 40))
    return "".join(rng.choice(_ALPHABET) + rng.choice(["", " "]) for _ in range(rng.randrange(0, 30))).encode("utf-8", "surrogatepass")


def _mutated_catalog(rng: random.Random, sources: list[bytes]) -> bytes:
    data = bytearray(rng.choice(sources))
    for _ in range(rng.randrange(1, 4)):
        i = rng.randrange(len(data))
        op = rng.randrange(3)
        if op == 0:
            del data[i : i + rng.randrange(1, 8)]
        elif op == 1:
            data[i] = rng.randrange(256)
        else:
            data[i:i] = rng.choice(_ALPHABET).encode()
    return bytes(data)


def test_fuzz_one_hundred_thousand_inputs_give_only_diagnostics():
    rng = random.Random(20240601)
    sources = [catalog.read(n).encode() for n in catalog.NAMES]
    outcomes = {"ok": 0, "diagnostic": 0}
    for i in range(100_000):
        data = _mutated_catalog(rng, sources) if i % 10 == 0 else _random_bytes(rng)
        try:
            parse_spec(data)
        except DslError as err:
            assert err.line >= 1 and err.col >= 1
            outcomes["diagnostic"] += 1
        else:
            outcomes["ok"] += 1
    assert outcomes["diagnostic"] > 0 and outcomes["ok"] > 0


@settings(max_examples=300)
@given(st.text(max_size=60))
def test_arbitrary_text_gives_only_diagnostics(text):
    try:
        parse_spec(text)
    except DslError:
        pass


def test_tokenizer_tracks_lines():
    toks = tokenize("tower\n  A # note\n{")
    assert [(t.text, t.line, t.col) for t in toks[:3]] == [("tower", 1, 1), ("A", 2, 3), ("{", 3, 1)]


# ---------- round trip ----------


def _exprs(atoms: list[str]):
    leaves = st.one_of(st.integers(0, 20).map(str), st.sampled_from(atoms))

    def extend(inner):
        binop = st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})")
        power = st.tuples(inner, st.integers(0, 4)).map(lambda t: f"{t[0]}^{t[1]}")
        neg = inner.map(lambda e: f"-{e}")
        red = st.tuples(st.sampled_from(["sum", "prod"]), inner).map(lambda t: f"{t[0]}(i in 1..k, {t[1]} + x[i])")
        return st.one_of(binop, power, neg, red)

    return st.recursive(leaves, extend, max_leaves=8)


@st.composite
def spec_texts(draw):
    base = draw(_exprs(["x[1]"]))
    step = draw(_exprs(["f[k]", "x[k+1]", "k"]))
    gens = draw(st.lists(_exprs(["f[k]", "x[1]", "x[k]", "k"]), max_size=3))
    ranged = draw(st.booleans())
    lines = ["tower A {", "  vars x;", f"  rule f[1] = {base};", f"  rule f[k+1] = {step};"]
    body = ", ".join(gens)
    if ranged:
        body = (body + ", " if body else "") + "x[j] for j in 2..k"
    lines.append(f"  level I[k] = ideal({body});")
    if draw(st.booleans()):
        lines.append("  level I[1] = ideal();")
    if draw(st.booleans()):
        lines.append("  decompose level 2: P = ideal(x[1]) declared \"note\", ideal(x[2]);")
    lines.append("}")
    lines.append("closedset Y in A {")
    lines.append(f"  level J[k] = {draw(st.sampled_from(['ideal(f[k])', 'A[k] + ideal(x[1])', 'intersect(ideal(x[j]) for j in 1..k)']))};")
    lines.append("}")
    for kind in draw(st.lists(st.sampled_from(["indclosed Y", "filtration A", "directed A depth=3", "separation Y point=(1, -2/3)", "noether A seed=5 cfix=1"]), max_size=3)):
        lines.append(f"check {kind};")
    return "\n".join(lines) + "\n"


@settings(max_examples=150)
@given(spec_texts())
def test_format_then_parse_is_identity(text):
    spec = parse_spec(text)
    printed = format_spec(spec)
    again = parse_spec(printed)
    assert again == spec
    assert format_spec(again) == printed


@given(_exprs(["x[1]", "x[2]"]))
def test_printed_expressions_reparse_to_the_same_tree(e):
    spec = parse_spec(f"tower A {{ vars x; rule f[k] = {e}; level I[k] = ideal(); }}")
    body = spec.towers[0].body[1].body
    assert parse_spec(f"tower A {{ vars x; rule f[k] = {format_expr(body)}; level I[k] = ideal(); }}").towers[0].body[1].body == body
