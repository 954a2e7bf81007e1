import pytest
from hypothesis import given, strategies as st

from bicardlab import dsl
from bicardlab.dsl import Add, And, Cmp, Not, Num, Omega, Or, Var
from bicardlab.relations import CATALOG_DSL, catalog
from bicardlab.universe import PairType


@pytest.mark.parametrize("name", sorted(CATALOG_DSL))
@pytest.mark.parametrize("n", range(1, 8))
def test_catalog_strings_reproduce_catalog(name, n):
    assert dsl.compile(CATALOG_DSL[name], n).yes_types == catalog(name, n).yes_types


def test_parse_shapes():
    assert dsl.parse("b + c = 0") == Cmp("=", Add(Var("b"), Var("c")), Num(0))
    assert dsl.parse("b = c") == Cmp("=", Var("b"), Var("c"))
    assert dsl.parse("sd < ω") == Cmp("<", Var("sd"), Omega())


def test_precedence_not_and_or():
    e = dsl.parse("not a = 0 and b = 0 or c = 0")
    assert isinstance(e, Or)
    assert isinstance(e.left, And) and isinstance(e.left.left, Not)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("a ++ b", 1, 4),
        ("a = b = c", 1, 7),
        ("a =", 1, 4),
        ("(a = b", 1, 7),
        ("a = b\nand q = 1", 2, 5),
        ("a $ b", 1, 3),
    ],
)
def test_syntax_error_positions(text, line, col):
    with pytest.raises(dsl.DSLSyntaxError) as info:
        dsl.parse(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_unknown_identifier():
    with pytest.raises(dsl.DSLNameError, match="unknown identifier 'q'"):
        dsl.parse("q = 0")


@pytest.mark.parametrize("text", ["a + b", "a = (b = c)", "not a", "(a = 0) + 1"])
def test_type_errors(text):
    with pytest.raises(dsl.DSLTypeError):
        dsl.parse(text)


def test_compile_rejects_asymmetric():
    with pytest.raises(dsl.DSLCompileError) as info:
        dsl.compile("b = 0", 3)
    rep = info.value.report
    assert not rep.symmetric
    assert PairType(0, 0, 1, 2) in rep.asymmetric


def test_compile_rejects_intransitive_with_triple():
    with pytest.raises(dsl.DSLCompileError) as info:
        dsl.compile("sd <= 2", 4)
    assert info.value.report.counterexample is not None


def test_transitivity_depends_on_n():
    assert dsl.compile("sd = 0 or sd = n", 4) == catalog("LCP", 4)
    with pytest.raises(dsl.DSLCompileError):
        dsl.compile("sd <= 1", 3)
    dsl.compile("sd <= 1", 1)


def test_omega_is_larger_than_everything():
    t = PairType(1, 2, 3, 4)
    assert dsl.evaluate(dsl.parse("sd + csd < omega"), t)
    assert dsl.evaluate(dsl.parse("omega = omega"), t)
    assert not dsl.evaluate(dsl.parse("omega <= 1000"), t)


def test_rel_file_round_trip():
    text = "# name: lcp\n# complement pairing\nsd = 0\n  or csd = 0\n"
    rf = dsl.load_rel(text)
    assert rf.name == "lcp"
    again = dsl.load_rel(dsl.dump_rel(rf.expr, rf.name))
    assert again.expr == rf.expr and again.name == "lcp"


def test_unicode_operators():
    assert dsl.parse("a ≠ b") == dsl.parse("a != b")
    assert dsl.parse("a ≤ b and c ≥ d") == dsl.parse("a <= b and c >= d")


VARS = st.sampled_from(["a", "b", "c", "d", "n", "x", "y", "sd", "csd"])
terms = st.recursive(
    st.one_of(st.integers(0, 20).map(Num), VARS.map(Var), st.just(Omega())),
    lambda inner: st.builds(Add, inner, inner),
    max_leaves=4,
)
atoms = st.builds(Cmp, st.sampled_from(dsl.CMP_OPS), terms, terms)
conditions = st.recursive(
    atoms,
    lambda inner: st.one_of(st.builds(Not, inner), st.builds(And, inner, inner), st.builds(Or, inner, inner)),
    max_leaves=6,
)


@given(conditions)
def test_print_parse_round_trip(e):
    assert dsl.parse(dsl.to_source(e)) == e


@given(conditions, st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_round_trip_preserves_meaning(e, a, b, c, d):
    t = PairType(a, b, c, d)
    assert dsl.evaluate(dsl.parse(dsl.to_source(e)), t) == dsl.evaluate(e, t)
