import pytest

from finlang import corpus
from finlang.sorts import O, parse_sort
from finlang.syntax import ParseError, SchemeError, parse_scheme, parse_term, print_scheme, scheme_to_term
from finlang.terms import App, Lam, RankMismatch, SortMismatch, Y, alpha_equivalent, show

from conftest import HEADER, R_RULE, SYMBOLS


@pytest.mark.parametrize("e", corpus.entries(), ids=lambda e: e.name)
def test_print_parse_identity(e):
    g = e.scheme
    again = parse_scheme(print_scheme(g))
    assert again == g
    assert print_scheme(again) == print_scheme(g)


def test_p1_shape(reference_terms):
    t = reference_terms["p1"]
    assert show(t) == "Y (λR.λf.br (f e) (R (λx.f (f x)))) (λx.a x)"
    assert isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, Y)


def test_regular_scheme():
    t = scheme_to_term(parse_scheme(HEADER + "S = br e (a S)\n"))
    assert show(t) == "Y (λS.br e (a S))"


def test_inferred_sorts():
    g = parse_scheme(HEADER + "S = R (\\x. a x)\n" + R_RULE)
    assert g.sorts["R"] == parse_sort("(o -> o) -> o")
    assert g.start == "S"


def test_nonterminal_term():
    g = parse_scheme(HEADER + "S = R (\\x. a x)\n" + R_RULE)
    r = scheme_to_term(g, "R")
    assert str(r).startswith("Y")
    with pytest.raises(SchemeError):
        scheme_to_term(g, "Q")


def test_errors_carry_positions():
    with pytest.raises(ParseError) as info:
        parse_scheme(HEADER + "S = a ?\n")
    assert info.value.line == 4 and info.value.column is not None
    with pytest.raises(RankMismatch):
        parse_scheme(HEADER + "S = a a\n")


@pytest.mark.parametrize("body", ["F x = x\nS = F F\n", "F x = x x\nS = e\n"])
def test_self_application_is_a_sort_error(body):
    with pytest.raises(SortMismatch, match="infinite sort"):
        parse_scheme(HEADER + body)


def test_parse_term():
    t = parse_term("\\x. b x (a x)", SYMBOLS)
    assert isinstance(t, Lam)
    assert alpha_equivalent(t, parse_term("λy. b y (a y)", SYMBOLS))
    assert parse_term("e", SYMBOLS, sort=O) is not None
