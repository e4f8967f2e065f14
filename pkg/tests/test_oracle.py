import pytest
from hypothesis import given, settings, strategies as st

from finlang import corpus
from finlang.oracle import (DIVERGED, PNode, Unexpanded, bohm_expand, growth_report, hnf,
                            language_upto, parse_tree, render_partial, replay)
from finlang.syntax import parse_term
from finlang.terms import App, Lam, Var, Y
from finlang.sorts import O

from conftest import SYMBOLS, scheme_term


def test_head_normal_constant():
    t = parse_term("a e", SYMBOLS)
    assert render_partial(bohm_expand(t, 5)) == "(a (e))"
    assert render_partial(bohm_expand(parse_term("e", SYMBOLS), 1)) == "(e)"


def test_p3_bohm_prefix(reference_terms):
    tree = bohm_expand(reference_terms["p3"], 3)
    assert render_partial(tree) == "(br (e) (br (e) (br ? ?)))"
    assert isinstance(tree.children[1].children[1].children[0], Unexpanded)


def test_divergence():
    s = Var("s")
    assert bohm_expand(App(Y(O), Lam(s, s)), 3, step_fuel=20) is DIVERGED
    assert hnf(App(Y(O), Lam(s, s)), 20) is DIVERGED


def test_p1_small_members(reference_terms):
    en = language_upto(reference_terms["p1"], 10)
    assert en.sizes == [2, 3, 5, 9]
    assert [t.sexpr() for t in en.trees][:2] == ["(a (e))", "(a (a (e)))"]
    assert language_upto(reference_terms["p1"], 10, depth_fuel=20).sizes == [2, 3, 5, 9]


def test_p2_small_members(reference_terms):
    en = language_upto(reference_terms["p2"], 10)
    assert [t.sexpr() for t in en.trees] == ["(b (e) (e))", "(b (b (e) (e)) (b (e) (e)))"]


def test_p3_only_e(reference_terms):
    assert [t.sexpr() for t in language_upto(reference_terms["p3"], 10).trees] == ["(e)"]


def test_choice_is_exact():
    en = language_upto(parse_term("br (a e) e", SYMBOLS), 10)
    assert [t.sexpr() for t in en.trees] == ["(e)", "(a (e))"] and en.complete


def test_regular_language_complete():
    en = language_upto(scheme_term("S = br e (a S)\n"), 5)
    assert en.sizes == [1, 2, 3, 4, 5] and en.complete


def test_growth(reference_terms):
    rows = growth_report(reference_terms["p1"], [4, 10, 20])
    assert [r["largest"] for r in rows] == [3, 9, 17]
    assert rows[-1]["increasing"]
    flat = growth_report(reference_terms["p3"], [4, 10, 20])
    assert [r["largest"] for r in flat] == [1, 1, 1] and not flat[-1]["increasing"]
    assert [r["largest"] for r in growth_report(parse_term("e", SYMBOLS), [2, 4])] == [1, 1]


def test_replay(reference_terms):
    assert replay(reference_terms["p1"], parse_tree("(a (a (e)))")) == [2, 1]
    assert replay(reference_terms["p1"], parse_tree("(a (a (a (e))))")) is None


@pytest.mark.parametrize("e", corpus.entries(), ids=lambda e: e.name)
def test_every_enumerated_tree_replays(e):
    for t in language_upto(e.term, 9).trees:
        assert replay(e.term, t) is not None
        assert "br" not in t.sexpr()


def test_parse_tree_errors():
    assert parse_tree("(b (e) (a (e)))").size == 4
    for bad in ["e", "(a (e)", "(a (e))) ", "()"]:
        with pytest.raises(ValueError):
            parse_tree(bad)


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(1, 6))
def test_bohm_monotone_in_fuel(d1, d2):
    # more fuel only refines placeholders
    t = corpus.entry("p1").term
    lo, hi = sorted((d1, d2))

    def agrees(a, b):
        if isinstance(a, Unexpanded):
            return True
        if a is DIVERGED:
            return b is DIVERGED
        return (isinstance(b, PNode) and a.symbol == b.symbol
                and all(agrees(x, y) for x, y in zip(a.children, b.children)))

    assert agrees(bohm_expand(t, lo), bohm_expand(t, hi))


def test_finite_verdicts_respect_size_bound():
    from finlang.engine import decide_finiteness
    for e in corpus.entries():
        v = decide_finiteness(e.term)
        if not v.infinite and v.size_bound not in (None, -1):
            for row in growth_report(e.term, [4, 8, 16]):
                assert row["largest"] <= v.size_bound
