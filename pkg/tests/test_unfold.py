from hypothesis import given, strategies as st

from finlang.sorts import O, Arrow
from finlang.syntax import parse_term
from finlang.terms import Const, Var, Y
from finlang.unfold import complexity, graph_table, refs_from_table, subterm_closure, unfold

from conftest import SYMBOLS, scheme_term


def test_p1_complexity(reference_terms):
    assert complexity(reference_terms["p1"]) == 2
    assert len(subterm_closure(reference_terms["p1"])) == 13


def test_reference_terms_have_complexity_two(reference_terms):
    assert {n: complexity(t) for n, t in reference_terms.items()} == {"p1": 2, "p2": 2, "p3": 2, "p4": 2}


def test_constant_only():
    assert complexity(Const("e", 0)) == 0
    assert len(subterm_closure(Const("e", 0))) == 1


def test_bare_fixpoint_unfolds_to_z():
    # Y alone becomes Z = λz.z (Z z): four nodes with a back edge
    refs = subterm_closure(Y(O))
    assert sorted(r.kind for r in refs) == ["app", "app", "lam", "var"]


def test_degenerate_body_keeps_z():
    refs = subterm_closure(scheme_term("S = S\n"))
    assert sum(r.kind == "lam" and r.var.name == "z" for r in refs) == 1


def test_interning_and_closure_bound(reference_terms):
    t = reference_terms["p2"]
    assert unfold(t) is unfold(t)
    refs = subterm_closure(t)
    assert complexity(t) == max(r.order for r in refs)


def test_table_round_trip(reference_terms):
    root = unfold(reference_terms["p1"])
    table = graph_table([root])
    refs = refs_from_table(table)
    assert refs[root.uid] is root


chains = st.integers(0, 6).map(lambda n: "\\x. " + "a (" * n + "x" + ")" * n)


@given(chains)
def test_order_of_lambda(src):
    t = parse_term(src, SYMBOLS)
    assert complexity(t) == 1
    assert all(r.order <= 1 for r in subterm_closure(t))
