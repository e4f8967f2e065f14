import pytest
from hypothesis import given, strategies as st

from finlang.sorts import O, Arrow, arity, order, parse_sort
from finlang.terms import (App, Const, Lam, NotARedex, RankMismatch, SortMismatch, UnboundVariable,
                           Var, Y, alpha_equivalent, beta_step, free_vars, redexes, show, sort_check,
                           substitute, term_from_dict, term_to_dict, uniquify)

OO = Arrow(O, O)
x, y, f = Var("x"), Var("y"), Var("f", OO)
e = Const("e", 0)


def a(t):
    return Const("a", 1, (t,))


def test_orders():
    assert order(O) == 0
    assert order(OO) == 1
    assert order(parse_sort("(o -> o) -> o")) == 2
    assert order(parse_sort("o -> (o -> o) -> o")) == 2
    assert arity(parse_sort("o -> o -> o")) == 2


@given(st.recursive(st.just(O), lambda s: st.builds(Arrow, s, s), max_leaves=8))
def test_sort_print_parse(s):
    assert parse_sort(str(s)) == s


def test_order_formula():
    s = parse_sort("((o -> o) -> o) -> o -> o")
    assert order(s) == max(1 + order(s.arg), order(s.result))


def test_sort_check_accepts_and_rejects():
    assert sort_check(Lam(x, a(x))) == OO
    assert sort_check(App(Y(O), Lam(x, a(x)))) == O
    with pytest.raises(SortMismatch):
        sort_check(App(Lam(f, App(f, e)), e))
    with pytest.raises(UnboundVariable):
        sort_check(a(x))
    assert sort_check(a(x), {"x": O}) == O
    with pytest.raises(RankMismatch):
        sort_check(Const("a", 1, ()))


def test_free_vars_and_substitution_avoid_capture():
    t = Lam(y, Const("b", 2, (x, y)))
    assert free_vars(t) == {x}
    s = substitute(t, x, y)
    assert free_vars(s) == {y}
    assert not alpha_equivalent(s, Lam(y, Const("b", 2, (y, y))))


def test_beta_step_reports_order():
    t = App(Lam(f, App(f, e)), Lam(x, a(x)))
    assert [o for _, o in redexes(t)] == [2]
    t1, o1 = beta_step(t)
    assert o1 == 2
    t2, o2 = beta_step(t1)
    assert o2 == 1 and t2 == a(e)
    with pytest.raises(NotARedex):
        beta_step(t2)


def test_alpha_and_uniquify():
    t = Lam(x, Lam(x, x))
    u = uniquify(t)
    assert alpha_equivalent(t, u)
    assert u.var.name != u.body.var.name
    assert alpha_equivalent(Lam(x, x), Lam(y, y))


def test_show():
    assert show(App(Lam(x, a(x)), e)) == "(λx.a x) e"


def test_equal_terms_share_identity_fast():
    # deep sharing: unfolding the DAG would be 2^200 nodes
    t1 = t2 = e
    for _ in range(200):
        t1 = Const("b", 2, (t1, t1))
        t2 = Const("b", 2, (t2, t2))
    assert t1 is not t2 and t1 == t2 and hash(t1) == hash(t2)


terms = st.deferred(lambda: st.one_of(
    st.just(e),
    st.builds(a, terms),
    st.builds(lambda t: App(Lam(x, t), e), terms),
    st.builds(lambda t, u: Const("b", 2, (t, u)), terms, terms),
))


@given(terms)
def test_dict_round_trip(t):
    assert term_from_dict(term_to_dict(t)) == t
    assert sort_check(t) == O


def _random_term(rnd, sort, env, depth):
    """A well-sorted term of ``sort`` over the variables in ``env``, rich in redexes."""
    usable = [v for v in env if v.sort == sort]
    if sort == O:
        choice = rnd.randrange(5 if depth > 0 else 2)
        if choice == 0 or (choice == 1 and not usable):
            return e
        if choice == 1:
            return rnd.choice(usable)
        if choice == 2:
            return a(_random_term(rnd, O, env, depth - 1))
        if choice == 3:
            return Const("b", 2, (_random_term(rnd, O, env, depth - 1), _random_term(rnd, O, env, depth - 1)))
        arg_sort = rnd.choice([O, OO, Arrow(OO, O)])
        v = Var(f"v{depth}_{rnd.randrange(1000)}", arg_sort)
        body = _random_term(rnd, O, env + [v], depth - 1)
        return App(Lam(v, body), _random_term(rnd, arg_sort, env, depth - 1))
    if usable and rnd.random() < 0.3:
        return rnd.choice(usable)
    v = Var(f"w{depth}_{rnd.randrange(1000)}", sort.arg)
    return Lam(v, _random_term(rnd, sort.result, env + [v], max(depth - 1, 0)))


@given(st.randoms(use_true_random=False))
def test_reducing_a_maximal_redex_keeps_orders_bounded(rnd):
    t = _random_term(rnd, O, [], 5)
    assert sort_check(t) == O
    for _ in range(30):
        found = list(redexes(t))
        if not found:
            break
        top = max(o for _, o in found)
        pos = next(p for p, o in found if o == top)
        t, o = beta_step(t, pos)
        assert o == top
        assert all(o2 <= top for _, o2 in redexes(t))
