import pytest
from hypothesis import given, settings, strategies as st

from finlang import corpus
from finlang.engine import (BudgetExhausted, NotFound, decide_finiteness, find_derivation,
                            has_pumpable_branch, pump, saturate, search_bounded_derivations)
from finlang.itypes import EMPTY_ENV, arrow_type, full, rho
from finlang.oracle import language_upto
from finlang.rules import Skeleton, replace_at, validate
from finlang.syntax import parse_term
from finlang.unfold import complexity, unfold

from conftest import SYMBOLS, scheme_term

RHO1 = full(1, (), [0])
TAU_F = full(2, [1], [], arrow_type([RHO1]))
TAU_M = full(2, [], [1], arrow_type([RHO1]))
ENTRIES = corpus.entries()


@pytest.mark.parametrize("name, kind", [("p1", "INFINITE"), ("p2", "INFINITE"),
                                         ("p3", "FINITE"), ("p4", "FINITE")])
def test_reference_verdicts(reference_terms, name, kind):
    v = decide_finiteness(reference_terms[name])
    assert v.kind == kind and v.m == 2


@pytest.mark.parametrize("e", ENTRIES, ids=lambda e: e.name)
def test_corpus_verdicts(e):
    v = decide_finiteness(e.term)
    assert v.kind == e.expected
    if v.infinite:
        assert validate(v.witness.derivation).ok
        assert v.witness.gain > 0


def test_example_2_counters(lam_a):
    assert find_derivation(lam_a, TAU_M, 1).counter == 1
    assert find_derivation(lam_a, TAU_F, 0).counter == 0


def test_identity_has_no_order_one_flag():
    with pytest.raises(NotFound):
        find_derivation(parse_term("\\x. x", {}), TAU_F, 0)


@pytest.mark.parametrize("c", range(1, 9))
def test_p1_any_counter(reference_terms, c):
    d = find_derivation(reference_terms["p1"], rho(2), c)
    assert d.counter >= c and validate(d).ok


def test_p3_counters_bounded(reference_terms):
    assert find_derivation(reference_terms["p3"], rho(2), 1).counter == 1
    with pytest.raises(NotFound):
        find_derivation(reference_terms["p3"], rho(2), 2)


def test_budget_is_not_not_found(reference_terms):
    with pytest.raises(BudgetExhausted):
        decide_finiteness(reference_terms["p1"], budget=5)


def test_threads_do_not_change_result(reference_terms):
    from finlang.export import verdict_to_dict
    one = verdict_to_dict(decide_finiteness(reference_terms["p2"], threads=1))
    four = verdict_to_dict(decide_finiteness(reference_terms["p2"], threads=4))
    assert one == four


@pytest.mark.parametrize("e", [e for e in ENTRIES if e.expected == "INFINITE"], ids=lambda e: e.name)
def test_pump_strictly_increasing(e):
    w = decide_finiteness(e.term).witness
    counters = []
    for k in range(4):
        d = pump(w, k)
        assert validate(d).ok
        counters.append(d.counter)
    assert counters == sorted(set(counters))


def test_additivity(reference_terms):
    # swapping a subderivation for one of the same skeleton with k more flags adds exactly k
    w = decide_finiteness(reference_terms["p1"]).witness
    d = w.derivation
    small = d.at(w.descendant)
    big = pump(w, 1).at(w.descendant)
    assert small.conclusion.skeleton == big.conclusion.skeleton
    k = big.counter - small.counter
    assert k > 0
    assert replace_at(d, w.descendant, big).counter == d.counter + k


def _materialized():
    for e in ENTRIES:
        t = e.term
        m = complexity(t)
        v = decide_finiteness(t)
        if v.witness is not None:
            yield e.name, v.witness.derivation
            for k in (1, 2):
                yield e.name, pump(v.witness, k)
        try:
            yield e.name, find_derivation(t, rho(m), 0)
        except NotFound:
            pass


def test_untopped_judgments_count_nothing_and_markers_are_linear():
    checked = 0
    for name, d in _materialized():
        m = d.conclusion.ftype.order
        assert d.conclusion.ftype.markers == set(range(m))
        placed = {}
        for path, node in d.nodes():
            ft = node.conclusion.ftype
            if (m - 1) not in ft.markers and node.conclusion.subject.order <= m - 1:
                assert node.counter == 0, (name, path)
                checked += 1
            for n in node.placed_markers:
                assert n not in placed, (name, n)
                placed[n] = path
    assert checked > 0


@pytest.mark.parametrize("e", [e for e in ENTRIES if complexity(e.term) == 0], ids=lambda e: e.name)
def test_order_zero_agrees_with_exact_language(e):
    # at complexity 0 the language up to a size is computed exactly
    n = 12
    small = language_upto(e.term, n)
    larger = language_upto(e.term, 2 * n)
    grows = max((t.size for t in larger.trees), default=0) > n
    assert small.complete and larger.complete
    assert decide_finiteness(e.term).infinite == grows


@pytest.mark.parametrize("e", ENTRIES, ids=lambda e: e.name)
def test_cycle_criterion_matches_bounded_search(e):
    t = e.term
    ref = unfold(t)
    m = complexity(t)
    sat = saturate(ref, m)
    root = Skeleton(EMPTY_ENV, ref, rho(m))
    found = any(has_pumpable_branch(d) for d in search_bounded_derivations(sat, root, limit=300))
    if e.expected == "INFINITE":
        assert found
    else:
        assert not found


chains = st.lists(st.sampled_from(["a", "b"]), max_size=5)


def _chain(ops, inner="x"):
    for op in ops:
        inner = f"a ({inner})" if op == "a" else f"b ({inner}) ({inner})"
    return inner


@settings(max_examples=25)
@given(chains)
def test_iteration_infinite_iff_function_grows(ops):
    # Iter f x = br x (Iter f (f x)) produces finitely many trees iff f is the identity
    body = "\\y. " + _chain(ops, "y")
    t = scheme_term(f"S = Iter ({body}) e\nIter f x = br x (Iter f (f x))\n")
    assert decide_finiteness(t).infinite == bool(ops)
