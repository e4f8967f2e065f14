"""The seven acceptance criteria, each printing one PASS/FAIL line."""

import random
import time

import pytest

from finlang import corpus
from finlang.engine import NotFound, decide_finiteness, find_derivation, pump, saturate, search_bounded_derivations
from finlang.export import from_json, to_json
from finlang.itypes import EMPTY_ENV, arrow_type, comp, full, rho
from finlang.oracle import growth_report, language_upto
from finlang.rules import Skeleton, validate
from finlang.syntax import parse_scheme, parse_term, print_scheme
from finlang.unfold import complexity, unfold

from comp_reference import comp_literal
from conftest import SYMBOLS

ENTRIES = corpus.entries()


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def _emitted():
    """Every derivation the corpus runs materialize."""
    out = []
    for e in ENTRIES:
        t = e.term
        m = complexity(t)
        v = decide_finiteness(t)
        if v.witness is not None:
            out.append(v.witness.derivation)
            out.extend(pump(v.witness, k) for k in (1, 2, 3))
        try:
            out.append(find_derivation(t, rho(m), 0))
        except NotFound:
            pass
        ref = unfold(t)
        out.extend(search_bounded_derivations(saturate(ref, m), Skeleton(EMPTY_ENV, ref, rho(m)), limit=50))
    return out


def test_criterion_1_verdicts(report):
    expected = {"p1": "INFINITE", "p2": "INFINITE", "p3": "FINITE", "p4": "FINITE"}
    got, slowest = {}, 0.0
    for name in expected:
        t = corpus.entry(name).term
        t0 = time.perf_counter()
        v = decide_finiteness(t)
        slowest = max(slowest, time.perf_counter() - t0)
        got[name] = (v.kind, v.m)
    ok = all(got[n] == (k, 2) for n, k in expected.items()) and slowest < 60
    report(1, ok, f"{got}, slowest {slowest:.3f}s (limit 60s)")


def test_criterion_2_counters(report):
    rho1 = full(1, (), [0])
    tau_f = full(2, [1], [], arrow_type([rho1]))
    tau_m = full(2, [], [1], arrow_type([rho1]))
    lam = parse_term("\\x. a x", SYMBOLS)
    c_m = find_derivation(lam, tau_m, 1).counter
    c_f = find_derivation(lam, tau_f, 0).counter
    p1 = corpus.entry("p1").term
    p1_ok = {}
    for c in range(2, 7):
        d = find_derivation(p1, rho(2), c)
        p1_ok[c] = d.counter >= c and validate(d).ok
    ok = c_m == 1 and c_f == 0 and all(p1_ok.values())
    report(2, ok, f"tau_m counter {c_m}, tau_f counter {c_f}, P1 valid for c=2..6: {p1_ok}")


def test_criterion_3_comp(report):
    rnd = random.Random(20240601)
    mismatches = 0
    for _ in range(10_000):
        m = rnd.randint(0, 4)
        M = {n for n in range(m) if rnd.random() < 0.4}
        inputs = [({n for n in range(m + 1) if rnd.random() < 0.3}, rnd.randint(0, 5))
                  for _ in range(rnd.randint(0, 6))]
        if comp(m, M, inputs) != comp_literal(m, M, inputs):
            mismatches += 1
    report(3, mismatches == 0, f"{mismatches} mismatches in 10000 random inputs")


def test_criterion_4_counter_zero_invariant(report):
    violations, judged = 0, 0
    for d in _emitted():
        m = d.conclusion.ftype.order
        for _, node in d.nodes():
            c = node.conclusion
            if (m - 1) not in c.ftype.markers and c.subject.order <= m - 1:
                judged += 1
                violations += node.counter != 0
    report(4, violations == 0 and judged > 0, f"{violations} violations among {judged} judgments")


def test_criterion_5_pumping(report):
    rows = {}
    for e in ENTRIES:
        v = decide_finiteness(e.term)
        if v.witness is None:
            continue
        ds = [pump(v.witness, k) for k in (1, 2, 3)]
        cs = [d.counter for d in ds]
        rows[e.name] = all(validate(d).ok for d in ds) and cs[0] < cs[1] < cs[2]
    report(5, bool(rows) and all(rows.values()), f"{sum(rows.values())}/{len(rows)} witnesses pump validly and strictly")


def test_criterion_6_oracle(report):
    agree = sum(decide_finiteness(e.term).kind == e.expected for e in ENTRIES)
    growing = {}
    for e in ENTRIES:
        if e.expected == "INFINITE":
            growing[e.name] = growth_report(e.term, e.growth)[-1]["increasing"]
    sizes = language_upto(corpus.entry("p1").term, 10).sizes
    ok = agree == len(ENTRIES) and all(growing.values()) and sizes == [2, 3, 5, 9]
    report(6, ok, f"verdicts {agree}/{len(ENTRIES)}, growth strictly increasing "
                  f"{sum(growing.values())}/{len(growing)}, P1 sizes {sizes}")


def test_criterion_7_round_trip(report):
    ds = _emitted()
    good = sum(validate(from_json(to_json(d))).ok and from_json(to_json(d)) == d for d in ds)
    schemes = sum(parse_scheme(print_scheme(e.scheme)) == e.scheme for e in ENTRIES)
    ok = good == len(ds) and schemes == len(ENTRIES)
    report(7, ok, f"json {good}/{len(ds)} derivations, schemes {schemes}/{len(ENTRIES)}")
