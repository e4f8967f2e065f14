import json

import pytest

from finlang import corpus
from finlang.engine import decide_finiteness, find_derivation, pump
from finlang.export import export_derivation, from_json, to_dot, to_json, to_text, verdict_to_dict
from finlang.itypes import arrow_type, full, rho
from finlang.rules import validate

RHO1 = full(1, (), [0])
TAU_M = full(2, [], [1], arrow_type([RHO1]))


def test_example_2_text(lam_a):
    text = to_text(find_derivation(lam_a, TAU_M, 1))
    lines = text.splitlines()
    assert lines[0].startswith("ε ⊢ λx.a x : (2,{},{1},{(1,{},{0},o)}->o) ▷ 1")
    assert len(lines) == 3          # λ, a, x
    assert "(Var)" in lines[2] and "markers 1" in lines[2]


def test_json_round_trip(reference_terms):
    for c in (2, 4):
        d = find_derivation(reference_terms["p1"], rho(2), c)
        s = to_json(d)
        back = from_json(s)
        assert back == d and validate(back).ok and to_json(back) == s
        keys = json.loads(s)["derivation"].keys()
        assert {"env", "subject", "order", "flags", "markers", "itype", "counter", "rule",
                "premisses", "placed_flags", "placed_markers"} <= set(keys)


def test_dot_node_count(reference_terms):
    d = find_derivation(reference_terms["p1"], rho(2), 2)
    dot = to_dot(d)
    assert dot.count("[label=") == d.size()
    assert dot.count(" -> ") == d.size() - 1
    assert "#f4b6b6" in dot        # an order-m flag is highlighted


def test_export_formats(lam_a):
    d = find_derivation(lam_a, TAU_M, 1)
    assert export_derivation(d, "json") == to_json(d)
    with pytest.raises(ValueError):
        export_derivation(d, "xml")


@pytest.mark.parametrize("e", corpus.entries(), ids=lambda e: e.name)
def test_verdict_json_is_stable(e):
    v = decide_finiteness(e.term)
    first = json.dumps(verdict_to_dict(v), sort_keys=True)
    again = json.dumps(verdict_to_dict(decide_finiteness(e.term)), sort_keys=True)
    assert first == again
    if v.witness is not None:
        d = from_json(json.dumps(verdict_to_dict(v)["witness"]["derivation"]))
        assert validate(d).ok and d == v.witness.derivation
        assert validate(from_json(to_json(pump(v.witness, 2)))).ok
