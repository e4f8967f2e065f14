import pytest
from hypothesis import settings

from finlang import corpus
from finlang.syntax import parse_scheme, parse_term, scheme_to_term

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

HEADER = "symbol a 1\nsymbol b 2\nsymbol e 0\n"
R_RULE = "R f = br (f e) (R (\\x. f (f x)))\n"
SYMBOLS = {"a": 1, "b": 2, "e": 0}


def scheme_term(body: str, header: str = HEADER):
    return scheme_to_term(parse_scheme(header + body))


@pytest.fixture(scope="session")
def reference_terms():
    return {name: corpus.entry(name).term for name in corpus.REFERENCE_TERMS}


@pytest.fixture(scope="session")
def lam_a():
    return parse_term("\\x. a x", SYMBOLS)
