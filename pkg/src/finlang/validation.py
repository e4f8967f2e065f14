"""Input coercion shared by the estimator and the command line."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .sorts import O
from .syntax import Scheme, parse_scheme, scheme_to_term
from .terms import Term, free_vars, sort_check


def check_scheme(x) -> Scheme:
    """A Scheme from a Scheme, scheme text, or a path to a scheme file."""
    if isinstance(x, Scheme):
        x.check()
        return x
    if isinstance(x, Path):
        x = x.read_text(encoding="utf-8")
    if not isinstance(x, str):
        raise TypeError(f"expected scheme text or a Scheme, got {type(x).__name__}")
    g = parse_scheme(x)
    g.check()
    return g


def check_term(x, closed: bool = True, ground: bool = True) -> Term:
    """Coerce ``x`` to a λY-term; by default closed and of sort o."""
    t = x if isinstance(x, Term) else scheme_to_term(check_scheme(x))
    if closed:
        fv = free_vars(t)
        if fv:
            raise ValueError("term has free variables: " + ", ".join(sorted(v.name for v in fv)))
    s = sort_check(t)
    if ground and s != O:
        raise ValueError(f"expected a term of sort o, got {s}")
    return t


def check_terms(xs: Iterable) -> list[Term]:
    if isinstance(xs, (str, Term, Scheme)):
        raise TypeError("expected a sequence of schemes or terms, got a single one")
    return [check_term(x) for x in xs]


def check_positive(name: str, value: int | None, allow_none: bool = False) -> int | None:
    if value is None and allow_none:
        return None
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value
