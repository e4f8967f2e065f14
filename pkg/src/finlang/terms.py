"""Finite lambda-Y terms: syntax, sort checking, substitution and beta steps."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .sorts import O, Arrow, Sort, order

BR = "br"


class TermError(Exception):
    """Base class for malformed terms."""


class SortMismatch(TermError):
    pass


class RankMismatch(TermError):
    pass


class UnboundVariable(TermError):
    pass


class NotARedex(TermError):
    pass


# Structural identity: every distinct term gets a small integer id, so that
# equality and hashing never walk the term (reduction builds huge shared DAGs).
_IDS: dict[tuple, int] = {}


def _id_of(x):
    if isinstance(x, Term):
        return x._cid
    if isinstance(x, tuple):
        return tuple(_id_of(a) for a in x)
    return x


class Term:
    __slots__ = ()

    def __post_init__(self):
        key = (type(self).__name__,) + tuple(_id_of(f) for f in self._fields())
        cid = _IDS.get(key)
        if cid is None:
            cid = _IDS.setdefault(key, len(_IDS))
        object.__setattr__(self, "_cid", cid)
        object.__setattr__(self, "_hash", hash(key))

    def __str__(self) -> str:
        return show(self)


def _hashed(cls):
    cls.__hash__ = lambda self: self._hash
    cls.__eq__ = lambda self, other: self is other or (
        type(other) is type(self) and self._cid == other._cid)
    return cls


@_hashed
@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: Sort = O
    _hash: int = field(init=False, repr=False, compare=False)
    _cid: int = field(init=False, repr=False, compare=False)

    def _fields(self):
        return (self.name, self.sort)


@_hashed
@dataclass(frozen=True)
class Const(Term):
    symbol: str
    rank: int
    args: tuple[Term, ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)
    _cid: int = field(init=False, repr=False, compare=False)

    def _fields(self):
        return (self.symbol, self.rank, self.args)


@_hashed
@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    _hash: int = field(init=False, repr=False, compare=False)
    _cid: int = field(init=False, repr=False, compare=False)

    def _fields(self):
        return (self.fun, self.arg)


@_hashed
@dataclass(frozen=True)
class Lam(Term):
    var: Var
    body: Term
    _hash: int = field(init=False, repr=False, compare=False)
    _cid: int = field(init=False, repr=False, compare=False)

    def _fields(self):
        return (self.var, self.body)


@_hashed
@dataclass(frozen=True)
class Y(Term):
    """Fixpoint combinator at element sort ``sort``; its own sort is (s->s)->s."""

    sort: Sort
    _hash: int = field(init=False, repr=False, compare=False)
    _cid: int = field(init=False, repr=False, compare=False)

    def _fields(self):
        return (self.sort,)


def apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def lams(vars: list[Var] | tuple[Var, ...], body: Term) -> Term:
    for v in reversed(vars):
        body = Lam(v, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ---------------------------------------------------------------------------
# sorts


def sort_of(t: Term) -> Sort:
    """Sort of ``t`` read off the annotations, without checking consistency."""
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        return O
    if isinstance(t, Lam):
        return Arrow(t.var.sort, sort_of(t.body))
    if isinstance(t, Y):
        return Arrow(Arrow(t.sort, t.sort), t.sort)
    if isinstance(t, App):
        s = sort_of(t.fun)
        if not isinstance(s, Arrow):
            raise SortMismatch(f"applying {show(t.fun)} of sort {s}")
        return s.result
    raise TypeError(t)


def sort_check(t: Term, free: Mapping[str, Sort] | None = None) -> Sort:
    """Check ``t`` and return its sort.

    ``free`` lists the sorts of variables allowed to occur free; without it the
    term must be closed.
    """
    env = dict(free or {})
    return _check(t, env, free is not None)


def _check(t: Term, env: dict[str, Sort], open_ok: bool) -> Sort:
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(f"variable {t.name} is not bound")
        if env[t.name] != t.sort:
            raise SortMismatch(f"variable {t.name} used at sort {t.sort}, bound at {env[t.name]}")
        return t.sort
    if isinstance(t, Const):
        if t.symbol == BR and t.rank != 2:
            raise RankMismatch("br must have rank 2")
        if len(t.args) != t.rank:
            raise RankMismatch(
                f"symbol {t.symbol} of rank {t.rank} applied to {len(t.args)} arguments")
        for a in t.args:
            s = _check(a, env, open_ok)
            if s != O:
                raise SortMismatch(f"argument {show(a)} of {t.symbol} has sort {s}, expected o")
        return O
    if isinstance(t, Lam):
        inner = dict(env)
        inner[t.var.name] = t.var.sort
        return Arrow(t.var.sort, _check(t.body, inner, open_ok))
    if isinstance(t, Y):
        return Arrow(Arrow(t.sort, t.sort), t.sort)
    if isinstance(t, App):
        fs = _check(t.fun, env, open_ok)
        xs = _check(t.arg, env, open_ok)
        if not isinstance(fs, Arrow):
            raise SortMismatch(f"{show(t.fun)} of sort {fs} is applied to an argument")
        if fs.arg != xs:
            raise SortMismatch(
                f"{show(t.fun)} expects an argument of sort {fs.arg}, got {show(t.arg)} of sort {xs}")
        return fs.result
    raise TypeError(t)


# ---------------------------------------------------------------------------
# variables


@functools.lru_cache(maxsize=1 << 18)
def free_vars(t: Term) -> frozenset[Var]:
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Const):
        return frozenset().union(*(free_vars(a) for a in t.args))
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, Lam):
        return frozenset(v for v in free_vars(t.body) if v.name != t.var.name)
    return frozenset()


def _names(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Const):
        for a in t.args:
            yield from _names(a)
    elif isinstance(t, App):
        yield from _names(t.fun)
        yield from _names(t.arg)
    elif isinstance(t, Lam):
        yield t.var.name
        yield from _names(t.body)


def fresh_name(base: str, taken: set[str] | frozenset[str]) -> str:
    root = base.rstrip("'0123456789") or "v"
    if base not in taken:
        return base
    for i in itertools.count(1):
        name = f"{root}{i}"
        if name not in taken:
            return name
    raise AssertionError


def uniquify(t: Term, scope: frozenset[str] = frozenset()) -> Term:
    """Rename binders so that no binder shadows a name already in scope."""
    if isinstance(t, Var) or isinstance(t, Y):
        return t
    if isinstance(t, Const):
        return Const(t.symbol, t.rank, tuple(uniquify(a, scope) for a in t.args))
    if isinstance(t, App):
        return App(uniquify(t.fun, scope), uniquify(t.arg, scope))
    if isinstance(t, Lam):
        v = t.var
        body = t.body
        if v.name in scope:
            new = Var(fresh_name(v.name, scope | set(_names(body))), v.sort)
            body = substitute(body, v, new)
            v = new
        return Lam(v, uniquify(body, scope | {v.name}))
    raise TypeError(t)


def substitute(t: Term, x: Var, s: Term) -> Term:
    """Capture-avoiding ``t[s/x]``."""
    fv = {v.name for v in free_vars(s)}
    return _subst(t, x, s, fv)


def _subst(t: Term, x: Var, s: Term, fv: set[str]) -> Term:
    if isinstance(t, Var):
        return s if t.name == x.name else t
    if isinstance(t, Y):
        return t
    if isinstance(t, Const):
        if not t.args:
            return t
        return Const(t.symbol, t.rank, tuple(_subst(a, x, s, fv) for a in t.args))
    if isinstance(t, App):
        return App(_subst(t.fun, x, s, fv), _subst(t.arg, x, s, fv))
    if isinstance(t, Lam):
        if t.var.name == x.name:
            return t
        if x not in free_vars(t.body):
            return t
        v, body = t.var, t.body
        if v.name in fv:
            new = Var(fresh_name(v.name, fv | set(_names(body)) | {x.name}), v.sort)
            body = _subst(body, v, new, {new.name})
            v = new
        return Lam(v, _subst(body, x, s, fv))
    raise TypeError(t)


def alpha_equivalent(a: Term, b: Term) -> bool:
    return _alpha(a, b, {}, {})


def _alpha(a: Term, b: Term, ea: dict[str, int], eb: dict[str, int]) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = ea.get(a.name), eb.get(b.name)
        if ia is None and ib is None:
            return a == b
        return ia == ib and a.sort == b.sort
    if isinstance(a, Y):
        return a == b
    if isinstance(a, Const):
        return (a.symbol == b.symbol and a.rank == b.rank and len(a.args) == len(b.args)
                and all(_alpha(x, y, ea, eb) for x, y in zip(a.args, b.args)))
    if isinstance(a, App):
        return _alpha(a.fun, b.fun, ea, eb) and _alpha(a.arg, b.arg, ea, eb)
    if isinstance(a, Lam):
        if a.var.sort != b.var.sort:
            return False
        depth = len(ea)
        return _alpha(a.body, b.body, {**ea, a.var.name: depth}, {**eb, b.var.name: depth})
    raise TypeError(a)


# ---------------------------------------------------------------------------
# positions and beta reduction


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Const):
        return t.args
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Lam):
        return (t.body,)
    return ()


def at(t: Term, position: tuple[int, ...]) -> Term:
    for i in position:
        kids = children(t)
        if i >= len(kids):
            raise IndexError(f"no child {i} below {show(t)}")
        t = kids[i]
    return t


def replace_at(t: Term, position: tuple[int, ...], new: Term) -> Term:
    if not position:
        return new
    i, rest = position[0], position[1:]
    if isinstance(t, Const):
        args = list(t.args)
        args[i] = replace_at(args[i], rest, new)
        return Const(t.symbol, t.rank, tuple(args))
    if isinstance(t, App):
        if i == 0:
            return App(replace_at(t.fun, rest, new), t.arg)
        return App(t.fun, replace_at(t.arg, rest, new))
    if isinstance(t, Lam):
        return Lam(t.var, replace_at(t.body, rest, new))
    raise IndexError(f"no child {i} below {show(t)}")


def redexes(t: Term, position: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], int]]:
    """All beta-redex positions with their orders, in prefix order."""
    if isinstance(t, App) and isinstance(t.fun, Lam):
        yield position, order(sort_of(t.fun))
    for i, c in enumerate(children(t)):
        yield from redexes(c, position + (i,))


def beta_step(t: Term, redex: tuple[int, ...] = ()) -> tuple[Term, int]:
    """Contract the redex at ``redex`` and report its order, ord(lambda x.R)."""
    r = at(t, redex)
    if not (isinstance(r, App) and isinstance(r.fun, Lam)):
        raise NotARedex(f"{show(r)} is not a beta-redex")
    lam = r.fun
    return replace_at(t, redex, substitute(lam.body, lam.var, r.arg)), order(sort_of(lam))


# ---------------------------------------------------------------------------
# printing


def show(t: Term, lam: str = "λ") -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Y):
        return "Y"
    if isinstance(t, Lam):
        return f"{lam}{t.var.name}.{show(t.body, lam)}"
    if isinstance(t, Const):
        if not t.args:
            return t.symbol
        return " ".join([t.symbol] + [_atom(a, lam) for a in t.args])
    if isinstance(t, App):
        head, args = spine(t)
        h = show(head, lam)
        if isinstance(head, Lam):
            h = f"({h})"
        return " ".join([h] + [_atom(a, lam) for a in args])
    raise TypeError(t)


def _atom(t: Term, lam: str) -> str:
    s = show(t, lam)
    if isinstance(t, (App, Lam)) or (isinstance(t, Const) and t.args):
        return f"({s})"
    return s


# ---------------------------------------------------------------------------
# serialization mirroring the AST


def term_to_dict(t: Term) -> dict:
    if isinstance(t, Var):
        return {"var": t.name, "sort": str(t.sort)}
    if isinstance(t, Const):
        return {"const": t.symbol, "rank": t.rank, "args": [term_to_dict(a) for a in t.args]}
    if isinstance(t, App):
        return {"app": [term_to_dict(t.fun), term_to_dict(t.arg)]}
    if isinstance(t, Lam):
        return {"lam": {"var": t.var.name, "sort": str(t.var.sort)}, "body": term_to_dict(t.body)}
    if isinstance(t, Y):
        return {"Y": str(t.sort)}
    raise TypeError(t)


def term_from_dict(d: dict) -> Term:
    from .sorts import parse_sort

    if "var" in d:
        return Var(d["var"], parse_sort(d["sort"]))
    if "const" in d:
        return Const(d["const"], d["rank"], tuple(term_from_dict(a) for a in d["args"]))
    if "app" in d:
        f, a = d["app"]
        return App(term_from_dict(f), term_from_dict(a))
    if "lam" in d:
        return Lam(Var(d["lam"]["var"], parse_sort(d["lam"]["sort"])), term_from_dict(d["body"]))
    if "Y" in d:
        return Y(parse_sort(d["Y"]))
    raise ValueError(f"not a serialized term: {d!r}")
