"""Intersection types with flag and marker orders, environments, Split and Comp."""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .sorts import Arrow, Sort, order
from .terms import Var


class TypeFormatError(ValueError):
    pass


class IType:
    __slots__ = ()

    def __str__(self) -> str:
        return render_itype(self)


@dataclass(frozen=True, eq=True)
class BaseType(IType):
    def __str__(self) -> str:
        return "o"


BASE = BaseType()


@dataclass(frozen=True)
class ArrowType(IType):
    """``args -> result``; ``args`` is a set of full types."""

    args: frozenset[FullType]
    result: IType
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "args", frozenset(self.args))
        object.__setattr__(self, "_hash", hash((self.args, self.result)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ArrowType) or self._hash != other._hash:
            return False
        return self.args == other.args and self.result == other.result

    def __str__(self) -> str:
        return render_itype(self)


@dataclass(frozen=True)
class FullType:
    """``(order, flags, markers, itype)`` with flags and markers below ``order``."""

    order: int
    flags: frozenset[int]
    markers: frozenset[int]
    itype: IType = BASE
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        flags = frozenset(self.flags)
        markers = frozenset(self.markers)
        object.__setattr__(self, "flags", flags)
        object.__setattr__(self, "markers", markers)
        if self.order < 0:
            raise TypeFormatError(f"negative order {self.order}")
        if any(not 0 <= n < self.order for n in flags | markers):
            raise TypeFormatError(
                f"flag and marker orders must lie in 0..{self.order - 1}: "
                f"F={sorted(flags)} M={sorted(markers)}")
        if flags & markers:
            raise TypeFormatError(f"flags and markers overlap on {sorted(flags & markers)}")
        object.__setattr__(self, "_hash", hash((self.order, flags, markers, self.itype)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, FullType) or self._hash != other._hash:
            return False
        return (self.order == other.order and self.flags == other.flags
                and self.markers == other.markers and self.itype == other.itype)

    def __lt__(self, other: FullType) -> bool:
        return render(self) < render(other)

    def __str__(self) -> str:
        return render(self)

    def replace(self, **kw) -> FullType:
        d = dict(order=self.order, flags=self.flags, markers=self.markers, itype=self.itype)
        d.update(kw)
        return FullType(**d)


def full(order: int, flags: Iterable[int] = (), markers: Iterable[int] = (),
         itype: IType = BASE) -> FullType:
    return FullType(order, frozenset(flags), frozenset(markers), itype)


def arrow_type(args: Iterable[FullType], result: IType = BASE) -> ArrowType:
    return ArrowType(frozenset(args), result)


def rho(m: int) -> FullType:
    """The root type ``(m, {}, {0..m-1}, o)``."""
    return full(m, (), range(m))


# ---------------------------------------------------------------------------
# sort membership and enumeration


def itype_has_sort(t: IType, s: Sort) -> bool:
    if isinstance(t, BaseType):
        return not isinstance(s, Arrow)
    if not isinstance(s, Arrow):
        return False
    k = order(s)
    return all(a.order == k and itype_has_sort(a.itype, s.arg) for a in t.args) \
        and itype_has_sort(t.result, s.result)


def has_sort(ft: FullType, s: Sort) -> bool:
    return itype_has_sort(ft.itype, s)


def _subsets(items: Sequence) -> Iterator[tuple]:
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _disjoint_pairs(k: int) -> Iterator[tuple[frozenset[int], frozenset[int]]]:
    # each order is a flag, a marker, or neither
    for assign in itertools.product((0, 1, 2), repeat=k):
        yield (frozenset(i for i, a in enumerate(assign) if a == 1),
               frozenset(i for i, a in enumerate(assign) if a == 2))


@functools.lru_cache(maxsize=None)
def itypes_of_sort(s: Sort) -> tuple[IType, ...]:
    if not isinstance(s, Arrow):
        return (BASE,)
    args = enumerate_full_types(s.arg, order(s))
    results = itypes_of_sort(s.result)
    return tuple(ArrowType(frozenset(T), r) for T in _subsets(args) for r in results)


@functools.lru_cache(maxsize=None)
def enumerate_full_types(s: Sort, k: int) -> tuple[FullType, ...]:
    """Every full type of order ``k`` at sort ``s``; computed on first use."""
    return tuple(FullType(k, F, M, t) for F, M in _disjoint_pairs(k) for t in itypes_of_sort(s))


def count_itypes(s: Sort) -> int:
    if not isinstance(s, Arrow):
        return 1
    return 2 ** count_full_types(s.arg, order(s)) * count_itypes(s.result)


def count_full_types(s: Sort, k: int) -> int:
    """Size of the full-type set without building it."""
    return 3 ** k * count_itypes(s)


# ---------------------------------------------------------------------------
# order sets


def restrict(a: Iterable[int], n: int, mode: str = "below") -> frozenset[int]:
    if mode == "below":
        return frozenset(x for x in a if x < n)
    if mode == "atleast":
        return frozenset(x for x in a if x >= n)
    raise ValueError(f"mode must be 'below' or 'atleast', not {mode!r}")


def restrict_type(ft: FullType, k: int) -> FullType:
    """``(k, F<k, M<k, tau)``: what an operator of order ``k`` sees of an argument."""
    return FullType(k, restrict(ft.flags, k), restrict(ft.markers, k), ft.itype)


# ---------------------------------------------------------------------------
# environments


class TypeEnv:
    """Finite map from variables to sets of full types; absent means empty."""

    __slots__ = ("items", "_hash")

    def __init__(self, mapping: Mapping[Var, Iterable[FullType]] | Iterable = ()):
        if isinstance(mapping, Mapping):
            pairs = mapping.items()
        else:
            pairs = mapping
        clean = {}
        for v, ts in pairs:
            ts = frozenset(ts)
            if ts:
                clean[v] = clean.get(v, frozenset()) | ts
        self.items: tuple[tuple[Var, frozenset[FullType]], ...] = tuple(
            sorted(clean.items(), key=lambda kv: (kv[0].name, str(kv[0].sort))))
        self._hash = hash(self.items)

    def __call__(self, x: Var) -> frozenset[FullType]:
        return self.get(x)

    def get(self, x: Var) -> frozenset[FullType]:
        for v, ts in self.items:
            if v == x:
                return ts
        return frozenset()

    @property
    def vars(self) -> tuple[Var, ...]:
        return tuple(v for v, _ in self.items)

    def set(self, x: Var, ts: Iterable[FullType]) -> TypeEnv:
        d = dict(self.items)
        d[x] = frozenset(ts)
        return TypeEnv(d)

    def without(self, x: Var) -> TypeEnv:
        return TypeEnv((v, ts) for v, ts in self.items if v != x)

    def union(self, *others: TypeEnv) -> TypeEnv:
        return TypeEnv(itertools.chain(self.items, *(o.items for o in others)))

    def markers(self) -> frozenset[int]:
        return frozenset().union(*(t.markers for _, ts in self.items for t in ts))

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, TypeEnv) and self._hash == other._hash and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"TypeEnv({render_env(self)})"

    def __str__(self) -> str:
        return render_env(self)


EMPTY_ENV = TypeEnv()


def split(gamma: TypeEnv, parts: Sequence[TypeEnv]) -> bool:
    """Parts only use types from ``gamma``, and every marker-carrying type is used."""
    for p in parts:
        for v, ts in p.items:
            if not ts <= gamma.get(v):
                return False
    for v, ts in gamma.items:
        for t in ts:
            if t.markers and not any(t in p.get(v) for p in parts):
                return False
    return True


# ---------------------------------------------------------------------------
# flag propagation


@dataclass(frozen=True)
class CompTrace:
    flags: frozenset[int]
    counter: int
    f: tuple[int, ...]
    placed: tuple[int, ...]     # f'_n: flags of order n placed at this node


def comp_trace(m: int, markers: Iterable[int], inputs: Sequence[tuple[Iterable[int], int]]) -> CompTrace:
    markers = frozenset(markers)
    sets = [frozenset(F) for F, _ in inputs]
    f = [0] * (m + 1)
    placed = [0] * (m + 1)
    for n in range(m + 1):
        placed[n] = f[n - 1] if n > 0 and (n - 1) in markers else 0
        f[n] = placed[n] + sum(1 for F in sets if n in F)
    flags = frozenset(n for n in range(m) if f[n] > 0 and n not in markers)
    counter = placed[m] + sum(c for _, c in inputs)
    return CompTrace(flags, counter, tuple(f), tuple(placed))


def comp(m: int, markers: Iterable[int], inputs: Sequence[tuple[Iterable[int], int]]
         ) -> tuple[frozenset[int], int]:
    t = comp_trace(m, markers, inputs)
    return t.flags, t.counter


# ---------------------------------------------------------------------------
# text form: (2,{1},{},{(1,{},{0},o)}->o)


def _set(ns: Iterable[int]) -> str:
    return "{" + ",".join(str(n) for n in sorted(ns)) + "}"


@functools.lru_cache(maxsize=1 << 16)
def render(ft: FullType) -> str:
    return f"({ft.order},{_set(ft.flags)},{_set(ft.markers)},{render_itype(ft.itype)})"


@functools.lru_cache(maxsize=1 << 16)
def render_itype(t: IType) -> str:
    if isinstance(t, BaseType):
        return "o"
    args = sorted(render(a) for a in t.args)
    return "{" + ",".join(args) + "}->" + render_itype(t.result)


def render_env(env: TypeEnv) -> str:
    if not env:
        return "ε"
    parts = [f"{v.name}↦{{{','.join(sorted(render(t) for t in ts))}}}" for v, ts in env.items]
    return "[" + ", ".join(parts) + "]"


_TOK = re.compile(r"\s*(->|\d+|[(){},]|o)")


class _TypeParser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            mt = _TOK.match(text, pos)
            if not mt:
                raise TypeFormatError(f"unexpected character {text[pos]!r} at column {pos + 1}")
            self.toks.append((mt.group(1), mt.start(1) + 1))
            pos = mt.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, want: str | None = None) -> str:
        if self.i >= len(self.toks):
            raise TypeFormatError(f"unexpected end of {self.text!r}")
        tok, col = self.toks[self.i]
        if want is not None and tok != want:
            raise TypeFormatError(f"expected {want!r} at column {col}, found {tok!r}")
        self.i += 1
        return tok

    def full(self) -> FullType:
        self.take("(")
        k = self.take()
        if not k.isdigit():
            raise TypeFormatError(f"expected an order, found {k!r}")
        self.take(",")
        F = self.numbers()
        self.take(",")
        M = self.numbers()
        self.take(",")
        t = self.itype()
        self.take(")")
        return FullType(int(k), F, M, t)

    def numbers(self) -> frozenset[int]:
        self.take("{")
        out = set()
        while self.peek() != "}":
            tok = self.take()
            if not tok.isdigit():
                raise TypeFormatError(f"expected a number, found {tok!r}")
            out.add(int(tok))
            if self.peek() == ",":
                self.take(",")
        self.take("}")
        return frozenset(out)

    def itype(self) -> IType:
        if self.peek() == "o":
            self.take()
            return BASE
        self.take("{")
        args = []
        while self.peek() != "}":
            args.append(self.full())
            if self.peek() == ",":
                self.take(",")
        self.take("}")
        self.take("->")
        return ArrowType(frozenset(args), self.itype())


def parse_full_type(text: str) -> FullType:
    p = _TypeParser(text)
    ft = p.full()
    if p.peek() is not None:
        raise TypeFormatError(f"trailing input in {text!r}")
    return ft


def parse_itype(text: str) -> IType:
    p = _TypeParser(text)
    t = p.itype()
    if p.peek() is not None:
        raise TypeFormatError(f"trailing input in {text!r}")
    return t
