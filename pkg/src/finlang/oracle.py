"""Ground truth by brute force: head reduction, Böhm tree prefixes, and
bounded enumeration of the finite br-free trees a term generates.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .terms import App, Const, Lam, Term, Var, Y, BR, free_vars, sort_check, spine, substitute

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_DEPTH_FUEL = 64
DEFAULT_STEP_FUEL = 2000


class _Diverged:
    """Head normalization ran out of step fuel."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Diverged"


DIVERGED = _Diverged()


def head_step(t: Term) -> Term | None:
    """One leftmost head step (beta, or ``Y M -> M (Y M)``); None in head normal form."""
    head, args = spine(t)
    if isinstance(head, Lam) and args:
        body = substitute(head.body, head.var, args[0])
        rest = args[1:]
    elif isinstance(head, Y) and args:
        body = App(args[0], App(head, args[0]))
        rest = args[1:]
    else:
        return None
    for a in rest:
        body = App(body, a)
    return body


def hnf(t: Term, step_fuel: int = DEFAULT_STEP_FUEL) -> Term | _Diverged:
    for _ in range(step_fuel + 1):
        nxt = head_step(t)
        if nxt is None:
            return t
        t = nxt
    return DIVERGED


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class FiniteTree:
    symbol: str
    children: tuple[FiniteTree, ...] = ()

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    def sexpr(self) -> str:
        return "(" + " ".join([self.symbol] + [c.sexpr() for c in self.children]) + ")"

    def __str__(self) -> str:
        return self.sexpr()

    def sort_key(self) -> tuple:
        return (self.size, self.sexpr())


def parse_tree(text: str) -> FiniteTree:
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def node() -> FiniteTree:
        nonlocal pos
        if pos >= len(toks) or toks[pos] != "(":
            raise ValueError(f"expected '(' in tree {text!r}")
        pos += 1
        if pos >= len(toks) or toks[pos] in "()":
            raise ValueError(f"expected a symbol in tree {text!r}")
        sym = toks[pos]
        pos += 1
        kids = []
        while pos < len(toks) and toks[pos] == "(":
            kids.append(node())
        if pos >= len(toks) or toks[pos] != ")":
            raise ValueError(f"unbalanced tree {text!r}")
        pos += 1
        return FiniteTree(sym, tuple(kids))

    t = node()
    if pos != len(toks):
        raise ValueError(f"trailing input in tree {text!r}")
    return t


@dataclass(frozen=True)
class PNode:
    symbol: str
    children: tuple = ()


@dataclass(frozen=True)
class Unexpanded:
    term: Term


PartialTree = "PNode | Unexpanded | _Diverged"


def render_partial(t) -> str:
    if t is DIVERGED:
        return "⊥"
    if isinstance(t, Unexpanded):
        return "?"
    return "(" + " ".join([t.symbol] + [render_partial(c) for c in t.children]) + ")"


def _check_closed(p: Term) -> None:
    fv = free_vars(p)
    if fv:
        raise ValueError("term has free variables: " + ", ".join(sorted(v.name for v in fv)))
    sort_check(p)


def bohm_expand(p: Term, depth_fuel: int = 8, step_fuel: int = DEFAULT_STEP_FUEL):
    """Böhm tree prefix: nodes below ``depth_fuel`` stay Unexpanded."""
    _check_closed(p)

    def go(t: Term, depth: int):
        if depth >= depth_fuel:
            return Unexpanded(t)
        h = hnf(t, step_fuel)
        if h is DIVERGED:
            return DIVERGED
        if not isinstance(h, Const):
            raise ValueError(f"closed term of sort o has head normal form {h}")
        return PNode(h.symbol, tuple(go(a, depth + 1) for a in h.args))

    return go(p, 0)


# ---------------------------------------------------------------------------
# enumeration


@dataclass
class Enumeration:
    trees: list[FiniteTree]
    complete: bool

    @property
    def sizes(self) -> list[int]:
        return sorted({t.size for t in self.trees})


class _Enumerator:
    def __init__(self, depth_fuel: int, step_fuel: int):
        self.depth_fuel = depth_fuel
        self.step_fuel = step_fuel
        self.memo: dict[tuple[Term, int], tuple[frozenset, bool, int]] = {}
        self.hnfs: dict[Term, Term | _Diverged] = {}
        self.stack: dict[tuple[Term, int], int] = {}

    def head(self, t: Term):
        h = self.hnfs.get(t)
        if h is None:
            h = self.hnfs[t] = hnf(t, self.step_fuel)
        return h

    def gen(self, t: Term, budget: int, depth: int) -> tuple[frozenset, bool, int]:
        """Trees of size <= budget, exhaustiveness, and the lowest open cycle entry."""
        if budget <= 0:
            return frozenset(), True, 1 << 30
        key = (t, budget)
        hit = self.memo.get(key)
        if hit is not None and (hit[1] or hit[2] <= depth):
            return hit[0], hit[1], 1 << 30
        if key in self.stack:
            # br-only cycle: contributes nothing beyond the rest of the cycle
            return frozenset(), True, self.stack[key]
        if depth >= self.depth_fuel:
            return frozenset(), False, 1 << 30
        h = self.head(t)
        if h is DIVERGED:
            return frozenset(), False, 1 << 30
        if not isinstance(h, Const):
            raise ValueError(f"closed term of sort o has head normal form {h}")
        me = len(self.stack)
        self.stack[key] = me
        try:
            if h.symbol == BR:
                a, ok1, o1 = self.gen(h.args[0], budget, depth + 1)
                b, ok2, o2 = self.gen(h.args[1], budget, depth + 1)
                out, ok, low = a | b, ok1 and ok2, min(o1, o2)
            else:
                out, ok, low = self._con(h, budget, depth)
        finally:
            del self.stack[key]
        if low >= me:
            self.memo[key] = (out, ok, depth)
            low = 1 << 30
        return out, ok, low

    def _con(self, h: Const, budget: int, depth: int):
        r = len(h.args)
        room = budget - 1 - r           # every child needs at least one node
        if room < 0:
            return frozenset(), True, 1 << 30
        parts = []
        ok = True
        low = 1 << 30
        for a in h.args:
            trees, ok_a, lo = self.gen(a, room + 1, depth + 1)
            ok = ok and ok_a
            low = min(low, lo)
            if not trees:
                return frozenset(), ok, low
            parts.append(sorted(trees, key=FiniteTree.sort_key))
        out = set()

        def combine(i: int, used: int, acc: list) -> None:
            if i == r:
                out.add(FiniteTree(h.symbol, tuple(acc)))
                return
            for t in parts[i]:
                if used + t.size + (r - i - 1) > budget - 1:
                    break
                combine(i + 1, used + t.size, acc + [t])

        combine(0, 0, [])
        return frozenset(out), ok, low


def language_upto(p: Term, max_size: int, depth_fuel: int = DEFAULT_DEPTH_FUEL,
                  step_fuel: int = DEFAULT_STEP_FUEL) -> Enumeration:
    """Members of the language of size <= max_size found within the fuel.

    ``complete`` is True when no fuel cutoff happened where a tree could still
    have fit; then the result is every member of size <= max_size.
    """
    _check_closed(p)
    en = _Enumerator(depth_fuel, step_fuel)
    trees, ok, _ = en.gen(p, max_size, 0)
    return Enumeration(sorted(trees, key=FiniteTree.sort_key), ok)


def replay(p: Term, tree: FiniteTree, step_fuel: int = DEFAULT_STEP_FUEL,
           max_choices: int = 10_000, depth_fuel: int = DEFAULT_DEPTH_FUEL) -> list[int] | None:
    """A sequence of br choices (1 or 2, in pre-order) producing ``tree``, or None.

    At most ``depth_fuel`` nested br nodes are crossed between two constructors,
    so None may also mean "not found within the fuel".
    """
    _check_closed(p)
    hnfs: dict[Term, Term | _Diverged] = {}
    failed: set[tuple[Term, FiniteTree]] = set()

    def head(t: Term):
        if t not in hnfs:
            hnfs[t] = hnf(t, step_fuel)
        return hnfs[t]

    cuts = 0

    def match(t: Term, u: FiniteTree, path: frozenset) -> list[int] | None:
        nonlocal cuts
        key = (t, u)
        if key in failed or key in path:
            return None
        if len(path) > depth_fuel:
            cuts += 1
            return None
        seen = cuts

        def fail() -> None:
            # a failure below a fuel cutoff is not definitive
            if cuts == seen:
                failed.add(key)

        h = head(t)
        if h is DIVERGED or not isinstance(h, Const):
            return None
        inner = path | {key}
        if h.symbol == BR:
            for i, a in enumerate(h.args):
                got = match(a, u, inner)
                if got is not None:
                    return [i + 1] + got
            fail()
            return None
        if h.symbol != u.symbol or len(h.args) != len(u.children):
            fail()
            return None
        out: list[int] = []
        for a, c in zip(h.args, u.children):
            got = match(a, c, frozenset())
            if got is None:
                fail()
                return None
            out.extend(got)
            if len(out) > max_choices:
                return None
        return out

    return match(p, tree, frozenset())


def growth_report(p: Term, schedule: Sequence[tuple[int, int, int] | tuple[int, int] | int]
                  ) -> list[dict]:
    """Largest discovered tree per schedule step.

    Steps are ``max_size`` or ``(max_size, depth_fuel[, step_fuel])``.  Every
    row carries ``increasing``: whether the largest size so far grew at every
    step up to and including this one.
    """
    rows = []
    prev = None
    increasing = True
    for step in schedule:
        if isinstance(step, int):
            step = (step,)
        max_size = step[0]
        depth = step[1] if len(step) > 1 else max(DEFAULT_DEPTH_FUEL, 2 * max_size)
        steps = step[2] if len(step) > 2 else DEFAULT_STEP_FUEL
        en = language_upto(p, max_size, depth, steps)
        largest = max((t.size for t in en.trees), default=0)
        if prev is not None and largest <= prev:
            increasing = False
        prev = largest
        rows.append({"max_size": max_size, "depth_fuel": depth, "step_fuel": steps,
                     "found": len(en.trees), "largest": largest, "complete": en.complete,
                     "increasing": increasing})
    return rows


def report_lines(rows: Iterable[dict]) -> Iterator[str]:
    for r in rows:
        yield json.dumps(r, sort_keys=True)
