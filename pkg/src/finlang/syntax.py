"""Text formats for schemes and terms, with sort inference.

A scheme file looks like::

    # P1
    symbol a 1
    symbol e 0
    start S
    R : (o -> o) -> o
    S = R (\\x. a x)
    R f = br (f e) (R (\\x. f (f x)))

``br`` is always present with rank 2.  Sort declarations are optional; sorts
left unconstrained by inference default to ``o``.  Constants of positive rank
must be fully applied; write ``\\x. a x`` for the unary function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .sorts import O, Arrow, Sort, parse_sort
from .terms import (BR, App, Const, Lam, RankMismatch, SortMismatch, Term, TermError,
                    UnboundVariable, Var, Y, lams, show, sort_check, sort_of, substitute)


class ParseError(TermError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class SchemeError(TermError):
    pass


@dataclass(frozen=True)
class Rule:
    name: str
    params: tuple[Var, ...]
    body: Term


@dataclass
class Scheme:
    symbols: dict[str, int]
    sorts: dict[str, Sort]
    rules: dict[str, Rule]
    start: str
    declared: set[str] = field(default_factory=set, compare=False)

    def rule_term(self, name: str) -> Term:
        """The rule as a lambda term; other nonterminals occur as free variables."""
        r = self.rules[name]
        return lams(r.params, r.body)

    def check(self) -> None:
        if self.symbols.get(BR, 2) != 2:
            raise RankMismatch("br must have rank 2")
        if self.start not in self.rules:
            raise SchemeError(f"start nonterminal {self.start!r} has no rule")
        if self.sorts[self.start] != O:
            raise SortMismatch(f"start nonterminal {self.start} has sort {self.sorts[self.start]}")
        for name in self.rules:
            s = sort_check(self.rule_term(name), self.sorts)
            if s != self.sorts[name]:
                raise SortMismatch(f"rule {name} has sort {s}, declared {self.sorts[name]}")


# ---------------------------------------------------------------------------
# tokens and raw expressions

_TOKENS = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<arrow>->)
  | (?P<lam>\\|λ)
  | (?P<punct>[().=:])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def _tokenize(text: str, line: int) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos + 1))
        pos = m.end()
    return out


@dataclass
class _RVar:
    name: str
    col: int


@dataclass
class _RApp:
    fun: object
    arg: object


@dataclass
class _RLam:
    name: str
    sort: Sort | None
    body: object
    col: int


@dataclass
class _RY:
    col: int


class _ExprParser:
    def __init__(self, tokens, line):
        self.toks = tokens
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def expect(self, value):
        t = self.peek()
        if t is None or t[1] != value:
            col = t[2] if t else None
            raise ParseError(f"expected {value!r}", self.line, col)
        self.i += 1
        return t

    def expr(self):
        t = self.peek()
        if t is None:
            raise ParseError("expected an expression", self.line)
        if t[0] == "lam":
            self.i += 1
            binders = []
            while True:
                t = self.peek()
                if t is not None and t[0] == "ident":
                    binders.append((t[1], None, t[2]))
                    self.i += 1
                elif t is not None and t[1] == "(":
                    # \(x : sort). body
                    self.i += 1
                    name = self.peek()
                    if name is None or name[0] != "ident":
                        raise ParseError("expected a variable", self.line, name[2] if name else None)
                    self.i += 1
                    self.expect(":")
                    start = self.i
                    depth = 0
                    while self.peek() is not None and not (self.peek()[1] == ")" and depth == 0):
                        if self.peek()[1] == "(":
                            depth += 1
                        elif self.peek()[1] == ")":
                            depth -= 1
                        self.i += 1
                    text = " ".join(tok[1] for tok in self.toks[start:self.i])
                    self.expect(")")
                    try:
                        binders.append((name[1], parse_sort(text), name[2]))
                    except ValueError as e:
                        raise ParseError(str(e), self.line, name[2]) from None
                else:
                    break
            if not binders:
                raise ParseError("lambda without variables", self.line, t[2] if t else None)
            self.expect(".")
            body = self.expr()
            for name, s, col in reversed(binders):
                body = _RLam(name, s, body, col)
            return body
        head = self.atom()
        while True:
            t = self.peek()
            if t is None or t[1] in (")",):
                return head
            if t[0] == "lam":
                return _RApp(head, self.expr())
            head = _RApp(head, self.atom())

    def atom(self):
        t = self.peek()
        if t is None:
            raise ParseError("expected an expression", self.line)
        if t[1] == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "ident":
            self.i += 1
            if t[1] == "Y":
                return _RY(t[2])
            return _RVar(t[1], t[2])
        raise ParseError(f"unexpected {t[1]!r}", self.line, t[2])


# ---------------------------------------------------------------------------
# sort inference by unification


class _Infer:
    def __init__(self):
        self.parent: list[int] = []
        self.shape: list[object] = []  # None (unknown), "o", or (a, b)

    def new(self) -> int:
        self.parent.append(len(self.parent))
        self.shape.append(None)
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def of_sort(self, s: Sort) -> int:
        v = self.new()
        if isinstance(s, Arrow):
            self.shape[v] = (self.of_sort(s.arg), self.of_sort(s.result))
        else:
            self.shape[v] = "o"
        return v

    def arrow(self, a: int, b: int) -> int:
        v = self.new()
        self.shape[v] = (a, b)
        return v

    def occurs(self, v: int, w: int) -> bool:
        v = self.find(v)
        todo, seen = [w], set()
        while todo:
            w = self.find(todo.pop())
            if w == v:
                return True
            if w in seen:
                continue
            seen.add(w)
            s = self.shape[w]
            if isinstance(s, tuple):
                todo.extend(s)
        return False

    def unify(self, a: int, b: int, where: str) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        sa, sb = self.shape[a], self.shape[b]
        if sa is None:
            if self.occurs(a, b):
                raise SortMismatch(f"infinite sort while checking {where}")
            self.parent[a] = b
            return
        if sb is None:
            self.unify(b, a, where)
            return
        if sa == "o" and sb == "o":
            self.parent[a] = b
            return
        if isinstance(sa, tuple) and isinstance(sb, tuple):
            if self.occurs(a, b) or self.occurs(b, a):
                raise SortMismatch(f"infinite sort while checking {where}")
            self.parent[a] = b
            self.unify(sa[0], sb[0], where)
            self.unify(sa[1], sb[1], where)
            return
        raise SortMismatch(f"sort clash in {where}: {self.resolve(a)} vs {self.resolve(b)}")

    def resolve(self, v: int) -> Sort:
        v = self.find(v)
        s = self.shape[v]
        if isinstance(s, tuple):
            return Arrow(self.resolve(s[0]), self.resolve(s[1]))
        return O


class _Elaborator:
    """Turns raw expressions into terms, inferring all variable sorts."""

    def __init__(self, symbols: Mapping[str, int], line: int | None = None):
        self.symbols = dict(symbols)
        self.symbols.setdefault(BR, 2)
        self.inf = _Infer()
        self.line = line
        self.ys: list[int] = []

    def visit(self, e, env: dict[str, int]):
        """Returns (sort variable, builder) where builder() produces the term."""
        if isinstance(e, _RLam):
            if e.name in self.symbols:
                raise ParseError(f"{e.name} is a symbol and cannot be bound", self.line, e.col)
            v = self.inf.new() if e.sort is None else self.inf.of_sort(e.sort)
            sv, build = self.visit(e.body, {**env, e.name: v})
            name = e.name
            return self.inf.arrow(v, sv), lambda: Lam(Var(name, self.inf.resolve(v)), build())
        head, args = e, []
        while isinstance(head, _RApp):
            args.append(head.arg)
            head = head.fun
        args.reverse()
        if isinstance(head, _RVar) and head.name not in env and head.name in self.symbols:
            rank = self.symbols[head.name]
            if len(args) != rank:
                raise RankMismatch(
                    (f"line {self.line}: " if self.line else "")
                    + f"symbol {head.name} of rank {rank} applied to {len(args)} arguments"
                    + (" (write \\x. " + head.name + " x for the unary function)"
                       if len(args) < rank else ""))
            built = []
            for a in args:
                sv, b = self.visit(a, env)
                self.inf.unify(sv, self.inf.of_sort(O), f"argument of {head.name}")
                built.append(b)
            sym = head.name
            return self.inf.of_sort(O), lambda: Const(sym, rank, tuple(b() for b in built))
        if isinstance(head, _RVar):
            if head.name not in env:
                raise UnboundVariable(
                    (f"line {self.line}, column {head.col}: " if self.line else "")
                    + f"unknown name {head.name}")
            v = env[head.name]
            name = head.name
            sv, build = v, (lambda: Var(name, self.inf.resolve(v)))
        elif isinstance(head, _RY):
            a = self.inf.new()
            self.ys.append(a)
            sv = self.inf.arrow(self.inf.arrow(a, a), a)
            build = lambda: Y(self.inf.resolve(a))
        else:
            sv, build = self.visit(head, env)
        for arg in args:
            sa, ba = self.visit(arg, env)
            res = self.inf.new()
            self.inf.unify(sv, self.inf.arrow(sa, res), "application")
            build = (lambda f, x: lambda: App(f(), x()))(build, ba)
            sv = res
        return sv, build


def _strip_comment(line: str) -> str:
    for mark in ("#", "--"):
        i = line.find(mark)
        if i >= 0:
            line = line[:i]
    return line.strip()


def parse_scheme(text: str) -> Scheme:
    symbols: dict[str, int] = {BR: 2}
    declared: dict[str, Sort] = {}
    raw_rules: list[tuple[str, list[tuple[str, int]], object, int]] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        toks = _tokenize(line, lineno)
        if toks[0][1] == "symbol" and len(toks) == 3 and toks[1][0] == "ident":
            if toks[2][0] != "num":
                raise ParseError("symbol rank must be a number", lineno, toks[2][2])
            name, rank = toks[1][1], int(toks[2][1])
            if name == BR and rank != 2:
                raise RankMismatch(f"line {lineno}: br must have rank 2")
            symbols[name] = rank
            continue
        if toks[0][1] == "start" and len(toks) == 2 and toks[1][0] == "ident":
            start = toks[1][1]
            continue
        if len(toks) >= 3 and toks[0][0] == "ident" and toks[1][1] == ":":
            try:
                declared[toks[0][1]] = parse_sort(line.split(":", 1)[1])
            except ValueError as e:
                raise ParseError(str(e), lineno, toks[2][2]) from None
            continue
        eq = next((i for i, t in enumerate(toks) if t[1] == "="), None)
        if eq is None:
            raise ParseError("expected a rule 'N x1 ... xk = body'", lineno, 1)
        lhs = toks[:eq]
        if not lhs or any(t[0] != "ident" for t in lhs):
            raise ParseError("left-hand side must be a nonterminal and parameters", lineno, 1)
        parser = _ExprParser(toks[eq + 1:], lineno)
        body = parser.expr()
        if parser.peek() is not None:
            raise ParseError(f"unexpected {parser.peek()[1]!r}", lineno, parser.peek()[2])
        raw_rules.append((lhs[0][1], [(t[1], t[2]) for t in lhs[1:]], body, lineno))

    if not raw_rules:
        raise SchemeError("scheme has no rules")
    names = [r[0] for r in raw_rules]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise SchemeError(f"more than one rule for {sorted(dup)}")
    for n in names:
        if n in symbols:
            raise SchemeError(f"{n} is both a symbol and a nonterminal")
    for n in declared:
        if n not in names:
            raise SchemeError(f"sort declared for {n}, which has no rule")
    if start is None:
        start = "S" if "S" in names else names[0]

    el = _Elaborator(symbols)
    nt_vars = {n: (el.inf.of_sort(declared[n]) if n in declared else el.inf.new()) for n in names}
    builders = {}
    for name, params, body, lineno in raw_rules:
        el.line = lineno
        env = dict(nt_vars)
        pvars = []
        seen = set()
        for p, col in params:
            if p in symbols or p in nt_vars:
                raise ParseError(f"parameter {p} clashes with a symbol or nonterminal", lineno, col)
            if p in seen:
                raise ParseError(f"repeated parameter {p}", lineno, col)
            seen.add(p)
            v = el.inf.new()
            env[p] = v
            pvars.append((p, v))
        sv, build = el.visit(body, env)
        full = sv
        for _, v in reversed(pvars):
            full = el.inf.arrow(v, full)
        el.inf.unify(nt_vars[name], full, f"rule {name}")
        builders[name] = (pvars, build)

    sorts = {n: el.inf.resolve(v) for n, v in nt_vars.items()}
    rules = {}
    for name, (pvars, build) in builders.items():
        params = tuple(Var(p, el.inf.resolve(v)) for p, v in pvars)
        rules[name] = Rule(name, params, build())
    g = Scheme(symbols, sorts, rules, start, declared=set(declared))
    g.check()
    return g


def parse_term(text: str, symbols: Mapping[str, int] | None = None,
               free: Mapping[str, Sort] | None = None, sort: Sort | None = None) -> Term:
    """Parse a single term.  Unknown names are an error unless listed in ``free``."""
    symbols = dict(symbols or {})
    toks = _tokenize(text.strip(), 1)
    parser = _ExprParser(toks, 1)
    raw = parser.expr()
    if parser.peek() is not None:
        raise ParseError(f"unexpected {parser.peek()[1]!r}", 1, parser.peek()[2])
    el = _Elaborator(symbols, None)
    env = {n: el.inf.of_sort(s) for n, s in (free or {}).items()}
    sv, build = el.visit(raw, env)
    if sort is not None:
        el.inf.unify(sv, el.inf.of_sort(sort), "term")
    t = build()
    sort_check(t, free or {})
    return t


# ---------------------------------------------------------------------------
# printing and conversion


def _show_scheme_term(t: Term) -> str:
    return show(t, lam="\\")


def print_scheme(g: Scheme) -> str:
    lines = []
    for name, rank in g.symbols.items():
        if name != BR:
            lines.append(f"symbol {name} {rank}")
    lines.append(f"start {g.start}")
    for name in g.rules:
        lines.append(f"{name} : {g.sorts[name]}")
    for name, r in g.rules.items():
        lhs = " ".join([name] + [p.name for p in r.params])
        lines.append(f"{lhs} = {_print_body(r.body)}")
    return "\n".join(lines) + "\n"


def _print_body(t: Term) -> str:
    # Lambdas whose binder sort inference could not recover get an annotation.
    if isinstance(t, Lam):
        return f"\\({t.var.name} : {t.var.sort}). {_print_body(t.body)}"
    if isinstance(t, Const):
        if not t.args:
            return t.symbol
        return " ".join([t.symbol] + [_print_atom(a) for a in t.args])
    if isinstance(t, App):
        head, args = t, []
        while isinstance(head, App):
            args.append(head.arg)
            head = head.fun
        args.reverse()
        h = _print_atom(head) if isinstance(head, Lam) else _print_body(head)
        return " ".join([h] + [_print_atom(a) for a in args])
    if isinstance(t, Y):
        return "Y"
    return t.name


def _print_atom(t: Term) -> str:
    s = _print_body(t)
    if isinstance(t, (App, Lam)) or (isinstance(t, Const) and t.args):
        return f"({s})"
    return s


def _reaches_self(g: Scheme, name: str) -> bool:
    seen, todo = set(), [name]
    while todo:
        n = todo.pop()
        for v in _nt_refs(g, g.rules[n].body):
            if v == name:
                return True
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return False


def _nt_refs(g: Scheme, t: Term) -> list[str]:
    from .terms import free_vars

    bound = {p.name for p in ()}
    return sorted({v.name for v in free_vars(t) if v.name in g.rules and v.name not in bound})


def scheme_to_term(g: Scheme, name: str | None = None) -> Term:
    """Closed lambda-Y term of sort o whose language is the scheme's language.

    Each recursive nonterminal becomes ``Y (\\n. \\x1 .. xk. body)``; references to
    enclosing nonterminals are abstracted, the rest are inlined.  With ``name``
    the closed term for that nonterminal is returned instead (of its own sort).
    """
    g.check()
    if name is not None and name not in g.rules:
        raise SchemeError(f"no rule for nonterminal {name!r}")
    recursive = {n: _reaches_self(g, n) for n in g.rules}

    def build(name: str, stack: tuple[str, ...]) -> Term:
        body = g.rule_term(name)
        inner = stack + (name,) if recursive[name] else stack
        for ref in _nt_refs(g, body):
            if ref in inner:
                continue
            body = substitute(body, Var(ref, g.sorts[ref]), build(ref, inner))
        if recursive[name]:
            return App(Y(g.sorts[name]), Lam(Var(name, g.sorts[name]), body))
        return body

    t = build(name or g.start, ())
    sort_check(t)
    return t
