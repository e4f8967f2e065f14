"""Typing judgments, the five rules, and derivation validation.

Every ``apply_*`` function checks its rule's side conditions and returns a new
:class:`Derivation`; they are the only way the engine builds derivations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .itypes import (
    BASE, ArrowType, FullType, TypeEnv, comp_trace, has_sort, render, render_env, restrict,
    restrict_type, split,
)
from .terms import BR, Var
from .unfold import SubtermRef, make_app, make_con, make_lam, make_var


class RuleError(Exception):
    """A rule's side condition does not hold."""


class SubjectMismatch(RuleError):
    pass


class MarkerBelowBinderOrder(RuleError):
    pass


class SplitViolation(RuleError):
    pass


class FlagOrTypeMismatch(RuleError):
    pass


class BinderLeak(RuleError):
    pass


class BrNotAllowed(RuleError):
    pass


class MarkerCollision(RuleError):
    pass


class MarkerAtInnerNode(RuleError):
    pass


class ArgSetMismatch(RuleError):
    pass


class OrderExceeded(RuleError):
    pass


RULES = ("Br", "Var", "Lam", "Con", "App")


@dataclass(frozen=True)
class Skeleton:
    """A judgment without its flag counter."""

    env: TypeEnv
    subject: SubtermRef
    ftype: FullType
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.env, self.subject, self.ftype)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return (isinstance(other, Skeleton) and self._hash == other._hash
                and self.subject is other.subject and self.ftype == other.ftype
                and self.env == other.env)

    def sort_key(self) -> tuple:
        return (self.subject.uid, render(self.ftype), render_env(self.env))

    def __str__(self) -> str:
        return f"{render_env(self.env)} ⊢ {self.subject} : {render(self.ftype)}"


@dataclass(frozen=True)
class Judgment:
    env: TypeEnv
    subject: SubtermRef
    ftype: FullType
    counter: int

    @property
    def skeleton(self) -> Skeleton:
        return Skeleton(self.env, self.subject, self.ftype)

    @property
    def order(self) -> int:
        return self.ftype.order

    def __str__(self) -> str:
        return f"{render_env(self.env)} ⊢ {self.subject} : {render(self.ftype)} ▷ {self.counter}"


@dataclass(frozen=True)
class Derivation:
    conclusion: Judgment
    rule: str
    premisses: tuple[Derivation, ...] = ()
    placed_flags: tuple[tuple[int, int], ...] = ()    # (order, how many) placed at this node
    placed_markers: frozenset[int] = frozenset()
    var_type: FullType | None = None                  # Var: the environment's full type
    which: int | None = None                          # Br: chosen branch

    @property
    def counter(self) -> int:
        return self.conclusion.counter

    @property
    def weight(self) -> int:
        """Order-m flags counted at this node itself."""
        return self.counter - sum(p.counter for p in self.premisses)

    def nodes(self):
        """Pre-order walk yielding ``(path, node)``."""
        stack = [((), self)]
        while stack:
            path, d = stack.pop()
            yield path, d
            for i in reversed(range(len(d.premisses))):
                stack.append((path + (i,), d.premisses[i]))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def at(self, path: Sequence[int]) -> Derivation:
        d = self
        for i in path:
            d = d.premisses[i]
        return d

    def __str__(self) -> str:
        return str(self.conclusion)


def _placed(trace_placed: Sequence[int], extra: dict[int, int] | None = None) -> tuple:
    counts = {n: c for n, c in enumerate(trace_placed) if c}
    for n, c in (extra or {}).items():
        counts[n] = counts.get(n, 0) + c
    return tuple(sorted(counts.items()))


def _disjoint_union(sets: Sequence[frozenset[int]]) -> frozenset[int]:
    out: set[int] = set()
    for s in sets:
        clash = out & s
        if clash:
            raise MarkerCollision(f"marker orders {sorted(clash)} supplied twice")
        out |= s
    return frozenset(out)


def _check_split(env: TypeEnv, parts: Sequence[TypeEnv]) -> None:
    if not split(env, parts):
        raise SplitViolation(
            f"environment {render_env(env)} does not split into "
            + ", ".join(render_env(p) for p in parts))


# ---------------------------------------------------------------------------
# the rules


def apply_br(premiss: Derivation, which: int, subject: SubtermRef,
             requested: FullType | None = None) -> Derivation:
    if which not in (1, 2):
        raise SubjectMismatch("branch must be 1 or 2")
    if subject.kind != "con" or subject.symbol != BR or subject.rank != 2:
        raise SubjectMismatch(f"{subject} is not a br node")
    if subject.children[which - 1] is not premiss.conclusion.subject:
        raise SubjectMismatch(
            f"premiss is about {premiss.conclusion.subject}, not branch {which} of {subject}")
    if requested is not None and requested != premiss.conclusion.ftype:
        raise SubjectMismatch(
            f"br keeps the full type: premiss has {render(premiss.conclusion.ftype)}, "
            f"requested {render(requested)}")
    c = premiss.conclusion
    return Derivation(Judgment(c.env, subject, c.ftype, c.counter), "Br", (premiss,), which=which)


def apply_var(env: TypeEnv, x: SubtermRef | Var, env_type: FullType,
              requested: FullType) -> Derivation:
    if isinstance(x, Var):
        x = make_var(x)
    if x.kind != "var":
        raise SubjectMismatch(f"{x} is not a variable")
    if env_type.flags != requested.flags or env_type.itype != requested.itype:
        raise FlagOrTypeMismatch(
            f"variable type {render(env_type)} and requested {render(requested)} "
            "differ in flags or type")
    if not has_sort(requested, x.sort):
        raise FlagOrTypeMismatch(f"{render(requested)} is not of sort {x.sort}")
    k = env_type.order
    if restrict(requested.markers, k) != env_type.markers:
        raise MarkerBelowBinderOrder(
            f"markers below {k} of {render(requested)} must equal those of {render(env_type)}")
    _check_split(env, [TypeEnv({x.var: {env_type}})])
    placed = requested.markers - env_type.markers
    return Derivation(Judgment(env, x, requested, 0), "Var",
                      placed_markers=frozenset(placed), var_type=env_type)


def apply_lambda(premiss: Derivation, binder: Var, arg_set: Iterable[FullType],
                 env: TypeEnv, subject: SubtermRef | None = None) -> Derivation:
    arg_set = frozenset(arg_set)
    c = premiss.conclusion
    if subject is None:
        subject = make_lam(binder, c.subject)
    if subject.kind != "lam" or subject.var != binder or subject.children[0] is not c.subject:
        raise SubjectMismatch(f"{subject} is not λ{binder.name} over {c.subject}")
    if c.env.get(binder) != arg_set:
        raise BinderLeak(
            f"premiss binds {binder.name} to {{{','.join(sorted(map(render, c.env.get(binder))))}}}"
            f", not to the argument set")
    rest = c.env.without(binder)
    if rest.get(binder):
        raise BinderLeak(f"{binder.name} is still bound after abstraction")
    k = subject.order
    for t in arg_set:
        if t.order != k or not has_sort(t, binder.sort):
            raise FlagOrTypeMismatch(
                f"argument type {render(t)} must have order {k} and sort {binder.sort}")
    _check_split(env, [rest])
    provided = frozenset().union(*(t.markers for t in arg_set))
    ft = FullType(c.ftype.order, c.ftype.flags, c.ftype.markers - provided,
                  ArrowType(arg_set, c.ftype.itype))
    return Derivation(Judgment(env, subject, ft, c.counter), "Lam", (premiss,))


def apply_con(symbol: str | SubtermRef, premisses: Sequence[Derivation],
              marker_choice: Iterable[int], env: TypeEnv, m: int,
              subject: SubtermRef | None = None) -> Derivation:
    if isinstance(symbol, SubtermRef):
        subject, symbol = symbol, symbol.symbol
    marker_choice = frozenset(marker_choice)
    if symbol == BR:
        raise BrNotAllowed("br is typed with the br rule")
    premisses = tuple(premisses)
    if subject is None:
        subject = make_con(symbol, tuple(p.conclusion.subject for p in premisses))
    if subject.kind != "con" or subject.symbol != symbol:
        raise SubjectMismatch(f"{subject} is not headed by {symbol}")
    if len(premisses) != subject.rank:
        raise SubjectMismatch(f"{symbol} has rank {subject.rank}, got {len(premisses)} premisses")
    for child, p in zip(subject.children, premisses):
        if p.conclusion.subject is not child:
            raise SubjectMismatch(f"premiss is about {p.conclusion.subject}, expected {child}")
        ft = p.conclusion.ftype
        if ft.order != m or ft.itype != BASE:
            raise FlagOrTypeMismatch(f"argument premiss {render(ft)} must be of order {m} and type o")
    if premisses and marker_choice:
        raise MarkerAtInnerNode(f"markers {sorted(marker_choice)} placed at a node with arguments")
    if any(not 0 <= n < m for n in marker_choice):
        raise FlagOrTypeMismatch(f"marker orders must lie in 0..{m - 1}")
    M = _disjoint_union([marker_choice] + [p.conclusion.ftype.markers for p in premisses])
    _check_split(env, [p.conclusion.env for p in premisses])
    own = (frozenset(), 1) if m == 0 else (frozenset((0,)), 0)
    inputs = [own] + [(p.conclusion.ftype.flags, p.counter) for p in premisses]
    tr = comp_trace(m, M, inputs)
    placed = _placed(tr.placed, {0: 1})
    ft = FullType(m, tr.flags, M, BASE)
    return Derivation(Judgment(env, subject, ft, tr.counter), "Con", premisses,
                      placed_flags=placed, placed_markers=marker_choice)


def apply_app(op: Derivation, args: Sequence[Derivation], env: TypeEnv,
              subject: SubtermRef | None = None) -> Derivation:
    args = tuple(args)
    oc = op.conclusion
    P = oc.subject
    if subject is None:
        if not args:
            raise SubjectMismatch("an application without operand premisses needs its subject")
        subject = make_app(P, args[0].conclusion.subject)
    if subject.kind != "app" or subject.children[0] is not P:
        raise SubjectMismatch(f"{subject} does not apply {P}")
    Q = subject.children[1]
    for a in args:
        if a.conclusion.subject is not Q:
            raise SubjectMismatch(f"operand premiss is about {a.conclusion.subject}, expected {Q}")
    if not isinstance(oc.ftype.itype, ArrowType):
        raise FlagOrTypeMismatch(f"operator type {render(oc.ftype)} is not an arrow")
    m = oc.ftype.order
    k = P.order
    if k > m:
        raise OrderExceeded(f"operator of order {k} exceeds m={m}")
    for a in args:
        if a.conclusion.ftype.order != m:
            raise FlagOrTypeMismatch(f"operand premiss {render(a.conclusion.ftype)} is not of order {m}")
    seen = frozenset(restrict_type(a.conclusion.ftype, k) for a in args)
    if seen != oc.ftype.itype.args:
        raise ArgSetMismatch(
            "operator expects {" + ",".join(sorted(map(render, oc.ftype.itype.args)))
            + "} but operands give {" + ",".join(sorted(map(render, seen))) + "}")
    M = _disjoint_union([oc.ftype.markers] + [a.conclusion.ftype.markers for a in args])
    _check_split(env, [oc.env] + [a.conclusion.env for a in args])
    inputs = [(oc.ftype.flags, op.counter)] + [
        (restrict(a.conclusion.ftype.flags, k, "atleast"), a.counter) for a in args]
    tr = comp_trace(m, M, inputs)
    ft = FullType(m, tr.flags, M, oc.ftype.itype.result)
    return Derivation(Judgment(env, subject, ft, tr.counter), "App", (op,) + args,
                      placed_flags=_placed(tr.placed))


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    failures: list[tuple[tuple[int, ...], str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"at {list(p)}: {kind}: {msg}" for p, kind, msg in self.failures)


def recheck(d: Derivation) -> Derivation:
    """Rebuild one node from its premisses through the matching rule."""
    c = d.conclusion
    if d.rule == "Br":
        if len(d.premisses) != 1:
            raise SubjectMismatch("br has exactly one premiss")
        return apply_br(d.premisses[0], d.which or 0, c.subject, c.ftype)
    if d.rule == "Var":
        if d.premisses or d.var_type is None:
            raise SubjectMismatch("a variable leaf needs its environment type and no premisses")
        return apply_var(c.env, c.subject, d.var_type, c.ftype)
    if d.rule == "Lam":
        if len(d.premisses) != 1 or c.subject.kind != "lam":
            raise SubjectMismatch("λ has exactly one premiss")
        x = c.subject.var
        return apply_lambda(d.premisses[0], x, d.premisses[0].conclusion.env.get(x), c.env, c.subject)
    if d.rule == "Con":
        if c.subject.kind != "con":
            raise SubjectMismatch(f"{c.subject} is not a constant")
        return apply_con(c.subject, d.premisses, d.placed_markers, c.env, c.ftype.order)
    if d.rule == "App":
        if not d.premisses:
            raise SubjectMismatch("application needs an operator premiss")
        return apply_app(d.premisses[0], d.premisses[1:], c.env, c.subject)
    raise SubjectMismatch(f"unknown rule {d.rule!r}")


def validate(d: Derivation) -> ValidationReport:
    report = ValidationReport()
    orders_seen: dict[int, tuple[int, ...]] = {}
    m = d.conclusion.ftype.order
    for path, node in d.nodes():
        try:
            again = recheck(node)
        except RuleError as e:
            report.failures.append((path, type(e).__name__, str(e)))
            continue
        if node.conclusion.ftype.order != m:
            report.failures.append((path, "OrderMismatch",
                                    f"node has order {node.conclusion.ftype.order}, root {m}"))
        if again.conclusion != node.conclusion:
            report.failures.append((path, "ConclusionMismatch",
                                    f"recomputed {again.conclusion}, stored {node.conclusion}"))
        if again.placed_flags != node.placed_flags or again.placed_markers != node.placed_markers:
            report.failures.append((path, "PlacementMismatch", "stored placements differ"))
        for n in sorted(node.placed_markers):
            if n in orders_seen:
                report.failures.append((path, "MarkerCollision",
                                        f"order-{n} marker also placed at {list(orders_seen[n])}"))
            else:
                orders_seen[n] = path
    return report


def replace_at(d: Derivation, path: Sequence[int], new: Derivation) -> Derivation:
    """Swap the sub-derivation at ``path`` and recount counters on the way up.

    ``new`` must conclude the same skeleton as the node it replaces.
    """
    if not path:
        return new
    i = path[0]
    child = replace_at(d.premisses[i], path[1:], new)
    prem = d.premisses[:i] + (child,) + d.premisses[i + 1:]
    delta = child.counter - d.premisses[i].counter
    c = d.conclusion
    return Derivation(Judgment(c.env, c.subject, c.ftype, c.counter + delta), d.rule, prem,
                      d.placed_flags, d.placed_markers, d.var_type, d.which)


def flag_count(d: Derivation, n: int) -> int:
    """Number of order-``n`` flags placed in the whole derivation."""
    return sum(c for _, node in d.nodes() for k, c in node.placed_flags if k == n)
