"""Deciding finiteness: skeleton saturation and pump detection.

Saturation computes every derivable judgment skeleton (a judgment without its
flag counter) for the subterms of the unfolding, together with the rule
instances ("productions") that derive each skeleton from others.  Counters are
additive: a derivation's counter is the sum of the order-m flags counted at
each of its nodes.  So the productions form a weighted tree grammar, and the
root counter is unbounded exactly when some skeleton used by a root derivation
can be re-derived from itself through a context of positive weight.

Normal form used during saturation (see the decisions log):

* an environment lists exactly the full types used at the leaves below;
* an application has one operand premiss per element of the operator's
  argument set.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .itypes import (
    BASE, ArrowType, FullType, TypeEnv, comp_trace, render, restrict, restrict_type, rho,
)
from .rules import (
    Derivation, Skeleton, apply_app, apply_br, apply_con, apply_lambda, apply_var, replace_at,
)
from .sorts import O, Arrow, Sort, order
from .terms import BR, Term, free_vars, sort_check
from .unfold import SubtermRef, iter_closure, ref_of

log = logging.getLogger(__name__)

EMPTY = TypeEnv()


class BudgetExhausted(Exception):
    """The search budget ran out before saturation finished."""


class NotFound(Exception):
    """No derivation with the requested properties exists."""


@dataclass(frozen=True)
class Production:
    rule: str
    premisses: tuple[Skeleton, ...]
    weight: int
    var_type: FullType | None = None
    which: int | None = None
    markers: frozenset[int] = frozenset()


def _subsets(xs: Sequence[int]) -> Iterator[frozenset[int]]:
    for r in range(len(xs) + 1):
        for c in itertools.combinations(xs, r):
            yield frozenset(c)


# ---------------------------------------------------------------------------
# saturation


class Saturation:
    """Least fixpoint of derivable skeletons of order ``m`` below ``root``."""

    def __init__(self, root: SubtermRef, m: int, seeds: Iterable[tuple[Sort, FullType]] = (),
                 budget: int | None = None, threads: int = 1):
        self.root = root
        self.m = m
        self.budget = budget
        self.threads = max(1, threads)
        self.nodes = list(iter_closure(root))
        self.skeletons: dict[SubtermRef, dict[Skeleton, None]] = {n: {} for n in self.nodes}
        self.productions: dict[Skeleton, dict[Production, None]] = {}
        self.pool: dict[tuple[Sort, int], dict[FullType, None]] = {}
        self.argidx: dict[tuple[SubtermRef, int], dict[FullType, list[Skeleton]]] = {}
        self.spent = 0
        self.rounds = 0
        self._parents: dict[SubtermRef, list[SubtermRef]] = {n: [] for n in self.nodes}
        for n in self.nodes:
            for c in dict.fromkeys(n.children):
                self._parents[c].append(n)
        # operand positions: Q -> operator orders of applications to Q
        self._operand_orders: dict[SubtermRef, set[int]] = {}
        for n in self.nodes:
            if n.kind == "app":
                self._operand_orders.setdefault(n.children[1], set()).add(n.children[0].order)
        self._binder_orders: dict[SubtermRef, list[int]] = {}
        for n in self.nodes:
            if n.kind == "var":
                ks = sorted({b.order for b in self.nodes if b.kind == "lam" and b.var == n.var})
                self._binder_orders[n] = ks or [order(n.sort)]
        self._var_nodes: dict[tuple[Sort, int], list[SubtermRef]] = {}
        for n, ks in self._binder_orders.items():
            for k in ks:
                self._var_nodes.setdefault((n.sort, k), []).append(n)
        self._seeds = list(seeds)

    # -- bookkeeping ---------------------------------------------------------

    def _spend(self, n: int = 1) -> None:
        self.spent += n
        if self.budget is not None and self.spent > self.budget:
            raise BudgetExhausted(
                f"budget of {self.budget} skeletons and productions exhausted "
                f"after {self.rounds} rounds")

    def _pool_add(self, sort: Sort, t: FullType, fresh: list) -> None:
        p = self.pool.setdefault((sort, t.order), {})
        if t not in p:
            p[t] = None
            fresh.append((sort, t))

    def _add(self, skel: Skeleton, prod: Production, delta: list, fresh_pool: list) -> None:
        prods = self.productions.get(skel)
        if prods is None:
            self._spend()
            prods = self.productions[skel] = {}
            self.skeletons[skel.subject][skel] = None
            delta.append(skel)
            q = skel.subject
            for k in sorted(self._operand_orders.get(q, ())):
                if k > self.m:
                    continue
                t = restrict_type(skel.ftype, k)
                self.argidx.setdefault((q, k), {}).setdefault(t, []).append(skel)
                self._pool_add(q.sort, t, fresh_pool)
        if prod not in prods:
            self._spend()
            prods[prod] = None

    # -- rule instances ------------------------------------------------------

    def _leaf_constants(self) -> list[tuple[Skeleton, Production]]:
        out = []
        m = self.m
        for n in self.nodes:
            if n.kind == "con" and n.rank == 0 and n.symbol != BR:
                for X in _subsets(range(m)):
                    own = (frozenset(), 1) if m == 0 else (frozenset((0,)), 0)
                    tr = comp_trace(m, X, [own])
                    ft = FullType(m, tr.flags, X, BASE)
                    out.append((Skeleton(EMPTY, n, ft), Production("Con", (), tr.counter, markers=X)))
        return out

    def _var_instances(self, sort: Sort, t: FullType) -> list[tuple[Skeleton, Production]]:
        out = []
        m = self.m
        k = t.order
        if any(f >= m for f in t.flags) or any(x >= m for x in t.markers):
            return out
        for n in self._var_nodes.get((sort, k), ()):
            env = TypeEnv({n.var: {t}})
            for X in _subsets(range(k, m)):
                ft = FullType(m, t.flags, t.markers | X, t.itype)
                out.append((Skeleton(env, n, ft), Production("Var", (), 0, var_type=t)))
        return out

    def _instances_at(self, node: SubtermRef, new: set[Skeleton]) -> list[tuple[Skeleton, Production]]:
        """Rule instances at ``node`` that use at least one skeleton from ``new``."""
        m = self.m
        kind = node.kind
        out: list[tuple[Skeleton, Production]] = []
        if kind == "con" and node.symbol == BR:
            for i, child in enumerate(node.children):
                for s in self.skeletons[child]:
                    if s in new:
                        out.append((Skeleton(s.env, node, s.ftype),
                                    Production("Br", (s,), 0, which=i + 1)))
        elif kind == "con":
            lists = [list(self.skeletons[c]) for c in node.children]
            for combo in _combos_with_new(lists, new):
                M: frozenset[int] = frozenset()
                ok = True
                for s in combo:
                    if M & s.ftype.markers:
                        ok = False
                        break
                    M |= s.ftype.markers
                if not ok:
                    continue
                own = (frozenset(), 1) if m == 0 else (frozenset((0,)), 0)
                tr = comp_trace(m, M, [own] + [(s.ftype.flags, 0) for s in combo])
                env = TypeEnv(()).union(*(s.env for s in combo))
                out.append((Skeleton(env, node, FullType(m, tr.flags, M, BASE)),
                            Production("Con", tuple(combo), tr.counter)))
        elif kind == "lam":
            x = node.var
            k = node.order
            for s in self.skeletons[node.children[0]]:
                if s not in new:
                    continue
                T = s.env.get(x)
                if any(t.order != k for t in T):
                    continue
                provided = frozenset().union(*(t.markers for t in T))
                ft = FullType(m, s.ftype.flags, s.ftype.markers - provided,
                              ArrowType(T, s.ftype.itype))
                out.append((Skeleton(s.env.without(x), node, ft), Production("Lam", (s,), 0)))
        elif kind == "app":
            P, Q = node.children
            k = P.order
            if k > m:
                return out
            idx = self.argidx.get((Q, k), {})
            for op in list(self.skeletons[P]):
                T = sorted(op.ftype.itype.args, key=render)
                lists = []
                for t in T:
                    lst = idx.get(t)
                    if not lst:
                        break
                    lists.append(list(lst))
                else:
                    if op in new:
                        combos = itertools.product(*lists)
                    else:
                        combos = _combos_with_new(lists, new)
                    for args in combos:
                        M = op.ftype.markers
                        ok = True
                        for s in args:
                            if M & s.ftype.markers:
                                ok = False
                                break
                            M = M | s.ftype.markers
                        if not ok:
                            continue
                        inputs = [(op.ftype.flags, 0)] + [
                            (restrict(s.ftype.flags, k, "atleast"), 0) for s in args]
                        tr = comp_trace(m, M, inputs)
                        env = op.env.union(*(s.env for s in args))
                        ft = FullType(m, tr.flags, M, op.ftype.itype.result)
                        out.append((Skeleton(env, node, ft),
                                    Production("App", (op,) + tuple(args), tr.counter)))
        return out

    # -- main loop -------------------------------------------------------------

    def run(self) -> Saturation:
        delta: list[Skeleton] = []
        fresh: list[tuple[Sort, FullType]] = []
        for sort, t in self._seeds:
            self._pool_add(sort, t, fresh)
        for skel, prod in self._leaf_constants():
            self._add(skel, prod, delta, fresh)
        while delta or fresh:
            self.rounds += 1
            new = set(delta)
            affected: dict[SubtermRef, None] = {}
            for s in delta:
                for p in self._parents[s.subject]:
                    affected[p] = None
            pool_delta = fresh
            delta, fresh = [], []
            order_nodes = sorted(affected, key=lambda n: n.uid)
            if self.threads > 1 and len(order_nodes) > 1:
                with ThreadPoolExecutor(self.threads) as ex:
                    results = list(ex.map(lambda n: self._instances_at(n, new), order_nodes))
            else:
                results = [self._instances_at(n, new) for n in order_nodes]
            for batch in results:
                for skel, prod in batch:
                    self._add(skel, prod, delta, fresh)
            for sort, t in pool_delta:
                for skel, prod in self._var_instances(sort, t):
                    self._add(skel, prod, delta, fresh)
            log.debug("round %d: %d new skeletons, %d new pool types",
                      self.rounds, len(delta), len(fresh))
        return self

    # -- accessors -------------------------------------------------------------

    def skeleton_count(self) -> int:
        return len(self.productions)

    def production_count(self) -> int:
        return sum(len(p) for p in self.productions.values())

    def has(self, skel: Skeleton) -> bool:
        return skel in self.productions

    def of_subject(self, subject: SubtermRef) -> list[Skeleton]:
        return list(self.skeletons.get(subject, {}))


def _combos_with_new(lists: list[list[Skeleton]], new: set[Skeleton]) -> Iterator[tuple]:
    """Cartesian product restricted to tuples containing a member of ``new``.

    Each tuple is produced once: position ``j`` is the first new element.
    """
    olds = [[s for s in lst if s not in new] for lst in lists]
    news = [[s for s in lst if s in new] for lst in lists]
    for j in range(len(lists)):
        if not news[j]:
            continue
        parts = olds[:j] + [news[j]] + lists[j + 1:]
        yield from itertools.product(*parts)


# ---------------------------------------------------------------------------
# counter analysis over the production grammar


@dataclass
class Witness:
    """A root derivation with two equal skeletons on one branch.

    ``ancestor`` and ``descendant`` are premiss-index paths from the root; the
    ancestor's counter exceeds the descendant's by ``gain``.
    """

    derivation: Derivation
    ancestor: tuple[int, ...]
    descendant: tuple[int, ...]
    gain: int

    @property
    def section(self) -> tuple[int, ...]:
        return self.descendant[len(self.ancestor):]


@dataclass
class Verdict:
    kind: str
    m: int
    witness: Witness | None = None
    max_counter: int | None = None
    size_bound: int | None = None
    stats: dict = field(default_factory=dict)

    @property
    def infinite(self) -> bool:
        return self.kind == "INFINITE"

    def __str__(self) -> str:
        return self.kind


class Analysis:
    """Counter bounds for every skeleton of a finished saturation."""

    def __init__(self, sat: Saturation):
        self.sat = sat
        self.prods: dict[Skeleton, list[Production]] = {
            s: list(ps) for s, ps in sat.productions.items()}
        self._min: dict[Skeleton, tuple[int, Production]] | None = None
        self._pos: dict[Skeleton, tuple[int, Production, int | None]] | None = None
        self._derivations: dict[Skeleton, Derivation] = {}

    # -- minimum counters -------------------------------------------------------

    def _relax(self, better) -> dict[Skeleton, tuple[int, Production]]:
        """Synchronous rounds of relaxation.

        A skeleton's record only changes when its value strictly improves, so
        every recorded production refers to premisses recorded in earlier
        rounds and the records are well founded.
        """
        best: dict[Skeleton, tuple[int, Production, int]] = {}
        rnd = 0
        changed = True
        while changed:
            changed = False
            rnd += 1
            snapshot = dict(best)
            for s, ps in self.prods.items():
                for p in ps:
                    if all(q in snapshot for q in p.premisses):
                        v = p.weight + sum(snapshot[q][0] for q in p.premisses)
                        cur = best.get(s)
                        if cur is None or better(v, cur[0]):
                            best[s] = (v, p, rnd)
                            changed = True
            if rnd > 4 * len(self.prods) + 10 and better(1, 0):
                raise RuntimeError("counter maximization does not converge")
        return {s: (v, p) for s, (v, p, _) in best.items()}

    @property
    def minimum(self) -> dict[Skeleton, tuple[int, Production]]:
        if self._min is None:
            self._min = self._relax(lambda a, b: a < b)
        return self._min

    @property
    def positive(self) -> dict[Skeleton, tuple[int, Production, int | None]]:
        """Skeletons with some derivation of counter > 0, with a reason."""
        if self._pos is None:
            pos: dict[Skeleton, tuple[int, Production, int | None]] = {}
            rnd = 0
            changed = True
            while changed:
                changed = False
                rnd += 1
                snapshot = dict(pos)
                for s, ps in self.prods.items():
                    if s in pos:
                        continue
                    for p in ps:
                        if p.weight > 0:
                            pos[s] = (rnd, p, None)
                        else:
                            j = next((i for i, q in enumerate(p.premisses) if q in snapshot), None)
                            if j is None:
                                continue
                            pos[s] = (rnd, p, j)
                        changed = True
                        break
            self._pos = pos
        return self._pos

    def reachable(self, root: Skeleton) -> list[Skeleton]:
        seen = {root: None}
        q = deque([root])
        while q:
            s = q.popleft()
            for p in self.prods.get(s, ()):
                for c in p.premisses:
                    if c not in seen:
                        seen[c] = None
                        q.append(c)
        return list(seen)

    def components(self, nodes: list[Skeleton]) -> dict[Skeleton, int]:
        """Strongly connected component index of each skeleton."""
        g = nx.DiGraph()
        g.add_nodes_from(nodes)
        g.add_edges_from((s, c) for s in nodes for p in self.prods[s] for c in p.premisses)
        return {s: i for i, scc in enumerate(nx.strongly_connected_components(g)) for s in scc}

    def positive_edges(self, nodes: list[Skeleton]) -> list[tuple[Skeleton, Production, int]]:
        """Edges inside a component whose context adds to the counter."""
        comp = self.components(nodes)
        pos = self.positive
        out = []
        for s in nodes:
            for p in self.prods[s]:
                for j, q in enumerate(p.premisses):
                    if comp.get(q) != comp[s]:
                        continue
                    if p.weight > 0 or any(q2 in pos for i, q2 in enumerate(p.premisses) if i != j):
                        out.append((s, p, j))
        return out

    def maximum(self, root: Skeleton) -> dict[Skeleton, tuple[int, Production]]:
        """Largest counters; only meaningful when no positive cycle is reachable."""
        keep = set(self.reachable(root))
        sub = Analysis.__new__(Analysis)
        sub.prods = {s: ps for s, ps in self.prods.items() if s in keep}
        return Analysis._relax(sub, lambda a, b: a > b)

    # -- derivation reconstruction -------------------------------------------------

    def build(self, skel: Skeleton, prod: Production, premisses: Sequence[Derivation]) -> Derivation:
        m = self.sat.m
        subj = skel.subject
        if prod.rule == "Var":
            d = apply_var(skel.env, subj, prod.var_type, skel.ftype)
        elif prod.rule == "Con":
            d = apply_con(subj, premisses, prod.markers, skel.env, m)
        elif prod.rule == "Br":
            d = apply_br(premisses[0], prod.which, subj, skel.ftype)
        elif prod.rule == "Lam":
            x = subj.var
            d = apply_lambda(premisses[0], x, premisses[0].conclusion.env.get(x), skel.env, subj)
        elif prod.rule == "App":
            d = apply_app(premisses[0], premisses[1:], skel.env, subj)
        else:
            raise ValueError(prod.rule)
        if d.conclusion.skeleton != skel:
            raise AssertionError(f"rebuilt {d.conclusion} for {skel}")
        return d

    def min_derivation(self, skel: Skeleton) -> Derivation:
        return self._from_records(skel, self.minimum)

    def _from_records(self, skel: Skeleton, records) -> Derivation:
        memo: dict[Skeleton, Derivation] = {}

        def go(s: Skeleton) -> Derivation:
            if s in memo:
                return memo[s]
            _, p = records[s]
            d = self.build(s, p, [go(q) for q in p.premisses])
            memo[s] = d
            return d

        return go(skel)

    def pos_derivation(self, skel: Skeleton) -> Derivation:
        _, p, j = self.positive[skel]
        prem = [self.pos_derivation(q) if i == j else self.min_derivation(q)
                for i, q in enumerate(p.premisses)]
        return self.build(skel, p, prem)

    def max_derivation(self, root: Skeleton) -> Derivation:
        return self._from_records(root, self.maximum(root))

    def witness(self, root: Skeleton) -> Witness | None:
        nodes = self.reachable(root)
        edges = self.positive_edges(nodes)
        if not edges:
            return None
        comp = self.components(nodes)
        # breadth-first tree from the root: skeleton -> (parent, production, index)
        top: dict[Skeleton, tuple[Skeleton, Production, int] | None] = {root: None}
        q = deque([root])
        while q:
            s = q.popleft()
            for p in self.prods[s]:
                for j, c in enumerate(p.premisses):
                    if c not in top:
                        top[c] = (s, p, j)
                        q.append(c)
        depth: dict[Skeleton, int] = {}
        for s in top:
            d, t = 0, s
            while top[t] is not None:
                t = top[t][0]
                d += 1
            depth[s] = d
        best = None
        for s, p, j in edges:
            cyc = self._cycle_back(p.premisses[j], s, comp)
            if cyc is None:
                continue
            key = (len(cyc) + 1, depth[s], s.sort_key(), j)
            if best is None or key < best[0]:
                best = (key, s, p, j, cyc)
        if best is None:
            return None
        _, s, p, j, cyc = best
        # cycle: list of (skeleton, production, index) from s back to s
        steps = [(s, p, j)] + cyc

        def with_min(s0: Skeleton, p0: Production, j0: int, inner: Derivation, positive: bool) -> Derivation:
            prem = []
            need_pos = positive and p0.weight == 0
            for i, q0 in enumerate(p0.premisses):
                if i == j0:
                    prem.append(inner)
                elif need_pos and q0 in self.positive:
                    prem.append(self.pos_derivation(q0))
                    need_pos = False
                else:
                    prem.append(self.min_derivation(q0))
            return self.build(s0, p0, prem)

        d = self.min_derivation(s)
        for idx in reversed(range(len(steps))):
            s0, p0, j0 = steps[idx]
            d = with_min(s0, p0, j0, d, idx == 0)
        section = tuple(j0 for _, _, j0 in steps)
        path: list[int] = []
        t = s
        chain = []
        while top[t] is not None:
            parent, p0, j0 = top[t]
            chain.append((parent, p0, j0))
            t = parent
        for parent, p0, j0 in chain:
            d = with_min(parent, p0, j0, d, False)
            path.insert(0, j0)
        ancestor = tuple(path)
        descendant = ancestor + section
        gain = d.at(ancestor).counter - d.at(descendant).counter
        return Witness(d, ancestor, descendant, gain)

    def _cycle_back(self, start: Skeleton, goal: Skeleton, comp) -> list | None:
        """Shortest production path from ``start`` to ``goal`` inside one component."""
        if start == goal:
            return []
        c = comp[goal]
        prev: dict[Skeleton, tuple[Skeleton, Production, int] | None] = {start: None}
        q = deque([start])
        while q:
            s = q.popleft()
            for p in self.prods[s]:
                for j, n in enumerate(p.premisses):
                    if comp.get(n) != c or n in prev:
                        continue
                    prev[n] = (s, p, j)
                    if n == goal:
                        out = []
                        t = n
                        while prev[t] is not None:
                            out.append(prev[t])
                            t = prev[t][0]
                        return list(reversed(out))
                    q.append(n)
        return None


# ---------------------------------------------------------------------------
# public operations


def _closed_ref(p: Term | SubtermRef) -> SubtermRef:
    if isinstance(p, Term):
        fv = free_vars(p)
        if fv:
            raise ValueError("term has free variables: " + ", ".join(sorted(v.name for v in fv)))
        sort_check(p)
    return ref_of(p)


def _seeds(sort: Sort, t: FullType) -> list[tuple[Sort, FullType]]:
    out = []
    it = t.itype
    while isinstance(sort, Arrow) and isinstance(it, ArrowType):
        out.extend((sort.arg, a) for a in sorted(it.args, key=render))
        sort, it = sort.result, it.result
    return out


def saturate(p: Term | SubtermRef, m: int | None = None, target: FullType | None = None,
             budget: int | None = None, threads: int = 1) -> Saturation:
    ref = _closed_ref(p)
    if m is None:
        m = target.order if target is not None else max(r.order for r in iter_closure(ref))
    seeds = _seeds(ref.sort, target) if target is not None else []
    return Saturation(ref, m, seeds, budget, threads).run()


def size_bound(max_counter: int, m: int) -> int:
    """Tree-size bound implied by a maximal root counter: m-fold 2^(n+1) tower."""
    n = max_counter
    for _ in range(m):
        if n > 16:
            return -1          # too large to be useful; reported as unbounded
        n = 2 ** (n + 1)
    return n


def decide_finiteness(p: Term | SubtermRef, budget: int | None = None,
                      threads: int = 1) -> Verdict:
    ref = _closed_ref(p)
    if ref.sort != O:
        raise ValueError(f"expected a term of sort o, got {ref.sort}")
    m = max(r.order for r in iter_closure(ref))
    sat = Saturation(ref, m, (), budget, threads).run()
    an = Analysis(sat)
    root = Skeleton(EMPTY, ref, rho(m))
    stats = {"complexity": m, "subterms": len(sat.nodes), "skeletons": sat.skeleton_count(),
             "productions": sat.production_count(), "rounds": sat.rounds}
    if not sat.has(root):
        return Verdict("FINITE", m, max_counter=None, size_bound=0, stats=stats)
    w = an.witness(root)
    if w is not None:
        return Verdict("INFINITE", m, witness=w, stats=stats)
    mx = an.maximum(root)[root][0]
    return Verdict("FINITE", m, max_counter=mx, size_bound=size_bound(mx, m), stats=stats)


def pump(w: Witness, times: int = 1) -> Derivation:
    """Repeat the witness section ``times`` more times and recount."""
    d = w.derivation
    inner = d.at(w.descendant)
    section = d.at(w.ancestor)
    rel = w.section
    cur = inner
    for _ in range(times + 1):
        cur = replace_at(section, rel, cur)
    return replace_at(d, w.ancestor, cur)


def find_derivation(p: Term | SubtermRef, target: FullType, min_counter: int = 0,
                    budget: int | None = None, threads: int = 1) -> Derivation:
    """A derivation of ``ε ⊢ p : target`` with counter at least ``min_counter``."""
    ref = _closed_ref(p)
    sat = saturate(ref, target=target, budget=budget, threads=threads)
    root = Skeleton(EMPTY, ref, target)
    if not sat.has(root):
        raise NotFound(f"no derivation of ε ⊢ {ref} : {render(target)}")
    an = Analysis(sat)
    d = an.min_derivation(root)
    if d.counter >= min_counter:
        return d
    w = an.witness(root)
    if w is not None:
        k = 0
        d = w.derivation
        while d.counter < min_counter:
            d = pump(w, k)
            k += 1
        return d
    d = an.max_derivation(root)
    if d.counter >= min_counter:
        return d
    raise NotFound(f"every derivation of ε ⊢ {ref} : {render(target)} has counter ≤ {d.counter}")


# ---------------------------------------------------------------------------
# literal enumeration of bounded derivations, for cross-checks on tiny terms


def search_bounded_derivations(sat: Saturation, root: Skeleton, repeat: int = 3,
                               limit: int = 10_000) -> Iterator[Derivation]:
    """Derivations of ``root`` in which no branch repeats a skeleton more than
    ``repeat`` times and no application has two equal operand premisses.

    Stops after ``limit`` derivations.
    """
    an = Analysis(sat)
    produced = 0

    def gen(s: Skeleton, branch: dict[Skeleton, int]) -> Iterator[Derivation]:
        if branch.get(s, 0) >= repeat:
            return
        inner = dict(branch)
        inner[s] = inner.get(s, 0) + 1
        for p in sorted(an.prods.get(s, ()), key=_prod_key):
            if p.rule == "App" and len(set(p.premisses[1:])) != len(p.premisses) - 1:
                continue
            for prem in _product_gen([lambda q=q: gen(q, inner) for q in p.premisses]):
                yield an.build(s, p, prem)

    for d in gen(root, {}):
        yield d
        produced += 1
        if produced >= limit:
            return


def _product_gen(makers) -> Iterator[list]:
    if not makers:
        yield []
        return
    first, rest = makers[0], makers[1:]
    for d in first():
        for tail in _product_gen(rest):
            yield [d] + tail


def _prod_key(p: Production) -> tuple:
    return (p.rule, p.weight, tuple(q.sort_key() for q in p.premisses), p.which or 0,
            sorted(p.markers), render(p.var_type) if p.var_type else "")


def has_pumpable_branch(d: Derivation) -> bool:
    """Two equal skeletons on one branch with different counters."""
    def walk(node: Derivation, above: dict[Skeleton, set[int]]) -> bool:
        s = node.conclusion.skeleton
        seen = above.get(s, set())
        if any(c != node.counter for c in seen):
            return True
        nxt = dict(above)
        nxt[s] = seen | {node.counter}
        return any(walk(p, nxt) for p in node.premisses)
    return walk(d, {})
