"""Finite graph representation of the infinitary unfolding of a lambda-Y term.

Every node of the graph is a subterm of the unfolding.  Graphs are minimized
by bisimulation and each node is interned as a :class:`SubtermRef`, so two
refs are the same object exactly when their unfoldings are the same tree.

``Y (λr.B)`` is unfolded as the regular tree ``μr.B`` (a back edge from each
``r`` to ``B``); any other use of ``Y`` becomes ``Z = λz.z (Z z)``.
"""

from __future__ import annotations

import hashlib
import threading
from collections import deque
from typing import Iterable, Iterator

from .sorts import O, Arrow, Sort, order
from .terms import App, Const, Lam, Term, Var, Y, sort_check, uniquify

# node labels: ("con", symbol, rank) ("var", name, sort) ("lam", name, varsort, sort) ("app", sort)


class SubtermRef:
    """Interned node of an unfolding graph; compare with ``is`` or ``==``."""

    __slots__ = ("label", "children", "sort", "order", "uid", "hint", "_fv", "__weakref__")

    def __init__(self, label: tuple, sort: Sort, uid: str, hint: str | None):
        self.label = label
        self.children: tuple[SubtermRef, ...] = ()
        self.sort = sort
        self.order = order(sort)
        self.uid = uid
        self.hint = hint
        self._fv: frozenset[Var] | None = None

    @property
    def kind(self) -> str:
        return self.label[0]

    @property
    def symbol(self) -> str:
        return self.label[1]

    @property
    def rank(self) -> int:
        return self.label[2]

    @property
    def var(self) -> Var:
        """The variable of a var node, or the binder of a lambda node."""
        if self.kind == "var":
            return Var(self.label[1], self.label[2])
        if self.kind == "lam":
            return Var(self.label[1], self.label[2])
        raise AttributeError(f"{self.kind} node has no variable")

    @property
    def free_vars(self) -> frozenset[Var]:
        if self._fv is None:
            _compute_free_vars(self)
        return self._fv

    def __hash__(self) -> int:
        return hash(self.uid)

    def __eq__(self, other) -> bool:
        return self is other

    def __lt__(self, other: SubtermRef) -> bool:
        return self.uid < other.uid

    def __repr__(self) -> str:
        return f"SubtermRef({show_ref(self)})"

    def __str__(self) -> str:
        return show_ref(self)


_INTERN: dict[tuple, SubtermRef] = {}
_LOCK = threading.Lock()


class _Graph:
    def __init__(self):
        self.labels: list[tuple | None] = []
        self.kids: list[tuple[int, ...]] = []
        self.sorts: list[Sort | None] = []
        self.hints: list[str | None] = []

    def alloc(self) -> int:
        self.labels.append(None)
        self.kids.append(())
        self.sorts.append(None)
        self.hints.append(None)
        return len(self.labels) - 1

    def fill(self, i: int, label: tuple, kids: tuple[int, ...], sort: Sort, hint=None):
        self.labels[i] = label
        self.kids[i] = kids
        self.sorts[i] = sort
        if hint and not self.hints[i]:
            self.hints[i] = hint


def _z_into(g: _Graph, s: Sort, target: int) -> int:
    # Z = λz.z (Z z) at element sort s
    fs = Arrow(s, s)
    z = g.alloc()
    body = g.alloc()
    inner = g.alloc()
    g.fill(z, ("var", "z", fs), (), fs)
    g.fill(inner, ("app", s), (target, z), s)
    g.fill(body, ("app", s), (z, inner), s)
    g.fill(target, ("lam", "z", fs, Arrow(fs, s)), (body,), Arrow(fs, s), "Z")
    return target


def _degenerate(body: Term, names: frozenset[str]) -> bool:
    # μr.r and μr.μs.r have no node of their own
    if isinstance(body, Var):
        return body.name in names
    if isinstance(body, App) and isinstance(body.fun, Y) and isinstance(body.arg, Lam):
        return _degenerate(body.arg.body, names | {body.arg.var.name})
    return False


def _suitable(r: Var, body: Term) -> bool:
    return not isinstance(body, Y) and not _degenerate(body, frozenset((r.name,)))


def _build(g: _Graph, t: Term, mu: dict[str, int], target: int | None = None) -> int:
    if isinstance(t, Var) and t.name in mu:
        return mu[t.name]
    if isinstance(t, App) and isinstance(t.fun, Y) and isinstance(t.arg, Lam) \
            and _suitable(t.arg.var, t.arg.body):
        r = t.arg.var
        node = g.alloc() if target is None else target
        inner = dict(mu)
        inner[r.name] = node
        g.sorts[node] = r.sort
        got = _build(g, t.arg.body, inner, node)
        g.hints[got] = g.hints[got] or r.name
        return got
    node = g.alloc() if target is None else target
    if isinstance(t, Var):
        g.fill(node, ("var", t.name, t.sort), (), t.sort)
    elif isinstance(t, Const):
        kids = tuple(_build(g, a, mu) for a in t.args)
        g.fill(node, ("con", t.symbol, t.rank), kids, O)
    elif isinstance(t, Lam):
        # a binder hides any fixpoint variable of the same name
        inner = {k: v for k, v in mu.items() if k != t.var.name}
        b = _build(g, t.body, inner)
        s = Arrow(t.var.sort, g.sorts[b])
        g.fill(node, ("lam", t.var.name, t.var.sort, s), (b,), s)
    elif isinstance(t, Y):
        _z_into(g, t.sort, node)
    elif isinstance(t, App):
        f = _build(g, t.fun, mu)
        a = _build(g, t.arg, mu)
        fs = g.sorts[f]
        g.fill(node, ("app", fs.result), (f, a), fs.result)
    else:
        raise TypeError(t)
    return node


def _minimize(g: _Graph, roots: Iterable[int]) -> tuple[list[int], dict[int, int]]:
    """Partition refinement; returns the reachable nodes and their class ids."""
    seen: dict[int, None] = {}
    stack = list(roots)
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen[i] = None
        stack.extend(g.kids[i])
    nodes = sorted(seen)
    ids: dict[tuple, int] = {}
    cls = {i: ids.setdefault(g.labels[i], len(ids)) for i in nodes}
    while True:
        ids = {}
        new = {i: ids.setdefault((cls[i], tuple(cls[k] for k in g.kids[i])), len(ids))
               for i in nodes}
        if len(ids) == len(set(cls.values())):
            return nodes, new
        cls = new


def _label_key(label: tuple) -> tuple:
    return tuple(str(x) for x in label)


def _intern_graph(g: _Graph, roots: list[int]) -> list[SubtermRef]:
    nodes, cls = _minimize(g, roots)
    rep: dict[int, int] = {}
    hint: dict[int, str] = {}
    for i in nodes:
        rep.setdefault(cls[i], i)
        if g.hints[i] and cls[i] not in hint:
            hint[cls[i]] = g.hints[i]
    kids = {c: tuple(cls[k] for k in g.kids[i]) for c, i in rep.items()}

    def key_of(c: int) -> tuple:
        number = {c: 0}
        order_ = [c]
        q = deque([c])
        while q:
            d = q.popleft()
            for k in kids[d]:
                if k not in number:
                    number[k] = len(order_)
                    order_.append(k)
                    q.append(k)
        return tuple((_label_key(g.labels[rep[d]]), tuple(number[k] for k in kids[d]))
                     for d in order_)

    refs: dict[int, SubtermRef] = {}
    fresh: list[int] = []
    with _LOCK:
        for c in sorted(rep):
            key = key_of(c)
            ref = _INTERN.get(key)
            if ref is None:
                uid = hashlib.sha1(repr(key).encode()).hexdigest()[:12]
                i = rep[c]
                ref = SubtermRef(g.labels[i], g.sorts[i], uid, hint.get(c))
                _INTERN[key] = ref
                fresh.append(c)
            refs[c] = ref
        for c in fresh:
            refs[c].children = tuple(refs[k] for k in kids[c])
    return [refs[cls[r]] for r in roots]


def unfold(t: Term) -> SubtermRef:
    """Intern the unfolding of a closed or open term; returns its root ref."""
    t = uniquify(t)
    g = _Graph()
    root = _build(g, t, {})
    return _intern_graph(g, [root])[0]


def ref_of(t: Term | SubtermRef) -> SubtermRef:
    return t if isinstance(t, SubtermRef) else unfold(t)


def iter_closure(root: SubtermRef) -> Iterator[SubtermRef]:
    """Breadth-first walk over every distinct subterm reachable from ``root``."""
    seen = {root}
    q = deque([root])
    while q:
        r = q.popleft()
        yield r
        for k in r.children:
            if k not in seen:
                seen.add(k)
                q.append(k)


def subterm_closure(t: Term | SubtermRef) -> list[SubtermRef]:
    return list(iter_closure(ref_of(t)))


def complexity(t: Term | SubtermRef) -> int:
    """Largest order of a subterm of the unfolding."""
    if isinstance(t, Term):
        sort_check(t, {v.name: v.sort for v in _free(t)})
    return max(r.order for r in iter_closure(ref_of(t)))


def _free(t: Term):
    from .terms import free_vars
    return free_vars(t)


def _compute_free_vars(root: SubtermRef) -> None:
    nodes = [r for r in iter_closure(root) if r._fv is None]
    fv: dict[SubtermRef, frozenset[Var]] = {r: r._fv or frozenset() for r in iter_closure(root)}
    changed = True
    while changed:
        changed = False
        for r in nodes:
            if r.kind == "var":
                new = frozenset((r.var,))
            elif r.kind == "lam":
                new = frozenset(v for v in fv[r.children[0]] if v.name != r.label[1])
            else:
                new = frozenset().union(*(fv[k] for k in r.children))
            if new != fv[r]:
                fv[r] = new
                changed = True
    for r in nodes:
        r._fv = fv[r]


def make_ref(label: tuple, children: tuple[SubtermRef, ...], sort: Sort) -> SubtermRef:
    """Intern a node whose children are existing refs."""
    g = _Graph()
    index: dict[SubtermRef, int] = {}
    for r in children:
        for n in iter_closure(r):
            if n not in index:
                index[n] = g.alloc()
    for n, i in index.items():
        g.fill(i, n.label, tuple(index[k] for k in n.children), n.sort, n.hint)
    top = g.alloc()
    g.fill(top, label, tuple(index[k] for k in children), sort)
    return _intern_graph(g, [top])[0]


def make_app(f: SubtermRef, a: SubtermRef) -> SubtermRef:
    if not isinstance(f.sort, Arrow) or f.sort.arg != a.sort:
        raise ValueError(f"cannot apply {f} to {a}")
    return make_ref(("app", f.sort.result), (f, a), f.sort.result)


def make_lam(x: Var, body: SubtermRef) -> SubtermRef:
    s = Arrow(x.sort, body.sort)
    return make_ref(("lam", x.name, x.sort, s), (body,), s)


def make_var(x: Var) -> SubtermRef:
    return make_ref(("var", x.name, x.sort), (), x.sort)


def make_con(symbol: str, args: tuple[SubtermRef, ...]) -> SubtermRef:
    return make_ref(("con", symbol, len(args)), tuple(args), O)


# ---------------------------------------------------------------------------
# printing and serialization


def show_ref(r: SubtermRef, lam: str = "λ") -> str:
    """Render a ref; named fixpoint nodes below the top are printed by name."""
    return _show(r, lam, True, set())


def _show(r: SubtermRef, lam: str, top: bool, path: set) -> str:
    if not top and r.hint:
        return r.hint
    if r in path:
        return f"#{r.uid[:6]}"
    path = path | {r}
    k = r.kind
    if k == "var":
        return r.label[1]
    if k == "con":
        if not r.children:
            return r.symbol
        return " ".join([r.symbol] + [_atom(c, lam, path) for c in r.children])
    if k == "lam":
        return f"{lam}{r.label[1]}.{_show(r.children[0], lam, False, path)}"
    f, a = r.children
    head = _show(f, lam, False, path)
    if f.kind == "lam" and not f.hint:
        head = f"({head})"
    return f"{head} {_atom(a, lam, path)}"


def _atom(r: SubtermRef, lam: str, path: set) -> str:
    s = _show(r, lam, False, path)
    if r.hint or r.kind == "var" or (r.kind == "con" and not r.children):
        return s
    return f"({s})"


def graph_table(roots: Iterable[SubtermRef]) -> dict[str, dict]:
    """JSON-ready table of every node reachable from ``roots``, keyed by uid."""
    table: dict[str, dict] = {}
    for root in roots:
        for r in iter_closure(root):
            if r.uid in table:
                continue
            entry: dict = {"kind": r.kind, "children": [c.uid for c in r.children]}
            if r.kind == "con":
                entry.update(symbol=r.symbol, rank=r.rank)
            elif r.kind == "var":
                entry.update(name=r.label[1], sort=str(r.label[2]))
            elif r.kind == "lam":
                entry.update(name=r.label[1], sort=str(r.label[2]), type=str(r.sort))
            else:
                entry.update(type=str(r.sort))
            if r.hint:
                entry["hint"] = r.hint
            table[r.uid] = entry
    return dict(sorted(table.items()))


def refs_from_table(table: dict[str, dict]) -> dict[str, SubtermRef]:
    """Inverse of :func:`graph_table`; re-interns every node."""
    from .sorts import parse_sort

    g = _Graph()
    index = {uid: g.alloc() for uid in table}
    for uid, e in table.items():
        kind = e["kind"]
        if kind == "con":
            label, sort = ("con", e["symbol"], e["rank"]), O
        elif kind == "var":
            s = parse_sort(e["sort"])
            label, sort = ("var", e["name"], s), s
        elif kind == "lam":
            s = parse_sort(e["type"])
            label, sort = ("lam", e["name"], parse_sort(e["sort"]), s), s
        elif kind == "app":
            sort = parse_sort(e["type"])
            label = ("app", sort)
        else:
            raise ValueError(f"unknown node kind {kind!r}")
        g.fill(index[uid], label, tuple(index[c] for c in e["children"]), sort, e.get("hint"))
    uids = list(table)
    refs = _intern_graph(g, [index[u] for u in uids])
    return dict(zip(uids, refs))
