"""Derivations and verdicts as JSON, Graphviz DOT, or indented text."""

from __future__ import annotations

import json
from typing import Any

from .engine import Verdict
from .itypes import FullType, TypeEnv, parse_full_type, parse_itype, render, render_env, render_itype
from .rules import Derivation, Judgment
from .sorts import parse_sort
from .terms import Var
from .unfold import SubtermRef, graph_table, refs_from_table


def _env_json(env: TypeEnv) -> list[dict]:
    return [{"var": v.name, "sort": str(v.sort), "types": sorted(render(t) for t in ts)}
            for v, ts in env.items]


def _env_from(items: list[dict]) -> TypeEnv:
    return TypeEnv({Var(e["var"], parse_sort(e["sort"])): {parse_full_type(t) for t in e["types"]}
                    for e in items})


def _node_json(d: Derivation) -> dict[str, Any]:
    c = d.conclusion
    out: dict[str, Any] = {
        "rule": d.rule,
        "env": _env_json(c.env),
        "subject": c.subject.uid,
        "term": str(c.subject),
        "order": c.ftype.order,
        "flags": sorted(c.ftype.flags),
        "markers": sorted(c.ftype.markers),
        "itype": render_itype(c.ftype.itype),
        "counter": c.counter,
        "placed_flags": [list(p) for p in d.placed_flags],
        "placed_markers": sorted(d.placed_markers),
        "premisses": [_node_json(p) for p in d.premisses],
    }
    if d.var_type is not None:
        out["var_type"] = render(d.var_type)
    if d.which is not None:
        out["which"] = d.which
    return out


def _subjects(d: Derivation) -> list[SubtermRef]:
    return [n.conclusion.subject for _, n in d.nodes()]


def derivation_to_dict(d: Derivation) -> dict[str, Any]:
    return {"graph": graph_table(_subjects(d)), "derivation": _node_json(d)}


def _node_from(e: dict, refs: dict[str, SubtermRef]) -> Derivation:
    ft = FullType(e["order"], frozenset(e["flags"]), frozenset(e["markers"]), parse_itype(e["itype"]))
    j = Judgment(_env_from(e["env"]), refs[e["subject"]], ft, e["counter"])
    return Derivation(
        j, e["rule"], tuple(_node_from(p, refs) for p in e["premisses"]),
        tuple(tuple(p) for p in e["placed_flags"]), frozenset(e["placed_markers"]),
        parse_full_type(e["var_type"]) if "var_type" in e else None,
        e.get("which"))


def derivation_from_dict(data: dict) -> Derivation:
    refs = refs_from_table(data["graph"])
    return _node_from(data["derivation"], refs)


def to_json(d: Derivation, indent: int | None = 2) -> str:
    return json.dumps(derivation_to_dict(d), indent=indent, ensure_ascii=False, sort_keys=True)


def from_json(text: str) -> Derivation:
    return derivation_from_dict(json.loads(text))


def to_text(d: Derivation) -> str:
    lines = []
    for path, node in d.nodes():
        c = node.conclusion
        notes = []
        if node.placed_flags:
            notes.append("flags " + ",".join(f"{n}×{k}" for n, k in node.placed_flags))
        if node.placed_markers:
            notes.append("markers " + ",".join(map(str, sorted(node.placed_markers))))
        extra = f"  [{'; '.join(notes)}]" if notes else ""
        lines.append(f"{'  ' * len(path)}{render_env(c.env)} ⊢ {c.subject} : "
                     f"{render(c.ftype)} ▷ {c.counter}  ({d_rule(node)}){extra}")
    return "\n".join(lines)


def d_rule(node: Derivation) -> str:
    if node.rule == "Br":
        return f"Br{node.which}"
    return node.rule


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(d: Derivation, name: str = "derivation") -> str:
    m = d.conclusion.ftype.order
    out = [f'digraph "{_dot_escape(name)}" {{', "  node [shape=box, fontname=monospace];",
           "  edge [dir=back];"]
    ids: dict[tuple[int, ...], str] = {}
    for path, node in d.nodes():
        nid = "n" + "_".join(map(str, path)) if path else "root"
        ids[path] = nid
        c = node.conclusion
        label = f"{render_env(c.env)} ⊢ {c.subject}\n: {render(c.ftype)} ▷ {c.counter}  ({d_rule(node)})"
        marks = []
        if node.placed_flags:
            marks.append("flags " + ",".join(f"{n}×{k}" for n, k in node.placed_flags))
        if node.placed_markers:
            marks.append("markers " + ",".join(map(str, sorted(node.placed_markers))))
        if marks:
            label += "\n" + "; ".join(marks)
        style = ""
        if any(n == m for n, _ in node.placed_flags):
            style = ', style=filled, fillcolor="#f4b6b6"'
        elif node.placed_markers:
            style = ', style=filled, fillcolor="#b6d7f4"'
        elif node.placed_flags:
            style = ', style=filled, fillcolor="#f4e8b6"'
        out.append(f'  {nid} [label="{_dot_escape(label).replace(chr(10), chr(92) + "n")}"{style}];')
        if path:
            out.append(f"  {ids[path[:-1]]} -> {nid};")
    out.append("}")
    return "\n".join(out)


def export_derivation(d: Derivation, format: str = "json") -> str:
    if format == "json":
        return to_json(d)
    if format == "dot":
        return to_dot(d)
    if format == "text":
        return to_text(d)
    raise ValueError(f"unknown format {format!r}")


def verdict_to_dict(v: Verdict, with_derivation: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {"verdict": v.kind, "complexity": v.m, "stats": dict(v.stats)}
    if v.witness is not None:
        w = v.witness
        out["witness"] = {
            "ancestor": list(w.ancestor),
            "descendant": list(w.descendant),
            "gain": w.gain,
            "root_counter": w.derivation.counter,
            "skeleton": str(w.derivation.at(w.ancestor).conclusion.skeleton),
        }
        if with_derivation:
            out["witness"]["derivation"] = derivation_to_dict(w.derivation)
    else:
        out["max_counter"] = v.max_counter
        out["size_bound"] = v.size_bound
    return out
