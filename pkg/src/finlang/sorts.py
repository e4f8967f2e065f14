"""Simple types over the single base sort ``o``."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass


class Sort:
    __slots__ = ()

    def __rshift__(self, other: Sort) -> Arrow:
        # o >> o  reads as  o -> o
        return Arrow(self, other)


@dataclass(frozen=True)
class Base(Sort):
    def __str__(self) -> str:
        return "o"


@dataclass(frozen=True)
class Arrow(Sort):
    arg: Sort
    result: Sort

    def __str__(self) -> str:
        left = str(self.arg)
        if isinstance(self.arg, Arrow):
            left = f"({left})"
        return f"{left}->{self.result}"


O = Base()


@functools.lru_cache(maxsize=None)
def order(s: Sort) -> int:
    """ord(o) = 0 and ord(a->b) = max(1 + ord(a), ord(b))."""
    if isinstance(s, Arrow):
        return max(1 + order(s.arg), order(s.result))
    return 0


def arity(s: Sort) -> int:
    n = 0
    while isinstance(s, Arrow):
        n += 1
        s = s.result
    return n


def arrows(args: list[Sort] | tuple[Sort, ...], result: Sort = O) -> Sort:
    for a in reversed(args):
        result = Arrow(a, result)
    return result


_TOKEN = re.compile(r"\s*(->|\(|\)|o)")


def parse_sort(text: str) -> Sort:
    """Parse ``o``, ``o -> o``, ``(o -> o) -> o``; arrows associate to the right."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad sort {text!r} at column {pos + 1}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse_arrow(i: int) -> tuple[Sort, int]:
        left, i = parse_atom(i)
        if i < len(tokens) and tokens[i] == "->":
            right, i = parse_arrow(i + 1)
            return Arrow(left, right), i
        return left, i

    def parse_atom(i: int) -> tuple[Sort, int]:
        if i >= len(tokens):
            raise ValueError(f"unexpected end of sort {text!r}")
        if tokens[i] == "o":
            return O, i + 1
        if tokens[i] == "(":
            s, i = parse_arrow(i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise ValueError(f"unbalanced parentheses in sort {text!r}")
            return s, i + 1
        raise ValueError(f"unexpected {tokens[i]!r} in sort {text!r}")

    s, i = parse_arrow(0)
    if i != len(tokens):
        raise ValueError(f"trailing input in sort {text!r}")
    return s
