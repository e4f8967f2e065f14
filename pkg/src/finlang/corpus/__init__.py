"""Bundled schemes with hand-checked finiteness status."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..syntax import Scheme, parse_scheme, scheme_to_term
from ..terms import Term


@dataclass(frozen=True)
class Entry:
    name: str
    file: str
    expected: str
    growth: tuple[int, ...]

    @property
    def text(self) -> str:
        return resources.files(__package__).joinpath(self.file).read_text(encoding="utf-8")

    @property
    def scheme(self) -> Scheme:
        return parse_scheme(self.text)

    @property
    def term(self) -> Term:
        return scheme_to_term(self.scheme)


def entries() -> list[Entry]:
    raw = json.loads(resources.files(__package__).joinpath("manifest.json").read_text(encoding="utf-8"))
    return [Entry(e["name"], e["file"], e["expected"], tuple(e["growth"])) for e in raw["schemes"]]


def entry(name: str) -> Entry:
    for e in entries():
        if e.name == name:
            return e
    raise KeyError(name)


REFERENCE_TERMS = ("p1", "p2", "p3", "p4")
