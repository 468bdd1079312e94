"""Minimal s-expression reader that keeps source positions."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import SourceError

TOKEN = re.compile(r"\s+|#[^\n]*|\(|\)|[^\s()#]+")
INT = re.compile(r"[+-]?[0-9]+\Z")


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    column: int

    @property
    def is_int(self) -> bool:
        return bool(INT.match(self.text))


@dataclass(frozen=True)
class SList:
    items: tuple["Node", ...]
    line: int
    column: int


Node = Union[Atom, SList]


def read_all(text: str) -> list[Node]:
    """Parse every top-level expression; columns and lines are 1-based."""
    stack: list[tuple[list, int, int]] = []
    top: list[Node] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the pattern matches any character
            raise SourceError(line, col, "unreadable input")
        tok = m.group()
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise SourceError(line, col, "unbalanced ')'")
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
        elif not tok[0].isspace() and tok[0] != "#":
            node = Atom(tok, line, col)
            (stack[-1][0] if stack else top).append(node)
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if stack:
        _, l0, c0 = stack[-1]
        raise SourceError(l0, c0, "unclosed '('")
    return top
