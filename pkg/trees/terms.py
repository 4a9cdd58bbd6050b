# trees/terms.py
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

LABEL_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")


class TermSyntaxError(ValueError):
    """Malformed term text. `offset` is the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


@dataclass
class Term:
    symbol: str
    offset: int
    children: list[Term] = field(default_factory=list)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _skip(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def parse_nested(text: str, pattern: re.Pattern[str] = LABEL_PATTERN) -> Term:
    """
    Parse `t := symbol | symbol '(' t (',' t)* ')'` without recursion.
    Whitespace between tokens is ignored.
    """
    pos = _skip(text, 0)
    if pos == len(text):
        raise TermSyntaxError("empty input", _byte_offset(text, pos))

    root: Term | None = None
    stack: list[Term] = []
    while True:
        m = pattern.match(text, pos)
        if m is None:
            raise TermSyntaxError("expected a label", _byte_offset(text, pos))
        node = Term(m.group(), _byte_offset(text, pos))
        if stack:
            stack[-1].children.append(node)
        else:
            root = node
        pos = _skip(text, m.end())

        if pos < len(text) and text[pos] == "(":
            stack.append(node)
            pos = _skip(text, pos + 1)
            continue

        while True:
            if not stack:
                if pos != len(text):
                    raise TermSyntaxError("unexpected trailing input", _byte_offset(text, pos))
                assert root is not None
                return root
            if pos >= len(text):
                raise TermSyntaxError("unbalanced parenthesis", _byte_offset(text, pos))
            ch = text[pos]
            if ch == ",":
                pos = _skip(text, pos + 1)
                break
            if ch == ")":
                stack.pop()
                pos = _skip(text, pos + 1)
                continue
            raise TermSyntaxError(f"unexpected {ch!r}", _byte_offset(text, pos))


def walk_preorder(root: Term) -> list[Term]:
    out: list[Term] = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(reversed(node.children))
    return out


@dataclass(frozen=True)
class _Lit:
    text: str


_OPEN, _COMMA, _CLOSE = _Lit("("), _Lit(","), _Lit(")")


def render_term(
    root: Hashable,
    symbol: Callable[[Hashable], str],
    children: Callable[[Hashable], Sequence[Hashable]],
) -> str:
    """Render any ordered tree-like structure in term notation, iteratively."""
    out: list[str] = []
    stack: list[object] = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, _Lit):
            out.append(item.text)
            continue
        out.append(symbol(item))
        kids = children(item)
        if not kids:
            continue
        tokens: list[object] = [_OPEN]
        for i, kid in enumerate(kids):
            if i:
                tokens.append(_COMMA)
            tokens.append(kid)
        tokens.append(_CLOSE)
        stack.extend(reversed(tokens))
    return "".join(out)


# Grammar files reference nonterminals, root annotations (`A3:f`) and separators.
RULE_SYMBOL = re.compile(r"[A-Za-z_$][A-Za-z0-9_$:.\-]*")


@dataclass(frozen=True)
class RuleLine:
    lhs: str
    rhs: str
    line: int


def split_rules(text: str) -> list[RuleLine]:
    """Split `LHS -> RHS` lines; blank lines and `#` comments are skipped."""
    out: list[RuleLine] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            out.append(RuleLine("", line, number))
        else:
            out.append(RuleLine(lhs.strip(), rhs.strip(), number))
    return out
