from __future__ import annotations

import re
from dataclasses import dataclass

from mutagoal.errors import MiniLangSyntaxError

KEYWORDS = frozenset({
    "class", "field", "method", "returns", "suite", "test",
    "if", "else", "while", "return", "new", "self",
    "true", "false", "and", "or", "not",
})

# longest symbols first so ":=" wins over ":" style prefixes
SYMBOLS = (":=", "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%",
           "(", ")", "{", "}", ",", ".")

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<nl>\n)"
    r"|(?P<int>[0-9]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "ident" | "kw" | "sym" | "nl" | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str, path: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise MiniLangSyntaxError(path, line, col, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            tokens.append(Token("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "int":
            tokens.append(Token("int", lexeme, line, col))
        elif kind == "ident":
            tokens.append(Token("kw" if lexeme in KEYWORDS else "ident", lexeme, line, col))
        elif kind == "sym":
            tokens.append(Token("sym", lexeme, line, col))
        pos = m.end()
    tokens.append(Token("nl", "\n", line, pos - line_start + 1))
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens
