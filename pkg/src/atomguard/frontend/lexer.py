"""Tokenizer for the mini-language.

Produces a flat token list with source positions; the parser consumes it
with one token of lookahead.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SourceSyntaxError

KEYWORDS = frozenset(
    {
        "class",
        "contract",
        "if",
        "else",
        "while",
        "return",
        "var",
        "new",
        "atomic",
        "thread",
        "cond",
    }
)

# Longer operators first so the scanner matches greedily.
PUNCT = (
    "++",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "{",
    "}",
    "(",
    ")",
    ";",
    ",",
    ".",
    "=",
    "|",
    "?",
    ":",
    "+",
    "-",
    "*",
    "<",
    ">",
    "!",
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "ident" | "int" | "string" | "kw" | "punct" | "eof"
    text: str
    line: int
    column: int


def tokenize(source: str, filename: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] != '"':
                raise SourceSyntaxError("unterminated string", filename, line, col)
            tokens.append(Token("string", source[i + 1 : j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        for op in PUNCT:
            if source.startswith(op, i):
                tokens.append(Token("punct", op, line, col))
                col += len(op)
                i += len(op)
                break
        else:
            raise SourceSyntaxError(f"unexpected character {ch!r}", filename, line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens
