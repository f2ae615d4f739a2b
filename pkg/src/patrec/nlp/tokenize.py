"""Character and word tokenizers shared by the text tools."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class Mode(str, Enum):
    RESTRICTED = "restricted"
    UNRESTRICTED = "unrestricted"


@dataclass(frozen=True)
class TokenizerOptions:
    case_sensitive: bool = False
    parse_numbers: bool = False
    quotes_as_token: bool = False
    eos_significant: bool = False
    mode: Mode = Mode.RESTRICTED

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))

    def suffix(self) -> str:
        """Flags as they appear on the command line, concatenated."""
        flags = []
        if self.case_sensitive:
            flags.append("--case")
        if self.parse_numbers:
            flags.append("--num")
        if self.quotes_as_token:
            flags.append("--quote")
        if self.eos_significant:
            flags.append("--eos")
        return "".join(flags)


def tokenize_chars(text: str, opts: TokenizerOptions | None = None) -> list[str]:
    """Restricted: folded ASCII letters and digits.  Unrestricted: every non-blank character."""
    opts = opts or TokenizerOptions()
    if opts.mode is Mode.RESTRICTED:
        return [c.lower() for c in text if c.isascii() and c.isalnum()]
    return [c for c in text if not c.isspace()]


_NUMBER = r"\d+(?:\.\d+)?"
_EOS = r"[.!?]"
_QUOTED = r'"[^"]*"'


def _word_pattern(opts: TokenizerOptions) -> re.Pattern:
    alts = []
    if opts.quotes_as_token:
        alts.append(f"(?P<quote>{_QUOTED})")
    if opts.parse_numbers:
        alts.append(f"(?P<num>{_NUMBER})")
    alts.append(r"(?P<word>[^\W\d_]+)")
    if opts.eos_significant:
        alts.append(f"(?P<eos>{_EOS})")
    return re.compile("|".join(alts))


def tokenize_words(text: str, opts: TokenizerOptions | None = None) -> list[str]:
    """Maximal letter runs, folded to lower case unless case-sensitive.

    Options add numbers, whole quoted strings and sentence-final marks as
    tokens of their own; everything else separates tokens.
    """
    opts = opts or TokenizerOptions()
    out = []
    for m in _word_pattern(opts).finditer(text):
        tok = m.group()
        if m.lastgroup in ("word", "quote") and not opts.case_sensitive:
            tok = tok.lower()
        out.append(tok)
    return out
