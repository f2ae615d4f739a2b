"""Probabilistic CNF grammars and the CYK chart parser.

Grammar source format, one rule per line (or ended early by ``%``)::

    <LHS> ::= PROBABILITY <B> <C>
    <LHS> ::= PROBABILITY terminal

``#`` at the start of a line, ``//`` and ``/* ... */`` introduce comments.
The first nonterminal in the file is the start symbol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .. import container
from .tokenize import TokenizerOptions

GRAMMAR_KIND = "grammar"
SUM_TOLERANCE = 1e-6


class GrammarError(ValueError):
    pass


@dataclass
class Grammar:
    nonterminals: list = field(default_factory=list)
    terminals: list = field(default_factory=list)
    # (A, B, C) indices -> probability
    binary: dict = field(default_factory=dict)
    # (A, terminal) -> probability
    lexical: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def start(self) -> int:
        return 0

    def rule_count(self) -> int:
        return len(self.binary) + len(self.lexical)

    def to_payload(self) -> dict:
        return {
            "nonterminals": list(self.nonterminals),
            "terminals": list(self.terminals),
            "binary": [[a, b, c, p] for (a, b, c), p in self.binary.items()],
            "lexical": [[a, t, p] for (a, t), p in self.lexical.items()],
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Grammar":
        g = cls(list(p["nonterminals"]), list(p["terminals"]))
        g.binary = {(int(a), int(b), int(c)): float(pr) for a, b, c, pr in p["binary"]}
        g.lexical = {(int(a), t): float(pr) for a, t, pr in p["lexical"]}
        return g


_TOKEN_RE = re.compile(
    r"(?P<nl>\n)|(?P<ws>[ \t\r\f\v]+)|(?P<nt><[^<>\s]+>)|(?P<op>::=)|(?P<end>%)"
    r"|(?P<sym>[^\s<>%]+)")


def strip_comments(source: str) -> str:
    """Blank out comments, keeping newlines so line numbers survive."""
    out = []
    i = 0
    n = len(source)
    line_start = True
    while i < n:
        c = source[i]
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise GrammarError("unterminated /* comment")
            out.append("\n" * source.count("\n", i, j + 2))
            i = j + 2
            continue
        if source.startswith("//", i) or (c == "#" and line_start):
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        out.append(c)
        if c == "\n":
            line_start = True
        elif not c.isspace():
            line_start = False
        i += 1
    return "".join(out)


def _parse_probability(text: str, line: int) -> float:
    try:
        p = float(text)
    except ValueError:
        raise GrammarError(f"line {line}: expected a probability, got {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise GrammarError(f"line {line}: probability {p} outside [0, 1]")
    return p


def compile_grammar(source: str) -> Grammar:
    g = Grammar()
    nt_index: dict = {}
    t_seen: dict = {}

    def nt(name):
        if name not in nt_index:
            nt_index[name] = len(g.nonterminals)
            g.nonterminals.append(name)
        return nt_index[name]

    def finish(rule, line):
        if not rule:
            return
        kinds = [k for k, _ in rule]
        if kinds[:3] != ["nt", "op", "sym"]:
            raise GrammarError(f"line {line}: expected '<LHS> ::= PROBABILITY RHS'")
        lhs_name, p_text, rhs = rule[0][1], rule[2][1], rule[3:]
        p = _parse_probability(p_text, line)
        rhs_kinds = [k for k, _ in rhs]
        lhs = nt(lhs_name)
        if rhs_kinds == ["nt", "nt"]:
            key = (lhs, nt(rhs[0][1]), nt(rhs[1][1]))
            table = g.binary
            shown = f"{lhs_name} -> {rhs[0][1]} {rhs[1][1]}"
        elif rhs_kinds == ["sym"]:
            word = rhs[0][1]
            t_seen.setdefault(word, None)
            key = (lhs, word)
            table = g.lexical
            shown = f"{lhs_name} -> {word}"
        else:
            raise GrammarError(
                f"line {line}: right-hand side must be two nonterminals or one terminal")
        if key in table:
            g.warnings.append(f"line {line}: duplicate rule {shown} ignored")
            return
        table[key] = p

    rule: list = []
    line = 1
    rule_line = 1
    for m in _TOKEN_RE.finditer(strip_comments(source)):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "nl":
            rhs = [k for k, _ in rule[3:]]
            # a rule ends at the newline once its right-hand side is complete
            if rule and (rhs == ["sym"] or len(rhs) >= 2 or (rhs and rhs[0] != "nt")):
                finish(rule, rule_line)
                rule = []
            line += 1
            continue
        if kind == "end":
            finish(rule, rule_line)
            rule = []
            continue
        if not rule:
            rule_line = line
        rule.append((kind, m.group()))
    finish(rule, rule_line)

    g.terminals = list(t_seen)
    if not g.rule_count():
        raise GrammarError("grammar has no rules")
    g.warnings.extend(validate_grammar(g))
    return g


def validate_grammar(g: Grammar) -> list[str]:
    """Warnings for left-hand sides whose rule probabilities do not sum to 1."""
    sums = [0.0] * len(g.nonterminals)
    has_rules = [False] * len(g.nonterminals)
    for (a, _, _), p in g.binary.items():
        sums[a] += p
        has_rules[a] = True
    for (a, _), p in g.lexical.items():
        sums[a] += p
        has_rules[a] = True
    out = []
    for i, name in enumerate(g.nonterminals):
        if not has_rules[i]:
            out.append(f"nonterminal {name} has no rules")
        elif abs(sums[i] - 1.0) > SUM_TOLERANCE:
            out.append(f"probabilities of {name} rules sum to {sums[i]!r}, not 1")
    return out


def dump_grammar(g: Grammar, path) -> None:
    container.dump(path, GRAMMAR_KIND, g.to_payload())


def load_grammar(path) -> Grammar:
    return Grammar.from_payload(container.load(path, GRAMMAR_KIND))


# -- number formatting -------------------------------------------------------

def java_double(x: float) -> str:
    """Format like ``Double.toString``: plain decimals in [1e-3, 1e7), else ``d.dddE-n``."""
    x = float(x)
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return "Infinity" if x > 0 else "-Infinity"
    if x == 0:
        return "-0.0" if str(x).startswith("-") else "0.0"
    sign = "-" if x < 0 else ""
    digits, exp = _shortest_digits(abs(x))
    # value = 0.d1d2d3... * 10**exp
    if 1e-3 <= abs(x) < 1e7:
        if exp <= 0:
            body = "0." + "0" * (-exp) + digits
        elif exp >= len(digits):
            body = digits + "0" * (exp - len(digits)) + ".0"
        else:
            body = digits[:exp] + "." + digits[exp:]
        return sign + body
    mantissa = digits[0] + "." + (digits[1:] or "0")
    return f"{sign}{mantissa}E{exp - 1}"


def _shortest_digits(x: float) -> tuple[str, int]:
    mant, _, e = f"{x!r}".partition("e")
    e = int(e) if e else 0
    whole, _, frac = mant.partition(".")
    if frac == "0":
        frac = ""
    raw = whole + frac
    exp = len(whole) + e
    stripped = raw.lstrip("0")
    exp -= len(raw) - len(stripped)
    return stripped.rstrip("0") or "0", exp


# -- sentence tokenizer ----------------------------------------------------

_NUMBER_RE = re.compile(r"-?\d*\.?\d*")


def _token_repr(text: str) -> str:
    return f"Token[{text}], line 1"


def tokenize_sentence(text: str, opts: TokenizerOptions | None = None) -> tuple[list, list]:
    """Split a sentence into word tokens, collecting warnings for everything else.

    Words start with a letter and continue with letters, digits, ``.`` or
    ``-``.  Numbers, quoted strings and sentence-final marks are tokens only
    when the matching option is set; otherwise they are reported.  ``/``
    starts a comment that runs to the end of the line.
    """
    opts = opts or TokenizerOptions()
    words: list = []
    warnings: list = []
    i = 0
    n = len(text)
    word_tail = "-" if opts.eos_significant else ".-"
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in word_tail):
                j += 1
            words.append(text[i:j])
            i = j
        elif c.isdigit() or (c in ".-" and i + 1 < n and (text[i + 1].isdigit()
                                                          or (c == "-" and text[i + 1] == "."))):
            m = _NUMBER_RE.match(text, i)
            j = m.end()
            literal = text[i:j]
            try:
                value = float(literal)
            except ValueError:
                value = 0.0
            if opts.parse_numbers:
                words.append(literal)
            else:
                warnings.append("WARNING: Non-word token encountered: "
                                + _token_repr(f"n={java_double(value)}"))
            i = j
        elif c in "\"'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 1
            body = text[i + 1:j]
            if opts.quotes_as_token:
                words.append(body)
            else:
                warnings.append("WARNING: Non-word token encountered: " + _token_repr(body))
            i = j + 1
        elif c == "/":
            j = text.find("\n", i)
            i = n if j < 0 else j
        elif opts.eos_significant and c in ".!?":
            words.append(c)
            i += 1
        else:
            warnings.append("WARNING: Non-word token encountered: " + _token_repr(f"'{c}'"))
            i += 1
    return words, warnings


# -- chart parsing -----------------------------------------------------------

@dataclass
class ParseChart:
    words: list
    pi: list
    back: list

    def prob(self, i: int, j: int, a: int) -> float:
        return self.pi[i][j][a]


@dataclass
class ParseTree:
    node: int
    label: str
    probability: float
    span: tuple
    words: list
    children: list = field(default_factory=list)

    def leaves(self) -> list:
        if not self.children:
            return list(self.words)
        return [w for c in self.children for w in c.leaves()]


def _lookup_terminal(g: Grammar, word: str, case_sensitive: bool):
    if case_sensitive:
        return word if word in g.terminals else None
    low = word.lower()
    for t in g.terminals:
        if t.lower() == low:
            return t
    return None


def cyk_parse(g: Grammar, words, case_sensitive: bool = True) -> ParseChart | None:
    """Most probable parse chart, or ``None`` when the start symbol cannot span the sentence.

    A candidate replaces a cell only when strictly larger, with splits
    tried left to right and rules in (A, B, C) index order, so the first
    best derivation found is the one kept.
    """
    words = list(words)
    n = len(words)
    if n == 0:
        raise ValueError("cannot parse an empty sentence")
    k = len(g.nonterminals)
    pi = [[[0.0] * k for _ in range(n)] for _ in range(n)]
    back = [[{} for _ in range(n)] for _ in range(n)]

    by_word: dict = {}
    for (a, t), p in g.lexical.items():
        by_word.setdefault(t, []).append((a, p))
    for i, w in enumerate(words):
        t = _lookup_terminal(g, w, case_sensitive)
        if t is None:
            return None
        for a, p in by_word[t]:
            pi[i][i][a] = p

    rules = sorted(g.binary.items())
    for span in range(2, n + 1):
        for begin in range(n - span + 1):
            end = begin + span - 1
            cell = pi[begin][end]
            cell_back = back[begin][end]
            for m in range(begin, end):
                left = pi[begin][m]
                right = pi[m + 1][end]
                for (a, b, c), p in rules:
                    prob = left[b] * right[c] * p
                    if prob > cell[a]:
                        cell[a] = prob
                        cell_back[a] = (m, b, c)

    if pi[0][n - 1][g.start] == 0:
        return None
    return ParseChart(words, pi, back)


def build_tree(g: Grammar, chart: ParseChart, i: int, j: int, a: int) -> ParseTree:
    p = chart.pi[i][j][a]
    if p <= 0:
        raise ValueError(f"no derivation of {g.nonterminals[a]} over span {i}-{j}")
    node = ParseTree(a, g.nonterminals[a], p, (i, j), chart.words[i:j + 1])
    bp = chart.back[i][j].get(a)
    if bp is not None:
        m, b, c = bp
        node.children = [build_tree(g, chart, i, m, b), build_tree(g, chart, m + 1, j, c)]
    return node


def format_tree(tree: ParseTree, indent: str = "    ") -> list[str]:
    lines = []

    def walk(t, level):
        i, j = t.span
        lines.append(f"{indent * level}{t.label} ({java_double(t.probability)}) "
                     f"[ {i}-{j}: {' '.join(t.words)} ]")
        for c in t.children:
            walk(c, level + 1)

    walk(tree, 0)
    return lines


def parse_sentence(g: Grammar, words, case_sensitive: bool = True) -> ParseTree | None:
    chart = cyk_parse(g, words, case_sensitive)
    if chart is None:
        return None
    return build_tree(g, chart, 0, len(chart.words) - 1, g.start)
