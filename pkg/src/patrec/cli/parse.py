"""prob-parse: compile probabilistic CNF grammars and parse sentences with CYK."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

from .. import __version__
from ..nlp import cyk
from ..nlp.tokenize import TokenizerOptions
from . import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE

GRAMMAR_FILE = "grammar.bin"
QUIT = "\\q"
BANNER = "Probabilistic Parsing\n\n\n"
SYNOPSIS = "<NONTERMINAL> (PROBABILITY) [ SPAN: words of span ]"
OPTIONS = ("--debug", "-case", "-num", "-quote", "-eos")

USAGE = """\
Usage:
    prob-parse --help | -h
        : to display this help and exit

    prob-parse --version
        : to display version and exit

    prob-parse --train [ OPTIONS ] <grammar-file>
        : to compile grammar from the <grammar-file>

    prob-parse --parse [ OPTIONS ]
        : to parse sentences from standard input

Where options are of the following:

    --debug  - enable debugging (more verbose output)
    -case    - make it case-sensitive
    -num     - parse numerical values
    -quote   - consider quotes and count quoted strings as one token
    -eos     - make typical ends of sentences (<?>, <!>, <.>) significant
"""


class UsageError(Exception):
    pass


def parse_args(argv):
    if not argv:
        raise UsageError("No arguments have been specified.")
    mode, rest = argv[0], argv[1:]
    if mode in ("--help", "-h", "--version"):
        return {"mode": mode}
    if mode not in ("--train", "--parse"):
        raise UsageError(f"unknown mode: {mode}")
    flags = [a for a in rest if a.startswith("-")]
    bad = [f for f in flags if f not in OPTIONS]
    if bad:
        raise UsageError(f"unknown option: {bad[0]}")
    files = [a for a in rest if not a.startswith("-")]
    if mode == "--train" and len(files) != 1:
        raise UsageError("--train needs exactly one <grammar-file>")
    if mode == "--parse" and files:
        raise UsageError("--parse reads sentences from standard input and takes no files")
    tokens = TokenizerOptions(case_sensitive="-case" in flags, parse_numbers="-num" in flags,
                              quotes_as_token="-quote" in flags,
                              eos_significant="-eos" in flags)
    return {"mode": mode, "file": files[0] if files else None, "tokens": tokens,
            "debug": "--debug" in flags}


def train(opts, workdir: Path, out, err) -> None:
    source = Path(opts["file"]).read_text(encoding="utf-8")
    grammar = cyk.compile_grammar(source)
    for w in grammar.warnings:
        err.write(f"WARNING: {w}\n")
    path = workdir / GRAMMAR_FILE
    cyk.dump_grammar(grammar, path)
    out.write(f"Compiled {grammar.rule_count()} rules over {len(grammar.nonterminals)} "
              f"nonterminals into {path}\n")


def format_parse(line: str, tree: cyk.ParseTree | None) -> str:
    """The report printed for one sentence, after its echo."""
    if tree is None:
        return f"\nThere's no parse for [ {line} ]\n\n"
    body = "\n".join(cyk.format_tree(tree))
    return (f"\nParse for the sentence [ {line} ] is below:\n\nSYNOPSIS:\n\n{SYNOPSIS}\n\n"
            f"{body}\n\n\n")


def parse_session(grammar: cyk.Grammar, tokens: TokenizerOptions, stdin, out, err) -> None:
    out.write(BANNER)
    out.write(f"Entering interactive mode... Type {QUIT} to exit.\n")
    while True:
        out.write("sentence> ")
        out.flush()
        raw = stdin.readline()
        if not raw:
            out.write("\n")
            return
        line = raw.strip()
        if line == QUIT:
            out.write("\n")
            return
        out.write(f"{line}\n")
        words, warnings = cyk.tokenize_sentence(line, tokens)
        for w in warnings:
            err.write(f"{w}\n")
        if not words:
            continue
        tree = cyk.parse_sentence(grammar, words, tokens.case_sensitive)
        out.write(format_parse(" ".join(words), tree))


def main(argv=None, workdir=None, stdin=None, stdout=None, stderr=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        opts = parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        out.write(USAGE)
        return EXIT_USAGE
    if opts["mode"] in ("--help", "-h"):
        out.write(USAGE)
        return EXIT_OK
    if opts["mode"] == "--version":
        out.write(f"prob-parse {__version__}\n")
        return EXIT_OK
    if opts["debug"]:
        logging.basicConfig(level=logging.DEBUG)
    workdir = Path(workdir or Path.cwd())
    try:
        if opts["mode"] == "--train":
            train(opts, workdir, out, err)
            return EXIT_OK
        path = workdir / GRAMMAR_FILE
        if not path.exists():
            err.write(f"ProbabilisticParsingApp: no compiled grammar at {path}; "
                      f"run --train first\n")
            return EXIT_RUNTIME
        parse_session(cyk.load_grammar(path), opts["tokens"], stdin or sys.stdin, out, err)
        return EXIT_OK
    except (OSError, ValueError) as exc:
        err.write(f"ProbabilisticParsingApp: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
