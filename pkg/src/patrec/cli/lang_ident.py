"""lang-ident: train character n-gram models and identify the language of text."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

from .. import __version__
from ..nlp import ngram
from ..nlp.tokenize import Mode, TokenizerOptions
from . import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE

ORDERS = {"-unigram": 1, "-bigram": 2, "-trigram": 3}
ESTIMATORS = {
    "-mle": ngram.Estimator.MLE,
    "-add-one": ngram.Estimator.ADD_ONE,
    "-add-delta": ngram.Estimator.ADD_DELTA,
    "-witten-bell": ngram.Estimator.WITTEN_BELL,
    "-good-turing": ngram.Estimator.GOOD_TURING,
}
MODES = {"-restricted": Mode.RESTRICTED, "-unrestricted": Mode.UNRESTRICTED}
OTHER = ("-interactive", "-char", "--debug")

USAGE = """\
Usage:
    lang-ident --help | -h
    lang-ident --version
    lang-ident --train [ --debug ] [ OPTIONS ] <language> <corpus-file>
    lang-ident --ident [ --debug ] [ OPTIONS ] foo <bar|corpus-file>

Options (one or more of the following):
    -interactive   read sentences from standard input instead of a file
    -char          use characters as n-grams (always on)

    -unigram       use UNIGRAM model
    -bigram        use BIGRAM model
    -trigram       use TRIGRAM model

    -mle           use MLE
    -add-one       use Add-One smoothing
    -add-delta     use Add-Delta (ELE, d=0.5) smoothing
    -witten-bell   use Witten-Bell smoothing
    -good-turing   use Good-Turing smoothing

    -restricted    ASCII letters and digits only, case-folded (default)
    -unrestricted  every non-blank character
"""


class UsageError(Exception):
    pass


def _pick(flags, table, what, required=True):
    found = [f for f in flags if f in table]
    if len(found) > 1:
        raise UsageError(f"more than one {what} given: {' '.join(found)}")
    if not found:
        if required:
            raise UsageError(f"no {what} specified")
        return None
    return table[found[0]]


def parse_args(argv):
    if not argv:
        raise UsageError("No arguments have been specified.")
    mode, rest = argv[0], argv[1:]
    if mode in ("--help", "-h", "--version"):
        return {"mode": mode}
    if mode not in ("--train", "--ident"):
        raise UsageError(f"unknown mode: {mode}")
    known = set(ORDERS) | set(ESTIMATORS) | set(MODES) | set(OTHER)
    flags = [a for a in rest if a.startswith("-") and a in known]
    unknown = [a for a in rest if a.startswith("-") and a not in known]
    if unknown:
        raise UsageError(f"unknown option: {unknown[0]}")
    positional = [a for a in rest if not a.startswith("-")]
    opts = {
        "mode": mode,
        "n": _pick(flags, ORDERS, "n-gram model"),
        "estimator": _pick(flags, ESTIMATORS, "statistical estimator"),
        "tokens": Mode(_pick(flags, MODES, "tokenizer mode", required=False) or Mode.RESTRICTED),
        "interactive": "-interactive" in flags,
        "debug": "--debug" in flags,
    }
    if mode == "--train":
        if len(positional) != 2:
            raise UsageError("--train needs <language> <corpus-file>")
        opts["language"], opts["file"] = positional
    else:
        if len(positional) > 2:
            raise UsageError(f"too many arguments: {' '.join(positional)}")
        opts["file"] = positional[1] if len(positional) == 2 else None
        if not opts["interactive"] and opts["file"] is None:
            raise UsageError("no file to identify; give <corpus-file> or -interactive")
    return opts


def train(opts, workdir: Path, out) -> None:
    tok = TokenizerOptions(mode=opts["tokens"])
    path = workdir / ngram.model_filename(opts["language"], opts["n"], tok.mode.value)
    model = ngram.load_model(path) if path.exists() else ngram.NGramModel(opts["n"], opts["language"])
    text = Path(opts["file"]).read_text(encoding="utf-8", errors="replace")
    ngram.train_ngram(model, text, tok)
    ngram.dump_model(model, path)
    out.write(f"Trained {opts['language']} ({opts['n']}-gram, {model.V} characters) "
              f"from {opts['file']}\n")


def load_models(workdir: Path, n: int, mode: Mode) -> list:
    paths = sorted(workdir.glob(f"lang.*.{mode.value}.{n}gram.bin"))
    return [ngram.load_model(p) for p in paths]


def ident(opts, workdir: Path, stdin, out, err) -> int:
    tok = TokenizerOptions(mode=opts["tokens"])
    models = load_models(workdir, opts["n"], tok.mode)
    if not models:
        err.write(f"LangIdentApp: no trained {opts['n']}-gram models in {workdir}\n")
        return EXIT_RUNTIME
    if opts["interactive"]:
        lines = stdin
    else:
        lines = Path(opts["file"]).read_text(encoding="utf-8", errors="replace").splitlines()
    for line in lines:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        try:
            ranked = ngram.identify_language(models, line, opts["estimator"], tok)
        except ValueError as exc:
            err.write(f"LangIdentApp: WARNING: {exc}: {line!r}\n")
            continue
        logging.debug("scores: %s", ranked)
        out.write(f"Language identified: [{ranked[0][0]}]\n")
        out.flush()
    return EXIT_OK


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
        out.write(f"lang-ident {__version__}\n")
        return EXIT_OK
    if opts["debug"]:
        logging.basicConfig(level=logging.DEBUG)
    workdir = Path(workdir or Path.cwd())
    try:
        if opts["mode"] == "--train":
            train(opts, workdir, out)
            return EXIT_OK
        return ident(opts, workdir, stdin or sys.stdin, out, err)
    except (OSError, ValueError) as exc:
        err.write(f"LangIdentApp: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
