"""zipf-law: rank/frequency analysis of a text corpus."""

from __future__ import annotations

import sys
from pathlib import Path

from .. import __version__, report
from ..nlp import zipf
from ..nlp.tokenize import TokenizerOptions
from . import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE

FLAGS = ("--case", "--num", "--quote", "--eos", "--nolog", "--list")

USAGE = """\
Usage:
    zipf-law --help | -h | [ OPTIONS ] <corpus-file>

Options (one or more of the following):
    --case  - make it case-sensitive
    --num   - parse numerical values
    --quote - consider quotes and count quoted strings as one token
    --eos   - make typical ends of sentences (<?>, <!>, <.>) significant
    --nolog - dump Zipf's law graph values as-is instead of log/log
    --list  - lists already pre-collected statistics for a given corpus
"""


class UsageError(Exception):
    pass


def parse_args(argv):
    if not argv:
        raise UsageError("No corpus file has been specified.")
    if argv[0] in ("--help", "-h", "--version"):
        return {"mode": argv[0]}
    flags = [a for a in argv if a.startswith("-")]
    bad = [f for f in flags if f not in FLAGS]
    if bad:
        raise UsageError(f"unknown option: {bad[0]}")
    files = [a for a in argv if not a.startswith("-")]
    if not files:
        raise UsageError("No corpus file has been specified.")
    if len(files) > 1:
        raise UsageError(f"only one corpus file is accepted, got {len(files)}")
    opts = TokenizerOptions(case_sensitive="--case" in flags, parse_numbers="--num" in flags,
                            quotes_as_token="--quote" in flags, eos_significant="--eos" in flags)
    return {"mode": "--list" if "--list" in flags else "analyze", "corpus": files[0],
            "tokens": opts, "log": "--nolog" not in flags}


def _print_top(out, words) -> None:
    for w in words:
        out.write(f"{w.rank}\t{w.frequency}\t{w.lexeme}\n")


def _print_freq_of_freq(out, result: zipf.ZipfResult) -> None:
    out.write("Frequency of frequencies:\n")
    for freq, count in result.freq_of_freq.items():
        out.write(f"{freq}\t{count}\n")


def analyze(opts, workdir: Path, out) -> None:
    corpus = Path(opts["corpus"])
    text = corpus.read_text(encoding="utf-8", errors="replace")

    def snapshot(seen, top):
        out.write(f"Top {len(top)} words after {seen} words:\n")
        _print_top(out, top)
        out.write("\n")

    result = zipf.zipf_analyze(text, opts["tokens"], on_snapshot=snapshot)
    _print_freq_of_freq(out, result)

    csv_path = workdir / zipf.output_name(corpus.name, opts["tokens"], opts["log"])
    csv_path.write_text(zipf.to_csv(result, opts["log"]), encoding="utf-8")
    if result.words:
        ranks, freqs = zip(*((w.rank, w.frequency) for w in result.words))
        report.plot_zipf(ranks, freqs, csv_path.with_suffix(".png"), opts["log"])
    zipf.dump_stats(result, workdir / zipf.stats_name(corpus.name, opts["tokens"]))
    out.write(f"Wrote {csv_path}\n")


def list_stats(opts, workdir: Path, out, err) -> int:
    name = zipf.stats_name(Path(opts["corpus"]).name, opts["tokens"])
    path = workdir / name
    if not path.exists():
        err.write(f"ZipfLaw: no statistics collected for {opts['corpus']} "
                  f"with these options ({name} not found)\n")
        return EXIT_RUNTIME
    result = zipf.load_stats(path)
    out.write(f"{result.total} words, {len(result.words)} distinct\n")
    _print_top(out, result.words)
    _print_freq_of_freq(out, result)
    return EXIT_OK


def main(argv=None, workdir=None, stdout=None, stderr=None) -> int:
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
        out.write(f"zipf-law {__version__}\n")
        return EXIT_OK
    workdir = Path(workdir or Path.cwd())
    try:
        if opts["mode"] == "--list":
            return list_stats(opts, workdir, out, err)
        analyze(opts, workdir, out)
        return EXIT_OK
    except (OSError, ValueError) as exc:
        err.write(f"ZipfLaw: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
