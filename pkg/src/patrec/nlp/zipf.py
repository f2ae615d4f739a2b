"""Word rank/frequency statistics."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass

from .. import container
from .tokenize import TokenizerOptions, tokenize_words

STATS_KIND = "zipf-stats"
SNAPSHOT_EVERY = 1000
SNAPSHOT_TOP = 100


@dataclass
class WordStats:
    lexeme: str
    frequency: int = 0
    rank: int = -1


@dataclass
class ZipfResult:
    words: list
    freq_of_freq: dict
    total: int

    def rank_frequency(self, log: bool = True) -> list[tuple[float, float]]:
        if log:
            return [(math.log10(w.rank), math.log10(w.frequency)) for w in self.words]
        return [(w.rank, w.frequency) for w in self.words]

    def to_payload(self) -> dict:
        return {"words": [[w.lexeme, w.frequency, w.rank] for w in self.words],
                "total": self.total}

    @classmethod
    def from_payload(cls, p: dict) -> "ZipfResult":
        words = [WordStats(lex, int(f), int(r)) for lex, f, r in p["words"]]
        return cls(words, _freq_of_freq(words), int(p["total"]))


def _freq_of_freq(words) -> dict:
    return dict(sorted(Counter(w.frequency for w in words).items(), reverse=True))


def rank(counts: Counter, order: dict) -> list[WordStats]:
    """Descending frequency; equal frequencies keep first-occurrence order."""
    words = [WordStats(lex, f) for lex, f in counts.items()]
    words.sort(key=lambda w: (-w.frequency, order[w.lexeme]))
    for i, w in enumerate(words, start=1):
        w.rank = i
    return words


def zipf_analyze(text: str, opts: TokenizerOptions | None = None,
                 on_snapshot=None) -> ZipfResult:
    """Count and rank word tokens.

    ``on_snapshot(words_seen, top)`` is called after every 1000 tokens with
    the 100 most frequent words so far.
    """
    counts: Counter = Counter()
    order: dict = {}
    tokens = tokenize_words(text, opts)
    for i, tok in enumerate(tokens, start=1):
        order.setdefault(tok, len(order))
        counts[tok] += 1
        if on_snapshot and i % SNAPSHOT_EVERY == 0:
            on_snapshot(i, rank(counts, order)[:SNAPSHOT_TOP])
    words = rank(counts, order)
    return ZipfResult(words, _freq_of_freq(words), len(tokens))


def to_csv(result: ZipfResult, log: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["log10(rank)", "log10(frequency)"] if log else ["rank", "frequency"])
    for r, f in result.rank_frequency(log):
        w.writerow([repr(float(r)), repr(float(f))] if log else [r, f])
    return buf.getvalue()


def output_name(corpus: str, opts: TokenizerOptions, log: bool = True) -> str:
    return f"{corpus}{opts.suffix()}{'' if log else '--nolog'}.csv"


def stats_name(corpus: str, opts: TokenizerOptions) -> str:
    return f"{corpus}{opts.suffix()}.stats"


def dump_stats(result: ZipfResult, path) -> None:
    container.dump(path, STATS_KIND, result.to_payload())


def load_stats(path) -> ZipfResult:
    return ZipfResult.from_payload(container.load(path, STATS_KIND))
