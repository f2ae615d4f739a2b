"""Character n-gram models, smoothing estimators and language identification."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .. import container
from .tokenize import TokenizerOptions, tokenize_chars

MODEL_KIND = "ngram-model"
LOG_FLOOR = 1e-300


class Estimator(str, Enum):
    MLE = "mle"
    ADD_ONE = "add-one"
    ADD_DELTA = "add-delta"
    WITTEN_BELL = "witten-bell"
    GOOD_TURING = "good-turing"


ELE_DELTA = 0.5


class EstimatorError(ValueError):
    """The estimator has no defined value for this context."""


@dataclass
class NGramModel:
    n: int
    language: str = ""
    counts: dict = field(default_factory=dict)
    vocabulary: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"n-gram order must be 1, 2 or 3, got {self.n}")

    @property
    def V(self) -> int:
        return len(self.vocabulary)

    def count(self, context: str, char: str) -> int:
        return self.counts.get(context, {}).get(char, 0)

    def total(self, context: str) -> int:
        return sum(self.counts.get(context, {}).values())

    def seen_types(self, context: str) -> int:
        return len(self.counts.get(context, {}))

    def to_payload(self) -> dict:
        return {"n": self.n, "language": self.language,
                "counts": {ctx: dict(c) for ctx, c in self.counts.items()},
                "vocabulary": list(self.vocabulary)}

    @classmethod
    def from_payload(cls, p: dict) -> "NGramModel":
        m = cls(int(p["n"]), p["language"])
        m.counts = {ctx: Counter({ch: int(k) for ch, k in c.items()}) for ctx, c in p["counts"].items()}
        m.vocabulary = dict.fromkeys(p["vocabulary"])
        return m


def ngrams(chars, n: int):
    """(context, char) pairs of a sliding window of width ``n``."""
    for i in range(n - 1, len(chars)):
        yield "".join(chars[i - n + 1:i]), chars[i]


def train_ngram(model: NGramModel, text: str, opts: TokenizerOptions | None = None) -> NGramModel:
    chars = tokenize_chars(text, opts)
    for c in chars:
        model.vocabulary.setdefault(c, None)
    for ctx, c in ngrams(chars, model.n):
        model.counts.setdefault(ctx, Counter())[c] += 1
    return model


def prob_add_delta(model: NGramModel, context: str, char: str, delta: float) -> float:
    """``(C + delta) / (N + delta * V)``; delta 0 is MLE, 1 is add-one, 0.5 is ELE."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    c = model.count(context, char)
    n = model.total(context)
    denom = n + delta * model.V
    if denom == 0:
        raise EstimatorError(f"no counts for context {context!r}")
    return (c + delta) / denom


def prob_mle(model: NGramModel, context: str, char: str) -> float:
    return prob_add_delta(model, context, char, 0.0)


def prob_witten_bell(model: NGramModel, context: str, char: str) -> float:
    """Seen: ``C/(N+T)``.  Unseen: ``T/(Z(N+T))`` with ``Z = V - T``.

    When every vocabulary character has been seen in the context there is
    no unseen mass to hand out, so seen characters get ``C/N``.
    """
    n = model.total(context)
    t = model.seen_types(context)
    if n + t == 0:
        raise EstimatorError(f"no counts for context {context!r}")
    z = model.V - t
    c = model.count(context, char)
    if c > 0:
        return c / n if z <= 0 else c / (n + t)
    return t / (max(z, 1) * (n + t))


def count_of_counts(model: NGramModel, context: str) -> Counter:
    """``N_r``: how many vocabulary characters occur ``r`` times after ``context``."""
    seen = model.counts.get(context, {})
    nr = Counter(seen.values())
    nr[0] = model.V - len(seen)
    return nr


def prob_good_turing(model: NGramModel, context: str, char: str) -> float:
    """``c* / N`` with ``c* = (c+1) N_{c+1} / N_c``; every zero quantity counts as 1."""
    nr = count_of_counts(model, context)
    c = model.count(context, char)
    n_c = nr[c] or 1
    n_c1 = nr[c + 1] or 1
    n = model.total(context) or 1
    return (c + 1) * n_c1 / n_c / n


def probability(model: NGramModel, estimator: Estimator, context: str, char: str,
                delta: float = ELE_DELTA) -> float:
    estimator = Estimator(estimator)
    if estimator is Estimator.MLE:
        return prob_mle(model, context, char)
    if estimator is Estimator.ADD_ONE:
        return prob_add_delta(model, context, char, 1.0)
    if estimator is Estimator.ADD_DELTA:
        return prob_add_delta(model, context, char, delta)
    if estimator is Estimator.WITTEN_BELL:
        return prob_witten_bell(model, context, char)
    return prob_good_turing(model, context, char)


def log_probability(model: NGramModel, estimator: Estimator, chars) -> float:
    total = 0.0
    for ctx, c in ngrams(chars, model.n):
        try:
            p = probability(model, estimator, ctx, c)
        except EstimatorError:
            p = 0.0
        total += math.log(max(p, LOG_FLOOR))
    return total


def identify_language(models, text: str, estimator: Estimator,
                      opts: TokenizerOptions | None = None) -> list[tuple[str, float]]:
    """Languages ranked by the log probability of ``text``; ties keep model order."""
    models = list(models)
    if not models:
        raise ValueError("no language models to compare")
    if len({m.n for m in models}) != 1:
        raise ValueError("models differ in n-gram order")
    chars = tokenize_chars(text, opts)
    if not chars:
        raise ValueError("nothing to identify: the text has no usable characters")
    scored = [(m.language, log_probability(m, estimator, chars)) for m in models]
    return sorted(scored, key=lambda x: -x[1])


def model_filename(language: str, n: int, mode: str = "restricted") -> str:
    return f"lang.{language}.{mode}.{n}gram.bin"


def dump_model(model: NGramModel, path) -> None:
    container.dump(path, MODEL_KIND, model.to_payload())


def load_model(path) -> NGramModel:
    return NGramModel.from_payload(container.load(path, MODEL_KIND))
