"""Training sets, the speaker database and classification statistics."""

from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import container

log = logging.getLogger(__name__)

TRAINING_KIND = "training-set"
STATS_KIND = "stats"


class StorageError(ValueError):
    pass


# -- training sets ---------------------------------------------------------

@dataclass
class Cluster:
    mean: np.ndarray
    count: int


@dataclass
class TrainingSet:
    """Per-subject running means for one (preprocessing, extraction) setup.

    ``vectors`` keeps every training vector when a classifier needs to
    replay them (the neural network retrains from scratch each session).
    """
    prep: str
    feat: str
    length: int | None = None
    clusters: dict = field(default_factory=dict)
    vectors: list = field(default_factory=list)
    keep_vectors: bool = False

    @property
    def key(self) -> tuple:
        return (self.prep, self.feat, self.length)

    def copy(self) -> "TrainingSet":
        return TrainingSet(
            self.prep, self.feat, self.length,
            {s: Cluster(c.mean.copy(), c.count) for s, c in self.clusters.items()},
            [(s, v.copy()) for s, v in self.vectors], self.keep_vectors)

    def means(self) -> dict:
        return {s: c.mean for s, c in self.clusters.items()}

    def update(self, subject: int, v) -> None:
        """Fold ``v`` into the running mean of ``subject`` in place."""
        v = np.asarray(getattr(v, "values", v), dtype=np.float64).reshape(-1)
        if subject < 0:
            raise ValueError(f"subject id must be >= 0, got {subject}")
        if self.length is not None and v.size != self.length:
            raise StorageError(
                f"feature vector of length {v.size} does not match training set length {self.length}")
        self.length = v.size
        c = self.clusters.get(subject)
        if c is None:
            self.clusters[subject] = Cluster(v.copy(), 1)
        else:
            c.mean = (c.mean * c.count + v) / (c.count + 1)
            c.count += 1
        if self.keep_vectors:
            self.vectors.append((subject, v.copy()))

    def to_payload(self) -> dict:
        return {
            "prep": self.prep,
            "feat": self.feat,
            "length": self.length,
            "clusters": {s: {"mean": c.mean, "count": c.count} for s, c in self.clusters.items()},
            "vectors": [[s, v] for s, v in self.vectors],
            "keep_vectors": self.keep_vectors,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "TrainingSet":
        clusters = {int(s): Cluster(np.asarray(c["mean"], dtype=np.float64), int(c["count"]))
                    for s, c in p["clusters"].items()}
        vectors = [(int(s), np.asarray(v, dtype=np.float64)) for s, v in p["vectors"]]
        return cls(p["prep"], p["feat"], p["length"], clusters, vectors, bool(p["keep_vectors"]))


def train_update(ts: TrainingSet, subject: int, v) -> TrainingSet:
    """Copy of ``ts`` with ``v`` folded into ``subject``'s cluster."""
    out = ts.copy()
    out.update(subject, v)
    return out


def training_set_filename(prep: str, feat: str, fmt: str = "bin") -> str:
    if fmt not in ("bin", "csv"):
        raise ValueError(f"unknown training set format {fmt!r}")
    return f"training-set.{prep}.{feat}.{fmt}"


_FILENAME_RE = re.compile(r"^training-set\.(?P<prep>[^.]+)\.(?P<feat>[^.]+)\.(?:bin|csv)$")


def dump_training_set(ts: TrainingSet, path, fmt: str = "bin") -> None:
    path = Path(path)
    if fmt == "bin":
        container.dump(path, TRAINING_KIND, ts.to_payload())
    elif fmt == "csv":
        path.write_text(training_set_csv(ts), encoding="utf-8", newline="")
    else:
        raise ValueError(f"unknown training set format {fmt!r}")


def training_set_csv(ts: TrainingSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = ts.length or 0
    w.writerow(["subject", "count"] + [f"v{i}" for i in range(n)])
    for s in sorted(ts.clusters):
        c = ts.clusters[s]
        w.writerow([s, c.count] + [repr(float(x)) for x in c.mean])
    return buf.getvalue()


def restore_training_set(path, fmt: str | None = None, prep: str | None = None,
                         feat: str | None = None) -> TrainingSet:
    """Load a training set; ``fmt`` defaults to the file extension.

    CSV files do not record the configuration, so ``prep`` and ``feat`` are
    taken from the arguments or else from a standard file name.
    """
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    if fmt == "bin":
        try:
            return TrainingSet.from_payload(container.load(path, TRAINING_KIND))
        except (KeyError, TypeError) as exc:
            raise StorageError(f"{path}: malformed training set ({exc})") from exc
    if fmt != "csv":
        raise ValueError(f"unknown training set format {fmt!r}")
    if prep is None or feat is None:
        m = _FILENAME_RE.match(path.name)
        if not m:
            raise StorageError(f"{path}: cannot infer configuration from file name")
        prep = prep or m["prep"]
        feat = feat or m["feat"]
    rows = list(csv.reader(path.read_text(encoding="utf-8").splitlines()))
    if not rows or rows[0][:2] != ["subject", "count"]:
        raise StorageError(f"{path}: missing training set header")
    length = len(rows[0]) - 2
    ts = TrainingSet(prep, feat, length or None)
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != length + 2:
            raise StorageError(f"{path}:{lineno}: expected {length + 2} fields, got {len(row)}")
        try:
            sid, count = int(row[0]), int(row[1])
            mean = np.array([float(x) for x in row[2:]])
        except ValueError as exc:
            raise StorageError(f"{path}:{lineno}: {exc}") from exc
        if count < 1:
            raise StorageError(f"{path}:{lineno}: cluster count must be >= 1")
        ts.clusters[sid] = Cluster(mean, count)
    return ts


# -- speaker database ------------------------------------------------------

@dataclass
class Speaker:
    name: str
    training: list = field(default_factory=list)
    testing: list = field(default_factory=list)


@dataclass
class SpeakerDb:
    entries: dict = field(default_factory=dict)

    def name(self, sid: int) -> str:
        e = self.entries.get(sid)
        return e.name if e else f"Unknown Speaker ({sid})"

    def id_by_filename(self, path: str, training: bool) -> int | None:
        return id_by_filename(self, path, training)


def _split_list(field_text: str) -> list:
    return [f for f in field_text.split("|") if f]


def parse_speaker_line(line: str) -> tuple[int, Speaker]:
    fields = line.split(",")
    if not 2 <= len(fields) <= 4:
        raise StorageError(f"expected 2 to 4 comma-separated fields, got {len(fields)}")
    try:
        sid = int(fields[0].strip())
    except ValueError:
        raise StorageError(f"speaker id {fields[0]!r} is not an integer") from None
    training = _split_list(fields[2]) if len(fields) > 2 else []
    testing = _split_list(fields[3]) if len(fields) > 3 else []
    return sid, Speaker(fields[1], training, testing)


def parse_speaker_db(path) -> SpeakerDb:
    """Read ``<id>,<name>,<train1|train2|...>,<test1|...>`` lines."""
    db = SpeakerDb()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            sid, speaker = parse_speaker_line(line)
        except StorageError as exc:
            raise StorageError(f"{path}:{lineno}: {exc}") from None
        if sid in db.entries:
            raise StorageError(f"{path}:{lineno}: duplicate speaker id {sid}")
        db.entries[sid] = speaker
    return db


def base_filename(path: str) -> str:
    for sep in ("/", "\\"):
        cut = path.rfind(sep)
        if cut >= 0:
            return path[cut + 1:]
    return path


def id_by_filename(db: SpeakerDb, path: str, training: bool) -> int | None:
    name = base_filename(str(path))
    for sid, e in db.entries.items():
        if name in (e.training if training else e.testing):
            return sid
    return None


# -- statistics ------------------------------------------------------------

@dataclass
class Counts:
    good: int = 0
    bad: int = 0

    @property
    def total(self) -> int:
        return self.good + self.bad

    @property
    def percent(self) -> float:
        # an empty counter reports 0% rather than NaN
        return self.good / self.total * 100.0 if self.total else 0.0


@dataclass
class StatsEntry:
    first: Counts = field(default_factory=Counts)
    second: Counts = field(default_factory=Counts)


def format_percent(p: float) -> str:
    return f"{p:,.2f}" if p >= 0 else f"({-p:,.2f})"


@dataclass
class StatsDb:
    entries: dict = field(default_factory=dict)

    def add(self, key: str, success: bool, second_guess: bool = False) -> None:
        e = self.entries.setdefault(key, StatsEntry())
        c = e.second if second_guess else e.first
        if success:
            c.good += 1
        else:
            c.bad += 1

    def record(self, key: str, first_ok: bool, second_ok: bool) -> None:
        """Count one classification; the second guess succeeds if either guess was right."""
        self.add(key, first_ok)
        self.add(key, first_ok or second_ok, second_guess=True)

    def sorted_keys(self) -> list:
        return sorted(self.entries, key=lambda k: (-self.entries[k].first.percent, k))

    def format(self, best_only: bool = False) -> str:
        if not self.entries:
            return "no statistics available. Did you run the recognizer yet?\n"
        keys = self.sorted_keys()
        if best_only:
            return format_percent(self.entries[keys[0]].first.percent) + "\n"
        lines = ["guess,run,config,good,bad,%"]
        for guess, attr in (("1st", "first"), ("2nd", "second")):
            for run, k in enumerate(keys, start=1):
                c = getattr(self.entries[k], attr)
                lines.append(f"{guess},{run},{k},{c.good},{c.bad},{format_percent(c.percent)}")
        return "\n".join(lines) + "\n"

    def reset(self) -> None:
        self.entries.clear()

    def to_payload(self) -> dict:
        return {k: [e.first.good, e.first.bad, e.second.good, e.second.bad]
                for k, e in self.entries.items()}

    @classmethod
    def from_payload(cls, p: dict) -> "StatsDb":
        db = cls()
        for k, v in p.items():
            g1, b1, g2, b2 = (int(x) for x in v)
            if min(g1, b1, g2, b2) < 0:
                raise StorageError(f"negative count for {k!r}")
            db.entries[k] = StatsEntry(Counts(g1, b1), Counts(g2, b2))
        return db


def add_stats(db: StatsDb, key: str, success: bool, second_guess: bool = False) -> StatsDb:
    db.add(key, success, second_guess)
    return db


def print_stats(db: StatsDb, best_only: bool = False) -> str:
    return db.format(best_only)


def dump_stats(db: StatsDb, path) -> None:
    container.dump(path, STATS_KIND, db.to_payload())


def restore_stats(path) -> StatsDb:
    """Load statistics; a missing file yields a fresh empty database."""
    path = Path(path)
    if not path.exists():
        log.info("statistics file %s does not exist; starting empty", path)
        return StatsDb()
    try:
        return StatsDb.from_payload(container.load(path, STATS_KIND))
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, container.ContainerError):
            raise
        raise StorageError(f"{path}: malformed statistics ({exc})") from exc
