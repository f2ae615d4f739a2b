"""Load -> preprocess -> extract -> classify, for training and recognition."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

from . import audio, container, report, storage
from .classify import DistanceParams, Metric, ResultSet, classify_distance, classify_random
from .container import ContainerError
from .features import FeatureConfig, FeatureVector, extract
from .neural import DEFAULT_HIDDEN, NeuralNet, nn_classify, nn_train, output_size
from .preprocess import PreprocessConfig, preprocess

log = logging.getLogger(__name__)

SAMPLE_EXTENSION = ".wav"
SINE_SECONDS = 1.0


class Loader(str, Enum):
    WAV = "wav"
    TEXT = "text"
    # the file name stem is the tone frequency in Hz, e.g. "440.sine"
    SINE = "sine"


class ClassifierKind(str, Enum):
    DISTANCE = "distance"
    NEURAL = "nn"
    RANDOM = "randcl"


@dataclass(frozen=True)
class ClassifierConfig:
    kind: ClassifierKind = ClassifierKind.DISTANCE
    metric: Metric = Metric.EUCLIDEAN
    params: DistanceParams = field(default_factory=DistanceParams)
    hidden: int = DEFAULT_HIDDEN
    epochs: int = 20
    min_error: float = 0.1
    alpha: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassifierKind(self.kind))
        object.__setattr__(self, "metric", Metric(self.metric))

    @property
    def key(self) -> str:
        if self.kind is ClassifierKind.DISTANCE:
            return self.metric.value
        return self.kind.value


@dataclass(frozen=True)
class PipelineConfig:
    loader: Loader = Loader.WAV
    prep: PreprocessConfig = field(default_factory=PreprocessConfig)
    feat: FeatureConfig = field(default_factory=FeatureConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    spectrogram: bool = False
    wave_graph: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "loader", Loader(self.loader))


class PipelineError(RuntimeError):
    """A failure tagged with the stage it happened in."""

    def __init__(self, stage: str, path, cause: Exception):
        super().__init__(f"{stage}: {path}: {cause}")
        self.stage = stage
        self.path = str(path)
        self.cause = cause


def config_string(args) -> str:
    """Option tokens joined the way the statistics keys expect: each followed by a space."""
    return "".join(f"{a} " for a in args)


def load_sample(loader: Loader, path) -> audio.Sample:
    loader = Loader(loader)
    if loader is Loader.WAV:
        return audio.load_wav(path)
    if loader is Loader.TEXT:
        return audio.load_text(path)
    stem = Path(path).name.split(".")[0]
    try:
        freq = float(stem)
    except ValueError:
        raise ValueError(f"sine loader needs a frequency as the file name, got {stem!r}") from None
    return audio.generate_sine(freq, SINE_SECONDS)


@dataclass
class Identification:
    path: str
    results: ResultSet
    expected: int | None
    elapsed_ms: int

    @property
    def first(self) -> int:
        return self.results.closest.subject_id

    @property
    def second(self) -> int:
        return self.results.second_closest.subject_id if len(self.results) > 1 else -1


@dataclass
class BatchSummary:
    processed: int = 0
    with_expected: int = 0
    first_good: int = 0
    second_good: int = 0
    errors: list = field(default_factory=list)


class Pipeline:
    """One configuration bound to a working directory holding its trained data."""

    def __init__(self, config: PipelineConfig, workdir="."):
        self.config = config
        self.workdir = Path(workdir)

    @property
    def training_set_path(self) -> Path:
        c = self.config
        return self.workdir / storage.training_set_filename(c.prep.key, c.feat.key)

    @property
    def network_path(self) -> Path:
        c = self.config
        return self.workdir / f"nn.{c.prep.key}.{c.feat.key}.bin"

    def load_training_set(self) -> storage.TrainingSet:
        path = self.training_set_path
        if path.exists():
            return storage.restore_training_set(path)
        c = self.config
        return storage.TrainingSet(c.prep.key, c.feat.key, keep_vectors=True)

    def features(self, path) -> FeatureVector:
        c = self.config
        try:
            sample = load_sample(c.loader, path)
        except (OSError, ValueError) as exc:
            raise PipelineError("load", path, exc) from exc
        if c.wave_graph:
            report.emit_wave_graph(sample, self._dump_path(path, "wave.tsv"))
            report.plot_wave(sample, self._dump_path(path, "wave.png"))
        try:
            sample = preprocess(c.prep, sample)
        except ValueError as exc:
            raise PipelineError("preprocess", path, exc) from exc
        try:
            vector = extract(sample, c.feat)
        except ValueError as exc:
            raise PipelineError("extract", path, exc) from exc
        if c.wave_graph:
            report.emit_feature_graph(vector.values, self._dump_path(path, "features.tsv"))
            report.plot_features(vector.values, self._dump_path(path, "features.png"))
        if c.spectrogram:
            frames = report.spectrogram_frames(sample)
            if len(frames):
                report.emit_spectrogram(frames, self._dump_path(path, "spectrogram.ppm"))
                report.plot_spectrogram(frames, self._dump_path(path, "spectrogram.png"),
                                        sample.sample_rate)
        return vector

    def _dump_path(self, sample_path, suffix: str) -> Path:
        c = self.config
        name = f"{Path(sample_path).stem}.{c.prep.key}.{c.feat.key}.{suffix}"
        return self.workdir / name

    def train(self, path, subject: int) -> storage.TrainingSet:
        return self.train_many([(path, subject)])

    def train_many(self, items) -> storage.TrainingSet:
        """Fold each (path, subject) into the stored set; save once at the end."""
        ts = self.load_training_set()
        ts.keep_vectors = True
        for path, subject in items:
            if subject < 0:
                raise ValueError(f"subject id must be >= 0, got {subject}")
            vector = self.features(path)
            try:
                ts.update(int(subject), vector)
            except storage.StorageError as exc:
                raise PipelineError("train", path, exc) from exc
        storage.dump_training_set(ts, self.training_set_path)
        if self.config.classifier.kind is ClassifierKind.NEURAL:
            self._retrain_network(ts)
        return ts

    def _retrain_network(self, ts: storage.TrainingSet) -> NeuralNet:
        c = self.config.classifier
        if not ts.vectors:
            raise PipelineError("train", self.training_set_path,
                                ValueError("no stored vectors to train the network on"))
        max_id = max(s for s, _ in ts.vectors)
        net = NeuralNet.create([ts.length, c.hidden, output_size(max_id)], seed=self.config.seed,
                               alpha=c.alpha, epochs=c.epochs, min_error=c.min_error)
        net = nn_train(net, [(v, s) for s, v in ts.vectors])
        container.dump(self.network_path, "neural-net", net.to_payload())
        return net

    def classify(self, vector: FeatureVector, path="<vector>") -> ResultSet:
        c = self.config
        try:
            ts = self.load_training_set()
        except (ContainerError, storage.StorageError) as exc:
            raise PipelineError("classify", path, exc) from exc
        if not ts.clusters:
            raise PipelineError("classify", path, LookupError(
                f"no training data in {self.training_set_path.name}; train first"))
        if ts.length != len(vector):
            raise PipelineError("classify", path, ValueError(
                f"feature length {len(vector)} does not match trained length {ts.length}"))
        kind = c.classifier.kind
        try:
            if kind is ClassifierKind.DISTANCE:
                return classify_distance(vector.values, ts.means(), c.classifier.metric,
                                         c.classifier.params)
            if kind is ClassifierKind.RANDOM:
                return classify_random(sorted(ts.clusters), seed=c.seed)
            if not self.network_path.exists():
                raise LookupError(f"no trained network {self.network_path.name}; train first")
            net = NeuralNet.from_payload(container.load(self.network_path, "neural-net"))
            return nn_classify(net, vector.values)
        except (ValueError, LookupError) as exc:
            raise PipelineError("classify", path, exc) from exc

    def recognize(self, path) -> ResultSet:
        return self.classify(self.features(path), path)

    def identify(self, path, expected: int | None = None) -> Identification:
        start = time.monotonic()
        results = self.recognize(path)
        elapsed = int(round((time.monotonic() - start) * 1000))
        return Identification(str(path), results, expected, elapsed)


def sample_files(directory) -> list:
    """``.wav`` files (any case) directly inside ``directory``, sorted by name."""
    d = Path(directory)
    if not d.is_dir():
        raise NotADirectoryError(f"folder {str(directory)!r} not found")
    return sorted(p for p in d.iterdir() if p.is_file() and p.suffix.lower() == SAMPLE_EXTENSION)


def batch_recognize(pipeline: Pipeline, directory, db: storage.SpeakerDb,
                    per_config: storage.StatsDb, per_speaker: storage.StatsDb,
                    config_key: str,
                    on_result: Callable[[Identification], None] | None = None,
                    expected: int | None = None) -> BatchSummary:
    """Identify every sample in ``directory``; count stats for files with a known speaker."""
    summary = BatchSummary()
    for path in sample_files(directory):
        want = expected if expected is not None else db.id_by_filename(str(path), training=False)
        try:
            ident = pipeline.identify(path, want)
        except PipelineError as exc:
            log.error("%s", exc)
            summary.errors.append(exc)
            continue
        summary.processed += 1
        if want is not None:
            first_ok = ident.first == want
            second_ok = ident.second == want
            per_config.record(config_key, first_ok, second_ok)
            per_speaker.record(db.name(want), first_ok, second_ok)
            summary.with_expected += 1
            summary.first_good += first_ok
            summary.second_good += first_ok or second_ok
        if on_result:
            on_result(ident)
    return summary
