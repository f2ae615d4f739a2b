"""speaker-ident: train on and identify speakers from WAVE samples."""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .. import __version__, storage
from ..classify import Metric
from ..features import Extractor, FeatureConfig
from ..pipeline import (ClassifierConfig, ClassifierKind, Identification, Loader, Pipeline,
                        PipelineConfig, PipelineError, batch_recognize, config_string,
                        sample_files)
from ..preprocess import Method, PreprocessConfig
from . import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE

SPEAKERS_FILE = "speakers.txt"
CONFIG_PREFIX = "config."
SPEAKER_PREFIX = "speaker."
SEPARATOR = "----------------------------8<------------------------------"

MODES = ("--train", "--single-train", "--ident", "--batch-ident", "--gui", "--stats",
         "--best-score", "--reset", "--version", "--help", "-h")
NEEDS_TARGET = ("--train", "--single-train", "--ident", "--batch-ident")
STATS_CHOICES = ("per-config", "per-speaker", "both")

LOADERS = {"-wav": Loader.WAV, "-text": Loader.TEXT}
PREPROCESSORS = {
    "-raw": Method.RAW, "-norm": Method.NORMALIZE, "-low": Method.LOW_PASS,
    "-high": Method.HIGH_PASS, "-boost": Method.BOOST, "-highpassboost": Method.HIGH_PASS_BOOST,
    "-band": Method.BAND_PASS, "-bandstop": Method.BAND_STOP, "-endp": Method.ENDPOINT,
}
EXTRACTORS = {
    "-lpc": Extractor.LPC, "-fft": Extractor.FFT, "-minmax": Extractor.MINMAX,
    "-randfe": Extractor.RANDOM, "-aggr": Extractor.AGGREGATE,
}
CLASSIFIERS = {
    "-nn": (ClassifierKind.NEURAL, Metric.EUCLIDEAN),
    "-cheb": (ClassifierKind.DISTANCE, Metric.CHEBYSHEV),
    "-eucl": (ClassifierKind.DISTANCE, Metric.EUCLIDEAN),
    "-mink": (ClassifierKind.DISTANCE, Metric.MINKOWSKI),
    "-mah": (ClassifierKind.DISTANCE, Metric.MAHALANOBIS),
    "-diff": (ClassifierKind.DISTANCE, Metric.DIFF),
    "-hamming": (ClassifierKind.DISTANCE, Metric.HAMMING),
    "-cos": (ClassifierKind.DISTANCE, Metric.COSINE),
    "-randcl": (ClassifierKind.RANDOM, Metric.EUCLIDEAN),
}
NOT_IMPLEMENTED = ("-noise", "-lowcfe", "-highcfe", "-bandcfe", "-bandstopcfe",
                   "-f0", "-segm", "-cepstral", "-zipf", "-markov")
MISC = ("-silence", "-debug", "-spectrogram", "-graph")
ALL_FLAGS = set(LOADERS) | set(PREPROCESSORS) | set(EXTRACTORS) | set(CLASSIFIERS) \
    | set(NOT_IMPLEMENTED) | set(MISC)
DEFAULT_FLAGS = ["-wav", "-norm", "-fft", "-eucl"]

USAGE = """\
Usage:
  speaker-ident --train <samples-dir> [options]        -- train mode
                --single-train <sample> [options]      -- add a single sample to the training set
                --ident <sample> [options]             -- identification mode
                --batch-ident <samples-dir> [options]  -- batch identification mode
                --gui                                  -- use GUI as a user interface (NOT IMPLEMENTED)
                --stats=[per-config|per-speaker|both]  -- display stats (default is both)
                --best-score                           -- display best classification result
                --reset                                -- reset stats
                --version                              -- display version info
                --help | -h                            -- display this help and exit

Options (one or more of the following):

Loaders:

  -wav          - assume WAVE files loading (default)
  -text         - assume loading of text samples

Preprocessing:

  -silence      - remove silence (can be combined with any of the below)
  -noise        - remove noise (NOT IMPLEMENTED)
  -raw          - no preprocessing
  -norm         - use just normalization, no filtering (default)
  -low          - use low-pass FFT filter
  -high         - use high-pass FFT filter
  -boost        - use high-frequency-boost FFT preprocessor
  -highpassboost - use high-pass filter followed by high-frequency boost
  -band         - use band-pass FFT filter
  -bandstop     - use band-stop FFT filter
  -endp         - use endpointing
  -lowcfe       - use low-pass CFE filter (NOT IMPLEMENTED)
  -highcfe      - use high-pass CFE filter (NOT IMPLEMENTED)
  -bandcfe      - use band-pass CFE filter (NOT IMPLEMENTED)
  -bandstopcfe  - use band-stop CFE filter (NOT IMPLEMENTED)

Feature Extraction:

  -lpc          - use LPC
  -fft          - use FFT (default)
  -minmax       - use Min/Max Amplitudes
  -randfe       - use random feature extraction
  -aggr         - use aggregated FFT+LPC feature extraction
  -f0           - use F0 (NOT IMPLEMENTED)
  -segm         - use Segmentation (NOT IMPLEMENTED)
  -cepstral     - use Cepstral analysis (NOT IMPLEMENTED)

Classification:

  -nn           - use Neural Network
  -cheb         - use Chebyshev (city-block) Distance
  -eucl         - use Euclidean Distance (default)
  -mink         - use Minkowski Distance
  -mah          - use Mahalanobis Distance (identity covariance)
  -diff         - use Diff-Distance
  -zipf         - use Zipf's Law-based classifier (NOT IMPLEMENTED)
  -randcl       - use random classification
  -markov       - use Hidden Markov Models (NOT IMPLEMENTED)
  -hamming      - use Hamming Distance
  -cos          - use Cosine Similarity Measure

Misc:

  -debug        - include verbose debug output
  -spectrogram  - dump spectrogram image after feature extraction
  -graph        - dump wave graph before preprocessing and after feature extraction
  <integer>     - expected speaker ID
"""


class UsageError(Exception):
    pass


@dataclass
class OptionSet:
    mode: str
    flags: list = field(default_factory=list)
    target: str | None = None
    expected_id: int | None = None
    stats_scope: str = "both"
    warnings: list = field(default_factory=list)

    def first(self, table: dict):
        for f in self.flags:
            if f in table:
                return table[f]
        return None

    def has(self, flag: str) -> bool:
        return flag in self.flags

    def to_args(self) -> list:
        """Regenerate an argument list that parses back to an equal option set."""
        mode = self.mode
        if mode == "--stats":
            mode = f"--stats={self.stats_scope}"
        args = [mode]
        if self.target is not None:
            args.append(self.target)
            if self.expected_id is not None:
                args.append(str(self.expected_id))
        return args + list(self.flags)


def parse_args(argv) -> OptionSet:
    if not argv:
        raise UsageError("No arguments have been specified.")
    mode = argv[0]
    scope = "both"
    if mode.startswith("--stats="):
        scope = mode.split("=", 1)[1]
        if scope not in STATS_CHOICES:
            raise UsageError(f"Unrecognized statistics scope: {scope}")
        mode = "--stats"
    if mode not in MODES:
        raise UsageError(f"Unrecognized option: {argv[0]}")
    opts = OptionSet(mode, stats_scope=scope)
    unknown = []
    for tok in argv[1:]:
        if tok in ALL_FLAGS:
            opts.flags.append(tok)
        else:
            unknown.append(tok)
    if len(unknown) > 2:
        raise UsageError(f"Unrecognized options found: {unknown}")
    if unknown:
        opts.target = unknown[0]
    if len(unknown) == 2:
        try:
            opts.expected_id = int(unknown[1])
        except ValueError:
            opts.warnings.append(
                f"could not parse expected speaker ID ({unknown[1]!r}), ignoring...")
    if mode in NEEDS_TARGET and opts.target is None:
        raise UsageError(f"{mode} requires a file or directory argument")
    return opts


def build_config(opts: OptionSet) -> PipelineConfig:
    for f in opts.flags:
        if f in NOT_IMPLEMENTED:
            raise NotImplementedError(f"{f}: not implemented")
    method = opts.first(PREPROCESSORS) or Method.NORMALIZE
    extractor = opts.first(EXTRACTORS) or Extractor.FFT
    kind, metric = opts.first(CLASSIFIERS) or (ClassifierKind.DISTANCE, Metric.EUCLIDEAN)
    return PipelineConfig(
        loader=opts.first(LOADERS) or Loader.WAV,
        prep=PreprocessConfig(method=method, remove_silence=opts.has("-silence")),
        feat=FeatureConfig(extractor=extractor),
        classifier=ClassifierConfig(kind=kind, metric=metric),
        spectrogram=opts.has("-spectrogram"),
        wave_graph=opts.has("-graph"),
    )


def stats_key(opts: OptionSet) -> str:
    return config_string(opts.flags or DEFAULT_FLAGS)


def format_duration(ms: int) -> str:
    days, rest = divmod(ms, 86_400_000)
    hours, rest = divmod(rest, 3_600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"{days}d:{hours}h:{minutes}m:{seconds}s:{millis}ms:{ms}ms"


def format_identification(ident: Identification, config: str, db: storage.SpeakerDb,
                          now: datetime | None = None) -> str:
    now = now or datetime.now().astimezone()
    lines = [
        f"                 File: {ident.path}",
        f"               Config: {config}",
        f"      Processing time: {format_duration(ident.elapsed_ms)}",
        f"         Speaker's ID: {ident.first}",
        f"   Speaker identified: {db.name(ident.first)}",
    ]
    if ident.expected is not None:
        lines += [
            f"Expected Speaker's ID: {ident.expected}",
            f"     Expected Speaker: {db.name(ident.expected)}",
        ]
    lines += [
        f"       Second Best ID: {ident.second}",
        f"     Second Best Name: {db.name(ident.second)}",
        f"            Date/time: {now.strftime('%a %b %d %H:%M:%S %Z %Y')}",
        SEPARATOR,
    ]
    return "\n".join(lines) + "\n"


class App:
    def __init__(self, workdir, out, err):
        self.workdir = Path(workdir)
        self.out = out
        self.err = err

    @property
    def config_stats_path(self) -> Path:
        return self.workdir / f"{CONFIG_PREFIX}{SPEAKERS_FILE}.stats"

    @property
    def speaker_stats_path(self) -> Path:
        return self.workdir / f"{SPEAKER_PREFIX}{SPEAKERS_FILE}.stats"

    def speakers(self) -> storage.SpeakerDb:
        path = self.workdir / SPEAKERS_FILE
        if not path.is_file():
            raise FileNotFoundError(f'Error opening speaker DB: "{path}"')
        return storage.parse_speaker_db(path)

    def print(self, text="", end="\n"):
        self.out.write(text + end)

    def run(self, opts: OptionSet) -> int:
        mode = opts.mode
        if mode in ("--help", "-h"):
            self.print(USAGE, end="")
            return EXIT_OK
        if mode == "--version":
            self.print(f"Text-Independent Speaker Identification Application, v.{__version__}")
            return EXIT_OK
        if mode == "--gui":
            raise NotImplementedError("--gui: not implemented")
        if mode == "--reset":
            storage.dump_stats(storage.StatsDb(), self.config_stats_path)
            storage.dump_stats(storage.StatsDb(), self.speaker_stats_path)
            self.print("SpeakerIdentApp: Statistics has been reset.")
            return EXIT_OK
        if mode in ("--stats", "--best-score"):
            return self.show_stats(opts.stats_scope, best_only=mode == "--best-score")

        config = build_config(opts)
        pipeline = Pipeline(config, self.workdir)
        db = self.speakers()
        if mode == "--single-train":
            self.train(pipeline, db, [Path(opts.target)])
            self.print(f'Done training with file "{opts.target}".')
        elif mode == "--train":
            self.train(pipeline, db, sample_files(opts.target))
            self.print(f'Done training on folder "{opts.target}".')
        elif mode == "--ident":
            expected = opts.expected_id
            if expected is None:
                expected = db.id_by_filename(opts.target, training=False)
            self.ident(pipeline, db, opts, Path(opts.target), expected)
        else:
            self.batch(pipeline, db, opts)
        return EXIT_OK

    def train(self, pipeline: Pipeline, db: storage.SpeakerDb, files) -> None:
        items = []
        for f in files:
            sid = db.id_by_filename(str(f), training=True)
            if sid is None:
                self.print(f'No speaker found for "{f}" for training.')
            else:
                items.append((f, sid))
        if items:
            pipeline.train_many(items)

    def _record(self, ident: Identification, key: str, db: storage.SpeakerDb) -> None:
        per_config = storage.restore_stats(self.config_stats_path)
        per_speaker = storage.restore_stats(self.speaker_stats_path)
        first_ok = ident.first == ident.expected
        second_ok = ident.second == ident.expected
        per_config.record(key, first_ok, second_ok)
        per_speaker.record(db.name(ident.expected), first_ok, second_ok)
        storage.dump_stats(per_config, self.config_stats_path)
        storage.dump_stats(per_speaker, self.speaker_stats_path)

    def ident(self, pipeline, db, opts, path, expected) -> None:
        ident = pipeline.identify(path, expected)
        key = stats_key(opts)
        if expected is not None:
            self._record(ident, key, db)
        self.print(format_identification(ident, key, db), end="")

    def batch(self, pipeline, db, opts) -> None:
        key = stats_key(opts)
        per_config = storage.restore_stats(self.config_stats_path)
        per_speaker = storage.restore_stats(self.speaker_stats_path)

        def emit(ident):
            self.print(format_identification(ident, key, db), end="")
            if ident.expected is not None:
                # persist after each identification so an interrupted batch keeps its counts
                storage.dump_stats(per_config, self.config_stats_path)
                storage.dump_stats(per_speaker, self.speaker_stats_path)

        summary = batch_recognize(pipeline, opts.target, db, per_config, per_speaker, key,
                                  emit, expected=opts.expected_id)
        for exc in summary.errors:
            self.err.write(f"SpeakerIdentApp: {exc}\n")

    def show_stats(self, scope: str, best_only: bool) -> int:
        paths = []
        if scope in ("per-config", "both"):
            paths.append(self.config_stats_path)
        if scope in ("per-speaker", "both"):
            paths.append(self.speaker_stats_path)
        for p in paths:
            db = storage.restore_stats(p)
            if not db.entries:
                self.err.write("SpeakerIdentDb: no statistics available. "
                               "Did you run the recognizer yet?\n")
                continue
            self.print(db.format(best_only), end="")
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
    for w in opts.warnings:
        err.write(f"SpeakerIdentApp: WARNING: {w}\n")
    if opts.has("-debug"):
        logging.basicConfig(level=logging.DEBUG)
    app = App(workdir or Path.cwd(), out, err)
    try:
        return app.run(opts)
    except NotImplementedError as exc:
        err.write(f"SpeakerIdentApp: {exc}\n")
        return EXIT_RUNTIME
    except (PipelineError, OSError, ValueError) as exc:
        err.write(f"SpeakerIdentApp: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
