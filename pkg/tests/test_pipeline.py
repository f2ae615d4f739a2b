import numpy as np
import pytest

from patrec.audio import Sample, write_wav
from patrec.classify import Metric
from patrec.features import Extractor, FeatureConfig, FeatureVector
from patrec.pipeline import (ClassifierConfig, ClassifierKind, Loader, Pipeline, PipelineConfig,
                             PipelineError, batch_recognize, config_string, sample_files)
from patrec.preprocess import Method, PreprocessConfig
from patrec.storage import StatsDb, parse_speaker_db

from conftest import VOICES


def cfg(metric="eucl", kind="distance", extractor=Extractor.FFT, method=Method.NORMALIZE, **kw):
    return PipelineConfig(prep=PreprocessConfig(method),
                          feat=FeatureConfig(extractor),
                          classifier=ClassifierConfig(kind, metric, **kw))


def train_corpus(pipe, corpus):
    db = parse_speaker_db(corpus["root"] / "speakers.txt")
    items = [(corpus["training"] / f, sid) for sid, e in db.entries.items() for f in e.training]
    return pipe.train_many(items), db


def tone_file(path, seed=0):
    write_wav(Sample(np.random.default_rng(seed).uniform(-0.5, 0.5, 4000)), path)
    return path


def test_one_sample_one_cluster(tmp_path):
    p = Pipeline(cfg(), tmp_path)
    ts = p.train(tone_file(tmp_path / "a.wav"), 1)
    assert list(ts.clusters) == [1] and ts.clusters[1].count == 1
    assert p.training_set_path.name == "training-set.dummy-normalize.fft.bin"
    assert p.training_set_path.exists()


def test_two_samples_average(tmp_path):
    p = Pipeline(cfg(), tmp_path)
    a, b = tone_file(tmp_path / "a.wav", 1), tone_file(tmp_path / "b.wav", 2)
    ts = p.train_many([(a, 1), (b, 1)])
    want = (p.features(a).values + p.features(b).values) / 2
    np.testing.assert_allclose(ts.clusters[1].mean, want, atol=1e-12)
    assert ts.clusters[1].count == 2


def test_training_twice_on_same_file(tmp_path):
    p = Pipeline(cfg(), tmp_path)
    a = tone_file(tmp_path / "a.wav")
    p.train(a, 1)
    ts = p.train(a, 1)
    np.testing.assert_allclose(ts.clusters[1].mean, p.features(a).values, atol=1e-12)
    assert ts.clusters[1].count == 2


def test_identical_file_recognized_at_zero(tmp_path):
    p = Pipeline(cfg(), tmp_path)
    a = tone_file(tmp_path / "a.wav")
    p.train(a, 5)
    p.train(tone_file(tmp_path / "b.wav", 9), 6)
    rs = p.recognize(a)
    assert rs.closest.subject_id == 5 and rs.closest.score == 0.0
    assert rs.second_closest.subject_id == 6


@pytest.mark.parametrize("metric", ["eucl", "cheb", "mink"])
def test_cluster_mean_dominates(tmp_path, metric):
    p = Pipeline(cfg(metric), tmp_path)
    for sid in (1, 2, 3):
        p.train(tone_file(tmp_path / f"{sid}.wav", sid), sid)
    for sid, c in p.load_training_set().clusters.items():
        best = p.classify(FeatureVector(c.mean, Extractor.FFT)).closest
        assert best.subject_id == sid and best.score == 0.0


def test_recognize_without_training(tmp_path):
    with pytest.raises(PipelineError, match="train first") as exc:
        Pipeline(cfg(), tmp_path).recognize(tone_file(tmp_path / "a.wav"))
    assert exc.value.stage == "classify"


def test_feature_length_mismatch(tmp_path):
    a = tone_file(tmp_path / "a.wav")
    Pipeline(cfg(), tmp_path).train(a, 1)
    other = PipelineConfig(prep=PreprocessConfig(Method.NORMALIZE),
                           feat=FeatureConfig(Extractor.FFT, fft_window=256))
    with pytest.raises(PipelineError, match="does not match"):
        Pipeline(other, tmp_path).recognize(a)


def test_stage_labels(tmp_path):
    p = Pipeline(cfg(), tmp_path)
    with pytest.raises(PipelineError) as exc:
        p.recognize(tmp_path / "missing.wav")
    assert exc.value.stage == "load"
    write_wav(Sample(np.zeros(4000)), tmp_path / "silent.wav")
    lpc = Pipeline(cfg(extractor=Extractor.LPC), tmp_path)
    with pytest.raises(PipelineError) as exc:
        lpc.train(tmp_path / "silent.wav", 1)
    assert exc.value.stage == "extract"


def test_negative_subject(tmp_path):
    with pytest.raises(ValueError):
        Pipeline(cfg(), tmp_path).train(tone_file(tmp_path / "a.wav"), -1)


def test_sine_and_text_loaders(tmp_path):
    p = Pipeline(PipelineConfig(loader=Loader.SINE), tmp_path)
    p.train(tmp_path / "440.sine", 1)
    p.train(tmp_path / "1500.sine", 2)
    assert p.recognize(tmp_path / "1500.sine").closest.subject_id == 2
    (tmp_path / "t.txt").write_bytes(bytes(range(0, 256)) * 20)
    t = Pipeline(PipelineConfig(loader=Loader.TEXT), tmp_path / "t")
    (tmp_path / "t").mkdir()
    t.train(tmp_path / "t.txt", 3)
    assert t.recognize(tmp_path / "t.txt").closest.subject_id == 3


def test_config_string():
    assert config_string(["-norm", "-fft", "-eucl"]) == "-norm -fft -eucl "
    assert config_string([]) == ""
    assert config_string(["-b", "-a"]) == "-b -a "


def test_sample_files(tmp_path):
    assert sample_files(tmp_path) == []
    (tmp_path / "README.txt").write_text("x")
    assert sample_files(tmp_path) == []
    tone_file(tmp_path / "B.WAV")
    tone_file(tmp_path / "a.wav")
    assert [p.name for p in sample_files(tmp_path)] == ["B.WAV", "a.wav"]
    with pytest.raises(NotADirectoryError):
        sample_files(tmp_path / "nope")


@pytest.mark.parametrize("metric", ["eucl", "cheb", "cos"])
def test_end_to_end_corpus(speaker_corpus, tmp_path, metric):
    work = tmp_path / "work"
    work.mkdir()
    p = Pipeline(cfg(metric), work)
    _, db = train_corpus(p, speaker_corpus)
    per_config, per_speaker = StatsDb(), StatsDb()
    summary = batch_recognize(p, speaker_corpus["testing"], db, per_config, per_speaker, "k")
    assert summary.processed == summary.with_expected == len(VOICES)
    assert summary.first_good == len(VOICES)
    assert per_config.entries["k"].first.total == len(VOICES)
    assert set(per_speaker.entries) == {name for name, _ in VOICES.values()}


def test_batch_unknown_file_has_no_stats(speaker_corpus, tmp_path):
    p = Pipeline(cfg(), tmp_path)
    _, db = train_corpus(p, speaker_corpus)
    d = tmp_path / "extra"
    d.mkdir()
    tone_file(d / "stranger.wav")
    write_wav(Sample(np.zeros(10)), d / "broken.wav")
    (d / "notes.txt").write_text("skip me")
    per_config, per_speaker = StatsDb(), StatsDb()
    seen = []
    s = batch_recognize(p, d, db, per_config, per_speaker, "k", on_result=seen.append)
    assert s.processed == 2 and s.with_expected == 0 and not s.errors
    assert per_config.entries == {}
    assert len(seen) == 2


def test_batch_logs_errors_and_continues(speaker_corpus, tmp_path):
    p = Pipeline(cfg(extractor=Extractor.LPC), tmp_path)
    _, db = train_corpus(p, speaker_corpus)
    d = tmp_path / "mixed"
    d.mkdir()
    write_wav(Sample(np.zeros(4000)), d / "a-silent.wav")
    tone_file(d / "b-noise.wav")
    s = batch_recognize(p, d, db, StatsDb(), StatsDb(), "k")
    assert s.processed == 1 and len(s.errors) == 1 and s.errors[0].stage == "extract"


def test_neural_pipeline(speaker_corpus, tmp_path):
    c = cfg(kind=ClassifierKind.NEURAL, epochs=500, min_error=0.01)
    p = Pipeline(c, tmp_path)
    _, db = train_corpus(p, speaker_corpus)
    assert p.network_path.exists()
    s = batch_recognize(p, speaker_corpus["testing"], db, StatsDb(), StatsDb(), "k")
    assert s.processed == len(VOICES)
    assert s.first_good >= 3


def test_neural_needs_network(speaker_corpus, tmp_path):
    _, db = train_corpus(Pipeline(cfg(), tmp_path), speaker_corpus)
    nn = Pipeline(cfg(kind=ClassifierKind.NEURAL), tmp_path)
    with pytest.raises(PipelineError, match="network"):
        nn.recognize(speaker_corpus["testing"] / "alice-test.wav")


def test_random_classifier_is_deterministic(speaker_corpus, tmp_path):
    p = Pipeline(cfg(kind=ClassifierKind.RANDOM), tmp_path)
    train_corpus(p, speaker_corpus)
    f = speaker_corpus["testing"] / "bob-test.wav"
    assert p.recognize(f).ids == p.recognize(f).ids
    assert set(p.recognize(f).ids) <= set(VOICES)


def test_determinism_across_runs(speaker_corpus, tmp_path):
    results = []
    for run in ("a", "b"):
        work = tmp_path / run
        work.mkdir()
        p = Pipeline(cfg("mah"), work)
        train_corpus(p, speaker_corpus)
        results.append([(r.score, r.subject_id) for r in
                        p.recognize(speaker_corpus["testing"] / "carol-test.wav")])
    assert results[0] == results[1]


def test_dump_flags_write_files(tmp_path):
    c = PipelineConfig(spectrogram=True, wave_graph=True)
    p = Pipeline(c, tmp_path)
    p.train(tone_file(tmp_path / "a.wav"), 1)
    names = {f.name for f in tmp_path.iterdir()}
    for suffix in ("wave.tsv", "wave.png", "features.tsv", "features.png",
                   "spectrogram.ppm", "spectrogram.png"):
        assert f"a.dummy-normalize.fft.{suffix}" in names


def test_classifier_key():
    assert ClassifierConfig(metric=Metric.COSINE).key == "cos"
    assert ClassifierConfig(ClassifierKind.NEURAL).key == "nn"
