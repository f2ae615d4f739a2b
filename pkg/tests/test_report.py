import numpy as np
import pytest

from patrec.audio import Sample, generate_sine
from patrec.report import (emit_feature_graph, emit_spectrogram, emit_wave_graph, plot_features,
                           plot_spectrogram, plot_wave, plot_zipf, read_ppm, spectrogram_frames,
                           spectrogram_pixels)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_wave_graph_rows(tmp_path):
    emit_wave_graph(Sample([0.5]), tmp_path / "w.tsv")
    assert (tmp_path / "w.tsv").read_bytes() == b"0\t0.5\n"
    emit_wave_graph(Sample([]), tmp_path / "e.tsv")
    assert (tmp_path / "e.tsv").read_text() == ""
    s = Sample(np.linspace(-1, 1, 37))
    emit_wave_graph(s, tmp_path / "n.tsv")
    rows = (tmp_path / "n.tsv").read_text().splitlines()
    assert len(rows) == 37
    assert [float(r.split("\t")[1]) for r in rows] == s.amplitudes.tolist()


def test_feature_graph(tmp_path):
    emit_feature_graph([1.0, 2.5], tmp_path / "f.tsv")
    assert (tmp_path / "f.tsv").read_text() == "0\t1.0\n1\t2.5\n"


def test_zero_frame_is_white_and_peak_is_black():
    assert (spectrogram_pixels(np.zeros((1, 4))) == 255).all()
    px = spectrogram_pixels(np.array([[0.0, 2.0, 1.0]]))
    # highest bin drawn on the top row
    assert px[:, 0].tolist() == [128, 0, 255]


def test_spectrogram_file(tmp_path):
    frames = spectrogram_frames(generate_sine(1000, 0.1))
    assert frames.shape == (800 // 64 - 1, 64)
    emit_spectrogram(frames, tmp_path / "s.ppm")
    data = (tmp_path / "s.ppm").read_bytes()
    assert data.startswith(f"P6\n{frames.shape[0]} 64\n255\n".encode())
    img = read_ppm(tmp_path / "s.ppm")
    assert img.shape == (64, frames.shape[0], 3)
    assert (img[..., 0] == img[..., 1]).all() and (img[..., 1] == img[..., 2]).all()
    # 1000 Hz sits in bin 16 of 64; row 0 is the top (highest) bin
    assert int(np.argmin(img[:, 0, 0])) == 63 - 16


def test_empty_spectrogram():
    assert spectrogram_frames(Sample(np.zeros(50))).shape == (0, 64)
    with pytest.raises(ValueError):
        spectrogram_pixels(np.empty((0, 64)))


def test_read_ppm_rejects_other_formats(tmp_path):
    (tmp_path / "x.ppm").write_bytes(b"P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(ValueError):
        read_ppm(tmp_path / "x.ppm")


def test_plots_are_png(tmp_path):
    s = generate_sine(440, 0.05)
    plot_wave(s, tmp_path / "w.png")
    plot_features(np.arange(10.0), tmp_path / "f.png")
    plot_spectrogram(spectrogram_frames(s), tmp_path / "s.png")
    plot_zipf([1, 2, 3], [10, 5, 3], tmp_path / "z.png")
    plot_zipf([1, 2], [2, 1], tmp_path / "zl.png", log_scale=False)
    for name in ("w", "f", "s", "z", "zl"):
        assert (tmp_path / f"{name}.png").read_bytes()[:8] == PNG_MAGIC
