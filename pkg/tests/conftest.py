import io
from pathlib import Path

import numpy as np
import pytest

from patrec.audio import AudioFormat, Sample, write_wav

RATE = 8000

# two-tone "voices"; each speaker owns a distinct pair of partials
VOICES = {
    1: ("Alice", (220.0, 1250.0)),
    2: ("Bob", (330.0, 1900.0)),
    3: ("Carol", (510.0, 2600.0)),
    4: ("Dave", (740.0, 3300.0)),
}

BASIC_GRAMMAR = """\
<S>            ::= 0.8 <NP> <VP>
<S>            ::= 0.2 <V> <NP>
<NP>        ::= 1.0 <DET> <NOMINAL>
<NOMINAL>    ::= 1.0 <ADJ> <NOMINAL>
<VP>        ::= 1.0 <V> <NP>
<DET>         ::= 0.5 the
<DET>         ::= 0.4 a
<DET>         ::= 0.1 my
<NOMINAL>    ::= 0.4 rabbit
<NOMINAL>    ::= 0.2 smile
<NOMINAL>    ::= 0.4 cat
<V>            ::= 0.8 has
<V>            ::= 0.2 eats
<ADJ>        ::= 1.0 white
"""


def voice(tones, rng, duration=1.0, noise=0.0):
    t = np.arange(int(duration * RATE)) / RATE
    lo, hi = tones
    phase = rng.uniform(0, 2 * np.pi, size=2)
    x = 0.5 * np.sin(2 * np.pi * lo * t + phase[0]) + 0.3 * np.sin(2 * np.pi * hi * t + phase[1])
    x *= rng.uniform(0.8, 1.0)
    if noise:
        x = x + rng.normal(0.0, noise * np.max(np.abs(x)), size=x.size)
    return np.clip(x, -1.0, 1.0)


def make_speaker_corpus(root: Path, seed: int = 7, n_train: int = 3) -> dict:
    """Write training/testing WAVs and speakers.txt under ``root``."""
    rng = np.random.default_rng(seed)
    train_dir = root / "training-samples"
    test_dir = root / "testing-samples"
    train_dir.mkdir(parents=True, exist_ok=True)
    test_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    fmt = AudioFormat(sample_rate=RATE)
    for sid, (name, tones) in VOICES.items():
        train_names = []
        for k in range(n_train):
            fname = f"{name.lower()}{k + 1}.wav"
            write_wav(Sample(voice(tones, rng), fmt), train_dir / fname)
            train_names.append(fname)
        test_name = f"{name.lower()}-test.wav"
        write_wav(Sample(voice(tones, rng, noise=0.01), fmt), test_dir / test_name)
        lines.append(f"{sid},{name},{'|'.join(train_names)},{test_name}")
    (root / "speakers.txt").write_text("\n".join(lines) + "\n")
    return {"training": train_dir, "testing": test_dir}


@pytest.fixture
def speaker_corpus(tmp_path):
    dirs = make_speaker_corpus(tmp_path)
    dirs["root"] = tmp_path
    return dirs


@pytest.fixture
def basic_grammar():
    from patrec.nlp.cyk import compile_grammar
    return compile_grammar(BASIC_GRAMMAR)


def run_cli(main, argv, workdir, stdin_text=None):
    out, err = io.StringIO(), io.StringIO()
    kwargs = {"workdir": workdir, "stdout": out, "stderr": err}
    if stdin_text is not None:
        kwargs["stdin"] = io.StringIO(stdin_text)
    code = main(argv, **kwargs)
    return code, out.getvalue(), err.getvalue()
