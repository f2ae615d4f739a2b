import re

import pytest

from patrec import storage
from patrec.cli import lang_ident, parse, speaker_ident, zipf
from patrec.pipeline import Pipeline

from conftest import BASIC_GRAMMAR, VOICES, run_cli

FLAG_RE = re.compile(r"(?<!\S)-{1,2}[a-z][\w-]*")


def speaker(corpus, *args):
    return run_cli(speaker_ident.main, list(args), corpus["root"])


def trained(corpus, *flags):
    code, out, err = speaker(corpus, "--train", str(corpus["training"]), *flags)
    assert code == 0, err
    return out


# -- speaker-ident ---------------------------------------------------------------

def test_speaker_no_args(tmp_path):
    code, out, err = run_cli(speaker_ident.main, [], tmp_path)
    assert code == 1
    assert "No arguments have been specified." in err
    assert out.startswith("Usage:")


def test_speaker_unknown_mode_and_extra_args(tmp_path):
    assert run_cli(speaker_ident.main, ["--frobnicate"], tmp_path)[0] == 1
    assert run_cli(speaker_ident.main, ["--ident", "a", "1", "b"], tmp_path)[0] == 1
    assert run_cli(speaker_ident.main, ["--ident"], tmp_path)[0] == 1
    assert run_cli(speaker_ident.main, ["--stats=nobody"], tmp_path)[0] == 1


def test_speaker_help_lists_each_flag_once(tmp_path):
    code, out, _ = run_cli(speaker_ident.main, ["--help"], tmp_path)
    assert code == 0
    tokens = FLAG_RE.findall(out)
    for flag in sorted(speaker_ident.ALL_FLAGS) + list(speaker_ident.MODES):
        assert tokens.count(flag) == 1, flag


def test_speaker_version(tmp_path):
    code, out, _ = run_cli(speaker_ident.main, ["--version"], tmp_path)
    assert code == 0 and "v." in out


@pytest.mark.parametrize("flag", ["-noise", "-f0", "-segm", "-cepstral", "-markov", "-zipf",
                                  "-lowcfe", "-bandstopcfe"])
def test_speaker_not_implemented(speaker_corpus, flag):
    code, _, err = speaker(speaker_corpus, "--train", str(speaker_corpus["training"]), flag)
    assert code == 2 and "not implemented" in err


def test_speaker_gui_not_implemented(tmp_path):
    code, _, err = run_cli(speaker_ident.main, ["--gui"], tmp_path)
    assert code == 2 and "not implemented" in err


def test_speaker_missing_db(tmp_path):
    code, _, err = run_cli(speaker_ident.main, ["--ident", str(tmp_path / "a.wav")], tmp_path)
    assert code == 2 and "speaker DB" in err


def test_speaker_train_ident_block(speaker_corpus):
    assert "Done training on folder" in trained(speaker_corpus, "-norm", "-fft", "-eucl")
    target = speaker_corpus["testing"] / "carol-test.wav"
    code, out, err = speaker(speaker_corpus, "--ident", str(target), "-norm", "-fft", "-eucl")
    assert code == 0, err
    fields = dict(re.findall(r"^\s*([^:\n]+): (.*)$", out, re.M))
    assert fields["File"] == str(target)
    assert fields["Config"] == "-norm -fft -eucl "
    assert fields["Speaker's ID"] == "3"
    assert fields["Speaker identified"] == "Carol"
    assert fields["Expected Speaker's ID"] == "3"
    assert fields["Second Best ID"] in {"1", "2", "4"}
    assert re.fullmatch(r"\d+d:\d+h:\d+m:\d+s:\d+ms:\d+ms", fields["Processing time"])
    assert "Date/time" in fields
    assert out.rstrip().endswith(speaker_ident.SEPARATOR)


def test_speaker_ident_expected_id_argument(speaker_corpus, tmp_path):
    trained(speaker_corpus)
    # a copy outside the db gets its expected id from the command line
    copy = tmp_path / "mystery.wav"
    copy.write_bytes((speaker_corpus["testing"] / "dave-test.wav").read_bytes())
    code, out, _ = speaker(speaker_corpus, "--ident", str(copy), "4")
    assert code == 0 and "Expected Speaker: Dave" in out
    code, out, err = speaker(speaker_corpus, "--ident", str(copy), "four")
    assert code == 0 and "WARNING" in err and "Expected" not in out


def test_speaker_batch_stats_and_reset(speaker_corpus):
    trained(speaker_corpus, "-raw", "-fft", "-cheb")
    code, out, _ = speaker(speaker_corpus, "--batch-ident", str(speaker_corpus["testing"]),
                           "-raw", "-fft", "-cheb")
    assert code == 0 and out.count(speaker_ident.SEPARATOR) == len(VOICES)
    code, out, _ = speaker(speaker_corpus, "--stats")
    lines = out.splitlines()
    assert lines[0] == "guess,run,config,good,bad,%"
    assert "1st,1,-raw -fft -cheb ,4,0,100.00" in lines
    assert any(line.startswith("1st,") and ",Alice,1,0," in line for line in lines)
    code, out, _ = speaker(speaker_corpus, "--stats=per-config")
    assert "Alice" not in out
    code, out, _ = speaker(speaker_corpus, "--best-score")
    assert out.splitlines()[0] == "100.00"
    code, out, _ = speaker(speaker_corpus, "--reset")
    assert out.strip() == "SpeakerIdentApp: Statistics has been reset."
    root = speaker_corpus["root"]
    assert storage.restore_stats(root / "config.speakers.txt.stats").entries == {}
    assert storage.restore_stats(root / "speaker.speakers.txt.stats").entries == {}
    code, out, err = speaker(speaker_corpus, "--stats")
    assert "no statistics available" in err


def test_speaker_single_train(speaker_corpus):
    f = speaker_corpus["training"] / "bob2.wav"
    code, out, _ = speaker(speaker_corpus, "--single-train", str(f))
    assert code == 0 and "Done training with file" in out
    code, out, _ = speaker(speaker_corpus, "--single-train", str(speaker_corpus["testing"] / "bob-test.wav"))
    assert "No speaker found" in out


def test_speaker_ident_untrained(speaker_corpus):
    code, _, err = speaker(speaker_corpus, "--ident", str(speaker_corpus["testing"] / "bob-test.wav"))
    assert code == 2 and "train first" in err


@pytest.mark.parametrize("flags", [["-norm", "-fft", "-eucl"], ["-low", "-lpc", "-mah"],
                                   ["-raw", "-aggr", "-nn", "-silence"], ["-wav", "-endp", "-minmax", "-hamming"],
                                   ["-text", "-band", "-randfe", "-randcl", "-graph"]])
def test_option_set_round_trip(flags):
    for argv in (["--ident", "x.wav", "3"] + flags, ["--batch-ident", "d"] + flags,
                 ["--stats=per-speaker"], ["--reset"]):
        opts = speaker_ident.parse_args(argv)
        assert speaker_ident.parse_args(opts.to_args()) == opts


def test_batch_order_independent(speaker_corpus, monkeypatch):
    from patrec import pipeline
    trained(speaker_corpus, "-norm", "-lpc", "-eucl")
    db = storage.parse_speaker_db(speaker_corpus["root"] / "speakers.txt")
    pipe = Pipeline(speaker_ident.build_config(speaker_ident.parse_args(
        ["--batch-ident", "d", "-norm", "-lpc", "-eucl"])), speaker_corpus["root"])
    results = []
    original = pipeline.sample_files
    for order in (lambda xs: xs, lambda xs: xs[::-1]):
        monkeypatch.setattr(pipeline, "sample_files", lambda d, o=order: o(original(d)))
        a, b = storage.StatsDb(), storage.StatsDb()
        pipeline.batch_recognize(pipe, speaker_corpus["testing"], db, a, b, "k")
        results.append((a.to_payload(), b.to_payload()))
    assert results[0] == results[1]


def test_dump_flags_through_cli(speaker_corpus):
    trained(speaker_corpus, "-spectrogram", "-graph")
    names = [p.name for p in speaker_corpus["root"].iterdir()]
    assert any(n.endswith(".spectrogram.ppm") for n in names)
    assert any(n.endswith(".wave.tsv") for n in names)
    assert any(n.endswith(".features.png") for n in names)


# -- lang-ident ------------------------------------------------------------------

EN = "the quick brown fox jumps over the lazy dog and then the dog sleeps " * 20
FR = "le renard brun saute par dessus le chien paresseux et puis le chien dort " * 20


def lang(tmp_path, *args, stdin=None):
    return run_cli(lang_ident.main, list(args), tmp_path, stdin)


def train_langs(tmp_path, *flags):
    (tmp_path / "en.txt").write_text(EN)
    (tmp_path / "fr.txt").write_text(FR)
    for tag in ("en", "fr"):
        code, _, err = lang(tmp_path, "--train", *flags, tag, str(tmp_path / f"{tag}.txt"))
        assert code == 0, err


def test_lang_usage(tmp_path):
    code, out, err = lang(tmp_path)
    assert code == 1 and "Usage:" in out
    code, _, err = lang(tmp_path, "--train", "-bigram", "en", "x.txt")
    assert code == 1 and "estimator" in err
    code, _, err = lang(tmp_path, "--train", "-mle", "en", "x.txt")
    assert code == 1 and "n-gram" in err
    assert lang(tmp_path, "--ident", "-mle", "-bigram", "foo")[0] == 1
    assert lang(tmp_path, "--ident", "-mle", "-bigram", "-bogus", "foo", "x")[0] == 1
    assert lang(tmp_path, "--ident", "-mle", "-unigram", "-bigram", "foo", "x")[0] == 1
    assert lang(tmp_path, "--help")[0] == 0


def test_lang_help_lists_each_flag_once(tmp_path):
    out = lang(tmp_path, "--help")[1]
    tokens = FLAG_RE.findall(out)
    every = list(lang_ident.ORDERS) + list(lang_ident.ESTIMATORS) + list(lang_ident.MODES) \
        + ["-interactive", "-char"]
    for flag in every:
        assert tokens.count(flag) == 1, flag


def test_lang_single_model(tmp_path):
    (tmp_path / "en.txt").write_text(EN)
    lang(tmp_path, "--train", "-bigram", "-add-one", "en", str(tmp_path / "en.txt"))
    (tmp_path / "q.txt").write_text("anything at all\n")
    code, out, _ = lang(tmp_path, "--ident", "-bigram", "-add-one", "foo", str(tmp_path / "q.txt"))
    assert code == 0 and out == "Language identified: [en]\n"
    assert (tmp_path / "lang.en.restricted.2gram.bin").exists()


@pytest.mark.parametrize("est", ["-add-one", "-add-delta", "-witten-bell", "-good-turing"])
def test_lang_file_ident(tmp_path, est):
    train_langs(tmp_path, "-trigram", est)
    (tmp_path / "q.txt").write_text("the lazy dog sleeps\n\nle chien dort par dessus\n")
    code, out, _ = lang(tmp_path, "--ident", "-trigram", est, "foo", str(tmp_path / "q.txt"))
    assert code == 0
    assert out.splitlines() == ["Language identified: [en]", "Language identified: [fr]"]


def test_lang_interactive(tmp_path):
    train_langs(tmp_path, "-bigram", "-witten-bell")
    code, out, _ = lang(tmp_path, "--ident", "-interactive", "-bigram", "-witten-bell", "foo",
                        stdin="the quick brown fox\nle renard brun\n")
    assert code == 0 and out.splitlines() == ["Language identified: [en]",
                                              "Language identified: [fr]"]


def test_lang_unidentifiable_line(tmp_path):
    train_langs(tmp_path, "-unigram", "-mle")
    code, out, err = lang(tmp_path, "--ident", "-interactive", "-unigram", "-mle", "foo",
                          stdin="!!!\nthe dog\n")
    assert code == 0 and out == "Language identified: [en]\n" and "WARNING" in err


def test_lang_no_models(tmp_path):
    code, _, err = lang(tmp_path, "--ident", "-interactive", "-unigram", "-mle", "foo", stdin="x\n")
    assert code == 2 and "no trained" in err


def test_lang_training_accumulates(tmp_path):
    (tmp_path / "a.txt").write_text("ab")
    for _ in range(2):
        lang(tmp_path, "--train", "-unigram", "-mle", "xx", str(tmp_path / "a.txt"))
    from patrec.nlp.ngram import load_model
    m = load_model(tmp_path / "lang.xx.restricted.1gram.bin")
    assert m.count("", "a") == 2


def test_lang_missing_corpus(tmp_path):
    code, _, err = lang(tmp_path, "--train", "-unigram", "-mle", "xx", str(tmp_path / "none.txt"))
    assert code == 2


# -- zipf ------------------------------------------------------------------------

def test_zipf_usage(tmp_path):
    code, out, _ = run_cli(zipf.main, [], tmp_path)
    assert code == 1 and "Usage:" in out
    assert run_cli(zipf.main, ["--bogus", "x"], tmp_path)[0] == 1
    assert run_cli(zipf.main, ["a", "b"], tmp_path)[0] == 1


def test_zipf_help_lists_each_flag_once(tmp_path):
    out = run_cli(zipf.main, ["--help"], tmp_path)[1]
    tokens = FLAG_RE.findall(out)
    for flag in zipf.FLAGS:
        assert tokens.count(flag) == 1, flag


def test_zipf_analyze_writes_outputs(tmp_path):
    corpus = tmp_path / "tiny.txt"
    corpus.write_text("the the the cat cat dog")
    code, out, _ = run_cli(zipf.main, [str(corpus)], tmp_path)
    assert code == 0
    assert "Frequency of frequencies:" in out
    from patrec.nlp.zipf import to_csv, zipf_analyze
    assert (tmp_path / "tiny.txt.csv").read_text() == to_csv(zipf_analyze(corpus.read_text()))
    assert (tmp_path / "tiny.txt.png").read_bytes()[:4] == b"\x89PNG"
    code, out, _ = run_cli(zipf.main, ["--nolog", "--case", str(corpus)], tmp_path)
    assert (tmp_path / "tiny.txt--case--nolog.csv").read_text().splitlines() == \
        ["rank,frequency", "1,3", "2,2", "3,1"]


def test_zipf_snapshots(tmp_path):
    corpus = tmp_path / "big.txt"
    corpus.write_text("alpha beta gamma beta " * 300)
    out = run_cli(zipf.main, [str(corpus)], tmp_path)[1]
    assert "Top 3 words after 1000 words:" in out
    assert "1\t500\tbeta" in out


def test_zipf_list(tmp_path):
    corpus = tmp_path / "c.txt"
    corpus.write_text("a b b")
    code, _, err = run_cli(zipf.main, ["--list", str(corpus)], tmp_path)
    assert code == 2 and "no statistics" in err
    run_cli(zipf.main, [str(corpus)], tmp_path)
    code, out, _ = run_cli(zipf.main, ["--list", str(corpus)], tmp_path)
    assert code == 0 and "3 words, 2 distinct" in out and "1\t2\tb" in out


def test_zipf_missing_corpus(tmp_path):
    assert run_cli(zipf.main, [str(tmp_path / "nope.txt")], tmp_path)[0] == 2


# -- parse -----------------------------------------------------------------------

def compiled(tmp_path):
    (tmp_path / "basic.gr").write_text(BASIC_GRAMMAR)
    code, out, err = run_cli(parse.main, ["--train", str(tmp_path / "basic.gr")], tmp_path)
    assert code == 0
    return out, err


def test_parse_usage(tmp_path):
    code, out, _ = run_cli(parse.main, [], tmp_path)
    assert code == 1 and "Usage:" in out
    assert run_cli(parse.main, ["--train"], tmp_path)[0] == 1
    assert run_cli(parse.main, ["--parse", "file"], tmp_path)[0] == 1
    assert run_cli(parse.main, ["--parse", "-zzz"], tmp_path)[0] == 1


def test_parse_help_lists_each_flag_once(tmp_path):
    tokens = FLAG_RE.findall(run_cli(parse.main, ["-h"], tmp_path)[1])
    for flag in parse.OPTIONS + ("--train", "--parse", "--help", "--version"):
        assert tokens.count(flag) == 1, flag


def test_parse_train(tmp_path):
    out, err = compiled(tmp_path)
    assert "Compiled 14 rules over 7 nonterminals" in out
    assert "WARNING: probabilities of <NOMINAL>" in err
    assert (tmp_path / "grammar.bin").exists()


def test_parse_train_errors(tmp_path):
    assert run_cli(parse.main, ["--train", str(tmp_path / "none.gr")], tmp_path)[0] == 2
    (tmp_path / "bad.gr").write_text("<S> ::= oops cat\n")
    code, _, err = run_cli(parse.main, ["--train", str(tmp_path / "bad.gr")], tmp_path)
    assert code == 2 and "probability" in err


def test_parse_without_grammar(tmp_path):
    code, _, err = run_cli(parse.main, ["--parse"], tmp_path, "the cat\n")
    assert code == 2 and "no compiled grammar" in err


def test_parse_session(tmp_path):
    compiled(tmp_path)
    stdin = "my rabbit has a telephone\nmy rabbit has a white smile\n\nin class, you\n\\q\nnever read\n"
    code, out, err = run_cli(parse.main, ["--parse"], tmp_path, stdin)
    assert code == 0
    assert out.startswith("Probabilistic Parsing\n\n\nEntering interactive mode... Type \\q to exit.\n")
    assert "sentence> my rabbit has a telephone\n\nThere's no parse for [ my rabbit has a telephone ]\n" in out
    assert "Parse for the sentence [ my rabbit has a white smile ] is below:" in out
    assert "<S> (0.0020480000000000008) [ 0-5: my rabbit has a white smile ]\n" \
           "    <NP> (0.04000000000000001) [ 0-1: my rabbit ]" in out
    assert "There's no parse for [ in class you ]" in out
    assert "Token[',']" in err
    assert "never read" not in out


def test_parse_session_eof(tmp_path):
    compiled(tmp_path)
    code, out, _ = run_cli(parse.main, ["--parse"], tmp_path, "the cat eats the rabbit")
    assert code == 0 and "(0.006400000000000002)" in out and out.endswith("sentence> \n")
