import csv
import shutil
import subprocess

import numpy as np
import pytest

from wavedeclick.audio_io import WavFile, read_wav, synth_impulse_train, write_wav
from wavedeclick.cli import main
from wavedeclick.framing import Signal
from wavedeclick.regularity import ImpulseProfile


def read_manifest(path):
    return dict(line.split(" = ", 1) for line in open(f"{path}.manifest").read().splitlines())


@pytest.fixture
def speech_wav(tmp_path):
    out = tmp_path / "speech.wav"
    assert main(["synth", "speech", str(out), "--duration", "0.5", "--seed", "3"]) == 0
    return out


def test_synth_writes_float32_and_manifest(speech_wav):
    wav = read_wav(speech_wav)
    assert wav.format == "float32" and len(wav.samples) == 8000
    man = read_manifest(speech_wav)
    assert man["command"] == "synth" and man["kind"] == "speech"
    assert float(man["wall_clock_s"]) >= 0


def test_synth_invalid_kind(tmp_path):
    assert main(["synth", "whistle", str(tmp_path / "x.wav")]) == 3
    assert not (tmp_path / "x.wav").exists()


def test_synth_clicks_writes_centers(tmp_path):
    out = tmp_path / "c.wav"
    assert main(["synth", "clicks", str(out), "--duration", "2", "--seed", "1"]) == 0
    centers = [int(v) for v in open(f"{out}.centers").read().split()]
    assert centers == synth_impulse_train(2.0, seed=1)[1]


def test_disabled_config_is_identity(tmp_path, speech_wav):
    conf = tmp_path / "off.conf"
    conf.write_text("k_s.1 = disabled\nk_s.2 = disabled\nk_s.3 = disabled\n")
    out = tmp_path / "out.wav"
    before = speech_wav.read_bytes()
    assert main(["denoise", str(speech_wav), str(out), "--config", str(conf)]) == 0
    x, y = read_wav(speech_wav).samples, read_wav(out).samples
    assert np.max(np.abs(x - y)) < 1e-6
    assert speech_wav.read_bytes() == before
    man = read_manifest(out)
    assert man["detections"] == "0" and man["config.k_s.1"] == "disabled"


def test_denoise_defaults_and_format(tmp_path, speech_wav):
    out = tmp_path / "out.wav"
    assert main(["denoise", str(speech_wav), str(out), "--format", "pcm16"]) == 0
    assert read_wav(out).format == "pcm16"
    assert read_manifest(out)["profile"] == "builtin:click"


def test_denoise_missing_profile(tmp_path, speech_wav):
    out = tmp_path / "out.wav"
    assert main(["denoise", str(speech_wav), str(out), "--profile", str(tmp_path / "nope")]) == 3
    assert not out.exists()


def test_denoise_bad_config(tmp_path, speech_wav):
    conf = tmp_path / "bad.conf"
    conf.write_text("median_len.1 = 10\n")
    assert main(["denoise", str(speech_wav), str(tmp_path / "o.wav"), "--config", str(conf)]) == 3


def test_denoise_missing_input(tmp_path):
    assert main(["denoise", str(tmp_path / "none.wav"), str(tmp_path / "o.wav")]) == 2


def test_denoise_rejects_non_wav(tmp_path):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"not audio at all")
    assert main(["denoise", str(bad), str(tmp_path / "o.wav")]) == 2


def test_learn_profile_recovers_centers(tmp_path):
    noise, centers = synth_impulse_train(10.0, seed=7)
    src = tmp_path / "noise.wav"
    write_wav(src, WavFile(noise, "float32"))
    out1, out2 = tmp_path / "a.profile", tmp_path / "b.profile"
    assert main(["learn-profile", str(src), str(out1)]) == 0
    assert main(["learn-profile", str(src), str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    prof = ImpulseProfile.load(out1)
    assert prof.lam[0] == 1.0 and prof.levels == 6
    man = read_manifest(out1)
    assert int(man["candidates"]) >= 0.9 * len(centers)


def test_learn_profile_usable_by_denoise(tmp_path, speech_wav):
    noise, _ = synth_impulse_train(3.0, seed=2)
    src, prof = tmp_path / "noise.wav", tmp_path / "p.profile"
    write_wav(src, WavFile(noise, "float32"))
    assert main(["learn-profile", str(src), str(prof)]) == 0
    assert main(["denoise", str(speech_wav), str(tmp_path / "o.wav"), "--profile", str(prof)]) == 0


def test_learn_profile_silence(tmp_path):
    src = tmp_path / "quiet.wav"
    write_wav(src, WavFile(Signal(np.zeros(4000)), "pcm16"))
    assert main(["learn-profile", str(src), str(tmp_path / "p.profile")]) == 4
    assert not (tmp_path / "p.profile").exists()


def test_analyze_unit_impulse(tmp_path):
    x = np.zeros(512)
    x[256] = 1.0
    src, out = tmp_path / "imp.wav", tmp_path / "a.csv"
    write_wav(src, WavFile(Signal(x), "float32"))
    assert main(["analyze", str(src), str(out), "--centers", "256"]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 1 and rows[0]["center"] == "256"
    assert float(rows[0]["level_1"]) == 1.0


def test_analyze_ordering(tmp_path):
    slopes = {}
    for kind in ("impulse", "consonant", "vowel"):
        src, out = tmp_path / f"{kind}.wav", tmp_path / f"{kind}.csv"
        assert main(["synth", kind, str(src), "--duration", "0.032", "--seed", "4"]) == 0
        assert main(["analyze", str(src), str(out), "--centers", "256"]) == 0
        slopes[kind] = float(next(csv.DictReader(open(out)))["slope"])
    assert slopes["consonant"] < slopes["impulse"] < slopes["vowel"]


def test_analyze_empty_input(tmp_path):
    src = tmp_path / "empty.wav"
    write_wav(src, WavFile(Signal(np.zeros(1)), "pcm16"))
    # keep the header only and declare a zero-length data chunk
    data = bytearray(src.read_bytes()[:44])
    data[4:8] = (36).to_bytes(4, "little")
    data[40:44] = (0).to_bytes(4, "little")
    src.write_bytes(bytes(data))
    assert main(["analyze", str(src), str(tmp_path / "a.csv"), "--centers", "0"]) == 2


def test_analyze_center_outside(tmp_path, speech_wav):
    assert main(["analyze", str(speech_wav), str(tmp_path / "a.csv"), "--centers", "99999"]) == 3


def test_metrics_command(tmp_path, speech_wav, capsys):
    assert main(["metrics", str(speech_wav), str(speech_wav)]) == 0
    out = dict(line.split(" = ") for line in capsys.readouterr().out.splitlines())
    assert float(out["seg_snr_db"]) == 35.0


def test_metrics_length_mismatch(tmp_path, speech_wav):
    other = tmp_path / "short.wav"
    assert main(["synth", "speech", str(other), "--duration", "0.25"]) == 0
    assert main(["metrics", str(speech_wav), str(other)]) == 3


@pytest.mark.skipif(shutil.which("wavedeclick") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = tmp_path / "v.wav"
    proc = subprocess.run(["wavedeclick", "synth", "vowel", str(out), "--duration", "0.1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_sinusoid_clicks_attenuated_20db(tmp_path):
    from wavedeclick.audio_io.metrics import impulse_residual_reduction_db

    n = np.arange(32000)
    clean = 0.3 * np.sin(2 * np.pi * 500 * n / 16000)
    clicks, centers = synth_impulse_train(2.0, seed=5)
    noisy = clean + clicks.samples
    src, out = tmp_path / "noisy.wav", tmp_path / "out.wav"
    write_wav(src, WavFile(Signal(noisy), "float32"))
    assert main(["denoise", str(src), str(out)]) == 0
    processed = read_wav(out).samples
    noisy32 = read_wav(src).samples
    assert impulse_residual_reduction_db(clean, noisy32, processed, centers) >= 20.0


def test_analyze_unparseable_centers(tmp_path, speech_wav):
    assert main(["analyze", str(speech_wav), str(tmp_path / "a.csv"), "--centers", "12,abc"]) == 3
    assert not (tmp_path / "a.csv").exists()
