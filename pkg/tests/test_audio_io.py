import numpy as np
import pytest
from scipy import signal as sps

from wavedeclick.audio_io import (
    WavError,
    WavFile,
    encode_wav,
    metrics,
    mix,
    mix_gain,
    parse_wav,
    read_wav,
    synth_impulse_train,
    synth_speech,
    synth_surrogates,
    write_wav,
)
from wavedeclick.audio_io.metrics import impulse_residual_reduction_db
from wavedeclick.audio_io.synth import click_burst, raised_cosine
from wavedeclick.framing import Signal


def riff(fmt_tag, bits, payload, rate=16000, channels=1, magic=b"RIFF"):
    block = channels * bits // 8
    fmt = (fmt_tag.to_bytes(2, "little") + channels.to_bytes(2, "little") + rate.to_bytes(4, "little")
           + (rate * block).to_bytes(4, "little") + block.to_bytes(2, "little") + bits.to_bytes(2, "little"))
    body = b"WAVE" + b"fmt " + (16).to_bytes(4, "little") + fmt + b"data" + len(payload).to_bytes(4, "little") + payload
    return magic + len(body).to_bytes(4, "little") + body


PCM_FIXTURE = riff(1, 16, b"\x00\x00" + b"\x00\x40" + b"\x00\xc0" + b"\xff\x7f")


def test_parse_pcm16_fixture():
    wav = parse_wav(PCM_FIXTURE)
    assert wav.format == "pcm16"
    assert wav.sample_rate == 16000
    assert wav.samples.tolist() == [0.0, 0.5, -0.5, 32767 / 32768]


def test_encode_matches_fixture_bytes():
    wav = WavFile(Signal(np.array([0.0, 0.5, -0.5, 32767 / 32768])), "pcm16")
    assert encode_wav(wav) == PCM_FIXTURE


def test_float32_round_trip_is_bit_exact(rng, tmp_path):
    x = rng.standard_normal(1000).astype(np.float32).astype(np.float64)
    path = tmp_path / "f.wav"
    write_wav(path, WavFile(Signal(x, 22050), "float32"))
    back = read_wav(path)
    assert back.format == "float32" and back.sample_rate == 22050
    assert np.array_equal(back.samples, x)


def test_pcm16_round_trip_within_one_lsb(rng):
    x = rng.uniform(-1, 1, 5000)
    back = parse_wav(encode_wav(WavFile(Signal(x), "pcm16"))).samples
    assert np.max(np.abs(back - x)) <= 1 / 32768


def test_pcm16_clamps():
    back = parse_wav(encode_wav(WavFile(Signal(np.array([1.5, -1.5])), "pcm16")))
    assert back.samples.tolist() == [32767 / 32768, -1.0]


def test_header_is_canonical():
    data = encode_wav(WavFile(Signal(np.zeros(10)), "float32"))
    assert data[:4] == b"RIFF" and data[8:16] == b"WAVEfmt "
    assert int.from_bytes(data[20:22], "little") == 3
    assert int.from_bytes(data[34:36], "little") == 32
    assert len(data) == 44 + 40


@pytest.mark.parametrize("data,msg", [
    (riff(1, 16, b"\x00\x00", magic=b"RIFX"), "not a WAV file"),
    (b"hello", "not a WAV file"),
    (riff(1, 8, b"\x00\x00"), "unsupported encoding"),
    (riff(6, 16, b"\x00\x00"), "unsupported encoding"),
    (riff(1, 16, b"\x00\x00\x00\x00", channels=2), "unsupported encoding"),
    (PCM_FIXTURE[:-3], "corrupt file"),
    (PCM_FIXTURE[:30], "corrupt file"),
])
def test_parse_rejects(data, msg):
    with pytest.raises(WavError, match=msg):
        parse_wav(data)


def test_raised_cosine_support():
    p = raised_cosine(16)
    assert len(p) == 15 and p[7] == 1.0
    assert np.allclose(p, p[::-1])


def test_click_burst_unit_peak(rng):
    b = click_burst(12.0, rng)
    assert np.max(np.abs(b)) == pytest.approx(1.0)
    assert len(b) <= 16


def test_impulse_train_deterministic():
    a, ca = synth_impulse_train(2.0, seed=3)
    b, cb = synth_impulse_train(2.0, seed=3)
    assert ca == cb and np.array_equal(a.samples, b.samples)


def test_impulse_train_counts():
    counts = [len(synth_impulse_train(10.0, rate_hz=10, seed=s)[1]) for s in range(100)]
    assert all(60 <= c <= 140 for c in counts)
    assert 90 <= np.mean(counts) <= 110


def test_impulse_train_fixed_amplitude():
    x, centers = synth_impulse_train(3.0, amp_range=(0.5, 0.5), width_range_ms=(0.25, 0.25), seed=8)
    for c in centers:
        if all(abs(c - o) > 8 for o in centers if o != c):
            assert np.max(np.abs(x.samples[max(c - 4, 0):c + 5])) == pytest.approx(0.5)


def test_impulse_train_rejects_empty_range():
    with pytest.raises(ValueError, match="empty amplitude or width range"):
        synth_impulse_train(1.0, amp_range=(1.0, 0.5))


def _band_fraction(x, below_hz):
    f, p = sps.periodogram(x, fs=16000)
    return p[f < below_hz].sum() / p.sum()


def test_vowel_is_low_band():
    x = synth_surrogates("vowel", 0.5, seed=2)
    assert _band_fraction(x.samples, 5000) > 0.95
    assert np.sqrt(np.mean(x.samples**2)) == pytest.approx(0.1)


def test_consonant_is_high_band():
    x = synth_surrogates("consonant", 0.5, seed=2)
    assert 1 - _band_fraction(x.samples, 4000) > 0.90


def test_impulse_surrogate_support():
    x = synth_surrogates("impulse", seed=1).samples
    assert np.count_nonzero(x) <= 16
    assert np.max(np.abs(x)) == pytest.approx(1.0)


def test_unknown_surrogate():
    with pytest.raises(ValueError):
        synth_surrogates("fricative")


def test_speech_labels_cover_clip():
    x, labels = synth_speech(1.0, seed=4)
    assert len(x) == 16000
    assert labels[0][0] == 0 and labels[-1][1] == 16000
    assert all(a[1] == b[0] for a, b in zip(labels, labels[1:]))
    assert {k for _, _, k in labels} == {"vowel", "consonant"}


@pytest.mark.parametrize("snr", [-5.0, 0.0, 10.0, 30.0])
def test_mix_hits_snr(rng, snr):
    clean = Signal(rng.standard_normal(8000))
    noise = Signal(rng.standard_normal(9000) * 0.3)
    noisy = mix(clean, noise, snr)
    resid = noisy.samples - clean.samples
    got = 10 * np.log10(np.mean(clean.samples**2) / np.mean(resid**2))
    assert abs(got - snr) < 0.01


def test_mix_undefined_ratio():
    with pytest.raises(ValueError, match="undefined ratio"):
        mix_gain(Signal(np.ones(10)), Signal(np.zeros(10)), 0.0)


def oracle_seg_snr(clean, processed, flen):
    """Single pass over frames with explicit python arithmetic."""
    peak = max(v * v for v in clean)
    vals = []
    for start in range(0, len(clean) - flen + 1, flen):
        c = clean[start:start + flen]
        e = c - processed[start:start + flen]
        ec, ee = float(np.dot(c, c)), float(np.dot(e, e))
        if ec / flen < peak * 1e-6:
            continue
        snr = 35.0 if ee == 0 else (-10.0 if ec == 0 else 10 * np.log10(ec / ee))
        vals.append(min(max(snr, -10.0), 35.0))
    return np.mean(vals), -min(vals)


def test_metrics_identical_signals_clamp_at_35(rng):
    x = rng.standard_normal(4096)
    m = metrics(x, x)
    assert m.seg_snr_db == 35.0 and m.peak_residual_db == -35.0


def test_metrics_known_ratio(rng):
    x = rng.standard_normal(5120)
    e = rng.standard_normal(5120)
    flen = 512
    # scale the error per frame so every frame sits at exactly 30 dB
    for s in range(0, 5120, flen):
        c, r = x[s:s + flen], e[s:s + flen]
        e[s:s + flen] = r * np.sqrt(np.dot(c, c) / np.dot(r, r) / 1000.0)
    m = metrics(x, x - e)
    assert m.seg_snr_db == pytest.approx(30.0, abs=1e-9)


def test_metrics_match_oracle(rng):
    for _ in range(10):
        n = int(rng.integers(2000, 20000))
        clean = rng.standard_normal(n) * np.repeat(rng.uniform(0, 1, n // 500 + 1), 500)[:n]
        clean[:1024] = 0.0
        proc = clean + 0.1 * rng.standard_normal(n)
        seg, peak = oracle_seg_snr(clean, proc, 512)
        m = metrics(clean, proc)
        assert m.seg_snr_db == pytest.approx(seg, abs=1e-9)
        assert m.peak_residual_db == pytest.approx(peak, abs=1e-9)


def test_impulse_frames_excluded(rng):
    clean = rng.standard_normal(2048)
    proc = clean.copy()
    proc[600] += 50.0
    m = metrics(clean, proc, impulse_centers=[600])
    assert m.impulse_free_frames == 3
    assert m.active_distortion_db == 35.0
    assert m.seg_snr_db < 35.0


def test_metrics_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        metrics(np.ones(10), np.ones(11))


def test_residual_reduction():
    clean = np.zeros(1024)
    noisy = clean.copy()
    noisy[100] = 1.0
    proc = clean.copy()
    proc[100] = 0.1
    assert impulse_residual_reduction_db(clean, noisy, proc, [100]) == pytest.approx(20.0)
