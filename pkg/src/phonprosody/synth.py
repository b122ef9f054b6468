"""Synthetic speakers and utterances for tests and demos.

Audio is a sum of a few harmonics whose fundamental follows a per-phone
target contour; pauses and boundaries are silent.  Alongside each wav an
alignment file is written, so the whole extraction pipeline can run on
data whose prosody is known in advance.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alignment import PAUSE, PHONE, PUNCTUATION, WORD_BOUNDARY, PhonemeProsody, PhonemeSegment, Utterance, write_alignment
from .prosody_clustering import LabelSequence
from .signal_io import AudioBuffer, write_wav

# label -> (mean duration in seconds, intrinsic pitch offset in semitones)
PHONE_SET = {
    "AA": (0.110, -0.5), "AE": (0.100, -0.3), "IY": (0.090, 0.8), "UW": (0.095, 0.6),
    "EH": (0.085, 0.0), "OW": (0.105, -0.2), "M": (0.070, -0.4), "N": (0.065, -0.3),
    "L": (0.060, 0.0), "R": (0.065, 0.1), "W": (0.055, 0.2), "Y": (0.050, 0.4),
}


@dataclass(frozen=True)
class SyntheticSpeaker:
    speaker_id: str
    base_f0: float  # Hz
    range_st: float = 2.5  # standard deviation of phone pitch, semitones
    tempo: float = 1.0  # duration multiplier


DEFAULT_SPEAKERS = (
    SyntheticSpeaker("spk_f1", 210.0, 2.8, 0.95),
    SyntheticSpeaker("spk_m1", 105.0, 2.2, 1.05),
    SyntheticSpeaker("spk_f2", 185.0, 3.0, 1.0),
)


def _sentence(rng, n_words):
    labels = list(PHONE_SET)
    words = [[str(p) for p in rng.choice(labels, size=rng.integers(2, 5))] for _ in range(n_words)]
    return words


def synth_utterance_plan(speaker: SyntheticSpeaker, rng, n_words=None):
    """Segments with their target F0 (Hz, 0 for silence)."""
    n_words = n_words or int(rng.integers(3, 6))
    words = _sentence(rng, n_words)
    segs, targets = [], []
    t = 0.0

    def add(dur, label, kind, f0):
        nonlocal t
        segs.append(PhonemeSegment(round(t, 6), round(t + dur, 6), label, kind))
        targets.append(f0)
        t = round(t + dur, 6)

    add(0.08, "sil", PAUSE, 0.0)
    n_phones = sum(len(w) for w in words)
    pos = 0
    for wi, word in enumerate(words):
        if wi:
            if rng.random() < 0.25:
                add(float(rng.uniform(0.10, 0.18)), "sp", PAUSE, 0.0)
            else:
                add(0.02, "#", WORD_BOUNDARY, 0.0)
        for label in word:
            base_dur, offset = PHONE_SET[label]
            dur = base_dur * speaker.tempo * float(np.exp(rng.normal(0.0, 0.25)))
            dur = max(0.03, dur)
            declination = 1.5 * (0.5 - pos / max(n_phones - 1, 1))
            st = offset + declination + speaker.range_st * float(rng.normal())
            add(dur, label, PHONE, speaker.base_f0 * 2.0 ** (st / 12.0))
            pos += 1
    add(0.03, ".", PUNCTUATION, 0.0)
    add(0.10, "sil", PAUSE, 0.0)
    return segs, targets


def render(segs, targets, sample_rate=16000, rng=None, noise=1e-3):
    """Harmonic waveform following ``targets`` (Hz) segment by segment."""
    rng = np.random.default_rng(rng)
    n = int(round(segs[-1].end * sample_rate))
    f0 = np.zeros(n)
    for s, f in zip(segs, targets):
        a, b = int(round(s.start * sample_rate)), int(round(s.end * sample_rate))
        f0[a:b] = f
    voiced = f0 > 0
    # short glides at phone joins keep the contour continuous
    ramp = max(1, int(0.01 * sample_rate))
    smooth_f0 = np.convolve(np.where(voiced, f0, 0.0), np.ones(ramp) / ramp, mode="same")
    norm = np.convolve(voiced.astype(float), np.ones(ramp) / ramp, mode="same")
    inst = np.where(voiced, smooth_f0 / np.maximum(norm, 1e-9), 0.0)
    phase = 2 * np.pi * np.cumsum(inst) / sample_rate
    x = sum(amp * np.sin(h * phase) for h, amp in ((1, 0.5), (2, 0.25), (3, 0.12)))
    x = np.where(voiced, x, 0.0) + noise * rng.standard_normal(n)
    return AudioBuffer(np.clip(x, -1, 1), sample_rate)


def write_corpus(root, speakers=DEFAULT_SPEAKERS, n_utts=4, sample_rate=16000, seed=0,
                 manifest_name="manifest.csv"):
    """Write wavs, alignments and a manifest CSV under ``root``.

    Returns the manifest path.  Each speaker draws from its own seeded
    stream, so adding speakers does not change the others' data.
    """
    root = Path(root)
    (root / "wav").mkdir(parents=True, exist_ok=True)
    (root / "align").mkdir(parents=True, exist_ok=True)
    rows = []
    for si, spk in enumerate(speakers):
        rng = np.random.default_rng([seed, si, sum(map(ord, spk.speaker_id))])
        for i in range(n_utts):
            uid = f"{spk.speaker_id}_{i:03d}"
            segs, targets = synth_utterance_plan(spk, rng)
            wav = root / "wav" / f"{uid}.wav"
            ali = root / "align" / f"{uid}.tsv"
            write_wav(wav, render(segs, targets, sample_rate, rng))
            write_alignment(ali, segs)
            rows.append((uid, spk.speaker_id, f"wav/{uid}.wav", f"align/{uid}.tsv"))
    manifest = root / manifest_name
    with open(manifest, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["utterance_id", "speaker_id", "wav_path", "align_path"])
        w.writerows(rows)
    return manifest


def feature_corpus(speakers=DEFAULT_SPEAKERS, n_utts=20, seed=0):
    """Phone-level :class:`Utterance` records without rendering audio."""
    out = []
    for si, spk in enumerate(speakers):
        rng = np.random.default_rng([seed, si, sum(map(ord, spk.speaker_id))])
        for i in range(n_utts):
            segs, targets = synth_utterance_plan(spk, rng)
            phones = [PhonemeProsody(s.label, float(np.log(f)), s.end - s.start)
                      for s, f in zip(segs, targets) if s.kind == PHONE]
            out.append(Utterance(f"{spk.speaker_id}_{i:03d}", spk.speaker_id, phones))
    return out


def rule_label_corpus(n_utts=300, k=15, n_speakers=3, noise=0.03, seed=0):
    """Label sequences whose tokens follow fixed rules of phone and speaker.

    The F0 token depends on the phone and the speaker, the duration token on
    the phone and its right neighbour.  A fraction ``noise`` of tokens is
    replaced by uniform draws.  Returns ``(labels, speaker_of)``.
    """
    rng = np.random.default_rng(seed)
    phones = list(PHONE_SET)
    f0_rule = {(p, s): (3 * i + 4 * s) % k for i, p in enumerate(phones) for s in range(n_speakers)}
    dur_rule = {(p, q): (5 * i + 2 * j) % k for i, p in enumerate(phones)
                for j, q in enumerate(phones + ["<end>"])}
    labels, speaker_of = [], {}
    for u in range(n_utts):
        s = int(rng.integers(n_speakers))
        seq = [str(p) for p in rng.choice(phones, size=int(rng.integers(6, 14)))]
        f = [f0_rule[(p, s)] for p in seq]
        d = [dur_rule[(p, q)] for p, q in zip(seq, seq[1:] + ["<end>"])]
        for arr in (f, d):
            flip = rng.random(len(arr)) < noise
            for i in np.flatnonzero(flip):
                arr[i] = int(rng.integers(k))
        uid = f"utt{u:04d}"
        labels.append(LabelSequence(uid, tuple(seq), tuple(f), tuple(d)))
        speaker_of[uid] = f"s{s}"
    return labels, speaker_of
