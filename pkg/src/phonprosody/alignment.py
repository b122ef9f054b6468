"""Forced-alignment segments and phoneme-level aggregation of pitch.

Alignments are read from a small tab-separated format, one segment per
line::

    start_sec <TAB> end_sec <TAB> label <TAB> kind

where ``kind`` is one of ``phone``, ``word_boundary``, ``pause`` or
``punctuation``.  Lines starting with ``#`` are comments.  Only ``phone``
segments receive prosodic features.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pitch import LOG_HZ, PitchTrack

PHONE = "phone"
WORD_BOUNDARY = "word_boundary"
PAUSE = "pause"
PUNCTUATION = "punctuation"
KINDS = (PHONE, WORD_BOUNDARY, PAUSE, PUNCTUATION)


class AlignmentError(ValueError):
    """Malformed or inconsistent alignment data."""


@dataclass(frozen=True)
class PhonemeSegment:
    start: float
    end: float
    label: str
    kind: str = PHONE


@dataclass(frozen=True)
class PhonemeProsody:
    label: str
    mean_log_f0: float
    duration: float


def validate_segments(segments):
    """Sort by start time and check kinds, ordering and overlap."""
    segs = sorted(segments, key=lambda s: (s.start, s.end))
    for seg in segs:
        if seg.kind not in KINDS:
            raise AlignmentError(f"unknown segment kind {seg.kind!r}")
        if seg.end <= seg.start:
            raise AlignmentError(f"segment {seg.label!r} ends at {seg.end} <= start {seg.start}")
        if seg.kind == PHONE and seg.start < 0:
            raise AlignmentError(f"phone {seg.label!r} starts before 0")
    for prev, cur in zip(segs, segs[1:]):
        if cur.start < prev.end:
            raise AlignmentError(
                f"segments {prev.label!r} [{prev.start}, {prev.end}) and "
                f"{cur.label!r} [{cur.start}, {cur.end}) overlap")
    return segs


def parse_alignment(path):
    segments = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise AlignmentError(f"{path}:{lineno}: expected 4 tab-separated fields")
            try:
                start, end = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise AlignmentError(f"{path}:{lineno}: bad time value") from exc
            label, kind = parts[2].strip(), parts[3].strip()
            if kind not in KINDS:
                raise AlignmentError(f"{path}:{lineno}: unknown kind {kind!r}")
            segments.append(PhonemeSegment(start, end, label, kind))
    try:
        return validate_segments(segments)
    except AlignmentError as exc:
        raise AlignmentError(f"{path}: {exc}") from None


def write_alignment(path, segments) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in segments:
            fh.write(f"{s.start:.6f}\t{s.end:.6f}\t{s.label}\t{s.kind}\n")


def phones(segments):
    return [s for s in segments if s.kind == PHONE]


def aggregate_phoneme_f0(track: PitchTrack, segments) -> np.ndarray:
    """Mean log-F0 per phone segment.

    Frames belong to a phone when their center lies in ``[start, end)``.  A
    phone too short to contain any frame center takes the value of the frame
    whose center is nearest its midpoint.
    """
    if track.domain != LOG_HZ:
        raise ValueError("aggregation expects a log_hz track")
    segs = phones(segments)
    if not segs:
        return np.zeros(0)
    if len(track) == 0 or segs[-1].end > track.end_time + 1e-9:
        raise AlignmentError(
            f"pitch track ends at {track.end_time:.4f}s but alignment runs to {segs[-1].end:.4f}s")
    times = track.times
    out = np.empty(len(segs))
    for i, seg in enumerate(segs):
        lo, hi = np.searchsorted(times, [seg.start, seg.end], side="left")
        if hi > lo:
            out[i] = track.f0[lo:hi].mean()
        else:
            mid = 0.5 * (seg.start + seg.end)
            out[i] = track.f0[int(np.argmin(np.abs(times - mid)))]
    return out


def extract_durations(segments) -> np.ndarray:
    return np.array([s.end - s.start for s in phones(segments)], dtype=np.float64)


def phoneme_prosody(track: PitchTrack, segments):
    """Combine aggregated log-F0 and durations into per-phone records."""
    segs = phones(segments)
    f0 = aggregate_phoneme_f0(track, segs)
    return [PhonemeProsody(s.label, float(f), float(s.end - s.start))
            for s, f in zip(segs, f0)]


@dataclass(frozen=True)
class Utterance:
    """Phone-level prosody of one utterance, tagged with its speaker."""

    utterance_id: str
    speaker_id: str
    phones: tuple

    def __post_init__(self):
        object.__setattr__(self, "phones", tuple(self.phones))

    @property
    def labels(self):
        return [p.label for p in self.phones]

    @property
    def log_f0(self) -> np.ndarray:
        return np.array([p.mean_log_f0 for p in self.phones], dtype=np.float64)

    @property
    def durations(self) -> np.ndarray:
        return np.array([p.duration for p in self.phones], dtype=np.float64)
