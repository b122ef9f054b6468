"""Frame-level F0 by autocorrelation, plus the unvoiced-gap post-processing
(interpolation, median smoothing, natural log) applied before phoneme
aggregation.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .signal_io import AudioBuffer, frame_signal

LINEAR_HZ = "linear_hz"
LOG_HZ = "log_hz"


class NoVoicedFramesError(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class PitchConfig:
    frame_len: float = 0.040  # seconds
    hop: float = 0.010
    f0_min: float = 60.0
    f0_max: float = 500.0
    voicing_threshold: float = 0.45
    silence_rms: float = 1e-4


@dataclass(frozen=True)
class PitchTrack:
    """Per-frame F0 with voicing flags.

    ``t0`` is the center time of frame 0; frame ``i`` is centered at
    ``t0 + i * frame_hop``.  ``duration`` is the length of the analysed
    signal in seconds, used to decide whether a track covers an alignment.
    """

    f0: np.ndarray
    voiced: np.ndarray
    frame_hop: float
    domain: str = LINEAR_HZ
    t0: float = 0.0
    duration: float | None = field(default=None)

    def __post_init__(self):
        f0 = np.asarray(self.f0, dtype=np.float64)
        voiced = np.asarray(self.voiced, dtype=bool)
        if f0.shape != voiced.shape or f0.ndim != 1:
            raise ValueError("f0 and voiced must be 1-D arrays of equal length")
        if self.domain not in (LINEAR_HZ, LOG_HZ):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        if self.domain == LINEAR_HZ and np.any(f0[voiced] <= 0):
            raise ValueError("voiced frames must have positive F0")
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "voiced", voiced)

    def __len__(self):
        return self.f0.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.frame_hop * np.arange(len(self))

    @property
    def end_time(self) -> float:
        if self.duration is not None:
            return self.duration
        return self.t0 + self.frame_hop * (len(self) - 0.5)


def _lag_range(sample_rate, cfg):
    lag_min = max(1, int(np.floor(sample_rate / cfg.f0_max)))
    lag_max = int(np.ceil(sample_rate / cfg.f0_min))
    return lag_min, lag_max


def estimate_f0(audio: AudioBuffer, cfg: PitchConfig = PitchConfig()) -> PitchTrack:
    """Autocorrelation pitch tracker.

    Per frame the mean is removed and the autocorrelation is computed over
    lags ``[rate/f0_max, rate/f0_min]``.  The candidate period is the
    highest interior peak of the energy-normalised (biased)
    autocorrelation, whose linear taper favours the shortest period and so
    avoids locking onto period multiples.  The lag is then moved to the
    local maximum of the normalised cross-correlation, which has no taper;
    its value there is the voicing strength, and parabolic interpolation
    gives the sub-sample period.

    A frame is voiced when its RMS exceeds ``cfg.silence_rms`` and the
    voicing strength reaches ``cfg.voicing_threshold``.
    """
    if not cfg.f0_min < cfg.f0_max:
        raise ValueError("f0_min must be below f0_max")
    if cfg.hop <= 0 or cfg.hop > cfg.frame_len:
        raise ValueError("need 0 < hop <= frame_len")
    sr = audio.sample_rate
    frame_len = int(round(cfg.frame_len * sr))
    hop = int(round(cfg.hop * sr))
    lag_min, lag_max = _lag_range(sr, cfg)
    if lag_max + 1 >= frame_len:
        raise ValueError(
            f"frame of {frame_len} samples cannot hold a period at f0_min={cfg.f0_min} Hz")

    frames = frame_signal(audio, frame_len, hop)
    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    x = frames - frames.mean(axis=1, keepdims=True)
    n_fft = 1 << int(np.ceil(np.log2(2 * frame_len)))
    spec = np.fft.rfft(x, n=n_fft, axis=1)
    acf = np.fft.irfft(np.abs(spec) ** 2, n=n_fft, axis=1)[:, :frame_len]

    # energy of the leading / trailing (frame_len - lag) samples, for every lag
    sq = np.cumsum(x ** 2, axis=1)
    total = sq[:, -1:]
    lags = np.arange(frame_len)
    head = np.concatenate([total, sq[:, frame_len - 1 - lags[1:]]], axis=1)
    tail = total - np.concatenate([np.zeros_like(total), sq[:, lags[1:] - 1]], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        biased = acf / total
        nccf = acf / np.sqrt(head * tail)
    biased = np.nan_to_num(biased)
    nccf = np.nan_to_num(nccf)

    # only interior peaks count: near lag_min a low tone's correlation is
    # still falling from lag 0 and would otherwise win
    lag_idx = np.arange(lag_min, lag_max + 1)
    centre = biased[:, lag_idx]
    is_peak = (centre > biased[:, lag_idx - 1]) & (centre >= biased[:, lag_idx + 1])
    search = np.where(is_peak, centre, -np.inf)
    best = np.argmax(search, axis=1) + lag_min
    has_peak = np.isfinite(search.max(axis=1))
    rows = np.arange(frames.shape[0])

    # the taper pulls the biased peak towards shorter lags; climb to the
    # nearby maximum of the untapered correlation
    for _ in range(frame_len):
        up = np.minimum(best + 1, lag_max)
        down = np.maximum(best - 1, lag_min)
        here = nccf[rows, best]
        step = np.where(nccf[rows, up] > here, 1,
                        np.where(nccf[rows, down] > here, -1, 0))
        if not step.any():
            break
        best = best + step
    strength = np.where(has_peak, nccf[rows, best], 0.0)

    # sub-sample refinement on the untapered correlation
    lo = np.clip(best - 1, 0, frame_len - 1)
    hi = np.clip(best + 1, 0, frame_len - 1)
    y0, y1, y2 = nccf[rows, lo], strength, nccf[rows, hi]
    denom = y0 - 2 * y1 + y2
    with np.errstate(invalid="ignore", divide="ignore"):
        offset = np.where(denom < 0, 0.5 * (y0 - y2) / denom, 0.0)
    offset = np.clip(np.nan_to_num(offset), -0.5, 0.5)
    period = best + offset

    voiced = (rms > cfg.silence_rms) & (strength >= cfg.voicing_threshold)
    f0 = np.where(voiced, sr / period, 0.0)
    return PitchTrack(f0, voiced, hop / sr, LINEAR_HZ,
                      t0=0.5 * frame_len / sr, duration=len(audio) / sr)


def interpolate_unvoiced(track: PitchTrack) -> PitchTrack:
    """Fill unvoiced frames linearly between voiced neighbours.

    Leading and trailing unvoiced runs take the nearest voiced value.  The
    voicing flags are carried through unchanged.
    """
    if track.domain != LINEAR_HZ:
        raise DomainError("interpolation expects a linear_hz track")
    if not np.any(track.voiced):
        raise NoVoicedFramesError("track has no voiced frames to interpolate from")
    idx = np.arange(len(track))
    v = track.voiced
    # np.interp already holds the end values outside the voiced span
    f0 = np.interp(idx, idx[v], track.f0[v])
    return replace(track, f0=f0)


def smooth(track: PitchTrack, window: int = 5) -> PitchTrack:
    if window < 1 or window % 2 == 0:
        raise ValueError(f"median window must be odd and positive, got {window}")
    if window == 1:
        return replace(track, f0=track.f0.copy())
    half = window // 2
    padded = np.pad(track.f0, half, mode="edge")
    f0 = np.median(np.lib.stride_tricks.sliding_window_view(padded, window), axis=1)
    return replace(track, f0=f0)


def to_log(track: PitchTrack) -> PitchTrack:
    if track.domain != LINEAR_HZ:
        raise DomainError("track is already in the log domain")
    if np.any(track.f0 <= 0):
        raise DomainError("log transform needs strictly positive F0; interpolate first")
    return replace(track, f0=np.log(track.f0), domain=LOG_HZ)


def process_track(track: PitchTrack, smooth_window: int = 5) -> PitchTrack:
    """Interpolate, then smooth, then take the natural log."""
    return to_log(smooth(interpolate_unvoiced(track), smooth_window))


def write_track_csv(path, track: PitchTrack) -> None:
    """Persist a linear-Hz track as ``frame_index,time_sec,f0,voiced``."""
    from ._fileio import fmt, write_csv
    if track.domain != LINEAR_HZ:
        raise DomainError("pitch CSV stores linear Hz")
    rows = [(i, f"{t:.6f}", fmt(f), int(v))
            for i, (t, f, v) in enumerate(zip(track.times, track.f0, track.voiced))]
    write_csv(path, ["frame_index", "time_sec", "f0", "voiced"], rows)


def read_track_csv(path, frame_hop: float | None = None) -> PitchTrack:
    times, f0, voiced = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            times.append(float(row["time_sec"]))
            f0.append(float(row["f0"]))
            voiced.append(row["voiced"].strip() == "1")
    if frame_hop is None:
        frame_hop = times[1] - times[0] if len(times) > 1 else 0.01
    return PitchTrack(np.array(f0), np.array(voiced), frame_hop,
                      t0=times[0] if times else 0.0)
