"""Audio ingestion, framing and log-mel / mel-cepstral features.

Only RIFF/WAVE files holding 16-bit PCM mono audio are accepted; anything
else raises rather than being converted silently.
"""
from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np

LOG_FLOOR = 1e-10


class AudioError(Exception):
    """Base class for audio ingestion failures."""


class AudioReadError(AudioError):
    """The file is missing, truncated or not a RIFF/WAVE container."""


class UnsupportedEncodingError(AudioError):
    """The file is WAVE but not 16-bit integer PCM."""


class ChannelCountError(AudioError):
    """The file has more than one channel."""


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class MelSpectrogram:
    frames: np.ndarray  # [n_frames, n_mels], natural-log energies
    frame_hop: float  # seconds
    n_mels: int


@dataclass(frozen=True)
class SpectralConfig:
    frame_len: int = 960
    hop: int = 240
    n_fft: int = 1024
    n_mels: int = 40
    fmin: float = 0.0
    fmax: float = 8000.0


def read_wav(path) -> AudioBuffer:
    """Read a 16-bit PCM mono WAV file into a float buffer in [-1, 1]."""
    try:
        wf = wave.open(str(path), "rb")
    except FileNotFoundError as exc:
        raise AudioReadError(f"{path}: no such file") from exc
    except wave.Error as exc:
        # the stdlib reader rejects every non-PCM format code here
        msg = str(exc)
        if "unknown format" in msg:
            raise UnsupportedEncodingError(f"{path}: {msg}") from exc
        raise AudioReadError(f"{path}: {msg}") from exc
    except (EOFError, OSError) as exc:
        raise AudioReadError(f"{path}: {exc}") from exc
    with wf:
        if wf.getnchannels() != 1:
            raise ChannelCountError(
                f"{path}: expected 1 channel, found {wf.getnchannels()}")
        if wf.getsampwidth() != 2:
            raise UnsupportedEncodingError(
                f"{path}: expected 16-bit samples, found {8 * wf.getsampwidth()}-bit")
        raw = wf.readframes(wf.getnframes())
        rate = wf.getframerate()
    pcm = np.frombuffer(raw, dtype="<i2")
    if pcm.size == 0:
        raise AudioReadError(f"{path}: no audio frames")
    return AudioBuffer(pcm.astype(np.float64) / 32768.0, rate)


def write_wav(path, audio: AudioBuffer) -> None:
    """Write ``audio`` as 16-bit PCM mono, clipping to the representable range."""
    pcm = np.clip(np.round(audio.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(audio.sample_rate)
        wf.writeframes(pcm.tobytes())


def frame_signal(audio, frame_len: int, hop: int) -> np.ndarray:
    """Slice a signal into overlapping frames without padding.

    Parameters
    ----------
    audio : AudioBuffer or array_like
    frame_len, hop : int
        Frame length and hop in samples, ``0 < hop <= frame_len``.

    Returns
    -------
    np.ndarray, shape (n_frames, frame_len)
        Row ``i`` starts at sample ``i * hop``; a partial trailing frame is
        dropped.
    """
    x = audio.samples if isinstance(audio, AudioBuffer) else np.asarray(audio, dtype=np.float64)
    frame_len, hop = int(frame_len), int(hop)
    if hop <= 0 or hop > frame_len:
        raise ValueError(f"need 0 < hop <= frame_len, got hop={hop}, frame_len={frame_len}")
    if frame_len > x.shape[0]:
        raise ValueError(f"frame_len {frame_len} exceeds signal length {x.shape[0]}")
    windows = np.lib.stride_tricks.sliding_window_view(x, frame_len)
    return windows[::hop]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_band_centers(n_mels: int, fmin: float, fmax: float) -> np.ndarray:
    """Center frequency (Hz) of each triangular band, strictly increasing."""
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    return edges[1:-1]


def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int,
                   fmin: float, fmax: float) -> np.ndarray:
    """Triangular filters on the HTK mel scale, peak height 1.

    Returns an array of shape ``(n_mels, n_fft // 2 + 1)``.
    """
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs[None, :] - lower) / (center - lower)
    falling = (upper - freqs[None, :]) / (upper - center)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    if np.any(fb.sum(axis=1) <= 0):
        raise ValueError("mel band narrower than one FFT bin; raise n_fft or lower n_mels")
    return fb


def _check_spectral(cfg: SpectralConfig, sample_rate: int):
    if cfg.n_mels < 2:
        raise ValueError("n_mels must be at least 2")
    if not (0 <= cfg.fmin < cfg.fmax <= sample_rate / 2):
        raise ValueError(f"need 0 <= fmin < fmax <= {sample_rate / 2}")
    if cfg.n_fft < cfg.frame_len:
        raise ValueError("n_fft must be >= frame_len")


def mel_spectrogram(audio: AudioBuffer, cfg: SpectralConfig = SpectralConfig()) -> MelSpectrogram:
    """Hann-windowed power spectrum through a mel filterbank, natural log."""
    _check_spectral(cfg, audio.sample_rate)
    frames = frame_signal(audio, cfg.frame_len, cfg.hop)
    window = np.hanning(cfg.frame_len + 1)[:-1]  # periodic Hann
    power = np.abs(np.fft.rfft(frames * window, n=cfg.n_fft, axis=1)) ** 2
    fb = mel_filterbank(audio.sample_rate, cfg.n_fft, cfg.n_mels, cfg.fmin, cfg.fmax)
    energies = power @ fb.T
    return MelSpectrogram(np.log(np.maximum(energies, LOG_FLOOR)),
                          cfg.hop / audio.sample_rate, cfg.n_mels)


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix ``M`` such that ``c = M @ x``."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(np.pi * k * (2 * i + 1) / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    return m


def mel_cepstrum(spec, n_coeffs: int) -> np.ndarray:
    """Truncated orthonormal DCT-II of each log-mel frame.

    ``spec`` may be a :class:`MelSpectrogram` or a raw ``[n_frames, n_mels]``
    array.  Coefficient 0 carries the frame's overall level.
    """
    frames = spec.frames if isinstance(spec, MelSpectrogram) else np.atleast_2d(spec)
    n_mels = frames.shape[1]
    if not 1 <= n_coeffs <= n_mels:
        raise ValueError(f"n_coeffs must be in [1, {n_mels}], got {n_coeffs}")
    return frames @ dct_matrix(n_mels)[:n_coeffs].T
