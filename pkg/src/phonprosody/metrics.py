"""Objective comparison of two renditions of an utterance.

Frame sequences are first aligned with dynamic time warping; mel-cepstral
distortion (MCD) and the F0 error rates (VDE, GPE, FFE) are then computed
over the aligned frame pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pitch import LINEAR_HZ, PitchTrack

MCD_SCALE = 10.0 / np.log(10.0)


@dataclass(frozen=True)
class WarpPath:
    pairs: np.ndarray  # [L, 2] int

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=int).reshape(-1, 2)
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return self.pairs.shape[0]

    @classmethod
    def diagonal(cls, n):
        return cls(np.stack([np.arange(n), np.arange(n)], axis=1))

    def validate(self, n, m):
        p = self.pairs
        if len(p) == 0 or tuple(p[0]) != (0, 0) or tuple(p[-1]) != (n - 1, m - 1):
            raise ValueError("warp path must run from (0, 0) to (n-1, m-1)")
        steps = np.diff(p, axis=0)
        ok = ((steps == (1, 1)) | (steps == (1, 0)) | (steps == (0, 1))).all(axis=1)
        if not ok.all():
            raise ValueError("warp path contains an illegal step")


@dataclass(frozen=True)
class MetricReport:
    mcd: float
    ffe: float
    vde: float
    gpe: float
    n_frames: int
    n_both_voiced: int

    @property
    def gpe_defined(self) -> bool:
        return self.n_both_voiced > 0


def pairwise_euclidean(a, b):
    a = np.asarray(a, dtype=np.float64).reshape(len(a), -1)
    b = np.asarray(b, dtype=np.float64).reshape(len(b), -1)
    # direct differences in row blocks: exact zeros for identical frames,
    # which the expanded square form does not guarantee
    out = np.empty((a.shape[0], b.shape[0]))
    block = max(1, 2_000_000 // max(1, b.size))
    for start in range(0, a.shape[0], block):
        diff = a[start:start + block, None, :] - b[None, :, :]
        out[start:start + block] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return out


def dtw_align(a, b, cost=None):
    """Minimum-cost monotone alignment of two frame sequences.

    Steps are (1, 1), (1, 0) and (0, 1), each charging the local distance of
    the cell entered.  When several predecessors tie, the backtrace prefers
    the diagonal, then (1, 0), then (0, 1).

    Parameters
    ----------
    a, b : array_like, shape (n, d) and (m, d)
    cost : callable, optional
        ``cost(a, b) -> (n, m)`` local distance matrix; Euclidean by default.

    Returns
    -------
    path : WarpPath
    total : float
        Sum of local distances along the path.
    """
    if len(a) == 0 or len(b) == 0:
        raise ValueError("DTW needs two non-empty sequences")
    d = (cost or pairwise_euclidean)(a, b)
    n, m = d.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        row, prev = acc[i], acc[i - 1]
        di = d[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = di[j - 1] + best
    i, j = n, m
    pairs = [(n - 1, m - 1)]
    while (i, j) != (1, 1):
        diag, up, left = acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
        if diag <= up and diag <= left:
            i, j = i - 1, j - 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
        pairs.append((i - 1, j - 1))
    return WarpPath(np.array(pairs[::-1])), float(acc[n, m])


def path_cost(a, b, path: WarpPath, cost=None) -> float:
    d = (cost or pairwise_euclidean)(a, b)
    return float(d[path.pairs[:, 0], path.pairs[:, 1]].sum())


def mcd(cep_a, cep_b, path: WarpPath, coeff_range=None) -> float:
    """Mean mel-cepstral distortion in dB over aligned frame pairs.

    ``coeff_range`` is an inclusive ``(first, last)`` coefficient index
    pair; the default ``(1, D - 1)`` leaves out the energy term c0.
    """
    a = np.atleast_2d(np.asarray(cep_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(cep_b, dtype=np.float64))
    width = min(a.shape[1], b.shape[1])
    lo, hi = coeff_range if coeff_range is not None else (1, width - 1)
    if not 0 <= lo <= hi < width:
        raise ValueError(f"coefficient range ({lo}, {hi}) outside [0, {width - 1}]")
    diff = a[path.pairs[:, 0], lo:hi + 1] - b[path.pairs[:, 1], lo:hi + 1]
    return float(np.mean(MCD_SCALE * np.sqrt(2.0 * np.sum(diff ** 2, axis=1))))


def _aligned(ref: PitchTrack, syn: PitchTrack, path: WarpPath, need_linear=False):
    if need_linear and (ref.domain != LINEAR_HZ or syn.domain != LINEAR_HZ):
        raise ValueError("pitch error rates need linear-Hz tracks")
    i, j = path.pairs[:, 0], path.pairs[:, 1]
    if len(path) == 0:
        raise ValueError("empty warp path")
    if i.min() < 0 or j.min() < 0 or i.max() >= len(ref) or j.max() >= len(syn):
        raise IndexError("warp path indexes beyond the pitch tracks")
    return ref.f0[i], ref.voiced[i], syn.f0[j], syn.voiced[j]


def _counts(ref, syn, path, threshold):
    fr, vr, fs, vs = _aligned(ref, syn, path, need_linear=True)
    mismatch = vr != vs
    both = vr & vs
    gross = both & (np.abs(fs - fr) > threshold * fr)
    return len(path), int(mismatch.sum()), int(both.sum()), int(gross.sum())


def vde(ref: PitchTrack, syn: PitchTrack, path: WarpPath) -> float:
    _, vr, _, vs = _aligned(ref, syn, path)
    return float(np.mean(vr != vs))


def gpe(ref: PitchTrack, syn: PitchTrack, path: WarpPath, threshold=0.2) -> float:
    """Share of both-voiced pairs whose F0 deviates by more than ``threshold``
    relative to the reference; 0 when no pair is voiced in both tracks."""
    _, _, both, gross = _counts(ref, syn, path, threshold)
    return gross / both if both else 0.0


def ffe(ref: PitchTrack, syn: PitchTrack, path: WarpPath, threshold=0.2) -> float:
    total, mismatch, _, gross = _counts(ref, syn, path, threshold)
    return (mismatch + gross) / total


def pitch_report(ref: PitchTrack, syn: PitchTrack, path: WarpPath, threshold=0.2, mcd_value=0.0):
    total, mismatch, both, gross = _counts(ref, syn, path, threshold)
    return MetricReport(float(mcd_value), (mismatch + gross) / total, mismatch / total,
                        gross / both if both else 0.0, total, both)


def compare_audio(ref_audio, syn_audio, spectral_cfg, pitch_cfg, n_coeffs=25,
                  coeff_range=None, gpe_threshold=0.2) -> MetricReport:
    """Full report for two waveforms.

    Mel cepstra of both signals are DTW-aligned; the same path indexes the
    pitch tracks, so spectral and pitch framing must coincide.
    """
    from .pitch import estimate_f0
    from .signal_io import mel_cepstrum, mel_spectrogram

    cep_r = mel_cepstrum(mel_spectrogram(ref_audio, spectral_cfg), n_coeffs)
    cep_s = mel_cepstrum(mel_spectrogram(syn_audio, spectral_cfg), n_coeffs)
    track_r = estimate_f0(ref_audio, pitch_cfg)
    track_s = estimate_f0(syn_audio, pitch_cfg)
    if len(track_r) != len(cep_r) or len(track_s) != len(cep_s):
        raise ValueError("spectral and pitch framing differ; use the same frame length and hop")
    lo, hi = coeff_range if coeff_range is not None else (1, n_coeffs - 1)
    path, _ = dtw_align(cep_r[:, lo:hi + 1], cep_s[:, lo:hi + 1])
    return pitch_report(track_r, track_s, path, gpe_threshold,
                        mcd(cep_r, cep_s, path, (lo, hi)))
