"""Universal prosody codebook: per-speaker F0 z-scores, pooled 1-D K-Means
for F0, equal-count duration intervals per phoneme, and token assignment.

Token indices are ordinal: token ``t + 1`` always decodes to a higher F0 (or
longer duration) than token ``t``.  Indices are zero-based internally.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

DEFAULT_K = 15


class DegenerateSpeakerError(ValueError):
    pass


class UnknownPhonemeError(KeyError):
    pass


@dataclass(frozen=True)
class SpeakerStats:
    speaker_id: str
    mu: float
    sigma: float
    dur_mu: float | None = None
    dur_sigma: float | None = None


@dataclass(frozen=True)
class ProsodyCodebook:
    k: int
    f0_centroids: tuple
    duration_boundaries: dict = field(default_factory=dict)
    duration_representatives: dict = field(default_factory=dict)
    normalize_durations: bool = False

    def __post_init__(self):
        c = np.asarray(self.f0_centroids, dtype=np.float64)
        if c.shape != (self.k,):
            raise ValueError(f"expected {self.k} F0 centroids, got {c.shape}")
        if np.any(np.diff(c) <= 0):
            raise ValueError("F0 centroids must be strictly ascending")
        object.__setattr__(self, "f0_centroids", tuple(float(v) for v in c))
        for ph, b in self.duration_boundaries.items():
            if len(b) != self.k - 1 or np.any(np.diff(b) < 0):
                raise ValueError(f"bad duration boundaries for {ph!r}")
            if len(self.duration_representatives.get(ph, ())) != self.k:
                raise ValueError(f"missing duration representatives for {ph!r}")

    @property
    def phonemes(self):
        return sorted(self.duration_boundaries)

    def fingerprint(self) -> str:
        """Hash of centroids and duration intervals (speaker stats excluded)."""
        payload = json.dumps(_codebook_payload(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class LabelSequence:
    utterance_id: str
    phones: tuple
    f0_tokens: tuple
    dur_tokens: tuple

    def __post_init__(self):
        if not len(self.phones) == len(self.f0_tokens) == len(self.dur_tokens):
            raise ValueError("phones and token sequences must have equal length")

    def __len__(self):
        return len(self.phones)


# --------------------------------------------------------------------------
# normalisation

def compute_speaker_stats(values, speaker_id="", durations=None) -> SpeakerStats:
    """Mean and population standard deviation of a speaker's log-F0 values."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2:
        raise DegenerateSpeakerError(f"speaker {speaker_id!r}: need at least 2 values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise DegenerateSpeakerError(f"speaker {speaker_id!r}: non-finite F0 values")
    mu, sigma = float(v.mean()), float(v.std())
    if not sigma > 0:
        raise DegenerateSpeakerError(f"speaker {speaker_id!r}: F0 has zero spread")
    dur_mu = dur_sigma = None
    if durations is not None:
        d = np.asarray(durations, dtype=np.float64).ravel()
        dur_mu, dur_sigma = float(d.mean()), float(d.std())
        if not dur_sigma > 0:
            raise DegenerateSpeakerError(f"speaker {speaker_id!r}: durations have zero spread")
    return SpeakerStats(speaker_id, mu, sigma, dur_mu, dur_sigma)


def normalize_f0(f, stats: SpeakerStats):
    return (np.asarray(f, dtype=np.float64) - stats.mu) / stats.sigma


def denormalize_f0(z, stats: SpeakerStats):
    return np.asarray(z, dtype=np.float64) * stats.sigma + stats.mu


# --------------------------------------------------------------------------
# 1-D K-Means

def assign_nearest(values, centroids) -> np.ndarray:
    """Nearest-centroid index for ascending ``centroids``; ties go low."""
    c = np.asarray(centroids, dtype=np.float64)
    mids = 0.5 * (c[:-1] + c[1:])
    return np.searchsorted(mids, np.asarray(values, dtype=np.float64), side="left")


def kmeans_objective(values, centroids) -> float:
    v = np.asarray(values, dtype=np.float64)
    c = np.sort(np.asarray(centroids, dtype=np.float64))
    return float(np.sum((v - c[assign_nearest(v, c)]) ** 2))


def lloyd_1d(values, init, max_iter=300, tol=1e-12):
    """Lloyd iterations from ``init``.

    Returns ``(centroids, labels, trace)`` where ``trace`` holds the
    squared-error objective after each assignment step.  An emptied
    cluster is re-seeded at the point currently farthest from its centroid.
    """
    v = np.asarray(values, dtype=np.float64)
    c = np.sort(np.asarray(init, dtype=np.float64))
    k = c.size
    trace = []
    labels = assign_nearest(v, c)
    for _ in range(max_iter):
        trace.append(float(np.sum((v - c[labels]) ** 2)))
        counts = np.bincount(labels, minlength=k)
        sums = np.bincount(labels, weights=v, minlength=k)
        new = c.copy()
        filled = counts > 0
        new[filled] = sums[filled] / counts[filled]
        for j in np.flatnonzero(~filled):
            far = np.argmax(np.abs(v - new[assign_nearest(v, np.sort(new))]))
            new[j] = v[far]
        new = np.sort(new)
        new_labels = assign_nearest(v, new)
        shift = np.max(np.abs(new - c))
        c = new
        if shift <= tol and np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    trace.append(float(np.sum((v - c[labels]) ** 2)))
    return c, labels, trace


def kmeans_1d(values, k, restarts=10, max_iter=300, tol=1e-12, seed=0):
    """Best-of-``restarts`` 1-D K-Means with squared-distance objective.

    Restart 0 is seeded at ``k`` quantiles of the distinct values; later
    restarts draw ``k`` distinct values uniformly at random.  The returned
    centroids are sorted ascending.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if k < 1:
        raise ValueError("k must be at least 1")
    if v.size < k:
        raise ValueError(f"cannot form {k} clusters from {v.size} values")
    uniq = np.unique(v)
    if uniq.size < k:
        raise ValueError(f"only {uniq.size} distinct values for {k} clusters")
    rng = np.random.default_rng(seed)
    best, best_obj = None, np.inf
    for r in range(max(1, restarts)):
        if r == 0:
            pos = np.round((np.arange(k) + 0.5) / k * uniq.size - 0.5).astype(int)
            init = uniq[np.clip(pos, 0, uniq.size - 1)]
        else:
            init = rng.choice(uniq, size=k, replace=False)
        c, _, trace = lloyd_1d(v, init, max_iter=max_iter, tol=tol)
        if trace[-1] < best_obj:
            best, best_obj = c, trace[-1]
    return best


# --------------------------------------------------------------------------
# balanced duration intervals

def balanced_duration_clusters(durations, k):
    """Equal-count intervals over sorted durations.

    Groups are contiguous in sorted order and differ in size by at most one,
    the larger groups first.  Returns ``(boundaries, representatives)``:
    ``k - 1`` midpoints between adjacent groups and the ``k`` group medians.
    """
    d = np.sort(np.asarray(durations, dtype=np.float64).ravel())
    n = d.size
    if n < k:
        raise ValueError(f"cannot form {k} duration groups from {n} values")
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    ends = np.cumsum(sizes)
    starts = ends - sizes
    boundaries = 0.5 * (d[ends[:-1] - 1] + d[starts[1:]])
    reps = np.array([np.median(d[s:e]) for s, e in zip(starts, ends)])
    return boundaries, reps


def quantile_duration_clusters(durations, k):
    """Fallback for phonemes with fewer than ``k`` samples."""
    d = np.sort(np.asarray(durations, dtype=np.float64).ravel())
    reps = np.quantile(d, (np.arange(k) + 0.5) / k)
    return 0.5 * (reps[:-1] + reps[1:]), reps


# --------------------------------------------------------------------------
# assignment

def assign_f0_label(value, codebook: ProsodyCodebook):
    out = assign_nearest(value, codebook.f0_centroids)
    return int(out) if np.ndim(out) == 0 else out


def assign_duration_label(duration, phoneme, codebook: ProsodyCodebook):
    """Interval index: the number of boundaries strictly below ``duration``."""
    try:
        b = codebook.duration_boundaries[phoneme]
    except KeyError:
        raise UnknownPhonemeError(phoneme) from None
    out = np.searchsorted(np.asarray(b), duration, side="left")
    return int(out) if np.ndim(out) == 0 else out


def decode_f0_token(token, codebook: ProsodyCodebook):
    return np.asarray(codebook.f0_centroids)[token]


def decode_duration_token(token, phoneme, codebook: ProsodyCodebook):
    try:
        reps = codebook.duration_representatives[phoneme]
    except KeyError:
        raise UnknownPhonemeError(phoneme) from None
    return np.asarray(reps)[token]


def _duration_feature(durations, stats, codebook):
    if codebook.normalize_durations:
        return (durations - stats.dur_mu) / stats.dur_sigma
    return durations


def build_label_sequence(utterance, stats, codebook: ProsodyCodebook) -> LabelSequence:
    """Tokenise an :class:`~phonprosody.alignment.Utterance`.

    ``stats`` maps speaker id to :class:`SpeakerStats`.
    """
    try:
        s = stats[utterance.speaker_id]
    except KeyError:
        raise KeyError(f"no speaker stats for {utterance.speaker_id!r}") from None
    labels = utterance.labels
    f0_tok = assign_nearest(normalize_f0(utterance.log_f0, s), codebook.f0_centroids)
    dur = _duration_feature(utterance.durations, s, codebook)
    dur_tok = [assign_duration_label(d, ph, codebook) for d, ph in zip(dur, labels)]
    return LabelSequence(utterance.utterance_id, tuple(labels),
                         tuple(int(t) for t in f0_tok), tuple(int(t) for t in dur_tok))


def adapt_speaker(values, codebook: ProsodyCodebook, speaker_id="", durations=None) -> SpeakerStats:
    """Statistics for an unseen speaker against a fixed codebook.

    The codebook is only read; nothing about it is recomputed.
    """
    if codebook.normalize_durations and durations is None:
        raise ValueError("codebook uses normalised durations; pass the speaker's durations")
    return compute_speaker_stats(values, speaker_id, durations)


# --------------------------------------------------------------------------
# training

def train_codebook(utterances, k=DEFAULT_K, restarts=10, max_iter=300, seed=0,
                   normalize_durations=False):
    """Fit the universal codebook on a corpus of utterances.

    Returns ``(codebook, stats)`` with ``stats`` keyed by speaker id.  F0 is
    z-scored per speaker, pooled across speakers and clustered with 1-D
    K-Means; durations are grouped per phoneme into equal-count intervals.
    Phonemes with fewer than ``k`` samples fall back to quantiles, with a
    warning.
    """
    by_speaker = defaultdict(list)
    for u in utterances:
        by_speaker[u.speaker_id].append(u)
    if not by_speaker:
        raise ValueError("empty corpus")

    stats = {}
    pooled = []
    for spk in sorted(by_speaker):
        utts = by_speaker[spk]
        f = np.concatenate([u.log_f0 for u in utts])
        d = np.concatenate([u.durations for u in utts]) if normalize_durations else None
        stats[spk] = compute_speaker_stats(f, spk, d)
        pooled.append(normalize_f0(f, stats[spk]))
    centroids = kmeans_1d(np.concatenate(pooled), k, restarts=restarts,
                          max_iter=max_iter, seed=seed)

    per_phone = defaultdict(list)
    for spk in sorted(by_speaker):
        for u in by_speaker[spk]:
            dur = u.durations
            if normalize_durations:
                dur = (dur - stats[spk].dur_mu) / stats[spk].dur_sigma
            for ph, dv in zip(u.labels, dur):
                per_phone[ph].append(dv)
    boundaries, reps = {}, {}
    for ph in sorted(per_phone):
        vals = per_phone[ph]
        if len(vals) >= k:
            b, r = balanced_duration_clusters(vals, k)
        else:
            warnings.warn(f"phoneme {ph!r} has {len(vals)} duration samples (< {k}); "
                          "using quantile intervals", RuntimeWarning, stacklevel=2)
            b, r = quantile_duration_clusters(vals, k)
        boundaries[ph] = tuple(float(x) for x in b)
        reps[ph] = tuple(float(x) for x in r)
    codebook = ProsodyCodebook(k, tuple(centroids), boundaries, reps, normalize_durations)
    return codebook, stats


# --------------------------------------------------------------------------
# persistence

def _codebook_payload(cb: ProsodyCodebook):
    return {
        "k": cb.k,
        "f0_centroids": list(cb.f0_centroids),
        "durations": {ph: {"boundaries": list(cb.duration_boundaries[ph]),
                           "representatives": list(cb.duration_representatives[ph])}
                      for ph in sorted(cb.duration_boundaries)},
        "normalize_durations": cb.normalize_durations,
    }


def codebook_to_json(codebook: ProsodyCodebook, stats, meta=None) -> str:
    doc = _codebook_payload(codebook)
    doc["speakers"] = {}
    for spk in sorted(stats):
        s = stats[spk]
        entry = {"mu": s.mu, "sigma": s.sigma}
        if s.dur_mu is not None:
            entry.update(dur_mu=s.dur_mu, dur_sigma=s.dur_sigma)
        doc["speakers"][spk] = entry
    if meta:
        doc["meta"] = dict(meta)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def codebook_from_json(text: str):
    """Parse a codebook document; returns ``(codebook, stats, meta)``."""
    doc = json.loads(text)
    durs = doc.get("durations", {})
    cb = ProsodyCodebook(
        int(doc["k"]), tuple(doc["f0_centroids"]),
        {ph: tuple(v["boundaries"]) for ph, v in durs.items()},
        {ph: tuple(v["representatives"]) for ph, v in durs.items()},
        bool(doc.get("normalize_durations", False)))
    stats = {spk: SpeakerStats(spk, v["mu"], v["sigma"], v.get("dur_mu"), v.get("dur_sigma"))
             for spk, v in doc.get("speakers", {}).items()}
    return cb, stats, doc.get("meta", {})


def save_codebook(path, codebook, stats, meta=None):
    from ._fileio import atomic_write_text
    atomic_write_text(path, codebook_to_json(codebook, stats, meta))


def load_codebook(path):
    with open(path, encoding="utf-8") as fh:
        return codebook_from_json(fh.read())
