"""Feature-space pitch and tempo augmentation.

Each utterance receives exactly one of twelve transforms: a pitch shift of
-6, -4, -2, +2, +4 or +6 semitones, or a tempo change to 0.7, 0.8, 0.9,
1.1, 1.2 or 1.3 times the original speaking rate.  Transforms are applied to
phone-level features directly: a shift of ``s`` semitones adds
``s * ln(2) / 12`` to the mean log-F0 and a speaking rate ``r`` divides the
durations by ``r``.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .alignment import Utterance

SEMITONES = (-6, -4, -2, 2, 4, 6)
RATES = (0.70, 0.80, 0.90, 1.10, 1.20, 1.30)
AUG_SUFFIX = "#aug"

PITCH_SHIFT = "pitch_shift"
TEMPO = "tempo"


@dataclass(frozen=True, order=True)
class Transform:
    kind: str
    parameter: float

    def apply(self, records, rate_means_speed=True):
        if self.kind == PITCH_SHIFT:
            return apply_pitch_shift(records, self.parameter)
        if self.kind == TEMPO:
            return apply_tempo(records, self.parameter, rate_means_speed)
        raise ValueError(f"unknown transform kind {self.kind!r}")


TRANSFORMS = tuple([Transform(PITCH_SHIFT, s) for s in SEMITONES]
                   + [Transform(TEMPO, r) for r in RATES])


@dataclass(frozen=True)
class AugmentPlan:
    assignments: dict  # utterance_id -> Transform
    seed: int

    def counts(self) -> Counter:
        return Counter(self.assignments.values())


def make_plan(utterance_ids, seed: int = 0) -> AugmentPlan:
    """Shuffle the ids with ``seed`` and deal them round-robin into the
    twelve transform sets, so set sizes differ by at most one."""
    ids = list(utterance_ids)
    if not ids:
        raise ValueError("cannot build an augmentation plan for zero utterances")
    if len(set(ids)) != len(ids):
        raise ValueError("utterance ids must be unique")
    order = np.random.default_rng(seed).permutation(len(ids))
    assignments = {ids[j]: TRANSFORMS[pos % len(TRANSFORMS)]
                   for pos, j in enumerate(order)}
    return AugmentPlan(assignments, seed)


def apply_pitch_shift(records, semitones):
    delta = semitones * np.log(2.0) / 12.0
    return [replace(r, mean_log_f0=r.mean_log_f0 + delta) for r in records]


def apply_tempo(records, rate, rate_means_speed=True):
    """Scale durations for a speaking-rate change.

    With ``rate_means_speed`` (the default) a rate of 0.7 means speech 0.7
    times as fast, so every duration grows by ``1 / 0.7``.  Setting it to
    False reads the rate as a duration factor instead.
    """
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    factor = 1.0 / rate if rate_means_speed else rate
    return [replace(r, duration=r.duration * factor) for r in records]


def augment_corpus(corpus, plan: AugmentPlan, rate_means_speed=True):
    """Return the original utterances followed by one transformed copy each.

    ``corpus`` is a sequence of :class:`Utterance`.  Copies are named
    ``<utterance_id>#aug`` and attributed to speaker ``<speaker_id>#aug`` so
    that normalisation statistics are computed for them separately.
    """
    corpus = list(corpus)
    ids = {u.utterance_id for u in corpus}
    if ids != set(plan.assignments):
        missing = sorted(ids - set(plan.assignments))
        extra = sorted(set(plan.assignments) - ids)
        raise ValueError(f"plan does not match corpus (missing={missing[:5]}, extra={extra[:5]})")
    out = list(corpus)
    for u in corpus:
        t = plan.assignments[u.utterance_id]
        out.append(Utterance(u.utterance_id + AUG_SUFFIX, u.speaker_id + AUG_SUFFIX,
                             t.apply(u.phones, rate_means_speed)))
    return out


def write_plan_csv(path, plan: AugmentPlan) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["utterance_id", "transform_kind", "parameter"])
        for uid in sorted(plan.assignments):
            t = plan.assignments[uid]
            w.writerow([uid, t.kind, repr(float(t.parameter))])


def read_plan_csv(path, seed: int = 0) -> AugmentPlan:
    assignments = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            t = Transform(row["transform_kind"], float(row["parameter"]))
            if t not in TRANSFORMS:
                raise ValueError(f"{path}: {t} is not one of the twelve transforms")
            assignments[row["utterance_id"]] = t
    return AugmentPlan(assignments, seed)
