from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phonprosody.alignment import PhonemeProsody, Utterance
from phonprosody.augmentation import (PITCH_SHIFT, RATES, SEMITONES, TEMPO, TRANSFORMS, Transform,
                                      apply_pitch_shift, apply_tempo, augment_corpus, make_plan,
                                      read_plan_csv, write_plan_csv)


def recs(f0=(5.29832, 4.9), dur=(0.1, 0.2)):
    return [PhonemeProsody(f"P{i}", f, d) for i, (f, d) in enumerate(zip(f0, dur))]


def corpus(n):
    rng = np.random.default_rng(n)
    return [Utterance(f"u{i}", f"s{i % 3}", recs(rng.uniform(4, 6, 4), rng.uniform(0.03, 0.2, 4)))
            for i in range(n)]


def test_twelve_transform_values():
    assert SEMITONES == (-6, -4, -2, 2, 4, 6)
    assert RATES == (0.70, 0.80, 0.90, 1.10, 1.20, 1.30)
    assert len(set(TRANSFORMS)) == 12


@pytest.mark.parametrize("n,sizes", [(24, {2: 12}), (13, {2: 1, 1: 11}), (12, {1: 12})])
def test_plan_set_sizes(n, sizes):
    plan = make_plan([f"u{i}" for i in range(n)], seed=7)
    assert Counter(plan.counts().values()) == sizes


def test_plan_deterministic_and_seed_dependent():
    ids = [f"u{i}" for i in range(50)]
    assert make_plan(ids, 3).assignments == make_plan(ids, 3).assignments
    assert make_plan(ids, 3).assignments != make_plan(ids, 4).assignments


def test_plan_errors():
    with pytest.raises(ValueError):
        make_plan([], 0)
    with pytest.raises(ValueError):
        make_plan(["a", "a"], 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 100), st.integers(0, 2**31))
def test_plan_balance_property(n, seed):
    plan = make_plan([f"u{i}" for i in range(n)], seed)
    assert len(plan.assignments) == n
    counts = [plan.counts().get(t, 0) for t in TRANSFORMS]
    assert max(counts) - min(counts) <= 1
    full_cycles = n // 12
    assert all(c >= full_cycles for c in counts)


def test_pitch_shift_values():
    out = apply_pitch_shift(recs(), 6)
    assert out[0].mean_log_f0 - 5.29832 == pytest.approx(0.34657, abs=1e-5)
    assert np.exp(out[0].mean_log_f0) == pytest.approx(np.exp(5.29832) * np.sqrt(2))
    assert [r.duration for r in out] == [r.duration for r in recs()]
    assert apply_pitch_shift(recs(), 0) == recs()
    back = apply_pitch_shift(out, -6)
    np.testing.assert_allclose([r.mean_log_f0 for r in back], [r.mean_log_f0 for r in recs()], atol=1e-12)


def test_tempo_values():
    assert apply_tempo(recs(), 1.0) == recs()
    assert apply_tempo(recs(dur=(0.1, 0.1)), 2.0)[0].duration == pytest.approx(0.05)
    out = apply_tempo(recs(), 0.5)
    np.testing.assert_allclose([r.duration for r in out], [0.2, 0.4])
    assert [r.mean_log_f0 for r in out] == [r.mean_log_f0 for r in recs()]
    assert apply_tempo(recs(dur=(0.1, 0.1)), 0.7, rate_means_speed=False)[0].duration == pytest.approx(0.07)
    with pytest.raises(ValueError):
        apply_tempo(recs(), 0.0)


def test_shift_and_tempo_commute():
    a = apply_tempo(apply_pitch_shift(recs(), 4), 1.2)
    b = apply_pitch_shift(apply_tempo(recs(), 1.2), 4)
    assert a == b


def test_augment_doubles_corpus():
    c = corpus(50)
    out = augment_corpus(c, make_plan([u.utterance_id for u in c], 1))
    assert len(out) == 100
    assert out[:50] == c
    aug = {u.utterance_id: u for u in out[50:]}
    assert set(aug) == {u.utterance_id + "#aug" for u in c}
    assert all(u.speaker_id.endswith("#aug") for u in aug.values())


def test_augment_copy_semantics():
    c = corpus(24)
    plan = make_plan([u.utterance_id for u in c], 2)
    out = {u.utterance_id: u for u in augment_corpus(c, plan)}
    for u in c:
        t = plan.assignments[u.utterance_id]
        copy = out[u.utterance_id + "#aug"]
        if t.kind == PITCH_SHIFT:
            np.testing.assert_array_equal(copy.durations, u.durations)
        else:
            np.testing.assert_array_equal(copy.log_f0, u.log_f0)
    # a rate of 1.0 leaves the copy equal to the source
    assert Transform(TEMPO, 1.0).apply(c[0].phones) == list(c[0].phones)


def test_augment_widens_f0_range():
    c = corpus(36)
    out = augment_corpus(c, make_plan([u.utterance_id for u in c], 0))
    rng_orig = np.ptp(np.concatenate([u.log_f0 for u in c]))
    rng_aug = np.ptp(np.concatenate([u.log_f0 for u in out]))
    assert rng_aug >= rng_orig


def test_augment_plan_mismatch():
    c = corpus(5)
    with pytest.raises(ValueError):
        augment_corpus(c, make_plan(["x", "y"], 0))


def test_plan_csv_round_trip(tmp_path):
    plan = make_plan([f"u{i}" for i in range(30)], 9)
    write_plan_csv(tmp_path / "plan.csv", plan)
    assert (tmp_path / "plan.csv").read_text().splitlines()[0] == "utterance_id,transform_kind,parameter"
    assert read_plan_csv(tmp_path / "plan.csv", 9).assignments == plan.assignments
