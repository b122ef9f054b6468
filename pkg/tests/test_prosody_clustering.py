import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import contiguous_kmeans_optimum
from phonprosody.alignment import PhonemeProsody, Utterance
from phonprosody.prosody_clustering import (DEFAULT_K, DegenerateSpeakerError, ProsodyCodebook,
                                            UnknownPhonemeError, adapt_speaker, assign_duration_label,
                                            assign_f0_label, assign_nearest,
                                            balanced_duration_clusters, build_label_sequence,
                                            codebook_from_json, codebook_to_json,
                                            compute_speaker_stats, decode_duration_token,
                                            decode_f0_token, denormalize_f0, kmeans_1d,
                                            kmeans_objective, lloyd_1d, normalize_f0,
                                            train_codebook)


def test_default_k():
    assert DEFAULT_K == 15


def test_speaker_stats_population_std():
    s = compute_speaker_stats([1.0, 2.0, 3.0, 4.0])
    assert s.mu == 2.5 and s.sigma == pytest.approx(np.sqrt(1.25))
    z = normalize_f0([1.0, 2.0, 3.0, 4.0], s)
    assert z.mean() == pytest.approx(0, abs=1e-15) and z.std() == pytest.approx(1)
    np.testing.assert_allclose(denormalize_f0(z, s), [1, 2, 3, 4])


@pytest.mark.parametrize("values", [[5.0, 5.0, 5.0], [5.0], [1.0, np.nan]])
def test_speaker_stats_degenerate(values):
    with pytest.raises(DegenerateSpeakerError):
        compute_speaker_stats(values)


def test_assign_nearest_ties_go_low():
    assert list(assign_nearest([0.5, 1.5, -3, 9], [0.0, 1.0, 2.0])) == [0, 1, 0, 2]
    assert list(assign_nearest([0.49, 0.51], [0.0, 1.0])) == [0, 1]


def test_kmeans_separated_groups(rng):
    v = np.concatenate([rng.normal(m, 0.01, 30) for m in (-2, 0, 3)])
    np.testing.assert_allclose(kmeans_1d(v, 3, seed=1), [-2, 0, 3], atol=0.01)


def test_kmeans_k_equals_unique_count():
    np.testing.assert_array_equal(kmeans_1d([3.0, 1.0, 2.0, 1.0], 3), [1, 2, 3])


def test_kmeans_errors():
    with pytest.raises(ValueError):
        kmeans_1d([1.0, 2.0], 3)
    with pytest.raises(ValueError):
        kmeans_1d([1.0, 1.0, 1.0, 2.0], 3)


def test_kmeans_deterministic(rng):
    v = rng.normal(size=200)
    np.testing.assert_array_equal(kmeans_1d(v, 5, seed=4), kmeans_1d(v, 5, seed=4))


def test_lloyd_trace_non_increasing(rng):
    for _ in range(20):
        v = rng.normal(size=60)
        _, _, trace = lloyd_1d(v, rng.choice(v, 6, replace=False))
        assert np.all(np.diff(trace) <= 1e-12)


def test_kmeans_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n, k = int(rng.integers(3, 11)), int(rng.integers(1, 4))
        v = rng.normal(size=n) * rng.uniform(0.1, 5)
        c = kmeans_1d(v, k, restarts=20, seed=int(rng.integers(1 << 30)))
        assert kmeans_objective(v, c) == pytest.approx(contiguous_kmeans_optimum(v, k), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 10), st.floats(-5, 5), st.integers(0, 1000))
def test_tokens_invariant_to_affine_speaker_change(scale, shift, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(5.0, 0.2, 40)
    s = compute_speaker_stats(f)
    g = scale * f + shift
    c = kmeans_1d(normalize_f0(f, s), 4, restarts=3, seed=0)
    z1, z2 = normalize_f0(f, s), normalize_f0(g, compute_speaker_stats(g))
    assert np.max(np.abs(z1 - z2)) < 1e-9
    # tokens only change for values sitting on a decision midpoint
    mids = 0.5 * (c[:-1] + c[1:])
    safe = np.min(np.abs(z1[:, None] - mids[None, :]), axis=1) > 1e-9
    np.testing.assert_array_equal(assign_nearest(z1, c)[safe], assign_nearest(z2, c)[safe])


def test_balanced_clusters_counts_and_medians():
    d = np.arange(1, 33, dtype=float)  # 32 values, k=5 -> sizes 7,7,6,6,6
    b, r = balanced_duration_clusters(d, 5)
    assert len(b) == 4 and len(r) == 5
    np.testing.assert_allclose(b, [7.5, 14.5, 20.5, 26.5])
    np.testing.assert_allclose(r, [4, 11, 17.5, 23.5, 29.5])
    labels = np.searchsorted(b, d, side="left")
    assert list(np.bincount(labels)) == [7, 7, 6, 6, 6]


def test_balanced_clusters_all_equal():
    b, r = balanced_duration_clusters([0.1] * 20, 4)
    assert np.all(np.diff(b) >= 0) and np.all(r == 0.1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=15, max_size=120))
def test_balanced_clusters_property(values):
    b, r = balanced_duration_clusters(values, 15)
    assert np.all(np.diff(b) >= 0) and np.all(np.diff(r) >= 0)


def test_quantile_fallback_warns(feature_corpus):
    extra = Utterance("rare", feature_corpus[0].speaker_id, [PhonemeProsody("ZZ", 5.0, 0.05)])
    with pytest.warns(RuntimeWarning, match="ZZ"):
        cb, _ = train_codebook(feature_corpus + [extra], k=15, restarts=2)
    assert len(cb.duration_boundaries["ZZ"]) == 14


def test_train_codebook_shapes(feature_corpus):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cb, stats = train_codebook(feature_corpus, k=15, restarts=3)
    assert cb.k == 15 and len(cb.f0_centroids) == 15
    assert np.all(np.diff(cb.f0_centroids) > 0)
    assert set(stats) == {u.speaker_id for u in feature_corpus}
    for ph in cb.phonemes:
        assert np.all(np.diff(cb.duration_boundaries[ph]) >= 0)


def test_label_sequence_and_decoding(feature_corpus):
    cb, stats = train_codebook(feature_corpus, k=15, restarts=3)
    u = feature_corpus[0]
    seq = build_label_sequence(u, stats, cb)
    assert len(seq) == len(u.phones)
    assert all(0 <= t < 15 for t in seq.f0_tokens + seq.dur_tokens)
    z = decode_f0_token(np.array(seq.f0_tokens), cb)
    assert np.all(assign_f0_label(z, cb) == np.array(seq.f0_tokens))
    for ph, t in zip(seq.phones, seq.dur_tokens):
        assert assign_duration_label(decode_duration_token(t, ph, cb), ph, cb) == t
    with pytest.raises(UnknownPhonemeError):
        assign_duration_label(0.1, "QQ", cb)


def test_decoded_tokens_are_ordinal(feature_corpus):
    cb, _ = train_codebook(feature_corpus, k=15, restarts=3)
    assert np.all(np.diff(decode_f0_token(np.arange(15), cb)) > 0)
    for ph in cb.phonemes:
        assert np.all(np.diff(decode_duration_token(np.arange(15), ph, cb)) >= 0)


def test_normalized_durations(feature_corpus):
    cb, stats = train_codebook(feature_corpus, k=15, restarts=2, normalize_durations=True)
    assert cb.normalize_durations and all(s.dur_sigma > 0 for s in stats.values())
    seq = build_label_sequence(feature_corpus[1], stats, cb)
    assert len(seq) == len(feature_corpus[1].phones)
    with pytest.raises(ValueError):
        adapt_speaker([5.0, 5.1], cb)


def test_adapt_leaves_codebook_untouched(feature_corpus):
    cb, _ = train_codebook(feature_corpus, k=15, restarts=2)
    before = cb.fingerprint()
    s = adapt_speaker(np.log([110, 120, 130, 95]), cb, "new")
    assert s.speaker_id == "new" and cb.fingerprint() == before


def test_json_round_trip(feature_corpus):
    cb, stats = train_codebook(feature_corpus, k=15, restarts=2)
    text = codebook_to_json(cb, stats, {"config_hash": "abc"})
    cb2, stats2, meta = codebook_from_json(text)
    assert cb2 == cb and stats2 == stats and meta == {"config_hash": "abc"}
    assert codebook_to_json(cb2, stats2, meta) == text
    doc = json.loads(text)
    assert set(doc) >= {"k", "f0_centroids", "durations", "speakers"}


def test_codebook_validation():
    with pytest.raises(ValueError):
        ProsodyCodebook(3, (0.0, 1.0))
    with pytest.raises(ValueError):
        ProsodyCodebook(3, (0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        ProsodyCodebook(3, (0.0, 1.0, 2.0), {"A": (0.2, 0.1)}, {"A": (0.1, 0.15, 0.3)})


def test_pooled_normalised_values_are_centred(feature_corpus):
    _, stats = train_codebook(feature_corpus, k=15, restarts=2)
    pooled = np.concatenate([normalize_f0(u.log_f0, stats[u.speaker_id]) for u in feature_corpus])
    assert abs(pooled.mean()) < 1e-9 * pooled.size


def test_low_and_high_voices_share_tokens(feature_corpus):
    cb, _ = train_codebook(feature_corpus, k=15, restarts=2)
    z = np.linspace(-2.5, 2.5, 21)
    low = compute_speaker_stats(np.log([90.0, 110.0, 100.0]), "low")
    high = compute_speaker_stats(np.log([200.0, 260.0, 230.0]), "high")
    t_low = assign_f0_label(normalize_f0(denormalize_f0(z, low), low), cb)
    t_high = assign_f0_label(normalize_f0(denormalize_f0(z, high), high), cb)
    np.testing.assert_array_equal(t_low, t_high)


def test_readapt_overwrites():
    corpus = [Utterance(f"u{i}", "s", [PhonemeProsody("A", 5 + 0.1 * j, 0.05 + 0.01 * j) for j in range(i + 3)])
              for i in range(6)]
    cb, stats = train_codebook(corpus, k=3, restarts=1)
    stats["new"] = adapt_speaker([4.0, 4.2, 4.4], cb, "new")
    stats["new"] = adapt_speaker([4.5, 4.9], cb, "new")
    assert list(stats) == ["s", "new"] and stats["new"].mu == pytest.approx(4.7)
