"""
A shared prosody codebook for several speakers
==============================================

Per-speaker z-scores put a low and a high voice on one scale, so a single
set of F0 centroids serves both.  Durations get equal-count intervals per
phoneme.
"""

import warnings

import numpy as np

from phonprosody import synth
from phonprosody.augmentation import augment_corpus, make_plan
from phonprosody.prosody_clustering import (adapt_speaker, build_label_sequence,
                                            decode_duration_token, train_codebook)

corpus = synth.feature_corpus(n_utts=30, seed=1)
plan = make_plan([u.utterance_id for u in corpus], seed=1)
corpus = augment_corpus(corpus, plan)
print(f"{len(corpus)} utterances after augmentation")

codebook, stats = train_codebook(corpus, k=15, seed=1)
print("F0 centroids (z):", np.round(codebook.f0_centroids, 2))
for spk in ("spk_f1", "spk_m1"):
    s = stats[spk]
    hz = np.exp(np.asarray(codebook.f0_centroids) * s.sigma + s.mu)
    print(f"{spk}: token 0 -> {hz[0]:.0f} Hz, token 14 -> {hz[-1]:.0f} Hz")

print("AA duration representatives (s):",
      np.round(decode_duration_token(np.arange(15), "AA", codebook), 3))

# an unseen voice only needs its own mean and spread
new = synth.feature_corpus([synth.SyntheticSpeaker("new_voice", 140.0)], n_utts=15, seed=2)
stats["new_voice"] = adapt_speaker(np.concatenate([u.log_f0 for u in new]), codebook, "new_voice")
seq = build_label_sequence(new[0], stats, codebook)
print("new_voice tokens:", list(zip(seq.phones, seq.f0_tokens, seq.dur_tokens)))

# phonemes too rare for 15 intervals fall back to quantiles, with a warning
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    train_codebook(synth.feature_corpus(n_utts=2, seed=3), k=15)
print(f"{len(caught)} phonemes fell back to quantile intervals on a tiny corpus")
