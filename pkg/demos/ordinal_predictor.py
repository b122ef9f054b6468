"""
Predicting prosody tokens with ordinal targets
==============================================

Token t is trained as t + 1 leading ones out of K sigmoid outputs.  The
label corpus here follows fixed phone and speaker rules with 3% noise.
"""

import numpy as np

from phonprosody import synth
from phonprosody.ordinal_predictor import (PredictorModel, TrainConfig, encode_ordinal,
                                           make_dataset, predict_labels, train)

print("token 3 of 6 as a target:", encode_ordinal(4, 6))

labels, speaker_of = synth.rule_label_corpus(n_utts=300, k=15, noise=0.03, seed=0)
train_set, test_set = labels[:250], labels[250:]
model = PredictorModel.create({p for s in labels for p in s.phones}, set(speaker_of.values()), k=15)

model, trace = train(model, make_dataset(model, train_set, speaker_of), TrainConfig(epochs=40),
                     val=make_dataset(model, test_set, speaker_of))
for epoch, split, loss, acc_f0, acc_dur in trace[-2:]:
    print(f"epoch {epoch} {split}: loss {loss:.3f}  F0 acc {acc_f0:.3f}  dur acc {acc_dur:.3f}")

seq = test_set[0]
pred = predict_labels(model, seq.utterance_id, seq.phones, speaker_of[seq.utterance_id])
print("phones   ", seq.phones)
print("reference", seq.f0_tokens)
print("predicted", pred.f0_tokens)
print("mean |error|:", np.mean(np.abs(np.subtract(pred.f0_tokens, seq.f0_tokens))))
