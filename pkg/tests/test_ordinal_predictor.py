import numpy as np
import pytest

from oracles import numeric_grad
from phonprosody.ordinal_predictor import (PAD, PARAM_NAMES, CheckpointVersionError,
                                           PredictorModel, TrainConfig, backward, decode_ordinal,
                                           encode_ordinal, encode_ordinal_batch, evaluate, forward,
                                           loss, make_dataset, make_features, model_from_json,
                                           model_to_json, predict_labels, style_scalars, train)
from phonprosody.prosody_clustering import LabelSequence
from phonprosody.synth import rule_label_corpus


def tiny(seed=0, k=4):
    return PredictorModel.create(["A", "B", "C"], ["s0", "s1"], k, context=1, emb_dim=3,
                                 spk_dim=2, hidden=5, seed=seed)


def test_encode_ordinal():
    assert list(encode_ordinal(3, 5)) == [1, 1, 1, 0, 0]
    assert list(encode_ordinal(5, 5)) == [1] * 5
    np.testing.assert_array_equal(encode_ordinal_batch([0, 4], 5), [encode_ordinal(1, 5), encode_ordinal(5, 5)])
    with pytest.raises(ValueError):
        encode_ordinal(0, 5)
    with pytest.raises(ValueError):
        encode_ordinal_batch([5], 5)


def test_decode_rules():
    p = np.array([0.9, 0.8, 0.3, 0.7, 0.1])
    assert decode_ordinal(p, "first") == 2
    assert decode_ordinal(p, "count") == 3
    assert decode_ordinal(np.full(5, 0.1)) == 1  # clipped up
    assert decode_ordinal(np.full(5, 0.9)) == 5
    assert decode_ordinal(np.array([0.9, 0.5, 0.9])) == 1  # 0.5 counts as off
    for r in range(1, 6):
        assert decode_ordinal(encode_ordinal(r, 5)) == r
    with pytest.raises(ValueError):
        decode_ordinal(p, "median")


def test_loss_clamps():
    assert np.isfinite(loss(np.array([0.0, 1.0]), np.array([1.0, 0.0])))
    assert loss(np.array([0.5]), np.array([1.0])) == pytest.approx(np.log(2))
    with pytest.raises(ValueError):
        loss(np.zeros(3), np.zeros(2))


def test_gradients_match_finite_differences():
    model = tiny(seed=3)
    rng = np.random.default_rng(3)
    phones = list(rng.choice(["A", "B", "C"], 7))
    feats = make_features(model, phones, "s1", style_scalars([0, 1, 3], [2, 2, 1], model.k))
    tf = encode_ordinal_batch(rng.integers(0, 4, 7), 4)
    td = encode_ordinal_batch(rng.integers(0, 4, 7), 4)
    _, grads = backward(model, feats, tf, td)

    def objective():
        pf, pd = forward(model, feats)
        return loss(pf, tf) + loss(pd, td)

    for name in PARAM_NAMES:
        num = numeric_grad(objective, model.params[name])
        err = np.linalg.norm(grads[name] - num) / max(np.linalg.norm(grads[name]) + np.linalg.norm(num), 1e-12)
        assert err < 1e-4, name


def test_clamped_region_has_zero_gradient():
    model = tiny()
    model.params["bf"][:] = 40.0  # every F0 unit saturates at 1
    feats = make_features(model, ["A", "B"], "s0")
    zeros = np.zeros((2, model.k))
    _, grads = backward(model, feats, encode_ordinal_batch([3, 3], 4), zeros + 1)
    assert np.all(grads["bf"] == 0)


def test_padding_and_unknowns():
    model = tiny()
    assert model.phonemes[0] == PAD
    feats = make_features(model, ["A"], "s0")
    assert list(feats.phone_ids[0]) == [0, model.phone_id("A"), 0]
    with pytest.raises(KeyError):
        make_features(model, ["Q"], "s0")
    with pytest.raises(KeyError):
        make_features(model, ["A"], "nobody")


def test_forward_shapes_and_range():
    model = tiny()
    pf, pd = forward(model, make_features(model, ["A", "B", "C"], "s0"))
    assert pf.shape == pd.shape == (3, 4)
    assert np.all((pf > 0) & (pf < 1))


def test_training_reduces_loss_and_leaves_input():
    labels, spk = rule_label_corpus(n_utts=40, k=5, n_speakers=2, noise=0.0, seed=1)
    model = PredictorModel.create({p for s in labels for p in s.phones}, set(spk.values()), 5,
                                  hidden=16, seed=0)
    before = {n: a.copy() for n, a in model.params.items()}
    ds = make_dataset(model, labels, spk)
    trained, trace = train(model, ds, TrainConfig(epochs=8, lr=1e-2))
    assert trace[-1][2] < trace[0][2]
    assert all(np.array_equal(before[n], model.params[n]) for n in before)
    again, trace2 = train(model, ds, TrainConfig(epochs=8, lr=1e-2))
    assert trace == trace2


def test_zero_lr_only_decays():
    model = tiny()
    labels = [LabelSequence("u", ("A", "B"), (1, 2), (0, 3))]
    ds = make_dataset(model, labels, {"u": "s0"})
    trained, _ = train(model, ds, TrainConfig(lr=0.0, weight_decay=0.1, epochs=1, batch=8))
    np.testing.assert_allclose(trained.params["W1"], 0.9 * model.params["W1"])


def test_predict_and_evaluate():
    model = tiny()
    seq = predict_labels(model, "x", ["A", "C"], "s1")
    assert seq.utterance_id == "x" and len(seq) == 2
    assert all(0 <= t < 4 for t in seq.f0_tokens + seq.dur_tokens)
    empty = predict_labels(model, "e", [], "s1")
    assert len(empty) == 0
    ds = make_dataset(model, [LabelSequence("u", ("A",), (0,), (0,))], {"u": "s0"})
    lval, af, ad = evaluate(model, ds)
    assert lval > 0 and af in (0.0, 1.0)


def test_checkpoint_round_trip():
    model = tiny(seed=8)
    model.style_defaults = (0.1, 0.2, 0.3, 0.4)
    text = model_to_json(model, {"config_hash": "x"})
    back, meta = model_from_json(text)
    assert meta == {"config_hash": "x"} and back.phonemes == model.phonemes
    for n in PARAM_NAMES:
        np.testing.assert_array_equal(back.params[n], model.params[n])
    assert model_to_json(back, meta) == text
    with pytest.raises(CheckpointVersionError):
        model_from_json(text.replace('"format_version": 1', '"format_version": 2'))
