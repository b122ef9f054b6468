"""Phone-level prosody token predictor with ordinal (cumulative) targets.

A token ``t`` in ``[0, K)`` is trained as rank ``r = t + 1`` encoded as the
bit vector ``[1] * r + [0] * (K - r)``; each output unit is an independent
sigmoid scored with binary cross-entropy.  The network is a small
feed-forward trunk over a window of phoneme embeddings, a speaker
embedding and four utterance-level style scalars, with separate F0 and
duration heads.  Gradients are derived by hand and checked against finite
differences in the test-suite.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .prosody_clustering import LabelSequence

PAD = "<pad>"
P_MIN = 1e-7
CHECKPOINT_VERSION = 1
PARAM_NAMES = ("phone_emb", "spk_emb", "W1", "b1", "W2", "b2", "Wf", "bf", "Wd", "bd")


class CheckpointVersionError(ValueError):
    pass


# --------------------------------------------------------------------------
# ordinal encoding

def encode_ordinal(rank, k):
    if not 1 <= rank <= k:
        raise ValueError(f"rank {rank} outside [1, {k}]")
    bits = np.zeros(k)
    bits[:rank] = 1.0
    return bits


def encode_ordinal_batch(tokens, k):
    """Rows of cumulative targets for zero-based ``tokens``."""
    t = np.asarray(tokens, dtype=int)
    if np.any(t < 0) or np.any(t >= k):
        raise ValueError("token outside [0, k)")
    return (np.arange(k)[None, :] <= t[:, None]).astype(np.float64)


def decode_ordinal(probs, rule="first"):
    """Rank from cumulative probabilities.

    ``rule="first"`` scans left to right and stops at the first unit with
    probability <= 0.5; ``rule="count"`` counts units above 0.5.  Either way
    the result is clipped to ``[1, K]``.
    """
    p = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    k = p.shape[1]
    above = p > 0.5
    if rule == "first":
        ranks = np.where(above.all(axis=1), k, np.argmin(above, axis=1))
    elif rule == "count":
        ranks = above.sum(axis=1)
    else:
        raise ValueError(f"unknown decoding rule {rule!r}")
    ranks = np.clip(ranks, 1, k)
    return int(ranks[0]) if np.ndim(probs) == 1 else ranks


# --------------------------------------------------------------------------
# model

@dataclass
class PredictorModel:
    params: dict
    phonemes: list  # index 0 is the padding sentinel
    speakers: list
    k: int
    context: int = 2
    style_defaults: tuple = (0.0, 0.0, 0.0, 0.0)
    _phone_index: dict = field(init=False, repr=False)
    _speaker_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._phone_index = {p: i for i, p in enumerate(self.phonemes)}
        self._speaker_index = {s: i for i, s in enumerate(self.speakers)}

    @classmethod
    def create(cls, phonemes, speakers, k, context=2, emb_dim=16, spk_dim=8,
               hidden=64, seed=0):
        rng = np.random.default_rng(seed)
        vocab = [PAD] + sorted(set(phonemes) - {PAD})
        spks = sorted(set(speakers))
        d_in = (2 * context + 1) * emb_dim + spk_dim + 4

        def glorot(fan_in, fan_out):
            return rng.uniform(-1, 1, (fan_in, fan_out)) * np.sqrt(6.0 / (fan_in + fan_out))

        params = {
            "phone_emb": 0.1 * rng.standard_normal((len(vocab), emb_dim)),
            "spk_emb": 0.1 * rng.standard_normal((len(spks), spk_dim)),
            "W1": glorot(d_in, hidden), "b1": np.zeros(hidden),
            "W2": glorot(hidden, hidden), "b2": np.zeros(hidden),
            "Wf": glorot(hidden, k), "bf": np.zeros(k),
            "Wd": glorot(hidden, k), "bd": np.zeros(k),
        }
        return cls(params, vocab, spks, k, context)

    def copy(self):
        return PredictorModel({n: a.copy() for n, a in self.params.items()}, list(self.phonemes),
                              list(self.speakers), self.k, self.context, tuple(self.style_defaults))

    def phone_id(self, label):
        try:
            return self._phone_index[label]
        except KeyError:
            raise KeyError(f"phoneme {label!r} not in predictor vocabulary") from None

    def speaker_id(self, speaker):
        try:
            return self._speaker_index[speaker]
        except KeyError:
            raise KeyError(f"speaker {speaker!r} not known to the predictor") from None


@dataclass(frozen=True)
class PredictorFeatures:
    phone_ids: np.ndarray  # [M, 2C+1]
    speaker_ids: np.ndarray  # [M]
    scalars: np.ndarray  # [M, 4]

    def __len__(self):
        return self.phone_ids.shape[0]


def style_scalars(f0_tokens, dur_tokens, k):
    """Utterance mean/std of F0 and duration tokens, scaled to about [0, 1]."""
    f = np.asarray(f0_tokens, dtype=np.float64)
    d = np.asarray(dur_tokens, dtype=np.float64)
    return np.array([f.mean(), f.std(), d.mean(), d.std()]) / max(k - 1, 1)


def make_features(model: PredictorModel, phones, speaker, style=None) -> PredictorFeatures:
    """Windowed phoneme ids, speaker id and style scalars for each phone.

    ``style`` is the 4-vector from :func:`style_scalars`; when omitted the
    model's corpus-average style is used.
    """
    ids = np.array([model.phone_id(p) for p in phones], dtype=int)
    m, c = ids.size, model.context
    padded = np.concatenate([np.zeros(c, dtype=int), ids, np.zeros(c, dtype=int)])
    window = np.stack([padded[i:i + m] for i in range(2 * c + 1)], axis=1) if m else np.zeros((0, 2 * c + 1), int)
    spk = np.full(m, model.speaker_id(speaker), dtype=int)
    s = np.asarray(model.style_defaults if style is None else style, dtype=np.float64)
    return PredictorFeatures(window, spk, np.tile(s, (m, 1)))


def concat_features(feats):
    feats = list(feats)
    return PredictorFeatures(np.concatenate([f.phone_ids for f in feats]),
                             np.concatenate([f.speaker_ids for f in feats]),
                             np.concatenate([f.scalars for f in feats]))


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _forward_cache(model, feats):
    p = model.params
    m = len(feats)
    emb = p["phone_emb"][feats.phone_ids].reshape(m, -1)
    x = np.concatenate([emb, p["spk_emb"][feats.speaker_ids], feats.scalars], axis=1)
    h1 = np.tanh(x @ p["W1"] + p["b1"])
    h2 = np.tanh(h1 @ p["W2"] + p["b2"])
    pf = _sigmoid(h2 @ p["Wf"] + p["bf"])
    pd = _sigmoid(h2 @ p["Wd"] + p["bd"])
    return x, h1, h2, pf, pd


def forward(model: PredictorModel, feats: PredictorFeatures):
    """Cumulative probabilities ``(f0_probs, dur_probs)``, each ``[M, K]``."""
    if feats.phone_ids.size and (feats.phone_ids.min() < 0 or feats.phone_ids.max() >= len(model.phonemes)):
        raise KeyError("phoneme id outside the vocabulary")
    if feats.speaker_ids.size and (feats.speaker_ids.min() < 0 or feats.speaker_ids.max() >= len(model.speakers)):
        raise KeyError("speaker id outside the speaker table")
    _, _, _, pf, pd = _forward_cache(model, feats)
    return pf, pd


def loss(probs, target):
    """Summed binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7]."""
    p = np.clip(np.asarray(probs, dtype=np.float64), P_MIN, 1.0 - P_MIN)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError(f"probability shape {p.shape} does not match target {t.shape}")
    return float(-np.sum(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)))


def _logit_grad(p, t):
    # derivative of the clamped BCE w.r.t. the pre-sigmoid activation
    inside = (p > P_MIN) & (p < 1.0 - P_MIN)
    return np.where(inside, p - t, 0.0)


def backward(model: PredictorModel, feats: PredictorFeatures, f0_target, dur_target):
    """Loss and exact gradients for every parameter array.

    Targets are ``[M, K]`` cumulative bit matrices.  Returns
    ``(loss_value, grads)`` with ``grads`` keyed like ``model.params``.
    """
    p = model.params
    x, h1, h2, pf, pd = _forward_cache(model, feats)
    total = loss(pf, f0_target) + loss(pd, dur_target)
    gf = _logit_grad(pf, f0_target)
    gd = _logit_grad(pd, dur_target)
    g = {"Wf": h2.T @ gf, "bf": gf.sum(0), "Wd": h2.T @ gd, "bd": gd.sum(0)}
    dz2 = (gf @ p["Wf"].T + gd @ p["Wd"].T) * (1.0 - h2 ** 2)
    g["W2"], g["b2"] = h1.T @ dz2, dz2.sum(0)
    dz1 = (dz2 @ p["W2"].T) * (1.0 - h1 ** 2)
    g["W1"], g["b1"] = x.T @ dz1, dz1.sum(0)
    dx = dz1 @ p["W1"].T

    m, width = feats.phone_ids.shape
    e = p["phone_emb"].shape[1]
    s = p["spk_emb"].shape[1]
    g["phone_emb"] = np.zeros_like(p["phone_emb"])
    np.add.at(g["phone_emb"], feats.phone_ids.ravel(), dx[:, :width * e].reshape(-1, e))
    g["spk_emb"] = np.zeros_like(p["spk_emb"])
    np.add.at(g["spk_emb"], feats.speaker_ids, dx[:, width * e:width * e + s])
    return total, g


# --------------------------------------------------------------------------
# training

@dataclass(frozen=True)
class TrainConfig:
    lr: float = 3e-3
    weight_decay: float = 1e-6
    epochs: int = 40
    batch: int = 64
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class TrainingExample:
    features: PredictorFeatures
    f0_tokens: np.ndarray
    dur_tokens: np.ndarray


def make_dataset(model, labels, speakers):
    """Training examples from label sequences; ``speakers`` maps utterance id
    to speaker id.  Style scalars come from each utterance's own tokens."""
    out = []
    for seq in labels:
        style = style_scalars(seq.f0_tokens, seq.dur_tokens, model.k)
        feats = make_features(model, seq.phones, speakers[seq.utterance_id], style)
        out.append(TrainingExample(feats, np.asarray(seq.f0_tokens), np.asarray(seq.dur_tokens)))
    return out


def _stack(dataset, k):
    feats = concat_features(ex.features for ex in dataset)
    tf = np.concatenate([ex.f0_tokens for ex in dataset]).astype(int)
    td = np.concatenate([ex.dur_tokens for ex in dataset]).astype(int)
    return feats, tf, td


def _take(feats, idx):
    return PredictorFeatures(feats.phone_ids[idx], feats.speaker_ids[idx], feats.scalars[idx])


def evaluate(model, dataset, decode_rule="first"):
    """Mean per-phone loss and exact-token accuracy for both heads."""
    feats, tf, td = _stack(dataset, model.k)
    pf, pd = forward(model, feats)
    total = loss(pf, encode_ordinal_batch(tf, model.k)) + loss(pd, encode_ordinal_batch(td, model.k))
    f_hat = decode_ordinal(pf, decode_rule) - 1
    d_hat = decode_ordinal(pd, decode_rule) - 1
    return total / len(feats), float(np.mean(f_hat == tf)), float(np.mean(d_hat == td))


def train(model: PredictorModel, dataset, cfg: TrainConfig = TrainConfig(), val=None):
    """Adam with decoupled weight decay over shuffled mini-batches of phones.

    Returns ``(trained_model, trace)``; ``trace`` rows are
    ``(epoch, split, loss, accuracy_f0, accuracy_dur)`` measured after each
    epoch.  The input model is not modified.  The decay step ``wd * param``
    is not scaled by the learning rate.
    """
    if not dataset:
        raise ValueError("training set is empty")
    model = model.copy()
    feats, tf, td = _stack(dataset, model.k)
    bits_f = encode_ordinal_batch(tf, model.k)
    bits_d = encode_ordinal_batch(td, model.k)
    styles = np.array([ex.features.scalars[0] for ex in dataset if len(ex.features)])
    model.style_defaults = tuple(float(v) for v in styles.mean(axis=0))

    rng = np.random.default_rng(cfg.seed)
    m1 = {n: np.zeros_like(a) for n, a in model.params.items()}
    m2 = {n: np.zeros_like(a) for n, a in model.params.items()}
    t = 0
    trace = []
    n = len(feats)
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch):
            idx = order[start:start + cfg.batch]
            _, grads = backward(model, _take(feats, idx), bits_f[idx], bits_d[idx])
            t += 1
            for name, param in model.params.items():
                g = grads[name]
                m1[name] = cfg.beta1 * m1[name] + (1 - cfg.beta1) * g
                m2[name] = cfg.beta2 * m2[name] + (1 - cfg.beta2) * g * g
                mhat = m1[name] / (1 - cfg.beta1 ** t)
                vhat = m2[name] / (1 - cfg.beta2 ** t)
                param -= cfg.lr * mhat / (np.sqrt(vhat) + cfg.eps) + cfg.weight_decay * param
        trace.append((epoch, "train") + evaluate(model, dataset))
        if val:
            trace.append((epoch, "val") + evaluate(model, val))
    return model, trace


def predict_labels(model: PredictorModel, utterance_id, phones, speaker, style=None,
                   decode_rule="first") -> LabelSequence:
    feats = make_features(model, phones, speaker, style)
    if not len(feats):
        return LabelSequence(utterance_id, (), (), ())
    pf, pd = forward(model, feats)
    f = np.atleast_1d(decode_ordinal(pf, decode_rule)) - 1
    d = np.atleast_1d(decode_ordinal(pd, decode_rule)) - 1
    return LabelSequence(utterance_id, tuple(phones), tuple(int(v) for v in f), tuple(int(v) for v in d))


# --------------------------------------------------------------------------
# checkpoints

def model_to_json(model: PredictorModel, meta=None) -> str:
    doc = {
        "format_version": CHECKPOINT_VERSION,
        "k": model.k,
        "context": model.context,
        "phonemes": list(model.phonemes),
        "speakers": list(model.speakers),
        "style_defaults": list(model.style_defaults),
        "shapes": {n: list(model.params[n].shape) for n in PARAM_NAMES},
        "params": {n: model.params[n].ravel().tolist() for n in PARAM_NAMES},
    }
    if meta:
        doc["meta"] = dict(meta)
    return json.dumps(doc, sort_keys=True) + "\n"


def model_from_json(text: str):
    """Returns ``(model, meta)``."""
    doc = json.loads(text)
    if doc.get("format_version") != CHECKPOINT_VERSION:
        raise CheckpointVersionError(
            f"checkpoint format {doc.get('format_version')!r}, expected {CHECKPOINT_VERSION}")
    params = {n: np.array(doc["params"][n], dtype=np.float64).reshape(doc["shapes"][n])
              for n in PARAM_NAMES}
    model = PredictorModel(params, doc["phonemes"], doc["speakers"], int(doc["k"]),
                           int(doc["context"]), tuple(doc["style_defaults"]))
    return model, doc.get("meta", {})
