"""File-based pipeline driver.

Every command works inside one workspace directory (``--out``)::

    features/        per-utterance phone features + index.csv
    pitch/           per-utterance pitch tracks
    augmented/       transformed copies + index.csv
    augment_plan.csv
    codebook.json
    labels.csv
    predictor.json, loss_trace.csv
    predictions.csv
    sweep.csv, report.csv, metrics.csv

Run ``phonprosody <command> --help`` for the options of each stage.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import warnings
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import augmentation as aug
from ._fileio import atomic_write_text, fmt, format_csv, read_csv
from .alignment import PhonemeProsody, Utterance, parse_alignment, phoneme_prosody
from .config import ConfigError, PipelineConfig, load_config
from .metrics import compare_audio
from .ordinal_predictor import (PredictorModel, TrainConfig, make_dataset, model_from_json,
                                model_to_json, predict_labels, style_scalars, train)
from .pitch import estimate_f0, process_track, write_track_csv
from .prosody_clustering import (DegenerateSpeakerError, LabelSequence, adapt_speaker,
                                 build_label_sequence, codebook_to_json, decode_duration_token,
                                 denormalize_f0, load_codebook, train_codebook)
from .signal_io import read_wav

log = logging.getLogger("phonprosody")

SWEEP_NOTE = "decoded codebook values stand in for synthesized audio"


class PipelineError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# workspace files

def _write_if_changed(path, text) -> bool:
    path = Path(path)
    if path.exists() and path.read_text(encoding="utf-8") == text:
        return False
    atomic_write_text(path, text)
    return True


def _section_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def read_manifest(path):
    """Rows of a manifest CSV with paths resolved against its directory."""
    path = Path(path)
    if not path.exists():
        raise PipelineError(f"manifest {path} not found")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    seen = set()
    for row in rows:
        uid = row.get("utterance_id")
        if not uid or not row.get("speaker_id"):
            raise PipelineError(f"{path}: every row needs utterance_id and speaker_id")
        if uid in seen:
            raise PipelineError(f"{path}: duplicate utterance_id {uid!r}")
        seen.add(uid)
        for key in ("wav_path", "align_path", "ref_wav", "syn_wav"):
            if row.get(key):
                row[key] = str((path.parent / row[key]).resolve())
    return rows


def _features_text(utt: Utterance, digest: str) -> str:
    rows = [(p.label, fmt(p.mean_log_f0), fmt(p.duration)) for p in utt.phones]
    return format_csv(["phoneme", "mean_log_f0", "duration"], rows,
                      {"utterance_id": utt.utterance_id, "speaker_id": utt.speaker_id,
                       "config_hash": digest})


def _read_features(path, utterance_id, speaker_id) -> Utterance:
    rows, _ = read_csv(path)
    phones = [PhonemeProsody(r["phoneme"], float(r["mean_log_f0"]), float(r["duration"])) for r in rows]
    return Utterance(utterance_id, speaker_id, phones)


def _read_index(directory):
    index = Path(directory) / "index.csv"
    if not index.exists():
        return []
    rows, _ = read_csv(index)
    return rows


def _write_index(directory, entries):
    rows = sorted((e["utterance_id"], e["speaker_id"], e["path"]) for e in entries)
    _write_if_changed(Path(directory) / "index.csv",
                      format_csv(["utterance_id", "speaker_id", "path"], rows))


def load_features(directory):
    directory = Path(directory)
    return [_read_features(directory / r["path"], r["utterance_id"], r["speaker_id"])
            for r in _read_index(directory)]


def _speaker_map(out):
    out = Path(out)
    mapping = {}
    for sub in ("features", "augmented"):
        for r in _read_index(out / sub):
            mapping[r["utterance_id"]] = r["speaker_id"]
    return mapping


def write_labels(path, labels, k, codebook_fingerprint):
    rows = [(seq.utterance_id, i, ph, f, d)
            for seq in labels
            for i, (ph, f, d) in enumerate(zip(seq.phones, seq.f0_tokens, seq.dur_tokens))]
    _write_if_changed(path, format_csv(
        ["utterance_id", "position", "phoneme", "f0_token", "dur_token"], rows,
        {"k": k, "codebook": codebook_fingerprint}))


def read_labels(path):
    """Returns ``(labels, k)`` with labels in file order."""
    if not Path(path).exists():
        raise PipelineError(f"label file {path} not found")
    rows, comments = read_csv(path)
    grouped = defaultdict(list)
    order = []
    for r in rows:
        uid = r["utterance_id"]
        if uid not in grouped:
            order.append(uid)
        grouped[uid].append((int(r["position"]), r["phoneme"], int(r["f0_token"]), int(r["dur_token"])))
    labels = []
    for uid in order:
        items = sorted(grouped[uid])
        labels.append(LabelSequence(uid, tuple(i[1] for i in items),
                                    tuple(i[2] for i in items), tuple(i[3] for i in items)))
    k = int(comments["k"]) if "k" in comments else None
    return labels, k


def _check_k(found, expected, what):
    if found is not None and found != expected:
        raise PipelineError(f"{what} was produced with K={found}, configuration uses K={expected}")


# --------------------------------------------------------------------------
# commands

def _extract_one(row, cfg: PipelineConfig, feat_dir, pitch_dir, digest, force):
    uid = row["utterance_id"]
    out = feat_dir / f"{uid}.csv"
    sources = [Path(row.get("wav_path", "")), Path(row.get("align_path", ""))]
    for src in sources:
        if not src.is_file():
            raise PipelineError(f"{uid}: missing input file {src}")
    if not force and out.exists():
        _, comments = read_csv(out)
        newest = max(s.stat().st_mtime for s in sources)
        if comments.get("config_hash") == digest and out.stat().st_mtime >= newest:
            return uid, row["speaker_id"], False
    audio = read_wav(sources[0])
    segments = parse_alignment(sources[1])
    track = estimate_f0(audio, cfg.pitch.pitch_config())
    records = phoneme_prosody(process_track(track, cfg.pitch.smooth_window), segments)
    if not records:
        raise PipelineError(f"{uid}: alignment has no phone segments")
    write_track_csv(pitch_dir / f"{uid}.csv", track)
    utt = Utterance(uid, row["speaker_id"], records)
    atomic_write_text(out, _features_text(utt, digest))
    return uid, row["speaker_id"], True


def cmd_extract(manifest, out, cfg: PipelineConfig, force=False):
    """Pitch extraction and phone aggregation for every manifest row."""
    out = Path(out)
    feat_dir, pitch_dir = out / "features", out / "pitch"
    feat_dir.mkdir(parents=True, exist_ok=True)
    pitch_dir.mkdir(parents=True, exist_ok=True)
    rows = read_manifest(manifest)
    digest = _section_hash({"pitch": cfg.to_dict()["pitch"]})
    failures, done = [], []
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [(row["utterance_id"], pool.submit(_extract_one, row, cfg, feat_dir, pitch_dir, digest, force))
                   for row in rows]
        for uid, fut in futures:
            try:
                done.append(fut.result())
            except Exception as exc:  # collected and reported per utterance
                msg = str(exc)
                failures.append(msg if msg.startswith(uid) else f"{uid}: {msg}")
    entries = {r["utterance_id"]: r for r in _read_index(feat_dir)}
    for uid, spk, _ in done:
        entries[uid] = {"utterance_id": uid, "speaker_id": spk, "path": f"{uid}.csv"}
    _write_index(feat_dir, entries.values())
    written = sum(1 for *_, w in done if w)
    log.info("extract: %d utterances, %d written, %d failed", len(rows), written, len(failures))
    if failures:
        raise PipelineError("extract failed for:\n  " + "\n  ".join(failures))
    return [uid for uid, *_ in done]


def cmd_augment(out, cfg: PipelineConfig, force=False):
    out = Path(out)
    corpus = load_features(out / "features")
    corpus = [u for u in corpus if not u.speaker_id.endswith(aug.AUG_SUFFIX)]
    if not corpus:
        raise PipelineError("no extracted features to augment; run extract first")
    plan = aug.make_plan([u.utterance_id for u in corpus], cfg.seed)
    rows = [(uid, t.kind, fmt(t.parameter)) for uid, t in sorted(plan.assignments.items())]
    _write_if_changed(out / "augment_plan.csv",
                      format_csv(["utterance_id", "transform_kind", "parameter"], rows))
    aug_dir = out / "augmented"
    aug_dir.mkdir(parents=True, exist_ok=True)
    digest = _section_hash({"seed": cfg.seed, "augmentation": cfg.to_dict()["augmentation"]})
    augmented = aug.augment_corpus(corpus, plan, cfg.augmentation.rate_means_speed)[len(corpus):]
    entries = []
    for u in augmented:
        _write_if_changed(aug_dir / f"{u.utterance_id}.csv", _features_text(u, digest))
        entries.append({"utterance_id": u.utterance_id, "speaker_id": u.speaker_id,
                        "path": f"{u.utterance_id}.csv"})
    _write_index(aug_dir, entries)
    return plan


def _clustering_meta(cfg):
    return {"config_hash": _section_hash({"seed": cfg.seed, "clustering": cfg.to_dict()["clustering"]}),
            "k": cfg.clustering.k}


def cmd_train_codebook(out, cfg: PipelineConfig, force=False):
    out = Path(out)
    corpus = load_features(out / "features")
    if cfg.augmentation.enabled:
        corpus += load_features(out / "augmented")
    if not corpus:
        raise PipelineError("no features found; run extract (and augment) first")
    c = cfg.clustering
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            codebook, stats = train_codebook(corpus, c.k, c.restarts, c.max_iter, cfg.seed,
                                             c.normalize_durations)
        except DegenerateSpeakerError as exc:
            raise PipelineError(f"train-codebook: {exc}") from None
    for w in caught:
        log.warning("%s", w.message)
    _write_if_changed(out / "codebook.json", codebook_to_json(codebook, stats, _clustering_meta(cfg)))
    return codebook, stats


def _load_codebook_checked(out, cfg):
    path = Path(out) / "codebook.json"
    if not path.exists():
        raise PipelineError(f"{path} not found; run train-codebook first")
    codebook, stats, meta = load_codebook(path)
    _check_k(codebook.k, cfg.clustering.k, "codebook")
    return codebook, stats, meta


def cmd_assign_labels(out, cfg: PipelineConfig, include_augmented=False, force=False):
    out = Path(out)
    codebook, stats, _ = _load_codebook_checked(out, cfg)
    corpus = load_features(out / "features")
    if include_augmented:
        corpus += load_features(out / "augmented")
    missing = sorted({u.speaker_id for u in corpus} - set(stats))
    if missing:
        raise PipelineError(f"no speaker statistics for {missing}; run adapt for unseen speakers")
    labels = [build_label_sequence(u, stats, codebook) for u in sorted(corpus, key=lambda u: u.utterance_id)]
    write_labels(out / "labels.csv", labels, codebook.k, codebook.fingerprint())
    return labels


def cmd_adapt(manifest, out, cfg: PipelineConfig, force=False):
    """Extract an unseen speaker's features and add its statistics.

    Centroids and duration intervals are copied through untouched.
    """
    out = Path(out)
    path = out / "codebook.json"
    codebook, stats, meta = _load_codebook_checked(out, cfg)
    uids = set(cmd_extract(manifest, out, cfg, force))
    corpus = [u for u in load_features(out / "features") if u.utterance_id in uids]
    by_spk = defaultdict(list)
    for u in corpus:
        by_spk[u.speaker_id].append(u)
    for spk in sorted(by_spk):
        utts = by_spk[spk]
        f = np.concatenate([u.log_f0 for u in utts])
        d = np.concatenate([u.durations for u in utts]) if codebook.normalize_durations else None
        try:
            stats[spk] = adapt_speaker(f, codebook, spk, d)
        except DegenerateSpeakerError as exc:
            raise PipelineError(f"adapt: {exc}") from None
    _write_if_changed(path, codebook_to_json(codebook, stats, meta))
    return stats


def _parse_range(text, k):
    try:
        lo, _, hi = text.partition(":")
        lo, hi = int(lo), int(hi or lo)
    except ValueError:
        raise PipelineError(f"bad cluster range {text!r}; use FIRST:LAST") from None
    if not 0 <= lo <= hi < k:
        raise PipelineError(f"cluster range {lo}:{hi} outside 0:{k - 1}")
    return range(lo, hi + 1)


def cmd_sweep(out, cfg: PipelineConfig, cluster_range=None, utterance=None, labels_path=None,
              force=False):
    """Decode every position of each utterance to one cluster at a time.

    For each speaker and cluster id the report holds the mean over
    utterances of the utterance-mean decoded F0 (Hz and z-score) and
    duration.  Row ``speaker_id='*'`` pools all utterances.
    """
    out = Path(out)
    codebook, stats, _ = _load_codebook_checked(out, cfg)
    labels, k = read_labels(labels_path or out / "labels.csv")
    _check_k(k, codebook.k, "label file")
    ids = _parse_range(cluster_range, codebook.k) if cluster_range else range(codebook.k)
    if utterance is not None:
        labels = [seq for seq in labels if seq.utterance_id == utterance]
        if not labels:
            raise PipelineError(f"utterance {utterance!r} not in the label file")
    speaker_of = _speaker_map(out)
    per = defaultdict(lambda: defaultdict(list))
    for seq in labels:
        spk = speaker_of.get(seq.utterance_id)
        if spk not in stats:
            raise PipelineError(f"no speaker statistics for utterance {seq.utterance_id!r}")
        for c in ids:
            z = codebook.f0_centroids[c]
            hz = float(np.exp(denormalize_f0(z, stats[spk])))
            dur = float(np.mean([decode_duration_token(c, ph, codebook) for ph in seq.phones]))
            for key in (spk, "*"):
                per[key][c].append((hz, z, dur))
    rows = []
    for spk in sorted(per):
        for c in ids:
            vals = np.array(per[spk][c])
            rows.append((spk, c, fmt(vals[:, 0].mean()), fmt(vals[:, 1].mean()),
                         fmt(vals[:, 2].mean()), len(vals)))
    _write_if_changed(out / "sweep.csv", format_csv(
        ["speaker_id", "cluster_id", "mean_f0_hz", "mean_f0_z", "mean_duration_sec", "n_utterances"],
        rows, {"note": SWEEP_NOTE, "k": codebook.k}))
    return rows


def _split(labels, fraction, seed):
    if fraction <= 0 or len(labels) < 2:
        return labels, []
    order = np.random.default_rng(seed).permutation(len(labels))
    n_val = max(1, int(round(fraction * len(labels))))
    val_idx = set(order[:n_val].tolist())
    return ([s for i, s in enumerate(labels) if i not in val_idx],
            [s for i, s in enumerate(labels) if i in val_idx])


def _predictor_digest(cfg):
    return _section_hash({"seed": cfg.seed, "predictor": cfg.to_dict()["predictor"], "k": cfg.clustering.k})


def cmd_train_predictor(out, cfg: PipelineConfig, labels_path=None, force=False):
    out = Path(out)
    labels, k = read_labels(labels_path or out / "labels.csv")
    _check_k(k, cfg.clustering.k, "label file")
    if not labels:
        raise PipelineError("label file is empty")
    speaker_of = _speaker_map(out)
    missing = sorted({s.utterance_id for s in labels} - set(speaker_of))
    if missing:
        raise PipelineError(f"no speaker known for utterances {missing[:5]}")
    p = cfg.predictor
    model = PredictorModel.create({ph for s in labels for ph in s.phones},
                                  {speaker_of[s.utterance_id] for s in labels},
                                  cfg.clustering.k, p.context, p.emb_dim, p.spk_dim, p.hidden, cfg.seed)
    train_set, val_set = _split(labels, p.val_fraction, cfg.seed)
    tcfg = TrainConfig(p.lr, p.weight_decay, p.epochs, p.batch, cfg.seed)
    model, trace = train(model, make_dataset(model, train_set, speaker_of), tcfg,
                         make_dataset(model, val_set, speaker_of) if val_set else None)
    digest = _predictor_digest(cfg)
    _write_if_changed(out / "predictor.json", model_to_json(model, {"config_hash": digest}))
    _write_if_changed(out / "loss_trace.csv", format_csv(
        ["epoch", "split", "loss", "accuracy_f0", "accuracy_dur"],
        [(e, s, fmt(l), fmt(a), fmt(b)) for e, s, l, a, b in trace], {"config_hash": digest}))
    return model, trace


def cmd_predict(manifest, out, cfg: PipelineConfig, style_labels=None, force=False):
    out = Path(out)
    path = out / "predictor.json"
    if not path.exists():
        raise PipelineError(f"{path} not found; run train-predictor first")
    model, _ = model_from_json(path.read_text(encoding="utf-8"))
    _check_k(model.k, cfg.clustering.k, "predictor checkpoint")
    rows = read_manifest(manifest)
    feats = {u.utterance_id: u for u in load_features(out / "features")}
    styles = {}
    if style_labels:
        gt, k = read_labels(style_labels)
        _check_k(k, model.k, "style label file")
        styles = {s.utterance_id: style_scalars(s.f0_tokens, s.dur_tokens, model.k) for s in gt}
    predictions = []
    for row in sorted(rows, key=lambda r: r["utterance_id"]):
        uid = row["utterance_id"]
        if uid not in feats:
            raise PipelineError(f"{uid}: no extracted features; run extract first")
        predictions.append(predict_labels(model, uid, feats[uid].labels, row["speaker_id"],
                                          styles.get(uid), cfg.predictor.decode_rule))
    write_labels(out / "predictions.csv", predictions, model.k, "predictor")
    return predictions


def label_scores(pred, truth):
    truth_by = {s.utterance_id: s for s in truth}
    f_hat, f_true, d_hat, d_true = [], [], [], []
    for seq in pred:
        gt = truth_by.get(seq.utterance_id)
        if gt is None or gt.phones != seq.phones:
            raise PipelineError(f"{seq.utterance_id}: prediction does not match ground-truth phones")
        f_hat += seq.f0_tokens
        f_true += gt.f0_tokens
        d_hat += seq.dur_tokens
        d_true += gt.dur_tokens
    f_hat, f_true, d_hat, d_true = map(np.asarray, (f_hat, f_true, d_hat, d_true))
    return (len(f_hat), float(np.mean(f_hat == f_true)), float(np.mean(d_hat == d_true)),
            float(np.mean(np.abs(f_hat - f_true))), float(np.mean(np.abs(d_hat - d_true))))


def random_labels(truth, k, seed):
    rng = np.random.default_rng(seed)
    return [LabelSequence(s.utterance_id, s.phones,
                          tuple(int(v) for v in rng.integers(0, k, len(s))),
                          tuple(int(v) for v in rng.integers(0, k, len(s)))) for s in truth]


def cmd_evaluate(out, cfg: PipelineConfig, predictions_path=None, labels_path=None,
                 random_seed=None, audio_manifest=None, force=False):
    """Label-level comparison against ground truth, plus audio metrics when
    an audio manifest (``utterance_id,ref_wav,syn_wav``) is given."""
    out = Path(out)
    truth, k = read_labels(labels_path or out / "labels.csv")
    _check_k(k, cfg.clustering.k, "ground-truth label file")
    pred, pk = read_labels(predictions_path or out / "predictions.csv")
    _check_k(pk, cfg.clustering.k, "prediction file")
    ids = {s.utterance_id for s in pred}
    truth_sub = [s for s in truth if s.utterance_id in ids]
    systems = [("predictor", pred), ("gt_labels", truth_sub)]
    if random_seed is not None:
        systems.append(("random_labels", random_labels(truth_sub, cfg.clustering.k, random_seed)))
    rows = []
    for name, seqs in systems:
        n, af, ad, mf, md = label_scores(seqs, truth_sub)
        rows.append((name, n, fmt(af), fmt(ad), fmt(mf), fmt(md)))
    _write_if_changed(out / "report.csv", format_csv(
        ["system", "n_phones", "accuracy_f0", "accuracy_dur", "mae_f0", "mae_dur"], rows,
        {"k": cfg.clustering.k}))
    metric_rows = None
    if audio_manifest:
        metric_rows = []
        for row in read_manifest(audio_manifest):
            if not row.get("ref_wav") or not row.get("syn_wav"):
                raise PipelineError(f"{row['utterance_id']}: audio manifest needs ref_wav and syn_wav")
            ref, syn = read_wav(row["ref_wav"]), read_wav(row["syn_wav"])
            if ref.sample_rate != syn.sample_rate:
                raise PipelineError(f"{row['utterance_id']}: sample rates differ")
            spectral = cfg.spectral.spectral_config(ref.sample_rate, cfg.pitch)
            rep = compare_audio(ref, syn, spectral, cfg.pitch.pitch_config(), cfg.spectral.n_coeffs,
                                (cfg.metrics.mcd_first_coeff, cfg.spectral.n_coeffs - 1),
                                cfg.metrics.gpe_threshold)
            metric_rows.append((row["utterance_id"], fmt(rep.mcd), fmt(rep.ffe), fmt(rep.vde),
                                fmt(rep.gpe), rep.n_frames, rep.n_both_voiced))
        _write_if_changed(out / "metrics.csv", format_csv(
            ["utterance_id", "mcd", "ffe", "vde", "gpe", "n_frames", "n_both_voiced"], metric_rows))
    return rows, metric_rows


# --------------------------------------------------------------------------
# argument parsing

def _common(p):
    p.add_argument("--config", help="pipeline configuration JSON")
    p.add_argument("--manifest", help="corpus manifest CSV")
    p.add_argument("--out", required=True, help="workspace directory")
    p.add_argument("--seed", type=int, help="overrides the configured seed")
    p.add_argument("--force", action="store_true", help="recompute up-to-date outputs")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="phonprosody", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("extract", "augment", "train-codebook", "adapt", "train-predictor"):
        _common(sub.add_parser(name))
    p = sub.add_parser("assign-labels")
    _common(p)
    p.add_argument("--include-augmented", action="store_true")
    p = sub.add_parser("sweep")
    _common(p)
    p.add_argument("--range", dest="cluster_range", help="FIRST:LAST cluster ids (inclusive)")
    p.add_argument("--utterance", help="restrict the sweep to one utterance")
    p.add_argument("--labels", help="label file (default: <out>/labels.csv)")
    p = sub.add_parser("predict")
    _common(p)
    p.add_argument("--style-labels", help="take style scalars from this label file")
    p = sub.add_parser("evaluate")
    _common(p)
    p.add_argument("--predictions", help="predicted labels (default: <out>/predictions.csv)")
    p.add_argument("--labels", help="ground-truth labels (default: <out>/labels.csv)")
    p.add_argument("--random-labels", type=int, metavar="SEED", help="add a uniform-random baseline")
    return parser


def _need_manifest(args):
    if not args.manifest:
        raise PipelineError(f"{args.command} needs --manifest")
    return args.manifest


def run(args) -> int:
    cfg = load_config(args.config).with_seed(args.seed)
    out = args.out
    c = args.command
    if c == "extract":
        cmd_extract(_need_manifest(args), out, cfg, args.force)
    elif c == "augment":
        cmd_augment(out, cfg, args.force)
    elif c == "train-codebook":
        cmd_train_codebook(out, cfg, args.force)
    elif c == "assign-labels":
        cmd_assign_labels(out, cfg, args.include_augmented, args.force)
    elif c == "adapt":
        cmd_adapt(_need_manifest(args), out, cfg, args.force)
    elif c == "sweep":
        cmd_sweep(out, cfg, args.cluster_range, args.utterance, args.labels, args.force)
    elif c == "train-predictor":
        cmd_train_predictor(out, cfg, force=args.force)
    elif c == "predict":
        cmd_predict(_need_manifest(args), out, cfg, args.style_labels, args.force)
    elif c == "evaluate":
        cmd_evaluate(out, cfg, args.predictions, args.labels, args.random_labels,
                     args.manifest, args.force)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (PipelineError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
