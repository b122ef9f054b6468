"""Pipeline configuration: one JSON document, validated before any stage runs.

Unknown keys are rejected so that a misspelt parameter fails loudly instead
of silently falling back to its default.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from .pitch import PitchConfig
from .signal_io import SpectralConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PitchSection:
    frame_sec: float = 0.040
    hop_sec: float = 0.010
    f0_min: float = 60.0
    f0_max: float = 500.0
    voicing_threshold: float = 0.45
    silence_rms: float = 1e-4
    smooth_window: int = 5

    def pitch_config(self) -> PitchConfig:
        return PitchConfig(self.frame_sec, self.hop_sec, self.f0_min, self.f0_max,
                           self.voicing_threshold, self.silence_rms)


@dataclass(frozen=True)
class SpectralSection:
    n_fft: int | None = None  # next power of two above the frame length
    n_mels: int = 40
    fmin: float = 0.0
    fmax: float | None = None  # Nyquist
    n_coeffs: int = 25

    def spectral_config(self, sample_rate: int, pitch: PitchSection) -> SpectralConfig:
        """Spectral framing follows the pitch framing so frames line up."""
        frame_len = int(round(pitch.frame_sec * sample_rate))
        hop = int(round(pitch.hop_sec * sample_rate))
        n_fft = self.n_fft or 1 << (frame_len - 1).bit_length()
        fmax = self.fmax if self.fmax is not None else sample_rate / 2
        return SpectralConfig(frame_len, hop, n_fft, self.n_mels, self.fmin, fmax)


@dataclass(frozen=True)
class ClusteringSection:
    k: int = 15
    restarts: int = 10
    max_iter: int = 300
    normalize_durations: bool = False


@dataclass(frozen=True)
class AugmentationSection:
    enabled: bool = True
    rate_means_speed: bool = True


@dataclass(frozen=True)
class PredictorSection:
    context: int = 2
    emb_dim: int = 16
    spk_dim: int = 8
    hidden: int = 64
    lr: float = 3e-3
    weight_decay: float = 1e-6
    epochs: int = 40
    batch: int = 64
    val_fraction: float = 0.1
    decode_rule: str = "first"


@dataclass(frozen=True)
class MetricsSection:
    gpe_threshold: float = 0.2
    mcd_first_coeff: int = 1


@dataclass(frozen=True)
class PipelineConfig:
    pitch: PitchSection = field(default_factory=PitchSection)
    spectral: SpectralSection = field(default_factory=SpectralSection)
    clustering: ClusteringSection = field(default_factory=ClusteringSection)
    augmentation: AugmentationSection = field(default_factory=AugmentationSection)
    predictor: PredictorSection = field(default_factory=PredictorSection)
    metrics: MetricsSection = field(default_factory=MetricsSection)
    seed: int = 0
    workers: int = 1

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_seed(self, seed):
        return self if seed is None else dataclasses.replace(self, seed=int(seed))


_SECTIONS = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}
_SECTION_TYPES = {
    "pitch": PitchSection, "spectral": SpectralSection, "clustering": ClusteringSection,
    "augmentation": AugmentationSection, "predictor": PredictorSection, "metrics": MetricsSection,
}


def _coerce(section_cls, name, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be an object")
    known = {f.name: f for f in dataclasses.fields(section_cls)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {name!r}: {', '.join(unknown)}")
    return section_cls(**raw)


def validate(cfg: PipelineConfig) -> PipelineConfig:
    p = cfg.pitch
    if not 0 < p.hop_sec <= p.frame_sec:
        raise ConfigError("pitch: need 0 < hop_sec <= frame_sec")
    if not 0 < p.f0_min < p.f0_max:
        raise ConfigError("pitch: need 0 < f0_min < f0_max")
    if 1.0 / p.f0_min >= p.frame_sec:
        raise ConfigError("pitch: frame_sec must exceed one period at f0_min")
    if p.smooth_window < 1 or p.smooth_window % 2 == 0:
        raise ConfigError("pitch: smooth_window must be a positive odd integer")
    s = cfg.spectral
    if s.n_mels < 2 or not 1 <= s.n_coeffs <= s.n_mels:
        raise ConfigError("spectral: need n_mels >= 2 and 1 <= n_coeffs <= n_mels")
    if s.fmax is not None and not s.fmin < s.fmax:
        raise ConfigError("spectral: need fmin < fmax")
    c = cfg.clustering
    if c.k < 2 or c.restarts < 1 or c.max_iter < 1:
        raise ConfigError("clustering: need k >= 2, restarts >= 1, max_iter >= 1")
    pr = cfg.predictor
    if pr.decode_rule not in ("first", "count"):
        raise ConfigError("predictor: decode_rule must be 'first' or 'count'")
    if not 0 <= pr.val_fraction < 1 or pr.epochs < 1 or pr.batch < 1 or pr.lr < 0:
        raise ConfigError("predictor: invalid training hyperparameters")
    m = cfg.metrics
    if not 0 < m.gpe_threshold or not 0 <= m.mcd_first_coeff < s.n_coeffs:
        raise ConfigError("metrics: invalid threshold or coefficient range")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    return cfg


def config_from_dict(doc) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(doc) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    kwargs = {}
    for name, value in doc.items():
        if name in _SECTION_TYPES:
            kwargs[name] = _coerce(_SECTION_TYPES[name], name, value)
        else:
            kwargs[name] = int(value)
    try:
        return validate(PipelineConfig(**kwargs))
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None) -> PipelineConfig:
    if path is None:
        return validate(PipelineConfig())
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(doc)
