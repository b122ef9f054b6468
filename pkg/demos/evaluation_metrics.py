"""
Comparing two renditions of an utterance
========================================

DTW aligns the mel cepstra; MCD and the F0 error rates are read off the
aligned frame pairs.
"""

import numpy as np

from phonprosody import synth
from phonprosody.metrics import compare_audio
from phonprosody.pitch import PitchConfig
from phonprosody.signal_io import SpectralConfig

rng = np.random.default_rng(4)
speaker = synth.DEFAULT_SPEAKERS[2]
segments, targets = synth.synth_utterance_plan(speaker, rng)
reference = synth.render(segments, targets, 16000, rng)

# same timing, pitch raised by two semitones and slowed down a little
shifted = [f * 2 ** (2 / 12) for f in targets]
stretched = [type(s)(s.start * 1.1, s.end * 1.1, s.label, s.kind) for s in segments]
candidate = synth.render(stretched, shifted, 16000, rng)

# spectral and pitch frames must coincide: 40 ms windows, 10 ms hop
spectral = SpectralConfig(frame_len=640, hop=160, n_fft=1024, n_mels=40, fmin=0.0, fmax=8000.0)
for name, other in (("itself", reference), ("shifted", candidate)):
    rep = compare_audio(reference, other, spectral, PitchConfig())
    print(f"vs {name:8}: MCD {rep.mcd:6.2f} dB  FFE {rep.ffe:.3f}  VDE {rep.vde:.3f}  GPE {rep.gpe:.3f}")
