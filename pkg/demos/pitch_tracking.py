"""
Pitch tracking on a synthetic utterance
=======================================

Render one utterance, track its F0 and reduce the track to one log-F0
value per phone.
"""

import numpy as np

from phonprosody import synth
from phonprosody.alignment import phoneme_prosody
from phonprosody.pitch import estimate_f0, process_track

rng = np.random.default_rng(0)
speaker = synth.DEFAULT_SPEAKERS[0]
segments, targets = synth.synth_utterance_plan(speaker, rng)
audio = synth.render(segments, targets, 16000, rng)

# frame-level F0; pauses come out unvoiced
track = estimate_f0(audio)
print(f"{len(track)} frames, {track.voiced.mean():.0%} voiced")

# fill the gaps, median-smooth, take the log, then average per phone
log_track = process_track(track)
records = phoneme_prosody(log_track, segments)

phone_targets = [f for s, f in zip(segments, targets) if s.kind == "phone"]
print("phone  target_hz  measured_hz  duration_s")
for rec, target in zip(records, phone_targets):
    print(f"{rec.label:>5}  {target:9.1f}  {np.exp(rec.mean_log_f0):11.1f}  {rec.duration:10.3f}")
