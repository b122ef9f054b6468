"""Phoneme-level prosodic clustering and related speech numerics.

Submodules
----------
signal_io           WAV ingestion, framing, log-mel and mel-cepstral features
pitch               autocorrelation F0 tracking and post-processing
alignment           alignment parsing and phone-level aggregation
augmentation        feature-space pitch/tempo augmentation
prosody_clustering  speaker normalisation, codebook learning, tokenisation
mol_attention       mixture-of-logistics attention numerics
ordinal_predictor   ordinal token predictor with hand-derived gradients
metrics             DTW, MCD, VDE, GPE, FFE
cli                 staged file-based pipeline
"""

__version__ = "0.1.0"
