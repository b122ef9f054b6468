"""
Monotone mixture-of-logistics attention
=======================================

Each decoder step moves every component mean forward, so the alignment
can only advance through the encoder sequence.
"""

import numpy as np

from phonprosody.mol_attention import QueryProjection, run_alignment

rng = np.random.default_rng(3)
proj = QueryProjection.random(hidden=16, proj=8, k=2, rng=rng, scale=0.3)
queries = rng.standard_normal((30, 16))
encoder = rng.standard_normal((25, 4))

alignment, contexts, means = run_alignment(queries, encoder, proj, return_means=True)
print("alignment", alignment.shape, "contexts", contexts.shape)
print("row sums:", np.round(alignment.sum(axis=1), 3))

# the peak can hop between components; the means themselves never go back
print("argmax per step:", alignment.argmax(axis=1))
print("means strictly increasing:", bool(np.all(np.diff(means, axis=0) > 0)))
