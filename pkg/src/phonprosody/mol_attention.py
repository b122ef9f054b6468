"""Mixture-of-logistics location attention (inference numerics only).

For decoder step ``i`` the attention on encoder position ``j`` is::

    a[i, j] = sum_k w[i, k] * (F(j + 0.5; mu[i, k], s[i, k]) - F(j - 0.5; mu[i, k], s[i, k]))

with ``F`` the logistic CDF.  Means advance by a strictly positive amount
each step (``mu[i] = mu[i-1] + exp(mu_hat[i])``), which makes the
alignment monotone by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MoLParams:
    mu: np.ndarray
    s: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        mu, s, w = (np.atleast_1d(np.asarray(a, dtype=np.float64)) for a in (self.mu, self.s, self.w))
        if not mu.shape == s.shape == w.shape or mu.ndim != 1:
            raise ValueError("mu, s and w must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(s)) and np.all(np.isfinite(w))):
            raise ValueError("mixture parameters must be finite")
        if np.any(s <= 0):
            raise ValueError("scales must be positive")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must lie on the simplex")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "w", w)

    @property
    def k(self):
        return self.mu.shape[0]


@dataclass(frozen=True)
class AttentionState:
    mu_prev: np.ndarray
    step: int = 0

    @classmethod
    def initial(cls, k: int) -> "AttentionState":
        return cls(np.zeros(k), 0)


@dataclass(frozen=True)
class QueryProjection:
    W1: np.ndarray  # [proj, hidden]
    b1: np.ndarray
    W2: np.ndarray  # [3K, proj]
    b2: np.ndarray

    def __post_init__(self):
        if self.W1.shape[0] != self.b1.shape[0] or self.W2.shape[1] != self.W1.shape[0]:
            raise ValueError("inconsistent projection shapes")
        if self.W2.shape[0] != self.b2.shape[0] or self.W2.shape[0] % 3:
            raise ValueError("second layer must output 3K values")

    @property
    def k(self):
        return self.W2.shape[0] // 3

    @classmethod
    def random(cls, hidden, proj, k, rng=None, scale=0.5):
        rng = np.random.default_rng(rng)
        return cls(scale * rng.standard_normal((proj, hidden)), scale * rng.standard_normal(proj),
                   scale * rng.standard_normal((3 * k, proj)), scale * rng.standard_normal(3 * k))


def sigmoid(x):
    """Logistic function evaluated without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def logistic_cdf(x, mu, s):
    s = np.asarray(s, dtype=np.float64)
    if np.any(s <= 0):
        raise ValueError("logistic scale must be positive")
    return sigmoid((np.asarray(x, dtype=np.float64) - mu) / s)


def project_query(h, p: QueryProjection):
    """Raw ``(mu_hat, s_hat, w_hat)`` from ``W2 tanh(W1 h + b1) + b2``."""
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (p.W1.shape[1],):
        raise ValueError(f"query has shape {h.shape}, projection expects ({p.W1.shape[1]},)")
    out = p.W2 @ np.tanh(p.W1 @ h + p.b1) + p.b2
    k = p.k
    return out[:k], out[k:2 * k], out[2 * k:]


def softmax(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max())
    return e / e.sum()


def step_params(raw, state: AttentionState):
    mu_hat, s_hat, w_hat = (np.asarray(a, dtype=np.float64) for a in raw)
    if not all(np.all(np.isfinite(a)) for a in (mu_hat, s_hat, w_hat)):
        raise ValueError("non-finite raw attention parameters")
    if state.step < 0:
        raise ValueError("attention step must be non-negative")
    mu = state.mu_prev + np.exp(mu_hat)
    params = MoLParams(mu, np.exp(s_hat), softmax(w_hat))
    return params, AttentionState(mu, state.step + 1)


def component_weights(params: MoLParams, n: int) -> np.ndarray:
    """Per-component bin masses, shape ``(K, n)`` (not yet mixed by ``w``)."""
    if n < 1:
        raise ValueError("encoder length must be at least 1")
    j = np.arange(n, dtype=np.float64)[None, :]
    mu, s = params.mu[:, None], params.s[:, None]
    return logistic_cdf(j + 0.5, mu, s) - logistic_cdf(j - 0.5, mu, s)


def attention_weights(params: MoLParams, n: int) -> np.ndarray:
    return params.w @ component_weights(params, n)


def context_vector(a, e):
    a = np.asarray(a, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    if e.ndim == 1:
        e = e[:, None]
    if a.shape[0] != e.shape[0]:
        raise ValueError(f"{a.shape[0]} weights for {e.shape[0]} encoder vectors")
    return a @ e


def run_alignment(queries, e, p: QueryProjection, return_means=False):
    """Attend over ``e`` for each query in turn from a zero initial state.

    Returns ``(alignment, contexts)`` with shapes ``(steps, n)`` and
    ``(steps, dim)``; with ``return_means`` the ``(steps, K)`` trajectory of
    component means is appended.
    """
    e = np.asarray(e, dtype=np.float64)
    if e.ndim == 1:
        e = e[:, None]
    n = e.shape[0]
    state = AttentionState.initial(p.k)
    rows, contexts, means = [], [], []
    for h in queries:
        params, state = step_params(project_query(h, p), state)
        a = attention_weights(params, n)
        rows.append(a)
        contexts.append(context_vector(a, e))
        means.append(params.mu)
    out = (np.array(rows).reshape(-1, n), np.array(contexts).reshape(-1, e.shape[1]))
    if return_means:
        out += (np.array(means).reshape(-1, p.k),)
    return out


def write_alignment_csv(path, alignment) -> None:
    """One row per decoder step, one column per encoder position."""
    from ._fileio import fmt, write_csv
    alignment = np.atleast_2d(alignment)
    header = [f"enc_{j}" for j in range(alignment.shape[1])]
    write_csv(path, header, [[fmt(v) for v in row] for row in alignment])
