"""Gaussian-mixture action head with diagonal covariances."""
from math import log, pi

import attr
import numpy as np

from ..core import ops
from ..core.config import Config
from ..core.nn import MLP, Module

HALF_LOG_2PI = 0.5 * log(2.0 * pi)


@attr.s(frozen=True, eq=False)
class GMMParams:
    """Mixture parameters: means and log_stds (B, R, A), logits (B, R)."""
    means = attr.ib()
    log_stds = attr.ib()
    logits = attr.ib()

    @property
    def mixture_weights(self):
        logits = ops.as_tensor(self.logits).data
        e = np.exp(logits - logits.max(axis=-1, keepdims=True))
        return e / e.sum(axis=-1, keepdims=True)


def clamp_log_stds(log_stds):
    return ops.clip(log_stds, Config.LOG_SIGMA_MIN, Config.LOG_SIGMA_MAX)


class GMMHead(Module):
    def __init__(self, d, n_components, action_dim, rng):
        self.n_components = n_components
        self.action_dim = action_dim
        self.mlp = MLP([d, d, n_components * (2 * action_dim + 1)], rng)

    def forward(self, feature):
        B = feature.shape[0]
        R, A = self.n_components, self.action_dim
        out = self.mlp(feature)
        means = ops.reshape(ops.getitem(out, (slice(None), slice(0, R * A))), (B, R, A))
        log_stds = ops.reshape(
            ops.getitem(out, (slice(None), slice(R * A, 2 * R * A))), (B, R, A)
        )
        logits = ops.getitem(out, (slice(None), slice(2 * R * A, None)))
        return GMMParams(means=means, log_stds=clamp_log_stds(log_stds), logits=logits)


def gmm_nll(params, actions):
    """Per-sample -log sum_r eta_r N(a | mu_r, diag sigma_r^2), shape (B,)."""
    means = ops.as_tensor(params.means)
    log_stds = ops.as_tensor(params.log_stds)
    logits = ops.as_tensor(params.logits)
    B, R, A = means.shape
    actions = np.asarray(actions, dtype=np.float64).reshape(B, 1, A)

    log_eta = ops.sub(logits, ops.log_sum_exp(logits, axis=-1, keepdims=True))
    z = ops.mul(ops.sub(actions, means), ops.exp(ops.neg(log_stds)))
    neg_log_density = ops.sum(
        ops.add(ops.add(ops.scale(ops.mul(z, z), 0.5), log_stds), HALF_LOG_2PI),
        axis=-1
    )
    return ops.neg(ops.log_sum_exp(ops.sub(log_eta, neg_log_density), axis=-1))


def sample_action(params, rng, deterministic=False):
    """One action per batch element, as an array of shape (B, A).

    `rng` is a Generator or one Generator per batch element.
    """
    means = ops.as_tensor(params.means).data
    stds = np.exp(ops.as_tensor(params.log_stds).data)
    eta = params.mixture_weights
    B = means.shape[0]
    if deterministic:
        components = np.argmax(eta, axis=-1)
        return means[np.arange(B), components]
    rngs = rng if isinstance(rng, (list, tuple)) else [rng] * B
    actions = np.empty((B, means.shape[2]))
    for b, rng in enumerate(rngs):
        r = rng.choice(len(eta[b]), p=eta[b])
        actions[b] = means[b, r] + stds[b, r] * rng.standard_normal(means.shape[2])
    return actions
