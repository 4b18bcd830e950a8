"""Perception and fusion: encodes observation windows into token sequences.

Every step of a window contributes MODALITIES tokens, in the order
workspace view, wrist view, proprioception, language, context.
"""

import attr
import numpy as np

from ..core import ops
from ..core.errors import ConfigError, ContractError
from ..core.nn import MLP, Linear, Module
from ..core.tensor import Parameter
from ..envs.world import PROPRIO_DIM, VIEW_DIM

MODALITIES = 5


def window_offsets(window):
    """Offsets of the window steps relative to t: {-past, ..., +future}."""
    past = (window - 1) // 2
    return np.arange(-past, window - past)


def center_index(window):
    return (window - 1) // 2


def window_indices(t, length, window):
    """Episode step indices of the window around t, clamped to [0, length)."""
    return np.clip(t + window_offsets(window), 0, length - 1)


@attr.s(frozen=True, eq=False)
class WindowBatch:
    """Observation windows stacked as arrays of shape (B, window, ...)."""
    workspace = attr.ib()
    wrist = attr.ib()
    proprio = attr.ib()
    language_id = attr.ib()

    @property
    def batch_size(self):
        return self.workspace.shape[0]

    @property
    def window(self):
        return self.workspace.shape[1]

    def take(self, indices):
        return WindowBatch(
            self.workspace[indices],
            self.wrist[indices],
            self.proprio[indices],
            self.language_id[indices]
        )

    @classmethod
    def concat(cls, batches):
        return cls(*(
            np.concatenate([getattr(b, field.name) for b in batches], axis=0)
            for field in attr.fields(cls)
        ))

    @classmethod
    def from_windows(cls, windows):
        """Build a batch from a list of windows (lists of Observations)."""
        return cls(
            np.array([[o.workspace_view for o in w] for w in windows]),
            np.array([[o.wrist_view for o in w] for w in windows]),
            np.array([[o.proprio for o in w] for w in windows]),
            np.array([w[0].language_id for w in windows], dtype=np.int64)
        )


class FiLM(Module):
    """Feature-wise modulation (1 + gamma(lang)) * x + beta(lang).

    Both generators start at zero, so the modulation starts as the identity.
    """

    def __init__(self, d, rng):
        self.gamma = Linear(d, d, rng, zero_init=True)
        self.beta = Linear(d, d, rng, zero_init=True)

    def forward(self, features, language_token):
        gamma = self.gamma(language_token)
        beta = self.beta(language_token)
        return ops.add(ops.add(features, ops.mul(gamma, features)), beta)


class EncoderBank(Module):
    def __init__(self, d, window, n_languages, rng):
        self.d = d
        self.window = window
        self.language_table = Parameter(rng.normal(0.0, 1.0, size=(n_languages, d)))
        self.workspace_encoder = MLP([VIEW_DIM, d, d], rng)
        self.workspace_film = FiLM(d, rng)
        self.wrist_encoder = MLP([VIEW_DIM, d, d], rng)
        self.wrist_film = FiLM(d, rng)
        self.proprio_encoder = MLP([PROPRIO_DIM, d, d], rng)
        self.context = Parameter(rng.normal(0.0, 0.02, size=(window, d)))
        self.position = Parameter(rng.normal(0.0, 0.02, size=(window, d)))

    @property
    def n_languages(self):
        return self.language_table.shape[0]

    def train_languages(self, language_ids):
        """Make only the given rows of the language table trainable."""
        mask = np.zeros(self.language_table.shape, dtype=bool)
        mask[list(language_ids)] = True
        self.language_table.trainable_mask = mask

    def encode_language(self, language_id):
        ids = np.atleast_1d(np.asarray(language_id, dtype=np.int64))
        unknown = sorted({int(i) for i in ids if not 0 <= i < self.n_languages})
        if unknown:
            raise ConfigError(
                f"unknown language id(s) {unknown} "
                f"(table has {self.n_languages} entries)"
            )
        return ops.take(self.language_table, ids)

    def encode_window(self, batch):
        """Token sequence (B, window * MODALITIES, d) of a WindowBatch."""
        if batch.window != self.window:
            raise ContractError(
                f"expected windows of {self.window} steps, got {batch.window}"
            )
        B, W, d = batch.batch_size, self.window, self.d

        language = ops.reshape(self.encode_language(batch.language_id), (B, 1, d))
        workspace = self.workspace_film(self.workspace_encoder(batch.workspace), language)
        wrist = self.wrist_film(self.wrist_encoder(batch.wrist), language)
        proprio = self.proprio_encoder(batch.proprio)
        language = ops.broadcast_to(language, (B, W, d))
        context = ops.broadcast_to(self.context, (B, W, d))

        tokens = ops.concat([
            ops.reshape(x, (B, W, 1, d))
            for x in (workspace, wrist, proprio, language, context)
        ], axis=2)
        tokens = ops.add(tokens, ops.reshape(self.position, (1, W, 1, d)))
        return ops.reshape(tokens, (B, W * MODALITIES, d))
