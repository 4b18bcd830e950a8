"""Temporal transformer decoder with prefix-tuned cross-attention.

Each block applies pre-normalized multi-head self-attention (MSA),
multi-head cross-attention (MCA) and an MLP. Queries, keys and values of both
attention layers come from the same normed input; in MCA the keys/values may
be prefixed with one learned (p_K, p_V) pair. All eight attention projections
of a block can be augmented by the block's CP adapter.
"""
import numpy as np

from ..core import ops
from ..core.errors import ContractError
from ..core.nn import LayerNorm, Linear, Module
from .adapter import CPAdapter, adapted_matvec

# Adapter slots of the attention projections.
MSA_SLOTS = (0, 1, 2, 3)
MCA_SLOTS = (4, 5, 6, 7)


class MultiHeadAttention(Module):
    def __init__(self, d, heads, rng):
        if d % heads != 0:
            raise ContractError(f"width {d} is not divisible by {heads} heads")
        self.d = d
        self.heads = heads
        self.query = Linear(d, d, rng)
        self.key = Linear(d, d, rng)
        self.value = Linear(d, d, rng)
        self.output = Linear(d, d, rng)

    def _split_heads(self, x):
        B, L, _ = x.shape
        x = ops.reshape(x, (B, L, self.heads, self.d // self.heads))
        return ops.transpose(x, (0, 2, 1, 3))

    def forward(
        self, query_input, kv_input, prefix=None, delta=None, slots=MSA_SLOTS,
        return_attention=False
    ):
        q_slot, k_slot, v_slot, o_slot = slots
        q = adapted_matvec(query_input, self.query, delta, q_slot)
        k = adapted_matvec(kv_input, self.key, delta, k_slot)
        v = adapted_matvec(kv_input, self.value, delta, v_slot)
        if prefix is not None:
            p_key, p_value = prefix
            k = ops.concat([p_key, k], axis=1)
            v = ops.concat([p_value, v], axis=1)

        q, k, v = self._split_heads(q), self._split_heads(k), self._split_heads(v)
        scores = ops.scale(
            ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))),
            1.0 / np.sqrt(self.d // self.heads)
        )
        attention = ops.softmax(scores, axis=-1)
        mixed = ops.transpose(ops.matmul(attention, v), (0, 2, 1, 3))
        B, L = query_input.shape[:2]
        out = adapted_matvec(
            ops.reshape(mixed, (B, L, self.d)), self.output, delta, o_slot
        )
        if return_attention:
            return out, attention
        return out


class DecoderBlock(Module):
    def __init__(self, d, heads, rng, adapter_rank=None, adapter_mode='per_task'):
        self.self_norm = LayerNorm(d)
        self.self_attention = MultiHeadAttention(d, heads, rng)
        self.cross_norm = LayerNorm(d)
        self.cross_attention = MultiHeadAttention(d, heads, rng)
        self.mlp_norm = LayerNorm(d)
        self.mlp_in = Linear(d, 4 * d, rng)
        self.mlp_out = Linear(4 * d, d, rng)
        self.adapter = None
        if adapter_rank is not None:
            self.adapter = CPAdapter(d, adapter_rank, rng, mode=adapter_mode)

    def forward(self, x, prefix=None, task_id=None):
        delta = None
        if self.adapter is not None:
            delta = self.adapter.delta(task_id)

        h = self.self_norm(x)
        x = ops.add(x, self.self_attention(h, h, delta=delta, slots=MSA_SLOTS))
        h = self.cross_norm(x)
        x = ops.add(x, self.cross_attention(h, h, prefix=prefix, delta=delta, slots=MCA_SLOTS))
        h = self.mlp_out(ops.gelu(self.mlp_in(self.mlp_norm(x))))
        return ops.add(x, h)


class TemporalTransformer(Module):
    def __init__(self, d, heads, n_blocks, rng, adapter_rank=None, adapter_mode='per_task'):
        self.blocks = [
            DecoderBlock(d, heads, rng, adapter_rank, adapter_mode)
            for _ in range(n_blocks)
        ]
        self.final_norm = LayerNorm(d)

    @property
    def adapters(self):
        return [b.adapter for b in self.blocks if b.adapter is not None]

    def forward(self, x, prefix=None, task_id=None):
        for block in self.blocks:
            x = block(x, prefix=prefix, task_id=task_id)
        return self.final_norm(x)
