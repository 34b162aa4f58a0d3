"""Shared transformer block (MHA + FFN, pre-norm residuals) and the
inverse-period resolution embedding.

One ``BlockParams`` instance serves every resolution branch of a block, which
is what keeps the parameter count independent of the number of branches. The
attention has no causal mask and no positional encoding: token order only
enters through the optional learned positional embedding, so by default MHA
is exactly permutation-equivariant over patch tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .autodiff import (
    Parameter,
    Tensor,
    dropout,
    gelu,
    layer_norm,
    matmul,
    permute,
    reshape,
    scale,
    softmax,
)
from .errors import ContractError

LN_EPS = 1e-5
INIT_STD = 0.02


@dataclass
class BlockParams:
    """All learnables of one block: QKV/output projections with biases, the
    two-layer FFN, two layer norms, and the resolution embedding (possibly a
    reference to a globally shared vector)."""

    wq: Parameter
    bq: Parameter
    wk: Parameter
    bk: Parameter
    wv: Parameter
    bv: Parameter
    wo: Parameter
    bo: Parameter
    ffn_w1: Parameter
    ffn_b1: Parameter
    ffn_w2: Parameter
    ffn_b2: Parameter
    ln1_gamma: Parameter
    ln1_beta: Parameter
    ln2_gamma: Parameter
    ln2_beta: Parameter
    re: Parameter

    def parameters(self) -> list[Parameter]:
        return [getattr(self, f.name) for f in fields(self)]


def init_block_params(
    width: int,
    ffn_width: int,
    rng: np.random.Generator,
    prefix: str,
    re: Parameter | None = None,
) -> BlockParams:
    """Gaussian(0, 0.02) weight matrices, zero biases, identity layer norms.

    Pass ``re`` to share one resolution embedding across blocks; otherwise a
    fresh per-block embedding is created.
    """

    def w(name: str, shape: tuple[int, ...]) -> Parameter:
        return Parameter(f"{prefix}.{name}", rng.normal(0.0, INIT_STD, size=shape))

    def zeros(name: str, shape: tuple[int, ...]) -> Parameter:
        return Parameter(f"{prefix}.{name}", np.zeros(shape))

    def ones(name: str, shape: tuple[int, ...]) -> Parameter:
        return Parameter(f"{prefix}.{name}", np.ones(shape))

    return BlockParams(
        wq=w("wq", (width, width)),
        bq=zeros("bq", (width,)),
        wk=w("wk", (width, width)),
        bk=zeros("bk", (width,)),
        wv=w("wv", (width, width)),
        bv=zeros("bv", (width,)),
        wo=w("wo", (width, width)),
        bo=zeros("bo", (width,)),
        ffn_w1=w("ffn_w1", (width, ffn_width)),
        ffn_b1=zeros("ffn_b1", (ffn_width,)),
        ffn_w2=w("ffn_w2", (ffn_width, width)),
        ffn_b2=zeros("ffn_b2", (width,)),
        ln1_gamma=ones("ln1_gamma", (width,)),
        ln1_beta=zeros("ln1_beta", (width,)),
        ln2_gamma=ones("ln2_gamma", (width,)),
        ln2_beta=zeros("ln2_beta", (width,)),
        re=re if re is not None else w("re", (width,)),
    )


def resolution_embedding(re: Tensor, period: int) -> Tensor:
    """The shared embedding scaled by 1/period, so coarser branches carry a
    proportionally weaker resolution marker."""
    if period < 1:
        raise ContractError(f"resolution_embedding: period must be >= 1, got {period}")
    return scale(re, 1.0 / period)


def mha(
    tokens: Tensor,
    params: BlockParams,
    heads: int,
    *,
    dropout_rate: float = 0.0,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Bidirectional multi-head scaled dot-product attention over the patch
    axis, with dropout on the attention weights in train mode."""
    if tokens.ndim != 3:
        raise ContractError(f"mha: expected (batch, tokens, width) input, got shape {tokens.shape}")
    rows, num_tokens, width = tokens.shape
    if width != params.wq.shape[0]:
        raise ContractError(
            f"mha: token width {width} does not match projection width {params.wq.shape[0]}"
        )
    if heads < 1 or width % heads != 0:
        raise ContractError(f"mha: width {width} not divisible by heads {heads}")
    head_dim = width // heads

    def split_heads(t: Tensor) -> Tensor:
        return permute(reshape(t, (rows, num_tokens, heads, head_dim)), (0, 2, 1, 3))

    q = split_heads(matmul(tokens, params.wq) + params.bq)
    k = split_heads(matmul(tokens, params.wk) + params.bk)
    v = split_heads(matmul(tokens, params.wv) + params.bv)

    scores = scale(matmul(q, k.swap_last()), 1.0 / math.sqrt(head_dim))
    attn = softmax(scores, axis=-1)
    attn = dropout(attn, dropout_rate, training, rng)
    context = matmul(attn, v)
    merged = reshape(permute(context, (0, 2, 1, 3)), (rows, num_tokens, width))
    return matmul(merged, params.wo) + params.bo


def ffn(tokens: Tensor, params: BlockParams) -> Tensor:
    """Position-wise two-layer GELU network, applied to each patch token
    independently."""
    hidden = gelu(matmul(tokens, params.ffn_w1) + params.ffn_b1)
    return matmul(hidden, params.ffn_w2) + params.ffn_b2


def transformer_block(
    tokens: Tensor,
    params: BlockParams,
    heads: int,
    *,
    dropout_rate: float = 0.0,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Pre-norm residual composition: x + MHA(LN1(x)), then y + FFN(LN2(y)).

    Shape-preserving; deterministic in eval mode.
    """
    attended = mha(
        layer_norm(tokens, params.ln1_gamma, params.ln1_beta, LN_EPS),
        params,
        heads,
        dropout_rate=dropout_rate,
        training=training,
        rng=rng,
    )
    x = tokens + dropout(attended, dropout_rate, training, rng)
    fed = ffn(layer_norm(x, params.ln2_gamma, params.ln2_beta, LN_EPS), params)
    return x + dropout(fed, dropout_rate, training, rng)
