"""Full forecaster assembly: RevIN wrapper, stacked multi-resolution blocks,
shared linear prediction head.

Each block detects salient periodicities of its own input (stop-gradient),
runs one shared transformer block over every resolution branch, and
aggregates branches with softmax weights derived from the detected
amplitudes. The encoder output keeps the input shape (B, I, V); a single
(I, O) linear head shared across variates produces the forecast.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .autodiff import Parameter, Tensor, narrow, permute, scale
from .encoder import (
    BlockParams,
    INIT_STD,
    init_block_params,
    resolution_embedding,
    transformer_block,
)
from .errors import CheckpointError, ContractError
from .patching import flatten_truncate, pad_to_multiple, resize_linear, segment
from .spectral import PeriodicitySet, amplitude_spectrum, detect_salient_periods

Array = np.ndarray


@dataclass
class ModelConfig:
    """Hyperparameters of the forecaster; the variate count is a data
    property and deliberately absent."""

    lookback: int
    horizon: int
    width: int = 64
    num_blocks: int = 2
    num_resolutions: int = 3
    heads: int = 4
    ffn_width: int = 128
    dropout: float = 0.1
    revin_eps: float = 1e-5
    use_res_emb: bool = True
    share_re_globally: bool = True
    learned_pos_emb: bool = False
    block_residual: bool = False

    def __post_init__(self) -> None:
        for name in ("lookback", "horizon", "width", "num_blocks", "num_resolutions", "heads", "ffn_width"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ContractError(f"ModelConfig.{name} must be a positive integer, got {value!r}")
        if self.width % self.heads != 0:
            raise ContractError(f"ModelConfig: width {self.width} not divisible by heads {self.heads}")
        if self.num_resolutions > self.lookback // 2:
            raise ContractError(
                f"ModelConfig: num_resolutions {self.num_resolutions} exceeds "
                f"lookback//2 = {self.lookback // 2}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ContractError(f"ModelConfig: dropout must be in [0, 1), got {self.dropout}")
        if self.revin_eps <= 0:
            raise ContractError(f"ModelConfig: revin_eps must be > 0, got {self.revin_eps}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "ModelConfig":
        return cls(**payload)


@dataclass
class RevinStats:
    """Per-example, per-variate temporal moments captured at normalization
    time; both stay in the graph so gradients flow through them."""

    mean: Tensor
    std: Tensor


@dataclass
class ModelParams:
    """Every learnable of the model. The resolution embedding is a single
    shared Parameter referenced by all blocks unless per-block embeddings
    were requested at init."""

    blocks: list[BlockParams]
    head_w: Parameter
    head_b: Parameter
    pos_emb: Parameter | None = field(default=None)

    def named_parameters(self) -> list[Parameter]:
        """All parameters in a stable order, shared objects listed once."""
        params: list[Parameter] = []
        seen: set[int] = set()
        for block in self.blocks:
            for p in block.parameters():
                if id(p) not in seen:
                    seen.add(id(p))
                    params.append(p)
        params.extend([self.head_w, self.head_b])
        if self.pos_emb is not None:
            params.append(self.pos_emb)
        return params

    def state_dict(self) -> dict[str, Tensor]:
        return {p.name: p for p in self.named_parameters()}

    def load_state(self, arrays: dict[str, Array]) -> None:
        """Copy checkpoint arrays into the live parameters, preserving
        sharing; any missing name or shape mismatch is a checkpoint error."""
        for p in self.named_parameters():
            if p.name not in arrays:
                raise CheckpointError(f"checkpoint missing parameter {p.name}")
            value = arrays[p.name]
            if value.shape != p.shape:
                raise CheckpointError(
                    f"checkpoint parameter {p.name}: shape {value.shape} != expected {p.shape}"
                )
            p.data[...] = value


def init_model_params(cfg: ModelConfig, seed: int | np.random.Generator = 0) -> ModelParams:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shared_re = Parameter("re", rng.normal(0.0, INIT_STD, size=(cfg.width,))) if cfg.share_re_globally else None
    blocks = [
        init_block_params(cfg.width, cfg.ffn_width, rng, prefix=f"block{i}", re=shared_re)
        for i in range(cfg.num_blocks)
    ]
    head_w = Parameter("head.weight", rng.normal(0.0, INIT_STD, size=(cfg.lookback, cfg.horizon)))
    head_b = Parameter("head.bias", np.zeros(cfg.horizon))
    pos_emb = None
    if cfg.learned_pos_emb:
        # sized for the maximum patch count (period 1) and sliced per branch
        pos_emb = Parameter("pos_emb", rng.normal(0.0, INIT_STD, size=(cfg.lookback, cfg.width)))
    return ModelParams(blocks=blocks, head_w=head_w, head_b=head_b, pos_emb=pos_emb)


def count_parameters(params: ModelParams) -> int:
    """Exact count of scalar learnables; shared tensors count once."""
    return sum(p.size for p in params.named_parameters())


# -- RevIN ---------------------------------------------------------------------


def revin_normalize(x: Tensor, eps: float) -> tuple[Tensor, RevinStats]:
    """Remove each (example, variate)'s temporal mean and population standard
    deviation; the guarded std is at least sqrt(eps)."""
    mu = x.mean(axis=1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=1, keepdims=True)
    std = (var + Tensor(eps)).sqrt()
    return centered / std, RevinStats(mean=mu, std=std)


def revin_denormalize(y: Tensor, stats: RevinStats) -> Tensor:
    """Restore the captured moments onto the forecast horizon."""
    return y * stats.std + stats.mean


# -- the multi-resolution block ---------------------------------------------------


def multires_block(
    x: Tensor,
    block: BlockParams,
    cfg: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
    periodicity: PeriodicitySet | None = None,
    pos_emb: Parameter | None = None,
    trace: list | None = None,
) -> Tensor:
    """One adaptive multi-resolution pass over a (B, I, V) representation.

    Detection runs on the raw block input and is a stop-gradient computation;
    the branch weights it produces enter the graph as plain constants. A flat
    input that yields no usable periodicity falls back to a single
    whole-window branch (period = I, weight 1). ``periodicity`` overrides
    detection, which is the seam tests use to force specific branches.
    """
    batch, lookback, variates = x.shape
    if periodicity is None:
        spectrum = amplitude_spectrum(x.data)
        periodicity = detect_salient_periods(spectrum, cfg.num_resolutions)
    if len(periodicity) == 0:
        periodicity = PeriodicitySet([1], [lookback], [0.0], [1.0])
    if trace is not None:
        trace.append(periodicity)

    out: Tensor | None = None
    for period, weight in zip(periodicity.periods, periodicity.weights):
        padded = pad_to_multiple(x, period)
        patches = segment(padded, period)
        num_patches = patches.shape[2]
        tokens = resize_linear(patches, cfg.width)
        tokens = tokens.reshape((batch * variates, num_patches, cfg.width))
        if cfg.use_res_emb:
            tokens = tokens + resolution_embedding(block.re, period)
        if cfg.learned_pos_emb and pos_emb is not None:
            tokens = tokens + narrow(pos_emb, 0, 0, num_patches)
        tokens = transformer_block(
            tokens,
            block,
            cfg.heads,
            dropout_rate=cfg.dropout,
            training=training,
            rng=rng,
        )
        tokens = tokens.reshape((batch, variates, num_patches, cfg.width))
        restored = flatten_truncate(resize_linear(tokens, period), lookback)
        contribution = scale(restored, weight)
        out = contribution if out is None else out + contribution
    assert out is not None
    if cfg.block_residual:
        out = out + x
    return out


# -- end-to-end forward ------------------------------------------------------------


def forward(
    x: Tensor | Array,
    params: ModelParams,
    cfg: ModelConfig,
    *,
    training: bool = False,
    rng: np.random.Generator | None = None,
    trace: list | None = None,
) -> Tensor:
    """Map a (B, I, V) look-back batch to a (B, O, V) forecast.

    ``trace``, when given, receives one PeriodicitySet per block. Eval mode
    is pure and deterministic; train mode needs ``rng`` whenever dropout is
    active.
    """
    x = x if isinstance(x, Tensor) else Tensor(x)
    if x.ndim != 3 or x.shape[1] != cfg.lookback:
        raise ContractError(
            f"forward: expected input shape (B, {cfg.lookback}, V), got {x.shape}"
        )
    hidden, stats = revin_normalize(x, cfg.revin_eps)
    for block in params.blocks:
        hidden = multires_block(
            hidden, block, cfg, pos_emb=params.pos_emb, training=training, rng=rng, trace=trace
        )
    by_variate = permute(hidden, (0, 2, 1))
    projected = by_variate @ params.head_w + params.head_b
    prediction = permute(projected, (0, 2, 1))
    return revin_denormalize(prediction, stats)
