"""Dense float64 tensors with reverse-mode automatic differentiation.

The graph is taped dynamically: every differentiable op records its parents
and an adjoint closure on the output tensor. ``Tensor.backward`` runs the
closures in reverse topological order, accumulates gradients into every
reachable ``requires_grad`` tensor, and then frees the tape. Tensors created
without a graph attachment are plain value holders and safe to share
read-only.

Storage is always a row-major float64 ``numpy`` array; broadcasting follows
numpy semantics with the standard sum-reduction adjoint.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CheckpointError, ContractError, NumericError, ShapeMismatchError

Array = np.ndarray

_GELU_C = math.sqrt(2.0 / math.pi)


def _as_array(values) -> Array:
    if isinstance(values, np.ndarray) and values.dtype == np.float64:
        return values
    return np.asarray(values, dtype=np.float64)


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum ``grad`` down to ``shape`` after a numpy-style broadcast."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    keep = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if keep:
        grad = grad.sum(axis=keep, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """N-dimensional float64 array that can participate in a backward graph.

    Invariants: ``data`` is row-major float64; ``grad`` is ``None`` or an array
    of identical shape; calling :meth:`backward` twice across two separate
    forward passes sums gradients (use :meth:`zero_grad` between steps).
    """

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_grad_fn")

    def __init__(self, values, requires_grad: bool = False) -> None:
        self.data: Array = _as_array(values)
        self.requires_grad = bool(requires_grad)
        self.grad: Array | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._grad_fn: Callable[[Array], None] | None = None

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() requires a scalar tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> Array:
        return self.data

    def detach(self) -> "Tensor":
        """Value copy with no graph attachment and no gradient tracking."""
        return Tensor(self.data.copy())

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    # -- graph machinery -----------------------------------------------------

    def _accumulate(self, grad: Array) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def backward(self) -> None:
        """Accumulate gradients of this scalar into every reachable tensor.

        The tape is freed afterwards; a fresh forward pass is needed before
        the next backward.
        """
        if self.data.size != 1:
            raise ContractError(f"backward() requires a scalar loss, got shape {self.shape}")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(topo):
            if node._grad_fn is not None and node.grad is not None:
                node._grad_fn(node.grad)
        for node in topo:
            node._parents = ()
            node._grad_fn = None

    # -- operators -----------------------------------------------------------

    def __add__(self, other) -> "Tensor":
        return add(self, _coerce(other))

    def __radd__(self, other) -> "Tensor":
        return add(_coerce(other), self)

    def __sub__(self, other) -> "Tensor":
        return subtract(self, _coerce(other))

    def __rsub__(self, other) -> "Tensor":
        return subtract(_coerce(other), self)

    def __mul__(self, other) -> "Tensor":
        return multiply(self, _coerce(other))

    def __rmul__(self, other) -> "Tensor":
        return multiply(_coerce(other), self)

    def __truediv__(self, other) -> "Tensor":
        return divide(self, _coerce(other))

    def __rtruediv__(self, other) -> "Tensor":
        return divide(_coerce(other), self)

    def __neg__(self) -> "Tensor":
        return multiply(self, Tensor(-1.0))

    def __matmul__(self, other) -> "Tensor":
        return matmul(self, _coerce(other))

    # -- method-style sugar ---------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return tensor_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, shape: Sequence[int]) -> "Tensor":
        return reshape(self, shape)

    def permute(self, axes: Sequence[int]) -> "Tensor":
        return permute(self, axes)

    def swap_last(self) -> "Tensor":
        """Swap the last two axes (batched matrix transpose)."""
        axes = list(range(self.ndim))
        axes[-1], axes[-2] = axes[-2], axes[-1]
        return permute(self, axes)

    def sqrt(self) -> "Tensor":
        return sqrt(self)


class Parameter(Tensor):
    """Learnable tensor with a unique name inside a parameter collection."""

    __slots__ = ("name",)

    def __init__(self, name: str, values) -> None:
        super().__init__(values, requires_grad=True)
        self.name = name

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


def _coerce(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unary(parent: Tensor, data: Array, adjoint: Callable[[Array], Array]) -> Tensor:
    out = Tensor(data)
    if parent.requires_grad:
        out.requires_grad = True
        out._parents = (parent,)
        out._grad_fn = lambda g: parent._accumulate(adjoint(g))
    return out


def _binary(
    a: Tensor,
    b: Tensor,
    data: Array,
    adjoint_a: Callable[[Array], Array],
    adjoint_b: Callable[[Array], Array],
) -> Tensor:
    out = Tensor(data)
    if a.requires_grad or b.requires_grad:
        out.requires_grad = True
        out._parents = (a, b)

        def grad_fn(g: Array) -> None:
            if a.requires_grad:
                a._accumulate(adjoint_a(g))
            if b.requires_grad:
                b._accumulate(adjoint_b(g))

        out._grad_fn = grad_fn
    return out


# -- elementwise arithmetic ----------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    return _binary(
        a,
        b,
        a.data + b.data,
        lambda g: _unbroadcast(g, a.shape),
        lambda g: _unbroadcast(g, b.shape),
    )


def subtract(a: Tensor, b: Tensor) -> Tensor:
    return _binary(
        a,
        b,
        a.data - b.data,
        lambda g: _unbroadcast(g, a.shape),
        lambda g: _unbroadcast(-g, b.shape),
    )


def multiply(a: Tensor, b: Tensor) -> Tensor:
    return _binary(
        a,
        b,
        a.data * b.data,
        lambda g: _unbroadcast(g * b.data, a.shape),
        lambda g: _unbroadcast(g * a.data, b.shape),
    )


def divide(a: Tensor, b: Tensor) -> Tensor:
    return _binary(
        a,
        b,
        a.data / b.data,
        lambda g: _unbroadcast(g / b.data, a.shape),
        lambda g: _unbroadcast(-g * a.data / (b.data * b.data), b.shape),
    )


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply by a python scalar (kept out of the graph)."""
    return _unary(a, a.data * factor, lambda g: g * factor)


def sqrt(a: Tensor) -> Tensor:
    root = np.sqrt(a.data)
    return _unary(a, root, lambda g: g * 0.5 / root)


# -- matmul --------------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product ``a @ b`` over the last two axes."""
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatchError(f"matmul: incompatible shapes {a.shape} @ {b.shape}")
    try:
        data = np.matmul(a.data, b.data)
    except ValueError as exc:
        raise ShapeMismatchError(f"matmul: incompatible shapes {a.shape} @ {b.shape}") from exc

    def adjoint_a(g: Array) -> Array:
        return _unbroadcast(np.matmul(g, np.swapaxes(b.data, -1, -2)), a.shape)

    def adjoint_b(g: Array) -> Array:
        return _unbroadcast(np.matmul(np.swapaxes(a.data, -1, -2), g), b.shape)

    return _binary(a, b, data, adjoint_a, adjoint_b)


# -- reductions ------------------------------------------------------------------


def _expand_reduced(g: Array, shape: tuple[int, ...], axis, keepdims: bool) -> Array:
    if axis is None:
        return np.broadcast_to(g.reshape((1,) * len(shape)), shape)
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    axes = tuple(ax % len(shape) for ax in axes)
    if not keepdims:
        expanded = list(g.shape)
        for ax in sorted(axes):
            expanded.insert(ax, 1)
        g = g.reshape(expanded)
    return np.broadcast_to(g, shape)


def tensor_sum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    data = a.data.sum(axis=axis, keepdims=keepdims)
    return _unary(a, data, lambda g: _expand_reduced(g, a.shape, axis, keepdims))


def mean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    data = a.data.mean(axis=axis, keepdims=keepdims)
    count = a.data.size if axis is None else a.data.size // data.size
    return _unary(a, data, lambda g: _expand_reduced(g, a.shape, axis, keepdims) / count)


def variance(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    """Population variance along ``axis`` (composed, fully differentiable)."""
    mu = mean(a, axis=axis, keepdims=True)
    centered = subtract(a, mu)
    return mean(multiply(centered, centered), axis=axis, keepdims=keepdims)


# -- layout ops -----------------------------------------------------------------


def permute(a: Tensor, axes: Sequence[int]) -> Tensor:
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _unary(a, np.transpose(a.data, axes), lambda g: np.transpose(g, inverse))


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(shape)
    return _unary(a, a.data.reshape(shape), lambda g: g.reshape(a.shape))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    data = np.concatenate([t.data for t in tensors], axis=axis)
    out = Tensor(data)
    if any(t.requires_grad for t in tensors):
        out.requires_grad = True
        out._parents = tuple(tensors)
        splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

        def grad_fn(g: Array) -> None:
            for t, piece in zip(tensors, np.split(g, splits, axis=axis)):
                if t.requires_grad:
                    t._accumulate(piece)

        out._grad_fn = grad_fn
    return out


def narrow(a: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice ``[start, start+length)`` along ``axis``."""
    index = [slice(None)] * a.ndim
    index[axis] = slice(start, start + length)
    index = tuple(index)

    def adjoint(g: Array) -> Array:
        full = np.zeros_like(a.data)
        full[index] = g
        return full

    return _unary(a, a.data[index], adjoint)


# -- nonlinearities ---------------------------------------------------------------


def softmax(x: Tensor, axis: int) -> Tensor:
    """Numerically stable softmax along ``axis``; rejects NaN inputs."""
    if not -x.ndim <= axis < x.ndim:
        raise ContractError(f"softmax: axis {axis} invalid for shape {x.shape}")
    if np.isnan(x.data).any():
        raise NumericError("softmax: input contains NaN")
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def adjoint(g: Array) -> Array:
        return (g - (g * y).sum(axis=axis, keepdims=True)) * y

    return _unary(x, y, adjoint)


def gelu(x: Tensor) -> Tensor:
    """GELU in the tanh form, with the exact adjoint of that formula."""
    inner = _GELU_C * (x.data + 0.044715 * x.data**3)
    t = np.tanh(inner)
    y = 0.5 * x.data * (1.0 + t)

    def adjoint(g: Array) -> Array:
        d_inner = _GELU_C * (1.0 + 3 * 0.044715 * x.data**2)
        return g * (0.5 * (1.0 + t) + 0.5 * x.data * (1.0 - t * t) * d_inner)

    return _unary(x, y, adjoint)


def dropout(x: Tensor, rate: float, training: bool, rng: np.random.Generator | None = None) -> Tensor:
    """Inverted dropout: scales kept units by 1/(1-rate) at train time,
    identity at eval time."""
    if not 0.0 <= rate < 1.0:
        raise ContractError(f"dropout: rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ContractError("dropout: train mode with rate > 0 requires an rng")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return _unary(x, x.data * mask, lambda g: g * mask)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit population variance, then
    apply the learnable affine ``gamma * x + beta``."""
    if eps <= 0:
        raise ContractError(f"layer_norm: eps must be > 0, got {eps}")
    mu = mean(x, axis=-1, keepdims=True)
    centered = subtract(x, mu)
    var = mean(multiply(centered, centered), axis=-1, keepdims=True)
    normalized = divide(centered, sqrt(add(var, Tensor(eps))))
    return add(multiply(normalized, gamma), beta)


# -- checkpoint serialization ------------------------------------------------------

CHECKPOINT_FORMAT = "mrf-checkpoint-v1"


def save_checkpoint(params: Mapping[str, Tensor] | Iterable[Parameter], path: str) -> None:
    """Write a value-exact JSON checkpoint: name -> {shape, row-major data}.

    Floats are serialized with Python's shortest round-trip repr, so a
    save/load cycle reproduces every bit of the float64 payload.
    """
    if not isinstance(params, Mapping):
        params = {p.name: p for p in params}
    payload = {
        "format": CHECKPOINT_FORMAT,
        "params": {
            name: {"shape": list(t.shape), "data": t.data.reshape(-1).tolist()}
            for name, t in params.items()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_checkpoint(path: str) -> dict[str, Array]:
    """Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        CheckpointError: on unreadable JSON, wrong format tag, or any
            shape/data-length inconsistency.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint")
    arrays: dict[str, Array] = {}
    try:
        for name, entry in payload["params"].items():
            shape = tuple(int(s) for s in entry["shape"])
            data = np.asarray(entry["data"], dtype=np.float64)
            if data.size != int(np.prod(shape, dtype=np.int64)):
                raise CheckpointError(f"checkpoint entry {name}: data does not match shape {shape}")
            arrays[name] = data.reshape(shape)
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"malformed checkpoint {path}: {exc}") from exc
    return arrays
