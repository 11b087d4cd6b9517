"""Binarizing autoencoder with a shared encode/decode matrix.

The encoder thresholds ``W @ x`` into bits; the decoder maps the bits back
with ``tanh(W.T @ b + c)``. The threshold is not differentiable, so the codes
are held constant during backpropagation and ``W`` is trained through the
decoder path only, plus the decorrelation penalty ``0.5 * ||W.T W - I||^2``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bitcode import BinaryEmbedding, BitCode, check_n_bits, pack_bits
from .embeddings import EmbeddingMatrix, _atomic_write_lines
from .errors import (ConfigurationError, DimensionError, EmptyInputError,
                     LengthError, ParseError)

log = logging.getLogger(__name__)


@dataclass
class AutoencoderModel:
    W: np.ndarray  # (n, m)
    c: np.ndarray  # (m,)

    def __post_init__(self):
        self.W = np.array(self.W, dtype=np.float64)
        self.c = np.array(self.c, dtype=np.float64).reshape(-1)
        if self.W.ndim != 2:
            raise DimensionError(f"W must be 2-D, got shape {self.W.shape}")
        try:
            check_n_bits(self.W.shape[0])
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if self.W.shape[1] < 1 or self.c.shape != (self.W.shape[1],):
            raise DimensionError(
                f"W is {self.W.shape} but c has shape {self.c.shape}")
        if not (np.isfinite(self.W).all() and np.isfinite(self.c).all()):
            raise ValueError("model parameters must be finite")

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[1]

    def copy(self) -> "AutoencoderModel":
        return AutoencoderModel(self.W.copy(), self.c.copy())


@dataclass(frozen=True)
class TrainingConfig:
    batch_size: int = 75
    epochs: int = 10
    learning_rate: float = 0.001
    momentum: float = 0.95
    lambda_reg: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be positive")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be positive")
        if self.learning_rate < 0:
            raise ConfigurationError("learning_rate must be non-negative")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError("momentum must lie in [0, 1)")
        if self.lambda_reg < 0:
            raise ConfigurationError("lambda_reg must be non-negative")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    rec_loss: float
    reg_loss: float
    objective: float
    seconds: float


@dataclass
class TrainingReport:
    epochs: list[EpochStats] = field(default_factory=list)

    @property
    def rec_losses(self) -> list[float]:
        return [e.rec_loss for e in self.epochs]

    @property
    def objectives(self) -> list[float]:
        return [e.objective for e in self.epochs]

    def __len__(self):
        return len(self.epochs)


def init_model(n: int, m: int, seed: int = 0) -> AutoencoderModel:
    """Uniform weights on ``[-1/sqrt(m), 1/sqrt(m)]``, zero bias."""
    try:
        check_n_bits(n)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    if m < 1:
        raise ConfigurationError(f"input dimension must be >= 1, got {m}")
    bound = 1.0 / math.sqrt(m)
    rng = np.random.default_rng(seed)
    return AutoencoderModel(rng.uniform(-bound, bound, size=(n, m)), np.zeros(m))


def _as_matrix(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.m:
        raise DimensionError(f"expected inputs of dimension {model.m}, got shape {X.shape}")
    return X


def encode_bits(model: AutoencoderModel, X) -> np.ndarray:
    """0/1 matrix ``(rows, n)``; bit ``i`` is set iff ``(W x)_i > 0``."""
    X = _as_matrix(model, X)
    return (X @ model.W.T > 0).astype(np.uint8)


def encode(model: AutoencoderModel, x) -> BitCode:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.m,):
        raise DimensionError(f"expected a {model.m}-vector, got shape {x.shape}")
    return BitCode.from_bits(encode_bits(model, x[None, :])[0])


def decode_bits(model: AutoencoderModel, B) -> np.ndarray:
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[1] != model.n:
        raise LengthError(f"expected {model.n}-bit codes, got shape {B.shape}")
    return np.tanh(B @ model.W + model.c)


def decode(model: AutoencoderModel, b: BitCode) -> np.ndarray:
    if b.n_bits != model.n:
        raise LengthError(f"model expects {model.n}-bit codes, got {b.n_bits}")
    return decode_bits(model, b.to_bits()[None, :].astype(np.float64))[0]


def reconstruction_loss(x, y_hat) -> float:
    x = np.asarray(x, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if x.shape != y_hat.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y_hat.shape}")
    return float(np.mean((x - y_hat) ** 2))


def regularization_loss(model: AutoencoderModel) -> float:
    G = model.W.T @ model.W - np.eye(model.m)
    return 0.5 * float(np.sum(G * G))


def batch_gradients(model: AutoencoderModel, batch, lambda_reg: float,
                    bits=None):
    """Gradients of ``mean_i rec(x_i) + lambda_reg * reg`` for one batch.

    ``bits`` may carry precomputed codes for the batch; by default they are
    encoded with the current weights. Either way they are constants here.
    Returns ``(grad_W, grad_c, (rec_loss, reg_loss))``.
    """
    X = _as_matrix(model, batch)
    if len(X) == 0:
        raise EmptyInputError("empty batch")
    B = encode_bits(model, X) if bits is None else np.asarray(bits)
    B = B.astype(np.float64)
    if B.shape != (len(X), model.n):
        raise DimensionError(f"bits have shape {B.shape}, expected {(len(X), model.n)}")
    m = model.m
    Y = np.tanh(B @ model.W + model.c)
    err = Y - X
    delta = (2.0 / m) * err * (1.0 - Y * Y)
    grad_c = delta.mean(axis=0)
    grad_W = B.T @ delta / len(X)

    G = model.W.T @ model.W - np.eye(m)
    grad_W += lambda_reg * 2.0 * (model.W @ G)
    rec = float(np.mean(err * err))
    reg = 0.5 * float(np.sum(G * G))
    return grad_W, grad_c, (rec, reg)


def train(emb: EmbeddingMatrix | np.ndarray, cfg: TrainingConfig, n_bits: int = 256,
          model: AutoencoderModel | None = None):
    """SGD with momentum over shuffled minibatches.

    ``emb`` should already be clipped to [-1, 1]. Unless ``model`` is given,
    training starts from ``init_model(n_bits, m, cfg.seed)``; the per-epoch
    shuffles use a separate stream derived from the same seed. Returns ``(model, TrainingReport)``.
    """
    X = np.asarray(emb.vectors if isinstance(emb, EmbeddingMatrix) else emb,
                   dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise EmptyInputError("cannot train on an empty embedding")
    rng = np.random.default_rng((cfg.seed, 1))
    if model is None:
        model = init_model(n_bits, X.shape[1], seed=cfg.seed)
    else:
        model = model.copy()
        _as_matrix(model, X[:1])
    vW = np.zeros_like(model.W)
    vc = np.zeros_like(model.c)
    report = TrainingReport()

    for epoch in range(1, cfg.epochs + 1):
        start = time.perf_counter()
        order = rng.permutation(len(X))
        rec_sum = 0.0
        reg_sum = 0.0
        n_batches = 0
        for lo in range(0, len(X), cfg.batch_size):
            batch = X[order[lo:lo + cfg.batch_size]]
            gW, gc, (rec, reg) = batch_gradients(model, batch, cfg.lambda_reg)
            vW = cfg.momentum * vW - cfg.learning_rate * gW
            vc = cfg.momentum * vc - cfg.learning_rate * gc
            model.W += vW
            model.c += vc
            rec_sum += rec * len(batch)
            reg_sum += reg
            n_batches += 1
        rec_mean = rec_sum / len(X)
        reg_mean = reg_sum / n_batches
        stats = EpochStats(epoch, rec_mean, reg_mean,
                           rec_mean + cfg.lambda_reg * reg_mean,
                           time.perf_counter() - start)
        report.epochs.append(stats)
        log.info("epoch %d: rec=%.6f reg=%.4f objective=%.6f (%.2fs)", epoch,
                 stats.rec_loss, stats.reg_loss, stats.objective, stats.seconds)
        if not np.isfinite(model.W).all():
            raise FloatingPointError(f"training diverged at epoch {epoch}")
    return model, report


def binarize_all(model: AutoencoderModel, emb: EmbeddingMatrix) -> BinaryEmbedding:
    if emb.m != model.m:
        raise DimensionError(f"model expects m={model.m}, embedding has m={emb.m}")
    return BinaryEmbedding(emb.words, pack_bits(encode_bits(model, emb.vectors)), model.n)


def reconstruct_all(model: AutoencoderModel, be: BinaryEmbedding) -> EmbeddingMatrix:
    if be.n_bits != model.n:
        raise LengthError(f"model expects {model.n}-bit codes, got {be.n_bits}")
    return EmbeddingMatrix(be.words, decode_bits(model, be.bits()))


def save_model(model: AutoencoderModel, path) -> None:
    """Header ``n m``, then the ``n`` rows of W, then c; 9 significant digits."""
    def lines():
        yield f"{model.n} {model.m}"
        for row in model.W:
            yield " ".join(f"{v:.9g}" for v in row.tolist())
        yield " ".join(f"{v:.9g}" for v in model.c.tolist())

    _atomic_write_lines(path, lines())


def load_model(path) -> AutoencoderModel:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty model file", None, path)
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise ParseError("expected header 'n m'", 1, path) from None
    if len(lines) != n + 2:
        raise ParseError(f"expected {n + 2} lines for n={n}, found {len(lines)}", None, path)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            row = [float(t) for t in line.split()]
        except ValueError:
            raise ParseError("non-numeric value", lineno, path) from None
        if len(row) != m:
            raise ParseError(f"expected {m} values, got {len(row)}", lineno, path)
        rows.append(row)
    return AutoencoderModel(np.array(rows[:n]), np.array(rows[n]))


def bit_correlation(bits) -> float:
    """Mean absolute off-diagonal Pearson correlation between bit columns.

    Constant columns carry no correlation and are dropped.
    """
    B = np.asarray(bits, dtype=np.float64)
    B = B[:, B.std(axis=0) > 0]
    if B.shape[1] < 2:
        return 0.0
    C = np.corrcoef(B, rowvar=False)
    off = ~np.eye(C.shape[0], dtype=bool)
    return float(np.abs(C[off]).mean())
