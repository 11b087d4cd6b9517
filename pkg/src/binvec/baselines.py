"""Comparison binarizers: per-dimension sign and random-hyperplane LSH."""

import numpy as np

from .bitcode import BinaryEmbedding, check_n_bits, pack_bits
from .embeddings import EmbeddingMatrix
from .errors import AlignmentError, ConfigurationError


def naive_binarize(emb: EmbeddingMatrix) -> BinaryEmbedding:
    """Bit ``k`` is 1 iff component ``k`` is >= 0, so the code has ``m`` bits."""
    if emb.m == 0 or emb.m % 64:
        raise AlignmentError(
            f"naive binarization keeps all {emb.m} dimensions, which is not a "
            "multiple of 64 and so not aligned with CPU registers; retrain the "
            "real-valued embeddings at 64, 128, 256 or 512 dimensions, or use "
            "the autoencoder")
    return BinaryEmbedding(emb.words, pack_bits(emb.vectors >= 0), emb.m)


def lsh_hyperplanes(n_bits: int, m: int, seed: int = 0) -> np.ndarray:
    """``(n_bits, m)`` standard normal hyperplane normals, not orthogonalized."""
    try:
        check_n_bits(n_bits)
    except AlignmentError as exc:
        raise ConfigurationError(str(exc)) from None
    return np.random.default_rng(seed).standard_normal((n_bits, m))


def lsh_binarize(emb: EmbeddingMatrix, n_bits: int, seed: int = 0) -> BinaryEmbedding:
    """Bit ``i`` is 1 iff ``r_i . x >= 0`` for the seeded hyperplanes ``r_i``."""
    R = lsh_hyperplanes(n_bits, emb.m, seed)
    bits = emb.vectors.astype(np.float64) @ R.T >= 0
    return BinaryEmbedding(emb.words, pack_bits(bits), n_bits)
