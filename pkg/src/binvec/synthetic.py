"""Clustered toy embeddings for desk-scale experiments and tests."""

import numpy as np

from .embeddings import EmbeddingMatrix, clip_to_unit_range


def clustered_embeddings(n_vectors=1000, m=20, n_clusters=10, spread=0.15,
                         center_scale=0.5, seed=0):
    """Gaussian clusters in ``R^m``, clipped to [-1, 1].

    Centers are drawn from ``N(0, center_scale^2)`` and members from
    ``N(center, spread^2)``. Words are named ``c{cluster}_{i}``; clusters are
    assigned round-robin. Returns ``(EmbeddingMatrix, labels)``.
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, center_scale, size=(n_clusters, m))
    labels = np.arange(n_vectors) % n_clusters
    X = centers[labels] + rng.normal(0.0, spread, size=(n_vectors, m))
    words = [f"c{lab}_{i}" for i, lab in enumerate(labels)]
    return clip_to_unit_range(EmbeddingMatrix(words, X)), labels


def random_embeddings(n_vectors, m, seed=0, dtype=np.float32):
    """Standard normal vectors with placeholder words ``w0, w1, ...``."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_vectors, m)).astype(dtype)
    return EmbeddingMatrix([f"w{i}" for i in range(n_vectors)], X)
