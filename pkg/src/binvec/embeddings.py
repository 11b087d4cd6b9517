"""Real-valued embeddings in the word2vec/GloVe text format."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, EmptyInputError, ParseError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Vocabulary paired with a ``(|V|, m)`` float32 matrix.

    ``n_duplicates`` counts lines dropped at load time because their word had
    already been seen.
    """

    words: list[str]
    vectors: np.ndarray
    n_duplicates: int = 0
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float32)
        if vectors.ndim == 1 and vectors.size == 0:
            vectors = vectors.reshape(0, 0)
        if vectors.ndim != 2:
            raise DimensionError(f"vectors must be 2-D, got shape {vectors.shape}")
        if vectors.shape[0] != len(self.words):
            raise DimensionError(
                f"{len(self.words)} words but {vectors.shape[0]} vector rows")
        if not np.isfinite(vectors).all():
            raise DimensionError("embedding contains non-finite values")
        index = {w: i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ValueError("words must be unique")
        vectors.setflags(write=False)
        object.__setattr__(self, "words", list(self.words))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)

    @property
    def m(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self._index

    def index(self, word: str) -> int:
        return self._index[word]

    def get(self, word: str) -> np.ndarray:
        return self.vectors[self._index[word]]

    def subset(self, words) -> "EmbeddingMatrix":
        rows = [self._index[w] for w in words]
        return EmbeddingMatrix(list(words), self.vectors[rows])


def _is_header(tokens) -> bool:
    if len(tokens) != 2:
        return False
    try:
        int(tokens[0]), int(tokens[1])
    except ValueError:
        return False
    return True


def load_text_embeddings(path, expected_dim: int | None = None) -> EmbeddingMatrix:
    """Read ``word v1 ... vm`` lines; a leading ``|V| m`` header is skipped.

    The word is everything before the first space. Values are parsed as
    float64 and stored as float32. Repeated words keep their first vector.
    """
    path = Path(path)
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    duplicates = 0
    dim = expected_dim
    header_dim = None

    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            if lineno == 1 and _is_header(line.split()):
                header_dim = int(line.split()[1])
                if dim is None:
                    dim = header_dim
                elif dim != header_dim:
                    raise DimensionError(
                        f"{path}: header declares m={header_dim}, expected {dim}")
                continue
            word, _, rest = line.partition(" ")
            try:
                values = np.array(rest.split(), dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"non-numeric value ({exc})", lineno, path) from None
            if not np.isfinite(values).all():
                raise ParseError("non-finite value", lineno, path)
            if dim is None:
                dim = len(values)
            if len(values) != dim or dim == 0:
                raise DimensionError(
                    f"{path}:{lineno}: row has {len(values)} values, expected {dim}")
            if word in seen:
                duplicates += 1
                continue
            seen.add(word)
            words.append(word)
            rows.append(values)

    if not words:
        if header_dim is not None:
            return EmbeddingMatrix([], np.zeros((0, header_dim), np.float32))
        raise EmptyInputError(f"{path}: no embeddings found")
    if duplicates:
        log.warning("%s: %d duplicate words ignored (first occurrence kept)",
                    path, duplicates)
    return EmbeddingMatrix(words, np.vstack(rows).astype(np.float32),
                           n_duplicates=duplicates)


def clip_to_unit_range(emb: EmbeddingMatrix) -> EmbeddingMatrix:
    return EmbeddingMatrix(emb.words, np.clip(emb.vectors, -1.0, 1.0))


def _atomic_write_lines(path, lines):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    os.replace(tmp, path)


def save_text_embeddings(emb: EmbeddingMatrix, path) -> None:
    """Write one ``word v1 ... vm`` line per word, six decimals per value.

    No header is written, so an empty matrix produces an empty file.
    """
    def lines():
        for word, row in zip(emb.words, emb.vectors):
            yield word + " " + " ".join(f"{v:.6f}" for v in row.tolist())

    _atomic_write_lines(path, lines())


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u.astype(np.float64), v.astype(np.float64)) / (nu * nv))
