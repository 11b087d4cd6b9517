"""Exact top-K queries by linear scan, and the scan/load timing benchmark."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import _kernels
from .bitcode import BinaryEmbedding, BitCode, deserialize_hex
from .embeddings import EmbeddingMatrix, load_text_embeddings
from .errors import ConsistencyError, DegenerateQueryError, LengthError


@dataclass(frozen=True)
class TopKResult:
    """``(word, score)`` pairs, best first; equal scores in vocabulary order."""

    entries: list[tuple[str, float]]
    metric: str
    indices: list[int] = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.entries)

    @property
    def words(self):
        return [w for w, _ in self.entries]

    @property
    def scores(self):
        return [s for _, s in self.entries]

    def to_text(self) -> str:
        prec = 6 if self.metric == "cosine" else 4
        return "".join(f"{w} {s:.{prec}f}\n" for w, s in self.entries)


def _check_k(k):
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return int(k)


def topk_binary(be: BinaryEmbedding, query: BitCode, k: int) -> TopKResult:
    """Top ``k`` codes by Sokal & Michener similarity to ``query``."""
    k = _check_k(k)
    if query.n_bits != be.n_bits:
        raise LengthError(f"query has {query.n_bits} bits, codes have {be.n_bits}")
    idx, dist = _kernels.topk_hamming(be.codes, query.blocks, k)
    n = be.n_bits
    return TopKResult([(be.words[i], (n - d) / n) for i, d in zip(idx.tolist(), dist.tolist())],
                      "sokal_michener", idx.tolist())


def cosine_scores(X: np.ndarray, query, norms: np.ndarray | None = None) -> np.ndarray:
    """Cosine of every row of ``X`` with ``query``; zero rows score -1."""
    query = np.asarray(query, dtype=X.dtype)
    qn = float(np.linalg.norm(query))
    if qn == 0.0:
        raise DegenerateQueryError("query vector has zero norm")
    if norms is None:
        norms = np.linalg.norm(X, axis=1)
    dots = X @ query
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = dots / (norms * qn)
    scores[norms == 0] = -1.0
    return scores


def select_topk(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` best scores, descending, ties by ascending index."""
    n = len(scores)
    k = min(k, n)
    if k < n:
        # everything tied with the k-th best value must be considered
        kth = np.partition(scores, n - k)[n - k]
        cand = np.flatnonzero(scores >= kth)
    else:
        cand = np.arange(n)
    order = np.lexsort((cand, -scores[cand]))
    return cand[order[:k]]


def topk_real(emb: EmbeddingMatrix, query, k: int, norms=None) -> TopKResult:
    """Top ``k`` vectors by cosine similarity to ``query``."""
    k = _check_k(k)
    query = np.asarray(query)
    if query.shape != (emb.m,):
        raise LengthError(f"query has shape {query.shape}, expected ({emb.m},)")
    scores = cosine_scores(emb.vectors, query, norms)
    idx = select_topk(scores, k)
    return TopKResult([(emb.words[i], float(scores[i])) for i in idx.tolist()],
                      "cosine", idx.tolist())


@dataclass
class BenchRow:
    config: str
    k: int | None
    median_ms: float
    min_ms: float
    reps: int
    vocab: int
    kind: str = "scan"


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def row(self, config, k, kind="scan"):
        for r in self.rows:
            if r.config == config and r.k == k and r.kind == kind:
                return r
        raise KeyError((config, k, kind))

    def speedup(self, k=10, bits_config=None) -> float:
        real = self.row("real-valued", k).median_ms
        if bits_config is None:
            bits_config = next(r.config for r in self.rows if r.config != "real-valued")
        return real / self.row(bits_config, k).median_ms

    def to_text(self) -> str:
        configs = list(dict.fromkeys(r.config for r in self.rows))
        labels = []
        for r in self.rows:
            label = f"Top {r.k}" if r.kind == "scan" else "Loading + Top 10"
            if (label, r.kind, r.k) not in labels:
                labels.append((label, r.kind, r.k))
        width = max(14, *(len(c) for c in configs))
        head = f"{'Execution time (ms)':<20}" + "".join(f"{c:>{width}}" for c in configs)
        lines = [head]
        for label, kind, k in labels:
            cells = []
            for c in configs:
                try:
                    cells.append(f"{self.row(c, k, kind).median_ms:>{width}.3f}")
                except KeyError:
                    cells.append(f"{'-':>{width}}")
            lines.append(f"{label:<20}" + "".join(cells))
        vocab = self.rows[0].vocab if self.rows else 0
        reps = self.rows[0].reps if self.rows else 0
        lines.append(f"(|V| = {vocab}, median of {reps} repetitions, single-threaded)")
        return "\n".join(lines) + "\n"

    def to_records(self) -> str:
        out = []
        for r in self.rows:
            out.append(f"bench={r.kind} config={r.config} k={r.k} median_ms={r.median_ms:.4f} "
                       f"min_ms={r.min_ms:.4f} reps={r.reps} vocab={r.vocab}\n")
        return "".join(out)


def _time(fn, reps):
    fn()  # warm-up (also triggers JIT compilation)
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times), min(times)


def bench_topk(be: BinaryEmbedding, emb: EmbeddingMatrix, ks=(1, 10, 50), reps=9,
               query_word=None, codes_path=None, vectors_path=None,
               load_reps=5) -> BenchReport:
    """Median scan-only time per K for codes and floats, plus cold load + top-10.

    Norms of the real vectors are precomputed as part of loading, so the scan
    timings cover the same work on both sides: score every row, keep the K
    best. BLAS is pinned to one thread. The load rows are only produced when
    the file paths are given.
    """
    if reps < 5 or load_reps < 5:
        raise ValueError("at least 5 repetitions are required")
    if be.words != emb.words:
        raise ConsistencyError("codes and vectors must share the same vocabulary order")
    if len(be) == 0:
        raise ConsistencyError("empty vocabulary")
    qi = be.index(query_word) if query_word is not None else 0
    config = f"{be.n_bits}-bit"
    report = BenchReport()
    q_code = be.code(qi)
    q_vec = emb.vectors[qi]
    norms = np.linalg.norm(emb.vectors, axis=1)
    with threadpool_limits(limits=1):
        for k in ks:
            med, mn = _time(lambda: topk_binary(be, q_code, k), reps)
            report.rows.append(BenchRow(config, k, med, mn, reps, len(be)))
        for k in ks:
            med, mn = _time(lambda: topk_real(emb, q_vec, k, norms), reps)
            report.rows.append(BenchRow("real-valued", k, med, mn, reps, len(be)))

        if codes_path is not None:
            def cold_binary():
                loaded = deserialize_hex(codes_path)
                topk_binary(loaded, loaded.code(qi), 10)
            med, mn = _time(cold_binary, load_reps)
            report.rows.append(BenchRow(config, 10, med, mn, load_reps, len(be), "load"))
        if vectors_path is not None:
            def cold_real():
                loaded = load_text_embeddings(vectors_path)
                topk_real(loaded, loaded.vectors[qi], 10)
            med, mn = _time(cold_real, load_reps)
            report.rows.append(BenchRow("real-valued", 10, med, mn, load_reps, len(be), "load"))
    return report
