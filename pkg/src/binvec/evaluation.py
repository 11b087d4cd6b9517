"""Word similarity, word analogy and aggregate scores.

Real-valued vectors are scored with cosine similarity, binary codes with
Sokal & Michener similarity. Both go through the same ranking code.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .bitcode import BinaryEmbedding, analogy_code, sokal_michener
from .embeddings import EmbeddingMatrix, cosine
from .errors import (DomainError, EmptyInputError, InsufficientDataError,
                     ParseError)


@dataclass
class SimilarityDataset:
    name: str
    pairs: list[tuple[str, str, float]]

    def __post_init__(self):
        for w1, w2, gold in self.pairs:
            if not w1 or not w2:
                raise ValueError(f"{self.name}: empty word in pair ({w1!r}, {w2!r})")
            if not math.isfinite(gold):
                raise ValueError(f"{self.name}: non-finite gold score for ({w1}, {w2})")

    def __len__(self):
        return len(self.pairs)


@dataclass
class AnalogyDataset:
    """Questions ``a : b :: c : d`` grouped under ``semantic``/``syntactic``."""

    name: str
    questions: list[tuple[str, str, str, str]]
    sections: list[str]

    def __post_init__(self):
        if len(self.sections) != len(self.questions):
            raise ValueError("one section tag per question is required")
        for q in self.questions:
            if len(q) != 4 or not all(q):
                raise ValueError(f"{self.name}: malformed question {q!r}")

    def __len__(self):
        return len(self.questions)


def load_similarity_dataset(path, name=None, lowercase=False) -> SimilarityDataset:
    """``word1 word2 score`` per line, tab or space separated.

    Blank lines, ``#`` comments and a non-numeric first line (a header) are
    skipped.
    """
    path = Path(path)
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) < 3:
                raise ParseError("expected 'word1 word2 score'", lineno, path)
            try:
                score = float(parts[2])
            except ValueError:
                if not pairs and lineno == 1:
                    continue
                raise ParseError(f"non-numeric score {parts[2]!r}", lineno, path) from None
            w1, w2 = parts[0], parts[1]
            if lowercase:
                w1, w2 = w1.lower(), w2.lower()
            pairs.append((w1, w2, score))
    return SimilarityDataset(name or path.stem, pairs)


def _section_kind(header: str) -> str:
    # Google analogy set: syntactic sections are named "gram*"
    return "syntactic" if header.lower().startswith("gram") else "semantic"


def load_analogy_dataset(path, name=None, lowercase=False) -> AnalogyDataset:
    path = Path(path)
    questions, sections = [], []
    kind = "semantic"
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == ":":
                kind = _section_kind(" ".join(parts[1:]))
                continue
            if parts[0].startswith(":"):
                kind = _section_kind(line.strip()[1:])
                continue
            if len(parts) != 4:
                raise ParseError(f"expected 4 words, got {len(parts)}", lineno, path)
            if lowercase:
                parts = [p.lower() for p in parts]
            questions.append(tuple(parts))
            sections.append(kind)
    return AnalogyDataset(name or path.stem, questions, sections)


def rank_average(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    start = 0
    n = len(values)
    while start < n:
        end = start + 1
        while end < n and sorted_vals[end] == sorted_vals[start]:
            end += 1
        ranks[order[start:end]] = (start + end + 1) / 2.0
        start = end
    return ranks


def spearman(xs, ys) -> float:
    """Pearson correlation of the average-tie ranks of ``xs`` and ``ys``.

    Doubled average ranks are integers, so the centred sums are formed
    exactly; without ties the result is a single correctly rounded division.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError(f"inputs must be equal-length 1-D sequences, got {xs.shape} and {ys.shape}")
    if len(xs) < 2:
        raise InsufficientDataError("spearman needs at least 2 observations")
    a = (2 * rank_average(xs)).astype(np.int64)
    b = (2 * rank_average(ys)).astype(np.int64)
    k = len(a)
    sa, sb = int(a.sum()), int(b.sum())
    sxy = k * int(a @ b) - sa * sb
    sxx = k * int(a @ a) - sa * sa
    syy = k * int(b @ b) - sb * sb
    if sxx == 0 or syy == 0:
        raise DomainError("correlation is undefined for a constant input")
    if sxx == syy:
        rho = sxy / sxx
    else:
        rho = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, rho))


def fisher_average(rhos) -> float:
    """``tanh(mean(atanh(rho)))``; every ``|rho|`` must be below 1."""
    rhos = [float(r) for r in rhos]
    if not rhos:
        raise EmptyInputError("no correlations to average")
    for r in rhos:
        if not abs(r) < 1:
            raise DomainError(f"Fisher transform needs |rho| < 1, got {r}")
    return math.tanh(sum(math.atanh(r) for r in rhos) / len(rhos))


def make_scorer(vectors):
    """Pair scorer for either representation; ``None`` for out-of-vocabulary pairs."""
    if isinstance(vectors, BinaryEmbedding):
        def score(w1, w2):
            if w1 not in vectors or w2 not in vectors:
                return None
            return sokal_michener(vectors.get(w1), vectors.get(w2))
    else:
        def score(w1, w2):
            if w1 not in vectors or w2 not in vectors:
                return None
            return cosine(vectors.get(w1), vectors.get(w2))
    return score


@dataclass
class SimilarityResult:
    dataset: str
    rho_x100: float
    found: int
    oov: int


def eval_similarity(scorer, ds: SimilarityDataset) -> SimilarityResult:
    """Spearman x 100 between gold scores and ``scorer`` over in-vocabulary pairs.

    ``scorer(w1, w2)`` returns ``None`` when either word is unknown; such
    pairs are counted as OOV. Accepts an embedding in place of a scorer.
    """
    if isinstance(scorer, (EmbeddingMatrix, BinaryEmbedding)):
        scorer = make_scorer(scorer)
    gold, pred = [], []
    oov = 0
    for w1, w2, g in ds.pairs:
        s = scorer(w1, w2)
        if s is None:
            oov += 1
            continue
        gold.append(g)
        pred.append(s)
    if len(gold) < 2:
        raise InsufficientDataError(
            f"{ds.name}: only {len(gold)} of {len(ds)} pairs are in vocabulary")
    return SimilarityResult(ds.name, 100.0 * spearman(gold, pred), len(gold), oov)


@dataclass
class AnalogyResult:
    dataset: str
    correct: dict[str, int] = field(default_factory=dict)
    attempted: dict[str, int] = field(default_factory=dict)
    skipped: int = 0

    def accuracy(self, section=None) -> float | None:
        if section is None:
            c, a = sum(self.correct.values()), sum(self.attempted.values())
        else:
            c, a = self.correct.get(section, 0), self.attempted.get(section, 0)
        return 100.0 * c / a if a else None


def _nearest_excluding(scores, exclude):
    # highest score, ties to the lowest index, query words removed
    scores = scores.copy()
    scores[list(exclude)] = -np.inf
    return int(np.argmax(scores))


def eval_analogy(vectors, ds: AnalogyDataset, variant="subfirst") -> AnalogyResult:
    """Fraction of questions whose nearest neighbour to the target is ``d``.

    Real vectors use ``b - a + c`` and cosine; binary codes use
    :func:`analogy_code` and Sokal & Michener. ``a``, ``b`` and ``c`` are never
    candidates. Questions with an unknown word are skipped.
    """
    if len(ds) == 0:
        raise EmptyInputError(f"{ds.name}: no analogy questions")
    result = AnalogyResult(ds.name)
    binary = isinstance(vectors, BinaryEmbedding)
    if not binary:
        X = vectors.vectors.astype(np.float64)
        norms = np.linalg.norm(X, axis=1)
        norms[norms == 0] = 1.0
        Xn = X / norms[:, None]

    for (a, b, c, d), section in zip(ds.questions, ds.sections):
        if not all(w in vectors for w in (a, b, c, d)):
            result.skipped += 1
            continue
        ia, ib, ic, id_ = (vectors.index(w) for w in (a, b, c, d))
        if binary:
            target = analogy_code(vectors.code(ia), vectors.code(ib),
                                  vectors.code(ic), variant)
            dist = _kernels.hamming_to_all(vectors.codes, target.blocks)
            scores = -dist.astype(np.float64)
        else:
            target = Xn[ib] - Xn[ia] + Xn[ic]
            scores = Xn @ target
        best = _nearest_excluding(scores, (ia, ib, ic))
        result.attempted[section] = result.attempted.get(section, 0) + 1
        result.correct[section] = result.correct.get(section, 0) + int(best == id_)
    return result


def precision_at_k(vectors, labels, k=10) -> float:
    """Mean fraction of each word's ``k`` nearest neighbours sharing its label.

    The word itself is excluded; ties are broken by vocabulary index.
    """
    labels = np.asarray(labels)
    hits = 0
    if isinstance(vectors, BinaryEmbedding):
        for i in range(len(vectors)):
            scores = -_kernels.hamming_to_all(vectors.codes, vectors.codes[i]).astype(np.float64)
            hits += _hits(scores, i, labels, k)
    else:
        X = vectors.vectors.astype(np.float64)
        norms = np.linalg.norm(X, axis=1)
        norms[norms == 0] = 1.0
        Xn = X / norms[:, None]
        for i in range(len(vectors)):
            hits += _hits(Xn @ Xn[i], i, labels, k)
    return hits / (k * len(labels))


def _hits(scores, i, labels, k):
    scores[i] = -np.inf
    top = np.lexsort((np.arange(len(scores)), -scores))[:k]
    return int((labels[top] == labels[i]).sum())


@dataclass
class EvalReport:
    similarity: list[SimilarityResult] = field(default_factory=list)
    analogy: list[AnalogyResult] = field(default_factory=list)

    def fisher(self) -> float | None:
        if len(self.similarity) < 2:
            return None
        return 100.0 * fisher_average([r.rho_x100 / 100.0 for r in self.similarity])

    def records(self):
        """Flat dicts, one per dataset/metric."""
        for r in self.similarity:
            yield OrderedDict(task="similarity", dataset=r.dataset, metric="spearman_x100",
                              value=f"{r.rho_x100:.2f}", found=r.found, oov=r.oov)
        fisher = self.fisher()
        if fisher is not None:
            yield OrderedDict(task="similarity", dataset="all", metric="fisher_x100",
                              value=f"{fisher:.2f}", datasets=len(self.similarity))
        for r in self.analogy:
            for section in sorted(r.attempted):
                yield OrderedDict(task="analogy", dataset=r.dataset, section=section,
                                  metric="accuracy", value=f"{r.accuracy(section):.2f}",
                                  attempted=r.attempted[section], skipped=r.skipped)
            if not r.attempted:
                yield OrderedDict(task="analogy", dataset=r.dataset, section="all",
                                  metric="accuracy", value="nan", attempted=0,
                                  skipped=r.skipped)

    def to_records(self) -> str:
        return "".join(" ".join(f"{k}={v}" for k, v in rec.items()) + "\n"
                       for rec in self.records())

    def to_text(self) -> str:
        lines = []
        if self.similarity:
            w = max(len(r.dataset) for r in self.similarity)
            w = max(w, len("Fisher avg"), len("dataset"))
            lines.append(f"{'dataset':<{w}}  {'rho x100':>8}  {'found':>6}  {'oov':>6}")
            for r in self.similarity:
                lines.append(f"{r.dataset:<{w}}  {r.rho_x100:8.2f}  {r.found:6d}  {r.oov:6d}")
            fisher = self.fisher()
            if fisher is not None:
                lines.append(f"{'Fisher avg':<{w}}  {fisher:8.2f}")
        for r in self.analogy:
            if lines:
                lines.append("")
            lines.append(f"analogy: {r.dataset} (skipped {r.skipped})")
            for section in sorted(r.attempted):
                lines.append(f"  {section:<10} {r.accuracy(section):6.2f}%  "
                             f"({r.correct[section]}/{r.attempted[section]})")
            if not r.attempted:
                lines.append("  no question attempted")
        return "\n".join(lines) + "\n"
