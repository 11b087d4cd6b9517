"""Packed binary codes, their similarity measures and the hex file format.

Bit ``i`` of an ``n``-bit code lives in 64-bit block ``i // 64`` at position
``i % 64`` (LSB first). Code lengths are multiples of 64 so every similarity
reduces to whole-word XOR/AND plus popcount.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import _atomic_write_lines
from .errors import AlignmentError, DimensionError, LengthError, ParseError

BLOCK_BITS = 64
ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
_HEX_BLOCK = re.compile(r"[0-9a-fA-F]{16}")


def check_n_bits(n_bits: int) -> int:
    if int(n_bits) != n_bits or n_bits <= 0 or n_bits % BLOCK_BITS:
        raise AlignmentError(
            f"code length must be a positive multiple of 64 bits, got {n_bits}")
    return int(n_bits)


def pack_bits(bits) -> np.ndarray:
    """Pack a ``(..., n)`` 0/1 array into ``(..., n // 64)`` uint64 blocks."""
    bits = np.asarray(bits)
    n = bits.shape[-1]
    check_n_bits(n)
    packed = np.packbits(bits.astype(bool), axis=-1, bitorder="little")
    return packed.view("<u8").astype(np.uint64)


def unpack_bits(blocks, n_bits: int | None = None) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns uint8 0/1 values."""
    blocks = np.ascontiguousarray(np.asarray(blocks, dtype="<u8"))
    bits = np.unpackbits(blocks.view(np.uint8), axis=-1, bitorder="little")
    if n_bits is not None:
        bits = bits[..., :n_bits]
    return bits


@dataclass(frozen=True)
class BitCode:
    """An immutable ``n_bits``-bit code stored as uint64 blocks."""

    blocks: np.ndarray

    def __post_init__(self):
        blocks = np.array(self.blocks, dtype=np.uint64).reshape(-1)
        if blocks.size == 0:
            raise AlignmentError("a code needs at least one 64-bit block")
        blocks.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @property
    def n_bits(self) -> int:
        return self.blocks.size * BLOCK_BITS

    @classmethod
    def from_bits(cls, bits) -> "BitCode":
        return cls(pack_bits(bits))

    @classmethod
    def from_int(cls, value: int, n_bits: int = 64) -> "BitCode":
        check_n_bits(n_bits)
        if value < 0 or value >> n_bits:
            raise ValueError(f"{value:#x} does not fit in {n_bits} bits")
        mask = (1 << BLOCK_BITS) - 1
        return cls([(value >> (BLOCK_BITS * j)) & mask
                    for j in range(n_bits // BLOCK_BITS)])

    @classmethod
    def zeros(cls, n_bits: int = 64) -> "BitCode":
        return cls(np.zeros(check_n_bits(n_bits) // BLOCK_BITS, np.uint64))

    @classmethod
    def ones(cls, n_bits: int = 64) -> "BitCode":
        return cls(np.full(check_n_bits(n_bits) // BLOCK_BITS, ALL_ONES))

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.blocks)

    def to_int(self) -> int:
        return sum(int(b) << (BLOCK_BITS * j) for j, b in enumerate(self.blocks))

    def popcount(self) -> int:
        return int(np.bitwise_count(self.blocks).sum())

    def _check(self, other: "BitCode"):
        if self.n_bits != other.n_bits:
            raise LengthError(
                f"code lengths differ: {self.n_bits} vs {other.n_bits} bits")

    def __invert__(self):
        return BitCode(~self.blocks)

    def __and__(self, other):
        self._check(other)
        return BitCode(self.blocks & other.blocks)

    def __or__(self, other):
        self._check(other)
        return BitCode(self.blocks | other.blocks)

    def __xor__(self, other):
        self._check(other)
        return BitCode(self.blocks ^ other.blocks)

    def __eq__(self, other):
        if not isinstance(other, BitCode):
            return NotImplemented
        return self.n_bits == other.n_bits and bool(
            np.array_equal(self.blocks, other.blocks))

    def __hash__(self):
        return hash(self.blocks.tobytes())

    def hex(self) -> str:
        return " ".join(f"{int(b):016x}" for b in self.blocks)

    def pattern(self, on: str = "#", off: str = ".") -> str:
        return "".join(on if b else off for b in self.to_bits())

    def __repr__(self):
        return f"BitCode({self.n_bits}, {self.hex()})"


def hamming(a: BitCode, b: BitCode) -> int:
    a._check(b)
    return int(np.bitwise_count(a.blocks ^ b.blocks).sum())


def sokal_michener(a: BitCode, b: BitCode) -> float:
    """(n11 + n00) / n: the fraction of positions where both codes agree."""
    a._check(b)
    n11 = int(np.bitwise_count(a.blocks & b.blocks).sum())
    n00 = int(np.bitwise_count(~a.blocks & ~b.blocks).sum())
    return (n11 + n00) / a.n_bits


ANALOGY_VARIANTS = ("subfirst", "addfirst")


def analogy_code(a: BitCode, b: BitCode, c: BitCode,
                 variant: str = "subfirst") -> BitCode:
    """Binary stand-in for ``b - a + c``.

    ``subfirst`` (default) is ``(b AND NOT a) OR c``; ``addfirst`` is
    ``(b OR c) AND NOT a``.
    """
    a._check(b)
    a._check(c)
    if variant == "subfirst":
        return BitCode((b.blocks & ~a.blocks) | c.blocks)
    if variant == "addfirst":
        return BitCode((b.blocks | c.blocks) & ~a.blocks)
    raise ValueError(f"unknown analogy variant {variant!r}; use one of {ANALOGY_VARIANTS}")


@dataclass(frozen=True)
class BinaryEmbedding:
    """Words paired with equal-length codes, stored as a ``(|V|, blocks)`` array."""

    words: list[str]
    codes: np.ndarray
    n_bits: int
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_n_bits(self.n_bits)
        nb = self.n_bits // BLOCK_BITS
        codes = np.ascontiguousarray(np.asarray(self.codes, dtype=np.uint64))
        if codes.size == 0:
            codes = codes.reshape(0, nb)
        if codes.shape != (len(self.words), nb):
            raise DimensionError(
                f"expected codes of shape ({len(self.words)}, {nb}), got {codes.shape}")
        index = {w: i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ValueError("words must be unique")
        codes.setflags(write=False)
        object.__setattr__(self, "words", list(self.words))
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_bits(cls, words, bits) -> "BinaryEmbedding":
        bits = np.asarray(bits)
        return cls(list(words), pack_bits(bits), bits.shape[-1])

    @classmethod
    def from_codes(cls, words, codes) -> "BinaryEmbedding":
        codes = list(codes)
        if not codes:
            raise ValueError("cannot infer n_bits from an empty code list")
        for c in codes[1:]:
            codes[0]._check(c)
        return cls(list(words), np.stack([c.blocks for c in codes]), codes[0].n_bits)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self._index

    def __eq__(self, other):
        if not isinstance(other, BinaryEmbedding):
            return NotImplemented
        return (self.n_bits == other.n_bits and self.words == other.words
                and bool(np.array_equal(self.codes, other.codes)))

    def index(self, word: str) -> int:
        return self._index[word]

    def code(self, i: int) -> BitCode:
        return BitCode(self.codes[i])

    def get(self, word: str) -> BitCode:
        return self.code(self._index[word])

    def bits(self) -> np.ndarray:
        return unpack_bits(self.codes, self.n_bits)


def serialize_hex(be: BinaryEmbedding, path) -> None:
    def lines():
        yield f"{len(be)} {be.n_bits}"
        for word, row in zip(be.words, be.codes):
            yield word + " " + " ".join(f"{int(b):016x}" for b in row)

    _atomic_write_lines(path, lines())


def _parse_block(token, lineno, path):
    if not _HEX_BLOCK.fullmatch(token):
        raise ParseError(f"block {token!r} is not 16 hex digits", lineno, path)
    return int(token, 16)


def deserialize_hex(path) -> BinaryEmbedding:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ParseError("expected header '|V| n_bits'", 1, path)
        try:
            n_words, n_bits = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError("header values must be integers", 1, path) from None
        try:
            check_n_bits(n_bits)
        except AlignmentError as exc:
            raise ParseError(str(exc), 1, path) from None
        nb = n_bits // BLOCK_BITS
        words = []
        codes = np.zeros((n_words, nb), dtype=np.uint64)
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split(" ")
            if len(parts) != nb + 1:
                raise ParseError(
                    f"expected word + {nb} blocks, got {len(parts) - 1} blocks",
                    lineno, path)
            if len(words) >= n_words:
                raise ParseError(f"more than the {n_words} words in the header",
                                 lineno, path)
            codes[len(words)] = [_parse_block(t, lineno, path) for t in parts[1:]]
            words.append(parts[0])
    if len(words) != n_words:
        raise ParseError(f"header declares {n_words} words, found {len(words)}",
                         None, path)
    return BinaryEmbedding(words, codes, n_bits)
