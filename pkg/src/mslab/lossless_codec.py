"""Lossless codes for multisets from a known parent.

Two codes over the alphabet of types: a fixed-length enumerative code of
``ceil(log2 C(n + |X| - 1, |X| - 1))`` bits, and a Huffman code built on the
multinomial type distribution.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

from .bitstream import Bitstream
from .distributions import DiscretePMF
from .multiset_core import (
    ENTROPY_ENUM_GUARD,
    TypeVector,
    iter_types,
    multinomial_type_pmf,
    type_count,
    type_of,
    type_rank,
    type_unrank,
)


def enum_width(n: int, alphabet_size: int) -> int:
    """ceil(log2 of the number of types)."""
    return (type_count(n, alphabet_size) - 1).bit_length()


def enum_encode(t: TypeVector) -> Bitstream:
    return Bitstream.from_int(type_rank(t), enum_width(t.n, t.alphabet_size))


def enum_decode(b: Bitstream, n: int, alphabet_size: int) -> TypeVector:
    width = enum_width(n, alphabet_size)
    if b.nbits != width:
        raise ValueError(f"expected {width} bits, got {b.nbits}")
    rank = b.to_int()
    if rank >= type_count(n, alphabet_size):
        raise ValueError("invalid stream: rank exceeds the number of types")
    return type_unrank(rank, n, alphabet_size)


@dataclass(frozen=True)
class PrefixCode:
    """Codewords keyed by type rank; types of zero probability get no codeword."""

    n: int
    alphabet_size: int
    codewords: dict[int, str]
    _inverse: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_inverse", {w: r for r, w in self.codewords.items()})

    def is_prefix_free(self) -> bool:
        words = sorted(self.codewords.values())
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    def kraft_sum(self) -> float:
        return math.fsum(2.0 ** -len(w) for w in self.codewords.values())

    def expected_length(self, p: DiscretePMF) -> float:
        return math.fsum(
            multinomial_type_pmf(type_unrank(r, self.n, self.alphabet_size), p) * len(w)
            for r, w in self.codewords.items()
        )

    def encode_rank(self, rank: int) -> Bitstream:
        try:
            return Bitstream.from_bits(self.codewords[rank])
        except KeyError:
            raise ValueError(f"type rank {rank} has no codeword (zero probability)") from None

    def decode(self, b: Bitstream) -> int:
        word = ""
        for bit in b.bits():
            word += str(bit)
            if word in self._inverse:
                if len(word) != b.nbits:
                    raise ValueError("trailing bits after codeword")
                return self._inverse[word]
        if word in self._inverse:  # the empty codeword
            return self._inverse[word]
        raise ValueError("stream is not a codeword")


def build_optimal_code(n: int, p: DiscretePMF) -> PrefixCode:
    """Huffman code over the types of size n.

    Ties in probability merge the subtree with the lowest smallest rank
    first, which makes the codebook deterministic.
    """
    if type_count(n, p.alphabet_size) > ENTROPY_ENUM_GUARD:
        raise ValueError("type alphabet too large for an explicit code")
    # node = ("leaf", rank) or ("join", left, right)
    heap = []
    for r, t in enumerate(iter_types(n, p.alphabet_size)):
        prob = multinomial_type_pmf(t, p)
        if prob > 0:
            heap.append((prob, r, ("leaf", r)))
    heapq.heapify(heap)
    while len(heap) > 1:
        p0, r0, a = heapq.heappop(heap)
        p1, r1, b = heapq.heappop(heap)
        heapq.heappush(heap, (p0 + p1, min(r0, r1), ("join", a, b)))
    codes = {}
    stack = [(heap[0][2], "")]
    while stack:
        node, word = stack.pop()
        if node[0] == "leaf":
            codes[node[1]] = word
        else:
            stack.append((node[1], word + "0"))
            stack.append((node[2], word + "1"))
    return PrefixCode(n, p.alphabet_size, codes)


def encode_multiset(seq: Sequence[int], code: PrefixCode) -> Bitstream:
    t = type_of(seq, code.alphabet_size)
    if t.n != code.n:
        raise ValueError(f"code was built for n={code.n}, got {t.n} letters")
    return code.encode_rank(type_rank(t))


def decode_multiset(b: Bitstream, code: PrefixCode) -> TypeVector:
    return type_unrank(code.decode(b), code.n, code.alphabet_size)
