"""k-gram multisets and empirical entropy tables.

A k-gram multiset keeps the order of letters inside each sliding window of
length k and forgets the order of the windows.  k = 1 is the plain
multiset, k = n the sequence itself.

Plain sliding multisets are not nested in k (``010`` and ``101`` share the
digram multiset {01, 10} but not the letter multiset), so the entropy table
defaults to the *anchored* representation: the sliding k-gram multiset
together with the first k - 1 letters.  From that one recovers the anchored
(k - 1)-gram representation, which makes the table rows nonincreasing on
every corpus.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Sequence

from .distributions import entropy_bits
from .multiset_core import type_count

BRUTE_FORCE_GUARD = 1 << 16


@dataclass(frozen=True)
class KGramMultiset:
    k: int
    counts: tuple[tuple[tuple, int], ...]

    @classmethod
    def from_counter(cls, k: int, c: Counter) -> "KGramMultiset":
        return cls(k, tuple(sorted(c.items())))

    def as_dict(self) -> dict[tuple, int]:
        return dict(self.counts)

    @property
    def size(self) -> int:
        return sum(c for _, c in self.counts)


def kgram_multiset(seq: Sequence, k: int) -> KGramMultiset:
    n = len(seq)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    seq = tuple(seq)
    return KGramMultiset.from_counter(k, Counter(seq[i : i + k] for i in range(n - k + 1)))


def anchored_kgram(seq: Sequence, k: int) -> tuple[tuple, KGramMultiset]:
    """(first k - 1 letters, sliding k-gram multiset)."""
    return tuple(seq[: k - 1]), kgram_multiset(seq, k)


def representation(seq: Sequence, k: int | None, windowing: str = "anchored") -> Hashable:
    """Hashable key; ``k=None`` means the full sequence."""
    if k is None:
        return tuple(seq)
    if windowing == "anchored":
        return anchored_kgram(seq, k)
    if windowing == "sliding":
        return kgram_multiset(seq, k)
    raise ValueError("windowing must be 'anchored' or 'sliding'")


def markov_type_count_bound(n: int, alphabet_size: int, ell: int) -> int:
    """(n + 1)^(|X|^ell)."""
    if n < 0 or alphabet_size < 1 or ell < 1:
        raise ValueError("need n >= 0, |X| >= 1, ell >= 1")
    return (n + 1) ** (alphabet_size**ell)


def distinct_kgram_multisets(n: int, alphabet_size: int, k: int | None, windowing: str = "sliding") -> int:
    """Number of distinct representations over all |X|^n sequences."""
    if alphabet_size**n > BRUTE_FORCE_GUARD * 16:
        raise ValueError("too many sequences to enumerate")
    seen = {representation(s, k, windowing) for s in itertools.product(range(alphabet_size), repeat=n)}
    return len(seen)


@dataclass(frozen=True)
class CountRow:
    n: int
    k: int
    distinct: int
    bound: int

    @property
    def log2_distinct(self) -> float:
        return math.log2(self.distinct)

    @property
    def log2_bound(self) -> float:
        return math.log2(self.bound)


def kgram_count_table(n_max: int = 16, ks: Iterable[int] = (1, 2, 3), alphabet_size: int = 2) -> list[CountRow]:
    """Brute-force distinct sliding k-gram multiset counts against (n+1)^(|X|^k)."""
    rows = []
    ks = sorted(set(ks))
    for n in range(1, n_max + 1):
        for k in ks:
            if k > n:
                continue
            rows.append(
                CountRow(n, k, distinct_kgram_multisets(n, alphabet_size, k), markov_type_count_bound(n, alphabet_size, k))
            )
    return rows


# ---------------------------------------------------------------------------
# entropy tables


@dataclass(frozen=True)
class EntropyRow:
    label: str
    entropy_bits: float
    bound_bits: float


@dataclass(frozen=True)
class EntropyTable:
    rows: tuple[EntropyRow, ...]
    n: int
    alphabet_size: int
    windowing: str

    def is_monotone(self, slack: float = 1e-12) -> bool:
        h = [r.entropy_bits for r in self.rows]
        return all(b <= a + slack for a, b in zip(h, h[1:]))

    def within_bounds(self, slack: float = 1e-12) -> bool:
        return all(r.entropy_bits <= r.bound_bits + slack for r in self.rows)

    def to_records(self) -> list[dict]:
        return [{"representation": r.label, "entropy_bits": r.entropy_bits, "bound_bits": r.bound_bits} for r in self.rows]


def read_corpus(path: str) -> list[tuple[int, ...]]:
    """One sequence per line, integer letters separated by whitespace."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(tuple(int(t) for t in line.split()))
            except ValueError:
                raise ValueError(f"line {lineno}: letters must be integers") from None
    return out


@lru_cache(maxsize=None)
def _enumeration_bound(n: int, A: int, k: int | None, windowing: str) -> float:
    """log2 of the number of representations any length-n sequence can have."""
    if k is None or k == n:
        return n * math.log2(A)
    if A**n <= BRUTE_FORCE_GUARD:
        return math.log2(distinct_kgram_multisets(n, A, k, windowing))
    grams = A**k
    count = type_count(n - k + 1, grams)
    if windowing == "anchored":
        count *= A ** (k - 1)
    return min(math.log2(count), n * math.log2(A))


def empirical_entropy_table(
    corpus: Sequence[Sequence[int]],
    grams: Iterable[int] = (1, 2, 3, 4),
    windowing: str = "anchored",
    alphabet_size: int | None = None,
) -> EntropyTable:
    """Plug-in entropies of the sequence, each k-gram multiset (largest k
    first) and the plain multiset, with log2 enumeration bounds."""
    if not corpus:
        raise ValueError("empty corpus")
    n = len(corpus[0])
    if n < 1 or any(len(s) != n for s in corpus):
        raise ValueError("all corpus sequences must have the same positive length")
    letters = {x for s in corpus for x in s}
    A = alphabet_size if alphabet_size is not None else len(letters)
    if A < len(letters):
        raise ValueError("alphabet size smaller than the number of distinct letters")
    # relabel letters to 0..A-1 so bounds depend only on the alphabet size
    code = {x: i for i, x in enumerate(sorted(letters))}
    seqs = [tuple(code[x] for x in s) for s in corpus]

    ks = sorted({k for k in grams if 1 < k < n}, reverse=True)
    levels: list[tuple[str, int | None]] = [("sequence", None)]
    levels += [(f"{k}-gram multiset", k) for k in ks]
    levels.append(("multiset", 1))

    rows = []
    for label, k in levels:
        reps = Counter(representation(s, k, windowing) for s in seqs)
        h = entropy_bits([c / len(seqs) for c in reps.values()])
        rows.append(EntropyRow(label, h, _enumeration_bound(n, A, k, windowing)))
    return EntropyTable(tuple(rows), n, A, windowing)
