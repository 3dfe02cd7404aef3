"""Types, the order/value split of a sequence, and multiset entropies.

Type ranking uses the combinatorial number system on the stars-and-bars
encoding of a count vector: with bar positions
``b_j = k_1 + ... + k_j + (j - 1)`` for ``j = 1..|X|-1`` the rank is
``sum_j C(b_j, j)``.  This is colexicographic order on the bar positions
and is a bijection onto ``[0, C(n + |X| - 1, |X| - 1))``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .distributions import DiscretePMF, entropy_bits

ENTROPY_ENUM_GUARD = 10**7
JOINT_ENUM_GUARD = 10**6


@dataclass(frozen=True)
class TypeVector:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(k) for k in self.counts)
        if len(counts) < 1:
            raise ValueError("type needs alphabet size >= 1")
        if any(k < 0 for k in counts):
            raise ValueError("type counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)

    def to_json(self) -> dict:
        return {"counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "TypeVector":
        return cls(tuple(obj["counts"]))


@dataclass(frozen=True)
class OrderIndex:
    """1-based permutation: ``sorted[j] = seq[perm[j] - 1]``."""

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(1, len(perm) + 1)):
            raise ValueError("order index must be a permutation of 1..n")
        object.__setattr__(self, "perm", perm)


def decompose(seq: Sequence) -> tuple[OrderIndex, tuple]:
    """Split a sequence into its order and its sorted values.

    Ties are broken by original position (stable sort), so a constant
    sequence gets the identity order.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("decompose needs a nonempty sequence")
    idx = sorted(range(len(seq)), key=lambda i: seq[i])
    return OrderIndex(tuple(i + 1 for i in idx)), tuple(seq[i] for i in idx)


def recompose(order: OrderIndex, values: Sequence) -> tuple:
    if len(order.perm) != len(values):
        raise ValueError("order and values differ in length")
    out = [None] * len(values)
    for j, i in enumerate(order.perm):
        out[i - 1] = values[j]
    return tuple(out)


def type_of(seq: Iterable[int], alphabet_size: int) -> TypeVector:
    counts = [0] * alphabet_size
    for x in seq:
        x = int(x)
        if not 1 <= x <= alphabet_size:
            raise ValueError(f"letter {x} outside alphabet 1..{alphabet_size}")
        counts[x - 1] += 1
    return TypeVector(tuple(counts))


def type_count(n: int, alphabet_size: int) -> int:
    if n < 0 or alphabet_size < 1:
        raise ValueError("need n >= 0 and alphabet size >= 1")
    return math.comb(n + alphabet_size - 1, alphabet_size - 1)


def type_rank(t: TypeVector) -> int:
    rank = 0
    pos = -1
    for j, k in enumerate(t.counts[:-1], start=1):
        pos += k + 1
        rank += math.comb(pos, j)
    return rank


def type_unrank(rank: int, n: int, alphabet_size: int) -> TypeVector:
    total = type_count(n, alphabet_size)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, {total})")
    bars = []
    hi = n + alphabet_size - 2  # largest admissible bar position
    for j in range(alphabet_size - 1, 0, -1):
        # largest b <= hi with C(b, j) <= rank; binary search keeps this O(log n)
        lo_b, hi_b = j - 1, hi
        while lo_b < hi_b:
            mid = (lo_b + hi_b + 1) // 2
            if math.comb(mid, j) <= rank:
                lo_b = mid
            else:
                hi_b = mid - 1
        bars.append(lo_b)
        rank -= math.comb(lo_b, j)
        hi = lo_b - 1
    bars.reverse()
    counts = []
    prev = -1
    for b in bars:
        counts.append(b - prev - 1)
        prev = b
    counts.append(n + alphabet_size - 2 - prev)
    return TypeVector(tuple(counts))


def iter_types(n: int, alphabet_size: int) -> Iterator[TypeVector]:
    """All types of size n, in rank order."""
    for r in range(type_count(n, alphabet_size)):
        yield type_unrank(r, n, alphabet_size)


def type_array(n: int, alphabet_size: int) -> np.ndarray:
    """All count vectors summing to n as an integer array (enumeration order is not rank order)."""
    if alphabet_size == 1:
        return np.array([[n]], dtype=np.int64)
    if alphabet_size == 2:
        k = np.arange(n + 1, dtype=np.int64)
        return np.stack([k, n - k], axis=1)
    blocks = []
    for k1 in range(n + 1):
        sub = type_array(n - k1, alphabet_size - 1)
        blocks.append(np.hstack([np.full((len(sub), 1), k1, dtype=np.int64), sub]))
    return np.vstack(blocks)


def _type_blocks(n: int, alphabet_size: int) -> Iterator[np.ndarray]:
    if alphabet_size <= 2:
        yield type_array(n, alphabet_size)
        return
    for k1 in range(n + 1):
        sub = type_array(n - k1, alphabet_size - 1)
        yield np.hstack([np.full((len(sub), 1), k1, dtype=np.int64), sub])


def log_multinomial_pmf(counts: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Natural-log multinomial pmf for each row of ``counts``."""
    counts = np.atleast_2d(counts)
    n = counts.sum(axis=1)
    with np.errstate(divide="ignore"):
        logp = np.log(probs)
    # 0 * log 0 = 0; positive count on a zero-probability letter gives -inf
    terms = np.where(counts > 0, counts * logp, 0.0)
    return gammaln(n + 1) - gammaln(counts + 1).sum(axis=1) + terms.sum(axis=1)


def multinomial_type_pmf(t: TypeVector, p: DiscretePMF) -> float:
    if t.alphabet_size != p.alphabet_size:
        raise ValueError("type and pmf have different alphabet sizes")
    coef = math.factorial(t.n)
    for k in t.counts:
        coef //= math.factorial(k)
    prob = float(coef)
    for k, q in zip(t.counts, p.probs):
        if k:
            prob *= q**k
    return prob


def multiset_entropy_exact(n: int, p: DiscretePMF) -> float:
    """H({X_1..X_n}) in bits by enumerating every type."""
    count = type_count(n, p.alphabet_size)
    if count > ENTROPY_ENUM_GUARD:
        raise ValueError(
            f"{count} types exceed the enumeration guard of {ENTROPY_ENUM_GUARD}; "
            "use binomial_entropy_asymptotic instead"
        )
    probs = p.as_array()
    acc = 0.0
    for block in _type_blocks(n, p.alphabet_size):
        lp = log_multinomial_pmf(block, probs)
        lp = lp[np.isfinite(lp)]
        acc -= float((np.exp(lp) * lp).sum())
    return acc / math.log(2)


def binomial_entropy_asymptotic(n: int, p: float) -> float:
    """Leading de Moivre term 0.5 log2(2 pi e p (1 - p) n)."""
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    if n < 1:
        raise ValueError("n must be positive")
    return 0.5 * math.log2(2 * math.pi * math.e * p * (1 - p) * n)


def binomial_entropy_exact(n: int, p: float) -> float:
    """Entropy of Binomial(n, p) in bits, summed over the support."""
    if p <= 0 or p >= 1:
        return 0.0
    k = np.arange(n + 1)
    lp = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + k * math.log(p) + (n - k) * math.log1p(-p)
    return float(-(np.exp(lp) * lp).sum() / math.log(2))


# ---------------------------------------------------------------------------
# order/value entropy split


@dataclass(frozen=True)
class DecompositionResult:
    h_sequence: float
    h_multiset: float
    h_order: float
    residual: float
    exchangeable: bool

    @property
    def holds(self) -> bool:
        return self.exchangeable and abs(self.residual) <= 1e-9


def iid_joint(p: DiscretePMF, n: int) -> dict[tuple[int, ...], float]:
    """Explicit joint pmf of n i.i.d. letters from p."""
    if p.alphabet_size**n > JOINT_ENUM_GUARD:
        raise ValueError("joint distribution too large to enumerate")
    joint = {}
    for seq in itertools.product(range(1, p.alphabet_size + 1), repeat=n):
        prob = math.prod(p.probs[x - 1] for x in seq)
        if prob > 0:
            joint[seq] = prob
    return joint


def _arrangements(values: tuple) -> int:
    out = math.factorial(len(values))
    for c in Counter(values).values():
        out //= math.factorial(c)
    return out


def entropy_decomposition_check(joint: Mapping[tuple, float], tol: float = 1e-12) -> DecompositionResult:
    """Sequence, multiset and order entropies of an explicit joint pmf.

    ``h_order`` is H(J | {X}), the entropy of the order once the values are
    known.  ``residual`` is H_seq - H_multiset - E[log2 #arrangements], which
    vanishes exactly when every arrangement of a multiset is equally likely,
    i.e. for exchangeable sources.  Non-exchangeable inputs are reported,
    not rejected.
    """
    if len(joint) > JOINT_ENUM_GUARD:
        raise ValueError("joint distribution too large to enumerate")
    classes: dict[tuple, list[float]] = defaultdict(list)
    for seq, prob in joint.items():
        if prob > 0:
            classes[tuple(sorted(seq))].append(prob)

    h_seq = entropy_bits(list(joint.values()))
    ms_probs = {ms: math.fsum(ps) for ms, ps in classes.items()}
    h_ms = entropy_bits(list(ms_probs.values()))

    h_order = 0.0
    uniform_order = 0.0
    exchangeable = True
    for ms, ps in classes.items():
        pm = ms_probs[ms]
        h_order += pm * entropy_bits([q / pm for q in ps])
        n_arr = _arrangements(ms)
        uniform_order += pm * math.log2(n_arr)
        if len(ps) != n_arr or max(ps) - min(ps) > tol * max(ps):
            exchangeable = False
    return DecompositionResult(h_seq, h_ms, h_order, h_seq - h_ms - uniform_order, exchangeable)
