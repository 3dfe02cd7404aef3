"""Universal coding of multisets over the positive integers.

A multiset is split into its pattern type (a composition of n, coded with
exactly n - 1 separator bits) and its dictionary (the distinct letters,
coded as Elias-delta first differences).  Also here: the run-length
histogram code and the log-blocklength normalized redundancy calculators
for mixtures of memoryless sources.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special, stats

from .bitstream import Bitstream, BitReader, elias_delta, read_elias_delta
from .multiset_core import type_count, type_array

# ---------------------------------------------------------------------------
# dictionary / pattern


def dict_pattern_decompose(seq: Sequence) -> tuple[tuple, tuple[int, ...]]:
    """Dictionary in order of first appearance and the pattern of indices."""
    if len(seq) == 0:
        raise ValueError("need a nonempty sequence")
    index: dict = {}
    pattern = []
    for x in seq:
        if x not in index:
            index[x] = len(index) + 1
        pattern.append(index[x])
    return tuple(index), tuple(pattern)


def dict_pattern_recompose(dictionary: Sequence, pattern: Sequence[int]) -> tuple:
    return tuple(dictionary[i - 1] for i in pattern)


def is_pattern(pattern: Sequence[int]) -> bool:
    top = 0
    for psi in pattern:
        if psi < 1 or psi > top + 1:
            return False
        top = max(top, psi)
    return True


# ---------------------------------------------------------------------------
# compositions: ordered lists of positive parts summing to n


def composition_count(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return 1 << (n - 1)


def composition_rank(parts: Sequence[int]) -> int:
    """Separator bits after places 1..n-1, place 1 most significant."""
    if not parts or any(p < 1 for p in parts):
        raise ValueError("composition parts must be positive")
    n = sum(parts)
    rank = 0
    cut = 0
    for p in parts[:-1]:
        cut += p
        rank |= 1 << (n - 1 - cut)
    return rank


def composition_unrank(rank: int, n: int) -> tuple[int, ...]:
    if not 0 <= rank < composition_count(n):
        raise ValueError(f"rank {rank} outside [0, 2^{n - 1})")
    parts = []
    run = 1
    for place in range(1, n):
        if (rank >> (n - 1 - place)) & 1:
            parts.append(run)
            run = 1
        else:
            run += 1
    parts.append(run)
    return tuple(parts)


# ---------------------------------------------------------------------------
# histogram run-length code


def histogram_encode(counts: Sequence[int]) -> Bitstream:
    """Each bin becomes k zeros followed by a single 1."""
    bits: list[int] = []
    for k in counts:
        if k < 0:
            raise ValueError("counts must be nonnegative")
        bits.extend([0] * int(k))
        bits.append(1)
    return Bitstream.from_bits(bits)


def histogram_decode(b: Bitstream | str) -> tuple[int, ...]:
    bits = b if isinstance(b, str) else b.to_str()
    if set(bits) - {"0", "1"}:
        raise ValueError("histogram stream may only contain 0 and 1")
    if bits and not bits.endswith("1"):
        raise ValueError("histogram stream must end in 1")
    return tuple(len(run) for run in bits.split("1")[:-1])


# ---------------------------------------------------------------------------
# universal multiset code


def universal_encode(letters: Sequence[int]) -> Bitstream:
    """Header delta(n + 1), composition of n in n - 1 bits, delta-coded letter gaps.

    The output depends only on the multiset, never on the input order.
    """
    vals = sorted(int(x) for x in letters)
    if vals and vals[0] < 1:
        raise ValueError("letters must be positive integers")
    n = len(vals)
    bits = elias_delta(n + 1)
    if n == 0:
        return Bitstream.from_bits(bits)
    distinct = []
    parts = []
    for x in vals:
        if distinct and distinct[-1] == x:
            parts[-1] += 1
        else:
            distinct.append(x)
            parts.append(1)
    bits += [int(c) for c in format(composition_rank(parts), f"0{n - 1}b")] if n > 1 else []
    prev = 0
    for x in distinct:
        bits += elias_delta(x - prev)
        prev = x
    return Bitstream.from_bits(bits)


def universal_decode(b: Bitstream) -> tuple[int, ...]:
    """Sorted multiset letters."""
    reader = BitReader(b)
    try:
        n = read_elias_delta(reader) - 1
        if n == 0:
            parts: tuple[int, ...] = ()
        else:
            parts = composition_unrank(reader.read_int(n - 1), n)
        out = []
        prev = 0
        for k in parts:
            prev += read_elias_delta(reader)
            out.extend([prev] * k)
    except ValueError as exc:
        raise ValueError(f"malformed universal stream: {exc}") from None
    if reader.remaining():
        raise ValueError("malformed universal stream: trailing bits")
    return tuple(out)


# ---------------------------------------------------------------------------
# redundancy under the uniform mixture of memoryless sources

LN2 = math.log(2)


def uniform_mixture_type_pmf(n: int) -> float:
    """Every binary type is equally likely under a uniform Bernoulli prior."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1.0 / (n + 1)


def mixture_type_pmf_quadrature(n: int, z: int) -> float:
    """Integrate C(n, z) t^z (1 - t)^(n - z) over t in [0, 1] numerically."""
    f = lambda t: stats.binom.pmf(z, n, t)
    mode = z / n if n else 0.5
    val, _ = integrate.quad(f, 0.0, 1.0, points=[mode], epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def _binomial_entropy_nats(n: int, theta: float, k: np.ndarray, lfact: np.ndarray) -> float:
    lp = lfact[n] - lfact[k] - lfact[n - k] + k * math.log(theta) + (n - k) * math.log1p(-theta)
    return float(-(np.exp(lp) * lp).sum())


@lru_cache(maxsize=64)
def conditional_type_entropy_binary(n: int) -> float:
    """E over a uniform theta of H(Binomial(n, theta)), in bits."""
    k = np.arange(n + 1)
    lfact = special.gammaln(np.arange(n + 1) + 1.0)  # log k!
    clamp = lambda t: min(max(t, 1e-9), 1 - 1e-9)
    f = lambda t: _binomial_entropy_nats(n, clamp(t), k, lfact)
    # symmetric in theta; the integrand changes on the 1/n scale near 0
    pts = [p for p in (1.0 / n, 10.0 / n, 100.0 / n) if p < 0.5]
    val, _ = integrate.quad(f, 0.0, 0.5, points=pts, epsabs=1e-11, epsrel=1e-11, limit=500)
    return 2 * val / LN2


def redundancy_terms_binary(n: int) -> tuple[float, float, float]:
    """(H({X}), H({X}|Theta), normalized redundancy) for the binary class."""
    if n < 2:
        raise ValueError("n must be at least 2")
    h_types = math.log2(n + 1)
    h_cond = conditional_type_entropy_binary(n)
    return h_types, h_cond, (h_types - h_cond) / math.log2(n)


def normalized_redundancy_binary(n: int) -> float:
    return redundancy_terms_binary(n)[2]


def normalized_redundancy_general(alphabet_size: int) -> float:
    """Limit (|X| - 1) / 2 of the normalized redundancy."""
    if alphabet_size < 2:
        raise ValueError("alphabet size must be at least 2")
    return (alphabet_size - 1) / 2


def conditional_type_entropy_trinary(n: int, nodes: int = 20) -> float:
    """E over a flat Dirichlet(1, 1, 1) theta of the trinomial type entropy, in bits.

    Tensor Gauss-Legendre on the unit square mapped onto the simplex by
    theta = (u, (1 - u) v, (1 - u)(1 - v)), Jacobian (1 - u), density 2.
    The square is split at 1/n and 1/4 in each coordinate to resolve the
    boundary layers.
    """
    types = type_array(n, 3)
    lcoef = special.gammaln(n + 1) - special.gammaln(types + 1).sum(axis=1)
    x, w = np.polynomial.legendre.leggauss(nodes)
    cuts = sorted({0.0, min(1.0 / n, 0.25), 0.25, 0.75, 1.0 - min(1.0 / n, 0.25), 1.0})
    gx, gw = [], []
    for a, b in zip(cuts, cuts[1:]):
        gx.append(0.5 * (b - a) * x + 0.5 * (a + b))
        gw.append(0.5 * (b - a) * w)
    gx = np.concatenate(gx)
    gw = np.concatenate(gw)
    total = 0.0
    for u, wu in zip(gx, gw):
        logth = np.log(np.stack([np.full_like(gx, u), (1 - u) * gx, (1 - u) * (1 - gx)]))
        lp = lcoef[:, None] + types @ logth
        h = -(np.exp(lp) * lp).sum(axis=0)
        total += wu * (1 - u) * 2 * float(h @ gw)
    return float(total) / LN2


def redundancy_terms_empirical(alphabet_size: int, n: int) -> tuple[float, float, float]:
    """Finite-n (H, H|Theta, normalized redundancy) under the equiprobable-types mixture."""
    if alphabet_size == 2:
        return redundancy_terms_binary(n)
    if alphabet_size != 3:
        raise ValueError("finite-n redundancy is implemented for |X| <= 3")
    if n > 256:
        raise ValueError("trinary enumeration limited to n <= 256")
    h_types = math.log2(type_count(n, 3))
    h_cond = conditional_type_entropy_trinary(n)
    return h_types, h_cond, (h_types - h_cond) / math.log2(n)
