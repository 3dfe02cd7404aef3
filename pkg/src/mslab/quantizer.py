"""Quantizers for fixed-size multisets.

Scalar Lloyd-Max design by quadrature, an empirical Lloyd/LBG design on
sorted Gaussian pairs, the permutation-symmetry test that lets sorting and
quantization commute, and the high-rate scheme ledger with a Monte Carlo
check of schemes 1 to 3.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, special, stats

from .distributions import ContinuousParent, SeedSpec, differential_entropy, entropy_bits, sample
from .order_stats import shape_constant

# Normalized second moment of the best known K-dimensional cell, relative to
# the cube.  K=2 is the regular hexagon: (1/12) / (5 / (36 sqrt 3)).
SPACE_FILLING_G: dict[int, float] = {1: 1.0, 2: (1 / 12) / (5 / (36 * math.sqrt(3)))}


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class Codebook:
    """Reproduction points; ``space="ordered"`` points live on the sorted cone."""

    K: int
    points: np.ndarray
    space: str = "unordered"

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != self.K or len(pts) < 1:
            raise ValueError(f"need at least one point of dimension {self.K}")
        if self.space not in ("ordered", "unordered"):
            raise ValueError("space must be 'ordered' or 'unordered'")
        if self.space == "ordered" and np.any(np.diff(pts, axis=1) < 0):
            raise ValueError("ordered codebook points must satisfy x_1 <= ... <= x_K")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def assign(self, x: np.ndarray) -> np.ndarray:
        """Nearest point index; ordered codebooks sort each input row first."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.space == "ordered":
            x = np.sort(x, axis=1)
        d = ((x[:, None, :] - self.points[None, :, :]) ** 2).sum(axis=2)
        return d.argmin(axis=1)

    def distortion(self, x: np.ndarray) -> float:
        """Mean total squared error per K-block."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.space == "ordered":
            x = np.sort(x, axis=1)
        return float(((x - self.points[self.assign(x)]) ** 2).sum(axis=1).mean())

    def to_json(self) -> dict:
        return {"K": self.K, "points": self.points.tolist(), "space": self.space}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Codebook":
        return cls(int(obj["K"]), np.asarray(obj["points"], dtype=float), obj.get("space", "unordered"))


# ---------------------------------------------------------------------------
# scalar Lloyd-Max


@dataclass
class LloydResult:
    codebook: Codebook
    distortion: float
    iterations: int
    history: list[float] = field(default_factory=list)


def _cell_moments(density, a: float, b: float) -> tuple[float, float, float]:
    kw = dict(limit=200, epsabs=1e-13, epsrel=1e-12)
    m0 = integrate.quad(density, a, b, **kw)[0]
    m1 = integrate.quad(lambda x: x * density(x), a, b, **kw)[0]
    m2 = integrate.quad(lambda x: x * x * density(x), a, b, **kw)[0]
    return m0, m1, m2


def lloyd_max_1d(
    density: Callable[[float], float],
    rate_bits: int,
    support: tuple[float, float] = (-math.inf, math.inf),
    init: Sequence[float] | None = None,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> LloydResult:
    """Alternate nearest-neighbor thresholds and cell centroids until the
    relative distortion change drops below ``tol``."""
    if rate_bits < 0:
        raise ValueError("rate must be nonnegative")
    M = 1 << rate_bits
    lo, hi = support
    m0, m1, m2 = _cell_moments(density, lo, hi)
    mean = m1 / m0
    if M == 1:
        d = m2 / m0 - mean**2
        return LloydResult(Codebook(1, [[mean]]), d, 0, [d])
    if init is None:
        sd = math.sqrt(m2 / m0 - mean**2)
        pts = mean + sd * np.linspace(-2.0, 2.0, M)
    else:
        pts = np.sort(np.asarray(init, dtype=float))
        if len(pts) != M:
            raise ValueError(f"need {M} initial points")
    history: list[float] = []
    for it in range(1, max_iter + 1):
        edges = np.concatenate([[lo], 0.5 * (pts[1:] + pts[:-1]), [hi]])
        new = np.empty(M)
        d = 0.0
        for j in range(M):
            c0, c1, c2 = _cell_moments(density, edges[j], edges[j + 1])
            new[j] = c1 / c0 if c0 > 0 else pts[j]
            # distortion of the current partition with the old points
            d += c2 - 2 * pts[j] * c1 + pts[j] ** 2 * c0
        history.append(d / m0)
        pts = new
        if len(history) > 1 and abs(history[-2] - history[-1]) <= tol * history[-1]:
            return LloydResult(Codebook(1, pts[:, None]), history[-1], it, history)
    raise ConvergenceError(f"Lloyd-Max did not converge in {max_iter} iterations", last=pts)


def lloyd_max_parent(parent: ContinuousParent, rate_bits: int, **kw) -> LloydResult:
    return lloyd_max_1d(lambda x: float(parent.pdf(x)), rate_bits, support=parent.support, **kw)


# ---------------------------------------------------------------------------
# order-statistic quantizer for Gaussian pairs


@dataclass
class OSQuantizerResult:
    codebook: Codebook
    distortion_total: float
    distortion_per_letter: float
    iterations: int
    history: list[float] = field(default_factory=list)


def sorted_gaussian_pairs(n_samples: int, seed: int, K: int = 2) -> np.ndarray:
    """Sorted standard Gaussian K-blocks from a scrambled Sobol sequence."""
    m = max(1, math.ceil(math.log2(n_samples)))
    u = stats.qmc.Sobol(d=K, scramble=True, seed=seed).random_base2(m)
    u = np.clip(u, 2.0**-60, 1 - 2.0**-53)
    return np.sort(special.ndtri(u), axis=1)


def _nearest(x: np.ndarray, pts: np.ndarray, xx: np.ndarray) -> tuple[np.ndarray, float]:
    # |x - p|^2 = |x|^2 - 2 x.p + |p|^2
    d2 = (pts**2).sum(axis=1)[None, :] - 2.0 * (x @ pts.T)
    idx = d2.argmin(axis=1)
    return idx, float(np.maximum(xx + d2[np.arange(len(x)), idx], 0.0).mean())


def _lloyd_samples(x: np.ndarray, pts: np.ndarray, tol: float, max_iter: int, history: list[float]):
    xx = (x**2).sum(axis=1)
    M, K = pts.shape
    for it in range(1, max_iter + 1):
        idx, d = _nearest(x, pts, xx)
        history.append(d)
        counts = np.bincount(idx, minlength=M)
        sums = np.stack([np.bincount(idx, weights=x[:, k], minlength=M) for k in range(K)], axis=1)
        new = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], pts)
        # centroids of cone points are in the cone; sorting removes roundoff
        pts = np.sort(new, axis=1)
        if len(history) > 1 and abs(history[-2] - history[-1]) <= tol * history[-1]:
            return pts, it
    raise ConvergenceError(f"sample Lloyd did not converge in {max_iter} iterations", last=pts)


def os_quantizer_2d_gaussian(
    rate_bits: int,
    n_samples: int = 1 << 20,
    seed: int = 0,
    tol: float = 1e-9,
    max_iter: int = 5000,
) -> OSQuantizerResult:
    """LBG design on sorted Gaussian pairs, splitting along each cell's
    principal axis so the distortion never increases with rate."""
    if rate_bits not in (0, 1, 2, 3):
        raise ValueError("rate must be one of 0, 1, 2, 3 bits")
    x = sorted_gaussian_pairs(n_samples, seed)
    pts = x.mean(axis=0, keepdims=True)
    history: list[float] = []
    iterations = 0
    for _ in range(rate_bits):
        idx = Codebook(2, pts, "ordered").assign(x)
        split = []
        for j, p in enumerate(pts):
            cell = x[idx == j]
            w, v = np.linalg.eigh(np.cov(cell.T))
            step = 0.5 * math.sqrt(max(w[-1], 1e-12)) * v[:, -1]
            split += [p - step, p + step]
        pts, it = _lloyd_samples(x, np.sort(np.array(split), axis=1), tol, max_iter, history)
        iterations += it
    cb = Codebook(2, pts, "ordered")
    d = cb.distortion(x)
    if not history:
        history.append(d)
    return OSQuantizerResult(cb, d, d / 2, iterations, history)


def rotated_product_codebook(a: float) -> Codebook:
    """Product of two scalar {-a, +a} quantizers in the sum/difference
    coordinates; its intersection with the cone is the 1-bit ordered design."""
    c = a * math.sqrt(2.0)
    return Codebook(2, [[-c, 0.0], [0.0, c], [0.0, -c], [c, 0.0]], "unordered")


def product_codebook(levels: Sequence[float], K: int) -> Codebook:
    return Codebook(K, list(itertools.product(levels, repeat=K)), "unordered")


# ---------------------------------------------------------------------------
# sort/quantize interchange


@dataclass(frozen=True)
class InterchangeResult:
    ok: bool
    orbits: tuple[tuple[int, ...], ...] = ()
    violation: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def interchange_check(codebook: Codebook, K: int | None = None, atol: float = 1e-9) -> InterchangeResult:
    """Is the point set invariant under every coordinate permutation?

    The certificate is the orbit decomposition (point indices grouped by
    their sorted coordinates) or the first permutation that breaks it.
    """
    K = codebook.K if K is None else K
    if K != codebook.K:
        raise ValueError("dimension mismatch")
    pts = codebook.points
    for perm in itertools.permutations(range(K)):
        moved = pts[:, perm]
        d = np.abs(moved[:, None, :] - pts[None, :, :]).max(axis=2)
        if not np.all(d.min(axis=1) <= atol):
            return InterchangeResult(False, violation=perm)
    orbits: dict[tuple, list[int]] = {}
    reps = np.sort(pts, axis=1)
    for i, r in enumerate(reps):
        key = next((k for k in orbits if np.abs(np.array(k) - r).max() <= atol), tuple(r))
        orbits.setdefault(key, []).append(i)
    return InterchangeResult(True, orbits=tuple(tuple(v) for v in orbits.values()))


def ordered_restriction(codebook: Codebook, atol: float = 1e-12) -> Codebook:
    """The points of an unordered codebook that already lie on the cone."""
    keep = [p for p in codebook.points if np.all(np.diff(p) >= -atol)]
    return Codebook(codebook.K, np.sort(np.array(keep), axis=1), "ordered")


# ---------------------------------------------------------------------------
# high-rate ledger


@dataclass(frozen=True)
class SchemeRow:
    scheme: int
    name: str
    rate_reduction_bits: float | None
    distortion_factor: float | None


@dataclass(frozen=True)
class SchemeLedger:
    K: int
    rows: tuple[SchemeRow, ...]
    g_available: bool

    def row(self, scheme: int) -> SchemeRow:
        return self.rows[scheme - 1]

    def to_records(self) -> list[dict]:
        return [
            {"K": self.K, "scheme": r.scheme, "name": r.name,
             "rate_reduction_bits": r.rate_reduction_bits, "distortion_factor": r.distortion_factor}
            for r in self.rows
        ]


def scheme_ledger(K: int, g_table: Mapping[int, float] = SPACE_FILLING_G) -> SchemeLedger:
    """Per-letter rate reduction and distortion factor of each scheme
    relative to independent uniform scalar coding of the letters."""
    if K < 1:
        raise ValueError("K must be positive")
    memory = math.lgamma(K + 1) / math.log(2) / K
    g = g_table.get(K)
    rows = (
        SchemeRow(1, "scalar", 0.0, 1.0),
        SchemeRow(2, "order-statistic marginals", shape_constant(K), 1.0),
        SchemeRow(3, "sequential conditional", memory, 1.0),
        SchemeRow(4, "vector quantized", memory, None if g is None else 1.0 / g),
    )
    return SchemeLedger(K, rows, g is not None)


@dataclass
class HighRateResult:
    K: int
    step: float
    rate: dict[int, float]
    mse: dict[int, float]
    predicted_rate: dict[int, float]
    predicted_mse: float


def _plugin_entropy(idx: np.ndarray) -> float:
    _, counts = np.unique(idx, return_counts=True)
    return entropy_bits(counts / counts.sum())


def _log_sf(parent: ContinuousParent, x: np.ndarray) -> np.ndarray:
    if parent.family.value == "gaussian":
        z = (x - parent.params["mean"]) / math.sqrt(parent.params["var"])
        return special.log_ndtr(-z)
    with np.errstate(divide="ignore"):
        return np.log(parent.sf(x))


def high_rate_validate(
    parent: ContinuousParent,
    K: int,
    step: float,
    n_letters: int = 10**7,
    seed: SeedSpec = SeedSpec(0),
) -> HighRateResult:
    """Measured per-letter rate and MSE of uniform quantization with step
    ``step`` under schemes 1 to 3.

    Schemes 1 and 2 use the plug-in entropy of the cell indices (raw letters;
    each order-statistic marginal).  Scheme 3 charges the ideal codelength
    -log2 P(cell | previous order statistic), with the grid anchored at the
    exactly known previous value; the smallest value pays its marginal rate.
    """
    if K < 1 or step <= 0:
        raise ValueError("need K >= 1 and a positive step")
    blocks = n_letters // K
    x = sample(parent, blocks * K, seed).reshape(blocks, K)
    xs = np.sort(x, axis=1)

    idx_raw = np.floor(x / step).astype(np.int64)
    rec = (idx_raw + 0.5) * step
    rate = {1: _plugin_entropy(idx_raw.ravel())}
    mse = {1: float(((x - rec) ** 2).mean())}

    idx_os = np.floor(xs / step).astype(np.int64)
    rate[2] = float(np.mean([_plugin_entropy(idx_os[:, r]) for r in range(K)]))
    mse[2] = float(((xs - (idx_os + 0.5) * step) ** 2).mean())

    bits = K * rate[2] if K == 1 else _plugin_entropy(idx_os[:, 0])
    err = [(xs[:, 0] - (idx_os[:, 0] + 0.5) * step) ** 2]
    for r in range(1, K):
        prev, cur = xs[:, r - 1], xs[:, r]
        m = K - r  # values still above the previous order statistic
        j = np.floor((cur - prev) / step)
        lo, hi = prev + j * step, prev + (j + 1) * step
        ls_prev = _log_sf(parent, prev)
        a = m * (_log_sf(parent, lo) - ls_prev)
        b = m * (_log_sf(parent, hi) - ls_prev)
        # log(e^a - e^b) with b < a
        logp = a + np.log(-np.expm1(b - a))
        bits += float(-logp.mean() / math.log(2))
        err.append((cur - 0.5 * (lo + hi)) ** 2)
    rate[3] = bits / K
    mse[3] = float(np.mean(err))

    h = differential_entropy(parent)
    led = scheme_ledger(K)
    base = h - math.log2(step)
    predicted = {s: base - led.row(s).rate_reduction_bits for s in (1, 2, 3)}
    return HighRateResult(K, step, rate, mse, predicted, step**2 / 12)
