"""Rate-distortion curves and bounds.

Error-frequency R(D) on a type alphabet by reverse waterfilling over atom
probabilities, a Blahut-Arimoto oracle for arbitrary distortion matrices,
Shannon lower/upper bounds for sorted Gaussian pairs, and the logarithmic
bit budget of lossy multiset coding.  All rates are total bits per block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .distributions import ContinuousParent, SeedSpec
from .multiset_core import type_count
from .order_stats import os_joint_entropy


class ConvergenceError(RuntimeError):
    pass


@dataclass
class RDCurve:
    label: str
    points: list[tuple[float, float]] = field(default_factory=list)
    params: list[float] = field(default_factory=list)

    def is_monotone(self, slack: float = 1e-9) -> bool:
        """Rate nonincreasing as distortion increases."""
        pts = sorted(self.points, key=lambda p: (p[1], -p[0]))
        ok = all(r1 <= r0 + slack for (r0, _), (r1, _) in zip(pts, pts[1:]))
        return ok and all(r >= -slack and d >= -slack for r, d in pts)

    def to_records(self) -> list[dict]:
        return [{"curve": self.label, "rate_bits": r, "distortion": d} for r, d in self.points]


# ---------------------------------------------------------------------------
# error-frequency R(D) by reverse waterfilling


@dataclass(frozen=True)
class ErokhinParam:
    theta: float
    N: int
    S: float


def _check_pmf(pmf) -> np.ndarray:
    p = np.asarray(pmf, dtype=float)
    if p.ndim != 1 or p.size < 1 or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise ValueError("need a probability vector")
    return p


def erokhin_param(pmf, theta: float) -> ErokhinParam:
    """Atoms at or above the water level theta.

    Counting atoms with p >= theta instead of p > theta only changes the
    curve at breakpoints, where both conventions agree by continuity, and
    keeps N >= 1 at the top of the range.
    """
    p = _check_pmf(pmf)
    keep = (p >= theta) & (p > 0)
    return ErokhinParam(float(theta), int(keep.sum()), float(p[keep].sum()))


def _theta_max(p: np.ndarray) -> float:
    q = np.sort(p[p > 0])[::-1]
    return float(q[1]) if len(q) > 1 else float(q[0])


def erokhin_point(pmf, theta: float) -> tuple[float, float]:
    """(R bits, D) at water level theta."""
    p = _check_pmf(pmf)
    par = erokhin_param(p, theta)
    keep = (p >= theta) & (p > 0)
    D = 1.0 - par.S + theta * (par.N - 1)
    R = (
        -float((p[keep] * np.log2(p[keep])).sum())
        + float(special.xlogy(1 - D, 1 - D)) / math.log(2)
        + (par.N - 1) * float(special.xlogy(theta, theta)) / math.log(2)
    )
    return max(R, 0.0), D


def erokhin_rd(pmf, grid_size: int = 200) -> RDCurve:
    """Parametric curve from theta = 0 (lossless) to the second-largest atom (R = 0).

    The grid contains every atom probability as a breakpoint.
    """
    p = _check_pmf(pmf)
    if np.count_nonzero(p) < 2:
        return RDCurve("erokhin", [(0.0, 0.0)], [0.0])
    top = _theta_max(p)
    grid = np.union1d(np.linspace(0.0, top, grid_size), p[(p > 0) & (p <= top)])
    curve = RDCurve("erokhin")
    for t in grid:
        R, D = erokhin_point(p, float(t))
        curve.points.append((R, D))
        curve.params.append(float(t))
    return curve


def erokhin_rate_at(pmf, D: float) -> float:
    """R(D) by inverting the piecewise-linear D(theta)."""
    p = _check_pmf(pmf)
    if D < 0:
        raise ValueError("distortion must be nonnegative")
    if np.count_nonzero(p) < 2:
        return 0.0
    top = _theta_max(p)
    if D >= erokhin_point(p, top)[1]:
        return 0.0
    knots = np.union1d([0.0, top], p[(p > 0) & (p <= top)])
    for a, b in zip(knots, knots[1:]):
        Da, Db = erokhin_point(p, a)[1], erokhin_point(p, 0.5 * (a + b))[1]
        Dend = erokhin_point(p, b)[1]
        if D <= Dend:
            # on (a, b) the active set is fixed, so D is linear in theta
            slope = (Db - Da) / (0.5 * (b - a))
            t = a + (D - Da) / slope if slope > 0 else a
            return erokhin_point(p, float(min(max(t, a), b)))[0]
    return 0.0


def error_frequency_matrix(m: int) -> np.ndarray:
    return 1.0 - np.eye(m)


def blahut_arimoto_point(
    pmf, dist: np.ndarray, beta: float, tol: float = 1e-9, max_iter: int = 200_000
) -> tuple[float, float, int]:
    """(R bits, D, iterations) on the R(D) curve at slope parameter beta."""
    p = _check_pmf(pmf)
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != p.size or np.any(d < 0):
        raise ValueError("distortion matrix must be nonnegative with one row per letter")
    A = np.exp(-beta * (d - d.min(axis=1, keepdims=True)))
    q = np.full(d.shape[1], 1.0 / d.shape[1])
    prev = None
    for it in range(1, max_iter + 1):
        w = A * q[None, :]
        Q = w / w.sum(axis=1, keepdims=True)
        q = p @ Q
        D = float((p[:, None] * Q * d).sum())
        with np.errstate(divide="ignore", invalid="ignore"):
            R = float(np.where(Q > 0, p[:, None] * Q * np.log2(Q / q[None, :]), 0.0).sum())
        cur = (R, D)
        if prev is not None and all(abs(c - o) <= tol * max(abs(o), 1e-12) for c, o in zip(cur, prev)):
            return max(R, 0.0), D, it
        prev = cur
    raise ConvergenceError(f"Blahut-Arimoto did not converge at beta={beta} in {max_iter} iterations")


def blahut_arimoto(pmf, dist: np.ndarray, betas: Sequence[float], tol: float = 1e-9) -> RDCurve:
    curve = RDCurve("ba")
    for b in betas:
        R, D, _ = blahut_arimoto_point(pmf, dist, float(b), tol)
        curve.points.append((R, D))
        curve.params.append(float(b))
    return curve


# ---------------------------------------------------------------------------
# sorted Gaussian pairs


def os_covariance_gaussian_k2() -> np.ndarray:
    c = 1 / math.pi
    return np.array([[1 - c, c], [c, 1 - c]])


def os_covariance_eigenvalues() -> tuple[float, float]:
    return 1.0, 1.0 - 2.0 / math.pi


def os_covariance_monte_carlo(n_trials: int, seed: SeedSpec = SeedSpec(0)) -> np.ndarray:
    z = seed.rng().standard_normal((n_trials, 2))
    return np.cov(np.sort(z, axis=1).T)


def reverse_waterfill(eigs: Sequence[float], D: float) -> float:
    """Gaussian R(D) in bits for total distortion D over independent components."""
    lam = np.sort(np.asarray(eigs, dtype=float))
    if D <= 0:
        raise ValueError("distortion must be positive")
    if D >= lam.sum():
        return 0.0
    # water level: sum(min(level, lam)) = D
    for k in range(len(lam)):
        level = (D - lam[:k].sum()) / (len(lam) - k)
        if level <= lam[k]:
            break
    return float(0.5 * np.log2(lam[k:] / level).sum())


def slb_os_gaussian(D: float, K: int = 2) -> float:
    """h(sorted block) - (K/2) log2(2 pi e D / K), clamped at zero; D is total MSE."""
    if D <= 0:
        raise ValueError("distortion must be positive")
    h = os_joint_entropy(ContinuousParent.gaussian(), K)
    return max(0.0, h - 0.5 * K * math.log2(2 * math.pi * math.e * D / K))


BREAK_1 = 2 - 4 / math.pi
BREAK_2 = 2 - 2 / math.pi


def sub_branch(i: int, D: float) -> float:
    """The three closed-form pieces of the Gaussian-covariance upper bound."""
    if i == 1:
        return 0.5 * math.log2(BREAK_1 / D) + 0.5 * math.log2(2 / D)
    if i == 2:
        return 0.5 * math.log2(1 / (D - 1 + 2 / math.pi))
    if i == 3:
        return 0.0
    raise ValueError("branch must be 1, 2 or 3")


def sub_os_gaussian(D: float) -> float:
    if D <= 0:
        raise ValueError("distortion must be positive")
    if D <= BREAK_1:
        return sub_branch(1, D)
    if D < BREAK_2:
        return sub_branch(2, D)
    return 0.0


def bound_curve(kind: str, n_points: int = 1000, d_max: float = BREAK_2) -> RDCurve:
    """SLB or SUB on an open grid over (0, d_max]."""
    f = {"slb": slb_os_gaussian, "sub": sub_os_gaussian}[kind]
    grid = d_max * np.arange(1, n_points + 1) / n_points
    return RDCurve(kind, [(f(float(D)), float(D)) for D in grid], [float(D) for D in grid])


# ---------------------------------------------------------------------------
# lossy multiset budget


def lossy_logn_budget(n: int, N: int, R: float) -> int:
    """Bits to send the type of n/N superletters drawn from 2^(N R) codewords."""
    if N < 1 or n < 1:
        raise ValueError("need n, N >= 1")
    if n % N:
        raise ValueError("n must be divisible by N")
    if R < 0:
        raise ValueError("rate must be nonnegative")
    M = math.ceil(2 ** (N * R) - 1e-12)
    return (type_count(n // N, M) - 1).bit_length()
