"""Order statistics of i.i.d. continuous parents.

The (r:K) order statistic of a parent with quantile Q is Q(U_(r:K)) where
U_(r:K) ~ Beta(r, K - r + 1).  Entropy quadratures run in the probability
domain u = F(x), so infinite tails become finite endpoints.

All entropies are in bits.  Closed-form constants that come out of
digamma/harmonic-number identities are natural-log quantities and are
converted with log2(e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .distributions import LOG2E, ContinuousParent, Family, differential_entropy

LN2 = math.log(2)


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class OrderStatSpec:
    parent: ContinuousParent
    K: int
    r: int

    def __post_init__(self):
        if self.K < 1 or not 1 <= self.r <= self.K:
            raise ValueError(f"need 1 <= r <= K, got r={self.r}, K={self.K}")


@dataclass
class DistortionCurve:
    label: str
    points: list[tuple[int, float]] = field(default_factory=list)

    def is_nonincreasing(self, slack: float = 1e-12) -> bool:
        d = [p[1] for p in self.points]
        return all(b <= a + slack for a, b in zip(d, d[1:]))


# ---------------------------------------------------------------------------
# marginal and transition distributions


def os_marginal_cdf(spec: OrderStatSpec, x):
    """Regularized incomplete beta I_F(x)(r, K - r + 1)."""
    F = spec.parent.cdf(x)
    return special.betainc(spec.r, spec.K - spec.r + 1, F)


def os_marginal_cdf_sum(spec: OrderStatSpec, x):
    """Binomial tail sum of C(K, i) F^i (1 - F)^(K - i) over i >= r."""
    F = np.asarray(spec.parent.cdf(x), dtype=float)
    S = np.asarray(spec.parent.sf(x), dtype=float)
    K = spec.K
    total = np.zeros_like(F)
    for i in range(spec.r, K + 1):
        total = total + math.comb(K, i) * F**i * S ** (K - i)
    return total[()] if total.ndim == 0 else total


def _log_beta_pdf(u, r, K: int):
    """log density of Beta(r, K - r + 1) at u in (0, 1)."""
    return special.xlogy(r - 1, u) + special.xlog1py(K - r, -u) - special.betaln(r, K - r + 1)


def os_marginal_logpdf(spec: OrderStatSpec, x):
    p = spec.parent
    with np.errstate(divide="ignore"):
        out = (
            special.xlogy(spec.r - 1, p.cdf(x))
            + special.xlogy(spec.K - spec.r, p.sf(x))
            - special.betaln(spec.r, spec.K - spec.r + 1)
            + p.logpdf(x)
        )
    return out[()] if np.ndim(out) == 0 else out


def os_marginal_pdf(spec: OrderStatSpec, x):
    return np.exp(os_marginal_logpdf(spec, x))


def os_transition_pdf(parent: ContinuousParent, K: int, r: int, x, y):
    """Density of X_(r+1:K) at y given X_(r:K) = x; zero for y <= x."""
    if not 1 <= r < K:
        raise ValueError("need 1 <= r < K")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = K - r
    Sx = parent.sf(x)
    Sy = parent.sf(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(Sx > 0, Sy / Sx, 0.0)
        out = m * ratio ** (m - 1) * parent.pdf(y) / Sx
    out = np.where((y > x) & np.isfinite(out), out, 0.0)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# moments and the zero-rate distortion


def _quad_vec(f, a, b, accept_err: float = 1e-9, **kw):
    res, err, info = integrate.quad_vec(f, a, b, full_output=True, **kw)
    # status 2 is a roundoff stall, fine once the error estimate is tiny
    if not info.success and not (info.status == 2 and err <= accept_err):
        raise QuadratureError(f"quad_vec failed ({info.message}); error estimate {err:.3g}")
    return res


def os_moments(parent: ContinuousParent, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Means and variances of X_(1:n), ..., X_(n:n)."""
    if n < 1:
        raise ValueError("n must be positive")
    r = np.arange(1, n + 1)
    if parent.family is Family.UNIFORM:
        a, b = parent.support
        means = a + (b - a) * r / (n + 1)
        var = (b - a) ** 2 * r * (n - r + 1) / ((n + 1) ** 2 * (n + 2))
        return means, var

    lnorm = special.betaln(r, n - r + 1)

    def weighted(g):
        def f(x):
            with np.errstate(divide="ignore"):
                lw = special.xlogy(r - 1, parent.cdf(x)) + special.xlogy(n - r, parent.sf(x))
            return g(x) * np.exp(lw - lnorm + parent.logpdf(x))

        return f

    lo, hi = parent.support
    kw = dict(epsabs=1e-13, epsrel=1e-11, limit=20000)
    means = _quad_vec(weighted(lambda x: x), lo, hi, **kw)
    var = _quad_vec(weighted(lambda x: (x - means) ** 2), lo, hi, **kw)
    return means, var


def os_avg_variance(parent: ContinuousParent, n: int) -> float:
    """Zero-rate distortion D_n(0): the average variance of the n order statistics."""
    return float(np.mean(os_moments(parent, n)[1]))


def zero_rate_curve(parent: ContinuousParent, n_max: int) -> DistortionCurve:
    curve = DistortionCurve(parent.label)
    for n in range(1, n_max + 1):
        curve.points.append((n, os_avg_variance(parent, n)))
    return curve


def empirical_quantile(sample, w: float) -> float:
    """The (floor(w n) + 1)-th smallest sample value."""
    xs = np.sort(np.asarray(sample, dtype=float))
    if xs.size == 0:
        raise ValueError("empty sample")
    if not 0 < w < 1:
        raise ValueError("w must lie in (0, 1)")
    return float(xs[int(math.floor(w * xs.size))])


# ---------------------------------------------------------------------------
# differential entropies


def os_marginal_entropy(parent: ContinuousParent, K: int, r: int) -> float:
    """h(X_(r:K)) in bits by quadrature of -f log f in the probability domain."""
    OrderStatSpec(parent, K, r)

    def integrand(u):
        lb = _log_beta_pdf(u, r, K)
        return -math.exp(lb) * (lb + float(parent.logpdf(parent.ppf(u))))

    val, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-11, epsrel=1e-10, limit=500)
    if not math.isfinite(val):
        raise QuadratureError(f"marginal entropy quadrature diverged (err {err:.3g})")
    return val / LN2


def shape_constant(K: int) -> float:
    """h(X_1) minus the average marginal entropy, in bits; parent independent."""
    if K < 1:
        raise ValueError("K must be positive")
    avg_log_binom = sum(math.log2(math.comb(K - 1, i - 1)) for i in range(1, K + 1)) / K
    return math.log2(K) + avg_log_binom - 0.5 * (K - 1) * LOG2E


def os_avg_marginal_entropy(parent: ContinuousParent, K: int) -> float:
    return differential_entropy(parent) - shape_constant(K)


def os_joint_entropy(parent: ContinuousParent, K: int) -> float:
    """K h(X_1) - log2 K!: the joint density is K! prod f on the sorted cone."""
    return K * differential_entropy(parent) - math.lgamma(K + 1) / LN2


def _harmonic(k: int) -> float:
    return math.fsum(1.0 / m for m in range(1, k + 1))


def os_conditional_entropy(parent: ContinuousParent, K: int, r: int) -> float:
    """h(X_(r+1:K) | X_(r:K)) in bits.

    Harmonic-number constant minus E[ln f(X_(r+1:K))], the latter as the
    nested double integral over (x, y > x) mapped to (u, v > u).
    """
    if not 1 <= r < K:
        raise ValueError("need 1 <= r < K")
    m = K - r
    const = -math.log(m) - _harmonic(K) + _harmonic(m) + 1 - 1 / m
    coef = math.exp(math.lgamma(K + 1) - math.lgamma(m) - math.lgamma(r))

    def inner(v, u):
        return float(parent.logpdf(parent.ppf(v))) * (1 - v) ** (m - 1) * u ** (r - 1)

    val, err = integrate.dblquad(inner, 0.0, 1.0, lambda u: u, 1.0, epsabs=1e-11, epsrel=1e-10)
    if not math.isfinite(val) or err > 1e-6:
        raise QuadratureError(f"conditional entropy quadrature did not converge (err {err:.3g})")
    return (const - coef * val) / LN2


def chain_rule_joint_entropy(parent: ContinuousParent, K: int) -> float:
    """h(X_(1:K)) plus the K - 1 Markov conditional entropies."""
    total = os_marginal_entropy(parent, K, 1)
    for r in range(1, K):
        total += os_conditional_entropy(parent, K, r)
    return total
