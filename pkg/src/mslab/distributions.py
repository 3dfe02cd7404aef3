"""Parent distributions: discrete pmfs and the three continuous families.

Every entropy is reported in bits.  Continuous sampling always goes through
the inverse cdf so that a given (seed, stream) pair produces the same
uniform variates regardless of family.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy import special

LOG2E = math.log2(math.e)


class Family(str, enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class DiscretePMF:
    """Probability vector over the alphabet {1, ..., |X|}."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 1:
            raise ValueError("pmf needs at least one letter")
        if any(p < 0 or not math.isfinite(p) for p in probs):
            raise ValueError("pmf entries must be finite and nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {math.fsum(probs)!r}, not 1")

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def entropy(self) -> float:
        return entropy_bits(self.probs)


def entropy_bits(probs) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) + 0.0  # no negative zero


@dataclass(frozen=True)
class ContinuousParent:
    """Uniform(a, b), Gaussian(mean, var) or Exponential(rate)."""

    family: Family
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        p = {k: float(v) for k, v in self.params.items()}
        if fam is Family.UNIFORM:
            p.setdefault("a", 0.0)
            p.setdefault("b", 1.0)
            if not p["b"] > p["a"]:
                raise ValueError("uniform parent needs b > a")
        elif fam is Family.GAUSSIAN:
            p.setdefault("mean", 0.0)
            p.setdefault("var", 1.0)
            if not p["var"] > 0:
                raise ValueError("gaussian parent needs var > 0")
        else:
            p.setdefault("rate", 1.0)
            if not p["rate"] > 0:
                raise ValueError("exponential parent needs rate > 0")
        object.__setattr__(self, "params", p)

    def __hash__(self):
        return hash((self.family, tuple(sorted(self.params.items()))))

    # constructors -------------------------------------------------------

    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> "ContinuousParent":
        return cls(Family.UNIFORM, {"a": a, "b": b})

    @classmethod
    def gaussian(cls, mean: float = 0.0, var: float = 1.0) -> "ContinuousParent":
        return cls(Family.GAUSSIAN, {"mean": mean, "var": var})

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "ContinuousParent":
        return cls(Family.EXPONENTIAL, {"rate": rate})

    # evaluators (vectorized, no argument checks) ------------------------

    @property
    def label(self) -> str:
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family.value}({args})"

    @property
    def support(self) -> tuple[float, float]:
        if self.family is Family.UNIFORM:
            return self.params["a"], self.params["b"]
        if self.family is Family.GAUSSIAN:
            return -math.inf, math.inf
        return 0.0, math.inf

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.family is Family.UNIFORM:
            a, b = self.params["a"], self.params["b"]
            out = np.clip((x - a) / (b - a), 0.0, 1.0)
        elif self.family is Family.GAUSSIAN:
            out = special.ndtr((x - self.params["mean"]) / math.sqrt(self.params["var"]))
        else:
            out = np.where(x > 0, -np.expm1(-self.params["rate"] * np.maximum(x, 0.0)), 0.0)
        return out[()] if out.ndim == 0 else out

    def sf(self, x):
        """Survival function 1 - F(x), accurate in the upper tail."""
        x = np.asarray(x, dtype=float)
        if self.family is Family.UNIFORM:
            a, b = self.params["a"], self.params["b"]
            out = np.clip((b - x) / (b - a), 0.0, 1.0)
        elif self.family is Family.GAUSSIAN:
            out = special.ndtr(-(x - self.params["mean"]) / math.sqrt(self.params["var"]))
        else:
            out = np.where(x > 0, np.exp(-self.params["rate"] * np.maximum(x, 0.0)), 1.0)
        return out[()] if out.ndim == 0 else out

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.family is Family.UNIFORM:
            a, b = self.params["a"], self.params["b"]
            inside = (x >= a) & (x <= b)
            out = np.where(inside, -math.log(b - a), -np.inf)
        elif self.family is Family.GAUSSIAN:
            m, v = self.params["mean"], self.params["var"]
            out = -0.5 * (x - m) ** 2 / v - 0.5 * math.log(2 * math.pi * v)
        else:
            lam = self.params["rate"]
            out = np.where(x >= 0, math.log(lam) - lam * x, -np.inf)
        return out[()] if out.ndim == 0 else out

    def ppf(self, w):
        """Quantile without domain checks; endpoints map to the support ends."""
        w = np.asarray(w, dtype=float)
        if self.family is Family.UNIFORM:
            a, b = self.params["a"], self.params["b"]
            out = a + (b - a) * w
        elif self.family is Family.GAUSSIAN:
            out = self.params["mean"] + math.sqrt(self.params["var"]) * special.ndtri(w)
        else:
            out = -np.log1p(-w) / self.params["rate"]
        return out[()] if out.ndim == 0 else out

    # moments ------------------------------------------------------------

    @property
    def mean(self) -> float:
        if self.family is Family.UNIFORM:
            return 0.5 * (self.params["a"] + self.params["b"])
        if self.family is Family.GAUSSIAN:
            return self.params["mean"]
        return 1.0 / self.params["rate"]

    @property
    def var(self) -> float:
        if self.family is Family.UNIFORM:
            return (self.params["b"] - self.params["a"]) ** 2 / 12.0
        if self.family is Family.GAUSSIAN:
            return self.params["var"]
        return 1.0 / self.params["rate"] ** 2

    # serialization ------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {"family": self.family.value, "params": dict(self.params)}


def cdf(parent: ContinuousParent, x: float) -> float:
    return float(parent.cdf(x))


def quantile(parent: ContinuousParent, w):
    """Generalized inverse cdf; raises for w outside the open unit interval."""
    arr = np.asarray(w, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise ValueError("quantile requires 0 < w < 1")
    return parent.ppf(w)


def differential_entropy(parent: ContinuousParent) -> float:
    """Closed-form h(X) in bits."""
    if parent.family is Family.UNIFORM:
        return math.log2(parent.params["b"] - parent.params["a"])
    if parent.family is Family.GAUSSIAN:
        return 0.5 * math.log2(2 * math.pi * math.e * parent.params["var"])
    return math.log2(math.e / parent.params["rate"])


@dataclass(frozen=True)
class SeedSpec:
    seed: int
    stream: int = 0

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def open_uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform variates on the open interval (0, 1) with 53-bit resolution."""
    k = rng.integers(0, 1 << 53, size=n, dtype=np.int64)
    return (k.astype(float) + 0.5) / float(1 << 53)


def sample(parent: ContinuousParent | DiscretePMF, n: int, seed: SeedSpec) -> np.ndarray:
    """n i.i.d. draws; discrete letters are returned as integers 1..|X|."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    u = open_uniforms(seed.rng(), n)
    if isinstance(parent, DiscretePMF):
        cum = np.cumsum(parent.as_array())
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u, side="right")
        # a letter with zero mass can never be chosen
        return (np.minimum(idx, parent.alphabet_size - 1) + 1).astype(np.int64)
    return np.asarray(parent.ppf(u), dtype=float)


def parent_from_json(obj: Mapping[str, Any] | str) -> ContinuousParent | DiscretePMF:
    """Parse {"family": ..., "params": {...}}; family "discrete" takes params.probs."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    fam = str(obj["family"]).lower()
    params = dict(obj.get("params", {}))
    if fam in ("discrete", "pmf"):
        return DiscretePMF(tuple(params["probs"]))
    aliases = {"normal": "gaussian", "exp": "exponential"}
    return ContinuousParent(Family(aliases.get(fam, fam)), params)


def load_parent(spec: str) -> ContinuousParent | DiscretePMF:
    """Accept inline JSON or a path to a JSON file."""
    text = spec.strip()
    if not text.startswith("{"):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    return parent_from_json(text)


# The three sources used for the zero-rate distortion curves.
UNIT_VARIANCE_PARENTS = (
    ContinuousParent.uniform(-math.sqrt(3.0), math.sqrt(3.0)),
    ContinuousParent.gaussian(0.0, 1.0),
    ContinuousParent.exponential(1.0),
)
