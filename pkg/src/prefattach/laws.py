"""Closed whitelist of one-dimensional laws used for initial weights and bonuses.

Every family here has a finite moment generating function near zero, so the
tail conditions of the model hold by construction. Heavy-tailed laws simply
cannot be expressed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

PMF_TOL = 1e-12


def _is_int(v) -> bool:
    return float(v) == math.floor(float(v))


class WeightLaw:
    """Common interface. Subclasses are frozen dataclasses."""

    family: str = ""

    def mean(self) -> float:
        raise NotImplementedError

    def sf(self, t):
        """P(V > t), vectorized over ``t``."""
        raise NotImplementedError

    def pmf(self, i):
        """P(V = i); zero for continuous families."""
        return np.zeros_like(np.asarray(i, dtype=float))

    def pdf(self, s):
        raise TypeError(f"{self.family} law has no density")

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def scaled(self, c: float) -> "WeightLaw":
        """Law of ``c * V`` for ``c > 0``."""
        raise NotImplementedError

    @property
    def is_continuous(self) -> bool:
        return False

    @property
    def is_integer_valued(self) -> bool:
        return False

    def atoms(self) -> list[tuple[float, float]]:
        return []

    def breakpoints(self) -> list[float]:
        """Points where the density may be discontinuous (for quadrature)."""
        return []

    def problems(self) -> list[str]:
        return []

    def p_positive(self) -> float:
        return float(self.sf(0.0))


@dataclass(frozen=True)
class DiscretePmf(WeightLaw):
    support: tuple[tuple[float, float], ...]
    family = "discrete_pmf"

    def __post_init__(self):
        object.__setattr__(
            self, "support", tuple((v, float(p)) for v, p in self.support)
        )

    def _vp(self):
        vals = np.array([v for v, _ in self.support], dtype=float)
        probs = np.array([p for _, p in self.support], dtype=float)
        return vals, probs

    def mean(self):
        return math.fsum(v * p for v, p in self.support)

    def sf(self, t):
        vals, probs = self._vp()
        t = np.asarray(t, dtype=float)
        return (probs * (vals > t[..., None])).sum(axis=-1)

    def pmf(self, i):
        vals, probs = self._vp()
        i = np.asarray(i, dtype=float)
        return (probs * (vals == i[..., None])).sum(axis=-1)

    def sample(self, gen, size):
        vals, probs = self._vp()
        idx = gen.choice(len(vals), size=size, p=probs / probs.sum())
        if self.is_integer_valued:
            return vals.astype(np.int64)[idx]
        return vals[idx]

    def scaled(self, c):
        return DiscretePmf(tuple((v * c, p) for v, p in self.support))

    @property
    def is_integer_valued(self):
        return all(_is_int(v) for v, _ in self.support)

    def atoms(self):
        out: dict[float, float] = {}
        for v, p in self.support:
            if p > 0:
                out[v] = out.get(v, 0.0) + p
        return sorted(out.items())

    def problems(self):
        errs = []
        if not self.support:
            errs.append("empty pmf")
            return errs
        if any(p < 0 for _, p in self.support):
            errs.append("negative probability in pmf")
        if any(v < 0 for v, _ in self.support):
            errs.append("negative value in pmf support")
        total = math.fsum(p for _, p in self.support)
        if abs(total - 1.0) > PMF_TOL:
            errs.append(f"pmf sums to {total!r}, not 1")
        return errs


@dataclass(frozen=True)
class Constant(WeightLaw):
    value: float
    family = "constant"

    def mean(self):
        return float(self.value)

    def sf(self, t):
        return (float(self.value) > np.asarray(t, dtype=float)).astype(float)

    def pmf(self, i):
        return (np.asarray(i, dtype=float) == float(self.value)).astype(float)

    def sample(self, gen, size):
        if self.is_integer_valued:
            return np.full(size, int(self.value), dtype=np.int64)
        return np.full(size, float(self.value))

    def scaled(self, c):
        return Constant(self.value * c)

    @property
    def is_integer_valued(self):
        return _is_int(self.value)

    def atoms(self):
        return [(self.value, 1.0)]

    def problems(self):
        return [] if self.value > 0 else [f"constant value {self.value} must be positive"]


@dataclass(frozen=True)
class Exponential(WeightLaw):
    rate: float
    family = "exponential"

    def mean(self):
        return 1.0 / self.rate

    def sf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0, 1.0, np.exp(-self.rate * np.maximum(t, 0.0)))

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s < 0, 0.0, self.rate * np.exp(-self.rate * np.maximum(s, 0.0)))

    def sample(self, gen, size):
        return gen.exponential(1.0 / self.rate, size)

    def scaled(self, c):
        return Exponential(self.rate / c)

    @property
    def is_continuous(self):
        return True

    def problems(self):
        return [] if self.rate > 0 else [f"exponential rate {self.rate} must be positive"]


@dataclass(frozen=True)
class Gamma(WeightLaw):
    shape: float
    scale: float
    family = "gamma"

    def mean(self):
        return self.shape * self.scale

    def sf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= 0, 1.0, special.gammaincc(self.shape, np.maximum(t, 0.0) / self.scale))

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        pos = np.maximum(s, 1e-300)
        logp = (
            (self.shape - 1) * np.log(pos / self.scale)
            - pos / self.scale
            - special.gammaln(self.shape)
            - math.log(self.scale)
        )
        if self.shape > 1:
            at_zero = 0.0
        elif self.shape == 1:
            at_zero = 1.0 / self.scale
        else:
            at_zero = np.inf
        return np.where(s < 0, 0.0, np.where(s == 0, at_zero, np.exp(logp)))

    def sample(self, gen, size):
        return gen.gamma(self.shape, self.scale, size)

    def scaled(self, c):
        return Gamma(self.shape, self.scale * c)

    @property
    def is_continuous(self):
        return True

    def problems(self):
        errs = []
        if self.shape <= 0:
            errs.append(f"gamma shape {self.shape} must be positive")
        if self.scale <= 0:
            errs.append(f"gamma scale {self.scale} must be positive")
        return errs


@dataclass(frozen=True)
class Uniform(WeightLaw):
    lo: float
    hi: float
    family = "uniform"

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def sf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip((self.hi - t) / (self.hi - self.lo), 0.0, 1.0)

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= self.lo) & (s <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def sample(self, gen, size):
        return gen.uniform(self.lo, self.hi, size)

    def scaled(self, c):
        return Uniform(self.lo * c, self.hi * c)

    @property
    def is_continuous(self):
        return True

    def breakpoints(self):
        return [self.lo, self.hi]

    def problems(self):
        errs = []
        if self.lo < 0:
            errs.append(f"uniform lo {self.lo} must be nonnegative")
        if not self.hi > self.lo:
            errs.append(f"uniform needs hi > lo, got [{self.lo}, {self.hi}]")
        return errs


FAMILIES = {
    "discrete_pmf": DiscretePmf,
    "constant": Constant,
    "exponential": Exponential,
    "gamma": Gamma,
    "uniform": Uniform,
}
