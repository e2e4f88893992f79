"""Laws of the coauthorship model, assumption checks and exact moments.

The model is driven by three ingredients:

* ``x_law``: initial weight of every newcomer,
* ``nu_law``: number of authors of each new paper,
* ``bonus``: how the paper's total bonus is split among its authors.

All moment and tail functions below are exact (finite mixtures over the
author-count support), never sampled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce

import numpy as np

from .laws import PMF_TOL, Constant, DiscretePmf, WeightLaw


class Mode(str, Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class Truncation(str, Enum):
    MIN = "min"
    CONDITIONAL = "conditional"


@dataclass(frozen=True)
class AuthorCountLaw:
    """Finite pmf of the author count ``nu`` plus the small-``n`` truncation rule.

    Early on there are fewer researchers than ``nu`` may ask for. ``MIN``
    uses ``min(population, nu)``; ``CONDITIONAL`` redraws until
    ``nu <= population``.
    """

    pmf: tuple[tuple[int, float], ...]
    truncation: Truncation = Truncation.MIN

    def __post_init__(self):
        object.__setattr__(self, "pmf", tuple((int(k), float(p)) for k, p in self.pmf))
        object.__setattr__(self, "truncation", Truncation(self.truncation))

    def items(self):
        return [(k, p) for k, p in self.pmf if p > 0]

    @property
    def support_max(self) -> int:
        return max(k for k, _ in self.items())

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        ks = np.array([k for k, _ in self.pmf], dtype=np.int64)
        ps = np.array([p for _, p in self.pmf], dtype=float)
        return ks[gen.choice(len(ks), size=size, p=ps / ps.sum())]


class BonusScheme:
    """How the total bonus of a paper reaches its ``k`` authors."""

    scheme: str = ""

    def y_given_k(self, k: int) -> WeightLaw:
        """Law of one author's bonus given ``nu = k``."""
        raise NotImplementedError

    def draw(self, stream, k: int) -> list:
        """Bonus vector of length ``k`` from a buffered law stream."""
        raise NotImplementedError

    @property
    def law(self) -> WeightLaw:
        raise NotImplementedError


@dataclass(frozen=True)
class EqualSplit(BonusScheme):
    """Total bonus ``Z`` shared equally: each author gets ``Z / k``."""

    z_law: WeightLaw
    scheme = "equal_split"

    @property
    def law(self):
        return self.z_law

    def y_given_k(self, k):
        return self.z_law.scaled(1.0 / k)

    def draw(self, stream, k):
        z = stream.take(1)[0]
        if isinstance(z, int):
            q, rem = divmod(z, k)
            if rem:
                raise ArithmeticError(f"integer bonus {z} not divisible by {k} authors")
            return [q] * k
        return [z / k] * k


@dataclass(frozen=True)
class FullBonus(BonusScheme):
    """Every author receives the same draw ``Y``; ``Z = k * Y``."""

    y_law: WeightLaw
    scheme = "full_bonus"

    @property
    def law(self):
        return self.y_law

    def y_given_k(self, k):
        return self.y_law

    def draw(self, stream, k):
        y = stream.take(1)[0]
        return [y] * k


@dataclass(frozen=True)
class ExchangeableIid(BonusScheme):
    """Given ``k``, the bonuses are ``k`` independent draws of ``Y``."""

    y_law: WeightLaw
    scheme = "exchangeable_iid"

    @property
    def law(self):
        return self.y_law

    def y_given_k(self, k):
        return self.y_law

    def draw(self, stream, k):
        return stream.take(k)


BONUS_SCHEMES = {
    "equal_split": (EqualSplit, "z_law"),
    "full_bonus": (FullBonus, "y_law"),
    "exchangeable_iid": (ExchangeableIid, "y_law"),
}


@dataclass(frozen=True)
class ModelConfig:
    x_law: WeightLaw
    nu_law: AuthorCountLaw
    bonus: BonusScheme
    mode: Mode = Mode.DISCRETE
    n_steps: int = 1000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def discrete(self) -> bool:
        return self.mode is Mode.DISCRETE


@dataclass(frozen=True)
class Moments:
    ex: float
    ey: float
    ez: float
    enu: float
    enu2: float
    p_y_pos: float
    alpha: float
    beta: float

    @property
    def mass_rate(self) -> float:
        """Asymptotic weight added per step, ``EX + EZ``."""
        return self.ex + self.ez


@dataclass(frozen=True)
class Violation:
    assumption: str
    message: str

    def __str__(self):
        return f"{self.assumption}: {self.message}"


class AssumptionViolation(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass
class _Checker:
    found: list[Violation] = field(default_factory=list)

    def add(self, tag, msg):
        self.found.append(Violation(tag, msg))


def find_violations(cfg: ModelConfig) -> list[Violation]:
    """Every violated assumption of ``cfg``, empty when the config is valid."""
    chk = _Checker()
    x, nu, bonus = cfg.x_law, cfg.nu_law, cfg.bonus

    for msg in x.problems():
        chk.add("A1", f"x_law: {msg}")
    for msg in bonus.law.problems():
        chk.add("A5", f"bonus law: {msg}")
    if chk.found:
        # downstream checks evaluate these laws
        return chk.found

    if float(x.sf(0.0)) < 1.0 - PMF_TOL:
        chk.add("A1", "initial weights must be positive (P(X > 0) = 1)")

    ks = [k for k, _ in nu.pmf]
    ps = [p for _, p in nu.pmf]
    if not ks:
        chk.add("A4", "empty nu pmf")
    if any(k < 1 for k in ks):
        chk.add("A4", "ν_n ≥ 1 required (k < 1 in nu support)")
    if any(p < 0 for p in ps):
        chk.add("A4", "negative probability in nu pmf")
    if ks and abs(math.fsum(ps) - 1.0) > PMF_TOL:
        chk.add("A4", f"nu pmf sums to {math.fsum(ps)!r}, not 1")
    if chk.found:
        return chk.found

    if x.p_positive() <= 0:
        chk.add("A8", "P(X > 0) must be positive")
    if _marginal_sf(cfg, 0.0) <= 0:
        chk.add("A8", "P(Y > 0) must be positive")

    if cfg.mode is Mode.DISCRETE:
        if not x.is_integer_valued:
            chk.add("MODE", f"discrete mode needs integer-valued x_law, got {x.family}")
        if not bonus.law.is_integer_valued:
            chk.add("MODE", f"discrete mode needs integer-valued bonus law, got {bonus.law.family}")
        elif isinstance(bonus, EqualSplit):
            for k, _ in nu.items():
                for z, _ in bonus.z_law.atoms():
                    if int(z) % k:
                        chk.add("MODE", f"equal split: Z={int(z)} not divisible by k={k}")
        if not chk.found:
            vals = [int(v) for v, _ in y_atoms(cfg) if v > 0]
            g = reduce(math.gcd, vals, 0)
            if g != 1:
                chk.add("A8", f"gcd of Y support is {g}")
    else:
        if not x.is_continuous:
            chk.add("MODE", f"continuous mode needs a continuous x_law, got {x.family}")
        if not bonus.law.is_continuous:
            chk.add("MODE", f"continuous mode needs a continuous bonus law, got {bonus.law.family}")

    if cfg.n_steps < 0:
        chk.add("RUN", f"n_steps must be nonnegative, got {cfg.n_steps}")
    if not 0 <= cfg.seed < 2**64:
        chk.add("RUN", f"seed must be a 64-bit unsigned integer, got {cfg.seed}")
    return chk.found


def validate_config(cfg: ModelConfig) -> ModelConfig:
    """Return ``cfg`` unchanged if valid, else raise :class:`AssumptionViolation`."""
    found = find_violations(cfg)
    if found:
        raise AssumptionViolation(found)
    return cfg


def _mixture(cfg):
    return [(k, p, cfg.bonus.y_given_k(k)) for k, p in cfg.nu_law.items()]


def _marginal_sf(cfg, t):
    return float(sum(p * law.sf(t) for _, p, law in _mixture(cfg)))


def y_atoms(cfg: ModelConfig) -> list[tuple[float, float]]:
    """Support and probabilities of the marginal bonus ``Y`` (discrete laws)."""
    out: dict[float, float] = {}
    for _, p, law in _mixture(cfg):
        for v, q in law.atoms():
            out[v] = out.get(v, 0.0) + p * q
    return sorted((v, q) for v, q in out.items() if q > 0)


def theoretical_moments(cfg: ModelConfig) -> Moments:
    mix = _mixture(cfg)
    ex = cfg.x_law.mean()
    ey = math.fsum(p * law.mean() for _, p, law in mix)
    ez = math.fsum(p * k * law.mean() for k, p, law in mix)
    enu = math.fsum(p * k for k, p, _ in mix)
    enu2 = math.fsum(p * k * k for k, p, _ in mix)
    p_y_pos = math.fsum(p * float(law.sf(0.0)) for _, p, law in mix)
    beta = math.fsum(p * (k - 1) * float(law.sf(0.0)) for k, p, law in mix)
    return Moments(
        ex=ex, ey=ey, ez=ez, enu=enu, enu2=enu2, p_y_pos=p_y_pos,
        alpha=p_y_pos / (ex + ez), beta=beta,
    )


def eval_F(cfg: ModelConfig, t):
    """``P(Y > t)`` for the marginal bonus, vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    return sum(p * law.sf(t) for _, p, law in _mixture(cfg))


def eval_H(cfg: ModelConfig, t):
    """``E[(nu - 1) 1{Y > t}]``, vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k, p, law in _mixture(cfg):
        if k > 1:
            out = out + p * (k - 1) * law.sf(t)
    return out


def eval_H_atom(cfg: ModelConfig, i):
    """``E[(nu - 1) 1{Y = i}]``; discrete mode only."""
    if cfg.mode is not Mode.DISCRETE:
        raise ValueError("eval_H_atom is defined only in discrete mode")
    i = np.asarray(i, dtype=float)
    out = np.zeros_like(i)
    for k, p, law in _mixture(cfg):
        if k > 1:
            out = out + p * (k - 1) * law.pmf(i)
    return out


def eval_y_pmf(cfg: ModelConfig, i):
    """``P(Y = i)``; discrete mode only."""
    if cfg.mode is not Mode.DISCRETE:
        raise ValueError("eval_y_pmf is defined only in discrete mode")
    i = np.asarray(i, dtype=float)
    return sum(p * law.pmf(i) for _, p, law in _mixture(cfg))


def eval_f(cfg: ModelConfig, s):
    """Density of the marginal bonus; continuous mode only."""
    s = np.asarray(s, dtype=float)
    return sum(p * law.pdf(s) for _, p, law in _mixture(cfg))


def eval_h(cfg: ModelConfig, s):
    """Density ``h`` with ``H(t) = int_t^inf h``; continuous mode only."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    for k, p, law in _mixture(cfg):
        if k > 1:
            out = out + p * (k - 1) * law.pdf(s)
    return out


def y_breakpoints(cfg: ModelConfig) -> list[float]:
    pts = {b for _, _, law in _mixture(cfg) for b in law.breakpoints()}
    return sorted(p for p in pts if p > 0)


def ab_config(n_steps: int = 1000, seed: int = 0) -> ModelConfig:
    """Unit weights, single authors, unit bonuses: the Albert-Barabasi tree."""
    return ModelConfig(
        x_law=Constant(1),
        nu_law=AuthorCountLaw(((1, 1.0),)),
        bonus=FullBonus(Constant(1)),
        mode=Mode.DISCRETE,
        n_steps=n_steps,
        seed=seed,
    )


__all__ = [
    "AssumptionViolation", "AuthorCountLaw", "BonusScheme", "DiscretePmf",
    "EqualSplit", "ExchangeableIid", "FullBonus", "Mode", "ModelConfig",
    "Moments", "Truncation", "Violation", "ab_config", "eval_F", "eval_H",
    "eval_H_atom", "eval_f", "eval_h", "eval_y_pmf", "find_violations",
    "theoretical_moments", "validate_config", "y_atoms",
]
