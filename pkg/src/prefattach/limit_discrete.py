"""Limiting weight distribution for integer-valued weights.

``x_j`` is the almost-sure limit of the share of researchers with weight
``j``. It solves

    x_j (alpha j + beta + 1) = sum_{i<j} x_{j-i} [(j-i) P(Y=i)/(EX+EZ) + H(i)] + P(X=j)

and decays like ``C j^-gamma`` with ``gamma = (EX+EZ)/EY + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ModelConfig, Mode, eval_H_atom, eval_y_pmf, theoretical_moments, y_atoms,
)

UNDERFLOW = 1e-300


@dataclass
class DiscreteLimit:
    """Solved limit. ``x[j]`` is ``x_j`` for ``j = 1..J``; ``x[0]`` is unused (0).

    ``log_x`` stays finite where ``x`` underflows.
    """

    x: np.ndarray
    log_x: np.ndarray
    alpha: float
    beta: float
    gamma: float
    residual_max: float
    c_estimate: float | None = None
    window: tuple[int, int] | None = None

    @property
    def J(self) -> int:
        return self.x.size - 1


def _require_discrete(cfg):
    if cfg.mode is not Mode.DISCRETE:
        raise ValueError("discrete limit needs a discrete-mode config")


def _terms(cfg):
    """Per bonus value ``i >= 1``: (i, P(Y=i), H(i))."""
    out = []
    for v, _ in y_atoms(cfg):
        i = int(v)
        if i >= 1:
            out.append((i, float(eval_y_pmf(cfg, i)), float(eval_H_atom(cfg, i))))
    return out


def _logaddexp_list(vals):
    m = max(vals)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in vals))


def solve_recursion(cfg: ModelConfig, J: int) -> DiscreteLimit:
    """Forward substitution for ``x_1..x_J``.

    Runs in linear space until ``x_j`` drops below 1e-300, then carries on in
    log space so large-``gamma`` tails do not flush to zero.
    """
    _require_discrete(cfg)
    if J < 1:
        raise ValueError("J must be >= 1")
    mom = theoretical_moments(cfg)
    m, alpha, beta = mom.mass_rate, mom.alpha, mom.beta
    terms = _terms(cfg)
    px = {int(v): p for v, p in cfg.x_law.atoms()}

    x = np.zeros(J + 1)
    log_x = np.full(J + 1, -math.inf)
    log_mode = False
    for j in range(1, J + 1):
        denom = alpha * j + beta + 1
        if not log_mode:
            acc = math.fsum(
                x[j - i] * ((j - i) * py / m + hi) for i, py, hi in terms if i < j
            )
            xj = (acc + px.get(j, 0.0)) / denom
            x[j] = xj
            log_x[j] = math.log(xj) if xj > 0 else -math.inf
            if 0 < xj < UNDERFLOW:
                log_mode = True
        else:
            parts = [
                log_x[j - i] + math.log((j - i) * py / m + hi)
                for i, py, hi in terms
                if i < j and (j - i) * py / m + hi > 0
            ]
            if px.get(j, 0.0) > 0:
                parts.append(math.log(px[j]))
            lx = _logaddexp_list(parts) - math.log(denom) if parts else -math.inf
            log_x[j] = lx
            x[j] = math.exp(lx)

    lim = DiscreteLimit(x, log_x, alpha, beta, gamma_discrete(cfg), 0.0)
    lim.residual_max = recursion_residual(cfg, lim)
    return lim


def recursion_residual(cfg: ModelConfig, lim: DiscreteLimit) -> float:
    """Largest relative defect when ``x`` is substituted back into the recursion."""
    mom = theoretical_moments(cfg)
    m = mom.mass_rate
    terms = _terms(cfg)
    px = {int(v): p for v, p in cfg.x_law.atoms()}
    worst = 0.0
    x = lim.x
    for j in range(1, lim.J + 1):
        if x[j] < UNDERFLOW:
            continue
        rhs = math.fsum(x[j - i] * ((j - i) * py / m + hi) for i, py, hi in terms if i < j)
        rhs += px.get(j, 0.0)
        lhs = x[j] * (mom.alpha * j + mom.beta + 1)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), UNDERFLOW))
    return worst


@dataclass
class CoefficientDecomposition:
    """Split of the recursion weights ``w_{j,i} = a_i + b_i / j + c_{j,i}``.

    ``a[i]``, ``b[i]`` for ``i = 0..I`` (index 0 unused); ``r[j]`` for
    ``j = 0..I``.
    """

    a: np.ndarray
    b: np.ndarray
    r: np.ndarray
    alpha: float
    beta: float
    mass_rate: float
    _py: np.ndarray
    _h: np.ndarray

    def c(self, j, i):
        b = self.b[i]
        return -b * (self.beta + 1) / (j * (self.alpha * j + self.beta + 1))

    def w(self, j, i):
        """Recursion weight computed directly from its definition."""
        j = np.asarray(j, dtype=float)
        return ((j - i) * self._py[i] / self.mass_rate + self._h[i]) / (self.alpha * j + self.beta + 1)

    def reconstruct(self, j, i):
        return self.a[i] + self.b[i] / np.asarray(j, dtype=float) + self.c(np.asarray(j, dtype=float), i)

    def gamma_ratio(self) -> float:
        """``-sum b_i / sum i a_i``."""
        idx = np.arange(self.a.size)
        return -math.fsum(self.b) / math.fsum(idx * self.a)


def coefficient_decomposition(cfg: ModelConfig, I: int | None = None) -> CoefficientDecomposition:
    """Coefficients up to bonus index ``I`` (default: top of the bonus support)."""
    _require_discrete(cfg)
    mom = theoretical_moments(cfg)
    alpha, beta, m = mom.alpha, mom.beta, mom.mass_rate
    top = max(int(v) for v, _ in y_atoms(cfg))
    if I is None:
        I = top
    idx = np.arange(I + 1)
    py = np.asarray(eval_y_pmf(cfg, idx), dtype=float)
    h = np.asarray(eval_H_atom(cfg, idx), dtype=float)
    py[0] = h[0] = 0.0
    a = py / (alpha * m)
    b = (h - (alpha * idx + beta + 1) * a) / alpha
    b[0] = 0.0
    px = np.array([float(cfg.x_law.pmf(j)) for j in idx])
    r = px / (alpha * idx + beta + 1)
    r[0] = 0.0
    return CoefficientDecomposition(a, b, r, alpha, beta, m, py, h)


def gamma_discrete(cfg: ModelConfig) -> float:
    """Exponent of ``x_j ~ C j^-gamma``: ``(EX + EZ) / EY + 1``.

    Cross-checked against ``-sum b_i / sum i a_i``; disagreement beyond 1e-10
    raises ``ArithmeticError``.
    """
    _require_discrete(cfg)
    mom = theoretical_moments(cfg)
    closed = mom.mass_rate / mom.ey + 1
    ratio = coefficient_decomposition(cfg).gamma_ratio()
    if abs(closed - ratio) > 1e-10 * max(1.0, abs(closed)):
        raise ArithmeticError(f"gamma forms disagree: {closed} vs {ratio}")
    return closed


def tail_constant_estimate(lim: DiscreteLimit, window: tuple[int, int]) -> float:
    """Fit ``log x_j = log C - gamma log j`` with ``gamma`` fixed; returns ``C``.

    Only a numerical estimate: there is no closed form for ``C`` and the
    result drifts with the window while ``j`` is pre-asymptotic.
    """
    lo, hi = window
    if not 1 <= lo <= hi <= lim.J:
        raise ValueError(f"window {window} outside [1, {lim.J}]")
    js = np.arange(lo, hi + 1)
    lx = lim.log_x[lo:hi + 1]
    if np.any(~np.isfinite(lx)):
        raise ValueError("window contains x_j = 0")
    return float(np.exp(np.mean(lx + lim.gamma * np.log(js))))


def reachable_weights(cfg: ModelConfig, J: int) -> np.ndarray:
    """Mask of weights ``j <= J`` reachable from an initial weight by bonus steps."""
    seen = np.zeros(J + 1, dtype=bool)
    for v, _ in cfg.x_law.atoms():
        if 1 <= v <= J:
            seen[int(v)] = True
    steps = [int(v) for v, _ in y_atoms(cfg) if v >= 1]
    for j in range(1, J + 1):
        if seen[j]:
            for s in steps:
                if j + s <= J:
                    seen[j + s] = True
    return seen
