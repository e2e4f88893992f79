"""Limiting tail function ``G`` for continuous weights.

``G(t)`` is the almost-sure limit of the share of researchers heavier than
``t``. With ``m = EX + EZ`` it solves

    G(t) (t/m + E nu) = int_0^t G(t - s) d_s L(t, s) + H(t) + P(X > t),   G(0) = 1,

    L(t, s) = (s F(s) + t (1 - F(s))) / m - H(s),

and decays like ``C t^-gamma`` with ``gamma = (EX + EZ) / EY``.

The solver marches forward on ``t_k = k h`` twice. The upper sweep pairs
each cell ``[(i-1)h, ih]`` of the kernel with ``G(t - ih)``; since ``G``
decreases this overestimates the integral. The lower sweep pairs the cell
``[ih, (i+1)h]`` with ``G(t - ih)`` and underestimates it. The first cell of
the lower sweep involves ``G(t)`` itself and is resolved by fixed-point
iteration. The reported ``G`` is the midpoint of the two sweeps and the
sweep gap is a built-in error bar.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import (
    ModelConfig, Mode, eval_F, eval_f, eval_H, eval_h, theoretical_moments, y_breakpoints,
)

FP_TOL = 1e-12
FP_MAX_ITER = 100


class ConvergenceError(ArithmeticError):
    def __init__(self, k: int, width: float):
        self.k = k
        self.width = width
        super().__init__(f"first-cell fixed point did not converge at k={k} (bracket width {width:.3g})")


@dataclass
class ContinuousLimit:
    grid: np.ndarray
    g: np.ndarray
    g_upper: np.ndarray
    g_lower: np.ndarray
    gamma: float
    h: float
    t_max: float

    @property
    def bracket(self) -> np.ndarray:
        return self.g_upper - self.g_lower

    def __call__(self, t):
        """``G`` interpolated linearly between grid points."""
        return np.interp(t, self.grid, self.g)


def _require_continuous(cfg):
    if cfg.mode is not Mode.CONTINUOUS:
        raise ValueError("continuous limit needs a continuous-mode config")


def eval_kernel_L(cfg: ModelConfig, t: float, s):
    """``L(t, s)`` for ``0 <= s <= t``, vectorized over ``s``."""
    _require_continuous(cfg)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > t):
        raise ValueError("kernel needs 0 <= s <= t")
    m = theoretical_moments(cfg).mass_rate
    F = eval_F(cfg, s)
    return (s * F + t * (1 - F)) / m - eval_H(cfg, s)


def _grid_steps(t_max, h):
    if h <= 0 or t_max <= 0:
        raise ValueError("h and t_max must be positive")
    M = int(round(t_max / h))
    if M < 1 or abs(M * h - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError(f"t_max={t_max} is not a multiple of h={h}")
    return M


def solve_G(cfg: ModelConfig, t_max: float = 50.0, h: float = 0.01) -> ContinuousLimit:
    _require_continuous(cfg)
    M = _grid_steps(t_max, h)
    mom = theoretical_moments(cfg)
    m, enu = mom.mass_rate, mom.enu

    pts = np.arange(M + 3) * h
    F = np.asarray(eval_F(cfg, pts), dtype=float)
    H = np.asarray(eval_H(cfg, pts), dtype=float)
    PX = np.asarray(cfg.x_law.sf(pts), dtype=float)

    # upper cell i covers [(i-1)h, ih]; weight A_u[i] + (k-i) B_u[i]
    A_u = np.zeros(M + 1)
    B_u = np.zeros(M + 1)
    A_u[1:] = h * F[:M] / m + (H[:M] - H[1:M + 1])
    B_u[1:] = h * (F[:M] - F[1:M + 1]) / m
    # lower cell i covers [ih, (i+1)h]; weight A_l[i] + (k-i-1) B_l[i]
    A_l = np.zeros(M + 1)
    B_l = np.zeros(M + 1)
    A_l[1:] = h * F[1:M + 1] / m + (H[1:M + 1] - H[2:M + 2])
    B_l[1:] = h * (F[1:M + 1] - F[2:M + 2]) / m

    gu = np.empty(M + 1)
    gl = np.empty(M + 1)
    gu[0] = gl[0] = 1.0
    j = np.arange(M + 1, dtype=float)
    for k in range(1, M + 1):
        rev = slice(k, 0, -1)  # index k - jj for jj = 0..k-1
        D = k * h / m + enu

        sig_u = gu[:k] @ A_u[rev] + (j[:k] * gu[:k]) @ B_u[rev]
        gu[k] = (sig_u + H[k] + PX[k]) / D

        sig_l = gl[:k] @ A_l[rev] + ((j[:k] - 1) * gl[:k]) @ B_l[rev]
        # boundary cell past t at its grid-exact value (it cancels the
        # overhang of the last lower cell, leaving H(t))
        num = sig_l - h * F[k + 1] / m + H[k + 1] + PX[k]
        d_low = (k - 1) * h * F[1] / m + H[1] + 1
        first_cell = D - d_low
        g = gl[k - 1]
        for _ in range(FP_MAX_ITER):
            g_new = (num + g * first_cell) / D
            if abs(g_new - g) <= FP_TOL:
                g = g_new
                break
            g = g_new
        else:
            raise ConvergenceError(k, abs(gu[k] - g))
        gl[k] = g

    grid = np.arange(M + 1) * h
    return ContinuousLimit(grid, 0.5 * (gu + gl), gu, gl, mom.mass_rate / mom.ey, h, M * h)


def resubstitute(cfg: ModelConfig, lim: ContinuousLimit) -> np.ndarray:
    """Right-hand side of the integral equation evaluated with ``lim.g``.

    Trapezoid Stieltjes sums with exact kernel increments on the solver grid.
    """
    _require_continuous(cfg)
    mom = theoretical_moments(cfg)
    m, enu = mom.mass_rate, mom.enu
    grid, g = lim.grid, lim.g
    F = np.asarray(eval_F(cfg, grid), dtype=float)
    H = np.asarray(eval_H(cfg, grid), dtype=float)
    PX = np.asarray(cfg.x_law.sf(grid), dtype=float)
    out = np.empty_like(g)
    out[0] = 1.0
    for k in range(1, grid.size):
        t = grid[k]
        s = grid[: k + 1]
        L = (s * F[: k + 1] + t * (1 - F[: k + 1])) / m - H[: k + 1]
        dL = np.diff(L)
        gmid = 0.5 * (g[k::-1][:-1] + g[k - 1::-1])
        out[k] = (gmid @ dL + H[k] + PX[k]) / (t / m + enu)
    return out


@dataclass(frozen=True)
class ContinuousCoefficients:
    """``w_{t,s} = f(s) + b(s)/(t + d)`` and the forcing term ``r(t)``."""

    f: object
    b: object
    d: float
    r: object


def continuous_coefficients(cfg: ModelConfig) -> ContinuousCoefficients:
    _require_continuous(cfg)
    mom = theoretical_moments(cfg)
    m, enu = mom.mass_rate, mom.enu
    d = m * enu

    def f(s):
        return eval_f(cfg, s)

    def b(s):
        return eval_F(cfg, s) - (np.asarray(s, dtype=float) + d) * eval_f(cfg, s) + eval_h(cfg, s) * m

    def r(t):
        return (eval_H(cfg, t) + cfg.x_law.sf(t)) / (np.asarray(t, dtype=float) / m + enu)

    return ContinuousCoefficients(f, b, d, r)


def _integrate(fn, breaks):
    edges = [0.0, *breaks]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        total += integrate.quad(lambda s: float(fn(s)), lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
    total += integrate.quad(lambda s: float(fn(s)), edges[-1], np.inf, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
    return total


def integral_b(cfg: ModelConfig) -> float:
    """``int_0^inf b(s) ds`` by adaptive quadrature; equals ``-(EX + EZ)``."""
    co = continuous_coefficients(cfg)
    return _integrate(co.b, y_breakpoints(cfg))


def gamma_continuous(cfg: ModelConfig) -> float:
    """Exponent of ``G(t) ~ C t^-gamma``: ``(EX + EZ) / EY``.

    Cross-checked against ``-int b / int s f(s) ds``; relative disagreement
    beyond 1e-6 raises ``ArithmeticError``.
    """
    _require_continuous(cfg)
    mom = theoretical_moments(cfg)
    closed = mom.mass_rate / mom.ey
    ratio = gamma_continuous_ratio(cfg)
    if abs(ratio - closed) > 1e-6 * abs(closed):
        raise ArithmeticError(f"gamma forms disagree: {closed} vs {ratio}")
    return closed


def gamma_continuous_ratio(cfg: ModelConfig) -> float:
    co = continuous_coefficients(cfg)
    breaks = y_breakpoints(cfg)
    mean_y = _integrate(lambda s: s * co.f(s), breaks)
    return -integral_b(cfg) / mean_y


def log_slope(lim: ContinuousLimit, window: tuple[float, float]) -> float:
    """Least-squares slope of ``-log G`` against ``log t`` over grid points in ``window``."""
    lo, hi = window
    mask = (lim.grid >= lo) & (lim.grid <= hi)
    if mask.sum() < 2:
        raise ValueError(f"window {window} holds fewer than two grid points")
    if np.any(lim.g[mask] <= 0):
        raise ValueError("G must be positive on the window")
    slope = np.polyfit(np.log(lim.grid[mask]), np.log(lim.g[mask]), 1)[0]
    return float(-slope)
