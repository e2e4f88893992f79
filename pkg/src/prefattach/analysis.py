"""Empirical vs theoretical distributions: distances, exponent estimators, ensembles."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .model import ModelConfig, Mode, theoretical_moments


def sup_distance(empirical, theoretical) -> float:
    e = np.asarray(empirical, dtype=float)
    t = np.asarray(theoretical, dtype=float)
    if e.shape != t.shape:
        raise ValueError(f"length mismatch: {e.shape} vs {t.shape}")
    if e.size == 0:
        return 0.0
    return float(np.max(np.abs(e - t)))


class ExponentEstimate(NamedTuple):
    value: float
    std: float


def doubling_ratio_exponent(values, window, grid=None) -> ExponentEstimate:
    """Average of ``-log2(v(2x) / v(x))`` over ``x`` in ``window``.

    Without ``grid``, ``values[j]`` is the term at index ``j`` (so ``x`` runs
    over integers in the window). With ``grid``, ``x`` runs over grid points
    in the window whose double is also a grid point.
    """
    v = np.asarray(values, dtype=float)
    lo, hi = window
    if grid is None:
        xs = np.arange(int(lo), int(hi) + 1)
        if xs.size == 0 or 2 * xs[-1] >= v.size or xs[0] < 1:
            raise ValueError(f"window {window} and its double must lie in [1, {v.size - 1}]")
        a, b = v[xs], v[2 * xs]
    else:
        g = np.asarray(grid, dtype=float)
        sel = np.flatnonzero((g >= lo) & (g <= hi))
        pos = np.searchsorted(g, 2 * g[sel])
        ok = pos < g.size
        ok[ok] = np.isclose(g[pos[ok]], 2 * g[sel[ok]], rtol=0, atol=1e-9 * max(1.0, hi))
        if not ok.any():
            raise ValueError("no grid point in the window has its double on the grid")
        a, b = v[sel[ok]], v[pos[ok]]
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("values must be strictly positive on the window and its double")
    est = -np.log2(b / a)
    return ExponentEstimate(float(est.mean()), float(est.std()))


def hill_exponent(sample, tail_fraction: float = 0.01) -> float:
    """Hill estimate of the tail index from the top ``tail_fraction`` order statistics.

    Weights in one run are dependent, so no confidence interval is attached.
    """
    x = np.asarray(sample, dtype=float)
    if x.size < 100:
        raise ValueError("Hill estimator needs at least 100 observations")
    if not 0 < tail_fraction <= 0.1:
        raise ValueError("tail_fraction must lie in (0, 0.1]")
    if np.any(x <= 0):
        raise ValueError("Hill estimator needs positive observations")
    k = max(int(math.floor(tail_fraction * x.size)), 1)
    top = np.sort(x)[::-1][: k + 1]
    logs = np.log(top[:k]) - math.log(top[k])
    s = logs.sum()
    if s <= 0:
        raise ValueError("degenerate sample: upper order statistics are all equal")
    return float(k / s)


def tail_exponent_target(cfg: ModelConfig, gamma: float) -> float:
    """Tail-index target matching :func:`hill_exponent`.

    In discrete mode ``gamma`` is the pmf exponent, so the tail decays with
    ``gamma - 1``. In continuous mode ``G`` is already a tail function.
    """
    return gamma - 1 if cfg.mode is Mode.DISCRETE else gamma


@dataclass
class EnsembleSummary:
    mean: np.ndarray
    stderr: np.ndarray | None
    replicas: int


def aggregate_ensemble(reports) -> EnsembleSummary:
    """Pointwise mean and standard error across replicas.

    Values are sorted along the replica axis before summing, which makes the
    result bit-identical under any permutation of ``reports``.
    """
    arrs = [np.asarray(r, dtype=float) for r in reports]
    if not arrs:
        raise ValueError("no replicas")
    shape = arrs[0].shape
    if any(a.shape != shape for a in arrs):
        raise ValueError("replicas disagree on keys/grid")
    stack = np.sort(np.stack(arrs), axis=0)
    R = stack.shape[0]
    mean = stack.sum(axis=0) / R
    if R == 1:
        return EnsembleSummary(mean, None, 1)
    dev = np.sort((stack - mean) ** 2, axis=0)
    var = dev.sum(axis=0) / (R - 1)
    return EnsembleSummary(mean, np.sqrt(var / R), R)


@dataclass
class ComparisonReport:
    sup_distance: float
    per_point: list[tuple[float, float, float, float]]
    n: int
    replicas: int
    exponent_estimates: list[tuple[str, float, tuple[float, float]]] = field(default_factory=list)
    tolerance: float | None = None

    def __post_init__(self):
        vals = [abs_diff for *_, abs_diff in self.per_point]
        if vals and not math.isclose(self.sup_distance, max(vals), rel_tol=0, abs_tol=0):
            raise ValueError("sup_distance must equal the largest abs_diff")
        flat = [self.sup_distance, *(v for row in self.per_point for v in row)]
        flat += [v for _, v, _ in self.exponent_estimates]
        if not all(math.isfinite(v) for v in flat):
            raise ValueError("report entries must be finite")

    @property
    def passed(self) -> bool | None:
        if self.tolerance is None:
            return None
        return self.sup_distance < self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_point"] = [
            {"key": k, "empirical": e, "theoretical": t, "abs_diff": a}
            for k, e, t, a in self.per_point
        ]
        d["exponent_estimates"] = [
            {"method": m, "value": v, "window": list(w)} for m, v, w in self.exponent_estimates
        ]
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def csv_rows(self):
        yield ("key", "empirical", "theoretical", "abs_diff")
        for row in self.per_point:
            yield tuple(repr(float(v)) for v in row)


def build_report(keys, empirical, theoretical, n, replicas, tolerance=None, estimates=()):
    keys = np.asarray(keys, dtype=float)
    e = np.asarray(empirical, dtype=float)
    t = np.asarray(theoretical, dtype=float)
    diff = np.abs(e - t)
    rows = [(float(k), float(a), float(b), float(d)) for k, a, b, d in zip(keys, e, t, diff)]
    return ComparisonReport(
        sup_distance(e, t), rows, int(n), int(replicas), list(estimates), tolerance
    )


def moments_summary(cfg: ModelConfig) -> dict:
    return asdict(theoretical_moments(cfg))
