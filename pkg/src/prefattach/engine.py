"""Step-by-step evolution of the weight system.

At each step a paper with ``k`` authors is written. The author group is
drawn with probability proportional to the group's total weight, the
authors receive bonuses, and a newcomer with a fresh initial weight joins.

The group law is realized exactly by anchor-plus-uniform: one member drawn
proportionally to weight, the remaining ``k - 1`` uniformly among the rest.
A set ``H`` is reached through any of its members as anchor, so

    P(H) = sum_{j in H} W_j / S * 1 / C(n, k - 1),

which is the weight-proportional group law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .fenwick import FenwickIndex
from .model import ModelConfig, Mode, Truncation
from .rng import Streams

INT64_MAX = 2**63 - 1
DEFAULT_MAX_STEPS = 50_000_000


@dataclass
class SimState:
    """Weights ``W(n, i)`` for ``i = 0..n`` and their running total ``S_n``."""

    weights: list
    cumindex: FenwickIndex
    n: int
    integer: bool
    _sum: float = 0
    _comp: float = 0

    @property
    def total(self):
        """``S_n``; exact in integer mode, Neumaier-compensated otherwise."""
        return self._sum if self.integer else self._sum + self._comp

    @property
    def population(self) -> int:
        return self.n + 1

    def _accumulate(self, x):
        if self.integer:
            self._sum += x
            if self._sum > INT64_MAX:
                raise OverflowError("total weight exceeds 64-bit range")
            return
        s = self._sum
        t = s + x
        if abs(s) >= abs(x):
            self._comp += (s - t) + x
        else:
            self._comp += (x - t) + s
        self._sum = t

    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.int64 if self.integer else float)

    @classmethod
    def from_weights(cls, weights, capacity: int | None = None) -> "SimState":
        """State with the given weights; ``n = len(weights) - 1``."""
        ws = list(weights)
        if not ws:
            raise ValueError("need at least one researcher")
        integer = all(isinstance(w, (int, np.integer)) for w in ws)
        ws = [int(w) for w in ws] if integer else [float(w) for w in ws]
        idx = FenwickIndex(capacity or len(ws), zero=0 if integer else 0.0)
        state = cls(ws, idx, len(ws) - 1, integer, 0 if integer else 0.0, 0 if integer else 0.0)
        for w in ws:
            idx.append(w)
            state._accumulate(w)
        return state


@dataclass(frozen=True)
class StepRecord:
    k: int
    group: tuple[int, ...]
    bonuses: tuple
    new_weight: float


def init_state(cfg: ModelConfig, streams: Streams, capacity: int | None = None) -> SimState:
    x0 = streams.initial.take(1)[0]
    return SimState.from_weights([x0], capacity=capacity or cfg.n_steps + 1)


def inclusion_probability(state: SimState, i: int, k: int) -> float:
    """Probability that researcher ``i`` belongs to the next ``k``-author group."""
    pop = state.population
    if not 1 <= k <= pop:
        raise ValueError(f"group size {k} outside [1, {pop}]")
    if not 0 <= i < pop:
        raise IndexError(f"researcher {i} outside [0, {pop})")
    if k == pop:
        return 1.0
    n = state.n
    share = state.weights[i] / state.total
    return (k - 1) / n * (1 - share) + share


def _anchor(state: SimState, streams: Streams) -> int:
    if state.integer:
        return state.cumindex.search(streams.anchor.below(state.total))
    return state.cumindex.search(streams.anchor.uniform() * state.total)


def _uniform_rest(n: int, anchor: int, m: int, raw) -> list[int]:
    """``m`` distinct indices from ``{0..n} - {anchor}``, uniformly.

    Partial Fisher-Yates over a virtual array of the ``n + 1`` labels in
    which the anchor was swapped into the last slot.
    """
    swapped = {anchor: n} if anchor != n else {}
    out = []
    for j in range(m):
        r = j + raw.below(n - j)
        vr = swapped.get(r, r)
        swapped[r] = swapped.get(j, j)
        out.append(vr)
    return out


def sample_group(state: SimState, k: int, streams: Streams) -> tuple[int, ...]:
    """Draw a ``k``-set with probability proportional to its total weight."""
    pop = state.population
    if not 1 <= k <= pop:
        raise ValueError(f"group size {k} outside [1, {pop}]")
    if k == pop:
        return tuple(range(pop))
    a = _anchor(state, streams)
    rest = _uniform_rest(state.n, a, k - 1, streams.uniform_set)
    return tuple(sorted([a, *rest]))


def _author_count(cfg: ModelConfig, pop: int, streams: Streams) -> int:
    nu = streams.nu.take(1)[0]
    if cfg.nu_law.truncation is Truncation.MIN:
        return min(nu, pop)
    while nu > pop:
        nu = streams.nu.take(1)[0]
    return nu


def step(state: SimState, cfg: ModelConfig, streams: Streams) -> tuple[SimState, StepRecord]:
    """Advance ``state`` by one paper and one newcomer (in place)."""
    k = _author_count(cfg, state.population, streams)
    group = sample_group(state, k, streams)
    bonuses = cfg.bonus.draw(streams.bonus, k)
    ws, idx = state.weights, state.cumindex
    for i, b in zip(group, bonuses):
        if b:
            ws[i] += b
            idx.add(i, b)
            state._accumulate(b)
    x = streams.initial.take(1)[0]
    ws.append(x)
    idx.append(x)
    state._accumulate(x)
    state.n += 1
    return state, StepRecord(k, group, tuple(bonuses), x)


def empirical_weight_counts(state: SimState, j_max: int) -> np.ndarray:
    """Entry ``j`` is ``xi_n(j) / n``, the share of researchers of weight ``j``."""
    if not state.integer:
        raise TypeError("weight counts need integer weights (discrete mode)")
    if state.n < 1:
        raise ValueError("need n >= 1")
    w = state.weights_array()
    counts = np.bincount(w[w <= j_max], minlength=j_max + 1)
    return counts / state.n


def empirical_tail_fraction(state: SimState, grid) -> np.ndarray:
    """Entry ``l`` is ``|{i : W(n, i) > grid[l]}| / n``."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be nondecreasing")
    if state.n < 1:
        raise ValueError("need n >= 1")
    w = np.sort(np.asarray(state.weights, dtype=float))
    above = w.size - np.searchsorted(w, grid, side="right")
    return above / state.n


@dataclass
class Snapshot:
    n: int
    counts: np.ndarray | None = None
    tails: np.ndarray | None = None


@dataclass
class RunResult:
    state: SimState
    snapshots: list[Snapshot]
    tail_grid: np.ndarray | None = None


def geometric_checkpoints(n_steps: int, start: int = 1000, ratio: float = 10**0.2) -> list[int]:
    """``1e3, 1e3.2, 1e3.4, ...`` capped by ``n_steps``, which is always included."""
    out = []
    x = float(start)
    while x < n_steps:
        c = int(round(x))
        if not out or c > out[-1]:
            out.append(c)
        x *= ratio
    if n_steps not in out:
        out.append(n_steps)
    return out


def take_snapshot(state: SimState, j_max: int | None, tail_grid) -> Snapshot:
    snap = Snapshot(state.n)
    if state.n < 1:
        return snap
    if j_max is not None and state.integer:
        snap.counts = empirical_weight_counts(state, j_max)
    if tail_grid is not None:
        snap.tails = empirical_tail_fraction(state, tail_grid)
    return snap


def run(
    cfg: ModelConfig,
    *,
    checkpoints: list[int] | None = None,
    j_max: int | None = 10,
    tail_grid=None,
    replica: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> RunResult:
    """Run ``cfg.n_steps`` steps from a fresh state; deterministic in ``(seed, replica)``.

    Snapshots hold empirical distributions at each checkpoint, not weight
    arrays; the final state is returned for anything else.
    """
    if cfg.n_steps > max_steps:
        raise MemoryError(f"n_steps={cfg.n_steps} exceeds cap {max_steps}")
    if cfg.mode is Mode.CONTINUOUS:
        j_max = None
    if checkpoints is None:
        checkpoints = geometric_checkpoints(cfg.n_steps) if cfg.n_steps else []
    marks = sorted({c for c in checkpoints if 0 < c <= cfg.n_steps})
    grid = None if tail_grid is None else np.asarray(tail_grid, dtype=float)

    streams = Streams(cfg, replica=replica)
    state = init_state(cfg, streams)
    snaps = []
    for target in marks:
        while state.n < target:
            step(state, cfg, streams)
        snaps.append(take_snapshot(state, j_max, grid))
    while state.n < cfg.n_steps:
        step(state, cfg, streams)
    return RunResult(state, snaps, grid)


def group_law(weights, k: int) -> dict[tuple[int, ...], float]:
    """Exact law of :func:`sample_group`, accumulated over its anchor choices."""
    ws = list(weights)
    pop = len(ws)
    if not 1 <= k <= pop:
        raise ValueError(f"group size {k} outside [1, {pop}]")
    if k == pop:
        return {tuple(range(pop)): 1.0}
    total = math.fsum(ws)
    n_rest = math.comb(pop - 1, k - 1)
    law: dict[tuple[int, ...], float] = {}
    for a in range(pop):
        others = [j for j in range(pop) if j != a]
        pa = ws[a] / total / n_rest
        for rest in combinations(others, k - 1):
            key = tuple(sorted((a, *rest)))
            law[key] = law.get(key, 0.0) + pa
    return law


def sample_groups(weights, k: int, size: int, gen: np.random.Generator) -> np.ndarray:
    """Vectorized anchor-plus-uniform draws for a fixed weight vector.

    Returns an array of shape ``(size, k)`` with sorted rows. Intended for
    small populations (inclusion checks, sampler validation).
    """
    w = np.asarray(weights, dtype=float)
    pop = w.size
    if not 1 <= k <= pop:
        raise ValueError(f"group size {k} outside [1, {pop}]")
    if k == pop:
        return np.tile(np.arange(pop), (size, 1))
    cum = np.cumsum(w)
    anchors = np.searchsorted(cum, gen.random(size) * cum[-1], side="right")
    anchors = np.minimum(anchors, pop - 1)
    # sequential uniform picks; each new draw skips the indices already taken,
    # kept as sorted columns so the skip is one pass and insertion is min/max
    cols = [anchors]
    for j in range(k - 1):
        u = gen.integers(0, pop - 1 - j, size)
        for c in cols:
            u += u >= c
        merged = []
        for c in cols:
            merged.append(np.minimum(c, u))
            u = np.maximum(c, u)
        cols = [*merged, u]
    return np.stack(cols, axis=1)
