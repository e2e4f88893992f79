"""Prefix-sum index over researcher weights (binary indexed tree)."""
from __future__ import annotations


class FenwickIndex:
    """Cumulative weights with point update and prefix search in O(log n).

    Positions are 0-based externally. Works with Python ints (exact) or
    floats. Capacity doubles on demand.
    """

    def __init__(self, capacity: int = 16, zero=0):
        self._zero = zero
        self._size = 0
        self._cap = 1
        while self._cap < max(capacity, 1):
            self._cap <<= 1
        self._tree = [zero] * (self._cap + 1)
        self._vals: list = []

    def __len__(self):
        return self._size

    def _grow(self):
        self._cap <<= 1
        tree = [self._zero] * (self._cap + 1)
        # O(n) rebuild from the raw values
        for i, v in enumerate(self._vals, start=1):
            tree[i] += v
            j = i + (i & -i)
            if j <= self._cap:
                tree[j] += tree[i]
        self._tree = tree

    def append(self, value):
        if self._size == self._cap:
            self._grow()
        self._vals.append(self._zero)
        self._size += 1
        self.add(self._size - 1, value)

    def add(self, pos: int, delta):
        self._vals[pos] += delta
        tree, cap = self._tree, self._cap
        i = pos + 1
        while i <= cap:
            tree[i] += delta
            i += i & -i

    def prefix(self, count: int):
        """Sum of the first ``count`` values."""
        tree = self._tree
        s = self._zero
        i = count
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def search(self, target):
        """Smallest position ``p`` with ``prefix(p + 1) > target``.

        ``target`` must lie in ``[0, total)``. Float round-off past the last
        positive entry is clamped onto it.
        """
        tree = self._tree
        pos = 0
        rem = target
        step = self._cap
        while step:
            nxt = pos + step
            if nxt <= self._cap and tree[nxt] <= rem:
                pos = nxt
                rem -= tree[nxt]
            step >>= 1
        if pos >= self._size:
            pos = self._size - 1
            while pos > 0 and self._vals[pos] <= 0:
                pos -= 1
        return pos

    def linear_search(self, target):
        """Reference scan with the same contract as :meth:`search`."""
        acc = self._zero
        for p, v in enumerate(self._vals):
            acc += v
            if acc > target:
                return p
        p = self._size - 1
        while p > 0 and self._vals[p] <= 0:
            p -= 1
        return p

    def values(self) -> list:
        return list(self._vals)
