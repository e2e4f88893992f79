"""Named, counter-based random streams.

Each purpose gets its own Philox generator keyed by ``(seed, replica,
purpose)``. Adding a draw for one purpose never shifts another, so replays
stay stable when the step logic is reorganized.
"""
from __future__ import annotations

import numpy as np

PURPOSES = ("nu", "anchor", "uniform_set", "bonus", "initial")
BLOCK = 4096
_TWO64 = 1 << 64


def generator(seed: int, replica: int, purpose: str) -> np.random.Generator:
    key = (int(replica), PURPOSES.index(purpose))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key)))


class LawStream:
    """Buffered draws from one law; hands out Python scalars."""

    def __init__(self, sample, gen: np.random.Generator, block: int = BLOCK):
        self._sample = sample
        self._gen = gen
        self._block = block
        self._buf: list = []
        self._pos = 0

    def take(self, m: int) -> list:
        out = []
        while m:
            if self._pos == len(self._buf):
                self._buf = self._sample(self._gen, self._block).tolist()
                self._pos = 0
            grab = min(m, len(self._buf) - self._pos)
            out.extend(self._buf[self._pos:self._pos + grab])
            self._pos += grab
            m -= grab
        return out


class RawStream:
    """Buffered raw 64-bit words with exact bounded integers."""

    def __init__(self, gen: np.random.Generator, block: int = BLOCK):
        self._bits = gen.bit_generator
        self._block = block
        self._buf: list[int] = []
        self._pos = 0

    def word(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bits.random_raw(self._block).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def below(self, m: int) -> int:
        """Uniform integer in ``[0, m)`` by rejection, unbiased for any ``m < 2**64``."""
        if m <= 0:
            raise ValueError("bound must be positive")
        if m >= _TWO64:
            raise OverflowError("bound exceeds 64 bits")
        limit = _TWO64 - (_TWO64 % m)
        w = self.word()
        while w >= limit:
            w = self.word()
        return w % m

    def uniform(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        return (self.word() >> 11) * (1.0 / (1 << 53))


class Streams:
    """All random sources of one simulation replica."""

    def __init__(self, cfg, replica: int = 0, block: int = BLOCK):
        seed = cfg.seed
        self.seed = seed
        self.replica = replica
        self.nu = LawStream(cfg.nu_law.sample, generator(seed, replica, "nu"), block)
        self.anchor = RawStream(generator(seed, replica, "anchor"), block)
        self.uniform_set = RawStream(generator(seed, replica, "uniform_set"), block)
        self.bonus = LawStream(cfg.bonus.law.sample, generator(seed, replica, "bonus"), block)
        self.initial = LawStream(cfg.x_law.sample, generator(seed, replica, "initial"), block)
