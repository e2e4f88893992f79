import math
from collections import Counter
from itertools import product

import numpy as np
import pytest
from scipy import stats

from conftest import nu_const
from oracles import brute_group_law, brute_inclusion, dkw_epsilon
from prefattach.engine import (
    SimState, empirical_tail_fraction, empirical_weight_counts, geometric_checkpoints, group_law,
    inclusion_probability, init_state, run, sample_group, sample_groups, step,
)
from prefattach.laws import Constant, DiscretePmf, Exponential
from prefattach.model import FullBonus, ModelConfig, ab_config, eval_F, theoretical_moments
from prefattach.rng import Streams


class TestInit:
    def test_constant(self, ab):
        s = init_state(ab, Streams(ab))
        assert s.weights == [1] and s.total == 1 and s.n == 0

    def test_replay(self, exp_single):
        a = init_state(exp_single, Streams(exp_single))
        b = init_state(exp_single, Streams(exp_single))
        assert a.weights == b.weights and a.total == b.total

    def test_mean_of_many_inits(self):
        cfg = ModelConfig(DiscretePmf(((1, 0.5), (2, 0.5))), nu_const(1), FullBonus(Constant(1)), "discrete", 0, 9)
        streams = Streams(cfg)
        n = 1_000_000
        w = np.array([init_state(cfg, streams).total for _ in range(n)], dtype=float)
        assert abs(w.mean() - 1.5) <= 4 * 0.5 / math.sqrt(n)


class TestInclusion:
    def test_lemma_example(self):
        s = SimState.from_weights([1, 2, 3])
        assert inclusion_probability(s, 2, 2) == 0.75
        assert brute_inclusion([1, 2, 3], 2, 2) == 0.75

    def test_single_author(self):
        s = SimState.from_weights([1, 2, 3, 4])
        assert [inclusion_probability(s, i, 1) for i in range(4)] == pytest.approx([0.1, 0.2, 0.3, 0.4])

    def test_whole_population(self):
        s = SimState.from_weights([1, 2, 3])
        assert all(inclusion_probability(s, i, 3) == 1 for i in range(3))

    def test_out_of_range(self):
        s = SimState.from_weights([1, 2, 3])
        with pytest.raises(ValueError):
            inclusion_probability(s, 0, 4)
        with pytest.raises(ValueError):
            inclusion_probability(s, 0, 0)
        with pytest.raises(IndexError):
            inclusion_probability(s, 3, 1)

    @pytest.mark.parametrize("weights", [(1, 2, 3), (5, 1, 1, 2), (3, 3, 1, 5, 2), (1, 1, 2, 3, 5, 5)])
    def test_matches_enumeration(self, weights):
        s = SimState.from_weights(list(weights))
        for k in range(1, min(3, len(weights)) + 1):
            for i in range(len(weights)):
                assert inclusion_probability(s, i, k) == pytest.approx(float(brute_inclusion(weights, k, i)), abs=1e-14)


class TestGroupLaw:
    def test_pairs_example(self):
        law = group_law([1, 2, 3], 2)
        assert law == pytest.approx({(0, 1): 3 / 12, (0, 2): 4 / 12, (1, 2): 5 / 12}, abs=1e-15)

    def test_full_set(self):
        s = SimState.from_weights([4, 1, 7])
        assert sample_group(s, 3, Streams(ab_config(0, 1))) == (0, 1, 2)

    def test_equal_weights_uniform(self):
        law = group_law([1] * 5, 3)
        assert len(law) == 10
        assert all(p == pytest.approx(0.1, abs=1e-15) for p in law.values())

    def test_matches_enumeration(self):
        for n in range(1, 6):
            for weights in product((1, 2, 3, 5), repeat=n):
                for k in range(1, min(3, n) + 1):
                    law, ref = group_law(weights, k), brute_group_law(weights, k)
                    assert law.keys() == ref.keys()
                    assert max(abs(law[s] - float(ref[s])) for s in ref) < 1e-12


def _draw_groups(weights, k, size, seed):
    s = SimState.from_weights(list(weights))
    streams = Streams(ab_config(0, seed))
    return Counter(sample_group(s, k, streams) for _ in range(size))


@pytest.mark.parametrize("weights,k", [((1, 2, 3), 2), ((5, 1, 2, 3, 1), 3), ((1, 1, 2, 3, 5, 5), 2)])
def test_sampler_chi_square(weights, k):
    size = 100_000
    counts = _draw_groups(weights, k, size, seed=11)
    law = brute_group_law(weights, k)
    keys = sorted(law)
    obs = np.array([counts.get(s, 0) for s in keys])
    exp = np.array([float(law[s]) * size for s in keys])
    assert obs.sum() == size
    assert stats.chisquare(obs, exp).pvalue > 1e-6


@pytest.mark.parametrize("weights,k", [((1, 2, 3), 2), ((5, 1, 2, 3, 1, 2), 3), ((2.5, 0.5, 1.0, 4.0), 3)])
def test_batch_sampler_chi_square(weights, k):
    size = 200_000
    groups = sample_groups(weights, k, size, np.random.default_rng(21))
    assert groups.shape == (size, k) and np.all(np.diff(groups, axis=1) > 0)
    counts = np.bincount((1 << groups).sum(axis=1), minlength=1 << len(weights))
    law = brute_group_law(weights, k)
    keys = sorted(law)
    obs = np.array([counts[sum(1 << i for i in s)] for s in keys])
    assert obs.sum() == size
    assert stats.chisquare(obs, [float(law[s]) * size for s in keys]).pvalue > 1e-6


def test_batch_sampler_edges():
    gen = np.random.default_rng(0)
    assert np.array_equal(sample_groups([1, 2, 3], 3, 4, gen), np.tile([0, 1, 2], (4, 1)))
    assert set(sample_groups([0, 0, 1], 1, 100, gen).ravel()) == {2}
    with pytest.raises(ValueError):
        sample_groups([1, 2], 3, 10, gen)


def test_sampler_members_distinct_and_float_weights():
    s = SimState.from_weights([0.5, 2.5, 1.25, 3.0])
    streams = Streams(ab_config(0, 3))
    for _ in range(2000):
        g = sample_group(s, 3, streams)
        assert len(set(g)) == 3 and all(0 <= i < 4 for i in g)


@pytest.mark.parametrize("weights,k", [((1, 2, 3), 2), ((3, 3, 1, 5, 2), 3)])
def test_inclusion_frequency_within_four_se(weights, k):
    size = 100_000
    counts = _draw_groups(weights, k, size, seed=12)
    s = SimState.from_weights(list(weights))
    for i in range(len(weights)):
        freq = sum(c for g, c in counts.items() if i in g) / size
        p = inclusion_probability(s, i, k)
        assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / size)


class TestStep:
    def test_ab_first_step(self, ab):
        streams = Streams(ab)
        s = init_state(ab, streams)
        s, rec = step(s, ab, streams)
        assert rec.k == 1 and rec.group == (0,) and rec.bonuses == (1,) and rec.new_weight == 1
        assert s.weights == [2, 1] and s.total == 3 and s.n == 1

    def test_full_bonus_pair(self, full_nu2):
        s = SimState.from_weights([2, 1])
        s, rec = step(s, full_nu2, Streams(full_nu2))
        assert rec.group == (0, 1)
        assert s.weights == [3, 2, 1] and s.total == 6

    def test_forced_single_author_at_start(self, full_nu2):
        streams = Streams(full_nu2)
        s = init_state(full_nu2, streams)
        _, rec = step(s, full_nu2, streams)
        assert rec.k == 1 and rec.group == (0,)

    @pytest.mark.parametrize("name", ["rich_discrete", "split_mixed", "split_gamma", "full_exp2"])
    def test_bookkeeping(self, name, request):
        cfg = request.getfixturevalue(name)
        streams = Streams(cfg)
        s = init_state(cfg, streams)
        for _ in range(500):
            before, pop = s.total, s.population
            s, rec = step(s, cfg, streams)
            assert len(rec.group) == rec.k == len(rec.bonuses)
            assert len(set(rec.group)) == rec.k and max(rec.group) < pop
            assert min(rec.bonuses) >= 0 and rec.new_weight > 0
            expected = before + math.fsum(rec.bonuses) + rec.new_weight
            if s.integer:
                assert s.total == expected
            else:
                assert s.total == pytest.approx(expected, rel=1e-12)
            assert len(s.weights) == s.n + 1

    def test_conditional_truncation_redraws(self, split_mixed):
        streams = Streams(split_mixed)
        s = init_state(split_mixed, streams)
        _, rec = step(s, split_mixed, streams)
        # k = 2 cannot be used with one researcher; the redraw gives k = 1 and Z = 2 in full
        assert rec.k == 1 and rec.bonuses == (2,)


class TestRun:
    def test_zero_steps(self, ab):
        res = run(ModelConfig(ab.x_law, ab.nu_law, ab.bonus, "discrete", 0, 1))
        assert res.state.weights == [1] and res.snapshots == []

    def test_deterministic(self, rich_discrete):
        a = run(rich_discrete, tail_grid=[0, 2, 5])
        b = run(rich_discrete, tail_grid=[0, 2, 5])
        assert a.state.weights == b.state.weights
        for sa, sb in zip(a.snapshots, b.snapshots):
            assert sa.n == sb.n
            assert np.array_equal(sa.counts, sb.counts) and np.array_equal(sa.tails, sb.tails)

    def test_replicas_differ(self, rich_discrete):
        assert run(rich_discrete, replica=0).state.weights != run(rich_discrete, replica=1).state.weights

    def test_memory_guard(self, ab):
        with pytest.raises(MemoryError):
            run(ab, max_steps=10)

    def test_checkpoints(self):
        cps = geometric_checkpoints(10_000)
        assert cps[0] == 1000 and cps[-1] == 10_000 and cps == sorted(set(cps))
        assert cps[:3] == [1000, 1585, 2512]

    def test_law_of_large_numbers(self):
        cfg = ab_config(100_000, 2024)
        res = run(cfg, checkpoints=[])
        assert res.state.total / res.state.n == pytest.approx(2.0, rel=0.02)

    @pytest.mark.slow
    def test_float_total_after_million_steps(self, exp_single):
        cfg = ModelConfig(exp_single.x_law, exp_single.nu_law, exp_single.bonus, "continuous", 1_000_000, 77)
        s = run(cfg, checkpoints=[]).state
        assert len(s.weights) == s.n + 1
        assert s.total == pytest.approx(math.fsum(s.weights), rel=1e-9)
        assert abs(s.total - math.fsum(s.weights)) / s.total < 1e-12


class TestEmpirical:
    def test_counts_example(self):
        s = SimState.from_weights([2, 1])
        assert empirical_weight_counts(s, 3).tolist() == [0.0, 1.0, 1.0, 0.0]

    def test_counts_sum(self, rich_discrete):
        s = run(rich_discrete, checkpoints=[]).state
        counts = empirical_weight_counts(s, max(s.weights))
        assert round(counts.sum() * s.n) == s.n + 1

    def test_counts_need_integer_weights(self):
        with pytest.raises(TypeError):
            empirical_weight_counts(SimState.from_weights([1.5, 2.0]), 3)

    def test_tails(self):
        s = SimState.from_weights([2.0, 1.0, 4.5])
        assert empirical_tail_fraction(s, [0, 1, 2, 4.5, 10]).tolist() == [1.5, 1.0, 0.5, 0.0, 0.0]
        with pytest.raises(ValueError):
            empirical_tail_fraction(s, [2, 1])

    def test_tails_monotone(self, split_gamma):
        s = run(split_gamma, checkpoints=[]).state
        tails = empirical_tail_fraction(s, np.linspace(0, 30, 301))
        assert np.all(np.diff(tails) <= 0)
        assert tails[0] == pytest.approx((s.n + 1) / s.n)

    def test_ab_first_entry(self):
        res = run(ab_config(200_000, 31), checkpoints=[200_000])
        assert res.snapshots[-1].counts[1] == pytest.approx(2 / 3, abs=0.01)


def test_marginal_bonus_within_dkw_band(full_exp2):
    cfg = ModelConfig(full_exp2.x_law, full_exp2.nu_law, full_exp2.bonus, "continuous", 50_000, 5)
    streams = Streams(cfg)
    s = init_state(cfg, streams)
    first = []
    for _ in range(cfg.n_steps):
        pop = s.population
        s, rec = step(s, cfg, streams)
        if pop >= 2:  # skip the forced single-author start
            first.append(rec.bonuses[0])
    y = np.sort(first)
    ecdf_right = np.arange(1, y.size + 1) / y.size
    ecdf_left = np.arange(y.size) / y.size
    model_cdf = 1 - eval_F(cfg, y)
    dev = max(np.max(np.abs(ecdf_right - model_cdf)), np.max(np.abs(ecdf_left - model_cdf)))
    assert dev <= dkw_epsilon(y.size, 1e-6)
    assert theoretical_moments(cfg).ey == pytest.approx(0.5)


def test_integer_total_overflow_guard():
    s = SimState.from_weights([2**62, 2**62 - 1])
    with pytest.raises(OverflowError):
        s._accumulate(2)


def test_exponential_weights_positive(exp_single):
    s = run(exp_single, checkpoints=[]).state
    assert min(s.weights) > 0 and isinstance(exp_single.x_law, Exponential)
