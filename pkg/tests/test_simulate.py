import itertools

import numpy as np
import pytest

from p300channel import (AwgnNoise, BinarySymmetric, ChannelSpec, Codebook, GROUND,
                         Noiseless, SimConfig, fsm_response, gen_mbc, gen_rcp,
                         map_decode, maxentropic_source, run_experiment,
                         wilson_interval)
from p300channel.simulate import sweep_awgn, sweep_refractory, sweep_rows_to_csv


class TestWilson:
    def test_brackets_the_point_estimate(self):
        lo, hi = wilson_interval(73, 100)
        assert lo < 0.73 < hi

    def test_extremes_stay_in_unit_interval(self):
        lo, hi = wilson_interval(0, 50)
        assert lo == 0.0 or lo > 0.0
        assert 0.0 <= lo < hi <= 1.0
        lo, hi = wilson_interval(50, 50)
        assert 0.0 <= lo < hi <= 1.0

    def test_shrinks_with_trials(self):
        w1 = np.diff(wilson_interval(50, 100))
        w2 = np.diff(wilson_interval(5000, 10000))
        assert w2 < w1


class TestMapDecode:
    def test_exact_match_wins_noiseless(self):
        book = Codebook(np.array([[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]]),
                        kind="t", seed=0)
        chan = ChannelSpec(1)
        z1 = fsm_response(book.matrix[1], 1)
        assert map_decode(z1, book, chan) == 1

    def test_awgn_two_rows_spec_example(self):
        book = Codebook(np.array([[1, 0], [0, 1]]), kind="t", seed=0)
        chan = ChannelSpec(1, AwgnNoise(1.0))
        # squared distances 0.02 vs 2.02 -> first character
        assert map_decode(np.array([0.9, -0.1]), book, chan) == 0

    def test_identical_responses_tie_to_lowest_index(self):
        # [1,1,0] and [1,0,0] have the same gate response at L=1
        book = Codebook(np.array([[0, 1, 1, 0], [0, 1, 0, 0], [1, 0, 0, 1]]),
                        kind="t", seed=0)
        chan = ChannelSpec(1)
        y = fsm_response(book.matrix[1], 1)
        assert map_decode(y, book, chan) == 0

    def test_length_mismatch_rejected(self):
        book = Codebook(np.array([[1, 0], [0, 1]]), kind="t", seed=0)
        with pytest.raises(ValueError):
            map_decode(np.array([1.0, 0.0, 0.0]), book, ChannelSpec(1, AwgnNoise(1.0)))

    def test_agrees_with_exhaustive_posterior_bsc(self):
        rng = np.random.default_rng(123)
        book = Codebook(rng.integers(0, 2, size=(4, 6)), kind="t", seed=0)
        eps = 0.1
        chan = ChannelSpec(1, BinarySymmetric(eps))
        Z = fsm_response(book.matrix, 1)
        for bits in itertools.product((0, 1), repeat=6):
            y = np.array(bits, dtype=np.int8)
            d = (y[None, :] != Z).sum(axis=1)
            posterior = (eps ** d) * ((1 - eps) ** (6 - d)) / 4.0
            posterior /= posterior.sum()
            assert map_decode(y, book, chan) == int(np.argmax(posterior))


class TestRunExperiment:
    def test_noiseless_distinct_responses_give_perfect_accuracy(self):
        book = gen_mbc(maxentropic_source(1), 36, 60, seed=2)
        rep = run_experiment(SimConfig(book, ChannelSpec(1), runs=400, seed=0))
        assert rep.accuracy == 1.0

    def test_chance_floor_under_huge_noise(self):
        book = gen_rcp(36, 60, seed=3)
        cfg = SimConfig(book, ChannelSpec(1, AwgnNoise(1e4)), runs=10_000, seed=1)
        rep = run_experiment(cfg)
        lo, hi = rep.wilson_ci95
        assert lo <= 1 / 36 <= hi

    def test_seed_determinism(self):
        book = gen_rcp(36, 24, seed=5)
        cfg = SimConfig(book, ChannelSpec(1, AwgnNoise(2.0)), runs=300, seed=9,
                        track_confusion=True)
        a, b = run_experiment(cfg), run_experiment(cfg)
        assert a.accuracy == b.accuracy
        assert np.array_equal(a.per_char_confusion, b.per_char_confusion)

    def test_shard_invariance(self):
        book = gen_rcp(36, 24, seed=5)
        cfg = SimConfig(book, ChannelSpec(1, AwgnNoise(1.0)), runs=250, seed=4,
                        track_confusion=True)
        reports = [run_experiment(cfg, n_shards=k) for k in (1, 3, 7)]
        for rep in reports[1:]:
            assert rep.accuracy == reports[0].accuracy
            assert np.array_equal(rep.per_char_confusion, reports[0].per_char_confusion)

    def test_confusion_rows_count_trials(self):
        book = gen_rcp(36, 24, seed=6)
        cfg = SimConfig(book, ChannelSpec(1, AwgnNoise(3.0)), runs=500, seed=2,
                        track_confusion=True)
        rep = run_experiment(cfg)
        assert rep.per_char_confusion.sum() == 500
        assert rep.accuracy == np.trace(rep.per_char_confusion) / 500

    def test_refractory_twin_rows_confuse_at_low_noise(self):
        # [1,1,0,...] and [1,0,0,...] share a gate response at L=1, so the
        # decoder cannot separate them: all of the pair's mass lands on the
        # lower index (tie rule) and the confusion concentrates on the pair.
        rows = np.zeros((3, 12), dtype=np.int8)
        rows[0, :3] = [1, 1, 0]
        rows[1, :3] = [1, 0, 0]
        rows[2, 6:9] = [1, 0, 1]
        book = Codebook(rows, kind="twin", seed=0)
        assert np.array_equal(fsm_response(rows[0], 1), fsm_response(rows[1], 1))
        cfg = SimConfig(book, ChannelSpec(1, AwgnNoise(1e-4)), runs=3000, seed=7,
                        track_confusion=True)
        rep = run_experiment(cfg)
        conf = rep.per_char_confusion
        assert conf[:2, 2].sum() == 0 and conf[2, :2].sum() == 0
        # both twins decode identically, so target 1 is always misread as 0
        assert conf[0, 0] + conf[1, 0] == conf[:2].sum()
        n_pair = conf[:2].sum()
        assert rep.accuracy == pytest.approx(1 - conf[1, 0] / rep.runs)
        assert abs(conf[1, 0] / n_pair - 0.5) < 0.05   # uniform targets hit each twin

    def test_chance_floor_under_useless_bsc(self):
        # BSC(0.5) carries nothing: every run decodes to index 0 (tie rule),
        # landing exactly at the 1/W floor under uniform targets
        book = gen_rcp(36, 24, seed=8)
        cfg = SimConfig(book, ChannelSpec(1, BinarySymmetric(0.5)), runs=5000, seed=3)
        rep = run_experiment(cfg)
        lo, hi = rep.wilson_ci95
        half_width = (hi - lo) / 2
        assert rep.accuracy >= 1 / 36 - 3 * half_width
        assert lo <= 1 / 36 <= hi

    def test_invalid_config(self):
        book = gen_rcp(36, 12, seed=1)
        with pytest.raises(ValueError):
            SimConfig(book, ChannelSpec(1), runs=0)


class TestSweeps:
    def test_awgn_sweep_shape_and_monotonicity(self):
        books = {"mbc": gen_mbc(maxentropic_source(1), 36, 60, seed=11),
                 "rcp": gen_rcp(36, 60, seed=12)}
        rows = sweep_awgn(books, L=1, sigma2_grid=[4.0, 0.5, 1.5], runs=800, seed=3)
        assert len(rows) == 6
        assert [r["sigma2"] for r in rows] == [0.5, 0.5, 1.5, 1.5, 4.0, 4.0]
        for label in books:
            acc = [r["accuracy"] for r in rows if r["codebook"] == label]
            ci = [(r["ci_lo"], r["ci_hi"]) for r in rows if r["codebook"] == label]
            for k in range(len(acc) - 1):
                assert acc[k] >= acc[k + 1] or ci[k][0] <= ci[k + 1][1]

    def test_refractory_sweep_regenerates_mbc(self):
        rows = sweep_refractory([2, 1], sigma2=1.0, N=60, runs=500, seed=5)
        assert [r["L"] for r in rows] == [1, 2]
        assert rows[0]["codebook"] == "mbc(order=1)"
        assert rows[1]["codebook"] == "mbc(order=2)"

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            sweep_awgn({"rcp": gen_rcp(36, 12, seed=0)}, 1, [], runs=10, seed=0)
        with pytest.raises(ValueError):
            sweep_refractory([], sigma2=1.0, N=60, runs=10, seed=0)

    def test_csv_rendering(self):
        books = {"rcp": gen_rcp(36, 12, seed=1)}
        rows = sweep_awgn(books, L=1, sigma2_grid=[1.0], runs=50, seed=2)
        text = sweep_rows_to_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0] == "sigma2,L,codebook,N,runs,accuracy,ci_lo,ci_hi,seed"
        assert len(lines) == 2

    def test_sweep_deterministic(self):
        books = {"rcp": gen_rcp(36, 12, seed=1)}
        a = sweep_awgn(books, 1, [0.5, 2.0], runs=200, seed=8)
        b = sweep_awgn(books, 1, [0.5, 2.0], runs=200, seed=8)
        assert a == b
