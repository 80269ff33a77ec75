import numpy as np
import pytest

from p300channel import MarkovSource, ReducibleChainError, load_source, save_source
from p300channel.sources import (history_from_label, history_label, recurrent_classes,
                                 stationary_distribution)


def test_constrained_shape():
    src = MarkovSource.constrained(2, 0.3)
    assert src.p1.tolist() == [0.3, 0.0, 0.0, 0.0]


def test_validation():
    with pytest.raises(ValueError):
        MarkovSource(0, np.array([0.5]))
    with pytest.raises(ValueError):
        MarkovSource(1, np.array([0.5, 1.5]))
    with pytest.raises(ValueError):
        MarkovSource(1, np.array([0.5]))


def test_history_labels_round_trip():
    # oldest bit first; the integer keeps the newest bit in the LSB
    assert history_label(0b01, 2) == "01"
    assert history_from_label("01") == 1
    for h in range(8):
        assert history_from_label(history_label(h, 3)) == h


def test_transition_matrix_rows_sum_to_one():
    rng = np.random.default_rng(0)
    src = MarkovSource(3, rng.random(8))
    T = src.transition_matrix()
    assert np.allclose(T.sum(axis=1), 1.0)


def test_transition_matrix_follows_shift():
    src = MarkovSource(2, np.array([0.2, 0.4, 0.6, 0.8]))
    T = src.transition_matrix()
    # from history 0b01 (newest bit 1): emitting 0 -> 0b10, emitting 1 -> 0b11
    assert T[1, 2] == pytest.approx(0.6)
    assert T[1, 3] == pytest.approx(0.4)


def test_stationary_iid():
    src = MarkovSource(1, np.array([0.3, 0.3]))
    pi = stationary_distribution(src)
    assert pi == pytest.approx([0.7, 0.3], abs=1e-12)


def test_stationary_of_constrained_chain():
    # order-2 constrained chain: history 11 is transient
    src = MarkovSource.constrained(2, 0.25)
    pi = stationary_distribution(src)
    assert pi[3] == 0.0
    assert pi.sum() == pytest.approx(1.0, abs=1e-12)
    # fraction of ones equals a / (1 + L a) by the renewal argument
    assert float(pi @ src.p1) == pytest.approx(0.25 / 1.5, abs=1e-12)


def test_multiple_recurrent_classes_detected():
    src = MarkovSource(1, np.array([0.0, 1.0]))   # all-zero and all-one absorbers
    assert len(recurrent_classes(src)) == 2
    with pytest.raises(ReducibleChainError):
        stationary_distribution(src)


def test_sampling_frequency_and_support():
    src = MarkovSource.constrained(1, 0.4)
    rng = np.random.default_rng(12)
    x = src.sample(100_000, rng, init="stationary")
    ones = np.flatnonzero(x)
    assert np.diff(ones).min() >= 2            # no adjacent ones
    assert abs(x.mean() - 0.4 / 1.4) < 0.01    # stationary fraction a/(1+a)


def test_sampling_determinism():
    src = MarkovSource(2, np.array([0.3, 0.1, 0.7, 0.2]))
    a = src.sample(500, np.random.default_rng(9), init="zeros")
    b = src.sample(500, np.random.default_rng(9), init="zeros")
    assert np.array_equal(a, b)


def test_source_file_round_trip(tmp_path):
    src = MarkovSource(2, np.array([0.31, 0.0, 0.25, 1.0]))
    path = tmp_path / "src.txt"
    save_source(src, path)
    back = load_source(path)
    assert back.order == 2
    assert np.array_equal(back.p1, src.p1)


def test_source_file_validation(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0,0.5\n1,0.5\n")
    with pytest.raises(ValueError, match="order"):
        load_source(path)
    path.write_text("# order=2\n00,0.5\n01,0.5\n10,0.5\n")
    with pytest.raises(ValueError, match="missing"):
        load_source(path)
    path.write_text("# order=1\n00,0.5\n01,0.5\n")
    with pytest.raises(ValueError, match="order"):
        load_source(path)
