import numpy as np
import pytest

from srmcts.env import (
    Environment,
    RewardStream,
    Transcript,
    empirical_mean,
    load_transcript,
    save_transcript,
    stream_key,
)
from srmcts.errors import BudgetExceededError, InvalidParameterError, UnavailableMeanError
from srmcts.instance import MaxMinInstance


def test_stream_is_order_independent():
    inst = MaxMinInstance(np.zeros((2, 3)))
    s = RewardStream(inst, seed=7, trial=3)
    a = s.rewards([4, 4, 4], [0, 1, 2])
    b = s.rewards([4, 4, 4], [2, 0, 1])
    np.testing.assert_array_equal(a, b[[1, 2, 0]])


def test_keys_differ_across_seed_trial_leaf():
    keys = {stream_key(s, t, l) for s in range(3) for t in range(3) for l in range(3)}
    assert len(keys) == 27


def test_gaussian_moments():
    inst = MaxMinInstance([[0.3]])
    r = RewardStream(inst, 1, 0).rewards(np.zeros(200_000, dtype=int), np.arange(200_000))
    assert abs(r.mean() - 0.3) < 0.01
    assert abs(r.std() - 1.0) < 0.01


def test_bernoulli_and_noiseless():
    r = RewardStream(MaxMinInstance([[0.2]], "bernoulli"), 0, 0).rewards(np.zeros(1000, int), np.arange(1000))
    assert set(np.round(r - 0.2, 12)) == {-1.0, 1.0}
    z = RewardStream(MaxMinInstance([[0.2]], "noiseless"), 0, 0).rewards(np.zeros(5, int), np.arange(5))
    np.testing.assert_array_equal(z, 0.2)


def test_block_pulls_match_single_pulls():
    inst = MaxMinInstance([[0.0, 1.0], [2.0, 3.0]])
    a = Environment(inst, 50, seed=3, trial=1)
    b = Environment(inst, 50, seed=3, trial=1)
    a.pull_block([0, 3, 1], [4, 2, 5])
    for leaf, n in [(0, 4), (3, 2), (1, 5)]:
        for _ in range(n):
            b.pull(*divmod(leaf, 2))
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_allclose(a.sums, b.sums, rtol=1e-12)
    assert a.spent == b.spent == 11


def test_budget_is_enforced_before_sampling():
    env = Environment(MaxMinInstance([[0.0, 1.0]]), 5)
    env.pull_block([0, 1], [2, 2])
    with pytest.raises(BudgetExceededError):
        env.pull_block([0], [2])
    assert env.spent == 4
    env.pull(0, 0)
    with pytest.raises(BudgetExceededError):
        env.pull(0, 1)


def test_bad_budget():
    with pytest.raises(InvalidParameterError):
        Environment(MaxMinInstance([[0.0]]), 0)


def test_record_log():
    env = Environment(MaxMinInstance([[0.0, 1.0]]), 10, record=True)
    env.pull_block([1], [3])
    env.pull(0, 1)
    assert len(env.log[(0, 1)]) == 4
    assert sum(env.log[(0, 1)]) == pytest.approx(env.sums[0, 1])


def test_transcript_roundtrip(tmp_path):
    env = Environment(MaxMinInstance([[0.0, 1.0], [0.5, 0.7]]), 20, seed=1)
    env.pull_block([0, 1, 2], [3, 3, 3])
    tr = env.finish(1, algorithm="x", truncated=True, note="hi")
    p = tmp_path / "t.json"
    save_transcript(tr, p)
    back = load_transcript(p)
    np.testing.assert_array_equal(back.pulls, tr.pulls)
    np.testing.assert_allclose(back.sums, tr.sums)
    assert (back.recommendation, back.spent, back.truncated, back.info) == (1, 9, True, {"note": "hi"})
    assert isinstance(back, Transcript)


def test_empirical_mean_unpulled():
    env = Environment(MaxMinInstance([[0.0, 1.0]], "noiseless"), 5)
    env.pull(0, 1)
    tr = env.finish(0)
    assert empirical_mean(tr, (0, 1)) == 1.0
    with pytest.raises(UnavailableMeanError):
        empirical_mean(tr, (0, 0))
    assert np.isnan(tr.empirical_means()[0, 0])
