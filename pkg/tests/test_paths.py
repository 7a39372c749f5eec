"""Path simulation: determinism, degenerate cases, antithetic pairing, moments."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asianmc import MCConfig, PathSample, default_steps, sample_batch, sample_ensemble, sample_path

CFG = MCConfig(n_paths=2048, n_steps=64, master_seed=42)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_rejects_bad_config():
    with pytest.raises(ValueError, match="n_paths"):
        MCConfig(n_paths=0, n_steps=8)
    with pytest.raises(ValueError, match="n_steps"):
        MCConfig(n_paths=1, n_steps=0)


def test_rejects_negative_time_and_bad_index():
    with pytest.raises(ValueError, match="nonnegative"):
        sample_batch(-0.5, 0.0, CFG)
    with pytest.raises(ValueError, match="path_index"):
        sample_path(1.0, 0.0, CFG, CFG.n_paths)
    with pytest.raises(ValueError, match="finite"):
        sample_batch(1.0, float("nan"), CFG)


# ---------------------------------------------------------------------------
# degenerate and single-step contracts
# ---------------------------------------------------------------------------


def test_time_zero_is_exact():
    for nu in (0.0, -0.5, 1.0):
        batch = sample_batch(0.0, nu, CFG)
        assert np.all(batch.terminal == 1.0)
        assert np.all(batch.integral == 0.0)
    assert sample_path(0.0, 2.0, CFG, 5) == PathSample(1.0, 0.0)


def test_single_step_trapezoid_formula():
    # With one interval the integral must be exactly dt*(X_0 + X_1)/2; at
    # B_1 = 0 that evaluates to (1 + e^{-1/2})/2.
    cfg = MCConfig(n_paths=256, n_steps=1, master_seed=11)
    batch = sample_batch(1.0, 0.0, cfg)
    np.testing.assert_allclose(batch.integral, 0.5 * (1.0 + batch.terminal), rtol=1e-15)
    assert 0.5 * (1.0 + math.exp(-0.5)) == pytest.approx(0.8033, abs=5e-5)


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


def test_batch_is_reproducible_and_matches_single_paths():
    b1 = sample_batch(1.0, 0.0, CFG)
    b2 = sample_batch(1.0, 0.0, CFG)
    np.testing.assert_array_equal(b1.terminal, b2.terminal)
    np.testing.assert_array_equal(b1.integral, b2.integral)
    for i in (0, 1, 1023, 1024, 2047):
        assert sample_path(1.0, 0.0, CFG, i) == b1.sample(i)


def test_paths_do_not_depend_on_batch_size():
    small = sample_batch(1.0, 0.0, MCConfig(500, 64, 42))
    large = sample_batch(1.0, 0.0, MCConfig(2000, 64, 42))
    np.testing.assert_array_equal(small.terminal, large.terminal[:500])
    np.testing.assert_array_equal(small.integral, large.integral[:500])


def test_thread_count_does_not_change_results():
    serial = sample_ensemble(1.0, (0.0, 1.0), CFG, threads=None)
    threaded = sample_ensemble(1.0, (0.0, 1.0), CFG, threads=4)
    for nu in (0.0, 1.0):
        np.testing.assert_array_equal(serial[nu].terminal, threaded[nu].terminal)
        np.testing.assert_array_equal(serial[nu].integral, threaded[nu].integral)


def test_ensemble_shares_increments_across_drifts():
    ens = sample_ensemble(1.0, (0.0, 1.0), CFG)
    # same Brownian path: drifted terminal = driftless terminal * e^{nu t}
    np.testing.assert_allclose(ens[1.0].terminal, ens[0.0].terminal * math.e, rtol=1e-12)


def test_batches_are_immutable():
    batch = sample_batch(1.0, 0.0, CFG)
    with pytest.raises(ValueError):
        batch.terminal[0] = 2.0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**64 - 1),
       index=st.integers(min_value=0, max_value=99))
def test_sample_path_is_pure(seed, index):
    cfg = MCConfig(n_paths=100, n_steps=16, master_seed=seed)
    assert sample_path(0.7, 0.0, cfg, index) == sample_path(0.7, 0.0, cfg, index)


# ---------------------------------------------------------------------------
# antithetic pairing
# ---------------------------------------------------------------------------


def test_antithetic_pairs_negate_increments():
    cfg = MCConfig(n_paths=64, n_steps=1, master_seed=5, antithetic=True)
    batch = sample_batch(1.0, 0.0, cfg)
    # one step: terminal = exp(z*sqrt(t) - t/2), so products of pairs are e^{-t}
    prod = batch.terminal[0::2] * batch.terminal[1::2]
    np.testing.assert_allclose(prod, math.exp(-1.0), rtol=1e-12)


def test_antithetic_reduces_pair_variance_of_terminal():
    n = 20_000
    plain = sample_batch(1.0, 0.0, MCConfig(n, 64, 42))
    anti = sample_batch(1.0, 0.0, MCConfig(n, 64, 42, antithetic=True))
    pair_mean_anti = 0.5 * (anti.terminal[0::2] + anti.terminal[1::2])
    pair_mean_plain = 0.5 * (plain.terminal[0::2] + plain.terminal[1::2])
    assert pair_mean_anti.var() < pair_mean_plain.var()


# ---------------------------------------------------------------------------
# moment sanity (cheap versions; the full oracles run in test_acceptance)
# ---------------------------------------------------------------------------


def test_terminal_martingale_and_integral_mean():
    n = 50_000
    batch = sample_batch(1.0, 0.0, MCConfig(n, 256, 42))
    for vals, target in ((batch.terminal, 1.0), (batch.integral, 1.0)):
        se = vals.std(ddof=1) / math.sqrt(n)
        assert abs(vals.mean() - target) <= 3 * se


def test_drifted_integral_mean():
    n = 50_000
    for nu in (-0.5, 1.0):
        batch = sample_batch(1.0, nu, MCConfig(n, 256, 42))
        target = (math.exp(nu) - 1.0) / nu
        se = batch.integral.std(ddof=1) / math.sqrt(n)
        assert abs(batch.integral.mean() - target) <= 3 * se


def test_default_steps_rule():
    assert default_steps(1.0) == 1024
    assert default_steps(0.5) == 512
    assert default_steps(2.0) == 2048
    assert default_steps(0.1) == 256
    assert default_steps(0.0) == 256
