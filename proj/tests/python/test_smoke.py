"""Smoke tests for the abcx extension module."""

import math

import pytest

import abcx


def binary_entropy(q):
    return -q * math.log2(q) - (1 - q) * math.log2(1 - q)


@pytest.fixture
def bsc():
    return abcx.Channel([[0.9, 0.1], [0.1, 0.9]])


@pytest.fixture
def p_ux():
    return abcx.UxDist([[0.4, 0.1], [0.1, 0.4]])


def test_information_measures(bsc):
    uniform = abcx.Distribution([0.5, 0.5])
    assert abcx.mutual_information(uniform, bsc) == pytest.approx(
        1.0 - binary_entropy(0.1), abs=1e-12
    )
    point = abcx.Distribution([1.0, 0.0])
    v = abcx.Channel([[0.5, 0.5], [0.5, 0.5]])
    w = abcx.Channel([[0.9, 0.1], [0.9, 0.1]])
    assert abcx.conditional_kl(v, w, point) == pytest.approx(0.736966, abs=1e-6)
    assert abcx.empirical_mutual_info([0, 1, 0, 1], [0, 1, 0, 1], 2, 2) == pytest.approx(1.0)


def test_exponents_above_capacity_are_zero(bsc, p_ux):
    rates = abcx.RateConfig(1.2, 1.2, 1.2, 1.2, 2.0, 1.5)
    bounds = abcx.theorem_bounds(rates, p_ux, bsc)
    assert bounds["e1_bound"] == 0.0
    assert bounds["e1hat_bound"] == 0.0
    assert bounds["e2_bound"] == 0.0
    assert bounds["e2hat_bound"] == 0.0


def test_bound_orderings(bsc, p_ux):
    rates = abcx.RateConfig(0.1, 0.1, 0.15, 0.15, 2.0, 1.5)
    bounds = abcx.theorem_bounds(rates, p_ux, bsc)
    assert bounds["e1hat_bound"] >= bounds["e1_bound"] - 1e-9
    joint = abcx.exponent_joint(2.0, 0.1, 0.1, p_ux, bsc)
    pen = abcx.exponent_penalized(2.0, 0.1, 0.1, 0.1, p_ux, bsc)
    assert pen <= joint + 1e-9


def test_solver_matches_coarse_grid_oracle(bsc, p_ux):
    value = abcx.exponent_joint(1.0, 0.2, 0.2, p_ux, bsc)
    oracle = abcx.grid_exponent("joint", 1.0, 0.2, 0.2, 0.0, 0.0, p_ux, bsc, 30)
    assert value == pytest.approx(oracle, abs=2e-2)


def test_rate_region(bsc, p_ux):
    w_z = abcx.Channel([[0.8, 0.2], [0.2, 0.8]])
    region = abcx.rate_region_check(p_ux, bsc, w_z, 0.0, 0.0)
    assert region["inside"]
    outside = abcx.rate_region_check(p_ux, bsc, w_z, region["i_xy_given_u"] + 0.1, 0.0)
    assert not outside["inside"]


def test_codebook_and_decoding():
    p_ux = abcx.JointType([2, 2], [1, 1, 1, 1], 4)
    cb = abcx.sample_codebook(p_ux, 0.5, 0.5, seed=7)
    assert cb.m1 == 4 and cb.m2 == 4
    assert cb.n == 4
    again = abcx.sample_codebook(p_ux, 0.5, 0.5, seed=7)
    assert cb.clouds == again.clouds and cb.satellites == again.satellites

    rates = abcx.RateConfig(0.5, 0.5, 0.5, 0.5, 1.0, 1.0)
    y = cb.satellites[0][0]
    fast = abcx.decode_y(y, cb, rates, 2)
    slow = abcx.decode_y_exhaustive(y, cb, rates, 2)
    assert (fast.msg1, fast.msg2, fast.stage) == (slow.msg1, slow.msg2, slow.stage)


def test_trials_are_deterministic_and_consistent(bsc):
    p_ux = abcx.JointType([2, 2], [3, 1, 1, 3], 8)
    rates = abcx.RateConfig(0.125, 0.125, 0.2, 0.2, 1.5, 1.5)
    one = abcx.run_trials(p_ux, bsc, rates, trials=300, seed=5, policy="fresh", threads=1)
    two = abcx.run_trials(p_ux, bsc, rates, trials=300, seed=5, policy="fresh", threads=2)
    assert one.msg1_undetected == two.msg1_undetected
    assert one.msg2_erased == two.msg2_erased
    assert one.trials == 300
    assert one.msg1_undetected + one.msg1_erased <= one.trials
    assert one.step1_decoded + one.step2_decoded + one.double_erasure == one.trials


def test_exact_probabilities_partition():
    p_ux = abcx.JointType([2, 2], [2, 1, 1, 2], 6)
    cb = abcx.sample_codebook(p_ux, 1 / 6, 1 / 6, seed=3)
    w = abcx.Channel([[0.85, 0.15], [0.2, 0.8]])
    rates = abcx.RateConfig(1 / 6, 1 / 6, 0.25, 0.25, 1.5, 1.5)
    exact = abcx.exact_error_probs(cb, w, rates, 0, 0)
    assert exact["total_mass"] == pytest.approx(1.0, abs=1e-10)
    assert exact["e1_undetected"] <= exact["e1_total"]
    assert exact["e2_undetected"] <= exact["e2_total"]
