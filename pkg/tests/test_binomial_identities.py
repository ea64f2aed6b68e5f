from math import comb

import pytest

from slope1.binomial_identities import (
    binomial_exact,
    construct_alphas,
    construct_betas,
    run_lemma_suite,
    verify_comb1,
    verify_comb3_i,
    verify_congrbinom,
    verify_valuation_lemmas,
)


def test_binomial_exact_out_of_range_is_zero():
    assert binomial_exact(5, 7) == 0
    assert binomial_exact(5, -1) == 0
    assert binomial_exact(10, 4) == comb(10, 4)


def test_comb1_examples():
    assert verify_comb1(5, 22)["status"] == "pass"
    assert verify_comb1(7, 16)["status"] == "pass"


def test_comb3_part_i():
    assert verify_comb3_i(5, 22)["status"] == "pass"


def test_alpha_family_comb2():
    rep = construct_alphas(5, 22, "comb2")
    assert rep["status"] == "pass"
    assert all(j % 4 == 22 % 4 for j in rep["index_set"])


def test_alpha_family_comb6_needs_p_dividing_r():
    rep = construct_alphas(5, 25, "comb6")
    assert rep["status"] == "pass"
    with pytest.raises(ValueError):
        construct_alphas(5, 22, "comb6")


def test_beta_family():
    rep = construct_betas(5, 25)
    assert rep["status"] == "pass"


def test_valuation_lemmas():
    assert verify_valuation_lemmas(5, {"s": 1 + 4 * 25})["status"] == "pass"
    assert verify_valuation_lemmas(5, {"r": 2 + 4 * 25})["status"] == "pass"
    assert verify_valuation_lemmas(5, {"t": 3})["status"] == "pass"


def test_congrbinom_families():
    for which in (1, 2, 12):
        for n in (1, 2, 3):
            for t in (0, 1):
                assert verify_congrbinom(which, 5, n, t)["status"] == "pass"


def test_congrbinom_degenerate_sums_allowed():
    # n = 0 collapses r to 2 (resp. s to 1); the weighted parts that
    # require a longer sum are skipped rather than reported as failures
    assert verify_congrbinom(1, 5, 0, 0)["status"] == "pass"
    assert verify_congrbinom(2, 5, 0, 0)["status"] == "pass"


def test_suite_is_clean_on_a_small_range():
    reports = run_lemma_suite(5, 60)
    assert reports
    assert all(rep["status"] == "pass" for rep in reports)
