import json
import random
from fractions import Fraction
from math import comb

import pytest

from slope1 import reduction_engine as re_
from slope1.padics import PrecisionError, padic_valuation


def test_needed_precision():
    assert re_.needed_precision(5, 10) == 3          # b=2, t=0
    assert re_.needed_precision(7, 10) == 2          # b=4
    assert re_.needed_precision(5, 2 + 4 * 5 ** 3) == 6  # t=3


def test_delta_at_p5():
    out = re_.run_query(5, 12, 4830, with_ramification=True, with_llc=True)
    red = out["reduction"]
    assert red["type"] == "reducible"
    assert red["lambda"] == {"a0": 1, "a1": 0}
    assert [f["omega_exp"] for f in red["factors"]] == [2, 1]
    assert out["ramification"] == "tres_ramifiee"


def test_delta16_at_p5():
    out = re_.run_query(5, 16, 52110, with_ramification=True)
    assert out["reduction"]["lambda"] == {"a0": 1, "a1": 0}
    assert out["ramification"] == "undetermined"
    assert "2/3" in out["ramification_reason"]


def test_delta_at_p7():
    out = re_.run_query(7, 12, -16744)
    red = out["reduction"]
    assert red["type"] == "reducible"
    assert red["lambda"] == {"a0": 1, "a1": 0}
    assert [f["omega_exp"] for f in red["factors"]] == [4, 1]


def test_generic_branch_lambda_formula():
    # p=7, r=18, b=6, p not dividing r-b: lambda = (b/(b-r)) ap/p
    out = re_.run_query(7, 20, 7 * 3)
    red = out["reduction"]
    want = Fraction(6, 6 - 18) * 3
    assert red["lambda"]["a0"] == want.numerator * pow(want.denominator, -1, 7) % 7
    assert red["lambda"]["a1"] == 0


def test_induced_branches():
    # 3 <= b <= p-1 with p | r-b: r = 46 has b = 4 and r-b = 42
    out = re_.run_query(7, 48, 7)
    assert out["reduction"] == {"type": "irreducible", "induced_exponent": 5}
    # b = p with p not dividing r-b -> ind(omega2^(2p))
    out = re_.run_query(5, 11, 5)  # r = 9, b = 5, r-b = 4
    assert out["reduction"] == {"type": "irreducible", "induced_exponent": 10}


def test_b_equals_p_quadratic_branch():
    # b = p, p | r-b: lambda solves x^2 - cx + 1 = 0, possibly over F_p^2
    out = re_.run_query(5, 27, 5)  # r = 25, b = 5, r-b = 20
    red = out["reduction"]
    assert red["type"] == "reducible"
    assert [f["omega_exp"] for f in red["factors"]] == [1, 1]


def test_slope_must_be_one():
    with pytest.raises(re_.HypothesisError):
        re_.run_query(5, 12, 26)  # unit a_p: slope 0
    with pytest.raises(re_.HypothesisError):
        re_.run_query(5, 12, 50)  # slope 2
    with pytest.raises(re_.HypothesisError):
        re_.run_query(4, 12, 4)  # p not prime / < 5


def test_insufficient_precision_digit_string():
    with pytest.raises(PrecisionError):
        re_.run_query(5, 12, "1:1")  # abs prec 2 < needed 3


def test_trichotomy_boundary_is_exact():
    p, r, t = 5, 22, 1
    for u in range(1, p ** (t + 2)):
        if u % p == 0:
            continue
        out = re_.run_query(p, r + 2, p * u)
        x = Fraction(u) - Fraction(comb(r, 2), u)
        vx = padic_valuation(x.numerator, p) - padic_valuation(x.denominator, p)
        if vx == t:
            assert out["reduction"]["type"] == "reducible"
        elif vx < t:
            assert out["reduction"] == {"type": "irreducible",
                                        "induced_exponent": 3}
        else:
            assert out["reduction"] == {"type": "irreducible",
                                        "induced_exponent": 7}


def test_llc_of_irreducible_normalizes_exponent():
    # ind(omega2^(2p)) = ind(omega2^(r'+1)) (x) omega^m with r'=p-2, m=1
    desc = re_.llc({"type": "irreducible", "induced_exponent": 2 * 5}, 5)
    assert desc == [{"r": 3, "lambda": desc[0]["lambda"], "eta_omega_exp": 1}]
    assert desc[0]["lambda"].a0 == 0 and desc[0]["lambda"].a1 == 0


def test_llc_reducible_follows_displayed_recipe():
    params = re_.CrystallineParams(5, 12, 4830)
    result = re_.reduce_slope_one(params)
    desc = re_.llc(result, 5)
    # mu_1 omega^2 + mu_1 omega = (mu_1 omega^(0+1) + mu_1) (x) omega
    assert [(d["r"], d["eta_omega_exp"]) for d in desc] == [(0, 1), (2, 2)]


def test_determinism_and_precision_monotonicity():
    a = json.dumps(re_.run_query(5, 24, 115, with_llc=True), sort_keys=True)
    b = json.dumps(re_.run_query(5, 24, 115, with_llc=True), sort_keys=True)
    assert a == b
    lo = re_.run_query(5, 24, 115)
    hi = re_.run_query(5, 24, 115, precision=12)
    assert lo["reduction"] == hi["reduction"]


def test_llc_injective_on_grid():
    seen = {}
    for p in (5, 7):
        for r in range(2 * p, 5 * p):
            for u in (1, 2, 3):
                if u % p == 0:
                    continue
                try:
                    params = re_.CrystallineParams(p, r + 2, p * u)
                    result = re_.reduce_slope_one(params)
                except (ValueError, PrecisionError):
                    continue
                key = json.dumps(
                    [p, [re_.serialize_llc_factor(f)
                         for f in re_.llc(result, p)]],
                    sort_keys=True)
                red = json.dumps(re_.serialize_reduction(result),
                                 sort_keys=True)
                assert seen.setdefault(key, red) == red
    assert seen


def test_cross_check_random_points():
    rng = random.Random(7)
    done = 0
    while done < 8:
        p = rng.choice([5, 7])
        r = rng.randrange(2 * p, 5 * p)
        u = rng.randrange(1, p * p)
        if u % p == 0:
            continue
        rep = re_.cross_check(re_.CrystallineParams(p, r + 2, p * u))
        assert rep["status"] == "pass", (p, r, u, rep)
        done += 1


def test_cross_check_skips_small_weights():
    rep = re_.cross_check(re_.CrystallineParams(5, 9, 5))
    assert rep["status"] == "skipped"
