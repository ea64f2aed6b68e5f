"""Acceptance gate: one pass/fail line per criterion.

Run with `pytest -s tests/test_acceptance.py` to see the lines.
"""
import json
import random
import time
from fractions import Fraction
from math import comb

import numpy as np

from slope1 import binomial_identities as bi
from slope1 import gamma_modules as gm
from slope1 import reduction_engine as re_
from slope1 import tree_hecke as th
from slope1.padics import Padic, padic_valuation, teichmuller


def _line(n, ok, note):
    status = "PASS" if ok else "FAIL"
    print("CRITERION %d: %s — %s" % (n, status, note))
    assert ok, "criterion %d failed: %s" % (n, note)


def test_criterion_1_delta_p5():
    t0 = time.time()
    out = re_.run_query(5, 12, 4830, with_ramification=True)
    dt = time.time() - t0
    red = out["reduction"]
    ok = (
        red["type"] == "reducible"
        and red["lambda"] == {"a0": 1, "a1": 0}
        and [f["omega_exp"] for f in red["factors"]] == [2, 1]
        and out["ramification"] == "tres_ramifiee"
        and dt < 1.0
    )
    _line(1, ok, "Delta p=5: lambda=1, omega^2+omega, tres ramifiee "
                 "(%.2fs)" % dt)


def test_criterion_2_delta16_p5():
    t0 = time.time()
    out = re_.run_query(5, 16, 52110, with_ramification=True)
    dt = time.time() - t0
    ok = (
        out["reduction"]["lambda"] == {"a0": 1, "a1": 0}
        and out["ramification"] == "undetermined"
        and "2/3" in out["ramification_reason"]
        and dt < 1.0
    )
    _line(2, ok, "Delta16 p=5: lambda=1, undetermined r=2/3 mod p "
                 "(%.2fs)" % dt)


def test_criterion_3_delta_p7():
    t0 = time.time()
    out = re_.run_query(7, 12, -16744)
    dt = time.time() - t0
    red = out["reduction"]
    ok = (
        red["type"] == "reducible"
        and red["lambda"] == {"a0": 1, "a1": 0}
        and [f["omega_exp"] for f in red["factors"]] == [4, 1]
        and dt < 1.0
    )
    _line(3, ok, "Delta p=7: mu_1 omega^4 + mu_1 omega (%.2fs)" % dt)


def test_criterion_4_lemma_suite():
    t0 = time.time()
    failures = 0
    total = 0
    for p in (5, 7, 11, 13):
        for rep in bi.run_lemma_suite(p, 60 * p):
            total += 1
            if rep["status"] != "pass":
                failures += 1
    dt = time.time() - t0
    ok = failures == 0 and dt < 300
    _line(4, ok, "lemma suite p in {5,7,11,13}, r,s <= 60p: %d reports, "
                 "%d failures (%.0fs)" % (total, failures, dt))


def test_criterion_5_structure_suite():
    t0 = time.time()
    checked = 0
    bad = []
    for p in (5, 7, 11):
        points = set()
        for lo, hi in ((2 * p, 3 * p), (3 * p, 4 * p), (5 * p, 6 * p)):
            for a in range(1, p):
                for r in range(max(lo, 2 * p), hi + 1):
                    if (r - 1) % (p - 1) + 1 == a:
                        points.add(r)
                        break
            for r in range(max(lo, 2 * p), hi + 1):
                if r % p == 0:
                    points.add(r)  # the p | r sub-cases
        for r in sorted(points):
            ps = gm.build_P(p, r)
            checked += 1
            if tuple(ps.labels) != tuple(gm.expected_labels(p, r)):
                bad.append((p, r, "labels"))
                continue
            if ps.dim != sum(lab[0] + 1 for lab in ps.labels
                             if lab is not None):
                bad.append((p, r, "dimension"))
                continue
            for i, (vec, model) in gm.anchor_rows(p, r).items():
                if ps.labels[i] is None:
                    continue
                img = ps.to_J(np.asarray(vec) % p, i)
                if img is None or not np.array_equal(
                        np.asarray(img) % p, np.asarray(model) % p):
                    bad.append((p, r, "anchor J%d" % i))
    dt = time.time() - t0
    ok = not bad and dt < 300
    _line(5, ok, "structure suite: %d (p, r) points, failures=%s (%.0fs)"
          % (checked, bad or "none", dt))


def test_criterion_6_witness_suite():
    t0 = time.time()
    points = [
        ("W1", 7, 16, 21), ("W1", 5, 15, 5),
        ("W2", 7, 16, 21), ("W2", 5, 15, 5),
        ("W3", 7, 16, 21), ("W3", 5, 15, 5),
        ("W4", 5, 13, 5), ("W4", 7, 19, 7),
        ("W5", 5, 25, 5), ("W5", 7, 49, 7),
        ("W6", 5, 25, 5), ("W6", 7, 49, 7),
        ("W7", 5, 10, 5), ("W7", 5, 22, 45),
        ("W8", 5, 22, 45), ("W8", 7, 26, 7),
        ("W9", 5, 30, 5), ("W9", 5, 22, 5),
        ("W10", 5, 22, 5), ("W10", 7, 26, 7),
        ("W11", 5, 22, 5), ("W11", 7, 26, 7),
    ]
    assert any(p == 5 and r == 22 for _, p, r, _ in points)  # t = 1 point
    bad = []
    for case, p, r, ap in points:
        rep = th.verify_witness(case, p, r, ap)
        if not (rep["integral"] and rep["matches_claim"]):
            bad.append((case, p, r, ap))
    dt = time.time() - t0
    ok = not bad and dt < 600
    _line(6, ok, "witness suite W1-W11, %d points incl. t=1 chi-sum, "
                 "failures=%s (%.0fs)" % (len(points), bad or "none", dt))


def test_criterion_7_trichotomy_realization():
    t0 = time.time()
    p, r, t = 5, 2 + 4 * 5, 1
    seen = set()
    exact = True
    for u in range(1, p ** (t + 2)):
        if u % p == 0:
            continue
        red = re_.run_query(p, r + 2, p * u)["reduction"]
        got = (red["type"] if red["type"] == "reducible"
               else "irr%d" % red["induced_exponent"])
        seen.add(got)
        x = Fraction(u) - Fraction(comb(r, 2), u)
        vx = padic_valuation(x.numerator, p) - padic_valuation(
            x.denominator, p)
        want = ("reducible" if vx == t
                else "irr3" if vx < t else "irr7")
        exact = exact and got == want
    ok = seen == {"reducible", "irr3", "irr7"} and exact
    _line(7, ok, "trichotomy at (p=5, r=22): outcomes %s, boundary at "
                 "v(a_p/p - C(r,2)p/a_p) = v(r-2) exact=%s (%.0fs)"
          % (sorted(seen), exact, time.time() - t0))


def test_criterion_8_cross_check_grid():
    t0 = time.time()
    rng = random.Random(123)
    done = 0
    fails = 0
    while done < 50:
        p = rng.choice([5, 7])
        r = rng.randrange(2 * p, 6 * p)
        u = rng.randrange(1, p ** 2)
        if u % p == 0:
            continue
        rep = re_.cross_check(re_.CrystallineParams(p, r + 2, p * u))
        if rep["status"] == "skipped":
            continue
        done += 1
        if rep["status"] != "pass":
            fails += 1
    ok = fails == 0
    _line(8, ok, "cross_check on 50 random grid points: %d failures "
                 "(%.0fs)" % (fails, time.time() - t0))


N_TRIALS = 10_000


def test_criterion_9_property_suites():
    t0 = time.time()
    rng = random.Random(2026)
    primes = [2, 3, 5, 7, 11, 13]

    for _ in range(N_TRIALS):  # p-adic ring laws
        p = rng.choice(primes)
        a, b, c = (Padic.from_int(rng.randrange(-10 ** 6, 10 ** 6), p, 10)
                   for _ in range(3))
        assert ((a + b) + c).congruent(a + (b + c))
        assert (a * b).congruent(b * a)
        assert (a * (b + c)).congruent(a * b + a * c)

    for _ in range(N_TRIALS):  # Teichmuller fixed points
        p = rng.choice(primes)
        x = rng.randrange(1, p)
        w = teichmuller(x, p, 6)
        assert (w ** p).congruent(w) and w.residue() == x

    for _ in range(N_TRIALS):  # Gamma-equivariance of theta-multiplication
        p = rng.choice([3, 5, 7])
        r = rng.randrange(2, 9)
        g = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)])
        if gm.det2(g) % p == 0:
            g = np.eye(2, dtype=np.int64)
        v = np.array([rng.randrange(p) for _ in range(r + 1)])
        lhs = gm.act(g, gm.theta_mul(v, p), p)
        rhs = gm.det2(g) * gm.theta_mul(gm.act(g, v, p), p) % p
        assert np.array_equal(lhs, rhs)

    for _ in range(N_TRIALS):  # Hecke G-equivariance
        p = rng.choice([2, 3])
        r = rng.randrange(2, 5)
        prec = 8
        f = th.CompactTreeFunction(p, r, prec)
        m = rng.randrange(2)
        f.add_term(
            th.VertexRep(rng.randrange(2), m,
                         tuple(rng.randrange(p) for _ in range(m))),
            [rng.randrange(-9, 9) for _ in range(r + 1)],
        )
        while True:
            g = [[rng.randrange(-9, 9) for _ in range(2)] for _ in range(2)]
            if g[0][0] * g[1][1] - g[0][1] * g[1][0]:
                break
        d = th.hecke_T(th.translate(g, f)) - th.translate(g, th.hecke_T(f))
        assert th.min_valuation(d) >= prec - 2

    for _ in range(N_TRIALS):  # canonicalization round trips
        p = rng.choice([2, 3, 5])
        prec = 16
        m = rng.randrange(4)
        rep = th.VertexRep(rng.randrange(2), m,
                           tuple(rng.randrange(p) for _ in range(m)))
        while True:
            a, b, c, d = (rng.randrange(-50, 50) for _ in range(4))
            if (a * d - b * c) % p:
                break
        k = rng.randrange(-2, 3)
        kz = [[Padic.from_int(x, p, prec).shift(k) for x in row]
              for row in ((a, b), (c, d))]
        got, kappa = th.canonicalize(th.mat_mul(rep.matrix(p, prec), kz),
                                     p, prec)
        assert got == rep and th._is_kz(kappa)

    _line(9, True, "5 property suites x %d randomized trials (%.0fs)"
          % (N_TRIALS, time.time() - t0))
