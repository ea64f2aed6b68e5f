import random
from fractions import Fraction

import numpy as np
import pytest

from slope1 import gamma_modules as gm
from slope1 import tree_hecke as th
from slope1.padics import Padic, PrecisionError


def rand_kz(p, prec, rng):
    while True:
        a, b, c, d = (rng.randrange(-200, 200) for _ in range(4))
        if (a * d - b * c) % p:
            break
    k = rng.randrange(-2, 3)
    return [[Padic.from_int(x, p, prec).shift(k) for x in row]
            for row in ((a, b), (c, d))]


def rand_ctf(p, r, prec, rng, nterms=3, radius=2):
    f = th.CompactTreeFunction(p, r, prec)
    for _ in range(nterms):
        side = rng.randrange(2)
        m = rng.randrange(radius + 1)
        digits = tuple(rng.randrange(p) for _ in range(m))
        f.add_term(th.VertexRep(side, m, digits),
                   [rng.randrange(-20, 20) for _ in range(r + 1)])
    return f


def test_canonicalize_round_trip():
    rng = random.Random(0)
    p, prec = 5, 20
    for _ in range(200):
        side = rng.randrange(2)
        m = rng.randrange(4)
        rep = th.VertexRep(side, m, tuple(rng.randrange(p) for _ in range(m)))
        g = th.mat_mul(rep.matrix(p, prec), rand_kz(p, prec, rng))
        rep2, kappa = th.canonicalize(g, p, prec)
        assert rep2 == rep
        assert th._is_kz(kappa)


def test_canonicalize_identity_and_alpha():
    p = 5
    rep, _ = th.canonicalize([[1, 0], [0, 1]], p)
    assert rep == th.IDENTITY
    rep, _ = th.canonicalize([[1, 0], [0, p]], p)
    assert rep == th.ALPHA


def test_sym_act_matches_direct_substitution():
    p, r, prec = 5, 4, 16
    mat = [[Padic.from_int(2, p, prec), Padic.from_int(1, p, prec)],
           [Padic.from_int(3, p, prec), Padic.from_int(1, p, prec)]]
    vec = [Padic.from_int(c, p, prec) for c in (1, 0, 0, 0, 0)]  # X^4
    out = th.sym_act(mat, vec)  # (2X + 3Y)^4
    expect = [16, 96, 216, 216, 81]
    for got, want in zip(out, expect):
        assert got.congruent(Padic.from_int(want, p, prec))


def test_hecke_equivariance_under_translation():
    rng = random.Random(1)
    p, r, prec = 5, 8, 14
    for _ in range(15):
        f = rand_ctf(p, r, prec, rng)
        while True:
            g = [[rng.randrange(-30, 30) for _ in range(2)] for _ in range(2)]
            if g[0][0] * g[1][1] - g[0][1] * g[1][0]:
                break
        diff = th.hecke_T(th.translate(g, f)) - th.translate(g, th.hecke_T(f))
        assert th.min_valuation(diff) >= prec - 1


def test_support_radius_grows_by_at_most_one():
    rng = random.Random(2)
    for _ in range(10):
        f = rand_ctf(5, 6, 12, rng)
        assert th.hecke_T(f).radius() <= f.radius() + 1


def test_t_minus_on_identity_support():
    # T of [Id, Y^r] contributes [alpha, p^0 Y^r] on the inner vertex
    p, r, prec = 5, 6, 12
    f = th.CompactTreeFunction(p, r, prec)
    f.add_term(th.IDENTITY, [0] * r + [1])
    out = th.hecke_T(f)
    _, vec = out.terms[th.ALPHA.key()]
    assert vec[r].congruent(Padic.from_int(1, p, prec))
    assert all(vec[j].v is None or vec[j].v >= prec - 1 for j in range(r))


def test_min_valuation_detects_hidden_coefficients():
    p, r = 5, 4
    f = th.CompactTreeFunction(p, r, 3)
    f.add_term(th.IDENTITY, [Padic.zero(5, 2)] + [0] * r)
    g = th.CompactTreeFunction(p, r, 8)
    g.add_term(th.ALPHA, [Padic.from_int(125, 5, 8)] + [0] * r)
    with pytest.raises(PrecisionError):
        th.min_valuation(f + g)


def test_reduce_and_project_requires_integrality():
    p, r = 5, 22
    ps = gm.build_P(p, r)
    f = th.CompactTreeFunction(p, r, 8)
    f.add_term(th.IDENTITY, [Fraction(1, 5)] + [0] * r)
    with pytest.raises(ValueError):
        th.reduce_and_project(f, ps)


def test_build_witness_validates_hypotheses():
    with pytest.raises(ValueError):
        th.build_witness("W1", 5, 13, 5)  # a = 1 is outside [3, p-1]
    with pytest.raises(ValueError):
        th.build_witness("W4", 5, 22, 25)  # slope 2
    with pytest.raises(ValueError):
        th.build_witness("bogus", 5, 22, 5)


def test_witness_support_shapes():
    f = th.build_witness("W2", 7, 16, 21)
    assert len(f.terms) == 1
    (_, vec), = f.terms.values()
    assert vec[1].valuation() == -1 and vec[7].valuation() == -1
    chi = th.build_witness("W7", 5, 10, 5)  # t = 0: single chi term
    assert len(chi.terms) == 1
    f10 = th.build_witness("W10", 5, 22, 5)
    assert f10.radius() == 2 + 1  # chi translated to radius 2, t = 1


def test_witness_spot_checks():
    points = [
        ("W1", 7, 16, 21), ("W2", 7, 16, 21), ("W4", 5, 13, 5),
        ("W9", 5, 30, 5), ("W9", 5, 22, 5), ("W11", 5, 22, 5),
        ("W7", 5, 10, 5),
    ]
    for case, p, r, ap in points:
        rep = th.verify_witness(case, p, r, ap)
        assert rep["integral"], (case, p, r, ap)
        assert rep["matches_claim"], (case, p, r, ap)


def test_witness_report_shape():
    rep = th.verify_witness("W1", 7, 16, 21)
    assert rep["case"] == "W1"
    assert rep["image"][0]["vertex"] == "Id"
    assert rep["image"][0]["jh_component"] == "J1"
    assert rep["min_valuation"] == 0
