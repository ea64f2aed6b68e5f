import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slope1 import gamma_modules as gm


def test_left_action_composition():
    p, r = 5, 9
    rng = np.random.default_rng(0)
    for _ in range(25):
        g1 = rng.integers(0, p, size=(2, 2))
        g2 = rng.integers(0, p, size=(2, 2))
        if gm.det2(g1) % p == 0 or gm.det2(g2) % p == 0:
            continue
        v = rng.integers(0, p, size=r + 1)
        lhs = gm.act(g1, gm.act(g2, v, p), p)
        rhs = gm.act(g1 @ g2 % p, v, p)
        assert np.array_equal(lhs, rhs)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(2, 12), st.data())
def test_theta_multiplication_is_det_equivariant(p, r, data):
    # theta = X^p Y - X Y^p transforms by the determinant character
    entries = [data.draw(st.integers(0, p - 1)) for _ in range(4)]
    g = np.array(entries).reshape(2, 2)
    if gm.det2(g) % p == 0:
        g = np.eye(2, dtype=int)
    v = np.array([data.draw(st.integers(0, p - 1)) for _ in range(r + 1)])
    lhs = gm.act(g, gm.theta_mul(v, p), p)
    rhs = gm.det2(g) * gm.theta_mul(gm.act(g, v, p), p) % p
    assert np.array_equal(lhs, rhs)


def test_labels_match_expected_table():
    for p, r in [(5, 22), (5, 30), (5, 25), (7, 16), (7, 49), (11, 26)]:
        ps = gm.build_P(p, r)
        assert tuple(ps.labels) == tuple(gm.expected_labels(p, r))
        dims = sum(a + 1 for lab in ps.labels if lab is not None
                   for a in [lab[0]])
        assert ps.dim == dims


def test_filtration_is_nested_and_projection_consistent():
    ps = gm.build_P(5, 22)
    for i in range(2):
        assert ps.W[i].shape[0] <= ps.W[i + 1].shape[0]
    vec = gm.monomial(22, 1) - gm.monomial(22, 5)  # theta * X^(r-p-1)
    w = ps.to_J(vec % 5, 0)
    assert w is not None and np.asarray(w).any()


def test_structural_lemmas_on_spec_points():
    cases = [
        ("a_mod_p", 7, 16), ("goodcasenew_i", 5, 22),
        ("goodcasenew_ii", 5, 30), ("lemmanew", 5, 22),
        ("projection", 5, 22), ("xr_star", 5, 13),
        ("es1_split", 7, 16), ("es1_split_theta", 5, 14),
    ]
    for name, p, r in cases:
        assert gm.verify_structural_lemma(name, p, r)["status"] == "pass"


def test_structural_lemma_rejects_bad_hypotheses():
    with pytest.raises(ValueError):
        gm.verify_structural_lemma("a_mod_p", 5, 13)  # a = 1 out of range


def test_nonstandard_lattice_reduction():
    for p, r in [(5, 8), (5, 16), (7, 12)]:
        rep = gm.nonstandard_lattice_reduction(p, r)
        assert rep["status"] == "pass"
        assert rep["dim_M1"] == p + 1


def test_split_projection_only_for_residue_two():
    ps = gm.build_P(5, 22)
    pr = ps.split_projection()
    vec = gm.monomial(22, 1) - gm.monomial(22, 5)
    out = pr(vec % 5)
    assert np.array_equal(out % 5, gm.monomial(4, 0))
    with pytest.raises(Exception):
        gm.build_P(7, 16).split_projection()
