from hypothesis import given, settings, strategies as st

from slope1.finite_fields import FqElement, smallest_non_residue, solve_monic_quadratic

PRIMES = [3, 5, 7, 11, 13]


def test_smallest_non_residue():
    assert smallest_non_residue(5) == 2
    assert smallest_non_residue(7) == 3
    assert smallest_non_residue(11) == 2


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(PRIMES), st.data())
def test_field_axioms(p, data):
    pick = lambda: FqElement(
        p, data.draw(st.integers(0, p - 1)), data.draw(st.integers(0, p - 1))
    )
    a, b, c = pick(), pick(), pick()
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    if a != FqElement(p, 0):
        assert a * a.inverse() == FqElement(p, 1)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES), st.data())
def test_frobenius_is_p_power(p, data):
    a = FqElement(p, data.draw(st.integers(0, p - 1)),
                  data.draw(st.integers(0, p - 1)))
    assert a.frobenius() == a ** p
    assert a.frobenius().frobenius() == a


def test_quadratic_roots_multiply_to_one():
    for p in [5, 7, 11]:
        for c in range(p):
            r1, r2 = solve_monic_quadratic(p, c)
            one = FqElement(p, 1)
            assert r1 * r2 == one
            assert r1 + r2 == FqElement(p, c)
            # deterministic lexicographic order
            assert (r1.a0, r1.a1) <= (r2.a0, r2.a1)


def test_quadratic_leaves_prime_field_when_discriminant_nonsquare():
    # x^2 - x + 1 over F_5: discriminant -3 = 2 is a non-residue
    r1, r2 = solve_monic_quadratic(5, 1)
    assert r1.a1 != 0 and r2.a1 != 0
    assert r2 == r1.frobenius()
