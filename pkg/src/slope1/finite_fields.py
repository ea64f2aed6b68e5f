"""Arithmetic in F_p and its quadratic extension F_{p^2}.

The quadratic extension is realized as F_p(s) with s^2 = n, where n is
the smallest quadratic non-residue mod p.  Elements carry coordinates
(a0, a1) meaning a0 + a1*s, and all deterministic choices (square roots,
quadratic equation roots) break ties by the lexicographic order on
(a0, a1) with representatives in [0, p).
"""
from __future__ import annotations

from .padics import is_prime


def smallest_non_residue(p):
    """The least positive quadratic non-residue mod an odd prime."""
    for n in range(2, p):
        if pow(n, (p - 1) // 2, p) == p - 1:
            return n
    raise ValueError("no non-residue found; p must be an odd prime")


class FqElement:
    """An element of F_{p^2} = F_p(s), s^2 = smallest non-residue."""

    __slots__ = ("p", "a0", "a1", "n")

    def __init__(self, p, a0, a1=0, n=None):
        if not is_prime(p) or p == 2:
            raise ValueError("p must be an odd prime")
        self.p = p
        self.a0 = a0 % p
        self.a1 = a1 % p
        self.n = smallest_non_residue(p) if n is None else n

    def _wrap(self, a0, a1):
        return FqElement(self.p, a0, a1, self.n)

    def _coerce(self, other):
        if isinstance(other, FqElement):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, int):
            return FqElement(self.p, other, 0, self.n)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.a0, self.a1) == (other.a0, other.a1)

    def __hash__(self):
        return hash((self.p, self.a0, self.a1))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._wrap(self.a0 + other.a0, self.a1 + other.a1)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.a0, -self.a1)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a0 = self.a0 * other.a0 + self.n * self.a1 * other.a1
        a1 = self.a0 * other.a1 + self.a1 * other.a0
        return self._wrap(a0, a1)

    __rmul__ = __mul__

    def inverse(self):
        # norm = a0^2 - n*a1^2 lies in F_p and is nonzero for nonzero elements
        norm = (self.a0 * self.a0 - self.n * self.a1 * self.a1) % self.p
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        ninv = pow(norm, -1, self.p)
        return self._wrap(self.a0 * ninv, -self.a1 * ninv)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = FqElement(self.p, 1, 0, self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def frobenius(self):
        """The p-power map, i.e. conjugation s -> -s."""
        return self._wrap(self.a0, -self.a1)

    def is_in_prime_field(self):
        return self.a1 == 0

    def is_zero(self):
        return self.a0 == 0 and self.a1 == 0

    def key(self):
        return (self.a0, self.a1)

    def sqrt(self):
        """Lexicographically smallest square root in F_{p^2}.

        Every element of F_{p^2} whose square lies in F_p is covered by the
        small search spaces below; a general element falls back to a scan.
        """
        if self.is_zero():
            return self._wrap(0, 0)
        candidates = []
        if self.a1 == 0:
            # roots are either in F_p or purely imaginary
            for x in range(self.p):
                if x * x % self.p == self.a0:
                    candidates.append(self._wrap(x, 0))
                if x * x * self.n % self.p == self.a0:
                    candidates.append(self._wrap(0, x))
        else:
            for a0 in range(self.p):
                for a1 in range(self.p):
                    c = self._wrap(a0, a1)
                    if c * c == self:
                        candidates.append(c)
        if not candidates:
            raise ValueError("element is not a square")
        return min(candidates, key=FqElement.key)

    def __repr__(self):
        if self.a1 == 0:
            return "%d" % self.a0
        return "%d+%d*s (s^2=%d)" % (self.a0, self.a1, self.n)


def solve_monic_quadratic(p, c):
    """Both roots of x^2 - c*x + 1 = 0 in F_{p^2}, for c in F_p.

    Returns (lam, lam_inv) with lam*lam_inv = 1; lam is the
    lexicographically smaller root, and a double root is returned twice.
    """
    c = FqElement(p, c) if isinstance(c, int) else c
    two_inv = pow(2, -1, p)
    disc = c * c - 4
    s = disc.sqrt()
    r1 = (c + s) * two_inv
    r2 = (c - s) * two_inv
    lam, other = sorted((r1, r2), key=FqElement.key)
    return lam, other
