"""Capped-precision arithmetic in the field of p-adic numbers.

An element is stored as ``p^v * u`` where ``u`` is a unit known modulo
``p^N``; the absolute precision of the element is ``v + N``.  A second
kind of element, "zero to precision ``N``", represents any quantity of
valuation at least ``N``.  Precision only ever shrinks through
arithmetic: sums truncate to the smaller absolute precision, products to
the smaller relative precision.
"""
from __future__ import annotations

from fractions import Fraction


class PrecisionError(ArithmeticError):
    """Raised when a question cannot be decided at the precision carried."""


def is_prime(n: int) -> bool:
    """Trial-division primality test, adequate for single-digit exponents."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def padic_valuation(n: int, p: int) -> int:
    """Exact valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class Padic:
    """One element of Q_p carried at finite precision.

    Attributes:
        p: the prime.
        v: exact valuation, or ``None`` for zero-to-precision.
        unit: the unit part reduced mod ``p^rel`` (0 when ``v is None``).
        abs_prec: absolute precision; the element is known mod ``p^abs_prec``.
    """

    __slots__ = ("p", "v", "unit", "abs_prec")

    def __init__(self, p, v, unit, abs_prec):
        self.p = p
        self.v = v
        self.unit = unit
        self.abs_prec = abs_prec
        if v is None:
            if unit != 0:
                raise ValueError("zero-to-precision element must have unit 0")
        else:
            if abs_prec <= v:
                raise ValueError("relative precision must be positive")
            if unit % p == 0 or not (0 < unit < p ** (abs_prec - v)):
                raise ValueError("unit part must be a reduced unit")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(p, abs_prec):
        """The zero-to-precision element O(p^abs_prec)."""
        return Padic(p, None, 0, abs_prec)

    @staticmethod
    def from_int(n, p, abs_prec):
        """Embed an integer, known mod p^abs_prec."""
        return Padic.from_rational(Fraction(n), p, abs_prec)

    @staticmethod
    def from_rational(q, p, abs_prec):
        """Embed a rational number, truncated to absolute precision abs_prec.

        Accepts a Fraction or an int.  The denominator must be defined at p
        or a ValueError is raised... denominators divisible by p give the
        honest negative valuation.
        """
        q = Fraction(q)
        if q == 0:
            return Padic.zero(p, abs_prec)
        num, den = q.numerator, q.denominator
        v = padic_valuation(num, p) - padic_valuation(den, p)
        if abs_prec <= v:
            return Padic.zero(p, abs_prec)
        rel = abs_prec - v
        mod = p ** rel
        # unit part of q: strip p-powers from numerator and denominator
        num //= p ** max(padic_valuation(num, p), 0)
        den //= p ** max(padic_valuation(den, p), 0)
        unit = num * pow(den, -1, mod) % mod
        return Padic(p, v, unit, abs_prec)

    @staticmethod
    def from_unit_digits(digits, v, p, p_check=None):
        """Build p^v * (d0 + d1*p + ...) from base-p digits, d0 a unit.

        The absolute precision is v + len(digits).
        """
        if not digits:
            raise ValueError("need at least one digit")
        if any(not (0 <= d < p) for d in digits):
            raise ValueError("digits must lie in [0, p)")
        if digits[0] % p == 0:
            raise ValueError("leading digit must be a unit")
        unit = sum(d * p ** i for i, d in enumerate(digits))
        return Padic(p, v, unit, v + len(digits))

    # -- queries -----------------------------------------------------------

    def is_zero_to_precision(self):
        return self.v is None

    def valuation(self):
        """Exact valuation; PrecisionError when only a lower bound is known."""
        if self.v is None:
            raise PrecisionError(
                "valuation undetermined: zero to precision %d" % self.abs_prec
            )
        return self.v

    def valuation_at_least(self, bound):
        """Decide whether val >= bound; PrecisionError if out of range."""
        if self.v is not None:
            return self.v >= bound
        if self.abs_prec >= bound:
            return True
        raise PrecisionError(
            "cannot certify valuation >= %d at precision %d"
            % (bound, self.abs_prec)
        )

    @property
    def rel_prec(self):
        if self.v is None:
            return 0
        return self.abs_prec - self.v

    def residue(self):
        """The image in F_p of a v=0 element (0 for higher valuation)."""
        if self.v is None:
            if self.abs_prec >= 1:
                return 0
            raise PrecisionError("no residue at nonpositive precision")
        if self.v < 0:
            raise ValueError("negative valuation has no residue")
        if self.v > 0:
            if self.abs_prec >= 1:
                return 0
            raise PrecisionError("no residue at nonpositive precision")
        return self.unit % self.p

    def unit_residue(self):
        """Residue of the unit part p^-v * x; requires exact valuation."""
        return self.unit % self.p

    def lift(self):
        """An integer (or Fraction when v < 0) congruent mod p^abs_prec."""
        if self.v is None:
            return 0
        if self.v >= 0:
            return self.unit * self.p ** self.v
        return Fraction(self.unit, self.p ** (-self.v))

    def digits(self):
        """Base-p digits of the unit part, least significant first."""
        if self.v is None:
            raise PrecisionError("zero to precision has no digit expansion")
        u, out = self.unit, []
        for _ in range(self.rel_prec):
            out.append(u % self.p)
            u //= self.p
        return out

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Padic):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            # exact scalars are embedded with generous precision so that
            # the result's precision is governed by self
            if other == 0:
                return None
            extra = self.abs_prec + abs(self.v or 0) + 4
            return Padic.from_rational(other, self.p, extra)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other is None:
            return self
        n_abs = min(self.abs_prec, other.abs_prec)
        if self.v is None and other.v is None:
            return Padic.zero(self.p, n_abs)
        if self.v is None:
            return other._truncate(n_abs)
        if other.v is None:
            return self._truncate(n_abs)
        vmin = min(self.v, other.v)
        if n_abs <= vmin:
            return Padic.zero(self.p, n_abs)
        mod = self.p ** (n_abs - vmin)
        s = (
            self.unit * self.p ** (self.v - vmin)
            + other.unit * other.p ** (other.v - vmin)
        ) % mod
        if s == 0:
            return Padic.zero(self.p, n_abs)
        w = padic_valuation(s, self.p)
        return Padic(self.p, vmin + w, s // self.p ** w, n_abs)

    __radd__ = __add__

    def __neg__(self):
        if self.v is None:
            return self
        mod = self.p ** self.rel_prec
        return Padic(self.p, self.v, (-self.unit) % mod, self.abs_prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other is None:
            return self
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other is None:
            return Padic.zero(self.p, self.abs_prec)  # exact 0: val bound shifts away
        if self.v is None or other.v is None:
            # O(p^a) * (unit p^v): O(p^(a+v)); O(p^a)*O(p^b): O(p^(a+b))
            a = self.abs_prec if self.v is None else self.v
            b = other.abs_prec if other.v is None else other.v
            return Padic.zero(self.p, a + b)
        rel = min(self.rel_prec, other.rel_prec)
        mod = self.p ** rel
        return Padic(
            self.p, self.v + other.v, self.unit * other.unit % mod,
            self.v + other.v + rel,
        )

    __rmul__ = __mul__

    def inverse(self):
        if self.v is None:
            raise PrecisionError("cannot invert zero to precision")
        mod = self.p ** self.rel_prec
        return Padic(
            self.p, -self.v, pow(self.unit, -1, mod), -self.v + self.rel_prec
        )

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other is None:
            raise ZeroDivisionError("division by zero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = Padic.from_int(1, self.p, self.abs_prec + abs(self.v or 0) * k + 2)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, k):
        """Multiply by the exact power p^k (shifts precision window too)."""
        if self.v is None:
            return Padic.zero(self.p, self.abs_prec + k)
        return Padic(self.p, self.v + k, self.unit, self.abs_prec + k)

    def _truncate(self, n_abs):
        if n_abs >= self.abs_prec:
            return self
        if self.v is None or n_abs <= self.v:
            return Padic.zero(self.p, n_abs)
        return Padic(
            self.p, self.v, self.unit % self.p ** (n_abs - self.v), n_abs
        )

    def truncate(self, n_abs):
        """Forget information beyond absolute precision n_abs."""
        return self._truncate(n_abs)

    def congruent(self, other):
        """Whether self - other is zero at the shared precision."""
        d = self - other
        return d.v is None

    def __repr__(self):
        if self.v is None:
            return "O(%d^%d)" % (self.p, self.abs_prec)
        return "%d^%d * (%d mod %d^%d)" % (
            self.p, self.v, self.unit, self.p, self.rel_prec
        )

    def digit_string(self):
        """Serialize as 'v:d0,d1,...' (unit digits least significant first)."""
        return "%d:%s" % (self.v, ",".join(str(d) for d in self.digits()))


def parse_padic(text, p, default_abs_prec=None):
    """Parse 'v:d0,d1,...' digit strings or 'num/den' rationals into a Padic.

    Rational inputs get absolute precision ``default_abs_prec`` (required
    for them); digit strings carry their own precision.
    """
    text = text.strip()
    if ":" in text:
        v_part, d_part = text.split(":", 1)
        v = int(v_part)
        digits = [int(d) for d in d_part.split(",") if d != ""]
        return Padic.from_unit_digits(digits, v, p)
    if default_abs_prec is None:
        raise ValueError("rational input needs a target precision")
    if "/" in text:
        num, den = text.split("/", 1)
        q = Fraction(int(num), int(den))
    else:
        q = Fraction(int(text))
    return Padic.from_rational(q, p, default_abs_prec)


def teichmuller(a, p, abs_prec):
    """The Teichmuller lift of a mod-p residue: the (p-1)-st root of unity
    congruent to it, computed by iterating x -> x^p to its fixed point.

    Returns the exact 0 representative (zero to precision) for a = 0.
    """
    a = a % p
    if a == 0:
        return Padic.zero(p, abs_prec)
    mod = p ** abs_prec
    x = a
    while True:
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return Padic(p, 0, x, abs_prec)


def teichmuller_int(a, p, abs_prec):
    """Integer lift of the Teichmuller representative mod p^abs_prec."""
    a = a % p
    if a == 0:
        return 0
    mod = p ** abs_prec
    x = a
    while True:
        y = pow(x, p, mod)
        if y == x:
            return x
        x = y
