"""The Hecke operator on compactly supported functions on the tree.

Elements of the compactly induced representation are finite sums of
terms [g, v] with g a coset representative for KZ\\G (a vertex of the
Bruhat-Tits tree) and v a degree-r symmetric-power vector with
capped-precision p-adic coefficients.  The center acts trivially, so a
KZ matrix acts through its unit part.

The module provides coset canonicalization, translation, the operator
T = T+ + T- in the standard explicit form, integrality bounds, mod-p
reduction composed with the filtration projections, and a replay of the
witness functions (cases W1-W11) whose images after (T - a_p) pin down
the factors of the reduced standard lattice.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, inf

import numpy as np

from . import gamma_modules as gm
from .binomial_identities import construct_alphas, construct_betas
from .gamma_modules import StructureError, residue_class
from .padics import Padic, PrecisionError, padic_valuation, teichmuller


class VertexRep:
    """Canonical coset representative g^side_{m,lambda}.

    side 0 is the upper-triangular family (p^m, lam; 0, 1); side 1 is
    (1, 0; p*lam, p^(m+1)).  The digit list holds the m Teichmuller
    digits of lam as residues in [0, p).
    """

    __slots__ = ("side", "m", "digits")

    def __init__(self, side, m, digits=()):
        digits = tuple(digits)
        if side not in (0, 1) or m < 0 or len(digits) != m:
            raise ValueError("need side in {0,1} and m matching the digits")
        self.side = side
        self.m = m
        self.digits = digits

    def key(self):
        return (self.side, self.m, self.digits)

    def __eq__(self, other):
        return isinstance(other, VertexRep) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def label(self):
        if self.side == 0 and self.m == 0:
            return "Id"
        if self.side == 1 and self.m == 0:
            return "alpha"
        return "g%d[%s]" % (self.side, ",".join(str(d) for d in self.digits))

    def __repr__(self):
        return self.label()

    def lam_lift(self, p, abs_prec):
        """The Teichmuller expansion of lambda as an exact integer."""
        total = 0
        for i, d in enumerate(self.digits):
            if d:
                total += teichmuller(d, p, abs_prec).lift() * p ** i
        return total

    def matrix(self, p, abs_prec):
        """2x2 Padic matrix of the representative."""
        lam = Padic.from_int(self.lam_lift(p, abs_prec), p, abs_prec)
        one = Padic.from_int(1, p, abs_prec)
        zero = Padic.zero(p, abs_prec)
        if self.side == 0:
            return [[one.shift(self.m), lam], [zero, one]]
        return [[one, zero], [lam.shift(1), one.shift(self.m + 1)]]


IDENTITY = VertexRep(0, 0)
ALPHA = VertexRep(1, 0)


def _entry(x, p, abs_prec):
    if isinstance(x, Padic):
        return x
    return Padic.from_rational(Fraction(x), p, abs_prec)


def mat_mul(a, b):
    return [
        [
            a[i][0] * b[0][j] + a[i][1] * b[1][j]
            for j in range(2)
        ]
        for i in range(2)
    ]


def _min_entry_valuation(mat):
    """Exact minimum valuation over the four entries."""
    best = None
    bound = inf
    for row in mat:
        for e in row:
            if e.v is None:
                bound = min(bound, e.abs_prec)
            elif best is None or e.v < best:
                best = e.v
    if best is None:
        raise PrecisionError("matrix is zero to working precision")
    if bound <= best:
        raise PrecisionError("entry precision too low to find the minimum")
    return best


def _rep_inverse(rep, p, abs_prec):
    """Matrix of rep^-1 (exact powers of p enter via shifts)."""
    lam = Padic.from_int(rep.lam_lift(p, abs_prec), p, abs_prec)
    one = Padic.from_int(1, p, abs_prec)
    zero = Padic.zero(p, abs_prec)
    if rep.side == 0:
        # (p^m, lam; 0, 1)^-1 = p^-m (1, -lam; 0, p^m)
        return [[one.shift(-rep.m), (-lam).shift(-rep.m)], [zero, one]]
    # (1, 0; p lam, p^(m+1))^-1 = p^-(m+1) (p^(m+1), 0; -p lam, 1)
    return [
        [one, zero],
        [(-lam).shift(-rep.m), one.shift(-rep.m - 1)],
    ]


def _is_kz(mat):
    """Whether a Padic matrix lies in Z * GL_2(Z_p)."""
    try:
        k = _min_entry_valuation(mat)
    except PrecisionError:
        return False
    det = mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    return det.v is not None and det.v == 2 * k


def _teich_digits(b, p, count):
    """First `count` Teichmuller digits of a p-adic integer."""
    digits = []
    for _ in range(count):
        if b.v is None:
            if b.abs_prec < 1:
                raise PrecisionError("insufficient precision for a digit")
            digits.append(0)
            b = b.shift(-1)
            continue
        d = b.residue()
        digits.append(d)
        if d:
            b = (b - teichmuller(d, p, b.abs_prec + 1)).shift(-1)
        else:
            b = b.shift(-1)
    return tuple(digits)


def canonicalize(g, p=None, abs_prec=20):
    """Canonical coset representative: g = matrix(rep) * kappa, kappa in KZ.

    Accepts a 2x2 matrix with Padic entries (exact rationals and ints are
    coerced).  Raises PrecisionError when a Teichmuller digit cannot be
    decided at the precision carried.
    """
    for row in g:
        for e in row:
            if isinstance(e, Padic):
                p = e.p
    if p is None:
        raise ValueError("prime undetermined; pass p for exact matrices")
    m0 = [[_entry(g[i][j], p, abs_prec) for j in range(2)] for i in range(2)]
    vmin = _min_entry_valuation(m0)
    prim = [[e.shift(-vmin) for e in row] for row in m0]
    bottom_unit = any(
        e.v == 0 for e in prim[1]
    )
    if bottom_unit:
        rep = _canonical_side0(prim, p)
    else:
        # flip to the other half of the tree: w_p^-1 * prim is primitive
        # with a unit bottom row, and w_p g0_{m,lam} = g1_{m,lam} w0
        flipped = [
            [prim[1][0].shift(-1), prim[1][1].shift(-1)],
            [prim[0][0], prim[0][1]],
        ]
        rep0 = _canonical_side0(flipped, p)
        rep = VertexRep(1, rep0.m, rep0.digits)
    prec = max(abs_prec, rep.m + 2)
    kappa = mat_mul(_rep_inverse(rep, p, prec), m0)
    if not _is_kz(kappa):
        raise PrecisionError("coset factor not recognized in KZ")
    return rep, kappa


def _canonical_side0(mat, p):
    """Canonical g0 representative of a primitive matrix with a unit in
    the bottom row, via column reduction to (p^m, b; 0, 1)."""
    c, d = mat[1]
    if d.v == 0:
        u = [[_entry(1, p, d.abs_prec), _entry(0, p, d.abs_prec)],
             [-(c / d), d.inverse()]]
    else:
        u = [[-(d / c), c.inverse()],
             [_entry(1, p, c.abs_prec), _entry(0, p, c.abs_prec)]]
    n = mat_mul(mat, u)
    m = n[0][0].valuation()
    digits = _teich_digits(n[0][1], p, m)
    return VertexRep(0, m, digits)


# ---------------------------------------------------------------------------
# symmetric-power vectors and tree functions


def _conv_step(coeffs, x, y):
    """Multiply a polynomial (coefficient list, leading power of the first
    variable first) by x*X + y*Y."""
    n = len(coeffs)
    out = []
    for k in range(n + 1):
        term = 0
        if k < n:
            term = coeffs[k] * x
        if k > 0:
            term = term + coeffs[k - 1] * y
        out.append(term)
    return out


def sym_act(mat, vec):
    """Action of a 2x2 Padic matrix (a, b; c, d) on a symmetric-power
    vector: F(X, Y) -> F(aX + cY, bX + dY).

    Index i of the vector is the coefficient of X^(r-i) Y^i.
    """
    (a, b), (c, d) = mat
    r = len(vec) - 1
    acc = [vec[0]]
    wpow = [1]
    for i in range(1, r + 1):
        acc = _conv_step(acc, a, c)
        wpow = _conv_step(wpow, b, d)
        acc = [s + vec[i] * w for s, w in zip(acc, wpow)]
    return acc


def kz_act(kappa, vec):
    """Action of a KZ matrix with the center acting trivially."""
    k = _min_entry_valuation(kappa)
    unit_part = [[e.shift(-k) for e in row] for row in kappa]
    return sym_act(unit_part, vec)


def _flip(vec):
    """Action of the Weyl element (0,1;1,0): swap X and Y."""
    return list(reversed(vec))


class CompactTreeFunction:
    """Finite sum of terms [rep, v] with canonical supports."""

    def __init__(self, p, r, prec, terms=None):
        self.p = p
        self.r = r
        self.prec = prec
        self.terms = {}
        for rep, vec in terms or []:
            self.add_term(rep, vec)

    def add_term(self, rep, vec):
        if len(vec) != self.r + 1:
            raise ValueError("vector degree mismatch")
        vec = [_entry(c, self.p, self.prec) for c in vec]
        if rep.key() in self.terms:
            old = self.terms[rep.key()][1]
            vec = [x + y for x, y in zip(old, vec)]
        self.terms[rep.key()] = (rep, vec)

    def __iter__(self):
        return iter(self.terms.values())

    def __add__(self, other):
        out = CompactTreeFunction(self.p, self.r, min(self.prec, other.prec))
        for rep, vec in self:
            out.add_term(rep, vec)
        for rep, vec in other:
            out.add_term(rep, vec)
        return out

    def scale(self, s):
        s = _entry(s, self.p, self.prec + self.r + 4)
        out = CompactTreeFunction(self.p, self.r, self.prec)
        for rep, vec in self:
            out.add_term(rep, [s * c for c in vec])
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def radius(self):
        return max((rep.m for rep, _ in self), default=0)

    def prune(self):
        """Drop terms that are zero to (at least) working precision."""
        keep = {}
        for key, (rep, vec) in self.terms.items():
            if any(c.v is not None for c in vec):
                keep[key] = (rep, vec)
        self.terms = keep
        return self


def translate(g, f, abs_prec=None):
    """Left translation by a group element, supports re-canonicalized."""
    prec = abs_prec or (f.prec + f.r + f.radius() + 6)
    out = CompactTreeFunction(f.p, f.r, f.prec)
    for rep, vec in f:
        m = mat_mul(
            [[_entry(x, f.p, prec) for x in row] for row in g],
            rep.matrix(f.p, prec),
        )
        new_rep, kappa = canonicalize(m, f.p, prec)
        out.add_term(new_rep, kz_act(kappa, vec))
    return out


def _scalar_matrix(p, prec, a, b, c, d):
    return [
        [_entry(a, p, prec), _entry(b, p, prec)],
        [_entry(c, p, prec), _entry(d, p, prec)],
    ]


def hecke_T(f):
    """The Hecke operator T = T+ + T- applied term by term.

    Side-1 supported terms are routed through the exact identity
    g1_{m,lam} = w_p g0_{m,lam} w0 and the G-equivariance of T.
    """
    p, r = f.p, f.r
    out = CompactTreeFunction(p, r, f.prec)
    for rep, vec in f:
        if rep.side == 0:
            for new_rep, new_vec in _t_side0(rep, vec, p, r, f.prec):
                out.add_term(new_rep, new_vec)
        else:
            base = VertexRep(0, rep.m, rep.digits)
            for nr, nv in _t_side0(base, _flip(vec), p, r, f.prec):
                # translate back by w_p: side 0 <-> side 1 at equal radius
                out.add_term(VertexRep(1 - nr.side, nr.m, nr.digits),
                             _flip(nv))
    return out


def _t_side0(rep, vec, p, r, prec):
    """T+ and T- on one side-0 term, yielding canonical (rep, vec) pairs."""
    sprec = prec + r + 6
    pad = Padic.from_int(p, p, sprec)
    results = []
    for lam in range(p):
        tlam = (
            Padic.zero(p, sprec) if lam == 0 else teichmuller(lam, p, sprec)
        )
        mat = [[_entry(1, p, sprec), -tlam], [Padic.zero(p, sprec), pad]]
        results.append(
            (VertexRep(0, rep.m + 1, rep.digits + (lam,)), sym_act(mat, vec))
        )
    if rep.m == 0:
        results.append((ALPHA, [c.shift(r - j) for j, c in enumerate(vec)]))
    else:
        last = rep.digits[-1]
        tgt = VertexRep(0, rep.m - 1, rep.digits[:-1])
        if last == 0:
            results.append((tgt, [c.shift(r - j) for j, c in enumerate(vec)]))
        else:
            delta = teichmuller(last, p, sprec)
            mat = [[pad, delta], [Padic.zero(p, sprec), _entry(1, p, sprec)]]
            results.append((tgt, sym_act(mat, vec)))
    return results


def min_valuation(f):
    """Minimum coefficient valuation; inf for the zero function.

    Raises PrecisionError when a zero-to-precision coefficient could hide
    a smaller valuation than the exact minimum found.
    """
    best = inf
    bound = inf
    for _, vec in f:
        for c in vec:
            if c.v is None:
                bound = min(bound, c.abs_prec)
            else:
                best = min(best, c.v)
    if best is inf:
        return inf if bound is inf else bound
    if bound <= best:
        raise PrecisionError(
            "minimum valuation undecidable: exact %s, hidden bound %s"
            % (best, bound)
        )
    return best


def is_integral(f):
    """Whether every coefficient has valuation >= 0."""
    for _, vec in f:
        for c in vec:
            if c.v is None:
                if c.abs_prec < 0:
                    raise PrecisionError("cannot certify integrality")
            elif c.v < 0:
                return False
    return True


def reduce_and_project(f, pstruct, i=None, projector=None):
    """Reduce an integral function mod p and project each coefficient.

    With i = None the image is taken in P; otherwise in the model of the
    graded piece J_i (raising StructureError when some coefficient's
    image in P falls outside W_i).  A custom projector function (vector
    mod p -> model coordinates or None) overrides both.
    """
    if not is_integral(f):
        raise ValueError("function is not integral")
    p = f.p
    out = {}
    for rep, vec in f:
        resid = np.array([c.residue() for c in vec], dtype=np.int64)
        if not resid.any():
            continue
        if projector is not None:
            w = projector(resid)
        elif i is None:
            w = pstruct.project(resid)
        else:
            w = pstruct.to_J(resid, i)
        if w is None:
            raise StructureError(
                "image of the coefficient at %s is outside the filtration "
                "step" % rep.label()
            )
        if not np.asarray(w).any():
            continue
        key = rep.key()
        if key in out:
            w = (out[key][1] + w) % p
        out[key] = (rep, np.asarray(w) % p)
    return {k: v for k, v in out.items() if v[1].any()}


# ---------------------------------------------------------------------------
# witness functions

WITNESS_CASES = (
    "W1", "W2", "W3", "W4", "W5", "W6", "W7", "W8", "W9", "W10", "W11",
)


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def _sc(p, prec, q):
    return Padic.from_rational(Fraction(q), p, prec)


def _vec_of(p, r, prec, entries):
    """Symmetric-power vector from a {index j: coefficient} dict."""
    vec = [Padic.zero(p, prec) for _ in range(r + 1)]
    for j, c in entries.items():
        vec[j] = _entry(c, p, prec)
    return vec


def _model_x_power(dim_a, k=None):
    """Model coordinates of X^k Y^(a-k) (default: the full power X^a)."""
    if k is None:
        k = dim_a
    return gm.monomial(dim_a, dim_a - k)


def _g0(m, digits):
    return VertexRep(0, m, digits)


def _chi_terms(p, r, ap, prec, t, lead_digits, scalar):
    """Terms of scalar * chi translated by g0 with the given digits:
    sum over l of ap^l [g0_{len+l, digits+0s}, Y^r - X^(r-2) Y^2]."""
    base = _vec_of(p, r, prec, {r: 1, 2: -1})
    out = []
    apow = _entry(1, p, prec)
    for ell in range(t + 1):
        s = scalar * apow
        rep = _g0(len(lead_digits) + ell, lead_digits + (0,) * ell)
        out.append((rep, [s * c for c in base]))
        apow = apow * ap
    return out


def _common_checks(p, r, ap, amin=None, amax=None):
    _require(ap.valuation() == 1, "requires a_p of valuation exactly 1")
    a = residue_class(r, p)
    if amin is not None:
        _require(amin <= a <= amax,
                 "requires r mod (p-1) in [%d, %d], got %d" % (amin, amax, a))
    return a


def _case_W1(p, r, ap, prec, pstruct):
    a = _common_checks(p, r, ap, 3, p - 1)
    _require(r > 2 * p, "requires r > 2p")
    inv_ap = ap.inverse()
    f = CompactTreeFunction(p, r, prec)
    f.add_term(IDENTITY, _vec_of(p, r, prec,
                                 {a + p - 2: inv_ap, a - 1: -inv_ap}))
    exp = {IDENTITY.key(): (IDENTITY, _model_x_power(p - a + 1))}
    return {"f": f, "mode": "J", "i": 1, "expected": exp,
            "generate": [(1, _model_x_power(p - a + 1))]}


def _case_W2(p, r, ap, prec, pstruct):
    a = _common_checks(p, r, ap, 3, p - 1)
    _require(r > 2 * p, "requires r > 2p")
    _require((r - a) % p != 0, "requires p not dividing r - a")
    f = CompactTreeFunction(p, r, prec)
    f.add_term(IDENTITY, _vec_of(p, r, prec,
                                 {1: Fraction(1, p), p: Fraction(-1, p)}))
    c1 = Fraction(a - r, a)
    vmodel = _model_x_power(a - 2)
    exp = {}
    for lam in range(p):
        rep = _g0(1, (lam,))
        exp[rep.key()] = (rep, _frac_res(c1, p) * vmodel % p)
    exp[IDENTITY.key()] = (IDENTITY, (-ap.shift(-1).residue()) * vmodel % p)
    return {"f": f, "mode": "J", "i": 0, "expected": exp, "generate": []}


def _case_W3(p, r, ap, prec, pstruct):
    a = _common_checks(p, r, ap, 3, p - 1)
    _require(r > 2 * p and p >= 5, "requires r > 2p and p >= 5")
    _require((r - a) % p != 0, "requires p not dividing r - a")
    alphas = construct_alphas(p, r, "comb2")
    _require(alphas["status"] == "pass", "alpha family failed verification")
    f = CompactTreeFunction(p, r, prec)
    vec2 = _vec_of(p, r, prec,
                   {r: Fraction(1, p), r - p + 1: Fraction(-1, p)})
    for lam in range(p):
        f.add_term(_g0(2, (0, lam)), vec2)
    s1 = _sc(p, prec, p - 1) / (ap.shift(1))
    f.add_term(_g0(1, (0,)), _vec_of(p, r, prec, {
        j: s1 * _sc(p, prec, v)
        for j, v in zip(alphas["index_set"], alphas["values"])
    }))
    if a == p - 1:
        f.add_term(IDENTITY, _vec_of(p, r, prec, {
            0: Fraction(1 - p, p), p - 1: Fraction(p - 1, p)
        }))
    vmodel = _model_x_power(p - a - 1)
    apbar = ap.shift(-1).residue()
    exp = {}
    for lam in range(p):
        rep = _g0(2, (0, lam))
        exp[rep.key()] = (rep, apbar * vmodel % p)
    rep = _g0(1, (0,))
    exp[rep.key()] = (rep, _frac_res(Fraction(r - a, a), p) * vmodel % p)
    if a == p - 1:
        exp[IDENTITY.key()] = (IDENTITY, apbar * _model_x_power(0) % p)
    return {"f": f, "mode": "J", "i": 2, "expected": exp, "generate": []}


def _case_W4(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 1, 1)
    _require(r > 2 * p, "requires r > 2p")
    f = CompactTreeFunction(p, r, prec)
    f.add_term(IDENTITY, _vec_of(p, r, prec, {
        r - 1: Fraction(1, p), r - p: Fraction(-2, p),
        r - 2 * p + 1: Fraction(1, p),
    }))
    vmodel = (p - 1) * _model_x_power(p - 2, 0) % p
    exp = {ALPHA.key(): (ALPHA, vmodel)}
    return {"f": f, "mode": "J", "i": 2, "expected": exp,
            "generate": [(2, vmodel)]}


def _case_W5(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 1, 1)
    _require(r > 2 * p and r % p == 0, "requires r > 2p and p | r")
    betas = construct_betas(p, r)
    _require(betas["status"] == "pass", "beta family failed verification")
    inv_ap = ap.inverse()
    f = CompactTreeFunction(p, r, prec)
    base2 = _vec_of(p, r, prec, {r: inv_ap, p: -inv_ap})
    for lam in range(1, p):
        tl = teichmuller(lam, p, prec) ** (p - 2)
        f.add_term(_g0(2, (0, lam)), [tl * c for c in base2])
    s0 = _sc(p, prec, 1 - p) * inv_ap
    f.add_term(_g0(2, (0, 0)), _vec_of(p, r, prec, {
        r - 1: s0, p - 1: -s0,
    }))
    sb = _sc(p, prec, p - 1) * inv_ap * inv_ap
    v1 = {r - p: Fraction(1, p), r - 1: Fraction(-1, p)}
    for j, v in zip(betas["index_set"], betas["values"]):
        extra = sb * _sc(p, prec, v)
        v1[j] = extra + _entry(v1.get(j, 0), p, prec)
    f.add_term(_g0(1, (0,)), _vec_of(p, r, prec, v1))
    f.add_term(IDENTITY, _vec_of(p, r, prec, {0: s0, r - p: -s0}))
    vmodel = (p - 1) * _model_x_power(1) % p
    rep = _g0(2, (0, 0))
    exp = {rep.key(): (rep, vmodel)}
    return {"f": f, "mode": "J", "i": 1, "expected": exp,
            "generate": [(1, vmodel)]}


def _case_W6(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 1, 1)
    _require(r > 2 * p and r % p == 0, "requires r > 2p and p | r")
    alphas = construct_alphas(p, r, "comb6")
    _require(alphas["status"] == "pass", "alpha family failed verification")
    inv_ap = ap.inverse()
    f = CompactTreeFunction(p, r, prec)
    vec2 = _vec_of(p, r, prec, {r: inv_ap, p: -inv_ap})
    for lam in range(p):
        for mu in range(p):
            f.add_term(_g0(2, (lam, mu)), vec2)
    sa = _sc(p, prec, p - 1) * inv_ap * inv_ap
    v1 = {1: Fraction(-1, p), p: Fraction(1, p)}
    for j, v in zip(alphas["index_set"], alphas["values"]):
        extra = sa * _sc(p, prec, v)
        v1[j] = extra + _entry(v1.get(j, 0), p, prec)
    vec1 = _vec_of(p, r, prec, v1)
    for lam in range(p):
        f.add_term(_g0(1, (lam,)), vec1)
    s0 = _sc(p, prec, 1 - p) * inv_ap
    f.add_term(IDENTITY, _vec_of(p, r, prec, {1: s0, p: -s0}))
    vmodel = _model_x_power(p - 2)
    cbar = (ap.shift(-1) - _sc(p, prec, r - p) * inv_ap).residue()
    exp = {}
    for lam in range(p):
        for mu in range(p):
            rep = _g0(2, (lam, mu))
            exp[rep.key()] = (rep, (p - 1) * vmodel % p)
    for lam in range(p):
        rep = _g0(1, (lam,))
        exp[rep.key()] = (rep, cbar * vmodel % p)
    exp[IDENTITY.key()] = (IDENTITY, (p - 1) * vmodel % p)
    return {"f": f, "mode": "J", "i": 0, "expected": exp, "generate": []}


def _a2_invariants(p, r, ap, prec):
    """t = v(r-2), c = (ap^2 - C(r,2) p^2)/(p ap), tau = v(c)."""
    t = padic_valuation(r - 2, p)
    c = (ap * ap - _sc(p, prec, comb(r, 2)).shift(2)) / ap.shift(1)
    return t, c, c.valuation()


def _case_W7(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 2, 2)
    _require(p > 3 and r >= 2 * p, "requires p > 3 and r >= 2p")
    t, c, tau = _a2_invariants(p, r, ap, prec)
    t0 = min(tau, t)
    one = _entry(1, p, prec)
    f = CompactTreeFunction(p, r, prec, _chi_terms(p, r, ap, prec, t, (), one))
    return {"f": f, "mode": "bound", "t": t, "tau": tau, "t0": t0}


def _case_W8(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 2, 2)
    _require(p > 3 and r >= 2 * p, "requires p > 3 and r >= 2p")
    t, c, tau = _a2_invariants(p, r, ap, prec)
    _require(t <= tau, "requires v(r-2) <= v(ap^2/p/ap - ...)"
             " (the non-generic branch)")
    s0 = _sc(p, prec, Fraction(p - 1, 1)) / (ap.shift(1) * _sc(p, prec, 2 - r))
    entries = {
        j: s0 * _sc(p, prec, comb(r, j))
        for j in range(1, r) if j % (p - 1) == 2 % (p - 1)
    }
    entries[2] = entries[2] + s0 * _sc(p, prec, Fraction(p * (r - 2), 2))
    f = CompactTreeFunction(p, r, prec)
    f.add_term(IDENTITY, _vec_of(p, r, prec, entries))
    sinf = (_sc(p, prec, Fraction(1, 2 - r))).shift(-1)
    for lam in range(1, p):
        for rep, vec in _chi_terms(p, r, ap, prec, t, (lam,), sinf):
            f.add_term(rep, vec)
    for rep, vec in _chi_terms(p, r, ap, prec, t, (0,),
                               sinf * _sc(p, prec, 1 - p)):
        f.add_term(rep, vec)
    vmodel = _model_x_power(p - 3)
    ubar = (c / _sc(p, prec, 2 - r)).residue()
    exp = {}
    for lam in range(p):
        rep = _g0(1, (lam,))
        exp[rep.key()] = (rep, ubar * vmodel % p)
    half = pow(2, -1, p)
    exp[IDENTITY.key()] = (IDENTITY, (p - half) * vmodel % p)
    return {"f": f, "mode": "J", "i": 2, "expected": exp, "generate": []}


def _case_W9(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 2, 2)
    _require(p > 3 and r > 2 * p, "requires p > 3 and r > 2p")
    inv_ap = ap.inverse()
    f = CompactTreeFunction(p, r, prec)
    vzero = _model_x_power(0)
    if r % p == 0:
        f.add_term(IDENTITY, _vec_of(p, r, prec,
                                     {p: inv_ap, 2 * p - 1: -inv_ap}))
        vmodel = (p - 1) * vzero % p
        exp = {IDENTITY.key(): (IDENTITY, vmodel)}
        return {"f": f, "mode": "J", "i": 1, "expected": exp,
                "generate": [(1, vmodel)]}
    s = _sc(p, prec, Fraction(-r, 2)) * inv_ap
    f.add_term(IDENTITY, _vec_of(p, r, prec, {
        1: s, p: _sc(p, prec, -2) * s, 2 * p - 1: s,
    }))
    f.add_term(_g0(1, (0,)), _vec_of(p, r, prec, {
        1: Fraction(1, p), p: Fraction(-1, p),
    }))
    half_r = _frac_res(Fraction(r, 2), p)
    mid = (_sc(p, prec, Fraction(r * r, 4)) * inv_ap.shift(1)).residue()
    exp = {IDENTITY.key(): (IDENTITY, (-half_r) % p * vzero % p)}
    rep = _g0(1, (0,))
    exp[rep.key()] = (rep, mid * vzero % p)
    for lam in range(p):
        rep = _g0(2, (0, lam))
        exp[rep.key()] = (rep, (-half_r) % p * vzero % p)
    return {"f": f, "mode": "J", "i": 1, "expected": exp, "generate": []}


def _case_W10(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 2, 2)
    _require(p > 3 and r >= 2 * p, "requires p > 3 and r >= 2p")
    t, c, tau = _a2_invariants(p, r, ap, prec)
    _require(tau <= t, "requires v(c) <= v(r-2) (the generic branch)")
    inv_c = c.inverse()
    inv_ap = ap.inverse()
    f = CompactTreeFunction(p, r, prec)
    # block at the identity: combination of X^(r-1)Y, the inner binomial
    # sum with C(r-1, j) weights, and X^(r-p) Y^p
    sA = _sc(p, prec, 1 - p).shift(-1) * inv_c
    sB = _sc(p, prec, Fraction((1 - p) * r, 2)).shift(1) \
        * inv_ap * inv_ap * inv_c
    sC = _sc(p, prec, p - 1) * inv_ap
    v0 = {1: sA, p: sC}
    for j in range(2, r - 1):
        if j % (p - 1) == 1 % (p - 1):
            cur = _entry(v0.get(j, 0), p, prec)
            v0[j] = cur + sB * _sc(p, prec, comb(r - 1, j))
    f.add_term(IDENTITY, _vec_of(p, r, prec, v0))
    s1 = _sc(p, prec, Fraction(-1, 2)) * inv_ap * inv_c
    phi = {p: _sc(p, prec, r - 2)}
    for j in range(2, r):
        if j % (p - 1) == 1 % (p - 1):
            cur = _entry(phi.get(j, 0), p, prec)
            phi[j] = cur + _sc(p, prec, comb(r, j))
    for lam in range(p):
        s = s1 * _sc(p, prec, 1 - p) if lam == 0 else s1
        f.add_term(_g0(1, (lam,)), _vec_of(p, r, prec,
                                           {j: s * v for j, v in phi.items()}))
    sinf = _sc(p, prec, Fraction(1, 2)) * inv_c
    for lam in range(p):
        s = sinf if lam == 0 else sinf * _sc(p, prec, Fraction(1, 1 - p))
        for mu in range(1, p):
            smu = s * teichmuller(mu, p, prec).inverse()
            for rep, vec in _chi_terms(p, r, ap, prec, t, (lam, mu), smu):
                f.add_term(rep, vec)
    vmodel = _model_x_power(p - 1)
    ebar = (_sc(p, prec, Fraction(2 - r, 2)) * inv_c).residue()
    exp = {}
    for lam in range(p):
        rep = _g0(1, (lam,))
        exp[rep.key()] = (rep, ebar * vmodel % p)
    exp[IDENTITY.key()] = (IDENTITY, (p - 1) * vmodel % p)
    return {"f": f, "mode": "J", "i": 0, "expected": exp, "generate": []}


def _case_W11(p, r, ap, prec, pstruct):
    _common_checks(p, r, ap, 2, 2)
    _require(p > 3 and r > 2 * p, "requires p > 3 and r > 2p")
    f = CompactTreeFunction(p, r, prec)
    f.add_term(IDENTITY, _vec_of(p, r, prec, {
        1: Fraction(1, p), p: Fraction(-1, p),
    }))
    vmodel = _model_x_power(p - 1)
    apbar = ap.shift(-1).residue()
    exp = {IDENTITY.key(): (IDENTITY, (-apbar) % p * vmodel % p)}
    for lam in range(p):
        rep = _g0(1, (lam,))
        exp[rep.key()] = (rep, (1 - r) % p * vmodel % p)
    return {"f": f, "mode": "split", "expected": exp, "generate": []}


def _frac_res(q, p):
    q = Fraction(q)
    return q.numerator * pow(q.denominator, -1, p) % p


_CASES = {
    "W1": _case_W1, "W2": _case_W2, "W3": _case_W3, "W4": _case_W4,
    "W5": _case_W5, "W6": _case_W6, "W7": _case_W7, "W8": _case_W8,
    "W9": _case_W9, "W10": _case_W10, "W11": _case_W11,
}


def _base_precision(p, r):
    if residue_class(r, p) == 2 and r > 2:
        return padic_valuation(r - 2, p) + 6
    return 6


def _as_padic_ap(ap, p, prec):
    if isinstance(ap, Padic):
        return ap
    return Padic.from_rational(Fraction(ap), p, prec + 8)


def build_witness(case, p, r, ap, precision=None):
    """The witness function f for one case, hypotheses validated."""
    if case not in _CASES:
        raise ValueError("unknown witness case %r" % (case,))
    prec = precision or _base_precision(p, r)
    pstruct = gm.build_P(p, r)
    data = _CASES[case](p, r, _as_padic_ap(ap, p, prec), prec, pstruct)
    return data["f"]


def _bound_report(F, data, p, r):
    """Structure of the telescoped error term (case W7).

    The error must equal p^(t+1) h + O(p^(t0+2)) with h an integral
    combination of translates of X^r and X^(r-1) Y.  When tau < t the
    leading part is absorbed and the whole error vanishes to order
    t0 + 2; otherwise every coefficient has valuation >= t + 1 and its
    (t+1)-st digit vector lies in the submodule generated by X^r and
    X^(r-1) Y mod p.
    """
    t, t0, tau = data["t"], data["t0"], data["tau"]
    failures = []
    if tau < t:
        for rep, vec in F:
            for j, coeff in enumerate(vec):
                if not coeff.valuation_at_least(t0 + 2):
                    failures.append(
                        {"vertex": rep.label(), "index": j,
                         "valuation": coeff.valuation(),
                         "required": t0 + 2}
                    )
        return failures
    head = gm.gamma_closure([gm.monomial(r, 0), gm.monomial(r, 1)], p)
    for rep, vec in F:
        if not all(c.valuation_at_least(t + 1) for c in vec):
            failures.append(
                {"vertex": rep.label(),
                 "valuation": min_valuation(
                     CompactTreeFunction(p, r, F.prec, [(rep, vec)])),
                 "required": t + 1}
            )
            continue
        digit = np.array(
            [c.shift(-(t + 1)).residue() for c in vec], dtype=np.int64
        )
        if digit.any() and not head.contains(digit):
            failures.append(
                {"vertex": rep.label(),
                 "detail": "leading digit outside the span of the "
                           "translates of X^r and X^(r-1)Y"}
            )
    return failures


def verify_witness(case, p, r, ap, precision=None):
    """Replay one witness computation and compare with its claimed image.

    Returns a report dict; raises ValueError when the case hypotheses are
    violated and PrecisionError when even the raised working precision
    cannot settle the result.
    """
    if case not in _CASES:
        raise ValueError("unknown witness case %r" % (case,))
    base = precision or _base_precision(p, r)
    pstruct = gm.build_P(p, r)
    last_err = None
    for attempt in range(4):
        prec = base * (2 ** attempt)
        try:
            return _verify_once(case, p, r, ap, prec, pstruct)
        except PrecisionError as err:
            if isinstance(ap, Padic):
                raise
            last_err = err
    raise last_err


def _verify_once(case, p, r, ap, prec, pstruct):
    ap_p = _as_padic_ap(ap, p, prec)
    data = _CASES[case](p, r, ap_p, prec, pstruct)
    f = data["f"]
    F = (hecke_T(f) + f.scale(-ap_p)).prune()
    report = {
        "case": case, "p": p, "r": r,
        "ap": ap.digit_string() if isinstance(ap, Padic) else str(ap),
        "precision_used": prec,
    }
    if data["mode"] == "bound":
        E = F - CompactTreeFunction(p, r, prec, [
            (ALPHA, _vec_of(p, r, prec, {r: 1})),
            (IDENTITY, _vec_of(p, r, prec, {2: ap_p})),
        ])
        E.prune()
        failures = _bound_report(E, data, p, r)
        minv = min_valuation(E)
        report.update({
            "integral": bool(is_integral(F)),
            "min_valuation": None if minv == inf else minv,
            "image": [],
            "detail": {"t": data["t"], "tau": data["tau"],
                       "t0": data["t0"], "bound_failures": failures},
            "matches_claim": not failures,
        })
        return report
    minv = min_valuation(F)
    integral = minv == inf or minv >= 0
    report["integral"] = bool(integral)
    report["min_valuation"] = None if minv == inf else minv
    if not integral:
        report["image"] = []
        report["matches_claim"] = False
        report["detail"] = "function is not integral"
        return report
    if data["mode"] == "split":
        jh = "J0 (splitting of W1)"
        image = reduce_and_project(F, pstruct,
                                   projector=pstruct.split_projection())
    else:
        jh = "J%d" % data["i"]
        image = reduce_and_project(F, pstruct, i=data["i"])
    expected = {k: (rep, v % p) for k, (rep, v) in data["expected"].items()}
    expected = {k: tv for k, tv in expected.items() if tv[1].any()}
    matches = set(image) == set(expected) and all(
        np.array_equal(image[k][1], expected[k][1]) for k in image
    )
    for i_model, vec in data.get("generate", []):
        am, tw = pstruct.labels[i_model]
        module = gm.FpModule.standard(p, am, tw)
        if module.closure([vec]).shape[0] != am + 1:
            matches = False
            report["detail"] = "image fails to generate the graded piece"
    report["image"] = [
        {"vertex": rep.label(), "jh_component": jh,
         "vector": [int(x) for x in vec]}
        for rep, vec in sorted(image.values(), key=lambda t: t[0].key())
    ]
    report["matches_claim"] = bool(matches)
    if not matches and "detail" not in report:
        report["detail"] = {
            "expected": [
                {"vertex": rep.label(), "vector": [int(x) for x in vec]}
                for rep, vec in sorted(expected.values(),
                                       key=lambda t: t[0].key())
            ]
        }
    return report
