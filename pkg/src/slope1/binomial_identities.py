"""Exact verification of the binomial congruence identities.

Every verifier recomputes both sides of a congruence from exact big
integers (fractions with unit denominators are cleared modularly); the
constructive solvers for the coefficient families are always checked
post hoc by the same exact path, never trusted.

Identity families, by their short names used in lemma_id fields:

* ``comb1``: the sum S_r of C(r,j) over 0 < j < r, j = a mod (p-1),
  vanishes mod p, and S_r/p = (a-r)/a mod p.
* ``comb2`` / ``comb6``: existence of integer families alpha_j congruent
  to C(r,j) mod p with prescribed weighted sums mod p^(3-n).
* ``comb3_i``: the sum T_r of C(r,j) over 0 < j < r-1, j = b-1 mod (p-1),
  equals b - r mod p.
* ``comb3_ii``: existence of beta_j, as for comb2 but with n = 0, 1, 2.
* ``congruences1`` / ``congruences2``: valuation bounds on p^i * C(s,i).
* ``ppower``: (1 + pX)^(p^t) = 1 + p^(t+1) X mod p^(t+2).
* ``congrbinom1/2/12``: weighted binomial sums over a congruence class
  of j, evaluated mod p^(t+2), p^(t+1), p^(t+3-i).
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from .padics import is_prime, padic_valuation


def binomial_exact(n, k):
    """Exact binomial coefficient; 0 when k lies outside [0, n]."""
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def _frac_mod(q, m):
    """Reduce a Fraction (or int) with unit denominator modulo m."""
    q = Fraction(q)
    return q.numerator * pow(q.denominator, -1, m) % m


def _part(label, lhs, rhs, modulus):
    """One checked congruence: lhs = rhs mod modulus, sides exact."""
    l = _frac_mod(lhs, modulus)
    r = _frac_mod(rhs, modulus)
    return {
        "part": label,
        "lhs": l,
        "rhs": r,
        "modulus": modulus,
        "status": "pass" if l == r else "fail",
    }


def _report(lemma_id, parameters, parts):
    status = "pass" if all(q["status"] == "pass" for q in parts) else "fail"
    rep = {"lemma_id": lemma_id, "parameters": parameters, "parts": parts,
           "status": status}
    if len(parts) == 1:
        rep.update({k: parts[0][k] for k in ("lhs", "rhs", "modulus")})
    return rep


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def verify_comb1(p, r):
    """S_r = 0 mod p and S_r/p = (a-r)/a mod p, r = a mod (p-1)."""
    _require(is_prime(p) and p > 2, "p must be an odd prime")
    _require(r >= 1, "requires r >= 1")
    a = (r - 1) % (p - 1) + 1
    s = sum(comb(r, j) for j in range(1, r) if j % (p - 1) == a % (p - 1))
    parts = [_part("S_r mod p", s, 0, p)]
    if s % p == 0:
        parts.append(_part("S_r/p mod p", s // p, Fraction(a - r, a), p))
    return _report("comb1", {"p": p, "r": r, "a": a}, parts)


def verify_comb3_i(p, r):
    """T_r = b - r mod p for r = b mod (p-1), 2 <= b <= p."""
    _require(is_prime(p) and p > 2, "p must be an odd prime")
    _require(r >= 2, "requires r >= 2")
    b = (r - 2) % (p - 1) + 2
    t = sum(
        comb(r, j) for j in range(1, r - 1) if j % (p - 1) == (b - 1) % (p - 1)
    )
    return _report(
        "comb3_i", {"p": p, "r": r, "b": b}, [_part("T_r mod p", t, b - r, p)]
    )


def _corrected_family(p, index_set, base, conditions):
    """Correct a mod-p lift at the smallest indices by multiples of p.

    ``conditions`` is a list of (weight function, target, modulus) for the
    weighted sums sum_j w(j) * value_j = target mod modulus.  Corrections
    are multiples of p, so the residues mod p are preserved.  Returns the
    corrected values; callers must verify post hoc.
    """
    values = dict(base)
    slots = index_set[: len(conditions)]
    if not slots:
        return values
    # current defects, divided by p where the correction enters
    defects = []
    usable = []
    for w, target, modulus in conditions:
        cur = sum(w(j) * values[j] for j in index_set)
        d = (target - cur) % modulus
        if modulus <= p:
            continue  # a multiple of p cannot move a mod-p condition
        if d % p != 0:
            return values  # base lift already violates it; let the check fail
        usable.append((w, modulus // p))
        defects.append(d // p)
    if not usable:
        return values
    slots = index_set[: len(usable)]
    # solve the small square system for y (correction = p * y) by
    # back-substitution: moduli are decreasing powers of p, and the
    # coefficient matrix restricted mod p is Vandermonde-like in the
    # slot indices, which differ by multiples of (p - 1), a unit mod p.
    k = len(slots)
    if k < len(usable):
        usable = usable[:k]
        defects = defects[:k]
    ys = _solve_slot_system(p, slots, usable, defects)
    if ys is None:
        return values
    for j, y in zip(slots, ys):
        values[j] = values[j] + p * y
    return values


def _solve_slot_system(p, slots, usable, defects):
    """Solve sum_i w(slot_i) y_i = defect mod m over the given conditions.

    Gaussian elimination over Z/m per equation, ordered so the largest
    modulus is satisfied exactly and smaller ones mod p.  Works because
    all equations can be read mod p first and then lifted.
    """
    k = len(slots)
    # first satisfy everything mod p
    mat = [[usable[i][0](j) % p for j in slots] for i in range(k)]
    rhs = [defects[i] % p for i in range(k)]
    ys = _solve_mod_p(p, mat, rhs)
    if ys is None:
        return None
    # lift: adjust y_0 (slot with weight-1 leading condition) to hit the
    # big-modulus equations exactly, in steps of p which keep the mod-p
    # equations intact
    for i, (w, m) in enumerate(usable):
        if m <= p:
            continue
        cur = sum(w(j) * y for j, y in zip(slots, ys)) % m
        d = (defects[i] - cur) % m
        if d % p != 0:
            return None
        wi = w(slots[i])
        if wi % p == 0:
            return None
        inv = pow(wi, -1, m)
        ys[i] = (ys[i] + p * ((d // p) * inv % (m // p))) % (m * p)
    return ys


def _solve_mod_p(p, mat, rhs):
    """Tiny dense solver over F_p; returns one solution or None."""
    k = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    piv = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, k) if a[i][c] % p), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(k):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
    for i in range(r, k):
        if a[i][k] % p:
            return None
    x = [0] * k
    for i, c in enumerate(piv):
        x[c] = a[i][k]
    return x


def _family_report(lemma_id, p, r, index_set, values, conditions):
    parts = [
        _part("value_%d mod p" % j, values[j], comb(r, j), p)
        for j in index_set
    ]
    for label, w, target, modulus in conditions:
        s = sum(w(j) * values[j] for j in index_set)
        parts.append(_part(label, s, target, modulus))
    rep = _report(lemma_id, {"p": p, "r": r}, parts)
    rep["kind"] = "alpha" if lemma_id in ("comb2", "comb6") else "beta"
    rep["index_set"] = list(index_set)
    rep["values"] = [int(values[j]) for j in index_set]
    return rep


def construct_alphas(p, r, variant):
    """Integer family alpha_j with prescribed weighted sums.

    variant "comb2": r = a mod (p-1) with 2 <= a <= p-1, r >= 2p; indices
    0 < j < r, j = a mod (p-1); sums with C(j,n) vanish mod p^(3-n) for
    n = 0, 1, and the n = 2 sum is 0 (a >= 3) or C(r,2) (a = 2) mod p.

    variant "comb6": p | r, r = 1 mod (p-1), r >= 2p; indices 1 < j < r;
    sums vanish mod p^(3-n) for n = 0, 1, 2.
    """
    _require(is_prime(p) and p > 2, "p must be an odd prime")
    a = (r - 1) % (p - 1) + 1
    if variant == "comb2":
        _require(r >= 2 * p and 2 <= a <= p - 1,
                 "requires r >= 2p and a in [2, p-1]")
        index_set = [j for j in range(1, r) if j % (p - 1) == a % (p - 1)]
        n2_target = 0 if a >= 3 else comb(r, 2)
        conditions = [
            (lambda j: 1, 0, p ** 3),
            (lambda j: j, 0, p ** 2),
            (lambda j: comb(j, 2), n2_target, p),
        ]
    elif variant == "comb6":
        _require(r >= 2 * p and a == 1 and r % p == 0,
                 "requires r >= 2p, r = 1 mod (p-1), p | r")
        index_set = [j for j in range(2, r) if j % (p - 1) == 1 % (p - 1)]
        n2_target = 0
        conditions = [
            (lambda j: 1, 0, p ** 3),
            (lambda j: j, 0, p ** 2),
            (lambda j: comb(j, 2), 0, p),
        ]
    else:
        raise ValueError("variant must be 'comb2' or 'comb6'")
    base = {j: comb(r, j) % p for j in index_set}
    values = _corrected_family(p, index_set, base, conditions)
    labels = ["sum mod p^3", "weighted-j sum mod p^2", "weighted-C(j,2) sum mod p"]
    named = [(lab,) + cond for lab, cond in zip(labels, conditions)]
    return _family_report(variant, p, r, index_set, values, named)


def construct_betas(p, r):
    """Integer family beta_j for r = b mod p(p-1), 3 <= b <= p.

    Indices b-1 <= j < r-1 with j = b-1 mod (p-1); the C(j,n)-weighted
    sums vanish mod p^(3-n) for n = 0, 1, 2.  An empty index set passes
    vacuously.
    """
    _require(is_prime(p) and p > 2, "p must be an odd prime")
    b = (r - 2) % (p - 1) + 2
    _require(3 <= b <= p and (r - b) % (p * (p - 1)) == 0,
             "requires r = b mod p(p-1) with 3 <= b <= p")
    index_set = [
        j for j in range(b - 1, r - 1) if j % (p - 1) == (b - 1) % (p - 1)
    ]
    conditions = [
        (lambda j: 1, 0, p ** 3),
        (lambda j: j, 0, p ** 2),
        (lambda j: comb(j, 2), 0, p),
    ]
    base = {j: comb(r, j) % p for j in index_set}
    values = _corrected_family(p, index_set, base, conditions)
    labels = ["sum mod p^3", "weighted-j sum mod p^2", "weighted-C(j,2) sum mod p"]
    named = [(lab,) + cond for lab, cond in zip(labels, conditions)]
    return _family_report("comb3_ii", p, r, index_set, values, named)


def verify_valuation_lemmas(p, param):
    """Valuation bounds on p^i * C(s,i) and the (1+pX)^(p^t) expansion.

    ``param`` selects the identity: {"s": s} checks p^i C(s,i) = 0 mod
    p^(t+2) for i >= 2 with s = 1 mod (p-1) and t = v(s-1); {"r": r}
    checks p^i C(r,i) = 0 mod p^(t+3) for i >= 3 with r = 2 mod (p-1)
    and t = v(r-2); {"t": t} checks (1+pX)^(p^t) = 1 + p^(t+1) X mod
    p^(t+2) coefficient by coefficient.

    The quantifier over all i is finite in substance: once i exceeds the
    modulus exponent, p^i alone carries the congruence, so checking up to
    the stated cutoff is exhaustive.
    """
    _require(is_prime(p) and p > 2, "p must be an odd prime")
    if "s" in param:
        s = param["s"]
        _require(s > 1 and (s - 1) % (p - 1) == 0, "requires s = 1 mod (p-1), s > 1")
        t = padic_valuation(s - 1, p)
        modulus = p ** (t + 2)
        hi = min(s, t + 2 * p)
        parts = [
            _part("p^%d * C(s,%d)" % (i, i), p ** i * comb(s, i), 0, modulus)
            for i in range(2, hi + 1)
        ]
        assert t + 2 * p >= t + 2  # beyond the cutoff p^i alone suffices
        return _report("congruences1", {"p": p, "s": s, "t": t}, parts)
    if "r" in param:
        r = param["r"]
        _require(p > 3, "requires p > 3")
        _require(r > 2 and (r - 2) % (p - 1) == 0, "requires r = 2 mod (p-1), r > 2")
        t = padic_valuation(r - 2, p)
        modulus = p ** (t + 3)
        hi = min(r, t + 2 * p)
        parts = [
            _part("p^%d * C(r,%d)" % (i, i), p ** i * comb(r, i), 0, modulus)
            for i in range(3, hi + 1)
        ]
        assert t + 2 * p >= t + 3
        return _report("congruences2", {"p": p, "r": r, "t": t}, parts)
    if "t" in param:
        t = param["t"]
        _require(t >= 0, "requires t >= 0")
        modulus = p ** (t + 2)
        n = p ** t
        parts = []
        for k in range(n + 1):
            want = 1 if k == 0 else (p ** (t + 1) if k == 1 else 0)
            parts.append(
                _part("coefficient of X^%d" % k, comb(n, k) * p ** k, want, modulus)
            )
        return _report("ppower", {"p": p, "t": t}, parts)
    raise ValueError("param must contain one of 's', 'r', 't'")


def verify_congrbinom(which, p, n, t):
    """Weighted binomial sums over a congruence class of indices.

    which = 2: r = 2 + n(p-1)p^t, indices 0 < j < r with j = 2 mod (p-1);
    the plain / j-weighted / C(j,2)-weighted sums equal p(2-r)/2 and
    pr(2-r)/(1-p) mod p^(t+2) and C(r,2)/(1-p) mod p^(t+1); the
    C(j,i)-weighted sums vanish mod p^(t+3-i) for i >= 3.

    which = 1: s = 1 + n(p-1)p^t, all indices j = 1 mod (p-1) including
    the endpoints; sums equal 1 + n p^(t+1) and s(p-2)/(p-1) - s n p^(t+1)
    mod p^(t+2); C(j,i)-weighted sums vanish mod p^(t+2-i) for i >= 2.

    which = 12: r = 2 + n(p-1)p^t, indices 1 < j <= r-1 with j = 1 mod
    (p-1); sums equal 2 - r + 2 n p^(t+1), n r p^(t+1) mod p^(t+2) and
    C(r,2)/(p-1) mod p^(t+1); higher weights vanish mod p^(t+3-i).
    """
    _require(is_prime(p) and p > 3, "p must be a prime > 3")
    _require(n >= 0 and t >= 0, "requires n >= 0, t >= 0")
    step = p - 1
    if which == 2:
        r = 2 + n * step * p ** t
        js = [j for j in range(1, r) if j % step == 2 % step]
        parts = [
            _part("sum", sum(comb(r, j) for j in js),
                  Fraction(p * (2 - r), 2), p ** (t + 2)),
            _part("j-weighted sum", sum(j * comb(r, j) for j in js),
                  Fraction(p * r * (2 - r), 1 - p), p ** (t + 2)),
        ]
        # each C(j,i)-weighted identity needs r > i (degenerate below that)
        if r > 2:
            parts.append(
                _part("C(j,2)-weighted sum",
                      sum(comb(j, 2) * comb(r, j) for j in js),
                      Fraction(comb(r, 2), 1 - p), p ** (t + 1))
            )
        for i in range(3, t + 3):
            if r > i:
                parts.append(
                    _part("C(j,%d)-weighted sum" % i,
                          sum(comb(j, i) * comb(r, j) for j in js), 0,
                          p ** (t + 3 - i))
                )
        return _report("congrbinom2", {"p": p, "n": n, "t": t, "r": r}, parts)
    if which == 1:
        s = 1 + n * step * p ** t
        js = [j for j in range(0, s + 1) if j % step == 1 % step]
        parts = [
            _part("sum", sum(comb(s, j) for j in js),
                  1 + n * p ** (t + 1), p ** (t + 2)),
        ]
        if s > 1:
            parts.append(
                _part("j-weighted sum", sum(j * comb(s, j) for j in js),
                      Fraction(s * (p - 2), p - 1) - s * n * p ** (t + 1),
                      p ** (t + 2))
            )
        for i in range(2, t + 2):
            if s > i:
                parts.append(
                    _part("C(j,%d)-weighted sum" % i,
                          sum(comb(j, i) * comb(s, j) for j in js), 0,
                          p ** (t + 2 - i))
                )
        return _report("congrbinom1", {"p": p, "n": n, "t": t, "s": s}, parts)
    if which == 12:
        r = 2 + n * step * p ** t
        js = [j for j in range(2, r) if j % step == 1 % step]
        parts = [
            _part("sum", sum(comb(r, j) for j in js),
                  2 - r + 2 * n * p ** (t + 1), p ** (t + 2)),
            _part("j-weighted sum", sum(j * comb(r, j) for j in js),
                  n * r * p ** (t + 1), p ** (t + 2)),
        ]
        if r > 2:
            parts.append(
                _part("C(j,2)-weighted sum",
                      sum(comb(j, 2) * comb(r, j) for j in js),
                      Fraction(comb(r, 2), p - 1), p ** (t + 1))
            )
        for i in range(3, t + 3):
            if r > i:
                parts.append(
                    _part("C(j,%d)-weighted sum" % i,
                          sum(comb(j, i) * comb(r, j) for j in js), 0,
                          p ** (t + 3 - i))
                )
        return _report("congrbinom12", {"p": p, "n": n, "t": t, "r": r}, parts)
    raise ValueError("which must be 1, 2, or 12")


def run_lemma_suite(p, rmax):
    """Every verifier at every admissible parameter up to rmax.

    Returns the list of reports; a caller asserting all-pass reproduces
    the full sweep used in the acceptance checks.
    """
    reports = []
    for r in range(1, rmax + 1):
        reports.append(verify_comb1(p, r))
        if r >= 2:
            reports.append(verify_comb3_i(p, r))
        a = (r - 1) % (p - 1) + 1
        if r >= 2 * p and 2 <= a <= p - 1:
            reports.append(construct_alphas(p, r, "comb2"))
        if r >= 2 * p and a == 1 and r % p == 0:
            reports.append(construct_alphas(p, r, "comb6"))
        b = (r - 2) % (p - 1) + 2
        if 3 <= b <= p and r >= 2 and (r - b) % (p * (p - 1)) == 0:
            reports.append(construct_betas(p, r))
        if r > 1 and (r - 1) % (p - 1) == 0:
            reports.append(verify_valuation_lemmas(p, {"s": r}))
        if p > 3 and r > 2 and (r - 2) % (p - 1) == 0:
            reports.append(verify_valuation_lemmas(p, {"r": r}))
    for t in range(0, 3):
        reports.append(verify_valuation_lemmas(p, {"t": t}))
        if p > 3:
            nmax = max(1, (rmax - 2) // ((p - 1) * p ** t))
            for n in range(0, nmax + 1):
                reports.append(verify_congrbinom(2, p, n, t))
                reports.append(verify_congrbinom(1, p, n, t))
                reports.append(verify_congrbinom(12, p, n, t))
    return reports
