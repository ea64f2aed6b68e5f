"""Reduction of slope-one crystalline representations.

Given (p, k, a_p) with v(a_p) = 1, compute the semisimplified mod-p
reduction, the peu/tres ramification refinement where it applies, and
the mod-p local Langlands descriptor, together with consistency checks
against the filtration structure and the witness computations.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from . import gamma_modules as gm
from . import tree_hecke as th
from .finite_fields import FqElement, solve_monic_quadratic
from .padics import Padic, PrecisionError, is_prime, parse_padic


class HypothesisError(ValueError):
    """The query violates a hypothesis of the classification."""


def parse_ap(spec, p, abs_prec):
    """a_p from an int, Fraction, digit string "v:d0,d1,..." or "num/den".

    Returns (padic, display) where display is the canonical string kept
    in reports and cache keys.
    """
    if isinstance(spec, Padic):
        return spec, spec.digit_string()
    if isinstance(spec, str) and ":" in spec:
        val = parse_padic(spec, p, default_abs_prec=abs_prec)
        return val, val.digit_string()
    q = Fraction(spec)
    return (
        Padic.from_rational(q, p, abs_prec),
        "%d/%d" % (q.numerator, q.denominator),
    )


class CrystallineParams:
    """Validated query (p, k, a_p) with r = k - 2 and v(a_p) = 1."""

    def __init__(self, p, k, ap, precision=None):
        if not is_prime(p) or p < 5:
            raise HypothesisError("p must be a prime >= 5")
        if k < 4:
            raise HypothesisError("k must be at least 4")
        self.p = p
        self.k = k
        self.r = k - 2
        self.b = 2 + (self.r - 2) % (p - 1)
        self.a = 1 + (self.r - 1) % (p - 1)
        need = needed_precision(p, self.r)
        self.precision = max(precision or 0, need)
        self.ap, self.ap_display = parse_ap(ap, p, self.precision + 2)
        if self.ap.abs_prec < need:
            raise PrecisionError(
                "a_p carries precision %d but the branch needs %d"
                % (self.ap.abs_prec, need)
            )
        if self.ap.valuation() != 1:
            raise HypothesisError("slope v(a_p) must be exactly 1")


def needed_precision(p, r):
    """Minimal absolute a_p precision for every comparison to be decidable."""
    if (r - 2) % (p - 1) == 0:
        if r == 2:
            return 3
        return padic_t(p, r) + 3
    return 2


def padic_t(p, r):
    from .padics import padic_valuation

    return padic_valuation(r - 2, p)


def _fq(p, x):
    return FqElement(p, x % p)


def _trichotomy_unit(params):
    """x = a_p/p - C(r,2) p/a_p, the b = 2 comparison quantity."""
    p, r, ap = params.p, params.r, params.ap
    prec = ap.abs_prec + 4
    crp = Padic.from_int(comb(r, 2), p, prec)
    return ap.shift(-1) - (crp / ap).shift(1)


def reduce_slope_one(params):
    """The semisimplified reduction, per the slope-one classification.

    Returns a dict: {"type": "irreducible", "induced_exponent": e} for
    ind(omega_2^e), or {"type": "reducible", "lambda": FqElement,
    "lambda_inv": FqElement, "factors": [...]} listing the unramified
    twists mu_lambda omega^e1 (+) mu_{lambda^-1} omega^e2.
    """
    p, r, b = params.p, params.r, params.b
    if b == 2:
        return _reduce_b2(params)
    if b == p:
        if (r - b) % p:
            return _irreducible(p, 2 * p)
        c = (params.ap.shift(-1) - _div(r - p, params.ap)).residue()
        lam, lam_inv = solve_monic_quadratic(p, c)
        return _reducible(p, lam, lam_inv, 1, 1)
    if (r - b) % p:
        lam = Fraction(b, b - r) * params.ap.shift(-1).residue()
        lam_res = _frac_res(lam, p)
        return _reducible(p, _fq(p, lam_res), _fq(p, pow(lam_res, -1, p)),
                          b, 1)
    return _irreducible(p, b + 1)


def _div(n, ap):
    return Padic.from_int(n, ap.p, ap.abs_prec + 4) / ap


def _frac_res(q, p):
    q = Fraction(q)
    return q.numerator * pow(q.denominator, -1, p) % p


def _irreducible(p, e):
    return {"type": "irreducible", "induced_exponent": e % (p * p - 1)}


def _reducible(p, lam, lam_inv, e_lam, e_inv, extra=None):
    out = {
        "type": "reducible",
        "lambda": lam,
        "lambda_inv": lam_inv,
        "factors": [
            {"mu": "lambda", "omega_exp": e_lam % (p - 1)},
            {"mu": "lambda_inv", "omega_exp": e_inv % (p - 1)},
        ],
    }
    if out["factors"][0]["omega_exp"] < out["factors"][1]["omega_exp"]:
        out["factors"].reverse()
    if extra:
        out.update(extra)
    return out


def _reduce_b2(params):
    p, r = params.p, params.r
    x = _trichotomy_unit(params)
    if r == 2:
        # v(r - 2) is infinite: any nonzero comparison quantity wins
        if x.v is None:
            raise HypothesisError(
                "boundary weight k = 4 with a_p = +-p (to precision) "
                "is not classified"
            )
        return _irreducible(p, 3)
    t = padic_t(p, r)
    try:
        vx = x.valuation()
    except PrecisionError:
        if x.abs_prec > t:
            vx = x.abs_prec  # only the comparison with t matters
        else:
            raise
    if vx < t:
        return _irreducible(p, 3)
    if vx > t:
        return _irreducible(p, 2 + p)
    lam_pad = x * _sc_frac(p, Fraction(2, 2 - r), x.abs_prec + 4)
    lam = lam_pad.residue()
    return _reducible(
        p, _fq(p, lam), _fq(p, pow(lam, -1, p)), 2, 1,
        extra={"trichotomy": "equal"},
    )


def _sc_frac(p, q, prec):
    return Padic.from_rational(Fraction(q), p, prec)


def classify_ramification(params, result):
    """The peu/tres refinement, applicable to three reducible patterns.

    Returns {"class": label} with optional "reason"/"caveat" keys.
    """
    p, r, b = params.p, params.r, params.b
    if result["type"] != "reducible":
        return {"class": "not_applicable"}
    lam = result["lambda"]
    if lam.a1 != 0 or lam.a0 % p not in (1, p - 1):
        return {"class": "not_applicable"}
    eps = 1 if lam.a0 % p == 1 else -1
    if b == 2 and result.get("trichotomy") == "equal":
        if (3 * r - 2) % p == 0:
            return {
                "class": "undetermined",
                "reason": "r = 2/3 mod p: the two residue patterns of "
                          "a_p/p coincide and the classification is open",
            }
        apbar = params.ap.shift(-1).residue()
        if apbar == _frac_res(Fraction(eps * r, 2), p):
            return {"class": "peu_ramifiee"}
        if apbar == (eps * (1 - r)) % p:
            # rational a_p keeps the coefficient field unramified, so the
            # extra hypothesis at r = 2 mod p holds automatically
            u = _trichotomy_unit(params) * _sc_frac(
                p, Fraction(2, 2 - r), params.ap.abs_prec + 4
            )
            ueps = u - eps
            if ueps.valuation_at_least(1):
                return {"class": "tres_ramifiee"}
            return {"class": "peu_ramifiee"}
        return {
            "class": "undetermined",
            "reason": "residue of a_p/p matches neither trigger root",
        }
    if b == p - 1 and (r - b) % p != 0:
        return {"class": "peu_ramifiee"}
    if b == p and (r - b) % p == 0:
        return {
            "class": "unramified_nonsplit",
            "caveat": "non-split unramified extension of the trivial "
                      "character, proved for the standard lattice only",
        }
    return {"class": "not_applicable"}


def llc(result, p):
    """Mod-p local Langlands descriptor of a reduction result.

    Factors are dicts {"r", "lambda", "eta_omega_exp"} with lambda an
    FqElement ("0" for the supersingular case); the mu_lambda factor
    comes first in the reducible case.
    """
    if result["type"] == "irreducible":
        e = result["induced_exponent"] % (p * p - 1)
        for rp in range(p):
            for m in range(p - 1):
                if (rp + 1 + m * (p + 1)) % (p * p - 1) == e:
                    return [{"r": rp, "lambda": FqElement(p, 0),
                             "eta_omega_exp": m}]
        raise ValueError("exponent %d has no normalized presentation" % e)
    exps = {f["mu"]: f["omega_exp"] for f in result["factors"]}
    e_lam, e_inv = exps["lambda"], exps["lambda_inv"]
    r1 = (e_lam - e_inv - 1) % (p - 1)
    r2 = (p - 3 - r1) % (p - 1)
    return [
        {"r": r1, "lambda": result["lambda"], "eta_omega_exp": e_inv % (p - 1)},
        {"r": r2, "lambda": result["lambda_inv"],
         "eta_omega_exp": (e_inv + r1 + 1) % (p - 1)},
    ]


def _weight_classes(factor, p):
    """The set of (a, twist) weights presenting the same factor.

    pi(0, lam, eta) and pi(p-1, lam, eta) have the same semisimplification,
    and pi(r, 0, eta) = pi(p-1-r, 0, eta omega^r).
    """
    rp, m = factor["r"], factor["eta_omega_exp"] % (p - 1)
    if factor["lambda"].a0 == 0 and factor["lambda"].a1 == 0:
        return {(rp, m), (p - 1 - rp, (m + rp) % (p - 1))}
    if rp % (p - 1) == 0:
        return {(0, m), (p - 1, m)}
    return {(rp, m)}


_CHEAP_WITNESSES = ("W1", "W2", "W4", "W9", "W11")


def cross_check(params, run_witnesses=True):
    """Consistency of the reduction against the filtration and witnesses.

    Every local Langlands factor must present a weight among the
    Jordan-Holder labels of P, and every witness case applicable at
    (p, r, a_p) must reproduce its claimed image.
    """
    p, r = params.p, params.r
    if r < 2 * p:
        return {"status": "skipped", "reason": "filtration needs r >= 2p"}
    result = reduce_slope_one(params)
    factors = llc(result, p)
    pstruct = gm.build_P(p, r)
    jh = {
        (a, m % (p - 1))
        for (a, m) in (lab for lab in pstruct.labels if lab is not None)
    }
    containment = []
    ok = True
    for factor in factors:
        hit = bool(_weight_classes(factor, p) & jh)
        ok = ok and hit
        containment.append({
            "factor": serialize_llc_factor(factor),
            "in_jh_of_P": hit,
        })
    witnesses = {}
    if run_witnesses:
        for case in _CHEAP_WITNESSES:
            try:
                rep = th.verify_witness(case, p, r, params.ap)
            except ValueError:
                continue
            witnesses[case] = bool(rep["matches_claim"] and rep["integral"])
            ok = ok and witnesses[case]
    return {
        "status": "pass" if ok else "fail",
        "jh_labels": sorted(jh),
        "containment": containment,
        "witnesses": witnesses,
    }


# ---------------------------------------------------------------------------
# serialization


def serialize_fq(x):
    return {"a0": int(x.a0), "a1": int(x.a1)}


def _fq_str(x):
    if x.a1 == 0:
        return str(int(x.a0))
    return "%d+%d*s" % (int(x.a0), int(x.a1))


def serialize_llc_factor(factor):
    return {
        "r": int(factor["r"]),
        "lambda": _fq_str(factor["lambda"]),
        "eta_omega_exp": int(factor["eta_omega_exp"]),
    }


def serialize_reduction(result):
    if result["type"] == "irreducible":
        return {
            "type": "irreducible",
            "induced_exponent": int(result["induced_exponent"]),
        }
    return {
        "type": "reducible",
        "lambda": serialize_fq(result["lambda"]),
        "factors": [
            {"mu": f["mu"], "omega_exp": int(f["omega_exp"])}
            for f in result["factors"]
        ],
    }


def run_query(p, k, ap, precision=None, with_ramification=False,
              with_llc=False):
    """One full engine query as a JSON-ready dict."""
    params = CrystallineParams(p, k, ap, precision)
    result = reduce_slope_one(params)
    out = {
        "p": p,
        "k": k,
        "ap": params.ap_display,
        "slope_check": 1,
        "reduction": serialize_reduction(result),
        "precision_used": params.precision,
    }
    if with_ramification:
        ram = classify_ramification(params, result)
        out["ramification"] = ram["class"]
        if "reason" in ram:
            out["ramification_reason"] = ram["reason"]
        if "caveat" in ram:
            out["ramification_caveat"] = ram["caveat"]
    if with_llc:
        out["llc"] = [serialize_llc_factor(f) for f in llc(result, params.p)]
    return out
