"""Command-line front end: reduction queries, verification sweeps and
batch tables, with JSON output and an append-only results cache."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from . import binomial_identities as bi
from . import gamma_modules as gm
from . import reduction_engine as re_
from . import tree_hecke as th
from .padics import PrecisionError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PRECISION = 2
EXIT_HYPOTHESIS = 3


def _emit(obj, args):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    if getattr(args, "format", "json") == "text":
        text = _as_text(obj)
    if getattr(args, "out", None):
        with open(args.out, "a") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _as_text(obj):
    if "reduction" in obj:
        red = obj["reduction"]
        if red["type"] == "irreducible":
            body = "irreducible ind(omega2^%d)" % red["induced_exponent"]
        else:
            e1, e2 = (f["omega_exp"] for f in red["factors"])
            body = "reducible lambda=%s: mu omega^%d + mu_inv omega^%d" % (
                json.dumps(red["lambda"], sort_keys=True), e1, e2)
        extra = ""
        if "ramification" in obj:
            extra = " [%s]" % obj["ramification"]
        return "p=%d k=%d ap=%s: %s%s" % (
            obj["p"], obj["k"], obj["ap"], body, extra)
    return json.dumps(obj, sort_keys=True)


# ---------------------------------------------------------------------------
# cache


def _cache_path(args):
    return getattr(args, "cache", None) or os.environ.get("SLOPE1_CACHE")


def _cache_key(command, parameters):
    return json.dumps([command, parameters], sort_keys=True,
                      separators=(",", ":"))


def cache_lookup(path, command, parameters):
    if not path or not os.path.exists(path):
        return None
    key = _cache_key(command, parameters)
    hit = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if _cache_key(rec["command"], rec["parameters"]) == key:
                hit = rec["result"]  # last write wins
    return hit


def cache_append(path, command, parameters, result):
    if not path:
        return
    rec = {
        "command": command,
        "parameters": parameters,
        "result": result,
        "timestamp": int(time.time()),
        "engine_version": __version__,
    }
    with open(path, "a") as fh:
        fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")


def _canonical_ap(ap_spec, p):
    if ":" in ap_spec:
        return ap_spec
    from fractions import Fraction

    q = Fraction(ap_spec)
    return "%d/%d" % (q.numerator, q.denominator)


# ---------------------------------------------------------------------------
# subcommands


def cmd_reduce(args):
    parameters = {
        "p": args.p, "k": args.k, "ap": _canonical_ap(args.ap, args.p),
        "precision": args.precision, "ramification": args.ramification,
        "llc": args.llc,
    }
    cache = _cache_path(args)
    result = cache_lookup(cache, "reduce", parameters)
    if result is None:
        result = re_.run_query(
            args.p, args.k, args.ap, precision=args.precision,
            with_ramification=args.ramification, with_llc=args.llc,
        )
        cache_append(cache, "reduce", parameters, result)
    _emit(result, args)
    return EXIT_OK


def _parse_plist(spec):
    return [int(x) for x in spec.split(",")]


def _parse_rrange(spec, p):
    if spec is None:
        return list(range(2 * p, 4 * p))
    if ".." in spec:
        lo, hi = spec.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


_STRUCTURE_LEMMAS = (
    "a_mod_p", "goodcasenew_i", "goodcasenew_ii", "lemmanew",
    "projection", "es1_split", "es1_split_theta", "xr_star",
)


def cmd_verify(args):
    failures = 0
    ran = 0
    if args.suite == "lemmas":
        for p in _parse_plist(args.p or "5,7"):
            for report in bi.run_lemma_suite(p, args.rmax or 20 * p):
                ran += 1
                if report["status"] != "pass":
                    failures += 1
                    _emit(report, args)
    elif args.suite == "structure":
        for p in _parse_plist(args.p or "5,7"):
            for r in _parse_rrange(args.r, p):
                for name in _STRUCTURE_LEMMAS:
                    try:
                        report = gm.verify_structural_lemma(name, p, r)
                    except ValueError:
                        continue
                    ran += 1
                    if report["status"] != "pass":
                        failures += 1
                        _emit(report, args)
    elif args.suite == "witnesses":
        cases = [args.case] if args.case else list(th.WITNESS_CASES)
        for p in _parse_plist(args.p or "5,7"):
            for r in _parse_rrange(args.r, p):
                ap = args.ap if args.ap else str(p)
                for case in cases:
                    try:
                        report = th.verify_witness(case, p, r, _rational(ap))
                    except ValueError:
                        continue
                    ran += 1
                    if not (report["matches_claim"] and
                            report.get("integral", True)):
                        failures += 1
                        _emit(report, args)
    summary = {"suite": args.suite, "ran": ran, "failures": failures,
               "status": "pass" if failures == 0 else "fail"}
    _emit(summary, args)
    return EXIT_OK if failures == 0 else EXIT_FAIL


def _rational(text):
    from fractions import Fraction

    return Fraction(text)


def cmd_sweep(args):
    p = args.p
    k = args.r + 2
    m = args.apmod
    cache = _cache_path(args)
    rows = []
    for u in range(1, p ** m):
        if u % p == 0:
            continue
        ap = str(p * u)
        parameters = {"p": p, "k": k, "ap": _canonical_ap(ap, p),
                      "precision": args.precision,
                      "ramification": False, "llc": False}
        result = cache_lookup(cache, "reduce", parameters)
        if result is None:
            result = re_.run_query(p, k, ap, precision=args.precision)
            cache_append(cache, "reduce", parameters, result)
        rows.append(result)
    for row in rows:
        _emit(row, args)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slope1",
        description="mod-p reductions of slope-one crystalline "
                    "representations and their verification suites",
    )
    parser.add_argument("--cache", help="append-only JSON-lines cache file")
    sub = parser.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("reduce", help="classify one (p, k, a_p)")
    pr.add_argument("--p", type=int, required=True)
    pr.add_argument("--k", type=int, required=True)
    pr.add_argument("--ap", required=True,
                    help='rational "n" / "n/d" or digit string "v:d0,d1,..."')
    pr.add_argument("--precision", type=int)
    pr.add_argument("--ramification", action="store_true")
    pr.add_argument("--llc", action="store_true")
    pr.add_argument("--out")
    pr.add_argument("--format", choices=("json", "text"), default="json")
    pr.set_defaults(func=cmd_reduce)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=("lemmas", "structure", "witnesses"))
    pv.add_argument("--p", help="comma-separated primes")
    pv.add_argument("--r", help='range "lo..hi" or comma list')
    pv.add_argument("--rmax", type=int)
    pv.add_argument("--case", choices=th.WITNESS_CASES)
    pv.add_argument("--ap")
    pv.add_argument("--out")
    pv.add_argument("--format", choices=("json", "text"), default="json")
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("sweep", help="tabulate reductions over an a_p grid")
    ps.add_argument("--p", type=int, required=True)
    ps.add_argument("--r", type=int, required=True)
    ps.add_argument("--apmod", type=int, default=2,
                    help="sweep a_p/p over units mod p^apmod")
    ps.add_argument("--precision", type=int)
    ps.add_argument("--out")
    ps.add_argument("--format", choices=("json", "text"), default="json")
    ps.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrecisionError as err:
        p, k = getattr(args, "p", None), getattr(args, "k", None)
        msg = str(err)
        if p and k:
            msg += "; needed_precision=%d" % re_.needed_precision(p, k - 2)
        print(json.dumps({"error": "insufficient_precision",
                          "message": msg}), file=sys.stderr)
        return EXIT_PRECISION
    except (re_.HypothesisError, ValueError) as err:
        print(json.dumps({"error": "hypothesis_violation",
                          "message": str(err)}), file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
