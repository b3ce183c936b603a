#!/usr/bin/env python3
"""Search for fixture angles and freeze the results used by the test suite.

Scans rational angles in the 1/2-limb sector (1/3, 2/3), classifying each by:
validity, recurrence to depth, first nondegenerate critical annulus, fraternal
descendants, and renormalization detection. Run from the repo root:

    python scripts/find_fixtures.py [--max-period 12] [--budget 30]

The frozen constants in tests/fixtures.py record the outputs of this script.
"""

import argparse
import sys
from fractions import Fraction

sys.path.insert(0, "src")

from yoccoz.angles import normalize, double
from yoccoz.errors import Case1DegenerateError, NotFoundWithinBudgetError, NeedsDeeperLaminationError, YoccozError
from yoccoz.lamination import build
from yoccoz import puzzle as pz
from yoccoz import renorm as rn


def probe(theta, depth=8, budget=30, fr_budget=24):
    rec = {"theta": str(theta)}
    try:
        lam = build(1, 2, theta, depth)
    except Case1DegenerateError as e:
        rec["case"] = f"case1(step {e.step})"
        return rec
    except YoccozError as e:
        rec["case"] = f"invalid: {e}"
        return rec
    try:
        N = pz.first_nondegenerate(lam, budget)
        rec["N"] = N
    except NeedsDeeperLaminationError:
        rec["N"] = None
        return rec
    try:
        n1, n2 = pz.fraternal_descendants(lam, N, fr_budget)
        rec["fraternal"] = (n1, n2)
        rec["L"] = max(n1, n2) + 3
    except NotFoundWithinBudgetError:
        rec["fraternal"] = None
    try:
        rep = rn.detect(lam, budget=budget)
        rec["renorm"] = (rep.renormalizable, rep.period, rep.kind)
    except Exception as e:
        rec["renorm"] = f"error: {e}"
    return rec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-period", type=int, default=12)
    ap.add_argument("--budget", type=int, default=30)
    args = ap.parse_args()

    seen = set()
    hits = []
    for P in range(3, args.max_period + 1):
        den = (1 << P) - 1
        for num in range(den // 3 + 1, 2 * den // 3 + 1):
            th = normalize(num, den)
            if th in seen:
                continue
            orb = {th}
            cur = double(th)
            while cur not in orb:
                orb.add(cur)
                cur = double(cur)
            seen |= orb
            if len(orb) != P:
                continue
            if not (Fraction(1, 3) < th.frac < Fraction(2, 3)):
                continue
            rec = probe(th, budget=args.budget)
            if rec.get("fraternal"):
                hits.append(rec)
                print("FRATERNAL", rec)
            elif "case" not in rec:
                print("chain    ", rec)
    print(f"\n{len(hits)} angles with fraternal descendants found")


if __name__ == "__main__":
    main()
