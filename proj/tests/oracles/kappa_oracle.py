#!/usr/bin/env python3
"""Brute-force Cohen's kappa over two coders' score CSVs.

Expected agreement is counted over every (item of A, item of B) pair instead of
from marginal totals, so it shares no arithmetic with the library.

usage: kappa_oracle.py coder_a.csv coder_b.csv [--check expected.json]
"""

import csv
import json
import sys
from fractions import Fraction


def latest(path):
    scores = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            scores[(row["screenshot_id"], row["aspect"])] = int(row["score"])
    return scores


def kappa(a, b):
    out = {}
    for aspect in sorted({k[1] for k in a} | {k[1] for k in b}):
        ids = sorted({k[0] for k in a if k[1] == aspect} & {k[0] for k in b if k[1] == aspect})
        n = len(ids)
        if n == 0:
            continue
        xs = [a[(i, aspect)] for i in ids]
        ys = [b[(i, aspect)] for i in ids]
        po = Fraction(sum(1 for x, y in zip(xs, ys) if x == y), n)
        pe = Fraction(sum(1 for x in xs for y in ys if x == y), n * n)
        k = None if pe == 1 else (po - pe) / (1 - pe)
        out[aspect] = {"n": n, "po": float(po), "pe": float(pe), "kappa": None if k is None else float(k)}
    return out


def main(argv):
    if len(argv) not in (3, 5):
        print(__doc__, file=sys.stderr)
        return 2
    result = kappa(latest(argv[1]), latest(argv[2]))
    if len(argv) == 5:
        expected = json.load(open(argv[4]))
        for aspect, e in expected.items():
            got = result.get(aspect)
            if got is None or got["n"] != e["n"]:
                print(f"{aspect}: missing or different n", file=sys.stderr)
                return 1
            for key in ("po", "pe", "kappa"):
                if (got[key] is None) != (e[key] is None) or (got[key] is not None and abs(got[key] - e[key]) > 1e-12):
                    print(f"{aspect}.{key}: {got[key]} != {e[key]}", file=sys.stderr)
                    return 1
        if set(result) != set(expected):
            print("aspect sets differ", file=sys.stderr)
            return 1
        print("oracle output matches")
        return 0
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
