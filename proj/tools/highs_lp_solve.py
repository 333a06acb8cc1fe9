#!/usr/bin/env python3
"""Solve a flexbench LP file with HiGHS (via scipy) and write a solution file.

usage: highs_lp_solve.py MODEL.lp SOLUTION.sol [GAP] [TIME_LIMIT]

Reads the subset of the CPLEX LP format that flexbench writes.
"""
import math
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix


def parse_terms(tokens):
    terms, const = [], 0.0
    sign, i = 1.0, 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
            i += 1
            continue
        value = float(tok)
        if i + 1 < len(tokens) and tokens[i + 1] not in "+-":
            terms.append((tokens[i + 1], sign * value))
            i += 2
        else:
            const += sign * value
            i += 1
        sign = 1.0
    return terms, const


def read_lp(path):
    section, rows, current = None, [], None
    obj_tokens, bounds, binaries = [], {}, []
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("\\"):
                continue
            head = line.lower()
            if head in ("minimize", "subject to", "bounds", "binaries", "end"):
                section = head
                continue
            if section == "minimize":
                obj_tokens += line.split(":", 1)[-1].split() if ":" in line else line.split()
            elif section == "subject to":
                if ":" in line:
                    name, rest = line.split(":", 1)
                    current = [name.strip(), rest.split()]
                    rows.append(current)
                else:
                    current[1] += line.split()
            elif section == "bounds":
                t = line.split()
                if len(t) == 2 and t[1] == "free":
                    bounds[t[0]] = (-math.inf, math.inf)
                elif len(t) == 3 and t[1] == "=":
                    bounds[t[0]] = (float(t[2]), float(t[2]))
                elif len(t) == 3 and t[1] == ">=":
                    bounds[t[0]] = (float(t[2]), math.inf)
                elif len(t) == 5:
                    bounds[t[2]] = (float(t[0]), float(t[4]))
                else:
                    raise ValueError("unsupported bound line: " + line)
            elif section == "binaries":
                binaries += line.split()
    return obj_tokens, rows, bounds, binaries


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    gap = float(argv[3]) if len(argv) > 3 else 1e-4
    limit = float(argv[4]) if len(argv) > 4 else 300.0
    obj_tokens, rows, bounds, binaries = read_lp(argv[1])

    names, index = [], {}

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    obj_terms, offset = parse_terms(obj_tokens)
    parsed = []
    for name, tokens in rows:
        op = next(i for i, t in enumerate(tokens) if t in ("<=", ">=", "="))
        terms, _ = parse_terms(tokens[:op])
        parsed.append((terms, tokens[op], float(tokens[op + 1])))
        for v, _ in terms:
            var(v)
    for v, _ in obj_terms:
        var(v)
    for v in list(bounds) + binaries:
        var(v)

    n = len(names)
    c = np.zeros(n)
    for v, coef in obj_terms:
        c[index[v]] += coef
    lo, hi = np.zeros(n), np.full(n, math.inf)
    integrality = np.zeros(n)
    for v in binaries:
        lo[index[v]], hi[index[v]], integrality[index[v]] = 0.0, 1.0, 1
    for v, (a, b) in bounds.items():
        lo[index[v]], hi[index[v]] = a, b

    constraints = []
    if parsed:
        A = lil_matrix((len(parsed), n))
        rl, ru = np.full(len(parsed), -math.inf), np.full(len(parsed), math.inf)
        for i, (terms, op, rhs) in enumerate(parsed):
            for v, coef in terms:
                A[i, index[v]] += coef
            if op in ("<=", "="):
                ru[i] = rhs
            if op in (">=", "="):
                rl[i] = rhs
        constraints = [LinearConstraint(A.tocsr(), rl, ru)]

    res = milp(c, constraints=constraints, integrality=integrality, bounds=Bounds(lo, hi),
               options={"mip_rel_gap": gap, "time_limit": limit, "presolve": True})
    status = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "limit")
    with open(argv[2], "w") as out:
        out.write("status %s\n" % status)
        if res.x is not None:
            out.write("objective %.17g\n" % (res.fun + offset))
            for name, value in zip(names, res.x):
                if integrality[index[name]]:
                    value = float(round(value))
                out.write("%s %.17g\n" % (name, value))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
