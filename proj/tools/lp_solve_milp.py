#!/usr/bin/env python3
"""Reference MILP runner used by the external-solver adapter tests.

Reads an LP-format model, solves it with scipy's HiGHS-backed milp, and
writes a plain solution file:

    status optimal|feasible|infeasible|timeout|error
    objective <value>
    <variable> <value>

Usage: lp_solve_milp.py model.lp model.sol [time_limit_seconds]
"""

import math
import re
import sys

import numpy as np
from scipy import optimize, sparse


def tokenize(text):
    text = re.sub(r"\\[^\n]*", " ", text)  # strip comments
    return re.findall(r"<=|>=|=|[+\-:]|[A-Za-z0-9_.!#$%&()/,;?@'`{}|~\"]+", text)


KEYWORDS = {"minimize", "maximize", "subject", "to", "st", "bounds",
            "binaries", "binary", "generals", "end", "free"}


def is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


class Model:
    def __init__(self):
        self.names = []
        self.index = {}
        self.lb = []
        self.ub = []
        self.integral = []
        self.obj = {}
        self.maximize = False
        self.rows = []  # (coeffs dict, sense, rhs)

    def var(self, name):
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
            self.lb.append(0.0)
            self.ub.append(math.inf)
            self.integral.append(False)
        return self.index[name]


def parse_expression(toks, i, model):
    """Parses a linear expression; returns (coeffs, i) stopping before a
    relational operator or section keyword."""
    coeffs = {}
    sign, coef, have = 1.0, 1.0, False
    while i < len(toks):
        t = toks[i]
        low = t.lower()
        if t in ("<=", ">=", "="):
            break
        if low in KEYWORDS:
            break
        if t == "+":
            i += 1
            continue
        if t == "-":
            sign = -sign
            i += 1
            continue
        if is_number(t):
            coef = float(t)
            have = True
            i += 1
            continue
        # variable
        vi = model.var(t)
        coeffs[vi] = coeffs.get(vi, 0.0) + sign * (coef if have else 1.0)
        sign, coef, have = 1.0, 1.0, False
        i += 1
    return coeffs, i


def parse_lp(text):
    toks = tokenize(text)
    m = Model()
    i = 0
    head = toks[i].lower()
    m.maximize = head in ("maximize", "max")
    i += 1
    # optional objective label
    if i + 1 < len(toks) and toks[i + 1] == ":":
        i += 2
    m.obj, i = parse_expression(toks, i, m)
    assert toks[i].lower() in ("subject", "st"), "expected Subject To"
    i += 1
    if i < len(toks) and toks[i].lower() == "to":
        i += 1
    # constraints
    while i < len(toks) and toks[i].lower() not in ("bounds", "binaries",
                                                    "binary", "end"):
        assert toks[i + 1] == ":", f"expected row label at {toks[i]}"
        i += 2
        coeffs, i = parse_expression(toks, i, m)
        sense = toks[i]
        i += 1
        rhs_sign = 1.0
        if toks[i] in ("+", "-"):
            rhs_sign = -1.0 if toks[i] == "-" else 1.0
            i += 1
        rhs = rhs_sign * float(toks[i])
        i += 1
        m.rows.append((coeffs, sense, rhs))
    # bounds
    if toks[i].lower() == "bounds":
        i += 1
        while toks[i].lower() not in ("binaries", "binary", "end"):
            sign = 1.0
            if toks[i] in ("+", "-"):
                sign = -1.0 if toks[i] == "-" else 1.0
                i += 1
            if is_number(toks[i]):
                lb = sign * float(toks[i])
                assert toks[i + 1] == "<="
                vi = m.var(toks[i + 2])
                assert toks[i + 3] == "<="
                j = i + 4
                usign = 1.0
                if toks[j] in ("+", "-"):
                    usign = -1.0 if toks[j] == "-" else 1.0
                    j += 1
                m.lb[vi] = lb
                m.ub[vi] = usign * float(toks[j])
                i = j + 1
            else:
                vi = m.var(toks[i])
                if toks[i + 1].lower() == "free":
                    m.lb[vi], m.ub[vi] = -math.inf, math.inf
                    i += 2
                else:
                    op = toks[i + 1]
                    j = i + 2
                    s2 = 1.0
                    if toks[j] in ("+", "-"):
                        s2 = -1.0 if toks[j] == "-" else 1.0
                        j += 1
                    val = s2 * float(toks[j])
                    if op == "<=":
                        m.ub[vi] = val
                    else:
                        m.lb[vi] = val
                    i = j + 1
    if toks[i].lower() in ("binaries", "binary"):
        i += 1
        while toks[i].lower() != "end":
            vi = m.var(toks[i])
            m.integral[vi] = True
            m.lb[vi], m.ub[vi] = 0.0, 1.0
            i += 1
    assert toks[i].lower() == "end"
    return m


def main():
    lp_path, sol_path = sys.argv[1], sys.argv[2]
    tl = float(sys.argv[3]) if len(sys.argv) > 3 else 60.0
    with open(lp_path) as fh:
        m = parse_lp(fh.read())

    n = len(m.names)
    c = np.zeros(n)
    for vi, coef in m.obj.items():
        c[vi] = coef
    if m.maximize:
        c = -c

    if m.rows:
        data, ri, ci = [], [], []
        lo, hi = [], []
        for r, (coeffs, sense, rhs) in enumerate(m.rows):
            for vi, coef in coeffs.items():
                ri.append(r)
                ci.append(vi)
                data.append(coef)
            if sense == "<=":
                lo.append(-math.inf)
                hi.append(rhs)
            elif sense == ">=":
                lo.append(rhs)
                hi.append(math.inf)
            else:
                lo.append(rhs)
                hi.append(rhs)
        A = sparse.csc_matrix((data, (ri, ci)), shape=(len(m.rows), n))
        constraints = optimize.LinearConstraint(A, lo, hi)
    else:
        constraints = ()

    res = optimize.milp(
        c,
        constraints=constraints,
        integrality=np.array([1 if b else 0 for b in m.integral]),
        bounds=optimize.Bounds(m.lb, m.ub),
        options={"time_limit": tl},
    )

    status = {0: "optimal", 1: "timeout", 2: "infeasible",
              3: "error", 4: "error"}.get(res.status, "error")
    if status == "timeout" and res.x is not None:
        status = "feasible"
    with open(sol_path, "w") as out:
        out.write(f"status {status}\n")
        if res.x is not None:
            obj = float(np.dot(c, res.x))
            if m.maximize:
                obj = -obj
            out.write(f"objective {obj!r}\n")
            for name, val in zip(m.names, res.x):
                out.write(f"{name} {float(val)!r}\n")


if __name__ == "__main__":
    main()
