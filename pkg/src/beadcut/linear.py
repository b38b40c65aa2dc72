"""Exact feasibility of small linear systems over the unit box.

Systems are lists of integer rows ``(coefs, bound)`` meaning
``sum(coefs[i] * t[i]) <= bound`` with every ``t[i]`` in ``[0, 1]``.
Variables are removed by Fourier-Motzkin elimination in integer arithmetic;
rows that the box already implies are dropped at every stage, which keeps the
intermediate systems small for the handful of variables used here.
"""

from fractions import Fraction
from math import gcd

from .errors import InternalInvariantError


def _normalize(coefs, bound):
    g = gcd(*coefs, bound)
    if g > 1:
        return tuple(a // g for a in coefs), bound // g
    return tuple(coefs), bound


def _box_range(coefs):
    lo = sum(a for a in coefs if a < 0)
    hi = sum(a for a in coefs if a > 0)
    return lo, hi


def _prune(rows):
    """Deduplicate, drop box-implied rows; ``None`` if a row is box-infeasible."""
    best = {}
    for coefs, bound in rows:
        lo, hi = _box_range(coefs)
        if lo > bound:
            return None
        if hi <= bound:
            continue
        coefs, bound = _normalize(coefs, bound)
        prev = best.get(coefs)
        if prev is None or bound < prev:
            best[coefs] = bound
    return sorted(best.items())


def _eliminate_last(rows, dim):
    """Project ``rows`` over ``dim`` variables onto the first ``dim - 1``."""
    unit = [0] * dim
    unit[-1] = 1
    rows = list(rows) + [(tuple(unit), 1), (tuple(-a for a in unit), 0)]
    pos, neg, rest = [], [], []
    for coefs, bound in rows:
        a = coefs[-1]
        if a > 0:
            pos.append((coefs, bound))
        elif a < 0:
            neg.append((coefs, bound))
        else:
            rest.append((coefs[:-1], bound))
    for pc, pb in pos:
        pa = pc[-1]
        for nc, nb in neg:
            na = -nc[-1]
            coefs = tuple(na * x + pa * y for x, y in zip(pc[:-1], nc[:-1]))
            rest.append((coefs, na * pb + pa * nb))
    return _prune(rest)


def lexmin_in_unit_box(rows, dim):
    """Lexicographically least point of the system, or ``None`` if empty.

    >>> lexmin_in_unit_box([((1, 1), 1), ((-1, -1), -1), ((-1, 1), 0)], 2)
    (Fraction(1, 2), Fraction(1, 2))
    >>> lexmin_in_unit_box([((2,), -1)], 1) is None
    True
    """
    system = _prune(rows)
    if system is None:
        return None
    stages = [system]
    for v in range(dim, 0, -1):
        system = _eliminate_last(system, v)
        if system is None:
            return None
        stages.append(system)
    stages.reverse()
    # stages[v] constrains t[0 .. v-1]
    point = []
    for v in range(dim):
        lo, hi = Fraction(0), Fraction(1)
        for coefs, bound in stages[v + 1]:
            a = coefs[v]
            if a == 0:
                continue
            rhs = bound - sum(c * t for c, t in zip(coefs, point))
            limit = Fraction(rhs, 1) / a
            if a > 0:
                hi = min(hi, limit)
            else:
                lo = max(lo, limit)
        if lo > hi:
            raise InternalInvariantError("projection admitted a point that does not extend")
        point.append(lo)
    return tuple(point)
