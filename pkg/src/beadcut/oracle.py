"""Exhaustive search over discrete divisions.

Both searches visit cutsets in lexicographic order and assignments in
lexicographic order, keeping the first allocation that attains the minimum
of the maximum envy; they stop early once an envy-free allocation is found,
since nothing later can beat it.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from math import comb, factorial, lcm

from .errors import BudgetExceeded
from .grid import LatticeCutSet, grid_envy_report
from .model import Allocation, envy_report

DEFAULT_BUDGET = 10**7


def default_budget():
    return int(os.environ.get("BEADCUT_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class OracleResult:
    best_allocation: object  # Allocation, or LatticeCutSet for grids
    best_assignment: tuple
    report: object
    min_max_envy: Fraction
    envy_free_exists: bool
    search_space_size: int


def cutset_count(length, n_players):
    """Nondecreasing ``n - 1`` cuts with values in ``0 .. length``."""
    return comb(length + n_players - 1, n_players - 1)


def _scaled(values):
    scale = lcm(*(v.denominator for v in values), 1)
    return scale


def _min_envy_assignment(matrix, perms):
    """Lexicographically first assignment minimising max envy for one matrix."""
    row_max = [max(row) for row in matrix]
    best, best_perm = None, None
    for perm in perms:
        worst = max(row_max[p] - matrix[p][perm[p]] for p in range(len(perm)))
        if best is None or worst < best:
            best, best_perm = worst, perm
            if worst == 0:
                break
    return best, best_perm


def oracle1d(necklace, budget=None):
    budget = default_budget() if budget is None else budget
    n, k = necklace.n_players, necklace.length
    size = cutset_count(k, n) * factorial(n)
    if size > budget:
        raise BudgetExceeded(size, budget)
    scale = _scaled([v for bead in necklace.values for v in bead])
    prefix = [[int(necklace.cumulative(p, x) * scale) for x in range(k + 1)] for p in range(n)]
    perms = list(permutations(range(n)))
    best = None
    for cuts in combinations_with_replacement(range(k + 1), n - 1):
        ends = (0, *cuts, k)
        matrix = [[prefix[p][ends[j + 1]] - prefix[p][ends[j]] for j in range(n)]
                  for p in range(n)]
        worst, perm = _min_envy_assignment(matrix, perms)
        if best is None or worst < best[0]:
            best = (worst, cuts, perm)
            if worst == 0:
                break
    _, cuts, perm = best
    alloc = Allocation(cuts, perm)
    report = envy_report(necklace, alloc)
    return OracleResult(alloc, perm, report, report.max_envy, report.max_envy == 0, size)


def oracle2d(grid, budget=None):
    """Exhaustive search over per-row cut vectors respecting per-row order.

    Cutsets are ordered row-major: first by the bottom row's cut vector, then
    the next row's, and so on.
    """
    budget = default_budget() if budget is None else budget
    n, k, l = grid.n_players, grid.rows, grid.cols
    per_row = list(combinations_with_replacement(range(l + 1), n - 1))
    size = len(per_row) ** k * factorial(n)
    if size > budget:
        raise BudgetExceeded(size, budget)
    scale = _scaled([v for row in grid.values for sq in row for v in sq])
    prefix = [
        [[0] + [int(sum(grid.values[r][c][p] for c in range(x)) * scale) for x in range(1, l + 1)]
         for r in range(k)]
        for p in range(n)
    ]
    # row_vals[r][vec][p][j]
    row_vals = []
    for r in range(k):
        table = []
        for vec in per_row:
            ends = (0, *vec, l)
            table.append([[prefix[p][r][ends[j + 1]] - prefix[p][r][ends[j]] for j in range(n)]
                          for p in range(n)])
        row_vals.append(table)
    perms = list(permutations(range(n)))
    best = None
    for choice in product(range(len(per_row)), repeat=k):
        matrix = [[sum(row_vals[r][choice[r]][p][j] for r in range(k)) for j in range(n)]
                  for p in range(n)]
        worst, perm = _min_envy_assignment(matrix, perms)
        if best is None or worst < best[0]:
            best = (worst, choice, perm)
            if worst == 0:
                break
    _, choice, perm = best
    cuts = LatticeCutSet(
        tuple(tuple(per_row[choice[r]][i] for r in range(k)) for i in range(n - 1)), k, l
    )
    report = grid_envy_report(grid, cuts.cuts, perm)
    return OracleResult(cuts, perm, report, report.max_envy, report.max_envy == 0, size)
