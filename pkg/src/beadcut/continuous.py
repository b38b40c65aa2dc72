"""Envy-free division of the continuous cake a necklace induces.

Each bead is spread uniformly over its unit cell, so every player's value of
an interval is piecewise linear in its endpoints.  Two solvers are offered:

* :func:`solve_exact` walks the cells of the division simplex and settles each
  (cell, assignment) pair as an exact linear feasibility problem, so it
  returns a division with zero envy in rational arithmetic.
* :func:`solve_sperner` runs the owner-labelled Sperner construction on a
  Kuhn triangulation, refining the mesh until the measured envy at the
  barycentre of a fully labelled simplex drops to ``eps``.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import floor, lcm

from .errors import InternalInvariantError, PreconditionError
from .linear import lexmin_in_unit_box
from .model import EnvyReport, as_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PiecewiseCake:
    """``density[c][p]``: value per unit length of cell ``c`` to player ``p``."""

    density: tuple
    n_players: int

    @classmethod
    def from_necklace(cls, necklace):
        return cls(necklace.values, necklace.n_players)

    @property
    def length(self):
        return len(self.density)

    def total(self, player):
        return sum((cell[player] for cell in self.density), Fraction(0))

    def cumulative(self, player, x):
        """Value of ``[0, x]`` to ``player``."""
        x = as_fraction(x)
        if not 0 <= x <= self.length:
            raise IndexError(f"position {x} outside [0, {self.length}]")
        whole = floor(x)
        acc = sum((self.density[c][player] for c in range(whole)), Fraction(0))
        if whole < self.length:
            acc += self.density[whole][player] * (x - whole)
        return acc

    def value(self, player, lo, hi):
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo > hi:
            raise IndexError(f"empty interval [{lo}, {hi}] is reversed")
        return self.cumulative(player, hi) - self.cumulative(player, lo)

    def value_matrix(self, cuts):
        ends = [Fraction(0), *cuts, Fraction(self.length)]
        cum = [[self.cumulative(p, x) for x in ends] for p in range(self.n_players)]
        return tuple(
            tuple(cum[p][j + 1] - cum[p][j] for j in range(len(ends) - 1))
            for p in range(self.n_players)
        )

    def envy_report(self, cuts, assignment):
        return EnvyReport.from_matrix(self.value_matrix(cuts), assignment)


def build_cake(necklace):
    return PiecewiseCake.from_necklace(necklace)


@dataclass(frozen=True)
class ContinuousAllocation:
    cuts: tuple
    assignment: tuple
    certified_envy: Fraction
    # (mesh, measured envy, certified envy) per refinement level; Sperner only
    levels: tuple = field(default=(), compare=False)


def _integer_densities(cake):
    scale = lcm(*(v.denominator for cell in cake.density for v in cell), 1)
    dens = [[int(cell[p] * scale) for cell in cake.density] for p in range(cake.n_players)]
    prefix = []
    for row in dens:
        acc, out = 0, [0]
        for v in row:
            acc += v
            out.append(acc)
        prefix.append(out)
    return dens, prefix


def _cell_piece_values(cell, dens, prefix, k, n):
    """Affine piece values inside a cell.

    Returns ``vals[p][j] = (coefs, const)`` with piece ``j``'s value to ``p``
    equal to ``coefs . t + const`` where cut ``i`` sits at ``cell[i] + t[i]``.
    """
    d = n - 1
    vals = []
    for p in range(n):
        ends = [((0,) * d, 0)]
        for i, m in enumerate(cell):
            coefs = [0] * d
            coefs[i] = dens[p][m]
            ends.append((tuple(coefs), prefix[p][m]))
        ends.append(((0,) * d, prefix[p][k]))
        row = []
        for j in range(n):
            (lc, lk), (rc, rk) = ends[j], ends[j + 1]
            row.append((tuple(r - l for r, l in zip(rc, lc)), rk - lk))
        vals.append(row)
    return vals


def _envy_rows(vals, player, piece, n):
    """Rows saying ``player`` weakly prefers ``piece``; ``None`` if box-infeasible."""
    own_c, own_k = vals[player][piece]
    rows = []
    for j in range(n):
        if j == piece:
            continue
        oc, ok = vals[player][j]
        coefs = tuple(a - b for a, b in zip(oc, own_c))
        bound = own_k - ok
        if sum(a for a in coefs if a < 0) > bound:
            return None
        if sum(a for a in coefs if a > 0) > bound:
            rows.append((coefs, bound))
    return rows


def envy_free_divisions(cake):
    """Yield one envy-free allocation per feasible (cell, assignment) pair.

    Cells are visited in lexicographic order and assignments in lexicographic
    order within a cell; each yielded point is the lexicographically least
    point of its pair's feasible region.
    """
    n, k = cake.n_players, cake.length
    if n == 1:
        yield ContinuousAllocation((), (0,), Fraction(0))
        return
    if k == 0:
        yield ContinuousAllocation((Fraction(0),) * (n - 1), tuple(range(n)), Fraction(0))
        return

    d = n - 1
    dens, prefix = _integer_densities(cake)
    for cell in combinations_with_replacement(range(k), d):
        vals = _cell_piece_values(cell, dens, prefix, k, n)
        options = [[_envy_rows(vals, p, j, n) for j in range(n)] for p in range(n)]
        order_rows = []
        for i in range(d - 1):
            if cell[i] == cell[i + 1]:
                coefs = [0] * d
                coefs[i], coefs[i + 1] = 1, -1
                order_rows.append((tuple(coefs), 0))
        for assignment in permutations(range(n)):
            parts = [options[p][assignment[p]] for p in range(n)]
            if any(rows is None for rows in parts):
                continue
            rows = [r for part in parts for r in part] + order_rows
            point = lexmin_in_unit_box(rows, d)
            if point is None:
                continue
            cuts = tuple(m + t for m, t in zip(cell, point))
            report = cake.envy_report(cuts, assignment)
            if report.max_envy != 0:
                raise InternalInvariantError(
                    f"exact solver produced envy {report.max_envy} at cuts {cuts}"
                )
            yield ContinuousAllocation(cuts, assignment, Fraction(0))


def solve_exact(cake):
    """The first allocation of :func:`envy_free_divisions`: zero envy, exact cuts."""
    for division in envy_free_divisions(cake):
        return division
    raise InternalInvariantError("no envy-free cell found; the cells cover the simplex")


def preferred_piece(matrix_row):
    """Lowest index among the pieces of maximal value."""
    best = max(matrix_row)
    return matrix_row.index(best)


def kuhn_simplices(mesh, dim):
    """Kuhn simplices of ``{0 <= y_0 <= ... <= y_{dim-1} <= mesh}``.

    Each simplex is a tuple of ``dim + 1`` integer vertices ordered by
    coordinate sum, enumerated in lexicographic order of (base, permutation).
    """
    for base in combinations_with_replacement(range(mesh), dim):
        ties = [i for i in range(dim - 1) if base[i] == base[i + 1]]
        for perm in permutations(range(dim)):
            pos = {axis: step for step, axis in enumerate(perm)}
            if any(pos[i + 1] > pos[i] for i in ties):
                continue
            vertex = list(base)
            verts = [tuple(vertex)]
            for axis in perm:
                vertex[axis] += 1
                verts.append(tuple(vertex))
            yield tuple(verts)


def vertex_owner(vertex, n):
    return sum(vertex) % n


def solve_sperner(cake, eps, max_level=16):
    """An ``eps``-envy-free allocation from Sperner labelling.

    The mesh doubles every level.  The returned allocation is the best
    barycentre seen so far, so ``certified_envy`` never increases between
    levels.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    n, k = cake.n_players, cake.length
    if n == 1:
        return ContinuousAllocation((), (0,), Fraction(0), ((1, Fraction(0), Fraction(0)),))
    hungry = [p for p in range(n) if cake.total(p) <= 0]
    if hungry:
        raise PreconditionError(
            f"players {hungry} value the whole cake at zero; Sperner labelling "
            "needs every player to prefer some nonempty piece"
        )

    d = n - 1
    dens, prefix = _integer_densities(cake)
    best = None
    levels = []
    mesh = 1
    for level in range(max_level + 1):
        labels = {}

        def scaled_cumulative(p, y):
            # mesh * (scaled value of [0, y * k / mesh]), in integers
            cell, rem = divmod(y * k, mesh)
            out = mesh * prefix[p][cell]
            if cell < k:
                out += dens[p][cell] * rem
            return out

        def label(vertex):
            if vertex not in labels:
                p = vertex_owner(vertex, n)
                ends = [0, *(scaled_cumulative(p, y) for y in vertex), mesh * prefix[p][k]]
                row = [b - a for a, b in zip(ends, ends[1:])]
                labels[vertex] = preferred_piece(row)
            return labels[vertex]

        found = None
        for simplex in kuhn_simplices(mesh, d):
            if len({label(v) for v in simplex}) == n:
                found = simplex
                break
        if found is None:
            raise InternalInvariantError(
                f"no fully labelled simplex at mesh {mesh}; Sperner's lemma guarantees one"
            )
        assignment = [None] * n
        for v in found:
            assignment[vertex_owner(v, n)] = label(v)
        cuts = tuple(
            Fraction(sum(v[i] for v in found) * k, mesh * n) for i in range(d)
        )
        measured = cake.envy_report(cuts, assignment).max_envy
        if best is None or measured < best.certified_envy:
            best = ContinuousAllocation(cuts, tuple(assignment), measured)
        levels.append((mesh, measured, best.certified_envy))
        logger.debug("mesh %d: measured envy %s", mesh, measured)
        if best.certified_envy <= eps:
            return ContinuousAllocation(
                best.cuts, best.assignment, best.certified_envy, tuple(levels)
            )
        mesh *= 2
    raise InternalInvariantError(
        f"envy {best.certified_envy} still above {eps} after {max_level} refinements"
    )
