"""From a continuous envy-free division to a discrete one.

Every continuous cut is moved to the nearest integer, with exact
half-integers always moving right.  The assignment is carried over
unchanged, which bounds each player's envy strictly below twice the largest
single bead value.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .continuous import ContinuousAllocation, build_cake, solve_exact, solve_sperner
from .errors import PreconditionError
from .model import Allocation, as_fraction, envy_report


@dataclass(frozen=True)
class RoundingTrace:
    continuous_cuts: tuple
    rounded_cuts: tuple
    per_cut_shift: tuple
    envy_before: Fraction
    envy_after: Fraction


def round_cut(x):
    """Nearest integer, halves to the right.

    >>> round_cut(Fraction(6, 5)), round_cut(Fraction(5, 2)), round_cut(3)
    (1, 3, 3)
    """
    return floor(as_fraction(x) + Fraction(1, 2))


def round_cuts(cuts):
    return tuple(round_cut(x) for x in cuts)


def _continuous_division(necklace, backend, eps):
    cake = build_cake(necklace)
    if backend == "exact":
        if eps is not None:
            raise PreconditionError("eps only applies to the sperner backend")
        return cake, solve_exact(cake)
    if backend != "sperner":
        raise PreconditionError(f"unknown backend {backend!r}")
    if eps is None:
        raise PreconditionError("the sperner backend requires eps")
    n = necklace.n_players
    active = [p for p in range(n) if necklace.total(p) > 0]
    idle = [p for p in range(n) if necklace.total(p) == 0]
    if not idle:
        return cake, solve_sperner(cake, eps)
    # Players who value nothing take empty pieces parked at position 0.
    assignment = [None] * n
    for offset, p in enumerate(idle):
        assignment[p] = offset
    if not active:
        cuts = (Fraction(0),) * (n - 1)
        return cake, _with_cuts(cuts, assignment, Fraction(0))
    sub = type(cake)(
        tuple(tuple(cell[p] for p in active) for cell in cake.density), len(active)
    )
    inner = solve_sperner(sub, eps)
    for q, p in enumerate(active):
        assignment[p] = len(idle) + inner.assignment[q]
    cuts = (Fraction(0),) * len(idle) + inner.cuts
    return cake, _with_cuts(cuts, assignment, inner.certified_envy, inner.levels)


def _with_cuts(cuts, assignment, envy, levels=()):
    return ContinuousAllocation(tuple(cuts), tuple(assignment), envy, levels)


def divide_general(necklace, backend="exact", eps=None):
    """Discrete allocation with max envy below ``2 s`` (``2 s + eps`` for sperner).

    Returns ``(allocation, trace)``.
    """
    cake, division = _continuous_division(necklace, backend, eps)
    rounded = round_cuts(division.cuts)
    alloc = Allocation(rounded, division.assignment)
    before = cake.envy_report(division.cuts, division.assignment).max_envy
    after = envy_report(necklace, alloc).max_envy
    trace = RoundingTrace(
        continuous_cuts=tuple(division.cuts),
        rounded_cuts=rounded,
        per_cut_shift=tuple(r - c for r, c in zip(rounded, division.cuts)),
        envy_before=before,
        envy_after=after,
    )
    return alloc, trace


def divide_binary(necklace):
    """A 1-envy-free allocation for 0/1 valuations."""
    if not necklace.is_binary():
        raise PreconditionError("divide_binary needs every bead value to be 0 or 1")
    alloc, _ = divide_general(necklace, backend="exact")
    return alloc
