"""Necklaces, divisions, allocations and the envy calculus.

Every quantity is an exact :class:`fractions.Fraction`.  A necklace of ``k``
beads occupies the interval ``[0, k]`` with bead ``b`` sitting on
``[b, b + 1]``; cuts are positions in ``[0, k]`` and ``n - 1`` nondecreasing
cuts split it into ``n`` contiguous pieces (possibly empty).

Assignments are stored player-major: ``assignment[p]`` is the index of the
piece given to player ``p``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate

from .errors import PreconditionError, ShapeError


def as_fraction(value):
    """Convert ints, Fractions and decimal/ratio strings exactly.

    Floats are rejected: they would smuggle binary rounding into comparisons
    that must be exact.

    >>> as_fraction("0.1")
    Fraction(1, 10)
    >>> as_fraction("7/2")
    Fraction(7, 2)
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not valuations")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} exactly to a rational")


@dataclass(frozen=True)
class Necklace:
    """Ordered beads; ``values[b][p]`` is player ``p``'s value for bead ``b``."""

    values: tuple
    n_players: int
    _prefix: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in bead) for bead in self.values)
        if self.n_players < 1:
            raise PreconditionError("a necklace needs at least one player")
        for b, bead in enumerate(rows):
            if len(bead) != self.n_players:
                raise ShapeError(
                    f"bead {b} has {len(bead)} values for {self.n_players} players"
                )
            if any(v < 0 for v in bead):
                raise PreconditionError(f"bead {b} carries a negative value")
        object.__setattr__(self, "values", rows)
        prefix = tuple(
            tuple(accumulate((bead[p] for bead in rows), initial=Fraction(0)))
            for p in range(self.n_players)
        )
        object.__setattr__(self, "_prefix", prefix)

    @classmethod
    def from_values(cls, beads, n_players=None):
        beads = [list(b) for b in beads]
        if n_players is None:
            if not beads:
                raise PreconditionError("n_players is required for an empty necklace")
            n_players = len(beads[0])
        return cls(tuple(tuple(b) for b in beads), n_players)

    @classmethod
    def monolithic(cls, owners, n_players, value=1):
        """Beads each valued ``value`` by exactly the listed owner."""
        value = as_fraction(value)
        beads = []
        for owner in owners:
            bead = [Fraction(0)] * n_players
            if owner is not None:
                bead[owner] = value
            beads.append(bead)
        return cls.from_values(beads, n_players)

    @property
    def length(self):
        return len(self.values)

    @property
    def max_bead_value(self):
        return max((v for bead in self.values for v in bead), default=Fraction(0))

    def total(self, player):
        return self._prefix[player][-1]

    def cumulative(self, player, position):
        """Value of the integral prefix ``[0, position]`` to ``player``."""
        return self._prefix[player][position]

    def is_binary(self):
        return all(v in (0, 1) for bead in self.values for v in bead)

    def is_monolithic(self):
        return all(sum(1 for v in bead if v > 0) <= 1 for bead in self.values)


@dataclass(frozen=True)
class Allocation:
    """A cutset together with a player -> piece bijection."""

    cuts: tuple
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        object.__setattr__(self, "assignment", tuple(self.assignment))
        n = len(self.assignment)
        if len(self.cuts) != n - 1:
            raise ShapeError(f"{len(self.cuts)} cuts for {n} players")
        if sorted(self.assignment) != list(range(n)):
            raise PreconditionError(f"assignment {self.assignment} is not a bijection")
        if any(a > b for a, b in zip(self.cuts, self.cuts[1:])):
            raise PreconditionError(f"cuts {self.cuts} are not nondecreasing")

    @property
    def n_players(self):
        return len(self.assignment)

    def owner_of_piece(self, piece):
        return self.assignment.index(piece)


def piece_bounds(cuts, length, piece):
    lo = cuts[piece - 1] if piece > 0 else 0
    hi = cuts[piece] if piece < len(cuts) else length
    return lo, hi


def piece_value(necklace, player, lo, hi):
    """Sum of ``player``'s values for beads ``lo .. hi - 1``."""
    if not 0 <= player < necklace.n_players:
        raise IndexError(f"player {player} out of range")
    if not (isinstance(lo, int) and isinstance(hi, int)):
        raise TypeError("discrete piece bounds must be integers")
    if not 0 <= lo <= hi <= necklace.length:
        raise IndexError(f"piece [{lo}, {hi}] outside necklace of length {necklace.length}")
    return necklace.cumulative(player, hi) - necklace.cumulative(player, lo)


@dataclass(frozen=True)
class EnvyReport:
    value_matrix: tuple
    assignment: tuple
    envy: tuple
    max_envy: Fraction

    @classmethod
    def from_matrix(cls, matrix, assignment):
        matrix = tuple(tuple(row) for row in matrix)
        assignment = tuple(assignment)
        if len(matrix) != len(assignment):
            raise ShapeError("value matrix and assignment disagree on player count")
        envy = tuple(
            max(Fraction(0), max(row) - row[assignment[p]])
            for p, row in enumerate(matrix)
        )
        return cls(matrix, assignment, envy, max(envy, default=Fraction(0)))

    @property
    def envy_free(self):
        return self.max_envy == 0

    def envious_players(self):
        return [p for p, e in enumerate(self.envy) if e > 0]


def value_matrix(necklace, cuts):
    n = len(cuts) + 1
    if n != necklace.n_players:
        raise ShapeError(f"{len(cuts)} cuts for {necklace.n_players} players")
    bounds = [piece_bounds(cuts, necklace.length, j) for j in range(n)]
    return tuple(
        tuple(piece_value(necklace, p, lo, hi) for lo, hi in bounds)
        for p in range(n)
    )


def envy_report(necklace, alloc):
    if alloc.n_players != necklace.n_players:
        raise ShapeError(
            f"allocation for {alloc.n_players} players on a "
            f"{necklace.n_players}-player necklace"
        )
    if alloc.cuts and not 0 <= alloc.cuts[0] <= alloc.cuts[-1] <= necklace.length:
        raise ShapeError(f"cuts {alloc.cuts} fall outside [0, {necklace.length}]")
    return EnvyReport.from_matrix(value_matrix(necklace, alloc.cuts), alloc.assignment)


def is_eps_envy_free(report, eps):
    eps = as_fraction(eps)
    if eps < 0:
        raise PreconditionError("eps must be nonnegative")
    return report.max_envy <= eps
