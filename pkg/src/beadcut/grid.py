"""Envy-free division of a grid of indivisible squares.

Rows are numbered from the bottom; square ``(r, c)`` covers
``[c, c + 1] x [r, r + 1]``.  A cut is stored as one column position per
row, consecutive rows being joined by a horizontal run along the lattice line
between them.  Piece ``j`` in row ``r`` is the interval between cut ``j - 1``
and cut ``j`` (the grid edges for the outermost pieces).

:func:`solve_grid` starts from an exact envy-free division by vertical cuts
of the column-projected cake, then slides the fractional edges to lattice
positions while keeping the allocation envy-free.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import floor

from .continuous import build_cake, envy_free_divisions
from .errors import InternalInvariantError, PreconditionError, ShapeError
from .model import EnvyReport, Necklace, as_fraction
from .rounding import divide_general

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """``values[r][c][p]`` is player ``p``'s value of square ``(r, c)``."""

    values: tuple
    n_players: int

    def __post_init__(self):
        rows = tuple(
            tuple(tuple(as_fraction(v) for v in sq) for sq in row) for row in self.values
        )
        if self.n_players < 1:
            raise PreconditionError("a grid needs at least one player")
        if not rows or not rows[0]:
            raise ShapeError("a grid needs at least one row and one column")
        width = len(rows[0])
        for r, row in enumerate(rows):
            if len(row) != width:
                raise ShapeError(f"row {r} has {len(row)} squares, expected {width}")
            for c, sq in enumerate(row):
                if len(sq) != self.n_players:
                    raise ShapeError(f"square ({r}, {c}) has {len(sq)} values")
                if any(v < 0 for v in sq):
                    raise PreconditionError(f"square ({r}, {c}) has a negative value")
        object.__setattr__(self, "values", rows)

    @classmethod
    def from_owners(cls, owners, n_players, values=1):
        """Monolithic grid from a row-major owner table (``None`` = nobody).

        ``values`` is either a scalar used for every owned square or a table
        of the same shape.
        """
        table = []
        for r, row in enumerate(owners):
            out = []
            for c, owner in enumerate(row):
                v = values if not isinstance(values, (list, tuple)) else values[r][c]
                sq = [Fraction(0)] * n_players
                if owner is not None:
                    sq[owner] = as_fraction(v)
                out.append(tuple(sq))
            table.append(tuple(out))
        return cls(tuple(table), n_players)

    @property
    def rows(self):
        return len(self.values)

    @property
    def cols(self):
        return len(self.values[0])

    def owner(self, r, c):
        """The single player valuing ``(r, c)``, or ``None`` if nobody does."""
        wanted = [p for p, v in enumerate(self.values[r][c]) if v > 0]
        if len(wanted) > 1:
            raise PreconditionError(f"square ({r}, {c}) is valued by players {wanted}")
        return wanted[0] if wanted else None

    def square_value(self, r, c):
        return max(self.values[r][c])

    def is_monolithic(self):
        return all(
            sum(1 for v in sq if v > 0) <= 1 for row in self.values for sq in row
        )

    def cumulative(self, player, r, x):
        """Value to ``player`` of ``[0, x]`` within row ``r``."""
        row = self.values[r]
        whole = floor(x)
        acc = sum((row[c][player] for c in range(whole)), Fraction(0))
        if whole < len(row):
            acc += row[whole][player] * (x - whole)
        return acc


def project_columns(grid):
    """Necklace whose bead ``c`` carries column ``c``'s per-player totals."""
    beads = [
        [sum((grid.values[r][c][p] for r in range(grid.rows)), Fraction(0))
         for p in range(grid.n_players)]
        for c in range(grid.cols)
    ]
    return Necklace.from_values(beads, grid.n_players)


def divide_by_columns(grid, backend="exact", eps=None):
    """Vertical-cut division of the projected necklace; see ``divide_general``."""
    return divide_general(project_columns(grid), backend=backend, eps=eps)


def piece_interval(positions, cols, piece, r):
    lo = positions[piece - 1][r] if piece > 0 else 0
    hi = positions[piece][r] if piece < len(positions) else cols
    return lo, hi


def grid_value_matrix(grid, positions):
    """``m[p][j]``: player ``p``'s value of piece ``j`` under per-row cut positions."""
    n = len(positions) + 1
    out = []
    for p in range(grid.n_players):
        row_vals = []
        for j in range(n):
            total = Fraction(0)
            for r in range(grid.rows):
                lo, hi = piece_interval(positions, grid.cols, j, r)
                total += grid.cumulative(p, r, hi) - grid.cumulative(p, r, lo)
            row_vals.append(total)
        out.append(tuple(row_vals))
    return tuple(out)


def grid_envy_report(grid, positions, assignment):
    if len(positions) + 1 != grid.n_players:
        raise ShapeError(f"{len(positions)} cuts for {grid.n_players} players")
    return EnvyReport.from_matrix(grid_value_matrix(grid, positions), assignment)


@dataclass(frozen=True)
class LatticeCutSet:
    """``cuts[i][r]``: integral column of cut ``i`` in row ``r``."""

    cuts: tuple
    rows: int
    cols: int

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(tuple(c) for c in self.cuts))

    @classmethod
    def vertical(cls, columns, rows, cols):
        return cls(tuple((x,) * rows for x in columns), rows, cols)

    def path(self, i):
        """Lattice polyline of cut ``i`` from the bottom edge to the top edge."""
        xs = self.cuts[i]
        pts = [(xs[0], 0)]
        for r, x in enumerate(xs):
            if (x, r) != pts[-1]:
                pts.append((x, r))
            pts.append((x, r + 1))
        return pts


@dataclass
class VerifyResult:
    valid: bool
    diagnostics: list
    strongly_connected: list = field(default_factory=list)
    weakly_connected: list = field(default_factory=list)

    @property
    def barely_connected(self):
        return any(w and not s for s, w in zip(self.strongly_connected, self.weakly_connected))

    def __bool__(self):
        return self.valid


def _piece_connectivity(cuts, piece):
    n_rows = cuts.rows
    spans = [piece_interval(cuts.cuts, cuts.cols, piece, r) for r in range(n_rows)]
    cells = {(r, c) for r, (lo, hi) in enumerate(spans) for c in range(lo, hi)}
    strong = False
    if cells:
        start = min(cells)
        seen, stack = {start}, [start]
        while stack:
            r, c = stack.pop()
            for nb in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
                if nb in cells and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        strong = len(seen) == len(cells)
    # closed row strips, degenerate ones being segments of the bounding cuts
    weak = all(
        max(spans[r][0], spans[r + 1][0]) <= min(spans[r][1], spans[r + 1][1])
        for r in range(n_rows - 1)
    )
    return strong, weak


def verify_lattice_cuts(grid, cuts):
    """Check that ``cuts`` are non-crossing lattice cuts of ``grid``.

    Per-row storage makes every cut a bottom-to-top edge path by
    construction, so validity reduces to shape, range and per-row order.
    Connectivity of the pieces is reported but does not affect validity.
    """
    problems = []
    if cuts.rows != grid.rows or cuts.cols != grid.cols:
        problems.append(
            f"cut set is {cuts.rows}x{cuts.cols} but grid is {grid.rows}x{grid.cols}"
        )
    for i, xs in enumerate(cuts.cuts):
        if len(xs) != grid.rows:
            problems.append(f"cut {i} has {len(xs)} row positions, expected {grid.rows}")
            continue
        for r, x in enumerate(xs):
            if not isinstance(x, int) or isinstance(x, bool):
                problems.append(f"cut {i} row {r}: position {x!r} is not a lattice column")
            elif not 0 <= x <= grid.cols:
                problems.append(f"cut {i} row {r}: position {x} outside [0, {grid.cols}]")
    if problems:
        return VerifyResult(False, problems)
    for i in range(len(cuts.cuts) - 1):
        for r in range(grid.rows):
            if cuts.cuts[i][r] > cuts.cuts[i + 1][r]:
                problems.append(
                    f"cuts {i} and {i + 1} cross in row {r} "
                    f"({cuts.cuts[i][r]} > {cuts.cuts[i + 1][r]})"
                )
    strong, weak = [], []
    for j in range(len(cuts.cuts) + 1):
        s, w = _piece_connectivity(cuts, j)
        strong.append(s)
        weak.append(w)
    return VerifyResult(not problems, problems, strong, weak)


def _frac(x):
    return x.denominator != 1


@dataclass
class SlidingState:
    """Fractional per-row cut positions during the sliding phase."""

    grid: GridSpec
    positions: list
    assignment: tuple

    @property
    def n_pieces(self):
        return len(self.positions) + 1

    def interval(self, piece, r):
        return piece_interval(self.positions, self.grid.cols, piece, r)

    def piece_of(self, player):
        return self.assignment[player]

    def player_of(self, piece):
        return self.assignment.index(piece)

    def segments(self, r, c):
        """Pieces with positive length inside square ``(r, c)``: ``(piece, lo, hi)``."""
        out = []
        for j in range(self.n_pieces):
            lo, hi = self.interval(j, r)
            lo, hi = max(lo, c), min(hi, c + 1)
            if lo < hi:
                out.append((j, lo, hi))
        return out

    def part(self, player, r, c):
        lo, hi = self.interval(self.piece_of(player), r)
        return max(Fraction(0), min(hi, c + 1) - max(lo, c))

    def contesters(self, r, c):
        return sorted(self.player_of(j) for j, _, _ in self.segments(r, c))

    def edges_inside(self, r, c):
        return [i for i in range(len(self.positions)) if c < self.positions[i][r] < c + 1]

    def has_fractional_edge(self, r, c):
        return bool(self.edges_inside(r, c))

    def nonintegral_count(self):
        """Distinct non-integral edge positions summed over rows."""
        return sum(
            len({x[r] for x in self.positions if _frac(x[r])})
            for r in range(self.grid.rows)
        )

    def owner_cake(self, owner, player):
        """Value to ``owner`` of the squares ``player``'s piece holds."""
        j = self.piece_of(player)
        return sum(
            (self.grid.cumulative(owner, r, hi) - self.grid.cumulative(owner, r, lo)
             for r in range(self.grid.rows)
             for lo, hi in [self.interval(j, r)]),
            Fraction(0),
        )

    def envy_cap(self, owner, receiver):
        """How much more ``owner``-cake ``receiver`` may take before ``owner`` envies."""
        return self.owner_cake(owner, owner) - self.owner_cake(owner, receiver)

    def envy_report(self):
        return grid_envy_report(self.grid, self.positions, self.assignment)

    def absorb(self, r, c, player):
        """Push every edge inside ``(r, c)`` off the square so ``player`` holds it."""
        j = self.piece_of(player)
        for i in self.edges_inside(r, c):
            self.positions[i][r] = Fraction(c) if i < j else Fraction(c + 1)

    def to_dict(self):
        return {
            "positions": [[str(x) for x in cut] for cut in self.positions],
            "assignment": list(self.assignment),
            "nonintegralEdges": self.nonintegral_count(),
        }


@dataclass(frozen=True)
class DonationEvent:
    kind: str  # exhausted | integral | saturated | partial
    delta: Fraction


def donation_limits(state, square, giver, receiver):
    """Lengths after which the giver's part empties / a moving edge turns integral."""
    r, c = square
    gp, rp = state.piece_of(giver), state.piece_of(receiver)
    g_lo, g_hi = state.interval(gp, r)
    exhaust = min(g_hi, c + 1) - max(g_lo, c)
    moving = range(gp, rp) if gp < rp else range(rp, gp)
    xs = [state.positions[i][r] for i in moving]
    if gp < rp:
        integral = min((x - floor(x) if _frac(x) else Fraction(0)) for x in xs)
    else:
        integral = min((floor(x) + 1 - x if _frac(x) else Fraction(0)) for x in xs)
    return exhaust, integral


def donate(state, square, giver, receiver, cap=None, amount=None):
    """Slide the edges of ``square`` so ``giver``'s part flows to ``receiver``.

    The block of edges between the two parts moves at unit speed; parts in
    between keep their size.  Movement stops at the first of: the giver's
    part emptying, a moving edge reaching a lattice column, the receiver's
    owner-cake growing by ``cap`` (a value; ``None`` for no cap), or
    ``amount`` (a length).
    """
    r, c = square
    owner = state.grid.owner(r, c)
    players = state.contesters(r, c)
    if giver not in players or receiver not in players or giver == receiver:
        raise PreconditionError(f"players {giver} and {receiver} do not both contest {square}")
    if owner in (giver, receiver):
        raise PreconditionError(f"square {square} is owned by a donating player")
    exhaust, integral = donation_limits(state, square, giver, receiver)
    # an edge landing on a column while the giver empties counts as integral
    bounds = [(integral, "integral"), (exhaust, "exhausted")]
    if cap is not None:
        bounds.append((max(Fraction(0), cap) / state.grid.square_value(r, c), "saturated"))
    if amount is not None:
        bounds.append((amount, "partial"))
    delta, kind = min(bounds, key=lambda b: b[0])
    if delta == 0 and kind != "saturated":
        raise InternalInvariantError(
            f"donation through {square} is stuck", state=state.to_dict()
        )
    gp, rp = state.piece_of(giver), state.piece_of(receiver)
    if gp < rp:
        for i in range(gp, rp):
            state.positions[i][r] -= delta
    else:
        for i in range(rp, gp):
            state.positions[i][r] += delta
    return DonationEvent(kind, delta)


@dataclass(frozen=True)
class ContestGraph:
    """Multigraph on the players other than ``owner``.

    There is one edge per pair of players contesting a fractional
    ``owner``-square, labelled by that square.
    """

    owner: int
    vertices: tuple
    edges: tuple  # (u, v, square) with u < v
    contested: dict = field(compare=False)

    def labels_at(self, v):
        return sorted({sq for a, b, sq in self.edges if v in (a, b)})

    def single_square_vertices(self):
        """Players touching exactly one fractional square (includes degree 1)."""
        return [v for v in self.vertices if len(self.labels_at(v)) == 1]

    def find_cycle(self):
        """Shortest cycle with distinct vertices and distinct square labels.

        Ties go to the lexicographically least vertex sequence, then labels.
        Returns ``[(giver, receiver, square), ...]`` or ``None``.
        """
        between = {}
        for a, b, sq in self.edges:
            between.setdefault((a, b), []).append(sq)
            between.setdefault((b, a), []).append(sq)
        for labels in between.values():
            labels.sort()
        active = sorted({v for a, b, _ in self.edges for v in (a, b)})
        for length in range(2, len(active) + 1):
            for start in active:
                rest = [v for v in active if v > start]
                for tail in permutations(rest, length - 1):
                    seq = (start, *tail)
                    if length > 2 and seq[1] > seq[-1]:
                        continue  # the reverse walk is the canonical one
                    hops = [(seq[i], seq[(i + 1) % length]) for i in range(length)]
                    if any(h not in between for h in hops):
                        continue
                    labels = _distinct_labels([between[h] for h in hops], [])
                    if labels is not None:
                        return [(a, b, sq) for (a, b), sq in zip(hops, labels)]
        return None


def _distinct_labels(choices, chosen):
    if len(chosen) == len(choices):
        return list(chosen)
    for sq in choices[len(chosen)]:
        if sq not in chosen:
            out = _distinct_labels(choices, chosen + [sq])
            if out is not None:
                return out
    return None


def contest_graph(state, owner):
    contested = {}
    grid = state.grid
    for r in range(grid.rows):
        for c in range(grid.cols):
            if grid.values[r][c][owner] > 0 and state.has_fractional_edge(r, c):
                contested[(r, c)] = state.contesters(r, c)
    edges = []
    for sq, players in contested.items():
        if owner in players:
            raise InternalInvariantError(
                f"owner {owner} contests its own fractional square {sq}",
                state=state.to_dict(),
            )
        for i, a in enumerate(players):
            for b in players[i + 1:]:
                edges.append((a, b, sq))
    vertices = tuple(p for p in range(grid.n_players) if p != owner)
    return ContestGraph(owner, vertices, tuple(edges), contested)


class SlidingStuck(InternalInvariantError):
    """No envy-safe move exists from the current sliding state."""


@dataclass(frozen=True)
class GridEvent:
    kind: str  # cycle | award
    owner: int
    squares: tuple
    count_before: int
    count_after: int
    max_envy_after: Fraction


@dataclass(frozen=True)
class GridSolution:
    cuts: LatticeCutSet
    assignment: tuple
    report: EnvyReport
    continuous_cuts: tuple
    initial_count: int
    events: tuple
    # index of the continuous division the slide started from
    start: int = 0


def preprocess(state):
    """Hand each owned square to its owner wherever the owner's piece touches it.

    Squares nobody values have their interior edges pushed to the left
    boundary.  Returns the number of squares absorbed.
    """
    grid = state.grid
    moved = 0
    changed = True
    while changed:
        changed = False
        for r in range(grid.rows):
            for c in range(grid.cols):
                if not state.has_fractional_edge(r, c):
                    continue
                owner = grid.owner(r, c)
                if owner is None:
                    for i in state.edges_inside(r, c):
                        state.positions[i][r] = Fraction(c)
                    changed = True
                    continue
                lo, hi = state.interval(state.piece_of(owner), r)
                if lo < c + 1 and hi > c:
                    state.absorb(r, c, owner)
                    moved += 1
                    changed = True
    return moved


def _check_envy_free(state, where):
    report = state.envy_report()
    if report.max_envy != 0:
        raise InternalInvariantError(
            f"allocation lost envy-freeness {where} (max envy {report.max_envy})",
            state=state.to_dict(),
        )
    return report


def _cycle_step(state, owner, cycle):
    steps = []
    for giver, receiver, sq in cycle:
        exhaust, integral = donation_limits(state, sq, giver, receiver)
        steps.append(min(exhaust, integral) * state.grid.square_value(*sq))
    delta = min(steps)
    for giver, receiver, sq in cycle:
        donate(state, sq, giver, receiver, amount=delta / state.grid.square_value(*sq))


def _award_step(state, owner, graph):
    """Give one fractional square wholly to a contester without creating envy."""
    candidates = []
    for q in graph.single_square_vertices():
        candidates.append((graph.labels_at(q)[0], q))
    for sq, players in sorted(graph.contested.items()):
        for q in players:
            if (sq, q) not in candidates:
                candidates.append((sq, q))
    for sq, q in candidates:
        r, c = sq
        gain = (1 - state.part(q, r, c)) * state.grid.square_value(r, c)
        if gain <= state.envy_cap(owner, q):
            state.absorb(r, c, q)
            return sq
    return None


def slide_to_lattice(grid, division):
    """Run preprocessing and the sliding loop from a continuous division.

    Returns ``(cuts, assignment, report, initial_count, events)``.
    """
    n = grid.n_players
    state = SlidingState(
        grid,
        [[Fraction(x)] * grid.rows for x in division.cuts],
        tuple(division.assignment),
    )
    _check_envy_free(state, "after the continuous phase")
    preprocess(state)
    _check_envy_free(state, "after preprocessing")
    initial = state.nonintegral_count()
    events = []
    while state.nonintegral_count():
        before = state.nonintegral_count()
        event = None
        for owner in range(n):
            graph = contest_graph(state, owner)
            if not graph.contested:
                continue
            cycle = graph.find_cycle()
            if cycle is not None:
                _cycle_step(state, owner, cycle)
                event = ("cycle", owner, tuple(sq for _, _, sq in cycle))
                break
            sq = _award_step(state, owner, graph)
            if sq is not None:
                event = ("award", owner, (sq,))
                break
            logger.debug("owner %d: no envy-safe award, trying the next owner", owner)
        if event is None:
            raise SlidingStuck(
                "no cycle and no envy-safe award for any owner", state=state.to_dict()
            )
        report = _check_envy_free(state, f"after {event[0]} event")
        after = state.nonintegral_count()
        if after >= before:
            raise InternalInvariantError(
                f"{event[0]} event did not reduce fractional edges ({before} -> {after})",
                state=state.to_dict(),
            )
        events.append(GridEvent(*event, before, after, report.max_envy))

    cuts = LatticeCutSet(
        tuple(tuple(int(x) for x in cut) for cut in state.positions), grid.rows, grid.cols
    )
    check = verify_lattice_cuts(grid, cuts)
    if not check:
        raise InternalInvariantError(f"extracted cuts are invalid: {check.diagnostics}",
                                     state=state.to_dict())
    report = grid_envy_report(grid, cuts.cuts, state.assignment)
    if report.max_envy != 0:
        raise InternalInvariantError("final lattice division is not envy-free",
                                     state=state.to_dict())
    return cuts, state.assignment, report, initial, tuple(events)


def solve_grid(grid, max_starts=None):
    """Envy-free division of a monolithic grid by ``n - 1`` non-crossing cuts.

    The slide starts from the first exact envy-free vertical division.  When
    every owner has equal-valued squares it always completes; otherwise a
    slide can get stuck, and the next envy-free vertical division is tried,
    up to ``max_starts`` of them (all by default).
    """
    if not grid.is_monolithic():
        raise PreconditionError("solve_grid needs monolithic preferences")
    if grid.n_players == 1:
        cuts = LatticeCutSet((), grid.rows, grid.cols)
        report = grid_envy_report(grid, (), (0,))
        return GridSolution(cuts, (0,), report, (), 0, ())

    stuck = None
    divisions = envy_free_divisions(build_cake(project_columns(grid)))
    for start, division in enumerate(divisions):
        if max_starts is not None and start >= max_starts:
            break
        try:
            cuts, assignment, report, initial, events = slide_to_lattice(grid, division)
        except SlidingStuck as exc:
            logger.debug("start %d got stuck: %s", start, exc)
            stuck = stuck or exc
            continue
        return GridSolution(cuts, assignment, report, tuple(division.cuts),
                            initial, events, start)
    if stuck is None:
        raise InternalInvariantError("no envy-free vertical division found")
    raise stuck
