"""Instance and result documents, plus the seeded instance generator.

Documents are UTF-8 JSON.  Every value is written as an exact rational
string (``"3"``, ``"0.25"`` or ``"7/2"`` are all accepted on input; output
uses ``str(Fraction)``), so nothing passes through a binary float.

Necklace instance::

    {"kind": "necklace", "players": ["A", "B"],
     "beads": [{"A": "1"}, {"B": "1"}, {"A": "1", "B": "1"}]}

Grid instance (row 0 is the bottom row; squares not listed are worth
nothing to anybody)::

    {"kind": "grid", "players": ["A", "B"], "rows": 2, "cols": 2,
     "squares": [{"row": 0, "col": 0, "owner": "A", "value": "1"},
                 {"row": 1, "col": 0, "values": {"A": "1", "B": "2"}}]}
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import InstanceParseError, PreconditionError
from .grid import GridSpec, LatticeCutSet
from .model import Necklace, as_fraction
from .prng import Xoshiro256

PREFERENCE_CLASSES = ("monolithic", "binary", "general")
# general-class values are multiples of 1/GENERAL_DENOMINATOR
GENERAL_DENOMINATOR = 4


@dataclass(frozen=True)
class Instance:
    players: tuple
    problem: object  # Necklace or GridSpec

    @property
    def kind(self):
        return "grid" if isinstance(self.problem, GridSpec) else "necklace"

    def name(self, player):
        return self.players[player]

    def index(self, name):
        return self.players.index(name)


def default_names(n):
    if n <= 26:
        return tuple(chr(ord("A") + i) for i in range(n))
    return tuple(f"P{i}" for i in range(n))


def _rational(text, where):
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InstanceParseError(
            f"value {text!r} must be a decimal or p/q string", where
        )
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InstanceParseError(f"value {text!r} is not a rational number", where)
    if value < 0:
        raise InstanceParseError(f"value {text} is negative", where)
    return value


def _player_index(players, name, where):
    try:
        return players.index(name)
    except ValueError:
        raise InstanceParseError(f"unknown player {name!r}", where)


def _int_field(doc, key, where):
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceParseError(f"{key!r} must be an integer", where)
    return value


def instance_from_dict(doc):
    if not isinstance(doc, dict):
        raise InstanceParseError("instance must be a JSON object")
    kind = doc.get("kind")
    players = doc.get("players")
    if not isinstance(players, list) or not players or not all(isinstance(p, str) for p in players):
        raise InstanceParseError("'players' must be a nonempty list of names", "players")
    if len(set(players)) != len(players):
        raise InstanceParseError("player names must be unique", "players")
    players = tuple(players)
    n = len(players)
    if kind == "necklace":
        beads = doc.get("beads")
        if not isinstance(beads, list):
            raise InstanceParseError("'beads' must be a list", "beads")
        rows = []
        for b, bead in enumerate(beads):
            where = f"beads[{b}]"
            if not isinstance(bead, dict):
                raise InstanceParseError("bead must map player names to values", where)
            row = [Fraction(0)] * n
            for name, text in bead.items():
                row[_player_index(players, name, where)] = _rational(text, f"{where}.{name}")
            rows.append(row)
        return Instance(players, Necklace.from_values(rows, n))
    if kind == "grid":
        k, l = _int_field(doc, "rows", "rows"), _int_field(doc, "cols", "cols")
        if k < 1 or l < 1:
            raise InstanceParseError("grid needs at least one row and column", "rows")
        table = [[[Fraction(0)] * n for _ in range(l)] for _ in range(k)]
        seen = set()
        for s, sq in enumerate(doc.get("squares", [])):
            where = f"squares[{s}]"
            if not isinstance(sq, dict):
                raise InstanceParseError("square must be an object", where)
            r, c = _int_field(sq, "row", where), _int_field(sq, "col", where)
            if not (0 <= r < k and 0 <= c < l):
                raise InstanceParseError(f"square ({r}, {c}) outside {k}x{l} grid", where)
            if (r, c) in seen:
                raise InstanceParseError(f"duplicate square ({r}, {c})", where)
            seen.add((r, c))
            if "values" in sq:
                if not isinstance(sq["values"], dict):
                    raise InstanceParseError("'values' must be an object", where)
                for name, text in sq["values"].items():
                    table[r][c][_player_index(players, name, where)] = _rational(text, where)
            elif "owner" in sq:
                p = _player_index(players, sq["owner"], where)
                table[r][c][p] = _rational(sq.get("value", "1"), where)
            else:
                raise InstanceParseError("square needs 'owner' or 'values'", where)
        return Instance(players, GridSpec(tuple(tuple(tuple(sq) for sq in row) for row in table), n))
    raise InstanceParseError(f"unknown instance kind {kind!r}", "kind")


def instance_to_dict(instance):
    names = instance.players
    problem = instance.problem
    if instance.kind == "necklace":
        beads = [
            {names[p]: str(v) for p, v in enumerate(bead) if v != 0}
            for bead in problem.values
        ]
        return {"kind": "necklace", "players": list(names), "beads": beads}
    squares = []
    for r, row in enumerate(problem.values):
        for c, sq in enumerate(row):
            wanted = [(p, v) for p, v in enumerate(sq) if v != 0]
            if not wanted:
                continue
            if len(wanted) == 1:
                p, v = wanted[0]
                squares.append({"row": r, "col": c, "owner": names[p], "value": str(v)})
            else:
                squares.append({"row": r, "col": c,
                                "values": {names[p]: str(v) for p, v in wanted}})
    return {"kind": "grid", "players": list(names), "rows": problem.rows,
            "cols": problem.cols, "squares": squares}


def load_json(data):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceParseError(f"document is not UTF-8: {exc}")
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(exc.msg, f"line {exc.lineno} column {exc.colno}")


def parse_instance(data):
    """Parse an instance document (``bytes`` or ``str``)."""
    doc = load_json(data)
    if isinstance(doc, dict) and "instance" in doc and doc.get("kind", "").endswith("-result"):
        doc = doc["instance"]
    return instance_from_dict(doc)


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def serialize_instance(instance):
    return dumps(instance_to_dict(instance))


@dataclass(frozen=True)
class DivisionResult:
    """Cuts, assignment and envy figures for a necklace or grid instance.

    ``cuts`` is a tuple of integers for necklaces and a :class:`LatticeCutSet`
    for grids.  ``assignment`` may be ``None`` for a bare cut layout.
    """

    instance: Instance
    cuts: object
    assignment: tuple = None
    value_matrix: tuple = None
    envy: tuple = None
    max_envy: Fraction = None
    extra: dict = None

    @classmethod
    def from_report(cls, instance, cuts, report, extra=None):
        return cls(instance, cuts, tuple(report.assignment), report.value_matrix,
                   report.envy, report.max_envy, extra)

    def to_dict(self):
        names = self.instance.players
        kind = self.instance.kind
        doc = {"kind": f"{kind}-result", "instance": instance_to_dict(self.instance)}
        if kind == "grid":
            doc["cuts"] = [list(c) for c in self.cuts.cuts]
        else:
            doc["cuts"] = list(self.cuts)
        if self.assignment is not None:
            doc["assignment"] = {names[p]: j for p, j in enumerate(self.assignment)}
        if self.value_matrix is not None:
            doc["valueMatrix"] = [[str(v) for v in row] for row in self.value_matrix]
            doc["envy"] = {names[p]: str(e) for p, e in enumerate(self.envy)}
            doc["maxEnvy"] = str(self.max_envy)
        if self.extra:
            doc.update(self.extra)
        return doc

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict) or doc.get("kind") not in ("necklace-result", "grid-result"):
            raise InstanceParseError("not a necklace-result or grid-result document", "kind")
        instance = instance_from_dict(doc.get("instance"))
        raw = doc.get("cuts")
        if not isinstance(raw, list):
            raise InstanceParseError("'cuts' must be a list", "cuts")
        n = len(instance.players)
        if len(raw) != n - 1:
            raise InstanceParseError(f"{len(raw)} cuts for {n} players", "cuts")
        if instance.kind == "grid":
            grid = instance.problem
            for i, cut in enumerate(raw):
                if not isinstance(cut, list) or not all(
                    isinstance(x, int) and not isinstance(x, bool) for x in cut
                ):
                    raise InstanceParseError("each cut must be a list of integers", f"cuts[{i}]")
            cuts = LatticeCutSet(tuple(tuple(c) for c in raw), grid.rows, grid.cols)
        else:
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in raw):
                raise InstanceParseError("necklace cuts must be integers", "cuts")
            cuts = tuple(raw)
        assignment = None
        if "assignment" in doc:
            mapping = doc["assignment"]
            if not isinstance(mapping, dict) or set(mapping) != set(instance.players):
                raise InstanceParseError("assignment must map every player to a piece",
                                         "assignment")
            assignment = tuple(mapping[name] for name in instance.players)
            if sorted(assignment) != list(range(n)):
                raise InstanceParseError("assignment is not a bijection", "assignment")
        matrix = envy = max_envy = None
        if "valueMatrix" in doc:
            matrix = tuple(tuple(_rational(v, "valueMatrix") for v in row)
                           for row in doc["valueMatrix"])
            envy = tuple(_rational(doc["envy"][name], "envy") for name in instance.players)
            max_envy = _rational(doc["maxEnvy"], "maxEnvy")
        known = {"kind", "instance", "cuts", "assignment", "valueMatrix", "envy", "maxEnvy"}
        extra = {k: v for k, v in doc.items() if k not in known} or None
        return cls(instance, cuts, assignment, matrix, envy, max_envy, extra)


def parse_result(data):
    return DivisionResult.from_dict(load_json(data))


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of :func:`generate`.

    A necklace has ``k`` beads; setting ``l`` asks for a ``k x l`` grid
    instead.  Draws come from xoshiro256** seeded with ``seed`` and are
    consumed in row-major order: monolithic draws one owner per bead/square
    (``n`` meaning nobody) and values it at ``s``; binary and general draw
    one value per player per bead/square, general ones uniform over the
    multiples of 1/4 in ``[0, s]``.
    """

    seed: int
    preference_class: str
    n: int
    k: int
    l: int = None
    s: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "s", as_fraction(self.s))
        if self.preference_class not in PREFERENCE_CLASSES:
            raise PreconditionError(f"unknown preference class {self.preference_class!r}")
        if self.n < 1:
            raise PreconditionError("need at least one player")
        if self.k < 0 or (self.l is not None and (self.k < 1 or self.l < 1)):
            raise PreconditionError("sizes must be positive (k may be 0 for necklaces)")
        if self.s <= 0:
            raise PreconditionError("value bound s must be positive")
        if self.preference_class == "binary" and self.s < 1:
            raise PreconditionError("binary values need s >= 1")


def _draw_item(rng, config):
    n = config.n
    if config.preference_class == "monolithic":
        owner = rng.below(n + 1)
        item = [Fraction(0)] * n
        if owner < n:
            item[owner] = config.s
        return item
    if config.preference_class == "binary":
        return [Fraction(rng.below(2)) for _ in range(n)]
    top = floor(config.s * GENERAL_DENOMINATOR)
    return [Fraction(rng.below(top + 1), GENERAL_DENOMINATOR) for _ in range(n)]


def generate(config):
    """Deterministic pseudo-random instance for ``config``."""
    rng = Xoshiro256(config.seed)
    names = default_names(config.n)
    if config.l is None:
        beads = [_draw_item(rng, config) for _ in range(config.k)]
        return Instance(names, Necklace.from_values(beads, config.n))
    table = [
        tuple(tuple(_draw_item(rng, config)) for _ in range(config.l))
        for _ in range(config.k)
    ]
    return Instance(names, GridSpec(tuple(table), config.n))
