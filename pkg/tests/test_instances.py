import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from beadcut.errors import InstanceParseError, PreconditionError
from beadcut.grid import GridSpec, LatticeCutSet
from beadcut.instances import (
    DivisionResult,
    GeneratorConfig,
    Instance,
    generate,
    instance_to_dict,
    parse_instance,
    parse_result,
    serialize_instance,
)
from beadcut.model import Allocation, Necklace, envy_report
from beadcut.prng import SplitMix64, Xoshiro256

from conftest import fixture_bytes, load_instance


def doc(**fields):
    return json.dumps(fields)


def test_fig2_fixture():
    inst = load_instance("fig2.json")
    assert inst.kind == "necklace" and inst.players == ("A", "B", "C")
    assert inst.problem.length == 5 and inst.problem.n_players == 3


def test_empty_beads():
    inst = parse_instance(doc(kind="necklace", players=["A", "B"], beads=[]))
    assert inst.problem.length == 0


def test_decimal_is_exact():
    inst = parse_instance(doc(kind="necklace", players=["A"], beads=[{"A": "0.1"}]))
    assert inst.problem.values[0][0] == Fraction(1, 10)


def test_grid_forms():
    text = doc(kind="grid", players=["A", "B"], rows=2, cols=2, squares=[
        {"row": 0, "col": 0, "owner": "A", "value": "2"},
        {"row": 1, "col": 1, "values": {"A": "1/3", "B": "1"}},
    ])
    g = parse_instance(text).problem
    assert g.values[0][0] == (2, 0)
    assert g.values[1][1] == (Fraction(1, 3), 1)
    assert g.values[0][1] == (0, 0)


@pytest.mark.parametrize("text, where", [
    ("{not json", "line 1"),
    (doc(kind="necklace", players=["A"], beads=[{"Z": "1"}]), "beads[0]"),
    (doc(kind="necklace", players=["A"], beads=[{"A": "-1"}]), "beads[0].A"),
    (doc(kind="necklace", players=["A"], beads=[{"A": 0.5}]), "beads[0].A"),
    (doc(kind="necklace", players=["A"], beads=[{"A": "x"}]), "beads[0].A"),
    (doc(kind="necklace", players=["A", "A"], beads=[]), "players"),
    (doc(kind="grid", players=["A"], rows=1, cols=1, squares=[
        {"row": 0, "col": 0, "owner": "A"}, {"row": 0, "col": 0, "owner": "A"}]), "squares[1]"),
    (doc(kind="grid", players=["A"], rows=1, cols=1, squares=[
        {"row": 2, "col": 0, "owner": "A"}]), "squares[0]"),
    (doc(kind="grid", players=["A"], rows=True, cols=1), "rows"),
    (doc(kind="torus", players=["A"]), "kind"),
])
def test_parse_errors_carry_location(text, where):
    with pytest.raises(InstanceParseError) as info:
        parse_instance(text)
    assert info.value.location.startswith(where)
    assert isinstance(info.value, ValueError)


def test_result_documents_parse_as_instances():
    inst = parse_instance(fixture_bytes("fig5-cuts.json"))
    assert inst.kind == "grid" and (inst.problem.rows, inst.problem.cols) == (5, 3)


@pytest.mark.parametrize("name", ["fig2.json", "fig3.json", "fig2-grid.json"])
def test_fixture_round_trip(name):
    inst = load_instance(name)
    assert parse_instance(serialize_instance(inst)) == inst


def test_result_round_trip(fig3):
    inst = load_instance("fig3.json")
    report = envy_report(fig3, Allocation((3,), (0, 1)))
    res = DivisionResult.from_report(inst, (3,), report, {"solver": "exact"})
    back = parse_result(json.dumps(res.to_dict()))
    assert back == res
    assert res.to_dict()["assignment"] == {"A": 0, "B": 1}
    assert res.to_dict()["maxEnvy"] == "1"


def test_grid_result_round_trip():
    res = parse_result(fixture_bytes("fig5-cuts.json"))
    assert isinstance(res.cuts, LatticeCutSet)
    assert parse_result(json.dumps(res.to_dict())) == res


def test_bad_results():
    base = json.loads(fixture_bytes("fig5-cuts.json"))
    for bad in ({"cuts": [[1, 1, 1, 0, 1]]},
                {"cuts": [[1, 1, 1, 0, 1], [2, 2, "2", 1, 3]]},
                {"assignment": {"A": 0, "B": 0, "C": 2}},
                {"kind": "grid"}):
        with pytest.raises(InstanceParseError):
            parse_result(json.dumps({**base, **bad}))


# --- generator ----------------------------------------------------------------

def test_splitmix_reference_vector():
    mix = SplitMix64(1234567)
    assert [mix.next() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821,
    ]


def test_xoshiro_is_deterministic_and_bounded():
    a, b = Xoshiro256(42), Xoshiro256(42)
    xs = [a.next() for _ in range(50)]
    assert xs == [b.next() for _ in range(50)]
    assert all(0 <= x < 2**64 for x in xs)
    assert {a.below(3) for _ in range(200)} == {0, 1, 2}
    with pytest.raises(ValueError):
        a.below(0)


def test_generate_twice_identical():
    cfg = GeneratorConfig(1, "monolithic", 3, 6)
    assert generate(cfg) == generate(cfg)
    assert serialize_instance(generate(cfg)) == serialize_instance(generate(cfg))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["monolithic", "binary", "general"]),
       st.integers(1, 4), st.integers(0, 8),
       st.sampled_from([None, 1, 3]), st.sampled_from(["1", "3", "7/2"]))
def test_class_contracts(seed, cls, n, k, l, s):
    if l is not None and k == 0:
        k = 1
    inst = generate(GeneratorConfig(seed, cls, n, k, l, s))
    problem = inst.problem
    s = Fraction(s)
    if l is None:
        items = problem.values
    else:
        assert isinstance(problem, GridSpec) and (problem.rows, problem.cols) == (k, l)
        items = [sq for row in problem.values for sq in row]
    if cls == "monolithic":
        assert problem.is_monolithic()
        assert all(v in (0, s) for sq in items for v in sq)
    elif cls == "binary":
        assert all(v in (0, 1) for sq in items for v in sq)
    else:
        assert all(0 <= v <= s for sq in items for v in sq)
    assert parse_instance(serialize_instance(inst)) == inst


def test_generator_rejects_bad_config():
    for kwargs in ({"preference_class": "weird"}, {"n": 0}, {"k": -1}, {"s": 0},
                   {"l": 0}, {"preference_class": "binary", "s": "1/2"}):
        base = dict(seed=0, preference_class="general", n=2, k=3)
        with pytest.raises(PreconditionError):
            GeneratorConfig(**{**base, **kwargs})


def test_instance_dict_omits_zero_values():
    inst = Instance(("A", "B"), Necklace.from_values([[0, 1], [0, 0]]))
    assert instance_to_dict(inst)["beads"] == [{"B": "1"}, {}]
