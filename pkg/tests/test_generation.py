import pytest

from gr1chat.generation import (
    GenerationFailure,
    candidate_pairs,
    declarative_form,
    generate,
    interrogative_form,
)
from gr1chat.grammar import Parser
from gr1chat.grounding import ground
from gr1chat.symbols import connectivity, instantiate_symbols, navigate
from gr1chat.worldmodel import assert_connectivity


@pytest.fixture
def exp2_repair_world(exp2_world):
    w, _ = assert_connectivity(exp2_world, "kibo", "harmony")
    return w


def test_exp2_first_query(exp2_repair_world, weights):
    space = instantiate_symbols(exp2_repair_world)
    q = generate(connectivity("kibo", "columbus"), space, exp2_repair_world, weights)
    assert q == "is the kibo capsule connected to the columbus capsule?"


def test_exp2_second_query(exp2_repair_world, weights):
    space = instantiate_symbols(exp2_repair_world)
    q = generate(connectivity("harmony", "columbus"), space, exp2_repair_world, weights)
    assert q == "is the harmony capsule connected to the columbus capsule?"


def test_exp3_query(exp3_world, weights):
    w, _ = assert_connectivity(exp3_world, "harmony", "columbus")
    space = instantiate_symbols(w)
    q = generate(connectivity("kibo", "harmony"), space, w, weights)
    assert q == "is the harmony capsule connected to the kibo capsule?"


def test_candidate_order_prefers_connected_anchor(exp2_repair_world):
    pairs = candidate_pairs(exp2_repair_world)
    # kibo and harmony each have one known link, columbus none: pairs naming
    # a linked region first come before pairs anchored on columbus
    assert pairs.index(("kibo", "columbus")) < pairs.index(("columbus", "kibo"))
    assert pairs.index(("harmony", "columbus")) < pairs.index(("columbus", "harmony"))


def test_round_trip_identity_for_all_relations(exp2_repair_world, weights):
    space = instantiate_symbols(exp2_repair_world)
    parser = Parser.for_world(exp2_repair_world)
    for symbol in space.connectivity_symbols():
        query = generate(symbol, space, exp2_repair_world, weights, parser)
        assert query.endswith("?")
        body = query[len("is the "):-len(" capsule?")]
        a, b = body.split(" capsule connected to the ")
        assert interrogative_form(a, b) == query
        res = ground(parser.parse(declarative_form(a, b)), space,
                     exp2_repair_world, weights)
        assert res.true_symbol == symbol


def test_generate_rejects_non_relation(exp2_repair_world, weights):
    space = instantiate_symbols(exp2_repair_world)
    with pytest.raises(GenerationFailure):
        generate(navigate("kibo"), space, exp2_repair_world, weights)


def test_generate_rejects_symbol_outside_space(exp2_repair_world, weights):
    space = instantiate_symbols(exp2_repair_world)
    foreign = connectivity("kibo", "zarya")
    with pytest.raises(GenerationFailure):
        generate(foreign, space, exp2_repair_world, weights)
