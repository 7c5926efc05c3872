import pytest

from gr1chat.worldmodel import (
    AlreadyPresent,
    ConnectivityRelation,
    DuplicateRegion,
    EmptyWorld,
    Region,
    SelfConnection,
    UnknownRegion,
    WorldModel,
    add_region,
    assert_connectivity,
    hypothesize,
    is_connected,
    parse_world,
    remove_connectivity,
    serialize_world,
    set_robot_location,
    to_kripke,
)

from oracles import bfs_reachable


def test_add_region_singleton():
    w = add_region(WorldModel(), Region("kibo", "the Kibo capsule"))
    assert w.region_ids == ("kibo",)
    assert w.robot_at == "kibo"


def test_add_region_duplicate():
    w = add_region(WorldModel(), Region("kibo", "the Kibo capsule"))
    with pytest.raises(DuplicateRegion):
        add_region(w, Region("kibo", "again"))


def test_insertion_order_preserved():
    w = WorldModel()
    for rid in ["kibo", "harmony", "columbus"]:
        w = add_region(w, Region(rid, rid))
    assert w.region_ids == ("kibo", "harmony", "columbus")


def test_assert_connectivity_symmetry_and_idempotence(exp1_world):
    w, changed = assert_connectivity(exp1_world, "kibo", "harmony")
    assert changed
    w2, changed2 = assert_connectivity(w, "harmony", "kibo")
    assert not changed2
    assert w2.connectivity == w.connectivity
    assert is_connected(w2, "kibo", "harmony")
    assert is_connected(w2, "harmony", "kibo")


def test_self_connection_rejected(exp1_world):
    with pytest.raises(SelfConnection):
        assert_connectivity(exp1_world, "kibo", "kibo")


def test_unknown_region(exp1_world):
    with pytest.raises(UnknownRegion):
        assert_connectivity(exp1_world, "kibo", "airlock")
    with pytest.raises(UnknownRegion):
        is_connected(exp1_world, "airlock", "kibo")


def test_is_connected_cases(chain_world, exp2_world):
    assert is_connected(chain_world, "harmony", "columbus")
    assert not is_connected(exp2_world, "kibo", "columbus")
    assert not is_connected(chain_world, "kibo", "kibo")


def test_hypothesize_copy_isolation(exp2_world):
    w, _ = assert_connectivity(exp2_world, "kibo", "harmony")
    before = frozenset(w.connectivity)
    h = hypothesize(w, ConnectivityRelation("kibo", "columbus"))
    assert len(h.connectivity) == 2
    assert w.connectivity == before
    with pytest.raises(AlreadyPresent):
        hypothesize(w, ConnectivityRelation("kibo", "harmony"))


def test_hypothesize_remove_inverse(chain_world):
    rel = ConnectivityRelation("kibo", "columbus")
    assert remove_connectivity(hypothesize(chain_world, rel), rel) == chain_world


def test_set_robot_location(exp1_world):
    assert exp1_world.robot_at == "columbus"
    w = set_robot_location(exp1_world, "kibo")
    assert w.robot_at == "kibo"
    with pytest.raises(UnknownRegion):
        set_robot_location(w, "airlock")


def test_to_kripke_disconnected(exp1_world):
    k = to_kripke(exp1_world)
    assert k.states == frozenset({"kibo", "harmony", "columbus"})
    assert k.edges == frozenset({(r, r) for r in k.states})
    assert k.initial == "columbus"


def test_to_kripke_chain(chain_world):
    k = to_kripke(chain_world)
    expected = {(r, r) for r in k.states}
    expected |= {("kibo", "harmony"), ("harmony", "kibo"),
                 ("harmony", "columbus"), ("columbus", "harmony")}
    assert k.edges == frozenset(expected)


def test_to_kripke_empty():
    with pytest.raises(EmptyWorld):
        to_kripke(WorldModel())


def test_kripke_reachability_matches_bfs_oracle():
    # all connectivity subsets over three regions
    ids = ("a", "b", "c")
    pairs = [("a", "b"), ("a", "c"), ("b", "c")]
    for bits in range(8):
        w = WorldModel()
        for rid in ids:
            w = add_region(w, Region(rid, rid))
        chosen = [p for i, p in enumerate(pairs) if bits >> i & 1]
        for a, b in chosen:
            w, _ = assert_connectivity(w, a, b)
        k = to_kripke(w)
        for start in ids:
            reach = {start}
            frontier = [start]
            while frontier:
                cur = frontier.pop()
                for (src, dst) in k.edges:
                    if src == cur and dst not in reach:
                        reach.add(dst)
                        frontier.append(dst)
            assert reach == bfs_reachable(ids, chosen, start)


def test_world_file_round_trip(chain_world):
    text = serialize_world(chain_world)
    assert parse_world(text) == chain_world
    # canonical form is a fixed point
    assert serialize_world(parse_world(text)) == text


def test_world_file_display_names():
    text = 'region kibo "the Kibo capsule"\nrobot kibo\n'
    w = parse_world(text)
    assert w.region("kibo").display_name == "the Kibo capsule"
    assert serialize_world(w) == text


def test_copy_isolation_over_hypothesis_sequences(exp2_world):
    base, _ = assert_connectivity(exp2_world, "kibo", "harmony")
    fingerprint = serialize_world(base)
    worlds = [base]
    for rel in [("kibo", "columbus"), ("columbus", "harmony")]:
        worlds.append(hypothesize(base, ConnectivityRelation(*rel)))
        nested = hypothesize(worlds[-1], ConnectivityRelation("kibo", "columbus")) \
            if rel != ("kibo", "columbus") else worlds[-1]
        assert nested.connectivity >= worlds[-1].connectivity
    assert serialize_world(base) == fingerprint
    assert len(base.connectivity) == 1
