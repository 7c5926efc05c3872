import random

import pytest

from gr1chat.executor import IllegalCommand, SimState, Timeout, run, step
from gr1chat.ltlspec import build_spec
from gr1chat.synthesis import synthesize
from gr1chat.worldmodel import set_robot_location, to_kripke

from oracles import enumerate_navigation_cases


def test_transit_arithmetic(chain_world):
    sim = SimState(location="columbus")
    entered = None
    for _ in range(3):
        sim, entered = step(sim, "harmony", chain_world, transit_ticks=3)
    assert entered == "harmony"
    assert sim.location == "harmony"
    assert sim.tick == 3


def test_idle_tick(chain_world):
    sim, entered = step(SimState(location="kibo"), "kibo", chain_world)
    assert entered is None and sim.location == "kibo" and sim.tick == 1


def test_illegal_command(chain_world):
    with pytest.raises(IllegalCommand):
        step(SimState(location="kibo"), "columbus", chain_world)


def test_exp1_capsule_sequence(chain_world):
    controller = synthesize(build_spec(chain_world, "kibo")).controller
    trace = run(controller, chain_world, "kibo")
    assert trace.locations() == ("columbus", "harmony", "kibo")
    assert trace.result == "goal_reached"


def test_exp2_capsule_sequence(chain_world):
    w = set_robot_location(chain_world, "kibo")
    controller = synthesize(build_spec(w, "columbus")).controller
    trace = run(controller, w, "columbus")
    assert trace.locations() == ("kibo", "harmony", "columbus")


def test_goal_at_start_is_immediate(chain_world):
    controller = synthesize(build_spec(chain_world, "columbus")).controller
    trace = run(controller, chain_world, "columbus")
    assert trace.result == "goal_reached"
    assert len(trace.ticks) == 0


def test_trace_follows_kripke_and_controller(chain_world):
    controller = synthesize(build_spec(chain_world, "kibo")).controller
    trace = run(controller, chain_world, "kibo")
    kripke = to_kripke(chain_world)
    locs = (chain_world.robot_at,) + tuple(r.location for r in trace.ticks)
    for a, b in zip(locs, locs[1:]):
        assert (a, b) in kripke.edges
    # every sensed/commanded pair is a controller node valuation
    states = {frozenset(controller.true_atoms(n[0])) for n in controller.nodes}
    for rec in trace.ticks:
        assert frozenset({f"in_{rec.location}", f"go_{rec.commanded}"}) in states


def test_tick_bound_over_enumerated_worlds():
    for ticks in (1, 3):
        for world, goal in enumerate_navigation_cases():
            outcome = synthesize(build_spec(world, goal))
            if not outcome.realizable:
                continue
            trace = run(outcome.controller, world, goal, transit_ticks=ticks)
            assert trace.result == "goal_reached"
            assert len(trace.ticks) <= len(world.regions) * (ticks + 2)


def test_randomized_transit_still_reaches_goal(chain_world):
    controller = synthesize(build_spec(chain_world, "kibo")).controller
    for seed in range(8):
        trace = run(controller, chain_world, "kibo", rng=random.Random(seed))
        assert trace.locations() == ("columbus", "harmony", "kibo")


def test_seeded_runs_are_reproducible(chain_world):
    controller = synthesize(build_spec(chain_world, "kibo")).controller
    a = run(controller, chain_world, "kibo", rng=random.Random(7))
    b = run(controller, chain_world, "kibo", rng=random.Random(7))
    assert a == b


def test_timeout_when_budget_too_small(chain_world):
    controller = synthesize(build_spec(chain_world, "kibo")).controller
    with pytest.raises(Timeout):
        run(controller, chain_world, "kibo", max_ticks=2)


def test_trace_jsonl(chain_world):
    controller = synthesize(build_spec(chain_world, "kibo")).controller
    trace = run(controller, chain_world, "kibo")
    lines = trace.to_jsonl().splitlines()
    assert len(lines) == len(trace.ticks)
    import json

    first = json.loads(lines[0])
    assert set(first) <= {"tick", "location", "commanded", "entered"}
