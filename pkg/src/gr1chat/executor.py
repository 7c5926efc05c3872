"""Discrete free-flyer simulator and the controller execution loop.

Each tick the simulator reads the commanded region from the controller's
current node, advances the robot (transit between connected regions takes a
configurable number of ticks), and feeds the sensed location back as the
controller's next input.  The transit delay is exactly the environment
freedom the specification's "stay or advance" transitions allow for.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .synthesis import Controller
from .worldmodel import WorldModel, is_connected

DEFAULT_TRANSIT_TICKS = 3


class IllegalCommand(Exception):
    pass


class Timeout(Exception):
    pass


@dataclass(frozen=True)
class SimState:
    location: str
    transit: tuple[str, int] | None = None  # (target, remaining ticks)
    tick: int = 0


@dataclass(frozen=True)
class TickRecord:
    tick: int
    location: str
    commanded: str
    entered: str | None = None


@dataclass(frozen=True)
class Trace:
    ticks: tuple[TickRecord, ...]
    result: str  # "goal_reached"
    goal_region: str

    def locations(self) -> tuple[str, ...]:
        """Region sequence with consecutive duplicates collapsed."""
        out: list[str] = []
        for rec in self.ticks:
            if not out or rec.location != out[-1]:
                out.append(rec.location)
        return tuple(out)

    def to_jsonl(self) -> str:
        import json

        lines = []
        for rec in self.ticks:
            doc = {"tick": rec.tick, "location": rec.location, "commanded": rec.commanded}
            if rec.entered:
                doc["entered"] = rec.entered
            lines.append(json.dumps(doc, sort_keys=True))
        return "\n".join(lines) + "\n"


def step(sim: SimState, commanded: str, w: WorldModel,
         transit_ticks: int = DEFAULT_TRANSIT_TICKS,
         rng: random.Random | None = None) -> tuple[SimState, str | None]:
    """One simulator tick toward the commanded region.

    Returns the new state and, when a region boundary was just crossed, the
    region that was entered.
    """
    w.require(commanded)
    if commanded == sim.location:
        return replace(sim, transit=None, tick=sim.tick + 1), None
    if not is_connected(w, sim.location, commanded):
        raise IllegalCommand(
            f"commanded {commanded!r} from {sim.location!r} without a connection"
        )
    if sim.transit is not None and sim.transit[0] == commanded:
        remaining = sim.transit[1] - 1
    else:
        duration = transit_ticks if rng is None else rng.randint(1, transit_ticks)
        remaining = duration - 1
    if remaining <= 0:
        return (
            SimState(location=commanded, transit=None, tick=sim.tick + 1),
            commanded,
        )
    return replace(sim, transit=(commanded, remaining), tick=sim.tick + 1), None


def _commanded_region(controller: Controller, mask: int) -> str:
    for name in controller.true_atoms(mask):
        if name.startswith("go_"):
            return name.split("_", 1)[1]
    raise IllegalCommand("controller node commands no region")


def _input_mask(controller: Controller, location: str) -> int:
    name = f"in_{location}"
    for i, prop in enumerate(controller.inputs):
        if prop == name:
            return 1 << i
    raise IllegalCommand(f"location {location!r} has no input proposition")


def run(controller: Controller, w: WorldModel, goal, max_ticks: int | None = None,
        transit_ticks: int = DEFAULT_TRANSIT_TICKS,
        rng: random.Random | None = None) -> Trace:
    """Drive the simulator with the controller until the goal state is held.

    Terminates when the controller sits in the self-commanding goal node
    (commanding the region it senses, which is the goal); raises ``Timeout``
    if that does not happen within ``max_ticks``.
    """
    goal_region = getattr(goal, "goal_region", goal)
    w.require(goal_region)
    if max_ticks is None:
        max_ticks = max(32, 2 * len(w.regions) * (transit_ticks + 2))

    start_input = _input_mask(controller, w.robot_at)
    node = None
    for cand in controller.initial:
        if controller.input_mask_of(cand[0]) == start_input:
            node = cand
            break
    if node is None:
        raise IllegalCommand(f"no initial controller node senses {w.robot_at!r}")

    sim = SimState(location=w.robot_at)
    ticks: list[TickRecord] = []
    while True:
        commanded = _commanded_region(controller, node[0])
        if commanded == sim.location == goal_region:
            return Trace(ticks=tuple(ticks), result="goal_reached", goal_region=goal_region)
        if sim.tick >= max_ticks:
            raise Timeout(f"goal {goal_region!r} not reached within {max_ticks} ticks")
        sim, entered = step(sim, commanded, w, transit_ticks=transit_ticks, rng=rng)
        ticks.append(TickRecord(tick=sim.tick, location=sim.location,
                                commanded=commanded, entered=entered))
        sensed = _input_mask(controller, sim.location)
        node = controller.edges[(node, sensed)]
