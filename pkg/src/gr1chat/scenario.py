"""Scenario files: a world reference plus an ordered dialogue script.

Format: a ``world: <path>`` header (relative to the scenario file), then one
line per turn, ``H: <text>`` for human turns and ``R: <text>`` for expected
robot output.  The R lines are the golden transcript; replay diffs the robot
messages it actually produced against them.
"""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass
from pathlib import Path

from .dialogue import DialogueSession, new_session, step_session, transcript_jsonl
from .executor import DEFAULT_TRANSIT_TICKS
from .worldmodel import WorldModel, parse_world


class ScenarioError(Exception):
    pass


@dataclass(frozen=True)
class Scenario:
    world_path: str
    turns: tuple[tuple[str, str], ...]  # (speaker "H"|"R", text)

    def human_turns(self) -> tuple[str, ...]:
        return tuple(text for speaker, text in self.turns if speaker == "H")

    def expected_robot_turns(self) -> tuple[str, ...]:
        return tuple(text for speaker, text in self.turns if speaker == "R")

    def has_golden(self) -> bool:
        return any(speaker == "R" for speaker, _ in self.turns)


def parse_scenario(text: str) -> Scenario:
    world_path = None
    turns: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("world:"):
            if world_path is not None:
                raise ScenarioError(f"line {lineno}: duplicate world header")
            world_path = line[len("world:"):].strip()
        elif line.startswith("H:"):
            turns.append(("H", line[2:].strip()))
        elif line.startswith("R:"):
            turns.append(("R", line[2:].strip()))
        else:
            raise ScenarioError(f"line {lineno}: expected 'world:', 'H:' or 'R:'")
    if world_path is None:
        raise ScenarioError("missing world header")
    if not turns:
        raise ScenarioError("scenario has no turns")
    return Scenario(world_path=world_path, turns=tuple(turns))


def load_scenario(path: str | Path) -> tuple[Scenario, WorldModel]:
    path = Path(path)
    scenario = parse_scenario(path.read_text("utf-8"))
    world_file = path.parent / scenario.world_path
    if not world_file.exists():
        raise ScenarioError(f"world file {world_file} does not exist")
    return scenario, parse_world(world_file.read_text("utf-8"))


@dataclass
class ReplayResult:
    session: DialogueSession
    robot_turns: tuple[str, ...]
    traces: tuple
    diff: str  # empty when no golden or no mismatch

    @property
    def ok(self) -> bool:
        return not self.diff


def replay(scenario: Scenario, world: WorldModel,
           weights: dict[str, float] | None = None,
           transit_ticks: int = DEFAULT_TRANSIT_TICKS,
           session_id: str = "replay") -> ReplayResult:
    session = new_session(world, weights=weights, session_id=session_id)
    robot_turns: list[str] = []
    traces = []
    for text in scenario.human_turns():
        result = step_session(session, text, transit_ticks=transit_ticks)
        robot_turns.extend(m.text for m in result.messages)
        if result.trace is not None:
            traces.append(result.trace)
    diff = ""
    if scenario.has_golden():
        expected = list(scenario.expected_robot_turns())
        if expected != robot_turns:
            diff = "".join(
                difflib.unified_diff(
                    [t + "\n" for t in expected],
                    [t + "\n" for t in robot_turns],
                    fromfile="golden",
                    tofile="actual",
                )
            )
    return ReplayResult(
        session=session,
        robot_turns=tuple(robot_turns),
        traces=tuple(traces),
        diff=diff,
    )


def replay_artifacts(result: ReplayResult) -> dict[str, str]:
    """Byte-stable artifact bundle: transcript, traces, specs, events."""
    parts = {
        "transcript.jsonl": transcript_jsonl(result.session),
        "events.jsonl": "".join(
            json.dumps({"seq": e.seq, "type": e.type, "payload": e.payload},
                       sort_keys=True) + "\n"
            for e in result.session.events
        ),
    }
    for i, trace in enumerate(result.traces):
        parts[f"trace_{i}.jsonl"] = trace.to_jsonl()
    for i, spec_text in enumerate(result.session.spec_log):
        parts[f"spec_{i}.spec"] = spec_text
    return parts
