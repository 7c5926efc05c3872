"""Session state controller: routes utterances, manages the command lifecycle.

A grounded utterance is either declarative knowledge (world update plus an
acknowledgement) or an action.  Actions trigger synthesis; an unrealizable
specification starts the repair loop, whose grounded yes/no queries put the
session into the answer-awaiting phase.  Execution events stream back into
the session to track the robot and close the episode.

Robot output carries a kind: queries, reprompts and failure notices are
dialogue turns; acknowledgements and arrival notices are status messages.
The chat transcript stores both; the event stream types them apart, which is
what the UI renders (dialogue turns as chat bubbles, status as notices).
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from importlib import resources
from .executor import DEFAULT_TRANSIT_TICKS, Trace, run
from .grammar import Grammar, ParseFailure, Parser
from .grounding import (
    GroundingFailure,
    Reply,
    classify_reply,
    ground,
    load_weights,
)
from .ltlspec import build_spec, serialize
from .repair import RepairCandidate, RepairQueue, accept, next_candidate, reject, start_repair
from .symbols import ACTION, CONNECTIVITY, instantiate_symbols
from .synthesis import Controller, controller_to_json, synthesize
from .worldmodel import WorldModel, assert_connectivity, set_robot_location, world_snapshot

IDLE = "idle"
AWAITING_ANSWER = "awaiting_answer"
EXECUTING = "executing"

ACK_TEXT = "declarative knowledge received and processed"
ARRIVED_TEXT = "arrived at the {region} capsule"
NOT_UNDERSTOOD_TEXT = "i did not understand: {text}"
EXHAUSTED_TEXT = "i cannot find a connectivity change that makes '{command}' achievable"

DIALOGUE = "dialogue"
STATUS = "status"


class IllegalEvent(Exception):
    pass


@dataclass(frozen=True)
class RobotMessage:
    text: str
    kind: str = DIALOGUE


@dataclass(frozen=True)
class Turn:
    speaker: str  # "human" | "robot"
    text: str
    t: int


@dataclass(frozen=True)
class Event:
    seq: int
    type: str
    payload: dict


@dataclass
class DialogueSession:
    id: str
    world: WorldModel
    weights: dict[str, float]
    parser: Parser
    phase: str = IDLE
    pending: tuple[RepairQueue, RepairCandidate, str] | None = None
    executing: tuple[Controller, str, str] | None = None  # controller, goal, command
    transcript: list[Turn] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=lambda: {"synthesis_calls": 0, "queries": 0})
    spec_log: list[str] = field(default_factory=list)

    def emit(self, ev_type: str, payload: dict):
        self.events.append(Event(seq=len(self.events), type=ev_type, payload=payload))

    def say(self, text: str, kind: str = DIALOGUE) -> RobotMessage:
        msg = RobotMessage(text=text, kind=kind)
        self.transcript.append(Turn(speaker="robot", text=text, t=len(self.transcript)))
        self.emit("turn" if kind == DIALOGUE else "status",
                  {"speaker": "robot", "text": text})
        return msg

    def hear(self, text: str):
        self.transcript.append(Turn(speaker="human", text=text, t=len(self.transcript)))
        self.emit("turn", {"speaker": "human", "text": text})

    def robot_turns(self, kind: str | None = None) -> list[str]:
        if kind is None:
            return [t.text for t in self.transcript if t.speaker == "robot"]
        texts = []
        for ev in self.events:
            if ev.type == ("turn" if kind == DIALOGUE else "status"):
                if ev.payload.get("speaker") == "robot":
                    texts.append(ev.payload["text"])
        return texts


def default_weights() -> dict[str, float]:
    text = resources.files("gr1chat.data").joinpath("weights.tsv").read_text("utf-8")
    return load_weights(text)


def new_session(world: WorldModel, weights: dict[str, float] | None = None,
                grammar: Grammar | None = None,
                session_id: str | None = None) -> DialogueSession:
    session = DialogueSession(
        id=session_id if session_id is not None else uuid.uuid4().hex,
        world=world,
        weights=weights if weights is not None else default_weights(),
        parser=Parser.for_world(world, grammar),
    )
    session.emit("world", world_snapshot(world))
    session.emit("phase", {"phase": IDLE})
    return session


def handle_utterance(session: DialogueSession, text: str) -> list[RobotMessage]:
    """Process one human utterance; returns the robot messages it provoked."""
    session.hear(text)
    if session.phase == AWAITING_ANSWER:
        return _handle_answer(session, text)
    if session.phase == EXECUTING:
        return _handle_while_executing(session, text)
    return _handle_idle(session, text)


def _not_understood(session: DialogueSession, text: str) -> list[RobotMessage]:
    return [session.say(NOT_UNDERSTOOD_TEXT.format(text=text.strip().lower()))]


def _handle_idle(session: DialogueSession, text: str) -> list[RobotMessage]:
    if classify_reply(text) is not Reply.NOT_A_REPLY:
        return _not_understood(session, text)  # no pending question
    try:
        tree = session.parser.parse(text)
    except ParseFailure:
        return _not_understood(session, text)
    space = instantiate_symbols(session.world)
    try:
        result = ground(tree, space, session.world, session.weights)
    except GroundingFailure:
        return _not_understood(session, text)
    symbol = result.true_symbol

    if symbol.kind == CONNECTIVITY:
        session.world, _ = assert_connectivity(session.world, *symbol.regions)
        session.emit("world", world_snapshot(session.world))
        return [session.say(ACK_TEXT, kind=STATUS)]

    if symbol.kind == ACTION:
        return _handle_command(session, text, symbol)

    return _not_understood(session, text)


def _handle_command(session: DialogueSession, text: str, action) -> list[RobotMessage]:
    spec = build_spec(session.world, action)
    session.spec_log.append(serialize(spec))
    session.stats["synthesis_calls"] += 1
    outcome = synthesize(spec)
    if outcome.realizable:
        _begin_execution(session, outcome.controller, action.goal_region, text)
        return []
    space = instantiate_symbols(session.world)
    queue = start_repair(session.world, action, space, session.weights, session.parser)
    queue.stats = session.stats
    queue.spec_log = session.spec_log
    return _advance_repair(session, queue, text)


def _advance_repair(session: DialogueSession, queue: RepairQueue,
                    command_text: str) -> list[RobotMessage]:
    cand = next_candidate(queue)
    if cand is None:
        session.phase = IDLE
        session.pending = None
        session.emit("phase", {"phase": IDLE})
        return [session.say(EXHAUSTED_TEXT.format(command=command_text.strip().lower()))]
    session.stats["queries"] += 1
    session.phase = AWAITING_ANSWER
    session.pending = (queue, cand, command_text)
    msg = session.say(cand.query_text)
    session.emit("phase", {"phase": AWAITING_ANSWER})
    return [msg]


def _handle_answer(session: DialogueSession, text: str) -> list[RobotMessage]:
    queue, cand, command_text = session.pending
    reply = classify_reply(text)
    if reply is Reply.YES:
        world, controller = accept(queue, cand)
        session.world = world
        session.pending = None
        session.emit("world", world_snapshot(world))
        _begin_execution(session, controller, queue.goal_region, command_text)
        return []
    if reply is Reply.NO:
        reject(queue, cand)
        return _advance_repair(session, queue, command_text)
    # anything other than yes/no, declaratives included: repeat the question
    msg = session.say(cand.query_text)
    session.emit("phase", {"phase": AWAITING_ANSWER})
    return [msg]


def _handle_while_executing(session: DialogueSession, text: str) -> list[RobotMessage]:
    # a new command preempts the running action; declaratives apply in place
    try:
        tree = session.parser.parse(text)
        space = instantiate_symbols(session.world)
        symbol = ground(tree, space, session.world, session.weights).true_symbol
    except (ParseFailure, GroundingFailure):
        return _not_understood(session, text)
    if symbol.kind == CONNECTIVITY:
        session.world, _ = assert_connectivity(session.world, *symbol.regions)
        session.emit("world", world_snapshot(session.world))
        return [session.say(ACK_TEXT, kind=STATUS)]
    if symbol.kind == ACTION:
        session.executing = None
        session.phase = IDLE
        session.emit("phase", {"phase": IDLE})
        return _handle_command(session, text, symbol)
    return _not_understood(session, text)


def _begin_execution(session: DialogueSession, controller: Controller,
                     goal_region: str, command_text: str):
    session.phase = EXECUTING
    session.executing = (controller, goal_region, command_text)
    session.emit("controller", controller_to_json(controller))
    session.emit("phase", {"phase": EXECUTING})


def on_execution_event(session: DialogueSession, event) -> list[RobotMessage]:
    """Apply an ``("entered", region)`` or ``("goal_reached",)`` event."""
    if session.phase != EXECUTING:
        raise IllegalEvent(f"execution event {event!r} while {session.phase}")
    if event[0] == "entered":
        session.world = set_robot_location(session.world, event[1])
        return []
    if event[0] == "goal_reached":
        _, goal_region, _ = session.executing
        session.phase = IDLE
        session.executing = None
        msg = session.say(ARRIVED_TEXT.format(region=goal_region), kind=STATUS)
        session.emit("world", world_snapshot(session.world))
        session.emit("phase", {"phase": IDLE})
        return [msg]
    raise IllegalEvent(f"unknown execution event {event!r}")


@dataclass(frozen=True)
class TurnResult:
    messages: tuple[RobotMessage, ...]
    trace: Trace | None


def step_session(session: DialogueSession, text: str,
                 transit_ticks: int = DEFAULT_TRANSIT_TICKS,
                 rng=None) -> TurnResult:
    """One full turn: handle the utterance and, if a controller came out of
    it, drive the simulator to completion, feeding events back in."""
    messages = list(handle_utterance(session, text))
    trace = None
    if session.phase == EXECUTING:
        controller, goal_region, _ = session.executing
        trace = run(controller, session.world, goal_region,
                    transit_ticks=transit_ticks, rng=rng)
        for rec in trace.ticks:
            payload = {"tick": rec.tick, "location": rec.location,
                       "commanded": rec.commanded}
            if rec.entered:
                payload["entered"] = rec.entered
            session.emit("tick", payload)
            if rec.entered:
                messages.extend(on_execution_event(session, ("entered", rec.entered)))
        messages.extend(on_execution_event(session, ("goal_reached",)))
    return TurnResult(messages=tuple(messages), trace=trace)


def transcript_jsonl(session: DialogueSession) -> str:
    import json

    return "".join(
        json.dumps({"speaker": t.speaker, "text": t.text, "t": t.t}, sort_keys=True) + "\n"
        for t in session.transcript
    )
