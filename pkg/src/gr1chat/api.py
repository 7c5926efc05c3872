"""HTTP chat service: sessions, utterances, snapshots and an event stream.

Per-session processing is strictly serialized: a posted utterance is handled
to completion (including any simulated execution) before the next is
accepted; concurrent posts get 409.  The WebSocket event channel replays the
session's typed events from a client-chosen sequence number and pushes new
ones as they appear; clients may send ``{"since": n}`` at any time to resync.
"""

from __future__ import annotations

import asyncio
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .config import Config
from .dialogue import DialogueSession, new_session, step_session
from .grammar import Grammar
from .grounding import load_weights
from .persist import append_turns
from .synthesis import controller_to_json
from .worldmodel import WorldError, parse_world, world_snapshot


class CreateSessionRequest(BaseModel):
    world: str  # world file text


class UtteranceRequest(BaseModel):
    text: str


@dataclass
class SessionBox:
    session: DialogueSession
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    persisted_turns: int = 0
    new_events: asyncio.Event = field(default_factory=asyncio.Event)


def create_app(config: Config | None = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="gr1chat")
    boxes: dict[str, SessionBox] = {}
    app.state.boxes = boxes
    weights = load_weights(config.weights_text())
    grammar = Grammar.from_text(config.grammar_text())

    def box_of(session_id: str) -> SessionBox:
        box = boxes.get(session_id)
        if box is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return box

    def persist(box: SessionBox):
        if not config.persist_dir:
            return
        directory = Path(config.persist_dir)
        directory.mkdir(parents=True, exist_ok=True)
        append_turns(box.session, directory / f"{box.session.id}.jsonl",
                     start=box.persisted_turns)
        box.persisted_turns = len(box.session.transcript)

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        try:
            world = parse_world(req.world)
        except WorldError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        if not world.regions:
            raise HTTPException(status_code=422, detail="world has no regions")
        session = new_session(world, weights=weights, grammar=grammar)
        boxes[session.id] = SessionBox(session=session)
        return {"id": session.id, "world": world_snapshot(world)}

    @app.post("/sessions/{session_id}/utterances")
    async def post_utterance(session_id: str, req: UtteranceRequest):
        box = box_of(session_id)
        if box.lock.locked():
            raise HTTPException(status_code=409,
                                detail="a previous utterance is still being processed")
        async with box.lock:
            result = await asyncio.to_thread(
                step_session, box.session, req.text,
                transit_ticks=config.transit_ticks,
            )
            persist(box)
            box.new_events.set()
            box.new_events = asyncio.Event()
            return {
                "messages": [{"text": m.text, "kind": m.kind} for m in result.messages],
                "phase": box.session.phase,
            }

    @app.get("/sessions/{session_id}/world")
    def get_world(session_id: str):
        return world_snapshot(box_of(session_id).session.world)

    @app.get("/sessions/{session_id}/controller")
    def get_controller(session_id: str):
        session = box_of(session_id).session
        if session.executing is not None:
            return controller_to_json(session.executing[0])
        for ev in reversed(session.events):
            if ev.type == "controller":
                return ev.payload
        raise HTTPException(status_code=404, detail="no controller synthesized yet")

    @app.get("/sessions/{session_id}/transcript")
    def get_transcript(session_id: str):
        session = box_of(session_id).session
        return [
            {"speaker": t.speaker, "text": t.text, "t": t.t} for t in session.transcript
        ]

    @app.websocket("/sessions/{session_id}/events")
    async def events(ws: WebSocket, session_id: str):
        await ws.accept()
        box = boxes.get(session_id)
        if box is None:
            await ws.close(code=4404)
            return
        cursor = 0
        recv_task: asyncio.Task | None = None
        try:
            while True:
                events = box.session.events
                while cursor < len(events):
                    ev = events[cursor]
                    await ws.send_json(
                        {"seq": ev.seq, "type": ev.type, "payload": ev.payload}
                    )
                    cursor += 1
                if recv_task is None:
                    recv_task = asyncio.create_task(ws.receive_json())
                wake = asyncio.create_task(box.new_events.wait())
                done, _ = await asyncio.wait(
                    {recv_task, wake}, return_when=asyncio.FIRST_COMPLETED,
                    timeout=0.5,
                )
                wake.cancel()
                if recv_task in done:
                    message = recv_task.result()  # raises on disconnect
                    recv_task = None
                    if isinstance(message, dict) and "since" in message:
                        cursor = max(0, int(message["since"]))
        except (WebSocketDisconnect, RuntimeError):
            return
        finally:
            if recv_task is not None:
                recv_task.cancel()

    return app
