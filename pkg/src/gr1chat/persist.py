"""Session persistence: a JSON-lines log appended after every turn.

Each line carries the turn plus a world snapshot taken after it was handled.
Loading replays the human turns through a fresh session; pipeline determinism
makes replay equal restore, which the loader verifies against the logged
robot turns.
"""

from __future__ import annotations

import json
from pathlib import Path

from .dialogue import DialogueSession, new_session, step_session
from .worldmodel import WorldModel, world_snapshot


class CorruptLog(Exception):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


_TURN_KEYS = {"t", "speaker", "text", "world"}


def log_line(turn_index: int, speaker: str, text: str, world: WorldModel) -> str:
    return json.dumps(
        {"t": turn_index, "speaker": speaker, "text": text, "world": world_snapshot(world)},
        sort_keys=True,
    ) + "\n"


def append_turns(session: DialogueSession, path: str | Path, start: int = 0):
    """Append transcript entries from ``start`` on, snapshotting the world."""
    path = Path(path)
    with path.open("a", encoding="utf-8") as fh:
        for turn in session.transcript[start:]:
            fh.write(log_line(turn.t, turn.speaker, turn.text, session.world))


def read_log(path: str | Path) -> list[dict]:
    records = []
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorruptLog(str(exc), lineno) from None
        if not isinstance(doc, dict) or set(doc) != _TURN_KEYS:
            raise CorruptLog("record does not match the turn schema", lineno)
        if doc["speaker"] not in ("human", "robot"):
            raise CorruptLog(f"unknown speaker {doc['speaker']!r}", lineno)
        if not isinstance(doc["t"], int) or not isinstance(doc["text"], str):
            raise CorruptLog("bad field types", lineno)
        records.append(doc)
    return records


def load_session(path: str | Path, world: WorldModel,
                 weights: dict[str, float] | None = None,
                 transit_ticks: int = 3,
                 session_id: str | None = None) -> DialogueSession:
    """Rebuild a session by replaying the logged human turns.

    The robot turns regenerated by the replay must equal the logged ones;
    a mismatch means the log and the pipeline disagree and is reported as
    corruption.
    """
    records = read_log(path)
    session = new_session(world, weights=weights, session_id=session_id)
    for rec in records:
        if rec["speaker"] == "human":
            step_session(session, rec["text"], transit_ticks=transit_ticks)
    replayed = [(t.speaker, t.text) for t in session.transcript]
    logged = [(rec["speaker"], rec["text"]) for rec in records]
    if replayed != logged:
        raise CorruptLog("replayed transcript disagrees with the log", len(records))
    return session
