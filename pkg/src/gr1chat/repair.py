"""Hypothetical-world repair of unrealizable navigation specifications.

When a command fails to synthesize, the connectivity relations of the symbol
space are queued in order.  Relations already present in the world are passed
over (re-adding them cannot change realizability); each remaining relation is
appended to a copy of the world and synthesis is retried.  The first
hypothetical world that synthesizes becomes a candidate: its controller is
cached and a grounded yes/no query about the added relation is produced.
"""

from __future__ import annotations

from dataclasses import dataclass

from .generation import generate
from .grammar import Parser
from .ltlspec import build_spec, serialize
from .symbols import SymbolSpace, connectivity as connectivity_symbol
from .synthesis import Controller, synthesize
from .worldmodel import ConnectivityRelation, WorldModel, hypothesize


class StaleCandidate(Exception):
    pass


@dataclass(frozen=True)
class RepairCandidate:
    relation: ConnectivityRelation
    hypothetical_world: WorldModel
    controller: Controller
    query_text: str


@dataclass
class RepairQueue:
    candidates: tuple[ConnectivityRelation, ...]
    origin_world: WorldModel
    goal_region: str
    space: SymbolSpace
    weights: dict[str, float]
    parser: Parser
    cursor: int = 0
    last_yielded: RepairCandidate | None = None
    synthesis_calls: int = 0
    stats: dict | None = None      # shared session counters, when attached
    spec_log: list | None = None   # serialized hypothetical specs, when attached


def start_repair(w: WorldModel, goal, space: SymbolSpace,
                 weights: dict[str, float], parser: Parser | None = None) -> RepairQueue:
    """Queue every connectivity relation of the space, in space order."""
    goal_region = getattr(goal, "goal_region", goal)
    relations = tuple(
        ConnectivityRelation(*s.regions) for s in space.connectivity_symbols()
    )
    return RepairQueue(
        candidates=relations,
        origin_world=w,
        goal_region=goal_region,
        space=space,
        weights=weights,
        parser=parser if parser is not None else Parser.for_world(w),
    )


def next_candidate(q: RepairQueue) -> RepairCandidate | None:
    """Advance to the first remaining relation whose hypothetical world synthesizes.

    Relations already represented in the origin world are skipped without a
    synthesis attempt; unrealizable hypotheticals are dismissed.  Returns
    ``None`` when the queue is exhausted.
    """
    while q.cursor < len(q.candidates):
        rel = q.candidates[q.cursor]
        q.cursor += 1
        if rel in q.origin_world.connectivity:
            continue  # merely passed over: it would reproduce the origin spec
        world = hypothesize(q.origin_world, rel)
        spec = build_spec(world, q.goal_region)
        q.synthesis_calls += 1
        if q.stats is not None:
            q.stats["synthesis_calls"] += 1
        if q.spec_log is not None:
            q.spec_log.append(serialize(spec))
        outcome = synthesize(spec)
        if not outcome.realizable:
            continue
        query = generate(
            connectivity_symbol(rel.a, rel.b), q.space, q.origin_world,
            q.weights, q.parser,
        )
        cand = RepairCandidate(
            relation=rel,
            hypothetical_world=world,
            controller=outcome.controller,
            query_text=query,
        )
        q.last_yielded = cand
        return cand
    q.last_yielded = None
    return None


def accept(q: RepairQueue, cand: RepairCandidate) -> tuple[WorldModel, Controller]:
    """The hypothetical world becomes actual; its cached controller executes."""
    if cand is not q.last_yielded:
        raise StaleCandidate("accept of a candidate that is not the pending one")
    q.last_yielded = None
    return cand.hypothetical_world, cand.controller


def reject(q: RepairQueue, cand: RepairCandidate) -> RepairQueue:
    if cand is not q.last_yielded:
        raise StaleCandidate("reject of a candidate that is not the pending one")
    q.last_yielded = None
    return q
