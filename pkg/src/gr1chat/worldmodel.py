"""Symbolic world model: regions, undirected connectivity, robot location.

Worlds are immutable values.  Every update returns a fresh world, which is
what makes hypothetical variants (see ``repair``) cheap and safe to branch.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, replace

_ID_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class WorldError(Exception):
    pass


class DuplicateRegion(WorldError):
    pass


class UnknownRegion(WorldError):
    pass


class SelfConnection(WorldError):
    pass


class AlreadyPresent(WorldError):
    pass


class EmptyWorld(WorldError):
    pass


class WorldSyntaxError(WorldError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Region:
    id: str
    display_name: str

    def __post_init__(self):
        if not _ID_RE.match(self.id):
            raise ValueError(f"bad region id {self.id!r}")
        if '"' in self.display_name:
            raise ValueError("display name must not contain double quotes")


@dataclass(frozen=True)
class ConnectivityRelation:
    """Undirected link between two regions, stored with a < b."""

    a: str
    b: str

    def __post_init__(self):
        if self.a == self.b:
            raise SelfConnection(f"region {self.a!r} cannot connect to itself")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)

    def touches(self, region_id: str) -> bool:
        return region_id in (self.a, self.b)

    def other(self, region_id: str) -> str:
        return self.b if region_id == self.a else self.a


@dataclass(frozen=True)
class KripkeStructure:
    states: frozenset[str]
    edges: frozenset[tuple[str, str]]
    initial: str


@dataclass(frozen=True)
class WorldModel:
    regions: tuple[Region, ...] = ()
    connectivity: frozenset[ConnectivityRelation] = frozenset()
    robot_at: str | None = None

    def __post_init__(self):
        ids = self.region_ids
        if len(set(ids)) != len(ids):
            raise DuplicateRegion("duplicate region ids")
        if self.regions and self.robot_at not in ids:
            raise UnknownRegion(f"robot location {self.robot_at!r} not a region")
        for rel in self.connectivity:
            for end in rel.pair:
                if end not in ids:
                    raise UnknownRegion(f"connectivity endpoint {end!r} not a region")

    @property
    def region_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.regions)

    def region(self, region_id: str) -> Region:
        for r in self.regions:
            if r.id == region_id:
                return r
        raise UnknownRegion(f"unknown region {region_id!r}")

    def require(self, region_id: str):
        if region_id not in self.region_ids:
            raise UnknownRegion(f"unknown region {region_id!r}")

    def neighbors(self, region_id: str) -> tuple[str, ...]:
        """Connected regions, in insertion order."""
        self.require(region_id)
        linked = {rel.other(region_id) for rel in self.connectivity if rel.touches(region_id)}
        return tuple(r for r in self.region_ids if r in linked)

    def degree(self, region_id: str) -> int:
        return len(self.neighbors(region_id))


def add_region(w: WorldModel, r: Region) -> WorldModel:
    if r.id in w.region_ids:
        raise DuplicateRegion(f"region {r.id!r} already present")
    robot = w.robot_at if w.robot_at is not None else r.id
    return replace(w, regions=w.regions + (r,), robot_at=robot)


def assert_connectivity(w: WorldModel, a: str, b: str) -> tuple[WorldModel, bool]:
    """Add the undirected relation {a, b}; returns (world, changed)."""
    w.require(a)
    w.require(b)
    rel = ConnectivityRelation(a, b)
    if rel in w.connectivity:
        return w, False
    return replace(w, connectivity=w.connectivity | {rel}), True


def is_connected(w: WorldModel, a: str, b: str) -> bool:
    w.require(a)
    w.require(b)
    if a == b:
        return False
    return ConnectivityRelation(a, b) in w.connectivity


def hypothesize(w: WorldModel, rel: ConnectivityRelation) -> WorldModel:
    """A copy of ``w`` augmented with ``rel``; ``w`` itself is untouched."""
    w.require(rel.a)
    w.require(rel.b)
    if rel in w.connectivity:
        raise AlreadyPresent(f"relation {rel.pair} already in world")
    return replace(w, connectivity=w.connectivity | {rel})


def remove_connectivity(w: WorldModel, rel: ConnectivityRelation) -> WorldModel:
    if rel not in w.connectivity:
        raise UnknownRegion(f"relation {rel.pair} not in world")
    return replace(w, connectivity=w.connectivity - {rel})


def set_robot_location(w: WorldModel, region_id: str) -> WorldModel:
    w.require(region_id)
    return replace(w, robot_at=region_id)


def to_kripke(w: WorldModel) -> KripkeStructure:
    """Permissible region-to-region moves: self-loops plus symmetric links."""
    if not w.regions:
        raise EmptyWorld("world has no regions")
    edges = {(r, r) for r in w.region_ids}
    for rel in w.connectivity:
        edges.add((rel.a, rel.b))
        edges.add((rel.b, rel.a))
    return KripkeStructure(
        states=frozenset(w.region_ids),
        edges=frozenset(edges),
        initial=w.robot_at,
    )


def serialize_world(w: WorldModel) -> str:
    """Canonical world file text; ``parse_world`` inverts it losslessly."""
    lines = [f'region {r.id} "{r.display_name}"' for r in w.regions]
    index = {rid: i for i, rid in enumerate(w.region_ids)}
    for rel in sorted(w.connectivity, key=lambda r: (index[r.a], index[r.b])):
        lines.append(f"connect {rel.a} {rel.b}")
    if w.robot_at is not None:
        lines.append(f"robot {w.robot_at}")
    return "\n".join(lines) + "\n"


def parse_world(text: str) -> WorldModel:
    w = WorldModel()
    robot = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            parts = shlex.split(line)
        except ValueError as exc:
            raise WorldSyntaxError(str(exc), lineno) from None
        kind = parts[0]
        if kind == "region":
            if len(parts) != 3:
                raise WorldSyntaxError("expected: region <id> \"<display name>\"", lineno)
            try:
                w = add_region(w, Region(parts[1], parts[2]))
            except (ValueError, WorldError) as exc:
                raise WorldSyntaxError(str(exc), lineno) from None
        elif kind == "connect":
            if len(parts) != 3:
                raise WorldSyntaxError("expected: connect <id> <id>", lineno)
            try:
                w, _ = assert_connectivity(w, parts[1], parts[2])
            except WorldError as exc:
                raise WorldSyntaxError(str(exc), lineno) from None
        elif kind == "robot":
            if len(parts) != 2:
                raise WorldSyntaxError("expected: robot <id>", lineno)
            robot = parts[1]
        else:
            raise WorldSyntaxError(f"unknown record {kind!r}", lineno)
    if robot is not None:
        try:
            w = set_robot_location(w, robot)
        except WorldError as exc:
            raise WorldSyntaxError(str(exc), len(text.splitlines())) from None
    return w


def world_snapshot(w: WorldModel) -> dict:
    """JSON-friendly view used by the service events and persistence."""
    return {
        "regions": [{"id": r.id, "display_name": r.display_name} for r in w.regions],
        "connectivity": [[rel.a, rel.b] for rel in sorted(w.connectivity, key=lambda r: r.pair)],
        "robot_at": w.robot_at,
    }
