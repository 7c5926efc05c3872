"""Semantic symbols and the symbol space instantiated from a world model.

Four symbol categories exist: objects (regions), connectivity relations,
spatial relations and actions.  Spatial relations are declared for
completeness but never instantiated here; navigation is the only action.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .worldmodel import EmptyWorld, WorldModel, serialize_world

OBJECT = "Object"
CONNECTIVITY = "ConnectivityRelation"
SPATIAL = "SpatialRelation"  # declared, never instantiated
ACTION = "Action"

NAVIGATE = "navigate"


class SymbolError(Exception):
    pass


@dataclass(frozen=True)
class SemanticSymbol:
    kind: str
    regions: tuple[str, ...]
    verb: str | None = None

    def __post_init__(self):
        if self.kind == OBJECT and len(self.regions) != 1:
            raise SymbolError("object symbols name exactly one region")
        if self.kind == CONNECTIVITY:
            if len(self.regions) != 2 or self.regions[0] >= self.regions[1]:
                raise SymbolError("connectivity symbols hold a normalized region pair")
        if self.kind == ACTION and (len(self.regions) != 1 or self.verb != NAVIGATE):
            raise SymbolError("action symbols are navigate(goal region)")
        if self.kind == SPATIAL:
            raise SymbolError("spatial relation symbols are not instantiable")

    @property
    def goal_region(self) -> str:
        if self.kind != ACTION:
            raise SymbolError("only actions have a goal region")
        return self.regions[0]

    def literal(self) -> str:
        if self.kind == ACTION:
            return f"Action{{{self.verb}, {self.regions[0]}}}"
        return f"{self.kind}{{{', '.join(self.regions)}}}"


def obj(region_id: str) -> SemanticSymbol:
    return SemanticSymbol(OBJECT, (region_id,))


def connectivity(a: str, b: str) -> SemanticSymbol:
    if a > b:
        a, b = b, a
    return SemanticSymbol(CONNECTIVITY, (a, b))


def navigate(region_id: str) -> SemanticSymbol:
    return SemanticSymbol(ACTION, (region_id,), verb=NAVIGATE)


def parse_literal(text: str) -> SemanticSymbol:
    text = text.strip()
    if not text.endswith("}") or "{" not in text:
        raise SymbolError(f"bad symbol literal {text!r}")
    kind, rest = text[:-1].split("{", 1)
    parts = [p.strip() for p in rest.split(",")]
    if kind == OBJECT and len(parts) == 1:
        return obj(parts[0])
    if kind == CONNECTIVITY and len(parts) == 2:
        return connectivity(parts[0], parts[1])
    if kind == ACTION and len(parts) == 2 and parts[0] == NAVIGATE:
        return navigate(parts[1])
    raise SymbolError(f"bad symbol literal {text!r}")


@dataclass(frozen=True)
class SymbolSpace:
    symbols: tuple[SemanticSymbol, ...]
    source_world: str

    def __contains__(self, symbol: SemanticSymbol) -> bool:
        return symbol in self.symbols

    def index_of(self, symbol: SemanticSymbol) -> int:
        return self.symbols.index(symbol)

    def connectivity_symbols(self) -> tuple[SemanticSymbol, ...]:
        return tuple(s for s in self.symbols if s.kind == CONNECTIVITY)


def world_fingerprint(w: WorldModel) -> str:
    return hashlib.sha256(serialize_world(w).encode("utf-8")).hexdigest()[:12]


def instantiate_symbols(w: WorldModel) -> SymbolSpace:
    """All objects, all region-pair connectivity relations, all navigate actions.

    Order is deterministic: objects in region insertion order, then
    connectivity relations over insertion-ordered pairs (i < j), then
    actions in insertion order.  The repair queue inherits this order.
    """
    if not w.regions:
        raise EmptyWorld("cannot instantiate symbols for an empty world")
    ids = w.region_ids
    symbols: list[SemanticSymbol] = [obj(r) for r in ids]
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            symbols.append(connectivity(ids[i], ids[j]))
    symbols.extend(navigate(r) for r in ids)
    return SymbolSpace(symbols=tuple(symbols), source_world=world_fingerprint(w))
