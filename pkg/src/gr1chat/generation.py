"""Query generation by inverting the grounding search.

To ask about a connectivity relation, candidate declarative phrasings are
enumerated, each is grounded, and the best-scoring phrase whose grounding is
the target relation is rendered into the interrogative query template.

Candidates are tried with the better-connected endpoint named first: the
robot anchors its question on the region it already knows links for, and
asks about the novel one.  Symmetric phrasings score identically under the
factor features, so this ordering decides the surface form.
"""

from __future__ import annotations

from .grammar import Parser
from .grounding import GroundingFailure, ground
from .symbols import CONNECTIVITY, SemanticSymbol, SymbolSpace
from .worldmodel import WorldModel


class GenerationFailure(Exception):
    pass


def declarative_form(a: str, b: str) -> str:
    return f"the {a} capsule is connected to the {b} capsule"


def interrogative_form(a: str, b: str) -> str:
    return f"is the {a} capsule connected to the {b} capsule?"


def candidate_pairs(w: WorldModel) -> tuple[tuple[str, str], ...]:
    index = {rid: i for i, rid in enumerate(w.region_ids)}

    def key(pair):
        a, b = pair
        return (-w.degree(a), index[a], index[b])

    pairs = [
        (a, b)
        for a in w.region_ids
        for b in w.region_ids
        if a != b
    ]
    return tuple(sorted(pairs, key=key))


def generate(target: SemanticSymbol, space: SymbolSpace, w: WorldModel,
             weights: dict[str, float], parser: Parser | None = None) -> str:
    if target.kind != CONNECTIVITY:
        raise GenerationFailure("only connectivity relations are realized as queries")
    if target not in space:
        raise GenerationFailure(f"{target.literal()} is not in the symbol space")
    if parser is None:
        parser = Parser.for_world(w)

    best: tuple[float, tuple[str, str]] | None = None
    for a, b in candidate_pairs(w):
        try:
            result = ground(parser.parse(declarative_form(a, b)), space, w, weights)
        except GroundingFailure:
            continue
        if result.true_symbol != target:
            continue
        # likelihood of the desired utterance-level correspondence: the
        # root row holds the target True and every other symbol False
        match_score = sum(entry.score for entry in result.root_row())
        if best is None or match_score > best[0]:
            best = (match_score, (a, b))
    if best is None:
        raise GenerationFailure(f"no candidate phrase grounds to {target.literal()}")
    a, b = best[1]
    return interrogative_form(a, b)
