"""Correspondence grounding between parse-tree phrases and semantic symbols.

Every internal phrase gets a Boolean correspondence with every symbol in the
space, scored by a log-linear factor over binary feature indicators.  Phrases
are processed bottom-up; the kinds of the True symbols of child phrases feed
the parent's factor context.  At the root, exactly one symbol is forced True
(the argmax), which is the utterance's grounding.

Feature weights are fit by perceptron updates against a small supervised
corpus until every factor decision on the corpus is reproduced.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .grammar import ParseFailure, ParseTree, normalize_utterance, parse_bracketed
from .symbols import (
    OBJECT,
    SemanticSymbol,
    SymbolSpace,
    connectivity,
    navigate,
    obj,
    parse_literal,
)
from .worldmodel import WorldModel


class GroundingFailure(Exception):
    pass


class NonSeparable(Exception):
    def __init__(self, message, weights, mistakes, epochs):
        super().__init__(message)
        self.weights = weights
        self.mistakes = mistakes
        self.epochs = epochs


class Reply(enum.Enum):
    YES = "yes"
    NO = "no"
    NOT_A_REPLY = "not_a_reply"


def classify_reply(utterance: str) -> Reply:
    try:
        text = normalize_utterance(utterance)
    except ParseFailure:
        return Reply.NOT_A_REPLY
    if text == "yes":
        return Reply.YES
    if text == "no":
        return Reply.NO
    return Reply.NOT_A_REPLY


# ---------------------------------------------------------------------------
# factors


@dataclass(frozen=True)
class PhraseContext:
    label: str
    head: str
    span: tuple[str, ...]
    region_words: tuple[str, ...]
    child_kinds: tuple[str, ...]


def phrase_context(phrase: ParseTree, child_true_kinds, region_ids) -> PhraseContext:
    span = phrase.tokens()
    return PhraseContext(
        label=phrase.label,
        head=span[0],
        span=span,
        region_words=tuple(t for t in span if t in region_ids),
        child_kinds=tuple(sorted(child_true_kinds)),
    )


def features(ctx: PhraseContext, symbol: SemanticSymbol) -> tuple[str, ...]:
    feats = [
        f"label={ctx.label}|kind={symbol.kind}",
        f"head={ctx.head}|kind={symbol.kind}",
        f"children=[{','.join(ctx.child_kinds)}]|kind={symbol.kind}",
    ]
    payload = set(symbol.regions)
    feats.append("payload_covered" if payload <= set(ctx.region_words) else "payload_missing")
    feats.append("span_covered" if set(ctx.region_words) <= payload else "span_extra")
    if "to" in ctx.span:
        feats.append(f"prep_to|kind={symbol.kind}")
    return tuple(feats)


def margin(weights: dict[str, float], ctx: PhraseContext, symbol: SemanticSymbol) -> float:
    return sum(weights.get(f, 0.0) for f in features(ctx, symbol))


def _log_probs(m: float) -> tuple[float, float]:
    """(log p(True), log p(False)) of a factor with margin m."""
    if m >= 0:
        lt = -math.log1p(math.exp(-m))
        return lt, lt - m
    lf = -math.log1p(math.exp(m))
    return lf + m, lf


@dataclass(frozen=True)
class Correspondence:
    phrase_index: int
    symbol_index: int
    value: bool


@dataclass(frozen=True)
class CorrEntry:
    value: bool
    score: float  # log-likelihood of the assigned value


@dataclass(frozen=True)
class GroundingResult:
    true_symbol: SemanticSymbol
    score: float
    phrases: tuple[PhraseContext, ...]
    matrix: tuple[tuple[CorrEntry, ...], ...]

    def correspondences(self) -> tuple[Correspondence, ...]:
        return tuple(
            Correspondence(i, j, entry.value)
            for i, row in enumerate(self.matrix)
            for j, entry in enumerate(row)
        )

    def root_row(self) -> tuple[CorrEntry, ...]:
        return self.matrix[-1]


def ground(tree: ParseTree, space: SymbolSpace, w: WorldModel,
           weights: dict[str, float]) -> GroundingResult:
    """Bottom-up factor evaluation; the root keeps exactly one True symbol."""
    region_ids = set(w.region_ids)
    phrases = tree.phrases()  # post-order, root last
    contexts: list[PhraseContext] = []
    true_kinds: dict[int, tuple[str, ...]] = {}
    matrix: list[tuple[CorrEntry, ...]] = []
    by_node = {id(p): idx for idx, p in enumerate(phrases)}

    for idx, phrase in enumerate(phrases):
        child_kinds: list[str] = []
        for child in phrase.children:
            cidx = by_node.get(id(child))
            if cidx is not None:
                child_kinds.extend(true_kinds[cidx])
        ctx = phrase_context(phrase, child_kinds, region_ids)
        contexts.append(ctx)
        margins = [margin(weights, ctx, s) for s in space.symbols]
        if idx < len(phrases) - 1:
            row = []
            kinds = []
            for s, m in zip(space.symbols, margins):
                value = m > 0
                lt, lf = _log_probs(m)
                row.append(CorrEntry(value, lt if value else lf))
                if value:
                    kinds.append(s.kind)
            matrix.append(tuple(row))
            true_kinds[idx] = tuple(kinds)
        else:
            best_j, best_m = None, 0.0
            for j, m in enumerate(margins):
                if best_j is None or m > best_m:
                    best_j, best_m = j, m
            if best_m <= 0:
                raise GroundingFailure(
                    f"no symbol scores above the False alternative for "
                    f"{' '.join(tree.tokens())!r}"
                )
            row = []
            for j, m in enumerate(margins):
                value = j == best_j
                lt, lf = _log_probs(m)
                row.append(CorrEntry(value, lt if value else lf))
            matrix.append(tuple(row))
            true_kinds[idx] = (space.symbols[best_j].kind,)

    score = sum(entry.score for row in matrix for entry in row)
    root_symbol = space.symbols[
        next(j for j, e in enumerate(matrix[-1]) if e.value)
    ]
    return GroundingResult(
        true_symbol=root_symbol,
        score=score,
        phrases=tuple(contexts),
        matrix=tuple(matrix),
    )


# ---------------------------------------------------------------------------
# supervision


def derive_phrase_symbols(tree: ParseTree) -> dict[int, SemanticSymbol]:
    """Rule-based per-phrase annotation used to expand corpus labels.

    Returns a map from phrase index (post-order) to that phrase's gold
    symbol; phrases without a grounding (interjections) are omitted.
    """
    phrases = tree.phrases()
    by_node = {id(p): idx for idx, p in enumerate(phrases)}
    gold: dict[int, SemanticSymbol] = {}

    def child_gold(phrase: ParseTree, label: str) -> SemanticSymbol | None:
        for child in phrase.children:
            if not child.is_leaf and child.label == label:
                idx = by_node[id(child)]
                if idx in gold:
                    return gold[idx]
        return None

    for idx, phrase in enumerate(phrases):
        if phrase.label == "NP":
            regions = [c.token for c in phrase.children if c.label == "REGION"]
            if len(regions) == 1:
                gold[idx] = obj(regions[0])
        elif phrase.label == "PP":
            got = child_gold(phrase, "NP")
            if got is not None:
                gold[idx] = got
        elif phrase.label == "CVP":
            got = child_gold(phrase, "PP")
            if got is not None:
                gold[idx] = got
        elif phrase.label == "VP":
            got = child_gold(phrase, "PP")
            if got is not None and got.kind == OBJECT:
                gold[idx] = navigate(got.regions[0])
        elif phrase.label == "S":
            left = child_gold(phrase, "NP")
            right = child_gold(phrase, "CVP")
            if left and right and left.kind == right.kind == OBJECT:
                gold[idx] = connectivity(left.regions[0], right.regions[0])
        elif phrase.label == "SQ":
            left = child_gold(phrase, "NP")
            right = child_gold(phrase, "PP")
            if left and right and left.kind == right.kind == OBJECT:
                gold[idx] = connectivity(left.regions[0], right.regions[0])
    return gold


@dataclass(frozen=True)
class CorpusItem:
    utterance: str
    tree: ParseTree
    symbol: SemanticSymbol


class CorpusError(Exception):
    pass


def parse_corpus(text: str) -> tuple[CorpusItem, ...]:
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusError(f"line {lineno}: expected utterance<TAB>tree<TAB>symbol")
        utterance, tree_text, literal = parts
        tree = parse_bracketed(tree_text)
        symbol = parse_literal(literal)
        if " ".join(tree.tokens()) != normalize_utterance(utterance):
            raise CorpusError(f"line {lineno}: tree leaves disagree with utterance")
        derived = derive_phrase_symbols(tree)
        root_idx = len(tree.phrases()) - 1
        if derived.get(root_idx) != symbol:
            raise CorpusError(f"line {lineno}: annotation disagrees with tree structure")
        items.append(CorpusItem(utterance, tree, symbol))
    return tuple(items)


def render_corpus(items) -> str:
    return "".join(
        f"{it.utterance}\t{it.tree.bracketed()}\t{it.symbol.literal()}\n" for it in items
    )


def corpus_world(items) -> WorldModel:
    """Minimal world implied by a corpus: its region vocabulary, no links."""
    from .worldmodel import Region, add_region

    w = WorldModel()
    seen = []
    for item in items:
        for phrase in item.tree.phrases():
            for child in phrase.children:
                if child.is_leaf and child.label == "REGION" and child.token not in seen:
                    seen.append(child.token)
    for rid in seen:
        w = add_region(w, Region(rid, f"the {rid} capsule"))
    return w


def train(corpus, max_epochs: int = 1000) -> dict[str, float]:
    """Fit factor weights until the corpus is reproduced exactly.

    Runs plain perceptron updates over every (phrase, symbol) factor decision,
    in corpus order, bottom-up within each item.  Converged means an epoch
    with zero updates, which implies 100% root accuracy when re-grounding.
    """
    items = list(corpus)
    if not items:
        raise CorpusError("corpus is empty")
    world = corpus_world(items)
    space_local = _space_for(world)
    region_ids = set(world.region_ids)
    weights: dict[str, float] = {}

    mistakes = 0
    for epoch in range(max_epochs):
        mistakes = 0
        for item in items:
            gold = derive_phrase_symbols(item.tree)
            phrases = item.tree.phrases()
            by_node = {id(p): idx for idx, p in enumerate(phrases)}
            predicted_kinds: dict[int, tuple[str, ...]] = {}
            for idx, phrase in enumerate(phrases):
                child_kinds: list[str] = []
                for child in phrase.children:
                    cidx = by_node.get(id(child))
                    if cidx is not None:
                        child_kinds.extend(predicted_kinds[cidx])
                ctx = phrase_context(phrase, child_kinds, region_ids)
                kinds = []
                for symbol in space_local.symbols:
                    m = margin(weights, ctx, symbol)
                    want = gold.get(idx) == symbol
                    got = m > 0
                    if got != want:
                        mistakes += 1
                        delta = 1.0 if want else -1.0
                        for f in features(ctx, symbol):
                            weights[f] = weights.get(f, 0.0) + delta
                        got = margin(weights, ctx, symbol) > 0
                    if got:
                        kinds.append(symbol.kind)
                predicted_kinds[idx] = tuple(kinds)
        if mistakes == 0:
            return weights
    raise NonSeparable(
        f"training did not converge in {max_epochs} epochs",
        weights=weights, mistakes=mistakes, epochs=max_epochs,
    )


def _space_for(world: WorldModel) -> SymbolSpace:
    from .symbols import instantiate_symbols

    return instantiate_symbols(world)


def corpus_accuracy(items, weights: dict[str, float]) -> float:
    """Fraction of corpus items whose root grounding matches the annotation."""
    world = corpus_world(items)
    space_local = _space_for(world)
    good = 0
    for item in items:
        try:
            res = ground(item.tree, space_local, world, weights)
        except GroundingFailure:
            continue
        if res.true_symbol == item.symbol:
            good += 1
    return good / len(items)


# ---------------------------------------------------------------------------
# weights files


def load_weights(text: str) -> dict[str, float]:
    weights: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"weights line {lineno}: expected feature<TAB>value")
        value = float(parts[1])
        if not math.isfinite(value):
            raise CorpusError(f"weights line {lineno}: non-finite value")
        weights[parts[0]] = value
    return weights


def save_weights(weights: dict[str, float]) -> str:
    return "".join(f"{k}\t{weights[k]!r}\n" for k in sorted(weights))
