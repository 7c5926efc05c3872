"""Constrained command grammar and a CKY constituency parser.

The grammar covers exactly the forms the robot understands: a navigation
command, a connectivity declarative, a connectivity question, and the bare
yes/no replies.  Region names are terminals; a parser is normally built
from the packaged grammar extended with the region ids of the session's
world (``Parser.for_world``).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources

PHRASE_LABELS = ("VP", "S", "SQ", "PP", "NP", "CVP", "INTJ")
START_LABELS = ("S", "SQ", "VP", "INTJ")


class ParseFailure(Exception):
    pass


@dataclass(frozen=True)
class ParseTree:
    label: str
    children: tuple["ParseTree", ...] = ()
    token: str | None = None

    def __post_init__(self):
        if (self.token is None) == (len(self.children) == 0):
            raise ValueError("node must have either children or a token")

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def tokens(self) -> tuple[str, ...]:
        if self.is_leaf:
            return (self.token,)
        out: tuple[str, ...] = ()
        for c in self.children:
            out += c.tokens()
        return out

    def phrases(self) -> tuple["ParseTree", ...]:
        """Internal phrase nodes, post-order (children before parents)."""
        out: list[ParseTree] = []

        def walk(node: "ParseTree"):
            if node.is_leaf:
                return
            for c in node.children:
                walk(c)
            if node.label in PHRASE_LABELS:
                out.append(node)

        walk(self)
        return tuple(out)

    def bracketed(self) -> str:
        if self.is_leaf:
            return f"({self.label} {self.token})"
        return "(" + self.label + " " + " ".join(c.bracketed() for c in self.children) + ")"


def parse_bracketed(text: str) -> ParseTree:
    """Inverse of ``ParseTree.bracketed``; used by the corpus file."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def node() -> ParseTree:
        nonlocal pos
        skip_ws()
        if pos >= len(text) or text[pos] != "(":
            raise ParseFailure(f"expected '(' at offset {pos}")
        pos += 1
        skip_ws()
        start = pos
        while pos < len(text) and not text[pos].isspace() and text[pos] not in "()":
            pos += 1
        label = text[start:pos]
        children: list[ParseTree] = []
        token = None
        while True:
            skip_ws()
            if pos >= len(text):
                raise ParseFailure("unbalanced brackets")
            if text[pos] == ")":
                pos += 1
                break
            if text[pos] == "(":
                children.append(node())
            else:
                start = pos
                while pos < len(text) and not text[pos].isspace() and text[pos] not in "()":
                    pos += 1
                token = text[start:pos]
        if token is not None and children:
            raise ParseFailure("mixed token and children")
        return ParseTree(label=label, children=tuple(children), token=token)

    tree = node()
    skip_ws()
    if pos != len(text):
        raise ParseFailure("trailing text after tree")
    return tree


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[str, ...]

    @property
    def is_lexical(self) -> bool:
        return len(self.rhs) == 1 and self.rhs[0].islower()


@dataclass(frozen=True)
class Grammar:
    productions: tuple[Production, ...]

    @staticmethod
    def from_text(text: str) -> "Grammar":
        productions = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "->" not in line:
                raise ParseFailure(f"grammar line {lineno}: missing '->'")
            lhs, rhs = line.split("->", 1)
            lhs = lhs.strip()
            rhs_syms = tuple(rhs.split())
            if not lhs or not rhs_syms:
                raise ParseFailure(f"grammar line {lineno}: empty side")
            productions.append(Production(lhs, rhs_syms))
        return Grammar(tuple(productions))

    def to_text(self) -> str:
        return "\n".join(f"{p.lhs} -> {' '.join(p.rhs)}" for p in self.productions) + "\n"

    def with_regions(self, region_ids) -> "Grammar":
        known = {p.rhs[0] for p in self.productions if p.lhs == "REGION"}
        extra = tuple(
            Production("REGION", (rid,)) for rid in region_ids if rid not in known
        )
        return Grammar(self.productions + extra)

    @staticmethod
    def load_default() -> "Grammar":
        text = resources.files("gr1chat.data").joinpath("grammar.txt").read_text("utf-8")
        return Grammar.from_text(text)


def normalize_utterance(text: str) -> str:
    if not text or not text.strip():
        raise ParseFailure("empty utterance")
    for ch in text:
        if ord(ch) > 127:
            raise ParseFailure(f"non-ascii character {ch!r}")
        if unicodedata.category(ch).startswith("C") and ch not in "\t\n":
            raise ParseFailure("control character in utterance")
    cleaned = text.lower().strip()
    while cleaned and cleaned[-1] in "?.!":
        cleaned = cleaned[:-1].rstrip()
    if not cleaned:
        raise ParseFailure("empty utterance")
    return " ".join(cleaned.split())


class Parser:
    """CKY over the internally binarized grammar."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.lexical: dict[str, list[str]] = {}
        self.binary: dict[tuple[str, str], list[str]] = {}
        self.unary: dict[str, list[str]] = {}
        for idx, prod in enumerate(grammar.productions):
            if prod.is_lexical:
                self.lexical.setdefault(prod.rhs[0], []).append(prod.lhs)
            elif len(prod.rhs) == 1:
                self.unary.setdefault(prod.rhs[0], []).append(prod.lhs)
            else:
                syms = list(prod.rhs)
                lhs = prod.lhs
                while len(syms) > 2:
                    helper = f"@{prod.lhs}_{idx}_{len(syms)}"
                    self.binary.setdefault((syms[0], helper), []).append(lhs)
                    lhs = helper
                    syms = syms[1:]
                self.binary.setdefault((syms[0], syms[1]), []).append(lhs)

    @staticmethod
    def for_world(world, grammar: Grammar | None = None) -> "Parser":
        base = grammar if grammar is not None else Grammar.load_default()
        return Parser(base.with_regions(world.region_ids))

    def parse(self, utterance: str) -> ParseTree:
        tokens = normalize_utterance(utterance).split()
        for tok in tokens:
            if tok not in self.lexical:
                raise ParseFailure(f"word {tok!r} is not in the grammar")
        n = len(tokens)
        chart: list[list[dict[str, ParseTree]]] = [
            [{} for _ in range(n + 1)] for _ in range(n + 1)
        ]
        for i, tok in enumerate(tokens):
            cell = chart[i][i + 1]
            for tag in self.lexical[tok]:
                cell.setdefault(tag, ParseTree(label=tag, token=tok))
            self._apply_unary(cell)
        for width in range(2, n + 1):
            for i in range(0, n - width + 1):
                j = i + width
                cell = chart[i][j]
                for k in range(i + 1, j):
                    for left_label, left in chart[i][k].items():
                        for right_label, right in chart[k][j].items():
                            for lhs in self.binary.get((left_label, right_label), ()):
                                if lhs not in cell:
                                    cell[lhs] = ParseTree(
                                        label=lhs, children=(left, right)
                                    )
                self._apply_unary(cell)
        full = chart[0][n]
        roots = [label for label in START_LABELS if label in full]
        if not roots:
            raise ParseFailure(f"no derivation for {' '.join(tokens)!r}")
        return _unbinarize(full[roots[0]])

    def _apply_unary(self, cell: dict[str, ParseTree]):
        added = True
        while added:
            added = False
            for label in list(cell):
                for lhs in self.unary.get(label, ()):
                    if lhs not in cell:
                        cell[lhs] = ParseTree(label=lhs, children=(cell[label],))
                        added = True


def _unbinarize(tree: ParseTree) -> ParseTree:
    if tree.is_leaf:
        return tree
    children: list[ParseTree] = []
    for child in tree.children:
        flattened = _unbinarize(child)
        if _is_helper(flattened):
            children.extend(flattened.children)
        else:
            children.append(flattened)
    return ParseTree(label=tree.label, children=tuple(children))


def _is_helper(tree: ParseTree) -> bool:
    return not tree.is_leaf and tree.label.startswith("@")
