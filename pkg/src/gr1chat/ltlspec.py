"""LTL abstract syntax plus the GR(1) specification template for module-graph navigation.

The formula core keeps negation, disjunction, next and until as primitives;
conjunction, implication, equivalence, eventually and always are stored as
derived nodes that ``expand`` rewrites into the primitive core.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class SpecError(Exception):
    pass


class SpecSyntaxError(SpecError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


# derived operators, kept tagged so specs serialize the way they were written
@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


def expand(f: Formula) -> Formula:
    """Rewrite derived operators into the primitive core."""
    if isinstance(f, (TrueConst, FalseConst, Atom)):
        return f
    if isinstance(f, Not):
        return Not(expand(f.operand))
    if isinstance(f, Or):
        return Or(expand(f.left), expand(f.right))
    if isinstance(f, Next):
        return Next(expand(f.operand))
    if isinstance(f, Until):
        return Until(expand(f.left), expand(f.right))
    if isinstance(f, And):
        return Not(Or(Not(expand(f.left)), Not(expand(f.right))))
    if isinstance(f, Implies):
        return Or(Not(expand(f.left)), expand(f.right))
    if isinstance(f, Iff):
        return expand(And(Implies(f.left, f.right), Implies(f.right, f.left)))
    if isinstance(f, Eventually):
        return Until(TrueConst(), expand(f.operand))
    if isinstance(f, Always):
        return Not(Until(TrueConst(), Not(expand(f.operand))))
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset({f.name})
    if isinstance(f, (TrueConst, FalseConst)):
        return frozenset()
    if isinstance(f, (Not, Next, Eventually, Always)):
        return atoms(f.operand)
    return atoms(f.left) | atoms(f.right)


def has_next(f: Formula) -> bool:
    if isinstance(f, Next):
        return True
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return False
    if isinstance(f, (Not, Eventually, Always)):
        return has_next(f.operand)
    return has_next(f.left) or has_next(f.right)


def next_atoms(f: Formula) -> frozenset[str]:
    """Atoms that occur somewhere under a Next operator."""
    if isinstance(f, Next):
        return atoms(f.operand)
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return frozenset()
    if isinstance(f, (Not, Eventually, Always)):
        return next_atoms(f.operand)
    return next_atoms(f.left) | next_atoms(f.right)


def eval_state(f: Formula, valuation: dict[str, bool]) -> bool:
    """Evaluate a Boolean (state-level) formula; Next/Until are not allowed."""
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, Atom):
        return valuation[f.name]
    if isinstance(f, Not):
        return not eval_state(f.operand, valuation)
    if isinstance(f, Or):
        return eval_state(f.left, valuation) or eval_state(f.right, valuation)
    if isinstance(f, And):
        return eval_state(f.left, valuation) and eval_state(f.right, valuation)
    if isinstance(f, Implies):
        return (not eval_state(f.left, valuation)) or eval_state(f.right, valuation)
    if isinstance(f, Iff):
        return eval_state(f.left, valuation) == eval_state(f.right, valuation)
    raise SpecError(f"not a state formula: {f!r}")


def eval_transition(f: Formula, cur: dict[str, bool], nxt: dict[str, bool]) -> bool:
    """Evaluate a transition formula over a (current, next) valuation pair."""
    if isinstance(f, Next):
        return eval_state(f.operand, nxt)
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, Atom):
        return cur[f.name]
    if isinstance(f, Not):
        return not eval_transition(f.operand, cur, nxt)
    if isinstance(f, Or):
        return eval_transition(f.left, cur, nxt) or eval_transition(f.right, cur, nxt)
    if isinstance(f, And):
        return eval_transition(f.left, cur, nxt) and eval_transition(f.right, cur, nxt)
    if isinstance(f, Implies):
        return (not eval_transition(f.left, cur, nxt)) or eval_transition(f.right, cur, nxt)
    if isinstance(f, Iff):
        return eval_transition(f.left, cur, nxt) == eval_transition(f.right, cur, nxt)
    raise SpecError(f"not a transition formula: {f!r}")


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TrueConst()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FalseConst()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# GR(1) specifications


@dataclass(frozen=True)
class PropositionSet:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self):
        if set(self.inputs) & set(self.outputs):
            raise SpecError("input and output propositions overlap")

    @property
    def all(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    @staticmethod
    def for_regions(region_ids: tuple[str, ...]) -> "PropositionSet":
        return PropositionSet(
            inputs=tuple(f"in_{r}" for r in region_ids),
            outputs=tuple(f"go_{r}" for r in region_ids),
        )


@dataclass(frozen=True)
class GR1Spec:
    props: PropositionSet
    env_init: Formula
    env_trans: tuple[Formula, ...]
    env_live: tuple[Formula, ...]
    sys_init: Formula
    sys_trans: tuple[Formula, ...]
    sys_live: tuple[Formula, ...]

    def __post_init__(self):
        ap = set(self.props.all)
        for f in (self.env_init, self.sys_init, *self.env_trans, *self.env_live,
                  *self.sys_trans, *self.sys_live):
            extra = atoms(f) - ap
            if extra:
                raise SpecError(f"formula uses undeclared atoms {sorted(extra)}")
        for f in (self.env_init, self.sys_init, *self.env_live, *self.sys_live):
            if has_next(f):
                raise SpecError("Next is only allowed in transition formulas")
        for f in self.env_trans:
            bad = next_atoms(f) - set(self.props.inputs)
            if bad:
                raise SpecError(f"env transition primes non-input atoms {sorted(bad)}")
        if not self.env_live or not self.sys_live:
            raise SpecError("liveness lists must be nonempty (use TRUE)")


def _exactly_one(names: tuple[str, ...], true_name: str, wrap=lambda a: a) -> Formula:
    return conj(
        [wrap(Atom(n)) if n == true_name else Not(wrap(Atom(n))) for n in names]
    )


def _exactly_one_any(names: tuple[str, ...], wrap) -> Formula:
    choices = []
    for pick in names:
        choices.append(
            conj([wrap(Atom(n)) if n == pick else Not(wrap(Atom(n))) for n in names])
        )
    return disj(choices)


def build_spec(w, goal) -> GR1Spec:
    """Compile a world model plus a navigation goal into the GR(1) template.

    Inputs sense which region the robot occupies; outputs command which region
    it should move to.  Transitions mirror the world's Kripke structure: the
    robot may only drift toward the commanded region along known links, the
    commander may only retarget to a region adjacent to (or equal to) the
    current one, and a command holds until the robot arrives.  The environment
    is assumed to eventually deliver the robot wherever it is persistently
    commanded; the system goal is to reach the goal region infinitely often.
    """
    from .worldmodel import UnknownRegion  # local import keeps module deps one-way

    goal_region = getattr(goal, "goal_region", goal)
    regions = w.region_ids
    if goal_region not in regions:
        raise UnknownRegion(f"goal region {goal_region!r} not in world")
    props = PropositionSet.for_regions(regions)
    in_ = {r: Atom(f"in_{r}") for r in regions}
    go = {r: Atom(f"go_{r}") for r in regions}

    env_init = _exactly_one(props.inputs, f"in_{w.robot_at}")
    sys_init = _exactly_one(props.outputs, f"go_{w.robot_at}")

    env_trans = [_exactly_one_any(props.inputs, Next)]
    from .worldmodel import is_connected

    for a in regions:
        for b in regions:
            pre = And(in_[a], go[b])
            if a == b:
                env_trans.append(Implies(pre, Next(in_[a])))
            elif is_connected(w, a, b):
                env_trans.append(Implies(pre, Or(Next(in_[a]), Next(in_[b]))))
            else:
                env_trans.append(Implies(pre, Next(in_[a])))

    env_live = [Or(in_[b], Not(go[b])) for b in regions]

    sys_trans = [_exactly_one_any(props.outputs, Next)]
    for b in regions:
        sys_trans.append(Implies(And(go[b], Not(in_[b])), Next(go[b])))
    for b in regions:
        here = [in_[b]] + [in_[a] for a in regions if is_connected(w, a, b)]
        sys_trans.append(Implies(And(Not(go[b]), Next(go[b])), disj(here)))

    sys_live = [in_[goal_region]]

    return GR1Spec(
        props=props,
        env_init=env_init,
        env_trans=tuple(env_trans),
        env_live=tuple(env_live),
        sys_init=sys_init,
        sys_trans=tuple(sys_trans),
        sys_live=tuple(sys_live),
    )


# ---------------------------------------------------------------------------
# text format

_SECTIONS = (
    "[INPUT]", "[OUTPUT]", "[ENV_INIT]", "[ENV_TRANS]",
    "[ENV_LIVENESS]", "[SYS_INIT]", "[SYS_TRANS]", "[SYS_LIVENESS]",
)

# rendering precedence: higher binds tighter
_PREC_IFF = 0
_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


def render(f: Formula) -> str:
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, TrueConst):
        return "TRUE"
    if isinstance(f, FalseConst):
        return "FALSE"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _render(f.operand, _PREC_UNARY)
    if isinstance(f, Next):
        return "X " + _render(f.operand, _PREC_UNARY)
    if isinstance(f, And):
        s = _render(f.left, _PREC_AND) + " & " + _render(f.right, _PREC_AND + 1)
        return f"({s})" if ctx > _PREC_AND else s
    if isinstance(f, Or):
        s = _render(f.left, _PREC_OR) + " | " + _render(f.right, _PREC_OR + 1)
        return f"({s})" if ctx > _PREC_OR else s
    if isinstance(f, Implies):
        s = _render(f.left, _PREC_IMPLIES + 1) + " -> " + _render(f.right, _PREC_IMPLIES)
        return f"({s})" if ctx > _PREC_IMPLIES else s
    if isinstance(f, Iff):
        s = _render(f.left, _PREC_IFF + 1) + " <-> " + _render(f.right, _PREC_IFF)
        return f"({s})" if ctx > _PREC_IFF else s
    raise SpecError(f"cannot serialize {type(f).__name__} in spec text")


def serialize(spec: GR1Spec) -> str:
    blocks = [
        ("[INPUT]", list(spec.props.inputs)),
        ("[OUTPUT]", list(spec.props.outputs)),
        ("[ENV_INIT]", [render(spec.env_init)]),
        ("[ENV_TRANS]", [render(f) for f in spec.env_trans]),
        ("[ENV_LIVENESS]", [render(f) for f in spec.env_live]),
        ("[SYS_INIT]", [render(spec.sys_init)]),
        ("[SYS_TRANS]", [render(f) for f in spec.sys_trans]),
        ("[SYS_LIVENESS]", [render(f) for f in spec.sys_live]),
    ]
    out = []
    for header, lines in blocks:
        out.append(header)
        out.extend(lines)
        out.append("")
    return "\n".join(out)


class _Tokenizer:
    def __init__(self, text, line):
        self.text = text
        self.line = line
        self.pos = 0
        self.tokens = []
        self._scan()
        self.idx = 0

    def _scan(self):
        i, text = 0, self.text
        while i < len(text):
            c = text[i]
            if c in " \t":
                i += 1
                continue
            start = i
            if c.isalpha() or c == "_":
                while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                    i += 1
                self.tokens.append((text[start:i], start + 1))
            elif text.startswith("->", i):
                self.tokens.append(("->", start + 1))
                i += 2
            elif text.startswith("<->", i):
                self.tokens.append(("<->", start + 1))
                i += 3
            elif c in "!&|()":
                self.tokens.append((c, start + 1))
                i += 1
            else:
                raise SpecSyntaxError(f"unexpected character {c!r}", self.line, i + 1)

    def peek(self):
        return self.tokens[self.idx][0] if self.idx < len(self.tokens) else None

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, what):
        if self.peek() != what:
            col = self.tokens[self.idx][1] if self.idx < len(self.tokens) else len(self.text) + 1
            raise SpecSyntaxError(f"expected {what!r}", self.line, col)
        return self.next()

    def column(self):
        return self.tokens[self.idx][1] if self.idx < len(self.tokens) else len(self.text) + 1


def parse_formula(text: str, line: int = 1) -> Formula:
    tz = _Tokenizer(text, line)
    f = _parse_iff(tz)
    if tz.peek() is not None:
        raise SpecSyntaxError(f"trailing input {tz.peek()!r}", line, tz.column())
    return f


def _parse_iff(tz):
    left = _parse_implies(tz)
    if tz.peek() == "<->":
        tz.next()
        return Iff(left, _parse_iff(tz))
    return left


def _parse_implies(tz):
    left = _parse_or(tz)
    if tz.peek() == "->":
        tz.next()
        return Implies(left, _parse_implies(tz))
    return left


def _parse_or(tz):
    out = _parse_and(tz)
    while tz.peek() == "|":
        tz.next()
        out = Or(out, _parse_and(tz))
    return out


def _parse_and(tz):
    out = _parse_unary(tz)
    while tz.peek() == "&":
        tz.next()
        out = And(out, _parse_unary(tz))
    return out


def _parse_unary(tz):
    tok = tz.peek()
    if tok is None:
        raise SpecSyntaxError("unexpected end of formula", tz.line, len(tz.text) + 1)
    if tok == "!":
        tz.next()
        return Not(_parse_unary(tz))
    if tok == "X":
        tz.next()
        return Next(_parse_unary(tz))
    if tok == "(":
        tz.next()
        inner = _parse_iff(tz)
        tz.expect(")")
        return inner
    if tok == "TRUE":
        tz.next()
        return TrueConst()
    if tok == "FALSE":
        tz.next()
        return FalseConst()
    name, col = tz.next()
    if not (name[0].isalpha() or name[0] == "_"):
        raise SpecSyntaxError(f"expected atom, found {name!r}", tz.line, col)
    return Atom(name)


def parse_spec(text: str) -> GR1Spec:
    sections: dict[str, list[tuple[str, int]]] = {h: [] for h in _SECTIONS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in sections:
            current = line
            continue
        if line.startswith("["):
            raise SpecSyntaxError(f"unknown section {line!r}", lineno, 1)
        if current is None:
            raise SpecSyntaxError("content before first section header", lineno, 1)
        sections[current].append((line, lineno))

    def formulas(header):
        return tuple(parse_formula(line, lineno) for line, lineno in sections[header])

    def single(header):
        entries = sections[header]
        if len(entries) != 1:
            lineno = entries[1][1] if len(entries) > 1 else 1
            raise SpecSyntaxError(f"{header} must contain exactly one formula", lineno, 1)
        return parse_formula(*entries[0])

    props = PropositionSet(
        inputs=tuple(line for line, _ in sections["[INPUT]"]),
        outputs=tuple(line for line, _ in sections["[OUTPUT]"]),
    )
    env_live = formulas("[ENV_LIVENESS]") or (TrueConst(),)
    sys_live = formulas("[SYS_LIVENESS]") or (TrueConst(),)
    try:
        return GR1Spec(
            props=props,
            env_init=single("[ENV_INIT]"),
            env_trans=formulas("[ENV_TRANS]"),
            env_live=env_live,
            sys_init=single("[SYS_INIT]"),
            sys_trans=formulas("[SYS_TRANS]"),
            sys_live=sys_live,
        )
    except SpecError as exc:
        if isinstance(exc, SpecSyntaxError):
            raise
        raise SpecSyntaxError(str(exc), 1, 1) from None
