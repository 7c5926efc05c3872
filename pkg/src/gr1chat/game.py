"""Explicit two-player game built from a GR(1) specification.

States are packed bitmasks over the proposition list (inputs then outputs).
The environment moves first by choosing the next input valuation, then the
system answers with the next output valuation; both choices are filtered
through the transition formulas of the specification.  Input and output
valuations are one-hot (one sensed region, one commanded region), which the
proposition set guarantees by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ltlspec import GR1Spec, eval_state, eval_transition


class StateSpaceTooLarge(Exception):
    pass


@dataclass(frozen=True)
class Game:
    spec: GR1Spec
    ap: tuple[str, ...]
    states: tuple[int, ...]
    env_moves: dict[int, tuple[int, ...]]          # state -> next input masks
    sys_moves: dict[tuple[int, int], tuple[int, ...]]  # (state, x') -> next output masks
    env_goals: tuple[frozenset[int], ...]
    sys_goals: tuple[frozenset[int], ...]
    initial: frozenset[int]

    def valuation(self, mask: int) -> dict[str, bool]:
        return {name: bool(mask >> i & 1) for i, name in enumerate(self.ap)}

    def true_atoms(self, mask: int) -> tuple[str, ...]:
        return tuple(name for i, name in enumerate(self.ap) if mask >> i & 1)

    def successors(self, state: int) -> tuple[int, ...]:
        out = []
        for x in self.env_moves[state]:
            for y in self.sys_moves[(state, x)]:
                out.append(x | y)
        return tuple(sorted(set(out)))


def build_game(spec: GR1Spec, max_props: int = 24) -> Game:
    """Enumerate states and move relations for the given specification."""
    ap = spec.props.all
    if len(ap) > max_props:
        raise StateSpaceTooLarge(f"{len(ap)} propositions exceeds the bound {max_props}")
    n_in = len(spec.props.inputs)
    n_out = len(spec.props.outputs)

    x_options = tuple(1 << i for i in range(n_in))
    y_options = tuple(1 << (n_in + i) for i in range(n_out))
    states = tuple(sorted(x | y for x in x_options for y in y_options))

    valuations = {s: {name: bool(s >> i & 1) for i, name in enumerate(ap)} for s in states}
    x_valuations = {x: {name: bool(x >> i & 1) for i, name in enumerate(ap)} for x in x_options}
    xy_valuations = {
        x | y: {name: bool((x | y) >> i & 1) for i, name in enumerate(ap)}
        for x in x_options
        for y in y_options
    }

    env_moves: dict[int, tuple[int, ...]] = {}
    sys_moves: dict[tuple[int, int], tuple[int, ...]] = {}
    for s in states:
        cur = valuations[s]
        xs = []
        for x in x_options:
            # env transitions only prime inputs, so the next output bits are
            # irrelevant while the environment chooses
            if all(eval_transition(f, cur, x_valuations[x]) for f in spec.env_trans):
                xs.append(x)
        env_moves[s] = tuple(xs)
        for x in xs:
            ys = []
            for y in y_options:
                if all(eval_transition(f, cur, xy_valuations[x | y]) for f in spec.sys_trans):
                    ys.append(y)
            sys_moves[(s, x)] = tuple(ys)

    env_goals = tuple(
        frozenset(s for s in states if eval_state(f, valuations[s])) for f in spec.env_live
    )
    sys_goals = tuple(
        frozenset(s for s in states if eval_state(f, valuations[s])) for f in spec.sys_live
    )
    initial = frozenset(
        s for s in states
        if eval_state(spec.env_init, valuations[s]) and eval_state(spec.sys_init, valuations[s])
    )

    return Game(
        spec=spec,
        ap=ap,
        states=states,
        env_moves=env_moves,
        sys_moves=sys_moves,
        env_goals=env_goals,
        sys_goals=sys_goals,
        initial=initial,
    )
