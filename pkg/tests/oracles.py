"""Independent oracles the test suite checks the engine against.

These deliberately avoid the package's own algorithms: realizability is
solved as a parity game with Zielonka's recursive algorithm on a product
arena with explicit goal counters, language is grounded by direct pattern
matching, and reachability is plain BFS on the relation set.
"""

from __future__ import annotations

import re
from collections import defaultdict
from itertools import product

from gr1chat.game import Game
from gr1chat.grammar import normalize_utterance
from gr1chat.symbols import connectivity, navigate

# ---------------------------------------------------------------------------
# rule-based NLU oracle

_CMD = re.compile(r"^go to the ([a-z][a-z0-9_]*) capsule$")
_DECL = re.compile(r"^the ([a-z][a-z0-9_]*) capsule is connected to the ([a-z][a-z0-9_]*) capsule$")
_QUES = re.compile(r"^is the ([a-z][a-z0-9_]*) capsule connected to the ([a-z][a-z0-9_]*) capsule$")


def oracle_symbol(utterance: str):
    """Direct pattern-to-symbol map; None when no symbol is denoted."""
    text = normalize_utterance(utterance)
    m = _CMD.match(text)
    if m:
        return navigate(m.group(1))
    m = _DECL.match(text) or _QUES.match(text)
    if m:
        a, b = m.group(1), m.group(2)
        if a == b:
            return None
        return connectivity(a, b)
    return None


# ---------------------------------------------------------------------------
# BFS reachability over the raw relation set


def bfs_reachable(region_ids, relations, start: str) -> set[str]:
    adj = defaultdict(set)
    for a, b in relations:
        adj[a].add(b)
        adj[b].add(a)
    seen = {start}
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


# ---------------------------------------------------------------------------
# grammar language enumeration


def enumerate_language(grammar) -> list[str]:
    """All strings the (finite, non-recursive) grammar can generate."""
    by_lhs = defaultdict(list)
    for p in grammar.productions:
        by_lhs[p.lhs].append(p.rhs)

    def expand(symbol):
        if symbol not in by_lhs:  # terminal
            return [(symbol,)]
        out = []
        for rhs in by_lhs[symbol]:
            for combo in product(*(expand(s) for s in rhs)):
                flat = ()
                for part in combo:
                    flat += part
                out.append(flat)
        return out

    from gr1chat.grammar import START_LABELS

    strings = []
    for start in START_LABELS:
        strings.extend(" ".join(toks) for toks in expand(start))
    return strings


# ---------------------------------------------------------------------------
# GR(1) as a parity game, solved with Zielonka's algorithm

SYS = 0  # even player
ENV = 1  # odd player


def gr1_parity_arena(game: Game):
    """Product arena with cyclic goal counters.

    Priorities: 2 when the tracked system goal is satisfied (the counter
    advances), else 1 when the tracked environment goal is satisfied, else 0.
    The system wins a play exactly when the maximal priority seen infinitely
    often is even, which matches the GR(1) implication.
    """
    n = len(game.sys_goals)
    m = len(game.env_goals)
    nodes: dict = {}
    for s in game.states:
        for j in range(n):
            for i in range(m):
                sysadv = s in game.sys_goals[j]
                envadv = s in game.env_goals[i]
                pri = 2 if sysadv else (1 if envadv else 0)
                j2 = (j + 1) % n if sysadv else j
                i2 = (i + 1) % m if envadv else i
                succs = tuple(("s", s, j2, i2, x) for x in game.env_moves[s])
                nodes[("e", s, j, i)] = (ENV, pri, succs)
                for x in game.env_moves[s]:
                    nodes[("s", s, j2, i2, x)] = (
                        SYS,
                        0,
                        tuple(("e", x | y, j2, i2) for y in game.sys_moves[(s, x)]),
                    )
    # totalize: a stuck node loses for its owner
    for v, (owner, pri, succs) in list(nodes.items()):
        if not succs:
            winner_pri = 1 if owner == SYS else 0
            nodes[v] = (owner, winner_pri, (v,))
    return nodes


def _attractor(nodes, base, player):
    preds = defaultdict(list)
    count = {}
    for v, (_, _, succs) in nodes.items():
        count[v] = len(succs)
        for w in succs:
            preds[w].append(v)
    attr = set(base)
    queue = list(base)
    while queue:
        w = queue.pop()
        for v in preds[w]:
            if v in attr:
                continue
            if nodes[v][0] == player:
                attr.add(v)
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr


def zielonka(nodes):
    """Returns (W_sys, W_env) for a total parity arena."""
    if not nodes:
        return set(), set()
    top = max(pri for _, pri, _ in nodes.values())
    if top == 0:
        return set(nodes), set()
    player = SYS if top % 2 == 0 else ENV
    target = {v for v, (_, pri, _) in nodes.items() if pri == top}
    attr_a = _attractor(nodes, target, player)
    sub = _restrict(nodes, set(nodes) - attr_a)
    w_sys, w_env = zielonka(sub)
    opp_win = w_env if player == SYS else w_sys
    if not opp_win:
        return (set(nodes), set()) if player == SYS else (set(), set(nodes))
    attr_b = _attractor(nodes, opp_win, 1 - player)
    sub2 = _restrict(nodes, set(nodes) - attr_b)
    w_sys2, w_env2 = zielonka(sub2)
    if player == SYS:
        return w_sys2, w_env2 | attr_b
    return w_sys2 | attr_b, w_env2


def _restrict(nodes, keep):
    return {
        v: (owner, pri, tuple(w for w in succs if w in keep))
        for v, (owner, pri, succs) in nodes.items()
        if v in keep
    }


def oracle_winning_states(game: Game) -> frozenset[int]:
    """States from which the system wins the GR(1) condition (counters at 0)."""
    arena = gr1_parity_arena(game)
    w_sys, _ = zielonka(arena)
    return frozenset(s for s in game.states if ("e", s, 0, 0) in w_sys)


def oracle_realizable(game: Game) -> bool:
    win = oracle_winning_states(game)
    return set(game.initial) <= win


# ---------------------------------------------------------------------------
# exhaustive world enumeration for the oracle sweep


def enumerate_navigation_cases(region_names=("kibo", "harmony", "columbus")):
    """Every (world, goal) over 1..len(region_names) regions.

    Covers all connectivity subsets, all robot locations and all goals:
    with the default three regions that is 1 + 8 + 72 = 81 cases.
    """
    from itertools import combinations

    from gr1chat.worldmodel import Region, WorldModel, add_region, assert_connectivity, set_robot_location

    for k in range(1, len(region_names) + 1):
        ids = region_names[:k]
        pairs = list(combinations(ids, 2))
        for bits in range(2 ** len(pairs)):
            base = WorldModel()
            for rid in ids:
                base = add_region(base, Region(rid, rid))
            for idx, (a, b) in enumerate(pairs):
                if bits >> idx & 1:
                    base, _ = assert_connectivity(base, a, b)
            for robot in ids:
                world = set_robot_location(base, robot)
                for goal in ids:
                    yield world, goal
