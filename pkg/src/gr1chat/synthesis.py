"""GR(1) realizability via the three-nested fixpoint, plus strategy extraction.

``winning_region`` computes the greatest fixpoint Z over the system goals;
inside it, for each goal, a least fixpoint Y accumulates states by distance
to the goal while greatest fixpoints X admit states that can starve one
environment liveness condition forever.  The recorded Y levels and X sets
drive the usual three-rule strategy: advance the goal, decrease rank, or
hold an environment goal trapped.

Extraction is deterministic.  Ties between equally good system moves are
broken by (1) preferring successors from which every environment liveness
predicate stays reachable in the move graph, (2) keeping the current
command, (3) lowest state mask.  Rule (1) is a strategy-level stand-in for
environment-friendly synthesis; it never picks a starving move when a
non-starving one is available.
"""

from __future__ import annotations

from dataclasses import dataclass

from .game import Game, build_game
from .ltlspec import GR1Spec, eval_transition


class SynthesisError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


Node = tuple[int, int]  # (state mask, goal memory index)


@dataclass(frozen=True)
class Controller:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    nodes: tuple[Node, ...]
    initial: tuple[Node, ...]
    edges: dict[tuple[Node, int], Node]
    permitted: frozenset[tuple[int, int]]

    @property
    def ap(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def true_atoms(self, mask: int) -> tuple[str, ...]:
        return tuple(name for i, name in enumerate(self.ap) if mask >> i & 1)

    def input_mask_of(self, mask: int) -> int:
        return mask & ((1 << len(self.inputs)) - 1)

    def state_label(self, mask: int) -> str:
        return "(" + ", ".join(self.true_atoms(mask)) + ")"


@dataclass(frozen=True)
class Realizable:
    controller: Controller
    realizable: bool = True


@dataclass(frozen=True)
class Unrealizable:
    losing_initial: tuple[tuple[str, ...], ...]
    winning_region_size: int
    per_goal_sizes: tuple[int, ...]
    realizable: bool = False


@dataclass
class _Solve:
    win: frozenset[int]
    cpre_win: frozenset[int]
    levels: list[list[tuple[frozenset[int], tuple[frozenset[int], ...]]]]  # per goal j


def _cpre(game: Game, target: frozenset[int]) -> frozenset[int]:
    """States where every permitted environment move has a system reply into target."""
    out = set()
    for s in game.states:
        ok = True
        for x in game.env_moves[s]:
            if not any((x | y) in target for y in game.sys_moves[(s, x)]):
                ok = False
                break
        if ok:
            out.add(s)
    return frozenset(out)


def _mu_y(game: Game, j: int, z: frozenset[int]):
    """Least fixpoint for system goal j against the current Z, with levels."""
    all_states = frozenset(game.states)
    target = game.sys_goals[j] & _cpre(game, z)
    y: frozenset[int] = frozenset()
    levels: list[tuple[frozenset[int], tuple[frozenset[int], ...]]] = []
    while True:
        base = target | _cpre(game, y)
        xsets = []
        for je in game.env_goals:
            not_je = all_states - je
            x = all_states
            while True:
                new_x = base | (not_je & _cpre(game, x))
                if new_x == x:
                    break
                x = new_x
            xsets.append(x)
        new_y = frozenset().union(*xsets) if xsets else base
        levels.append((new_y, tuple(xsets)))
        if new_y == y:
            break
        y = new_y
    return y, levels


def _solve(game: Game) -> _Solve:
    z = frozenset(game.states)
    n = len(game.sys_goals)
    while True:
        changed = False
        for j in range(n):
            y, _ = _mu_y(game, j, z)
            if y != z:
                z = y
                changed = True
        if not changed:
            break
    levels = [_mu_y(game, j, z)[1] for j in range(n)]
    return _Solve(win=z, cpre_win=_cpre(game, z), levels=levels)


def winning_region(game: Game) -> frozenset[int]:
    return _solve(game).win


def _reach_safe_states(game: Game) -> frozenset[int]:
    """States from which every environment goal is still reachable via legal moves."""
    # backward reachability per environment goal, then intersect
    safe = frozenset(game.states)
    preds: dict[int, set[int]] = {s: set() for s in game.states}
    for s in game.states:
        for t in game.successors(s):
            preds[t].add(s)
    for je in game.env_goals:
        reach = set(je)
        frontier = list(je)
        while frontier:
            t = frontier.pop()
            for p in preds[t]:
                if p not in reach:
                    reach.add(p)
                    frontier.append(p)
        safe &= frozenset(reach)
    return safe


def _rank_of(levels, s: int) -> int:
    for r, (yset, _) in enumerate(levels):
        if s in yset:
            return r
    raise SynthesisError("state outside recorded levels")


def _pick(options: list[tuple[int, int]], cur_y: int, safe: frozenset[int]):
    """options: list of (y choice, successor mask); deterministic preference order."""
    def key(opt):
        y, succ = opt
        return (0 if succ in safe else 1, 0 if y == cur_y else 1, succ)

    return min(options, key=key)


def extract_controller(game: Game, solve: _Solve) -> Controller:
    n_goals = len(game.sys_goals)
    win = solve.win
    safe = _reach_safe_states(game)
    n_in = len(game.spec.props.inputs)
    out_mask = ~((1 << n_in) - 1)

    nodes: list[Node] = [(s, j) for j in range(n_goals) for s in sorted(win)]
    edges: dict[tuple[Node, int], Node] = {}
    for j in range(n_goals):
        levels = solve.levels[j]
        for s in sorted(win):
            node = (s, j)
            cur_y = s & out_mask
            at_goal = s in game.sys_goals[j] and s in solve.cpre_win
            rank = None if at_goal else _rank_of(levels, s)
            for x in game.env_moves[s]:
                options = [(y, x | y) for y in game.sys_moves[(s, x)] if (x | y) in win]
                if not options:
                    raise SynthesisError("winning state lost under some environment move")
                if at_goal:
                    y, succ = _pick(options, cur_y, safe)
                    edges[(node, x)] = (succ, (j + 1) % n_goals)
                    continue
                lower = [
                    (y, succ) for y, succ in options if _rank_of(levels, succ) < rank
                ]
                if lower:
                    best_rank = min(_rank_of(levels, succ) for _, succ in lower)
                    lower = [o for o in lower if _rank_of(levels, o[1]) == best_rank]
                    y, succ = _pick(lower, cur_y, safe)
                    edges[(node, x)] = (succ, j)
                    continue
                # hold inside the X set that admitted this state: some env goal
                # is being starved while the play waits
                yset, xsets = levels[rank]
                trap = None
                for i, xset in enumerate(xsets):
                    if s in xset and s not in game.env_goals[i]:
                        trap = xset
                        break
                if trap is None:
                    raise SynthesisError("no rank decrease and no trap witness")
                stay = [(y, succ) for y, succ in options if succ in trap]
                if not stay:
                    raise SynthesisError("cannot stay inside trap set")
                y, succ = _pick(stay, cur_y, safe)
                edges[(node, x)] = (succ, j)

    permitted = frozenset(
        (s, x | y)
        for s in win
        for x in game.env_moves[s]
        for y in game.sys_moves[(s, x)]
        if (x | y) in win
    )
    initial = tuple((s, 0) for s in sorted(game.initial))
    return Controller(
        inputs=game.spec.props.inputs,
        outputs=game.spec.props.outputs,
        nodes=tuple(nodes),
        initial=initial,
        edges=edges,
        permitted=permitted,
    )


def synthesize(spec: GR1Spec, max_props: int = 24):
    """Realizability check plus controller extraction.

    The specification is realizable only if *every* state satisfying both
    initial conditions lies in the winning region; the controller then
    carries one initial node per such state.
    """
    game = build_game(spec, max_props=max_props)
    solve = _solve(game)
    losing = sorted(set(game.initial) - solve.win)
    if losing:
        all_states = frozenset(game.states)
        per_goal = tuple(
            len(_mu_y(game, j, all_states)[0]) for j in range(len(game.sys_goals))
        )
        return Unrealizable(
            losing_initial=tuple(game.true_atoms(s) for s in losing),
            winning_region_size=len(solve.win),
            per_goal_sizes=per_goal,
        )
    return Realizable(controller=extract_controller(game, solve))


# ---------------------------------------------------------------------------
# independent verification of an extracted controller


@dataclass(frozen=True)
class CheckReport:
    nodes_explored: int
    edges_checked: int
    max_depth: int


def _tarjan_sccs(graph: dict) -> list[list]:
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = [0]

    def strongconnect(v):
        work = [(v, iter(graph[v]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                elif w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == node:
                        break
                sccs.append(scc)

    for v in graph:
        if v not in index:
            strongconnect(v)
    return sccs


def check_controller(controller: Controller, spec: GR1Spec, bound: int = 32,
                     max_props: int = 24) -> CheckReport:
    """Exhaustively explore controller-vs-environment behavior.

    Checks, from every initial node: each permitted environment move has
    exactly one controller edge; every taken transition satisfies the
    specification's transition formulas (re-evaluated directly on the
    formulas, not via the game); and under every environment path that keeps
    satisfying the environment liveness, every system goal recurs.  Raises
    ``VerificationFailure`` with a witness on any violation.
    """
    game = build_game(spec, max_props=max_props)
    node_set = set(controller.nodes)
    for s in game.initial:
        if (s, 0) not in node_set:
            raise VerificationFailure(
                f"initial state {controller.state_label(s)} has no controller node"
            )

    valuations = {s: game.valuation(s) for s in game.states}
    graph: dict[Node, list[Node]] = {}
    depth = {n: 0 for n in controller.initial}
    frontier = list(controller.initial)
    edges_checked = 0
    max_depth = 0
    paths: dict[Node, list[Node]] = {n: [n] for n in controller.initial}
    while frontier:
        node = frontier.pop(0)
        if depth[node] >= bound:
            continue
        s, j = node
        succs = []
        for x in game.env_moves[s]:
            key = (node, x)
            if key not in controller.edges:
                raise VerificationFailure(
                    f"no edge from {controller.state_label(s)} on input mask {x}",
                    trace=paths[node],
                )
            succ_node = controller.edges[key]
            s2, _ = succ_node
            if controller.input_mask_of(s2) != x:
                raise VerificationFailure("edge successor disagrees with its input label",
                                          trace=paths[node] + [succ_node])
            for f in spec.env_trans + spec.sys_trans:
                if not eval_transition(f, valuations[s], valuations[s2]):
                    raise VerificationFailure(
                        f"transition {controller.state_label(s)} -> "
                        f"{controller.state_label(s2)} violates a transition formula",
                        trace=paths[node] + [succ_node],
                    )
            edges_checked += 1
            succs.append(succ_node)
            if succ_node not in depth:
                depth[succ_node] = depth[node] + 1
                max_depth = max(max_depth, depth[succ_node])
                paths[succ_node] = paths[node] + [succ_node]
                frontier.append(succ_node)
        graph[node] = succs

    explored = set(graph)
    closed_graph = {n: [m for m in succs if m in explored] for n, succs in graph.items()}

    # goal recurrence: inside the subgraph avoiding a system goal, no cycle
    # may satisfy every environment liveness predicate
    for g, goal_states in enumerate(game.sys_goals):
        sub = {
            n: [m for m in succs if m[0] not in goal_states]
            for n, succs in closed_graph.items()
            if n[0] not in goal_states
        }
        for scc in _tarjan_sccs(sub):
            members = set(scc)
            has_cycle = len(scc) > 1 or scc[0] in sub[scc[0]]
            if not has_cycle:
                continue
            fair = all(
                any(n[0] in je for n in members) for je in game.env_goals
            )
            if fair:
                raise VerificationFailure(
                    f"system goal {g} can be avoided forever on a fair environment loop",
                    trace=sorted(members),
                )
    return CheckReport(nodes_explored=len(explored), edges_checked=edges_checked,
                       max_depth=max_depth)


# ---------------------------------------------------------------------------
# export formats


def controller_to_json(controller: Controller) -> dict:
    node_ids = {node: i for i, node in enumerate(controller.nodes)}
    return {
        "inputs": list(controller.inputs),
        "outputs": list(controller.outputs),
        "nodes": [
            {"id": node_ids[n], "state": list(controller.true_atoms(n[0])), "memory": n[1]}
            for n in controller.nodes
        ],
        "initial": [node_ids[n] for n in controller.initial],
        "edges": [
            {
                "from": node_ids[node],
                "input": list(controller.true_atoms(x)),
                "to": node_ids[target],
            }
            for (node, x), target in sorted(
                controller.edges.items(), key=lambda kv: (node_ids[kv[0][0]], kv[0][1])
            )
        ],
        "permitted": [
            {"from": list(controller.true_atoms(a)), "to": list(controller.true_atoms(b))}
            for a, b in sorted(controller.permitted)
        ],
    }


def controller_from_json(doc: dict) -> Controller:
    inputs = tuple(doc["inputs"])
    outputs = tuple(doc["outputs"])
    ap = inputs + outputs
    bit = {name: 1 << i for i, name in enumerate(ap)}

    def mask_of(names):
        m = 0
        for name in names:
            m |= bit[name]
        return m

    nodes = tuple((mask_of(n["state"]), n["memory"]) for n in doc["nodes"])
    by_id = {n["id"]: (mask_of(n["state"]), n["memory"]) for n in doc["nodes"]}
    edges = {
        (by_id[e["from"]], mask_of(e["input"])): by_id[e["to"]] for e in doc["edges"]
    }
    permitted = frozenset(
        (mask_of(p["from"]), mask_of(p["to"])) for p in doc["permitted"]
    )
    return Controller(
        inputs=inputs,
        outputs=outputs,
        nodes=nodes,
        initial=tuple(by_id[i] for i in doc["initial"]),
        edges=edges,
        permitted=permitted,
    )


def controller_to_dot(controller: Controller) -> str:
    node_ids = {node: i for i, node in enumerate(controller.nodes)}
    lines = ["digraph controller {", "  rankdir=LR;"]
    for n in controller.nodes:
        shape = "doublecircle" if n in controller.initial else "circle"
        lines.append(
            f'  n{node_ids[n]} [label="{controller.state_label(n[0])}", shape={shape}];'
        )
    strategy_pairs = set()
    for (node, x), target in sorted(
        controller.edges.items(), key=lambda kv: (node_ids[kv[0][0]], kv[0][1])
    ):
        strategy_pairs.add((node[0], target[0]))
        lines.append(f"  n{node_ids[node]} -> n{node_ids[target]};")
    memoryless = {n[0]: n for n in controller.nodes}
    for a, b in sorted(controller.permitted):
        if (a, b) not in strategy_pairs and a in memoryless and b in memoryless:
            lines.append(
                f"  n{node_ids[memoryless[a]]} -> n{node_ids[memoryless[b]]} [style=dashed];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def permitted_graph(controller: Controller) -> dict:
    """Goal-independent view: states and the transitions the controller permits."""
    return {
        "states": sorted({controller.true_atoms(n[0]) for n in controller.nodes}),
        "edges": sorted(
            (controller.true_atoms(a), controller.true_atoms(b))
            for a, b in controller.permitted
        ),
    }
