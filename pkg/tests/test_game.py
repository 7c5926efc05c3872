import pytest

from gr1chat.game import StateSpaceTooLarge, build_game
from gr1chat.ltlspec import build_spec
from gr1chat.worldmodel import WorldModel, Region, add_region


def test_three_region_game_has_nine_states(chain_world):
    game = build_game(build_spec(chain_world, "kibo"))
    assert len(game.states) == 9


def test_single_region_game(chain_world):
    w = add_region(WorldModel(), Region("kibo", "kibo"))
    game = build_game(build_spec(w, "kibo"))
    assert len(game.states) == 1
    s = game.states[0]
    assert game.env_moves[s] and game.sys_moves[(s, game.env_moves[s][0])]
    assert game.successors(s) == (s,)


def test_env_moves_follow_connectivity(chain_world):
    game = build_game(build_spec(chain_world, "kibo"))
    bit = {name: 1 << i for i, name in enumerate(game.ap)}
    state = bit["in_kibo"] | bit["go_harmony"]
    moves = set(game.env_moves[state])
    assert moves == {bit["in_kibo"], bit["in_harmony"]}
    # commanded region not connected: the robot stays put
    stuck = bit["in_kibo"] | bit["go_columbus"]
    assert set(game.env_moves[stuck]) == {bit["in_kibo"]}


def test_initial_state_is_pinned(chain_world):
    game = build_game(build_spec(chain_world, "kibo"))
    assert len(game.initial) == 1
    (s0,) = game.initial
    assert set(game.true_atoms(s0)) == {"in_columbus", "go_columbus"}


def test_goal_sets(chain_world):
    game = build_game(build_spec(chain_world, "kibo"))
    assert len(game.sys_goals) == 1
    assert len(game.env_goals) == 3
    goal = game.sys_goals[0]
    assert all("in_kibo" in game.true_atoms(s) for s in goal)
    assert len(goal) == 3


def test_state_space_bound(chain_world):
    with pytest.raises(StateSpaceTooLarge):
        build_game(build_spec(chain_world, "kibo"), max_props=4)
