"""Shared helpers: seeded random play and reduced-deck configurations."""

from __future__ import annotations

import pytest

from hanabi_bench.engine import GameConfig, GameState, new_game, observe
from hanabi_bench.rng import GameRng


def play_random_turns(state: GameState, rng: GameRng, turns: int) -> GameState:
    """Apply up to ``turns`` uniformly random legal moves in place."""
    for _ in range(turns):
        if state.terminal:
            break
        obs = observe(state, state.current_player)
        state.apply(rng.choice(obs.legal_moves))
    return state


def random_midgame(seed: int, config: GameConfig | None = None) -> GameState:
    """A state from random play, somewhere between the deal and the end."""
    rng = GameRng(seed)
    if config is None:
        config = GameConfig(num_players=2, seed=rng.next_u64())
    state = new_game(config)
    depth = rng.randbelow(60)
    return play_random_turns(state, rng, depth)


def reduced_config(seed: int) -> GameConfig:
    """Tiny deck (3 colors x [2,1] = 9 cards) so deals stay enumerable."""
    return GameConfig(
        num_players=2,
        seed=seed,
        colors=3,
        deck_counts=(2, 1),
        hand_size=2,
    )


@pytest.fixture
def standard_config() -> GameConfig:
    return GameConfig(num_players=2, seed=99)
