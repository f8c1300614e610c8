"""Hanabi engine, rule-based agent pool, and cross-play evaluation harness."""

from .agents import (
    Agent,
    Policy,
    PolicyAgent,
    decide,
    load_policy_file,
    parse_policy,
    preset,
    PRESET_NAMES,
    try_rule,
)
from .engine import (
    Card,
    Discard,
    GameConfig,
    GameState,
    Hint,
    Move,
    Observation,
    Play,
    Scoring,
    apply_move,
    final_score,
    legal_moves,
    new_game,
    observe,
)
from .errors import (
    ConfigurationError,
    ConsistencyError,
    GameStateError,
    HanabiError,
    IllegalMoveError,
    PolicyError,
    ProtocolError,
)
from .harness import (
    CrossPlayMatrix,
    MatchConfig,
    PairingStats,
    cross_play,
    run_game,
    run_pairing,
)
from .knowledge import (
    CardKnowledge,
    is_known_playable,
    is_known_useless,
    playability_probability,
    remaining_candidates,
)
from .rng import GameRng, derive_seed

__version__ = "0.1.0"
