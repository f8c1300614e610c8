"""Deterministic Hanabi state machine for 2-5 players.

The state is a plain value: `new_game` builds it from a seeded shuffle,
`apply_move` validates and advances it, and `observe` projects the view
one player is allowed to see (everything except their own card
identities and the deck order). Strict scoring zeroes the result when
all lives are lost; lenient keeps the partial score.

Colors and ranks are integers (rank is 1-based); `COLOR_CHARS` fixes the
canonical color order R, Y, G, W, B used everywhere, including the wire
format.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Union

from .errors import (
    ConfigurationError,
    ConsistencyError,
    GameStateError,
    IllegalMoveError,
)
from .knowledge import CardKnowledge, blocked_ranks, candidate_stats
from .rng import GameRng

COLOR_CHARS = "RYGWB"


class Scoring(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class Card(NamedTuple):
    color: int
    rank: int  # 1-based

    def __str__(self) -> str:
        return f"{COLOR_CHARS[self.color]}{self.rank}"


class Play(NamedTuple):
    slot: int


class Discard(NamedTuple):
    slot: int


class Hint(NamedTuple):
    target: int  # absolute player index
    color: int | None
    rank: int | None

    @classmethod
    def of_color(cls, target: int, color: int) -> "Hint":
        return cls(target, color, None)

    @classmethod
    def of_rank(cls, target: int, rank: int) -> "Hint":
        return cls(target, None, rank)


Move = Union[Play, Discard, Hint]


class MoveRecord(NamedTuple):
    """Public record of the most recent move and its visible outcome."""

    player: int
    move: Move
    touched: tuple[int, ...]  # hinted slots, empty for play/discard
    card: Card | None  # identity played or discarded
    successful_play: bool | None
    info_token_gained: bool


@dataclass(frozen=True)
class GameConfig:
    """Rules configuration. Defaults are the standard 50-card game.

    ``hand_size`` derives from the player count (5 up to three players,
    4 beyond) unless given explicitly. The three boolean toggles cover
    rule points the sources leave open; defaults match both reference
    environments.
    """

    num_players: int = 2
    scoring: Scoring = Scoring.STRICT
    seed: int = 0
    hand_size: int | None = None
    max_info_tokens: int = 8
    max_lives: int = 3
    colors: int = 5
    deck_counts: tuple[int, ...] = (3, 2, 2, 2, 1)
    forbid_discard_at_max_tokens: bool = True
    forbid_empty_hints: bool = True
    refund_token_on_pile_completion: bool = True

    def __post_init__(self):
        if not 2 <= self.num_players <= 5:
            raise ConfigurationError(
                f"num_players must be in 2..5, got {self.num_players}"
            )
        if self.colors < 1 or self.colors > len(COLOR_CHARS):
            raise ConfigurationError(f"colors must be in 1..5, got {self.colors}")
        if not self.deck_counts or any(c < 1 for c in self.deck_counts):
            raise ConfigurationError("deck_counts must be positive per rank")
        if len(self.deck_counts) > 8:
            raise ConfigurationError("at most 8 ranks are supported")
        if self.max_info_tokens < 1 or self.max_lives < 1:
            raise ConfigurationError("token and life maxima must be >= 1")
        if self.hand_size is None:
            object.__setattr__(
                self, "hand_size", 5 if self.num_players <= 3 else 4
            )
        if self.hand_size < 1:
            raise ConfigurationError(f"hand_size must be >= 1, got {self.hand_size}")
        if self.num_players * self.hand_size > self.deck_size:
            raise ConfigurationError(
                f"cannot deal {self.num_players} hands of {self.hand_size} "
                f"from a {self.deck_size}-card deck"
            )
        object.__setattr__(self, "deck_counts", tuple(self.deck_counts))
        if isinstance(self.scoring, str):
            object.__setattr__(self, "scoring", Scoring(self.scoring))

    @property
    def ranks(self) -> int:
        return len(self.deck_counts)

    @property
    def deck_size(self) -> int:
        return self.colors * sum(self.deck_counts)

    @property
    def max_score(self) -> int:
        return self.colors * self.ranks


class GameState:
    """Full hidden-information game state; mutate only through moves.

    `apply` advances the state in place (the harness's hot path);
    `apply_move` at module level is the copying, functional flavor.
    """

    __slots__ = (
        "config",
        "deck",
        "hands",
        "knowledge",
        "fireworks",
        "discard",
        "discard_counts",
        "info_tokens",
        "lives",
        "current_player",
        "turns_after_deck_empty",
        "turn",
        "last_move",
        "terminal",
    )

    def __init__(self, config: GameConfig):
        self.config = config
        self.deck: list[Card] = []
        self.hands: list[list[Card]] = [[] for _ in range(config.num_players)]
        self.knowledge: list[list[CardKnowledge]] = [
            [] for _ in range(config.num_players)
        ]
        self.fireworks: list[int] = [0] * config.colors
        self.discard: tuple[Card, ...] = ()
        self.discard_counts: list[int] = [0] * (config.colors * config.ranks)
        self.info_tokens = config.max_info_tokens
        self.lives = config.max_lives
        self.current_player = 0
        self.turns_after_deck_empty = 0
        self.turn = 0
        self.last_move: MoveRecord | None = None
        self.terminal = False

    def copy(self) -> "GameState":
        s = GameState.__new__(GameState)
        s.config = self.config
        s.deck = list(self.deck)
        s.hands = [list(h) for h in self.hands]
        s.knowledge = [[k.copy() for k in ks] for ks in self.knowledge]
        s.fireworks = list(self.fireworks)
        s.discard = self.discard
        s.discard_counts = list(self.discard_counts)
        s.info_tokens = self.info_tokens
        s.lives = self.lives
        s.current_player = self.current_player
        s.turns_after_deck_empty = self.turns_after_deck_empty
        s.turn = self.turn
        s.last_move = self.last_move
        s.terminal = self.terminal
        return s

    @property
    def score(self) -> int:
        return sum(self.fireworks)

    def check_legal(self, move: Move) -> None:
        """Raise `IllegalMoveError` unless ``move`` is legal right now."""
        if self.terminal:
            raise GameStateError("cannot move in a terminal state")
        cfg = self.config
        player = self.current_player
        if isinstance(move, (Play, Discard)):
            if not 0 <= move.slot < len(self.hands[player]):
                raise IllegalMoveError(f"no card in slot {move.slot}")
            if (
                isinstance(move, Discard)
                and cfg.forbid_discard_at_max_tokens
                and self.info_tokens >= cfg.max_info_tokens
            ):
                raise IllegalMoveError("cannot discard with a full token pool")
            return
        if isinstance(move, Hint):
            if self.info_tokens <= 0:
                raise IllegalMoveError("no information tokens left")
            if move.target == player or not 0 <= move.target < cfg.num_players:
                raise IllegalMoveError(f"invalid hint target {move.target}")
            if (move.color is None) == (move.rank is None):
                raise IllegalMoveError("hint must name exactly one of color/rank")
            if move.color is not None and not 0 <= move.color < cfg.colors:
                raise IllegalMoveError(f"invalid hint color {move.color}")
            if move.rank is not None and not 1 <= move.rank <= cfg.ranks:
                raise IllegalMoveError(f"invalid hint rank {move.rank}")
            if cfg.forbid_empty_hints and not self._hint_touches(move):
                raise IllegalMoveError("hint would touch no cards")
            return
        raise IllegalMoveError(f"unknown move type {type(move).__name__}")

    def _hint_touches(self, move: Hint) -> bool:
        if move.color is not None:
            return any(c.color == move.color for c in self.hands[move.target])
        return any(c.rank == move.rank for c in self.hands[move.target])

    def apply(self, move: Move) -> None:
        """Validate and apply ``move`` in place, then advance the turn."""
        self.check_legal(move)
        cfg = self.config
        player = self.current_player
        deck_was_empty = not self.deck
        touched: tuple[int, ...] = ()
        card: Card | None = None
        success: bool | None = None
        gained = False

        if isinstance(move, Play):
            card = self.hands[player].pop(move.slot)
            self.knowledge[player].pop(move.slot)
            if self.fireworks[card.color] + 1 == card.rank:
                self.fireworks[card.color] = card.rank
                success = True
                if (
                    card.rank == cfg.ranks
                    and cfg.refund_token_on_pile_completion
                    and self.info_tokens < cfg.max_info_tokens
                ):
                    self.info_tokens += 1
                    gained = True
            else:
                self._discard_card(card)
                self.lives -= 1
                success = False
            self._draw(player)
        elif isinstance(move, Discard):
            card = self.hands[player].pop(move.slot)
            self.knowledge[player].pop(move.slot)
            self._discard_card(card)
            if self.info_tokens < cfg.max_info_tokens:
                self.info_tokens += 1
                gained = True
            self._draw(player)
        else:
            self.info_tokens -= 1
            hand = self.hands[move.target]
            ks = self.knowledge[move.target]
            if move.color is not None:
                touched = tuple(
                    i for i, c in enumerate(hand) if c.color == move.color
                )
                for i, k in enumerate(ks):
                    k.apply_color_hint(move.color, i in touched)
            else:
                touched = tuple(
                    i for i, c in enumerate(hand) if c.rank == move.rank
                )
                for i, k in enumerate(ks):
                    k.apply_rank_hint(move.rank, i in touched)

        self.last_move = MoveRecord(player, move, touched, card, success, gained)
        self.turn += 1
        if deck_was_empty:
            self.turns_after_deck_empty += 1
        self.current_player = (player + 1) % cfg.num_players
        if (
            self.lives <= 0
            or self.score == cfg.max_score
            or self.turns_after_deck_empty >= cfg.num_players
        ):
            self.terminal = True

    def _discard_card(self, card: Card) -> None:
        self.discard = self.discard + (card,)
        self.discard_counts[card.color * self.config.ranks + card.rank - 1] += 1

    def _draw(self, player: int) -> None:
        if self.deck:
            self.hands[player].append(self.deck.pop())
            self.knowledge[player].append(
                CardKnowledge.unknown(self.config.colors, self.config.ranks)
            )


class Observation:
    """What one player sees: everything except own cards and the deck.

    Slots of the observer's own hand appear as ``None`` in ``hands``.
    Holds no reference to the live state, so it stays valid after the
    game moves on. Belief helpers are cached per observation.
    """

    def __init__(self, state: GameState, player: int):
        cfg = state.config
        self.config = cfg
        self.player = player
        self.current_player = state.current_player
        self.num_players = cfg.num_players
        self.hand_sizes = tuple(len(h) for h in state.hands)
        self.hands: tuple[tuple[Card | None, ...], ...] = tuple(
            tuple(h) if p != player else (None,) * len(h)
            for p, h in enumerate(state.hands)
        )
        self.knowledge = tuple(
            tuple(k.copy() for k in ks) for ks in state.knowledge
        )
        self.fireworks = tuple(state.fireworks)
        self.discard = state.discard
        self.discard_counts = tuple(state.discard_counts)
        self.info_tokens = state.info_tokens
        self.lives = state.lives
        self.deck_size = len(state.deck)
        self.turn = state.turn
        self.last_move = state.last_move

    def others(self) -> list[int]:
        """Other player indices in clockwise (offset) order."""
        n = self.num_players
        return [(self.player + off) % n for off in range(1, n)]

    @cached_property
    def visible_counts(self) -> list[int]:
        """Copies of each identity the observer can account for."""
        n_ranks = self.config.ranks
        counts = list(self.discard_counts)
        for p in self.others():
            for c in self.hands[p]:
                counts[c.color * n_ranks + c.rank - 1] += 1
        for color, height in enumerate(self.fireworks):
            for r in range(1, height + 1):
                counts[color * n_ranks + r - 1] += 1
        return counts

    @cached_property
    def _blocked(self) -> tuple[int, ...]:
        return blocked_ranks(
            self.fireworks, self.discard_counts, self.config.deck_counts
        )

    @cached_property
    def _own_slot_stats(self) -> list[tuple[int, int, int]]:
        ks = self.knowledge[self.player]
        vis = self.visible_counts
        return [
            candidate_stats(
                k, vis, self.fireworks, self.config.deck_counts, self._blocked
            )
            for k in ks
        ]

    @cached_property
    def _own_slot_stats_hints_only(self) -> list[tuple[int, int, int]]:
        # Beliefs from direct positive hints alone: no negative-mask
        # deductions, no elimination counting. What the simplest agents use.
        cfg = self.config
        out = []
        for k in self.knowledge[self.player]:
            colors = k.possible_colors() if k.color_hinted else range(cfg.colors)
            ranks = k.possible_ranks() if k.rank_hinted else range(1, cfg.ranks + 1)
            total = playable = useless = 0
            for c in colors:
                height = self.fireworks[c]
                dead_above = self._blocked[c]
                for r in ranks:
                    copies = cfg.deck_counts[r - 1]
                    total += copies
                    if r == height + 1:
                        playable += copies
                    elif r <= height or r > dead_above:
                        useless += copies
            out.append((total, playable, useless))
        return out

    def playability(self, slot: int) -> float:
        total, playable, _ = self._own_slot_stats[slot]
        if total == 0:
            raise ConsistencyError(
                f"slot {slot} of player {self.player} has no candidates"
            )
        return playable / total

    def known_playable(self, slot: int, hints_only: bool = False) -> bool:
        stats = (
            self._own_slot_stats_hints_only if hints_only else self._own_slot_stats
        )
        total, playable, _ = stats[slot]
        return total > 0 and playable == total

    def known_useless(self, slot: int, hints_only: bool = False) -> bool:
        stats = (
            self._own_slot_stats_hints_only if hints_only else self._own_slot_stats
        )
        total, _, useless = stats[slot]
        return total > 0 and useless == total

    def card_playable(self, card: Card) -> bool:
        return self.fireworks[card.color] + 1 == card.rank

    def card_useless(self, card: Card) -> bool:
        return (
            card.rank <= self.fireworks[card.color]
            or card.rank > self._blocked[card.color]
        )

    def discard_legal(self) -> bool:
        return not (
            self.config.forbid_discard_at_max_tokens
            and self.info_tokens >= self.config.max_info_tokens
        )

    def hint_values(self, target: int) -> tuple[list[int], list[int]]:
        """Hintable (colors, ranks) for ``target``, in canonical order."""
        cfg = self.config
        if not cfg.forbid_empty_hints:
            return list(range(cfg.colors)), list(range(1, cfg.ranks + 1))
        cards = self.hands[target]
        colors = sorted({c.color for c in cards})
        ranks = sorted({c.rank for c in cards})
        return colors, ranks

    @cached_property
    def legal_moves(self) -> tuple[Move, ...]:
        """All legal moves for the observer, in a fixed canonical order:
        plays, then discards, then hints by target offset."""
        moves: list[Move] = []
        own = self.hand_sizes[self.player]
        moves.extend(Play(i) for i in range(own))
        if self.discard_legal():
            moves.extend(Discard(i) for i in range(own))
        if self.info_tokens > 0:
            for p in self.others():
                colors, ranks = self.hint_values(p)
                moves.extend(Hint.of_color(p, c) for c in colors)
                moves.extend(Hint.of_rank(p, r) for r in ranks)
        return tuple(moves)


def new_game(config: GameConfig) -> GameState:
    """Shuffle with the config seed and deal the opening hands."""
    state = GameState(config)
    deck = [
        Card(color, rank_index + 1)
        for color in range(config.colors)
        for rank_index, copies in enumerate(config.deck_counts)
        for _ in range(copies)
    ]
    GameRng(config.seed).shuffle(deck)
    state.deck = deck
    for p in range(config.num_players):
        for _ in range(config.hand_size):
            state._draw(p)
    return state


def legal_moves(state: GameState) -> tuple[Move, ...]:
    """Legal moves for the player to act. Usage error on terminal states."""
    if state.terminal:
        raise GameStateError("terminal state has no legal moves")
    return Observation(state, state.current_player).legal_moves


def apply_move(state: GameState, move: Move) -> GameState:
    """Functional flavor of `GameState.apply`: returns the successor,
    leaving ``state`` untouched. Illegal moves raise before any copy
    is visible to the caller."""
    successor = state.copy()
    successor.apply(move)
    return successor


def final_score(state: GameState, scoring: Scoring | None = None) -> int:
    """Score of a finished game under the state's (or given) scheme."""
    if not state.terminal:
        raise GameStateError("final_score requires a terminal state")
    scoring = state.config.scoring if scoring is None else scoring
    if scoring is Scoring.STRICT and state.lives <= 0:
        return 0
    return state.score


def observe(state: GameState, player: int) -> Observation:
    if not 0 <= player < state.config.num_players:
        raise ConfigurationError(f"no player {player} in this game")
    return Observation(state, player)


# ---------------------------------------------------------------------------
# Wire format for moves and traces (shared with the bridge protocol)
# ---------------------------------------------------------------------------

def move_to_json(move: Move, actor: int, num_players: int) -> dict:
    """Move as wire JSON; hint targets become offsets relative to the actor."""
    if isinstance(move, Play):
        return {"kind": "play", "slot": move.slot}
    if isinstance(move, Discard):
        return {"kind": "discard", "slot": move.slot}
    offset = (move.target - actor) % num_players
    if move.color is not None:
        return {
            "kind": "hint",
            "target_offset": offset,
            "color": COLOR_CHARS[move.color],
        }
    return {"kind": "hint", "target_offset": offset, "rank": move.rank}


def move_from_json(data: dict, actor: int, num_players: int) -> Move:
    """Parse wire JSON back into a move; raises `IllegalMoveError` on junk."""
    if not isinstance(data, dict):
        raise IllegalMoveError("move must be a JSON object")
    kind = data.get("kind")
    if kind in ("play", "discard"):
        slot = data.get("slot")
        if not isinstance(slot, int):
            raise IllegalMoveError(f"move needs an integer slot, got {slot!r}")
        return Play(slot) if kind == "play" else Discard(slot)
    if kind == "hint":
        offset = data.get("target_offset")
        if not isinstance(offset, int) or not 1 <= offset < num_players:
            raise IllegalMoveError(f"bad hint target_offset {offset!r}")
        target = (actor + offset) % num_players
        color = data.get("color")
        rank = data.get("rank")
        if (color is None) == (rank is None):
            raise IllegalMoveError("hint must carry exactly one of color/rank")
        if color is not None:
            if color not in COLOR_CHARS:
                raise IllegalMoveError(f"unknown color {color!r}")
            return Hint.of_color(target, COLOR_CHARS.index(color))
        if not isinstance(rank, int):
            raise IllegalMoveError(f"hint rank must be an integer, got {rank!r}")
        return Hint.of_rank(target, rank)
    raise IllegalMoveError(f"unknown move kind {kind!r}")


def trace_record(state: GameState) -> dict:
    """NDJSON trace line for the move that produced ``state``."""
    record = state.last_move
    if record is None:
        raise GameStateError("no move has been applied yet")
    return {
        "turn": state.turn - 1,
        "player": record.player,
        "move": move_to_json(record.move, record.player, state.config.num_players),
        "resulting_score": state.score,
        "lives": state.lives,
        "tokens": state.info_tokens,
    }
