"""Rule primitives and the preset rule-based policies.

A policy is an ordered list of rules; each turn the first rule whose
condition holds produces the move. Rules are pure functions of the
observation plus the game's RNG, so a policy is a value that can be
shipped between worker processes, and a fixed (observation, RNG state)
always yields the same move.

Hint selection conventions: among candidate target cards the lowest
slot wins; the color-vs-rank flavor is a seeded coin flip for the
playable-card rule (the tradition in this agent family) and the
more-new-cells flavor with rank on ties for the useless-card rule.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from typing import Optional, Union

from .engine import Discard, Hint, Move, Observation, Play
from .errors import ConfigurationError, PolicyError
from .rng import GameRng


class Agent:
    """Runtime interface the game runner drives.

    ``decide`` is required; the lifecycle hooks exist for agents that
    live outside the process (the bridge notifies its client through
    them) and default to no-ops.
    """

    name = "agent"

    def start_game(self, game_index: int, seat: int, config) -> None:
        pass

    def decide(self, obs: Observation, rng: GameRng) -> Move:
        raise NotImplementedError

    def end_game(self, score: int) -> None:
        pass


# ---------------------------------------------------------------------------
# Hint selection helpers
# ---------------------------------------------------------------------------

def _new_cells(obs: Observation, target: int, color: int | None, rank: int | None) -> int:
    """Touched slots whose hinted attribute is not yet pinned down."""
    cells = 0
    knowledge = obs.knowledge[target]
    if color is not None:
        for card, k in zip(obs.hands[target], knowledge):
            if card.color == color and k.color_mask != 1 << color:
                cells += 1
    else:
        for card, k in zip(obs.hands[target], knowledge):
            if card.rank == rank and k.rank_mask != 1 << (rank - 1):
                cells += 1
    return cells


def _hint_for_card(
    obs: Observation,
    target: int,
    slot: int,
    tracked: bool,
    rng: GameRng,
) -> Optional[Hint]:
    """Color-or-rank hint about one card.

    Tracked mode keeps only the flavors that mark at least one
    not-yet-known cell and returns None when neither does; untracked
    mode ignores the public record entirely. Either way a residual tie
    between the two flavors is broken by coin flip, the convention in
    this agent family.
    """
    card = obs.hands[target][slot]
    rank_hint = Hint.of_rank(target, card.rank)
    color_hint = Hint.of_color(target, card.color)
    if not tracked:
        return (rank_hint, color_hint)[rng.randbelow(2)]
    options = []
    if _new_cells(obs, target, None, card.rank) > 0:
        options.append(rank_hint)
    if _new_cells(obs, target, card.color, None) > 0:
        options.append(color_hint)
    if not options:
        return None
    if len(options) == 1:
        return options[0]
    return options[rng.randbelow(2)]


def _hint_for_card_best(obs: Observation, target: int, slot: int) -> Hint:
    """Deterministic flavor choice: more not-yet-known cells wins,
    residual ties go to the rank hint."""
    card = obs.hands[target][slot]
    rank_cells = _new_cells(obs, target, None, card.rank)
    color_cells = _new_cells(obs, target, card.color, None)
    if color_cells > rank_cells:
        return Hint.of_color(target, card.color)
    return Hint.of_rank(target, card.rank)


def _all_hints(obs: Observation) -> list[Hint]:
    hints: list[Hint] = []
    for p in obs.others():
        colors, ranks = obs.hint_values(p)
        hints.extend(Hint.of_color(p, c) for c in colors)
        hints.extend(Hint.of_rank(p, r) for r in ranks)
    return hints


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaySafe:
    """Play the lowest slot that is certainly playable.

    ``hints_only`` restricts certainty to direct positive hints (the
    simplest agents reason that way); by default negative information
    and elimination counting participate too.
    """

    hints_only: bool = False

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        for slot in range(obs.hand_sizes[obs.player]):
            if obs.known_playable(slot, hints_only=self.hints_only):
                return Play(slot)
        return None


@dataclass(frozen=True)
class PlayProbablySafe:
    """Play the most likely playable slot if it beats the threshold.

    ``min_lives`` restricts the gamble to positions that can absorb a
    miss; 0 disables the gate (the deliberately reckless preset keeps
    it off).
    """

    threshold: float
    min_lives: int = 0

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError(
                f"threshold must be in [0, 1], got {self.threshold}"
            )

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if obs.lives < self.min_lives:
            return None
        best_slot, best = -1, -1.0
        for slot in range(obs.hand_sizes[obs.player]):
            p = obs.playability(slot)
            if p > best:
                best_slot, best = slot, p
        if best > self.threshold:
            return Play(best_slot)
        return None


@dataclass(frozen=True)
class PlayBestWhenDeckEmpty:
    """Endgame gamble: once the deck is out and lives can absorb a miss,
    play the most likely playable card whatever its probability is."""

    min_lives: int = 2

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if obs.deck_size > 0 or obs.lives < self.min_lives:
            return None
        best_slot, best = -1, -1.0
        for slot in range(obs.hand_sizes[obs.player]):
            p = obs.playability(slot)
            if p > best:
                best_slot, best = slot, p
        if best > 0.0:
            return Play(best_slot)
        return None


@dataclass(frozen=True)
class DiscardUseless:
    """Discard the lowest slot that can no longer ever score."""

    hints_only: bool = False

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if not obs.discard_legal():
            return None
        for slot in range(obs.hand_sizes[obs.player]):
            if obs.known_useless(slot, hints_only=self.hints_only):
                return Discard(slot)
        return None


@dataclass(frozen=True)
class DiscardOldest:
    """Discard slot 0, the card held longest."""

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if not obs.discard_legal() or obs.hand_sizes[obs.player] == 0:
            return None
        return Discard(0)


@dataclass(frozen=True)
class DiscardRandom:
    """Discard a uniformly random slot."""

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        size = obs.hand_sizes[obs.player]
        if not obs.discard_legal() or size == 0:
            return None
        return Discard(rng.randbelow(size))


@dataclass(frozen=True)
class HintPlayable:
    """Hint about a playable card in another hand, lowest slot first.

    With ``track_partner_knowledge`` the rule consults the public hint
    record and refuses hints that teach the touched cards nothing;
    without it the record is ignored, so repeats happen.

    ``fallback_to_any`` turns the rule into "give a hint, preferring
    playable cards": when no playable card qualifies it hints the
    partner's oldest hintable card instead of staying silent.
    """

    track_partner_knowledge: bool = True
    fallback_to_any: bool = False

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if obs.info_tokens <= 0:
            return None
        track = self.track_partner_knowledge
        for target in obs.others():
            for slot, card in enumerate(obs.hands[target]):
                if not obs.card_playable(card):
                    continue
                hint = _hint_for_card(obs, target, slot, track, rng)
                if hint is not None:
                    return hint
        if self.fallback_to_any:
            for target in obs.others():
                for slot in range(obs.hand_sizes[target]):
                    hint = _hint_for_card(obs, target, slot, track, rng)
                    if hint is not None:
                        return hint
        return None


@dataclass(frozen=True)
class HintUseless:
    """Hint about a card that can never score, flagging it as discard
    fodder. ``max_tokens_condition`` restricts the rule to token-starved
    positions (fire only when fewer than that many tokens remain)."""

    max_tokens_condition: int | None = None

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if obs.info_tokens <= 0:
            return None
        if (
            self.max_tokens_condition is not None
            and obs.info_tokens >= self.max_tokens_condition
        ):
            return None
        for target in obs.others():
            for slot, card in enumerate(obs.hands[target]):
                if obs.card_useless(card):
                    return _hint_for_card_best(obs, target, slot)
        return None


@dataclass(frozen=True)
class HintMostInformation:
    """Give the legal hint that touches the most cards."""

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if obs.info_tokens <= 0:
            return None
        best: Hint | None = None
        best_key = None
        for target in obs.others():
            offset = (target - obs.player) % obs.num_players
            hand = obs.hands[target]
            colors, ranks = obs.hint_values(target)
            for rank in ranks:
                touches = sum(1 for c in hand if c.rank == rank)
                key = (
                    touches,
                    _new_cells(obs, target, None, rank),
                    1,  # rank flavor wins residual ties
                    -rank,
                    -offset,
                )
                if best_key is None or key > best_key:
                    best, best_key = Hint.of_rank(target, rank), key
            for color in colors:
                touches = sum(1 for c in hand if c.color == color)
                key = (
                    touches,
                    _new_cells(obs, target, color, None),
                    0,
                    -color,
                    -offset,
                )
                if best_key is None or key > best_key:
                    best, best_key = Hint.of_color(target, color), key
        return best


@dataclass(frozen=True)
class HintRandom:
    """Give a uniformly random legal hint."""

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        if obs.info_tokens <= 0:
            return None
        hints = _all_hints(obs)
        if not hints:
            return None
        return rng.choice(hints)


@dataclass(frozen=True)
class LegalRandom:
    """Pick uniformly among all legal moves. Always fires."""

    def try_move(self, obs: Observation, rng: GameRng) -> Optional[Move]:
        return rng.choice(obs.legal_moves)


Rule = Union[
    PlaySafe,
    PlayProbablySafe,
    PlayBestWhenDeckEmpty,
    DiscardUseless,
    DiscardOldest,
    DiscardRandom,
    HintPlayable,
    HintUseless,
    HintMostInformation,
    HintRandom,
    LegalRandom,
]

_RULE_CLASSES: dict[str, type] = {
    "play_safe": PlaySafe,
    "play_probably_safe": PlayProbablySafe,
    "play_best_when_deck_empty": PlayBestWhenDeckEmpty,
    "discard_useless": DiscardUseless,
    "discard_oldest": DiscardOldest,
    "discard_random": DiscardRandom,
    "hint_playable": HintPlayable,
    "hint_useless": HintUseless,
    "hint_most_information": HintMostInformation,
    "hint_random": HintRandom,
    "legal_random": LegalRandom,
}
_RULE_NAMES = {cls: name for name, cls in _RULE_CLASSES.items()}


def try_rule(rule: Rule, obs: Observation, rng: GameRng) -> Optional[Move]:
    """Evaluate one rule: its move if the condition fires, else None."""
    return rule.try_move(obs, rng)


@dataclass(frozen=True)
class Policy:
    name: str
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if not self.rules:
            raise ConfigurationError(f"policy {self.name!r} has no rules")
        object.__setattr__(self, "rules", tuple(self.rules))


def decide(policy: Policy, obs: Observation, rng: GameRng) -> Move:
    """Move of the first rule that fires. Total for every shipped preset;
    a policy that falls through is misconstructed."""
    for rule in policy.rules:
        move = rule.try_move(obs, rng)
        if move is not None:
            return move
    raise PolicyError(
        f"policy {policy.name!r} produced no move (missing fallback rule)"
    )


class PolicyAgent(Agent):
    def __init__(self, policy: Policy):
        self.policy = policy
        self.name = policy.name

    def decide(self, obs: Observation, rng: GameRng) -> Move:
        return decide(self.policy, obs, rng)


class ScriptedDiscardOrPlay(Agent):
    """Protocol-parity reference: discard slot 0, or play it when the
    full token pool makes discarding illegal. Consumes no randomness."""

    name = "scripted"

    def decide(self, obs: Observation, rng: GameRng) -> Move:
        if obs.discard_legal():
            return Discard(0)
        return Play(0)


# ---------------------------------------------------------------------------
# Preset policies
# ---------------------------------------------------------------------------
# The trailing HintRandom on several presets is the totality fallback: with
# a full token pool discarding is illegal, so a position can otherwise leave
# every listed rule silent (nothing safe, nothing useless, no playable card
# to hint). A spare hint is the cheapest legal way out.

def _presets() -> dict[str, Policy]:
    return {
        "iggi": Policy(
            "iggi",
            (
                PlaySafe(hints_only=True),
                HintPlayable(track_partner_knowledge=True),
                DiscardUseless(hints_only=True),
                DiscardOldest(),
                HintRandom(),
            ),
        ),
        "internal": Policy(
            "internal",
            (
                PlaySafe(hints_only=True),
                DiscardUseless(hints_only=True),
                HintPlayable(track_partner_knowledge=False, fallback_to_any=True),
                DiscardRandom(),
                HintRandom(),
            ),
        ),
        "outer": Policy(
            "outer",
            (
                PlaySafe(hints_only=True),
                DiscardUseless(hints_only=True),
                HintPlayable(track_partner_knowledge=True, fallback_to_any=True),
                DiscardRandom(),
                HintRandom(),
            ),
        ),
        "legal_random": Policy("legal_random", (LegalRandom(),)),
        "vdb": Policy(
            "vdb",
            (
                PlaySafe(),
                PlayProbablySafe(0.60, min_lives=2),
                HintPlayable(track_partner_knowledge=True),
                HintUseless(),
                HintMostInformation(),
                DiscardUseless(),
                DiscardRandom(),
            ),
        ),
        "flawed": Policy(
            "flawed",
            (
                PlaySafe(),
                PlayProbablySafe(0.25),
                HintRandom(),
                DiscardUseless(),
                DiscardRandom(),
            ),
        ),
        "piers": Policy(
            "piers",
            (
                PlayBestWhenDeckEmpty(min_lives=2),
                PlaySafe(),
                PlayProbablySafe(0.60, min_lives=2),
                HintPlayable(track_partner_knowledge=True),
                HintUseless(max_tokens_condition=4),
                DiscardUseless(),
                DiscardOldest(),
                HintRandom(),
            ),
        ),
    }


PRESET_NAMES = ("iggi", "internal", "outer", "legal_random", "vdb", "flawed", "piers")


def preset(name: str) -> Policy:
    """One of the seven shipped policies, by name."""
    table = _presets()
    if name not in table:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}"
        )
    return table[name]


# ---------------------------------------------------------------------------
# Policy files: one rule per line, "name" or "name key=value ..."
# ---------------------------------------------------------------------------

def parse_policy(text: str, name: str = "custom") -> Policy:
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        cls = _RULE_CLASSES.get(parts[0])
        if cls is None:
            raise ConfigurationError(
                f"line {lineno}: unknown rule {parts[0]!r}"
            )
        kwargs = {}
        params = [f.name for f in fields(cls)]
        position = 0
        for part in parts[1:]:
            if "=" in part:
                key, value = part.split("=", 1)
            elif position < len(params):
                key, value = params[position], part
                position += 1
            else:
                raise ConfigurationError(
                    f"line {lineno}: unexpected parameter {part!r}"
                )
            if key not in params:
                raise ConfigurationError(
                    f"line {lineno}: rule {parts[0]!r} has no parameter {key!r}"
                )
            kwargs[key] = _parse_value(value)
        try:
            rules.append(cls(**kwargs))
        except TypeError as exc:
            raise ConfigurationError(f"line {lineno}: {exc}") from exc
    if not rules:
        raise ConfigurationError("policy file defines no rules")
    return Policy(name, tuple(rules))


def _parse_value(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null"):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"cannot parse parameter value {text!r}")


def format_policy(policy: Policy) -> str:
    """Policy file text that `parse_policy` reads back identically."""
    lines = []
    for rule in policy.rules:
        parts = [_RULE_NAMES[type(rule)]]
        for f in fields(rule):
            value = getattr(rule, f.name)
            if value != f.default:
                parts.append(f"{f.name}={value}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_policy_file(path: str) -> Policy:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_policy(text, name=name)
