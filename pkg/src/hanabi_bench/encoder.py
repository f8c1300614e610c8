"""Fixed binary encoding of an observation, 658 bits for 2-player games.

Layout, in order (sizes for the standard 2-player config in brackets):

1. Other hands [127]: for each other player in offset order, each slot
   as a 25-bit card one-hot (color * 5 + rank - 1; absent slots zero);
   then one bit per player (self first) set when their hand is short.
2. Board [76]: deck thermometer [40] (one bit per undealt card),
   fireworks [25] (per color a 5-slot one-hot of the top rank, empty
   pile all-zero), info-token thermometer [8], life thermometer [3].
3. Discards [50]: per color, per rank, a thermometer of discarded
   copies against that rank's deck count (3+2+2+2+1 bits per color).
4. Last action [55]: acting player one-hot [2], move type one-hot
   (play, discard, hint-color, hint-rank) [4], hint target one-hot [2],
   hinted color one-hot [5], hinted rank one-hot [5], touched-slot bits
   [5], played/discarded slot one-hot [5], that card's identity one-hot
   [25], play scored bit [1], play refunded a token bit [1]. All zero
   before the first move. Player one-hots are relative to the observer.
5. Card knowledge [350]: for each player (self first), per slot: the
   25-bit mask of identities compatible with all hints received, then a
   5-bit one-hot of a directly hinted color (else zeros), then the same
   for rank.

Sections 1-5 sum to 127 + 76 + 50 + 55 + 350 = 658. The layout extends
unchanged to 3-5 players (section sizes then differ).
"""

from __future__ import annotations

from .engine import Card, Discard, Hint, Observation, Play
from .knowledge import CardKnowledge


def encoded_length(config) -> int:
    """Vector length for a given game configuration."""
    n = config.num_players
    bits_per_card = config.colors * config.ranks
    hands = (n - 1) * config.hand_size * bits_per_card + n
    board = (
        (config.deck_size - n * config.hand_size)
        + config.colors * config.ranks
        + config.max_info_tokens
        + config.max_lives
    )
    discards = config.colors * sum(config.deck_counts)
    last_action = (
        n + 4 + n + config.colors + config.ranks
        + config.hand_size + config.hand_size + bits_per_card + 2
    )
    knowledge = n * config.hand_size * (bits_per_card + config.colors + config.ranks)
    return hands + board + discards + last_action + knowledge


def _card_index(card: Card, n_ranks: int) -> int:
    return card.color * n_ranks + card.rank - 1


def encode_observation(obs: Observation) -> list[int]:
    """Encode ``obs`` into the documented bit layout."""
    cfg = obs.config
    n = cfg.num_players
    n_ranks = cfg.ranks
    bits_per_card = cfg.colors * n_ranks
    vec: list[int] = []

    # 1. other hands, offset order, then short-hand flags (self first)
    for offset in range(1, n):
        p = (obs.player + offset) % n
        for slot in range(cfg.hand_size):
            cell = [0] * bits_per_card
            if slot < obs.hand_sizes[p]:
                cell[_card_index(obs.hands[p][slot], n_ranks)] = 1
            vec.extend(cell)
    for offset in range(n):
        p = (obs.player + offset) % n
        vec.append(1 if obs.hand_sizes[p] < cfg.hand_size else 0)

    # 2. board
    deck_max = cfg.deck_size - n * cfg.hand_size
    vec.extend(1 if i < obs.deck_size else 0 for i in range(deck_max))
    for color in range(cfg.colors):
        height = obs.fireworks[color]
        vec.extend(1 if height == r else 0 for r in range(1, n_ranks + 1))
    vec.extend(1 if i < obs.info_tokens else 0 for i in range(cfg.max_info_tokens))
    vec.extend(1 if i < obs.lives else 0 for i in range(cfg.max_lives))

    # 3. discards
    for color in range(cfg.colors):
        for rank_index, copies in enumerate(cfg.deck_counts):
            count = obs.discard_counts[color * n_ranks + rank_index]
            vec.extend(1 if i < count else 0 for i in range(copies))

    # 4. last action
    vec.extend(_encode_last_action(obs))

    # 5. card knowledge, offset order starting at self
    for offset in range(n):
        p = (obs.player + offset) % n
        ks = obs.knowledge[p]
        for slot in range(cfg.hand_size):
            if slot < len(ks):
                vec.extend(_encode_knowledge(ks[slot], cfg.colors, n_ranks))
            else:
                vec.extend([0] * (bits_per_card + cfg.colors + n_ranks))
    return vec


def _encode_last_action(obs: Observation) -> list[int]:
    cfg = obs.config
    n = cfg.num_players
    record = obs.last_move
    size = n + 4 + n + cfg.colors + cfg.ranks + 2 * cfg.hand_size \
        + cfg.colors * cfg.ranks + 2
    out = [0] * size
    if record is None:
        return out
    move = record.move

    out[(record.player - obs.player) % n] = 1
    base = n
    if isinstance(move, Play):
        out[base + 0] = 1
    elif isinstance(move, Discard):
        out[base + 1] = 1
    elif move.color is not None:
        out[base + 2] = 1
    else:
        out[base + 3] = 1
    base += 4
    if isinstance(move, Hint):
        out[base + (move.target - obs.player) % n] = 1
    base += n
    if isinstance(move, Hint) and move.color is not None:
        out[base + move.color] = 1
    base += cfg.colors
    if isinstance(move, Hint) and move.rank is not None:
        out[base + move.rank - 1] = 1
    base += cfg.ranks
    for slot in record.touched:
        out[base + slot] = 1
    base += cfg.hand_size
    if isinstance(move, (Play, Discard)):
        out[base + move.slot] = 1
    base += cfg.hand_size
    if record.card is not None:
        out[base + _card_index(record.card, cfg.ranks)] = 1
    base += cfg.colors * cfg.ranks
    if record.successful_play:
        out[base] = 1
    if record.info_token_gained and isinstance(move, Play):
        out[base + 1] = 1
    return out


def _encode_knowledge(k: CardKnowledge, n_colors: int, n_ranks: int) -> list[int]:
    cell = [0] * (n_colors * n_ranks + n_colors + n_ranks)
    for c in k.possible_colors():
        for r in k.possible_ranks():
            cell[c * n_ranks + r - 1] = 1
    base = n_colors * n_ranks
    if k.color_hinted:
        cell[base + k.possible_colors()[0]] = 1
    base += n_colors
    if k.rank_hinted:
        cell[base + k.possible_ranks()[0] - 1] = 1
    return cell
