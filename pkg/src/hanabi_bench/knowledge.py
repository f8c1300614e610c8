"""Per-card belief tracking and the playability/uselessness judgments.

A card's public knowledge is whatever hints have pinned down: a mask of
colors it may still be, a mask of ranks it may still be, and whether a
direct positive hint named the color or rank. On top of that, an agent
can eliminate candidates by counting copies it can see elsewhere (other
players' hands, the discard pile, and cards consumed by the fireworks).

Beliefs are per-card: no joint inference is done across slots of the
same hand, so every judgment here is a pure function of one card's
knowledge plus what the observer can see.

Cards are (color, rank) pairs with ``0 <= color < n_colors`` and
``1 <= rank <= n_ranks``. Count tables (visible copies, discard copies)
are flat sequences indexed ``color * n_ranks + (rank - 1)``.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .errors import ConsistencyError

# Set-bit positions for every mask value up to 8 bits; masks are tiny so a
# lookup table beats re-deriving bits in the per-decision hot path.
_BITS: tuple[tuple[int, ...], ...] = tuple(
    tuple(i for i in range(8) if (m >> i) & 1) for m in range(256)
)


def full_mask(n: int) -> int:
    return (1 << n) - 1


class CardKnowledge:
    """Hint-derived public knowledge about one card slot.

    ``color_mask`` bit c set means color c is still possible; likewise
    ``rank_mask`` bit (r - 1) for rank r. ``color_hinted``/``rank_hinted``
    record that a positive hint named the attribute directly (a mask can
    also collapse to one bit through negative hints alone).
    """

    __slots__ = ("color_mask", "rank_mask", "color_hinted", "rank_hinted")

    def __init__(
        self,
        color_mask: int,
        rank_mask: int,
        color_hinted: bool = False,
        rank_hinted: bool = False,
    ):
        if color_mask <= 0 or rank_mask <= 0:
            raise ConsistencyError("knowledge masks must be nonempty")
        self.color_mask = color_mask
        self.rank_mask = rank_mask
        self.color_hinted = color_hinted
        self.rank_hinted = rank_hinted

    @classmethod
    def unknown(cls, n_colors: int, n_ranks: int) -> "CardKnowledge":
        return cls(full_mask(n_colors), full_mask(n_ranks))

    def copy(self) -> "CardKnowledge":
        k = CardKnowledge.__new__(CardKnowledge)
        k.color_mask = self.color_mask
        k.rank_mask = self.rank_mask
        k.color_hinted = self.color_hinted
        k.rank_hinted = self.rank_hinted
        return k

    def possible_colors(self) -> tuple[int, ...]:
        return _BITS[self.color_mask]

    def possible_ranks(self) -> tuple[int, ...]:
        return tuple(b + 1 for b in _BITS[self.rank_mask])

    def color_known(self) -> bool:
        return self.color_mask & (self.color_mask - 1) == 0

    def rank_known(self) -> bool:
        return self.rank_mask & (self.rank_mask - 1) == 0

    def apply_color_hint(self, color: int, touched: bool) -> None:
        if touched:
            self.color_mask &= 1 << color
            self.color_hinted = True
        else:
            self.color_mask &= ~(1 << color)
        if self.color_mask == 0:
            raise ConsistencyError("color hint emptied a color mask")

    def apply_rank_hint(self, rank: int, touched: bool) -> None:
        if touched:
            self.rank_mask &= 1 << (rank - 1)
            self.rank_hinted = True
        else:
            self.rank_mask &= ~(1 << (rank - 1))
        if self.rank_mask == 0:
            raise ConsistencyError("rank hint emptied a rank mask")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CardKnowledge):
            return NotImplemented
        return (
            self.color_mask == other.color_mask
            and self.rank_mask == other.rank_mask
            and self.color_hinted == other.color_hinted
            and self.rank_hinted == other.rank_hinted
        )

    def __repr__(self) -> str:
        return (
            f"CardKnowledge(colors={list(self.possible_colors())}, "
            f"ranks={list(self.possible_ranks())}, "
            f"color_hinted={self.color_hinted}, rank_hinted={self.rank_hinted})"
        )


def blocked_ranks(
    fireworks: Sequence[int],
    discard_counts: Sequence[int],
    deck_counts: Sequence[int],
) -> tuple[int, ...]:
    """Per color, the lowest still-needed rank whose copies are all discarded.

    Any rank strictly above that value can never be played for that color
    (the pile is dead). Colors with no dead prerequisite get n_ranks + 1,
    i.e. nothing is blocked.
    """
    n_ranks = len(deck_counts)
    out = []
    for c, height in enumerate(fireworks):
        base = c * n_ranks
        blocked = n_ranks + 1
        for r in range(height + 1, n_ranks + 1):
            if discard_counts[base + r - 1] >= deck_counts[r - 1]:
                blocked = r
                break
        out.append(blocked)
    return tuple(out)


def candidate_stats(
    k: CardKnowledge,
    visible: Sequence[int],
    fireworks: Sequence[int],
    deck_counts: Sequence[int],
    blocked: Sequence[int] | None = None,
) -> tuple[int, int, int]:
    """One pass over the candidate identities of a card.

    Returns ``(total, playable, useless)`` copy counts: how many unseen
    copies the card could be, how many of those would score right now,
    and how many can never score (pile already past the rank, or a lower
    rank of the color is fully discarded). Requires ``blocked`` from
    `blocked_ranks` whenever the useless count matters.
    """
    n_ranks = len(deck_counts)
    total = 0
    playable = 0
    useless = 0
    rank_bits = _BITS[k.rank_mask]
    for c in _BITS[k.color_mask]:
        base = c * n_ranks
        height = fireworks[c]
        dead_above = blocked[c] if blocked is not None else n_ranks + 1
        for b in rank_bits:
            r = b + 1
            copies = deck_counts[b] - visible[base + b]
            if copies <= 0:
                continue
            total += copies
            if r == height + 1:
                playable += copies
            elif r <= height or r > dead_above:
                useless += copies
    return total, playable, useless


def remaining_candidates(
    k: CardKnowledge,
    visible: Sequence[int],
    deck_counts: Sequence[int],
) -> list[tuple[int, int, int]]:
    """All identities the card can still be, as (color, rank, copies).

    Candidates allowed by the hint masks are dropped when every copy is
    already visible to the observer. An empty result means the caller's
    bookkeeping is broken (some unseen card must exist), so it raises.
    """
    n_ranks = len(deck_counts)
    out = []
    for c in _BITS[k.color_mask]:
        base = c * n_ranks
        for b in _BITS[k.rank_mask]:
            copies = deck_counts[b] - visible[base + b]
            if copies > 0:
                out.append((c, b + 1, copies))
    if not out:
        raise ConsistencyError(
            "no candidate identities remain for a card that exists"
        )
    return out


def iter_candidate_instances(
    k: CardKnowledge,
    visible: Sequence[int],
    deck_counts: Sequence[int],
) -> Iterator[tuple[int, int]]:
    """Every unseen card instance the card could be, one yield per copy."""
    for c, r, copies in remaining_candidates(k, visible, deck_counts):
        for _ in range(copies):
            yield (c, r)


def playability_probability(
    k: CardKnowledge,
    visible: Sequence[int],
    fireworks: Sequence[int],
    deck_counts: Sequence[int],
) -> float:
    """Fraction of candidate copies that would score if played now."""
    total, playable, _ = candidate_stats(k, visible, fireworks, deck_counts)
    if total == 0:
        raise ConsistencyError(
            "no candidate identities remain for a card that exists"
        )
    return playable / total


def is_known_playable(
    k: CardKnowledge,
    visible: Sequence[int],
    fireworks: Sequence[int],
    deck_counts: Sequence[int],
) -> bool:
    """True iff every candidate identity is the next rank of its pile."""
    total, playable, _ = candidate_stats(k, visible, fireworks, deck_counts)
    if total == 0:
        raise ConsistencyError(
            "no candidate identities remain for a card that exists"
        )
    return playable == total


def is_known_useless(
    k: CardKnowledge,
    visible: Sequence[int],
    fireworks: Sequence[int],
    deck_counts: Sequence[int],
    discard_counts: Sequence[int],
) -> bool:
    """True iff no candidate identity can ever score.

    A candidate (c, r) is dead when the pile already reached r, or when
    some lower rank of color c has every copy in the discard pile.
    """
    blocked = blocked_ranks(fireworks, discard_counts, deck_counts)
    total, _, useless = candidate_stats(
        k, visible, fireworks, deck_counts, blocked
    )
    if total == 0:
        raise ConsistencyError(
            "no candidate identities remain for a card that exists"
        )
    return useless == total
