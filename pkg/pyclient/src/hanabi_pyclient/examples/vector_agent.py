"""Skeleton for a learned policy: encoded vector in, move index out.

The 658-element binary vector in every ``observe_and_act`` is the whole
model input; this stub stands where a forward pass would go. To plug in
a trained network, replace ``choose_index`` with inference over the
vector (masking to the offered legal moves) and keep everything else.
"""

from __future__ import annotations

import sys

from hanabi_pyclient import run_client


def choose_index(encoded_vector: list, n_moves: int) -> int:
    # Placeholder "policy": a deterministic hash of the observation.
    # model.forward(encoded_vector) -> logits over moves goes here.
    return sum(i for i, bit in enumerate(encoded_vector) if bit) % n_moves


def act(observation, legal_moves, encoded_vector):
    return legal_moves[choose_index(encoded_vector, len(legal_moves))]


def main() -> None:
    summary = run_client(act, transport="stdio", name="vector-stub")
    print(
        f"vector-stub: {len(summary.scores)} games, "
        f"mean {summary.mean_score:.2f}",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
