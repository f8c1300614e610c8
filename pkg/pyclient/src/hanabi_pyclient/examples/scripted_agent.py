"""Deterministic scripted agent: discard slot 0, else play slot 0.

The server ships the identical policy in-process under the agent name
``scripted``, so this client doubles as the protocol parity probe: both
sides must produce bit-identical score sequences for the same seed.
"""

from __future__ import annotations

import argparse
import sys

from hanabi_pyclient import run_client


def act(observation, legal_moves, encoded_vector):
    for move in legal_moves:
        if move["kind"] == "discard" and move["slot"] == 0:
            return move
    return {"kind": "play", "slot": 0}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tcp", nargs=2, metavar=("HOST", "PORT"))
    args = parser.parse_args()
    transport = ("tcp", *args.tcp) if args.tcp else "stdio"
    summary = run_client(act, transport=transport, name="scripted-agent")
    print(
        f"scripted-agent: {len(summary.scores)} games, "
        f"mean {summary.mean_score:.2f}",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
