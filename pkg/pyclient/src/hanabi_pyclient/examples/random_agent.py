"""Uniformly random external agent.

    hanabi-bench bridge --cmd "python -m hanabi_pyclient.examples.random_agent --seed 7" \\
        --partner legal_random --n 1000

Its score against any partner hovers at zero, which makes it a handy
end-to-end check that the wire is transparent.
"""

from __future__ import annotations

import argparse
import random
import sys

from hanabi_pyclient import run_client


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tcp", nargs=2, metavar=("HOST", "PORT"))
    args = parser.parse_args()
    rng = random.Random(args.seed)

    def act(observation, legal_moves, encoded_vector):
        return rng.choice(legal_moves)

    transport = ("tcp", *args.tcp) if args.tcp else "stdio"
    summary = run_client(act, transport=transport, name="random-agent")
    print(
        f"random-agent: {len(summary.scores)} games, "
        f"mean {summary.mean_score:.2f}",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
