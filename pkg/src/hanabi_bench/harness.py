"""Monte-Carlo pairing runner and cross-play matrix builder.

Every game gets its own seed, derived from (master seed, game index), so
a pairing's statistics are identical whether its games run serially or
across a process pool, and reruns with the same master seed reproduce
byte-identical outputs. Every match-up randomizes which agent sits in
the starting seat, drawing the seat from the game's own RNG.

A game that errors (an external agent breaking protocol, a policy
falling through) aborts the whole pairing: counting broken games as
score 0 would silently corrupt comparisons.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .agents import (
    Agent,
    Policy,
    PolicyAgent,
    ScriptedDiscardOrPlay,
    load_policy_file,
    preset,
)
from .engine import (
    GameConfig,
    Scoring,
    final_score,
    new_game,
    observe,
    trace_record,
)
from .errors import ConfigurationError, HanabiError
from .rng import GameRng, derive_seed

MAX_TURNS = 200  # generous bound; rule structure caps 2P games well below

log = logging.getLogger("hanabi_bench.harness")


# ---------------------------------------------------------------------------
# Agent references
# ---------------------------------------------------------------------------
# A reference is what travels into worker processes: a preset name, the
# reserved name "scripted", a policy file path, or a Policy value. Live
# Agent instances (e.g. a bridge client) are usable too, but only serially.

def resolve_agent(ref) -> Agent:
    if isinstance(ref, Agent):
        return ref
    if isinstance(ref, Policy):
        return PolicyAgent(ref)
    if isinstance(ref, str):
        if ref == "scripted":
            return ScriptedDiscardOrPlay()
        if "/" in ref or ref.endswith(".rules"):
            return PolicyAgent(load_policy_file(ref))
        return PolicyAgent(preset(ref))
    raise ConfigurationError(f"cannot interpret agent reference {ref!r}")


def ref_name(ref) -> str:
    if isinstance(ref, str):
        return ref
    if isinstance(ref, Policy):
        return ref.name
    if isinstance(ref, Agent):
        return ref.name
    return str(ref)


def _parallelizable(ref) -> bool:
    return isinstance(ref, (str, Policy))


# ---------------------------------------------------------------------------
# Single game
# ---------------------------------------------------------------------------

class GameError(HanabiError):
    """A game could not be completed; carries the seed for replay."""

    def __init__(self, game_seed: int, cause: Exception):
        super().__init__(f"game with seed {game_seed} failed: {cause}")
        self.game_seed = game_seed
        self.cause = cause


@dataclass
class GameResult:
    score: int
    turns: int
    seats: tuple[int, int]  # seats[player] = 0 for agent_a, 1 for agent_b
    trace: list[dict] | None = None


def run_game(
    agent_a: Agent,
    agent_b: Agent,
    game_seed: int,
    scoring: Scoring = Scoring.STRICT,
    num_players: int = 2,
    game_index: int = 0,
    collect_trace: bool = False,
) -> GameResult:
    """Play one seeded game to the end and score it.

    The game RNG drives, in order: the seat draw, the deck shuffle seed,
    then any randomness the agents ask for during play.
    """
    if num_players != 2:
        raise ConfigurationError("pairings are defined for 2 players")
    rng = GameRng(game_seed)
    swap = rng.randbelow(2) == 1
    seats = (1, 0) if swap else (0, 1)
    agents = (agent_b, agent_a) if swap else (agent_a, agent_b)

    config = GameConfig(
        num_players=num_players, scoring=scoring, seed=rng.next_u64()
    )
    state = new_game(config)
    for seat, agent in enumerate(agents):
        agent.start_game(game_index, seat, config)

    trace: list[dict] | None = [] if collect_trace else None
    while not state.terminal:
        if state.turn >= MAX_TURNS:
            raise GameError(
                game_seed, HanabiError(f"game exceeded {MAX_TURNS} turns")
            )
        player = state.current_player
        obs = observe(state, player)
        move = agents[player].decide(obs, rng)
        state.apply(move)
        if trace is not None:
            trace.append(trace_record(state))

    score = final_score(state)
    for agent in agents:
        agent.end_game(score)
    return GameResult(score=score, turns=state.turn, seats=seats, trace=trace)


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchConfig:
    agent_a: object
    agent_b: object
    n_games: int = 1000
    master_seed: int = 1
    scoring: Scoring = Scoring.STRICT
    num_players: int = 2

    def __post_init__(self):
        if self.n_games < 1:
            raise ConfigurationError("n_games must be >= 1")


@dataclass(frozen=True)
class PairingStats:
    """Mean, sample SD, and SEM of the scores of one pairing."""

    n: int
    mean: float
    sd: float
    sem: float
    histogram: tuple[int, ...]  # counts per score 0..max

    @classmethod
    def from_scores(cls, scores: list[int], max_score: int = 25) -> "PairingStats":
        n = len(scores)
        mean = statistics.fmean(scores)
        sd = statistics.stdev(scores) if n > 1 else 0.0
        sem = sd / math.sqrt(n) if n else 0.0
        histogram = [0] * (max_score + 1)
        for s in scores:
            histogram[s] += 1
        return cls(n=n, mean=mean, sd=sd, sem=sem, histogram=tuple(histogram))


def _play_block(agent_ref_a, agent_ref_b, scoring, indexed_seeds) -> list[tuple[int, int]]:
    """Worker body: play a block of games, return (index, score) pairs."""
    agent_a = resolve_agent(agent_ref_a)
    agent_b = resolve_agent(agent_ref_b)
    out = []
    for index, seed in indexed_seeds:
        try:
            result = run_game(
                agent_a, agent_b, seed, scoring=scoring, game_index=index
            )
        except GameError:
            raise
        except HanabiError as exc:
            raise GameError(seed, exc) from exc
        out.append((index, result.score))
    return out


def run_pairing(
    cfg: MatchConfig,
    jobs: int = 1,
    score_sink: list[int] | None = None,
) -> PairingStats:
    """Play ``cfg.n_games`` independent games and aggregate the scores.

    ``score_sink``, when given, receives the per-game scores in game
    order (used for parity checks and score dumps).
    """
    seeds = [
        (i, derive_seed(cfg.master_seed, i)) for i in range(cfg.n_games)
    ]
    parallel = (
        jobs > 1
        and cfg.n_games > 1
        and _parallelizable(cfg.agent_a)
        and _parallelizable(cfg.agent_b)
    )
    if parallel:
        workers = min(jobs, cfg.n_games)
        chunks = [seeds[w::workers] for w in range(workers)]
        indexed: list[tuple[int, int]] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _play_block, cfg.agent_a, cfg.agent_b, cfg.scoring, chunk
                )
                for chunk in chunks
            ]
            for future in futures:
                indexed.extend(future.result())
        indexed.sort()
        scores = [score for _, score in indexed]
    else:
        pairs = _play_block(cfg.agent_a, cfg.agent_b, cfg.scoring, seeds)
        scores = [score for _, score in pairs]
    if score_sink is not None:
        score_sink.extend(scores)
    return PairingStats.from_scores(scores)


# ---------------------------------------------------------------------------
# Cross-play matrix
# ---------------------------------------------------------------------------

@dataclass
class CrossPlayMatrix:
    """Pairing statistics for every unordered pair (self-pairs included)."""

    agents: tuple[str, ...]
    n_games: int
    master_seed: int
    scoring: Scoring
    cells: dict[tuple[int, int], PairingStats] = field(default_factory=dict)

    def cell(self, i: int, j: int) -> PairingStats:
        return self.cells[(min(i, j), max(i, j))]

    def mean(self, a: str, b: str) -> float:
        i, j = self.agents.index(a), self.agents.index(b)
        return self.cell(i, j).mean

    @property
    def row_averages(self) -> tuple[float, ...]:
        k = len(self.agents)
        return tuple(
            statistics.fmean(self.cell(i, j).mean for j in range(k))
            for i in range(k)
        )


def cross_play(
    agent_refs: list,
    n_games: int = 1000,
    master_seed: int = 1,
    scoring: Scoring = Scoring.STRICT,
    jobs: int = 1,
) -> CrossPlayMatrix:
    """Evaluate all unordered pairs of ``agent_refs``.

    Each pairing owns an independent seed stream derived from its pair
    index, so adding agents to the end of the list leaves earlier
    pairings' games unchanged.
    """
    if not agent_refs:
        raise ConfigurationError("cross_play needs at least one agent")
    matrix = CrossPlayMatrix(
        agents=tuple(ref_name(r) for r in agent_refs),
        n_games=n_games,
        master_seed=master_seed,
        scoring=scoring,
    )
    pairs = list(
        itertools.combinations_with_replacement(range(len(agent_refs)), 2)
    )
    for pair_index, (i, j) in enumerate(pairs):
        cfg = MatchConfig(
            agent_a=agent_refs[i],
            agent_b=agent_refs[j],
            n_games=n_games,
            master_seed=derive_seed(master_seed, pair_index),
            scoring=scoring,
        )
        stats = run_pairing(cfg, jobs=jobs)
        matrix.cells[(i, j)] = stats
        log.info(
            "pairing %d/%d (%s, %s): mean=%.2f sd=%.2f",
            pair_index + 1,
            len(pairs),
            matrix.agents[i],
            matrix.agents[j],
            stats.mean,
            stats.sd,
        )
    return matrix


# ---------------------------------------------------------------------------
# Output formats
# ---------------------------------------------------------------------------

def pairing_csv_row(name_a: str, name_b: str, stats: PairingStats) -> str:
    return (
        f"{name_a},{name_b},{stats.n},"
        f"{stats.mean:.4f},{stats.sd:.4f},{stats.sem:.4f}"
    )


CSV_HEADER = "agent_a,agent_b,n,mean,sd,sem"


def matrix_to_csv(matrix: CrossPlayMatrix) -> str:
    lines = [CSV_HEADER]
    for (i, j), stats in sorted(matrix.cells.items()):
        lines.append(pairing_csv_row(matrix.agents[i], matrix.agents[j], stats))
    return "\n".join(lines) + "\n"


def matrix_to_json(matrix: CrossPlayMatrix) -> str:
    payload = {
        "agents": list(matrix.agents),
        "n_games": matrix.n_games,
        "master_seed": matrix.master_seed,
        "scoring": matrix.scoring.value,
        "cells": [
            {
                "agent_a": matrix.agents[i],
                "agent_b": matrix.agents[j],
                "n": stats.n,
                "mean": stats.mean,
                "sd": stats.sd,
                "sem": stats.sem,
                "histogram": list(stats.histogram),
            }
            for (i, j), stats in sorted(matrix.cells.items())
        ],
        "row_averages": {
            name: avg
            for name, avg in zip(matrix.agents, matrix.row_averages)
        },
    }
    return json.dumps(payload, indent=2) + "\n"


def matrix_to_table(matrix: CrossPlayMatrix) -> str:
    """Fixed-width matrix of means with a trailing Average column."""
    names = matrix.agents
    width = max(12, max(len(n) for n in names) + 2)
    header = " " * width + "".join(f"{n:>{width}}" for n in names)
    header += f"{'Average':>{width}}"
    lines = [header]
    for i, name in enumerate(names):
        row = f"{name:<{width}}"
        for j in range(len(names)):
            row += f"{matrix.cell(i, j).mean:>{width}.2f}"
        row += f"{matrix.row_averages[i]:>{width}.2f}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_trace(path: str, traces: list[list[dict]]) -> None:
    """Game traces as NDJSON, one line per turn, games in order."""
    with open(path, "w", encoding="utf-8") as fh:
        for trace in traces:
            for line in trace:
                fh.write(json.dumps(line, separators=(",", ":")) + "\n")
