"""Wire protocol: parity with in-process agents, and violation handling."""

from __future__ import annotations

import os
import sys
import threading

import pytest

from hanabi_bench.bridge import (
    PROTOCOL_VERSION,
    StdioEndpoint,
    TcpEndpoint,
    observation_to_json,
    serve_session,
)
from hanabi_bench.engine import (
    Discard,
    GameConfig,
    Hint,
    Play,
    Scoring,
    move_from_json,
    move_to_json,
    new_game,
    observe,
)
from hanabi_bench.errors import ProtocolError
from hanabi_bench.harness import GameError, MatchConfig, run_pairing

CLIENT = os.path.join(os.path.dirname(__file__), "clients.py")


def client_cmd(mode: str, seed: int = 0) -> list[str]:
    return [sys.executable, CLIENT, mode, str(seed)]


def bridge_pairing(
    mode: str,
    partner: str,
    n: int,
    seed: int,
    timeout=20.0,
    client_seed=0,
    scoring=Scoring.STRICT,
):
    scores: list[int] = []
    stats = serve_session(
        StdioEndpoint(client_cmd(mode, client_seed)),
        partner,
        MatchConfig(None, None, n_games=n, master_seed=seed, scoring=scoring),
        timeout=timeout,
        score_sink=scores,
    )
    return stats, scores


# ---------------------------------------------------------------------------
# Move wire format
# ---------------------------------------------------------------------------

def test_move_json_round_trip():
    for move in (Play(3), Discard(0), Hint.of_color(1, 2), Hint.of_rank(1, 5)):
        data = move_to_json(move, actor=0, num_players=2)
        assert move_from_json(data, actor=0, num_players=2) == move
    assert move_to_json(Hint.of_rank(0, 1), actor=1, num_players=2) == {
        "kind": "hint",
        "target_offset": 1,
        "rank": 1,
    }


def test_move_json_rejects_junk():
    from hanabi_bench.errors import IllegalMoveError

    for bad in (
        None,
        {},
        {"kind": "fly"},
        {"kind": "play"},
        {"kind": "hint", "target_offset": 0, "rank": 1},
        {"kind": "hint", "target_offset": 1},
        {"kind": "hint", "target_offset": 1, "rank": 1, "color": "R"},
        {"kind": "hint", "target_offset": 1, "color": "Q"},
    ):
        with pytest.raises(IllegalMoveError):
            move_from_json(bad, actor=0, num_players=2)


def test_observation_json_shape():
    state = new_game(GameConfig(num_players=2, seed=6))
    payload = observation_to_json(observe(state, 1))
    assert payload["seat"] == 1
    assert payload["hands"][1] == [None] * 5
    assert all(c["color"] in "RYGWB" for c in payload["hands"][0])
    assert payload["fireworks"] == {"R": 0, "Y": 0, "G": 0, "W": 0, "B": 0}
    assert payload["info_tokens"] == 8 and payload["lives"] == 3
    assert payload["last_move"] is None
    assert len(payload["knowledge"]) == 2


# ---------------------------------------------------------------------------
# Sessions
# ---------------------------------------------------------------------------

def test_scripted_client_matches_in_process_twin():
    # the parity oracle: per-game scores must be bit-identical; lenient
    # scoring keeps the sequence varied (strict zeroes most of them)
    stats, scores = bridge_pairing(
        "scripted", "scripted", n=25, seed=424242, scoring=Scoring.LENIENT
    )
    local: list[int] = []
    run_pairing(
        MatchConfig(
            "scripted",
            "scripted",
            n_games=25,
            master_seed=424242,
            scoring=Scoring.LENIENT,
        ),
        score_sink=local,
    )
    assert scores == local
    assert stats.n == 25
    assert len(set(scores)) > 1, "parity check needs varied scores"


def test_random_client_scores_like_legal_random():
    stats, _ = bridge_pairing("random", "legal_random", n=60, seed=7, client_seed=3)
    assert stats.mean <= 0.2  # both seats flail


def test_illegal_move_errors_the_session():
    with pytest.raises((ProtocolError, GameError)) as info:
        bridge_pairing("illegal", "scripted", n=3, seed=1)
    cause = info.value.cause if isinstance(info.value, GameError) else info.value
    assert isinstance(cause, ProtocolError)
    assert cause.code == "illegal_move"


def test_malformed_line_errors_the_session():
    with pytest.raises((ProtocolError, GameError)) as info:
        bridge_pairing("malformed", "scripted", n=3, seed=1)
    cause = info.value.cause if isinstance(info.value, GameError) else info.value
    assert cause.code == "malformed"


def test_timeout_errors_the_session():
    with pytest.raises((ProtocolError, GameError)) as info:
        bridge_pairing("sleepy", "scripted", n=2, seed=1, timeout=0.5)
    cause = info.value.cause if isinstance(info.value, GameError) else info.value
    assert cause.code == "timeout"


def test_version_mismatch_rejected():
    with pytest.raises(ProtocolError) as info:
        bridge_pairing("bad_version", "scripted", n=2, seed=1)
    assert info.value.code == "protocol_version"
    assert str(PROTOCOL_VERSION) in info.value.message


def test_tcp_transport_parity_with_stdio():
    import subprocess

    endpoint = TcpEndpoint("127.0.0.1", 0, accept_timeout=20.0)
    results: dict = {}

    def run_server():
        scores: list[int] = []
        results["stats"] = serve_session(
            endpoint,
            "scripted",
            MatchConfig(None, None, n_games=12, master_seed=99),
            timeout=20.0,
            score_sink=scores,
        )
        results["scores"] = scores

    # bind happens inside open(); stagger the client until the port exists
    server = threading.Thread(target=run_server)
    server.start()
    import time

    deadline = time.time() + 10
    while not hasattr(endpoint, "bound_port") and time.time() < deadline:
        time.sleep(0.02)
    client = subprocess.Popen(
        [sys.executable, CLIENT, "--tcp", "127.0.0.1", str(endpoint.bound_port), "scripted"]
    )
    server.join(timeout=30)
    client.wait(timeout=10)
    assert not server.is_alive()

    _, stdio_scores = bridge_pairing("scripted", "scripted", n=12, seed=99)
    assert results["scores"] == stdio_scores
