"""NDJSON wire protocol for seating external agents in a pairing.

One session drives one external client: after a hello handshake the
server sends ``observe_and_act`` for every turn the client must take
and expects exactly one ``move`` back before anything else happens.
Messages are single lines of UTF-8 JSON over stdio (the server spawns
the client as a subprocess) or TCP.

Message flow, server perspective:

    > {"type": "hello", "protocol": 1, "server": "hanabi-bench"}
    < {"type": "hello", "protocol": 1, "name": "my-agent"}
    > {"type": "game_start", "game_id": 0, "seat": 1, ...}
    > {"type": "observe_and_act", "game_id": 0, "turn": 1, ...}
    < {"type": "move", "move": {"kind": "play", "slot": 0}}
    ...
    > {"type": "game_over", "game_id": 0, "score": 17}
    ... further games, then the stream closes.

Any violation (malformed JSON, wrong message type, illegal move, or a
move timeout) sends one ``error`` message, terminates the session, and
errors the pairing: broken clients never masquerade as score-0 games.
"""

from __future__ import annotations

import json
import selectors
import shlex
import socket
import subprocess
from dataclasses import dataclass

from .agents import Agent
from .encoder import encode_observation
from .engine import (
    COLOR_CHARS,
    Card,
    Observation,
    move_from_json,
    move_to_json,
)
from .errors import IllegalMoveError, ProtocolError
from .harness import GameError, MatchConfig, PairingStats, resolve_agent, run_pairing
from .rng import GameRng

PROTOCOL_VERSION = 1
DEFAULT_MOVE_TIMEOUT = 10.0
_MAX_LINE_BYTES = 4 << 20


class LineChannel:
    """Newline-delimited JSON messages over a byte stream.

    Reads poll a file descriptor so per-message timeouts work for both
    pipes and sockets.
    """

    def __init__(self, read_fd: int, write, close_hooks=()):
        self._read_fd = read_fd
        self._write = write  # callable(bytes)
        self._close_hooks = list(close_hooks)
        self._buffer = bytearray()
        self._selector = selectors.DefaultSelector()
        self._selector.register(read_fd, selectors.EVENT_READ)
        self._eof = False

    def send(self, message: dict) -> None:
        line = json.dumps(message, separators=(",", ":")) + "\n"
        try:
            self._write(line.encode("utf-8"))
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError("connection_closed", f"peer went away: {exc}")

    def recv(self, timeout: float | None) -> dict:
        import os

        while True:
            newline = self._buffer.find(b"\n")
            if newline >= 0:
                raw = bytes(self._buffer[:newline])
                del self._buffer[: newline + 1]
                if not raw.strip():
                    continue
                try:
                    message = json.loads(raw.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                    raise ProtocolError("malformed", f"bad JSON line: {exc}")
                if not isinstance(message, dict):
                    raise ProtocolError("malformed", "message must be an object")
                return message
            if self._eof:
                raise ProtocolError("connection_closed", "peer closed the stream")
            if len(self._buffer) > _MAX_LINE_BYTES:
                raise ProtocolError("malformed", "message line too long")
            if not self._selector.select(timeout):
                raise ProtocolError(
                    "timeout", f"no message within {timeout} seconds"
                )
            chunk = os.read(self._read_fd, 65536)
            if chunk:
                self._buffer.extend(chunk)
            else:
                self._eof = True

    def close(self) -> None:
        self._selector.close()
        for hook in self._close_hooks:
            try:
                hook()
            except Exception:
                pass


@dataclass
class StdioEndpoint:
    """Spawn the client command and talk over its stdin/stdout."""

    command: "list[str] | str"

    def open(self) -> LineChannel:
        argv = (
            shlex.split(self.command)
            if isinstance(self.command, str)
            else list(self.command)
        )
        proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE
        )
        self._proc = proc

        def write(data: bytes) -> None:
            proc.stdin.write(data)
            proc.stdin.flush()

        def shutdown() -> None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

        return LineChannel(proc.stdout.fileno(), write, close_hooks=[shutdown])


@dataclass
class TcpEndpoint:
    """Listen on host:port and serve the first client that connects."""

    host: str = "127.0.0.1"
    port: int = 0
    accept_timeout: float = 60.0

    def open(self) -> LineChannel:
        listener = socket.create_server((self.host, self.port))
        self.bound_port = listener.getsockname()[1]
        listener.settimeout(self.accept_timeout)
        try:
            conn, _ = listener.accept()
        except socket.timeout:
            listener.close()
            raise ProtocolError("timeout", "no client connected")
        finally:
            self._listener = listener
        conn.setblocking(True)

        def close_conn() -> None:
            try:
                conn.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            conn.close()
            listener.close()

        return LineChannel(conn.fileno(), conn.sendall, close_hooks=[close_conn])


# ---------------------------------------------------------------------------
# JSON views of the structured observation
# ---------------------------------------------------------------------------

def card_to_json(card: Card | None):
    if card is None:
        return None
    return {"color": COLOR_CHARS[card.color], "rank": card.rank}


def observation_to_json(obs: Observation) -> dict:
    cfg = obs.config
    return {
        "seat": obs.player,
        "current_player": obs.current_player,
        "num_players": obs.num_players,
        "hand_size": cfg.hand_size,
        "turn": obs.turn,
        "info_tokens": obs.info_tokens,
        "lives": obs.lives,
        "deck_size": obs.deck_size,
        "fireworks": {
            COLOR_CHARS[c]: h for c, h in enumerate(obs.fireworks)
        },
        "discard": [card_to_json(c) for c in obs.discard],
        "hands": [[card_to_json(c) for c in hand] for hand in obs.hands],
        "knowledge": [
            [
                {
                    "colors": [COLOR_CHARS[c] for c in k.possible_colors()],
                    "ranks": list(k.possible_ranks()),
                    "color_hinted": k.color_hinted,
                    "rank_hinted": k.rank_hinted,
                }
                for k in ks
            ]
            for ks in obs.knowledge
        ],
        "last_move": _record_to_json(obs),
    }


def _record_to_json(obs: Observation):
    record = obs.last_move
    if record is None:
        return None
    return {
        "player": record.player,
        "move": move_to_json(record.move, record.player, obs.num_players),
        "touched": list(record.touched),
        "card": card_to_json(record.card),
        "successful_play": record.successful_play,
        "info_token_gained": record.info_token_gained,
    }


# ---------------------------------------------------------------------------
# The bridge seat
# ---------------------------------------------------------------------------

class BridgeAgent(Agent):
    """Harness-side adapter that forwards turns to the wire."""

    name = "bridge"

    def __init__(self, channel: LineChannel, timeout: float, scoring):
        self._channel = channel
        self._timeout = timeout
        self._scoring = scoring
        self._game_id = 0

    def start_game(self, game_index: int, seat: int, config) -> None:
        self._game_id = game_index
        self._channel.send(
            {
                "type": "game_start",
                "game_id": game_index,
                "seat": seat,
                "num_players": config.num_players,
                "hand_size": config.hand_size,
                "scoring": self._scoring.value,
            }
        )

    def decide(self, obs: Observation, rng: GameRng):
        legal = obs.legal_moves
        self._channel.send(
            {
                "type": "observe_and_act",
                "game_id": self._game_id,
                "turn": obs.turn,
                "observation": observation_to_json(obs),
                "legal_moves": [
                    move_to_json(m, obs.player, obs.num_players) for m in legal
                ],
                "encoded_vector": encode_observation(obs),
            }
        )
        reply = self._channel.recv(self._timeout)
        if reply.get("type") != "move":
            raise ProtocolError(
                "protocol", f"expected a move message, got {reply.get('type')!r}"
            )
        try:
            move = move_from_json(
                reply.get("move"), obs.player, obs.num_players
            )
        except IllegalMoveError as exc:
            raise ProtocolError("illegal_move", str(exc))
        if move not in legal:
            raise ProtocolError(
                "illegal_move", f"{reply.get('move')} is not legal now"
            )
        return move

    def end_game(self, score: int) -> None:
        self._channel.send(
            {"type": "game_over", "game_id": self._game_id, "score": score}
        )


def serve_session(
    endpoint,
    partner,
    match_config: MatchConfig | None = None,
    timeout: float = DEFAULT_MOVE_TIMEOUT,
    score_sink: "list[int] | None" = None,
) -> PairingStats:
    """Run a pairing with the external client in the agent-a seat.

    ``match_config``'s agent fields are ignored; the bridge takes seat a
    and ``partner`` seat b. Raises `ProtocolError` (after sending an
    ``error`` message when the wire still works) if the client breaks
    the protocol; the pairing is then void.
    """
    if match_config is None:
        match_config = MatchConfig(agent_a=None, agent_b=None)
    channel = endpoint.open()
    try:
        channel.send(
            {
                "type": "hello",
                "protocol": PROTOCOL_VERSION,
                "server": "hanabi-bench",
            }
        )
        hello = channel.recv(timeout)
        if hello.get("type") != "hello":
            raise ProtocolError(
                "protocol", f"expected hello, got {hello.get('type')!r}"
            )
        if hello.get("protocol") != PROTOCOL_VERSION:
            raise ProtocolError(
                "protocol_version",
                f"server speaks {PROTOCOL_VERSION}, "
                f"client {hello.get('protocol')!r}",
            )
        agent = BridgeAgent(channel, timeout, match_config.scoring)
        cfg = MatchConfig(
            agent_a=agent,
            agent_b=resolve_agent(partner),
            n_games=match_config.n_games,
            master_seed=match_config.master_seed,
            scoring=match_config.scoring,
            num_players=match_config.num_players,
        )
        return run_pairing(cfg, jobs=1, score_sink=score_sink)
    except (ProtocolError, GameError) as exc:
        cause = exc.cause if isinstance(exc, GameError) else exc
        if isinstance(cause, ProtocolError):
            code, message = cause.code, cause.message
        else:
            code, message = "internal", str(cause)
        try:
            channel.send({"type": "error", "code": code, "message": message})
        except ProtocolError:
            pass
        raise
    finally:
        channel.close()
