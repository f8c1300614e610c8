"""Client side of the hanabi-bench NDJSON bridge protocol.

A session connects one agent callback to a running server. The server
drives: it sends ``observe_and_act`` whenever it is this client's turn,
and the callback answers with a move. The SDK never mutates the
observations it hands over; callbacks are expected to be pure functions
of their arguments (plus whatever RNG the agent owns).

Typical use::

    from hanabi_pyclient import run_client

    def act(observation, legal_moves, encoded_vector):
        return legal_moves[0]

    summary = run_client(act, transport="stdio")

The stdio transport is what ``hanabi-bench bridge --cmd ...`` spawns;
``("tcp", host, port)`` connects to ``hanabi-bench bridge --listen``.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import dataclass, field
from typing import Callable, Protocol

PROTOCOL_VERSION = 1

AgentCallback = Callable[[dict, list, list], dict]


class ClientError(Exception):
    """The session ended abnormally (version mismatch, server error,
    or a message that does not fit the protocol)."""


@dataclass
class GameRecord:
    game_id: int
    seat: int
    score: int | None = None


@dataclass
class SessionSummary:
    """What happened over one connection: per-game seats and scores."""

    games: list[GameRecord] = field(default_factory=list)

    @property
    def scores(self) -> list[int]:
        return [g.score for g in self.games if g.score is not None]

    @property
    def mean_score(self) -> float:
        scores = self.scores
        return sum(scores) / len(scores) if scores else 0.0


class Transport(Protocol):
    def read_line(self) -> str: ...
    def write_line(self, text: str) -> None: ...
    def close(self) -> None: ...


class StdioTransport:
    """Talk over this process's stdin/stdout (the subprocess setup)."""

    def read_line(self) -> str:
        return sys.stdin.readline()

    def write_line(self, text: str) -> None:
        sys.stdout.write(text)
        sys.stdout.flush()

    def close(self) -> None:
        pass


class TcpTransport:
    def __init__(self, host: str, port: int):
        self._conn = socket.create_connection((host, port))
        self._reader = self._conn.makefile("r", encoding="utf-8")

    def read_line(self) -> str:
        return self._reader.readline()

    def write_line(self, text: str) -> None:
        self._conn.sendall(text.encode("utf-8"))

    def close(self) -> None:
        try:
            self._reader.close()
        finally:
            self._conn.close()


class ClientSession:
    """One connection's message loop.

    ``on_observe(observation, legal_moves, encoded_vector)`` must return
    a move as wire JSON, e.g. ``{"kind": "play", "slot": 0}``. Returning
    one of the offered ``legal_moves`` entries is always safe.
    """

    def __init__(
        self,
        on_observe: AgentCallback,
        transport: Transport,
        name: str = "pyclient",
    ):
        self._on_observe = on_observe
        self._transport = transport
        self._name = name

    def run(self) -> SessionSummary:
        summary = SessionSummary()
        current: GameRecord | None = None
        try:
            while True:
                line = self._transport.read_line()
                if not line:
                    return summary  # server closed the stream: session over
                message = self._parse(line)
                kind = message.get("type")
                if kind == "hello":
                    self._handshake(message)
                elif kind == "game_start":
                    current = GameRecord(
                        game_id=message["game_id"], seat=message["seat"]
                    )
                    summary.games.append(current)
                elif kind == "observe_and_act":
                    move = self._on_observe(
                        message["observation"],
                        message["legal_moves"],
                        message["encoded_vector"],
                    )
                    self._send(
                        {
                            "type": "move",
                            "game_id": message.get("game_id"),
                            "move": move,
                        }
                    )
                elif kind == "game_over":
                    if current is not None and current.game_id == message["game_id"]:
                        current.score = message["score"]
                elif kind == "error":
                    raise ClientError(
                        f"server error {message.get('code')}: "
                        f"{message.get('message')}"
                    )
                else:
                    raise ClientError(f"unexpected message type {kind!r}")
        finally:
            self._transport.close()

    def _handshake(self, message: dict) -> None:
        server_protocol = message.get("protocol")
        if server_protocol != PROTOCOL_VERSION:
            raise ClientError(
                f"protocol mismatch: server speaks {server_protocol}, "
                f"this SDK speaks {PROTOCOL_VERSION}"
            )
        self._send(
            {"type": "hello", "protocol": PROTOCOL_VERSION, "name": self._name}
        )

    def _parse(self, line: str) -> dict:
        try:
            message = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ClientError(f"malformed server message: {exc}")
        if not isinstance(message, dict):
            raise ClientError("server message must be a JSON object")
        return message

    def _send(self, message: dict) -> None:
        self._transport.write_line(
            json.dumps(message, separators=(",", ":")) + "\n"
        )


def run_client(
    on_observe: AgentCallback,
    transport: "str | tuple" = "stdio",
    name: str = "pyclient",
) -> SessionSummary:
    """Connect, play until the server closes, return per-game scores."""
    if transport == "stdio":
        channel: Transport = StdioTransport()
    elif isinstance(transport, tuple) and transport[0] == "tcp":
        channel = TcpTransport(transport[1], int(transport[2]))
    else:
        raise ValueError(f"unknown transport {transport!r}")
    return ClientSession(on_observe, channel, name=name).run()
