"""Client SDK for the hanabi-bench NDJSON bridge protocol."""

from .session import (
    PROTOCOL_VERSION,
    ClientError,
    ClientSession,
    GameRecord,
    SessionSummary,
    StdioTransport,
    TcpTransport,
    run_client,
)

__version__ = "0.1.0"
