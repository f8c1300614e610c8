"""Command-line front end.

Subcommands:

* ``selfplay``  - one agent against itself, printed stats.
* ``crossplay`` - every pairing of a pool, as a table, CSV, or JSON.
* ``bridge``    - seat an external NDJSON client against a partner.
* ``validate``  - rerun the published self-play or pairwise numbers and
  exit nonzero when any cell falls outside tolerance.

Identical flags and seed produce byte-identical outputs, whatever
``--jobs`` says. Exit codes: 0 success, 1 tolerance failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .agents import PRESET_NAMES
from .bridge import DEFAULT_MOVE_TIMEOUT, StdioEndpoint, TcpEndpoint, serve_session
from .engine import Scoring
from .errors import HanabiError
from .harness import (
    CSV_HEADER,
    MatchConfig,
    cross_play,
    matrix_to_csv,
    matrix_to_json,
    matrix_to_table,
    pairing_csv_row,
    run_pairing,
)

log = logging.getLogger("hanabi_bench")

# Published 2-player self-play means (strict scoring) and the shipped
# reproduction tolerances. LegalRandom and Flawed are one-sided caps.
TABLE1_TARGETS = {
    "iggi": 15.76,
    "internal": 10.01,
    "outer": 13.78,
    "legal_random": 0.00,
    "vdb": 16.12,
    "flawed": 0.00,
    "piers": 17.06,
}
TABLE1_TOLERANCES = {
    "iggi": 1.5,
    "internal": 1.5,
    "outer": 1.5,
    "vdb": 2.5,
    "piers": 1.5,
}
TABLE1_CAPS = {"legal_random": 0.05, "flawed": 0.10}

# Published pairwise means for the non-degenerate pairings.
TABLE2_TARGETS = {
    ("iggi", "iggi"): 15.87,
    ("iggi", "internal"): 12.48,
    ("iggi", "outer"): 15.25,
    ("iggi", "vdb"): 16.50,
    ("iggi", "piers"): 16.85,
    ("internal", "internal"): 10.20,
    ("internal", "outer"): 11.81,
    ("internal", "vdb"): 13.39,
    ("internal", "piers"): 13.67,
    ("outer", "outer"): 13.79,
    ("outer", "vdb"): 14.85,
    ("outer", "piers"): 15.65,
    ("vdb", "vdb"): 16.06,
    ("vdb", "piers"): 17.23,
    ("piers", "piers"): 16.92,
}
STRONG_PARTNERS = {"iggi", "vdb", "piers"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hanabi-bench",
        description="Hanabi rule-based agent pool and evaluation harness",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=1000):
        p.add_argument("--n", type=int, default=n_default, help="games to play")
        p.add_argument("--seed", type=int, default=1, help="master seed")
        p.add_argument(
            "--scoring",
            choices=["strict", "lenient"],
            default="strict",
            help="scoring scheme (default strict)",
        )
        p.add_argument(
            "--jobs", type=int, default=1, help="worker processes (default 1)"
        )

    p = sub.add_parser("selfplay", help="run one agent against itself")
    p.add_argument("--agent", required=True, help="preset name or policy file")
    common(p)
    p.add_argument("--out", help="write stats to this file")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--scores-out", help="write the per-game score list as JSON")

    p = sub.add_parser("crossplay", help="run every pairing of a pool")
    p.add_argument(
        "--agents",
        default="all",
        help="comma-separated agent references, or 'all' for the seven presets",
    )
    common(p)
    p.add_argument("--out", help="write the matrix to this file")
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")

    p = sub.add_parser("bridge", help="pair an external NDJSON client")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cmd", help="client command to spawn (stdio transport)")
    group.add_argument("--listen", help="HOST:PORT to await a TCP client")
    p.add_argument("--partner", default="legal_random", help="in-process partner")
    common(p)
    p.add_argument(
        "--timeout",
        type=float,
        default=DEFAULT_MOVE_TIMEOUT,
        help="seconds to wait for each client move",
    )
    p.add_argument("--scores-out", help="write the per-game score list as JSON")

    p = sub.add_parser("validate", help="reproduce the published tables")
    p.add_argument("--table", type=int, choices=[1, 2], required=True)
    common(p)
    p.add_argument(
        "--tol-default",
        type=float,
        default=1.5,
        help="table 1 tolerance for the non-degenerate agents except vdb",
    )
    p.add_argument("--tol-vdb", type=float, default=2.5)
    p.add_argument(
        "--tol-cap",
        type=float,
        default=0.05,
        help="table 1 cap for legal_random (flawed uses 2x this)",
    )
    p.add_argument(
        "--tol-cell",
        type=float,
        default=2.0,
        help="table 2 tolerance for non-degenerate cells",
    )
    p.add_argument(
        "--tol-degenerate",
        type=float,
        default=0.2,
        help="table 2 cap for cells involving legal_random or flawed",
    )
    p.add_argument(
        "--tol-flawed-strong",
        type=float,
        default=0.5,
        help="table 2 cap for flawed with a strong partner",
    )
    return parser


def _write_or_print(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_scores(path: str | None, scores: list[int]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(scores, fh)
            fh.write("\n")


def cmd_selfplay(args) -> int:
    scores: list[int] = []
    cfg = MatchConfig(
        agent_a=args.agent,
        agent_b=args.agent,
        n_games=args.n,
        master_seed=args.seed,
        scoring=Scoring(args.scoring),
    )
    stats = run_pairing(cfg, jobs=args.jobs, score_sink=scores)
    _dump_scores(args.scores_out, scores)
    if args.format == "json":
        text = json.dumps(
            {
                "agent": args.agent,
                "n": stats.n,
                "mean": stats.mean,
                "sd": stats.sd,
                "sem": stats.sem,
                "histogram": list(stats.histogram),
            },
            indent=2,
        ) + "\n"
    else:
        text = CSV_HEADER + "\n" + pairing_csv_row(args.agent, args.agent, stats) + "\n"
    _write_or_print(text, args.out)
    if not args.out:
        return 0
    print(
        f"{args.agent} self-play: mean={stats.mean:.2f} sd={stats.sd:.2f} "
        f"sem={stats.sem:.2f} over {stats.n} games"
    )
    return 0


def cmd_crossplay(args) -> int:
    if args.agents == "all":
        refs = list(PRESET_NAMES)
    else:
        refs = [a.strip() for a in args.agents.split(",") if a.strip()]
    matrix = cross_play(
        refs,
        n_games=args.n,
        master_seed=args.seed,
        scoring=Scoring(args.scoring),
        jobs=args.jobs,
    )
    renderer = {
        "table": matrix_to_table,
        "csv": matrix_to_csv,
        "json": matrix_to_json,
    }[args.format]
    _write_or_print(renderer(matrix), args.out)
    if args.out:
        print(f"wrote {args.format} matrix for {len(refs)} agents to {args.out}")
    return 0


def cmd_bridge(args) -> int:
    if args.cmd:
        endpoint = StdioEndpoint(args.cmd)
    else:
        host, _, port = args.listen.rpartition(":")
        endpoint = TcpEndpoint(host or "127.0.0.1", int(port))
        print(f"waiting for a client on {endpoint.host}:{endpoint.port}", flush=True)
    scores: list[int] = []
    cfg = MatchConfig(
        agent_a=None,
        agent_b=None,
        n_games=args.n,
        master_seed=args.seed,
        scoring=Scoring(args.scoring),
    )
    stats = serve_session(
        endpoint,
        args.partner,
        match_config=cfg,
        timeout=args.timeout,
        score_sink=scores,
    )
    _dump_scores(args.scores_out, scores)
    print(
        f"bridge client vs {args.partner}: mean={stats.mean:.2f} "
        f"sd={stats.sd:.2f} sem={stats.sem:.2f} over {stats.n} games"
    )
    return 0


def cmd_validate(args) -> int:
    if args.table == 1:
        return _validate_table1(args)
    return _validate_table2(args)


def _validate_table1(args) -> int:
    failures = 0
    print(f"table 1 reproduction: {args.n} self-play games per agent, strict")
    for name in PRESET_NAMES:
        cfg = MatchConfig(
            agent_a=name,
            agent_b=name,
            n_games=args.n,
            master_seed=args.seed,
            scoring=Scoring(args.scoring),
        )
        stats = run_pairing(cfg, jobs=args.jobs)
        target = TABLE1_TARGETS[name]
        if name in TABLE1_CAPS:
            cap = args.tol_cap * (2 if name == "flawed" else 1)
            ok = stats.mean <= cap
            bound = f"<= {cap:.2f}"
        else:
            tol = args.tol_vdb if name == "vdb" else args.tol_default
            ok = abs(stats.mean - target) <= tol
            bound = f"within {tol:.1f} of {target:.2f}"
        failures += not ok
        print(
            f"  {name:<13} mean={stats.mean:6.2f} sem={stats.sem:.3f} "
            f"({bound}) {'PASS' if ok else 'FAIL'}"
        )
    print("table 1:", "PASS" if failures == 0 else f"FAIL ({failures} cells)")
    return 1 if failures else 0


def _validate_table2(args) -> int:
    failures = 0
    print(f"table 2 reproduction: {args.n} games per pairing, strict")
    matrix = cross_play(
        list(PRESET_NAMES),
        n_games=args.n,
        master_seed=args.seed,
        scoring=Scoring(args.scoring),
        jobs=args.jobs,
    )

    def check(label: str, ok: bool) -> None:
        nonlocal failures
        failures += not ok
        print(f"  {label} {'PASS' if ok else 'FAIL'}")

    degenerate = {"legal_random", "flawed"}
    for i, a in enumerate(matrix.agents):
        for j in range(i, len(matrix.agents)):
            b = matrix.agents[j]
            mean = matrix.cell(i, j).mean
            if a in degenerate or b in degenerate:
                other = b if a in degenerate else a
                if "flawed" in (a, b) and other in STRONG_PARTNERS:
                    cap = args.tol_flawed_strong
                else:
                    cap = args.tol_degenerate
                check(f"({a}, {b}) mean={mean:5.2f} <= {cap:.1f}", mean <= cap)
            else:
                target = TABLE2_TARGETS[(a, b) if (a, b) in TABLE2_TARGETS else (b, a)]
                check(
                    f"({a}, {b}) mean={mean:5.2f} within "
                    f"{args.tol_cell:.1f} of {target:5.2f}",
                    abs(mean - target) <= args.tol_cell,
                )
    check(
        "mean(internal, piers) > mean(internal, internal)",
        matrix.mean("internal", "piers") > matrix.mean("internal", "internal"),
    )
    check(
        "mean(outer, iggi) > mean(outer, outer)",
        matrix.mean("outer", "iggi") > matrix.mean("outer", "outer"),
    )
    averages = dict(zip(matrix.agents, matrix.row_averages))
    check(
        f"piers has the highest row average ({averages['piers']:.2f})",
        max(averages, key=averages.get) == "piers",
    )
    print("table 2:", "PASS" if failures == 0 else f"FAIL ({failures} checks)")
    return 1 if failures else 0


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG
        if args.verbose or os.environ.get("HANABI_BENCH_LOG") == "debug"
        else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {
        "selfplay": cmd_selfplay,
        "crossplay": cmd_crossplay,
        "bridge": cmd_bridge,
        "validate": cmd_validate,
    }[args.command]
    try:
        return handler(args)
    except HanabiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
