"""Command-line entry for the session server."""

from __future__ import annotations

import argparse
from pathlib import Path

import uvicorn

from towerlab.server.rooms import RoomManager
from towerlab.server.service import build_app


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="towerlab-server", description="Session server")
    parser.add_argument("--listen", default="127.0.0.1:8700", help="host:port to bind")
    parser.add_argument("--config", default=None,
                        help="default config document for rooms created without one")
    parser.add_argument("--log-sink", default=None, help="REST collection endpoint base URL")
    parser.add_argument("--persist", default="./sessions",
                        help="directory for logs, leaderboards and intent files")
    parser.add_argument("--static", default=None, help="static client bundle directory")
    parser.add_argument("--time-scale", type=float, default=1.0,
                        help="simulation speed multiplier (testing aid; 1.0 = real time)")
    args = parser.parse_args(argv)

    host, _, port = args.listen.rpartition(":")
    app = build_app(
        manager=RoomManager(),
        time_scale=args.time_scale,
        persist_dir=args.persist,
        log_sink_url=args.log_sink,
        static_dir=args.static,
        default_config_text=Path(args.config).read_text(encoding="utf-8") if args.config else None,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
