"""The `analyze` command: session-log analytics emitting CSV/TSV.

    analyze heatmap --log F --map M [--level K] [--out PATH] [--format csv|tsv]
    analyze spend   --log F --config C [--out PATH] [--format csv|tsv]
    analyze chat    --log F [--annotations A] [--out PATH] [--format csv|tsv]

`--map`/`--config` take a configuration document; `--level` picks the map
for heatmaps (default 0). Output goes to stdout unless `--out` names a file.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from towerlab.analysis.chat import parse_annotations, skill_summary, utterance_stats
from towerlab.analysis.heatmap import placement_heatmap
from towerlab.analysis.spend import expenditure_series
from towerlab.config import parse_config
from towerlab.telemetry import parse_log


def _load_records(path: str):
    records, errors = parse_log(Path(path).read_text(encoding="utf-8"))
    for error in errors:
        print(f"warning: {error}", file=sys.stderr)
    return records


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _writer(handle, fmt: str):
    return csv.writer(handle, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")


def cmd_heatmap(args) -> int:
    records = _load_records(args.log)
    config = parse_config(Path(args.map).read_text(encoding="utf-8"))
    grid = config.levels[args.level].map
    heatmap = placement_heatmap(records, grid)
    for issue in heatmap.issues:
        print(f"warning: {issue}", file=sys.stderr)
    handle, close = _open_out(args.out)
    writer = _writer(handle, args.format)
    writer.writerow(["x", "y", "count"])
    for y in range(heatmap.height):
        for x in range(heatmap.width):
            writer.writerow([x, y, heatmap.counts[y][x]])
    if close:
        handle.close()
    print(f"placements: {heatmap.total}", file=sys.stderr)
    return 0


def cmd_spend(args) -> int:
    records = _load_records(args.log)
    config = parse_config(Path(args.config).read_text(encoding="utf-8"))
    summaries = expenditure_series(records, config)
    handle, close = _open_out(args.out)
    writer = _writer(handle, args.format)
    writer.writerow(
        [
            "level", "round", "starting_gold", "buy_costs", "upgrade_costs", "refunds",
            "bounties", "unspent", "reported_unspent", "consistent", "kills", "leaks",
            "health", "score", "chat_count",
        ]
    )
    exit_code = 0
    for s in summaries:
        writer.writerow(
            [
                s.level, s.round, s.starting_gold, s.buy_costs, s.upgrade_costs, s.refunds,
                s.bounties, s.unspent,
                "" if s.reported_unspent is None else s.reported_unspent,
                int(s.consistent),
                "" if s.kills is None else s.kills,
                "" if s.leaks is None else s.leaks,
                "" if s.health is None else s.health,
                "" if s.score is None else f"{s.score:.6f}",
                s.chat_count,
            ]
        )
        for issue in s.issues:
            print(f"warning: round {s.level}.{s.round}: {issue}", file=sys.stderr)
            exit_code = 1
    if close:
        handle.close()
    return exit_code


def cmd_chat(args) -> int:
    records = _load_records(args.log)
    handle, close = _open_out(args.out)
    writer = _writer(handle, args.format)
    if args.annotations:
        annotations = parse_annotations(Path(args.annotations).read_text(encoding="utf-8"))
        rows = skill_summary(records, annotations)
        # Count semantics: one count per assigned label, so multi-label
        # utterances appear in several rows.
        handle.write("# count_semantics=per-label\n")
        writer.writerow(["dimension", "skill", "count", "mean_tokens"])
        for row in rows:
            writer.writerow([row.dimension, row.skill, row.count, row.mean_display()])
    else:
        count, vocabulary, mean = utterance_stats(records)
        writer.writerow(["utterances", "vocabulary", "mean_tokens"])
        writer.writerow([count, vocabulary, f"{mean:.3f}"])
    if close:
        handle.close()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="analyze", description="Session log analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    heatmap = sub.add_parser("heatmap", help="tower placement frequency grid")
    heatmap.add_argument("--log", required=True)
    heatmap.add_argument("--map", required=True, help="config document supplying the grid")
    heatmap.add_argument("--level", type=int, default=0)

    spend = sub.add_parser("spend", help="per-round expenditure series")
    spend.add_argument("--log", required=True)
    spend.add_argument("--config", required=True)

    chat = sub.add_parser("chat", help="utterance statistics / skill summary")
    chat.add_argument("--log", required=True)
    chat.add_argument("--annotations", default=None)

    for p in (heatmap, spend, chat):
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "tsv"), default="csv")

    args = parser.parse_args(argv)
    handlers = {"heatmap": cmd_heatmap, "spend": cmd_spend, "chat": cmd_chat}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
