"""Scripted agent speaking the verdict wire protocol.

Reads newline-delimited JSON requests on stdin and answers each with the
verdict recorded in a table file, keyed by term and event id. Useful for
tests and for replaying recorded agent behavior through the adapter.

Table file layout (either form):

    {"<term>": {"<pei>": "assent" | "neutral" | "dissent", ...}, ...}
    {"<agent>": {"<term>": {...}}, ...}      with --agent selecting a section

Run as: python -m semcert.mockagent --table table.json [--agent A1]
        python -m semcert.mockagent --always assent
"""

from __future__ import annotations

import argparse
import json
import sys


def _lookup(table: dict, term: str, pei: str, default: str) -> str:
    return table.get(term, {}).get(pei, default)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="scripted verdict agent")
    parser.add_argument("--table", help="JSON verdict table file")
    parser.add_argument("--agent", help="agent section inside the table")
    parser.add_argument("--always", help="fixed reply for every request")
    parser.add_argument("--default", default="neutral",
                        help="reply for events missing from the table")
    args = parser.parse_args(argv)

    table: dict = {}
    if args.table:
        with open(args.table, encoding="utf-8") as fh:
            table = json.load(fh)
        if args.agent and args.agent in table:
            table = table[args.agent]

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        if args.always is not None:
            verdict = args.always
        else:
            verdict = _lookup(table, request.get("term", ""),
                              request.get("pei", ""), args.default)
        print(json.dumps({"id": request.get("id"), "verdict": verdict}), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
