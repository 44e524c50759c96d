"""Daemon entry point: build a lab world, optionally replay a scenario,
then serve the wire API until interrupted."""

from __future__ import annotations

import argparse
import sys
import time

from .api import ApiServer, DEFAULT_ADDR
from .scenario import run_scenario_file
from .testbed import WALKTHROUGH_SCENARIO, build_engine, default_lab


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gantry-daemon")
    parser.add_argument("--addr", default=None, help=f"bind address, default env GANTRY_ADDR or {DEFAULT_ADDR}")
    parser.add_argument("--seed", type=int, default=None, help="identity stream seed")
    parser.add_argument("--state-dir", default=None, help="where config.data and variant files live")
    parser.add_argument("--scenario", default=None, help="scenario file to replay before serving")
    parser.add_argument("--walkthrough", action="store_true",
                        help="replay the built-in three-node walkthrough before serving")
    args = parser.parse_args(argv)

    engine = build_engine(default_lab(), state_dir=args.state_dir, seed=args.seed)
    scenario = args.scenario or (WALKTHROUGH_SCENARIO if args.walkthrough else None)
    if scenario:
        jobs = run_scenario_file(engine, scenario)
        print(f"replayed {len(jobs)} jobs from {scenario}", file=sys.stderr)

    server = ApiServer(engine, addr=args.addr).start()
    print(f"serving on http://{server.address}", file=sys.stderr)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
