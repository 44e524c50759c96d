#!/usr/bin/env python3
"""Replay the three-node bring-up and print every job trace, then exercise
the three operator drills: NIC hot-modify, live migration, and failover
from a dead node."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gantry.lifecycle import instance_info, instance_rows, render_instance_info
from gantry.membership import cluster_verify, node_list
from gantry.cli import render_table, NODE_LIST_COLUMNS
from gantry.scenario import run_scenario_file
from gantry.testbed import WALKTHROUGH_SCENARIO, build_engine
from gantry.units import fmt_size


def show(job):
    print(f"--- job {job.id}: {job.summary} [{job.status}] ---")
    for line in job.rendered_log():
        print(line)
    print()


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--state-dir", default="./state")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    engine = build_engine(state_dir=args.state_dir, seed=args.seed)
    for job in run_scenario_file(engine, WALKTHROUGH_SCENARIO):
        show(job)

    print("=== node list ===")
    rows = [[n["name"], fmt_size(n["dtotal"]), fmt_size(n["dfree"]), fmt_size(n["mtotal"]),
             fmt_size(n["mnode"]), fmt_size(n["mfree"]), n["pinst"], n["sinst"]]
            for n in node_list(engine)]
    print(render_table(NODE_LIST_COLUMNS, rows, right_align={1, 2, 3, 4, 5, 6, 7}))
    print()

    print("=== instance info ===")
    print(render_instance_info(instance_info(engine, "testvm.project.edu")))
    print()

    print("=== cluster verify ===")
    for job in cluster_verify(engine):
        show(job)

    print("=== NIC hot-modify ===")
    show(engine.submit("instance_modify_nic", {
        "name": "testvm.project.edu", "nic_index": 0, "link": "br-man", "hotplug": True,
    }))

    print("=== live migration ===")
    show(engine.submit("instance_migrate", {"name": "testvm.project.edu"}))

    print("=== node2 dies; failover ===")
    engine.submit("instance_migrate", {"name": "testvm.project.edu"})  # back onto node2
    engine.submit("set_node_power", {"node": "node2.project.edu", "power": "off"})
    show(engine.submit("instance_failover",
                       {"name": "testvm.project.edu", "ignore_consistency": True}))

    headers, rows = instance_rows(engine)
    print(render_table(headers, rows))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
