"""gnt-style operator commands speaking to the daemon over the wire API.

Four front-ends: gnt-cluster, gnt-node, gnt-instance, gnt-os.  Flags follow
the operator tooling conventions exactly ("-t drbd -o image+cd -s 4G -B
minmem=256M,maxmem=512M ...").  Interactive commands prompt with "y/[n]?:"
and abort on anything but y; --yes skips prompts for scripting.

Exit codes: 0 success, 1 operation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .client import ApiClient
from .errors import GantryError
from .jobs import LEVEL_PREFIX
from .membership import node_add_banner
from .units import fmt_size, parse_size

MIGRATE_PROMPT = (
    "Instance {name} will be migrated. Note that migration\n"
    "might impact the instance if anything goes wrong (e.g. due to bugs in\n"
    "the hypervisor). Continue?\ny/[n]?: "
)
FAILOVER_PROMPT = (
    "Failover will happen to image {name}. This requires a\n"
    "shutdown of the instance. Continue?\ny/[n]?: "
)
HOTPLUG_PROMPT = (
    "You are about to hot-modify a NIC. This will be done by removing the\n"
    "existing NIC and then adding a new one. Network connection might be\n"
    "lost. Continue?\ny/[n]?: "
)

NODE_LIST_COLUMNS = ["Node", "DTotal", "DFree", "MTotal", "MNode", "MFree", "Pinst", "Sinst"]


def size_arg(text: str) -> int:
    try:
        return parse_size(text)
    except GantryError as err:
        raise argparse.ArgumentTypeError(err.message) from None


def be_arg(text: str) -> dict:
    """Parse "minmem=256M,maxmem=512M,vcpus=2" into backend parameters."""
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key in ("minmem", "maxmem"):
            out[key] = size_arg(value)
        elif key in ("vcpus", "spindle_use"):
            out[key] = int(value)
        elif key == "auto_balance":
            out[key] = value.lower() in ("1", "true", "yes")
        else:
            raise argparse.ArgumentTypeError(f"unknown backend parameter {key!r}")
    return out


def hv_arg(text: str) -> dict:
    """Parse "boot_order=cdrom,cdrom_image_path=/iso/x.iso" into overrides."""
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        out[key.strip()] = value.strip()
    return out


def net_arg(text: str) -> dict:
    """Parse "0:modify,link=br-man" into a NIC modification."""
    index, _, rest = text.partition(":")
    try:
        idx = int(index)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad NIC index in {text!r}") from None
    parts = rest.split(",") if rest else []
    if not parts or parts[0] != "modify":
        raise argparse.ArgumentTypeError(f"only '<idx>:modify,...' is supported, got {text!r}")
    out = {"nic_index": idx}
    for item in parts[1:]:
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        if key.strip() != "link":
            raise argparse.ArgumentTypeError(f"unknown NIC setting {key.strip()!r}")
        out["link"] = value.strip()
    return out


def render_table(headers: list[str], rows: list[list], right_align: set | None = None) -> str:
    right_align = right_align or set()
    cells = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))

    def fmt(row):
        parts = []
        for i, c in enumerate(row):
            parts.append(c.rjust(widths[i]) if i in right_align else c.ljust(widths[i]))
        return " ".join(parts).rstrip()

    return "\n".join([fmt(headers)] + [fmt(r) for r in cells])


def print_job_log(job: dict):
    for line in job.get("log", []):
        print(f"{line['when']} {LEVEL_PREFIX[line['level']]}{line['text']}")


def confirm(prompt: str, assume_yes: bool) -> bool:
    if assume_yes:
        return True
    sys.stdout.write(prompt)
    sys.stdout.flush()
    answer = sys.stdin.readline().strip()
    return answer.lower() == "y"


class CliError(Exception):
    pass


def _run(fn) -> int:
    try:
        fn()
        return 0
    except GantryError as err:
        print(f"Failure: {err.message}", file=sys.stderr)
        return 1
    except CliError as err:
        if str(err):
            print(str(err), file=sys.stderr)
        return 1


def _wait_and_print(client: ApiClient, job_id: int, waiting_for: str | None = None):
    if waiting_for:
        print(f"Waiting for job {job_id} for {waiting_for} ...")
    job = client.wait_job(job_id)
    print_job_log(job)
    return job


# ---------------------------------------------------------------------------
# gnt-cluster

def main_cluster(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gnt-cluster")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_init = sub.add_parser("init")
    p_init.add_argument("--master-netdev", default="br-man")
    p_init.add_argument("--enabled-hypervisors", default="kvm")
    p_init.add_argument("-N", dest="nic_defaults", default="link=br-public")
    p_init.add_argument("--vg-name", default="ganeti")
    p_init.add_argument("cluster_name")

    p_modify = sub.add_parser("modify")
    p_modify.add_argument("-H", dest="hvparams", required=True)

    sub.add_parser("verify")

    p_copy = sub.add_parser("copyfile")
    p_copy.add_argument("path")

    args = parser.parse_args(argv)
    client = ApiClient()

    def go():
        if args.verb == "init":
            link = args.nic_defaults.partition("=")[2] or "br-public"
            client.post("/2/cluster/init", {
                "cluster_name": args.cluster_name,
                "master_netdev": args.master_netdev,
                "enabled_hypervisors": args.enabled_hypervisors.split(","),
                "default_nic_link": link,
                "vg_name": args.vg_name,
            })
        elif args.verb == "modify":
            client.post("/2/cluster/modify", {"spec": args.hvparams})
        elif args.verb == "verify":
            resp = client.post("/2/cluster/verify", {})
            ids = resp["job_ids"]
            print(f"Submitted jobs {', '.join(str(i) for i in ids)}")
            for job_id in ids:
                print(f"Waiting for job {job_id} ...")
                print_job_log(client.wait_job(job_id))
        elif args.verb == "copyfile":
            resp = client.post("/2/cluster/copyfile", {"path": args.path})
            print_job_log(client.wait_job(resp["job_id"]))

    return _run(go)


# ---------------------------------------------------------------------------
# gnt-node

def main_node(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gnt-node")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_add = sub.add_parser("add")
    p_add.add_argument("name")

    sub.add_parser("list")

    args = parser.parse_args(argv)
    client = ApiClient()

    def go():
        if args.verb == "add":
            print(node_add_banner(args.name))
            resp = client.post("/2/nodes", {"name": args.name})
            print_job_log(client.wait_job(resp["job_id"]))
        elif args.verb == "list":
            nodes = client.get("/2/nodes")["nodes"]
            rows = [
                [n["name"], fmt_size(n["dtotal"]), fmt_size(n["dfree"]),
                 fmt_size(n["mtotal"]), fmt_size(n["mnode"]), fmt_size(n["mfree"]),
                 n["pinst"], n["sinst"]]
                for n in nodes
            ]
            print(render_table(NODE_LIST_COLUMNS, rows, right_align={1, 2, 3, 4, 5, 6, 7}))

    return _run(go)


# ---------------------------------------------------------------------------
# gnt-instance

def main_instance(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gnt-instance")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_add = sub.add_parser("add")
    p_add.add_argument("-t", dest="template", default="drbd", choices=["plain", "drbd"])
    p_add.add_argument("-o", dest="os", required=True)
    p_add.add_argument("-s", dest="size", type=size_arg, required=True)
    p_add.add_argument("-B", dest="be", type=be_arg, default={})
    p_add.add_argument("-n", dest="node")
    p_add.add_argument("--no-start", action="store_true")
    p_add.add_argument("--no-name-check", action="store_true")
    p_add.add_argument("--no-ip-check", action="store_true")
    p_add.add_argument("name")

    p_start = sub.add_parser("start")
    p_start.add_argument("-H", dest="hvparams", type=hv_arg, default={})
    p_start.add_argument("name")

    p_stop = sub.add_parser("shutdown")
    p_stop.add_argument("name")

    p_info = sub.add_parser("info")
    p_info.add_argument("name")

    p_list = sub.add_parser("list")
    p_list.add_argument("-o", dest="fields")

    p_modify = sub.add_parser("modify")
    p_modify.add_argument("--net", dest="net", type=net_arg, required=True)
    p_modify.add_argument("--hotplug", action="store_true")
    p_modify.add_argument("--yes", action="store_true")
    p_modify.add_argument("name")

    p_migrate = sub.add_parser("migrate")
    p_migrate.add_argument("--yes", action="store_true")
    p_migrate.add_argument("name")

    p_failover = sub.add_parser("failover")
    p_failover.add_argument("--ignore-consistency", action="store_true")
    p_failover.add_argument("--yes", action="store_true")
    p_failover.add_argument("name")

    args = parser.parse_args(argv)
    client = ApiClient()

    def go():
        if args.verb == "add":
            resp = client.post("/2/instances", {
                "name": args.name,
                "template": args.template,
                "os": args.os,
                "size_mib": args.size,
                "be": args.be,
                "node": args.node,
                "no_start": args.no_start,
                "no_name_check": args.no_name_check,
                "no_ip_check": args.no_ip_check,
            })
            print_job_log(client.wait_job(resp["job_id"]))
        elif args.verb == "start":
            resp = client.post(f"/2/instances/{args.name}/startup", {"hvparams": args.hvparams})
            _wait_and_print(client, resp["job_id"], waiting_for=args.name)
        elif args.verb == "shutdown":
            resp = client.post(f"/2/instances/{args.name}/shutdown", {})
            _wait_and_print(client, resp["job_id"], waiting_for=args.name)
        elif args.verb == "info":
            print(client.get(f"/2/instances/{args.name}")["text"])
        elif args.verb == "list":
            fields = args.fields.split(",") if args.fields else None
            path = "/2/instances" + (f"?fields={args.fields}" if args.fields else "")
            resp = client.get(path)
            print(render_table(resp["headers"], resp["rows"]))
        elif args.verb == "modify":
            if not confirm(HOTPLUG_PROMPT, args.yes):
                raise CliError("")
            body = dict(args.net)
            body["hotplug"] = args.hotplug
            resp = client.post(f"/2/instances/{args.name}/modify", body)
            job = client.wait_job(resp["job_id"])
            print_job_log(job)
            print(f"Modified instance {args.name}")
            for key, value in job["result"]["modified"]:
                print(f" - {key} -> {value}")
            print(job["result"]["notice"])
        elif args.verb == "migrate":
            if not confirm(MIGRATE_PROMPT.format(name=args.name), args.yes):
                raise CliError("")
            resp = client.post(f"/2/instances/{args.name}/migrate", {})
            print_job_log(client.wait_job(resp["job_id"]))
        elif args.verb == "failover":
            if not confirm(FAILOVER_PROMPT.format(name=args.name), args.yes):
                raise CliError("")
            resp = client.post(f"/2/instances/{args.name}/failover",
                               {"ignore_consistency": args.ignore_consistency})
            print_job_log(client.wait_job(resp["job_id"]))

    return _run(go)


# ---------------------------------------------------------------------------
# gnt-os

def main_os(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gnt-os")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("list")
    args = parser.parse_args(argv)
    client = ApiClient()

    def go():
        if args.verb == "list":
            names = client.get("/2/os")["names"]
            print("Name")
            for name in names:
                print(name)

    return _run(go)
