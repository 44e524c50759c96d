"""Placement and capacity accounting.

Pure functions over a config snapshot plus the storage model.  Memory
accounting charges the maxmem of every instance configured to run against
its primary node; stopped instances are free.  Placement is a deterministic
greedy: the feasible node with the most free memory wins, ties broken by
ascending name.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .model import ADMIN_UP, TEMPLATE_DRBD, ClusterConfig
from .storage import StorageState, meta_size


@dataclass
class CapacityRow:
    node: str
    dtotal: int
    dfree: int
    mtotal: int
    mnode: int
    mfree: int
    pinst: int
    sinst: int


def capacity_row(config: ClusterConfig, storage: StorageState, node_name: str) -> CapacityRow:
    node = config.get_node(node_name)
    used_mem = sum(
        inst.be_params["maxmem"]
        for inst in config.instances.values()
        if inst.admin_state == ADMIN_UP and inst.primary_node == node_name
    )
    dfree = node.vg_total - sum(lv.size for lv in storage.node_lvs(node_name, config.vg_name))
    return CapacityRow(
        node=node_name,
        dtotal=node.vg_total,
        dfree=dfree,
        mtotal=node.mtotal,
        mnode=node.mnode,
        mfree=node.mtotal - node.mnode - used_mem,
        pinst=sum(1 for i in config.instances.values() if i.primary_node == node_name),
        sinst=sum(1 for i in config.instances.values() if node_name in i.secondary_nodes),
    )


def capacity_rows(config: ClusterConfig, storage: StorageState) -> list[CapacityRow]:
    return [capacity_row(config, storage, name) for name in sorted(config.nodes)]


def required_disk(template: str, size: int) -> int:
    """MiB carved on each touched node for one disk of the given template."""
    if template == TEMPLATE_DRBD:
        return size + meta_size(size)
    return size


def select_nodes(config: ClusterConfig, storage: StorageState, online: set,
                 template: str, size: int, maxmem: int,
                 override: str | None = None) -> tuple[str, str | None]:
    """Choose primary (and secondary, for replicated templates) nodes."""
    need_disk = required_disk(template, size)
    candidates = [
        capacity_row(config, storage, name)
        for name in sorted(config.nodes)
        if name in online and not config.nodes[name].offline
    ]
    feasible = [r for r in candidates if r.dfree >= need_disk and r.mfree >= maxmem]
    # max mfree first, ties broken by ascending name
    feasible.sort(key=lambda r: (-r.mfree, r.node))

    if override is not None:
        config.get_node(override)
        primary = override
        pool = [r for r in feasible if r.node != override]
    else:
        if not feasible:
            raise PreconditionError("no-feasible-placement", _constraint_text(candidates, need_disk, maxmem))
        primary = feasible[0].node
        pool = feasible[1:]

    if template != TEMPLATE_DRBD:
        return primary, None
    if not pool:
        raise PreconditionError(
            "no-feasible-placement",
            f"replicated template needs a second node with {need_disk} MiB disk "
            f"and {maxmem} MiB memory free",
        )
    return primary, pool[0].node


def _constraint_text(candidates: list[CapacityRow], need_disk: int, maxmem: int) -> str:
    if not candidates:
        return "no online nodes available"
    if all(r.mfree < maxmem for r in candidates):
        return f"no online node has {maxmem} MiB of memory free"
    return f"no online node has {need_disk} MiB of disk space free"


def check_n_plus_one(config: ClusterConfig, storage: StorageState) -> list[tuple[str, int]]:
    """Single-node-failure memory check.

    For each node, assume it fails: every running replicated instance
    primaried there must fit its maxmem into its own secondary's current
    free memory, charged cumulatively per secondary.  Returns (node,
    overflow MiB) for each failure case that does not fit.
    """
    rows = {r.node: r for r in capacity_rows(config, storage)}
    violations = []
    for name in sorted(config.nodes):
        needed: dict = {}
        for inst in config.instances.values():
            if (
                inst.admin_state == ADMIN_UP
                and inst.template == TEMPLATE_DRBD
                and inst.primary_node == name
                and inst.secondary_nodes
            ):
                sec = inst.secondary_nodes[0]
                needed[sec] = needed.get(sec, 0) + inst.be_params["maxmem"]
        overflow = sum(max(0, amount - rows[sec].mfree) for sec, amount in needed.items())
        if overflow > 0:
            violations.append((name, overflow))
    return violations
