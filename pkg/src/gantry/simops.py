"""Simulation-control operations: power, clock, connectivity probes.

These run through the job queue like everything else so that every state
change in a scenario is attributable to one numbered job.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .engine import register_op
from .jobs import JobContext

if TYPE_CHECKING:
    from .engine import Engine


@register_op("set_node_power")
def op_set_node_power(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    name = p["node"]
    power = p.get("power", "off")
    engine.world.set_node_power(name, power)
    return {"node": name, "power": power}


@register_op("advance_clock")
def op_advance_clock(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    now = engine.world.advance(float(p.get("dt", 0)))
    return {"now": now, "when": engine.world.clock.console_ts()}


@register_op("probe")
def op_probe(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    """Connectivity check; unknown or stopped instances simply time out."""
    network = p.get("network", "mgmt")
    name = p["instance"]
    nic_link = None
    node = None
    if engine.cluster is not None and name in engine.cluster.instances:
        inst = engine.cluster.instances[name]
        nic_link = inst.nics[0].link if inst.nics else None
        node = inst.primary_node
    result = engine.world.probe(network, name, nic_link, node)
    return {"instance": name, "network": network, "result": result.status,
            "latency_ms": result.latency_ms}
