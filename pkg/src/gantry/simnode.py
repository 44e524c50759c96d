"""Simulated physical layer: node power, hosted VMs, networks, the clock.

A lab world is a set of machines bridged onto two networks (management +
storage on br-man / VLAN 100, public traffic on br-public / VLAN 200), a
shared storage model and one simulated clock.  Cutting power kills hosted
VMs and makes all communication with the node fail with no-route-to-host
semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clock import SimClock
from .errors import PreconditionError, UnknownEntityError, ValidationError
from .storage import StorageState

POWER_ON = "on"
POWER_OFF = "off"
VM_RUNNING = "running"
VM_STOPPED = "stopped"

NODED_PORT = 1811

# Observer network -> bridge the instance NIC must sit on to be reachable.
NETWORK_LINKS = {"mgmt": "br-man", "public": "br-public"}

VARIANTS_LIST_PATH = "/etc/ganeti/instance-image/variants.list"
VARIANT_CONF_DIR = "/etc/ganeti/instance-image/variants"


@dataclass
class SimVm:
    instance: str
    state: str = VM_STOPPED
    boot_order: str = "disk"
    cdrom_path: str | None = None
    console_port: int = 0
    memory: int = 0


@dataclass
class SimNode:
    name: str
    mtotal: int
    mnode: int
    power: str = POWER_ON
    vms: dict = field(default_factory=dict)  # instance name -> SimVm
    file_catalog: dict = field(default_factory=dict)  # path -> content
    credentials: str = ""
    received_serial: int = 0

    def __post_init__(self):
        if not self.credentials:
            self.credentials = f"factory:{self.name}"
        self.file_catalog.setdefault(VARIANTS_LIST_PATH, "default\n")


@dataclass
class ProbeResult:
    status: str  # "reply" | "timeout"
    latency_ms: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "reply"


class SimWorld:
    """Every physical thing the cluster manager believes it is driving."""

    def __init__(self, hosts: dict | None = None, clock: SimClock | None = None):
        self.hosts = dict(hosts or {})
        self.clock = clock or SimClock()
        self.nodes: dict = {}  # name -> SimNode
        self.storage = StorageState()
        self.pending_probe_drops: set = set()  # instances losing their next probe

    # -- nodes ------------------------------------------------------------

    def add_node(self, name: str, mtotal: int, mnode: int) -> SimNode:
        node = SimNode(name=name, mtotal=mtotal, mnode=mnode)
        self.nodes[name] = node
        return node

    def get_node(self, name: str) -> SimNode:
        try:
            return self.nodes[name]
        except KeyError:
            raise UnknownEntityError("unknown-node", f"no machine named {name} in the lab") from None

    def reachable(self, name: str) -> bool:
        return name in self.nodes and self.nodes[name].power == POWER_ON

    def no_route(self, name: str, ip: str) -> str:
        """Error text other components embed when a node is unreachable."""
        return f"Error 7: Failed connect to {ip}:{NODED_PORT}; No route to host"

    def set_node_power(self, name: str, power: str):
        node = self.get_node(name)
        if power not in (POWER_ON, POWER_OFF):
            raise ValidationError("bad-power-state", f"power must be on or off, not {power!r}")
        node.power = power
        if power == POWER_OFF:
            for vm in node.vms.values():
                vm.state = VM_STOPPED

    # -- hosted VMs -------------------------------------------------------

    def vm_set_state(self, node_name: str, instance: str, state: str, *,
                     boot_order: str = "disk", cdrom_path: str | None = None,
                     console_port: int = 0, memory: int = 0):
        node = self.get_node(node_name)
        if state == VM_RUNNING:
            if node.power != POWER_ON:
                raise PreconditionError("node-off", f"node {node_name} is powered off")
            if boot_order == "cdrom" and cdrom_path not in node.file_catalog:
                raise PreconditionError(
                    "missing-iso-on-node",
                    f"image {cdrom_path} is not present on node {node_name}",
                )
            vm = node.vms.get(instance) or SimVm(instance=instance)
            vm.state = VM_RUNNING
            vm.boot_order = boot_order
            vm.cdrom_path = cdrom_path
            vm.console_port = console_port
            vm.memory = memory
            node.vms[instance] = vm
        elif state == VM_STOPPED:
            if instance in node.vms:
                node.vms[instance].state = VM_STOPPED
        else:
            raise ValidationError("bad-vm-state", f"VM state must be running or stopped, not {state!r}")

    def remove_vm(self, node_name: str, instance: str):
        self.get_node(node_name).vms.pop(instance, None)

    def vm_running_on(self, node_name: str, instance: str) -> bool:
        node = self.nodes.get(node_name)
        if node is None or node.power != POWER_ON:
            return False
        vm = node.vms.get(instance)
        return vm is not None and vm.state == VM_RUNNING

    # -- clock and long-running transfers ----------------------------------

    def advance(self, dt: float) -> float:
        """Move simulated time forward, driving every registered resync."""
        now = self.clock.advance(dt)
        self.storage.tick_all(dt)
        return now

    def transfer_memory(self, src: str, dst: str, size: int, rate: float, report_every: float):
        """Stream a VM's memory; yields progress percentages below 100."""
        if rate <= 0:
            raise ValidationError("bad-rate", "transfer rate must be positive")
        for name in (src, dst):
            if not self.reachable(name):
                raise PreconditionError("node-offline", f"node {name} is unreachable")
        if size <= 0:
            return
        duration = size / rate
        elapsed = 0.0
        while True:
            step = min(report_every, duration - elapsed)
            self.advance(step)
            elapsed += step
            for name in (src, dst):
                if not self.reachable(name):
                    raise PreconditionError("node-offline", f"node {name} went down mid-transfer")
            percent = min(100.0, 100.0 * (rate * elapsed) / size)
            if percent >= 100.0:
                return
            yield percent

    # -- reachability probes ------------------------------------------------

    def probe(self, network: str, instance: str, nic_link: str | None,
              node_name: str | None) -> ProbeResult:
        """One connectivity check from the given observer network.

        A pending hotplug/cutover swap eats exactly one probe.
        """
        if network not in NETWORK_LINKS:
            raise ValidationError("bad-network", f"unknown observer network {network!r}")
        if instance in self.pending_probe_drops:
            self.pending_probe_drops.discard(instance)
            return ProbeResult("timeout")
        if node_name is None or nic_link is None:
            return ProbeResult("timeout")
        if not self.vm_running_on(node_name, instance):
            return ProbeResult("timeout")
        if NETWORK_LINKS[network] != nic_link:
            return ProbeResult("timeout")
        return ProbeResult("reply", latency_ms=0)
