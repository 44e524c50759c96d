"""Replicated cluster configuration.

The config is the single logical document every management decision reads
and every job mutates: node and instance records, identity/counter
allocation, hypervisor defaults.  It is replicated whole to all master
candidates, serialized as canonical JSON (stable key order) so that two
runs of the same seeded scenario produce byte-identical snapshots.

``config_serial`` increases on every record or counter mutation; live
replication details (sync percentages, connection modes) are tracked by the
storage layer and embedded in the snapshot without bumping the serial.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import PreconditionError, UnknownEntityError, ValidationError

PORT_BASE = 11000
DRBD_MINORS_PER_NODE = 128
MAC_PREFIX = "aa:00:00"
VNC_BASE_PORT = 5900

ROLE_MASTER = "master"
ROLE_CANDIDATE = "master_candidate"
ROLE_REGULAR = "regular"

TEMPLATE_PLAIN = "plain"
TEMPLATE_DRBD = "drbd"

ADMIN_UP = "up"
ADMIN_DOWN = "down"

# Backend (resource) parameters and their cluster-wide defaults.
BE_DEFAULTS = {
    "auto_balance": True,
    "maxmem": 128,
    "minmem": 128,
    "spindle_use": 1,
    "vcpus": 1,
}

# Hypervisor parameters and their built-in defaults, all string-valued.
KVM_HV_DEFAULTS = {
    "acpi": "True",
    "boot_order": "disk",
    "cdrom_disk_type": "",
    "cdrom_image_path": "",
    "cpu_cores": "0",
    "cpu_mask": "all",
    "cpu_sockets": "0",
    "cpu_threads": "0",
    "cpu_type": "",
    "disk_cache": "default",
    "disk_type": "paravirtual",
    "initrd_path": "",
    "kernel_path": "",
    "nic_type": "paravirtual",
    "serial_console": "True",
    "vnc_bind_address": "",
}

HV_DEFAULTS = {"kvm": KVM_HV_DEFAULTS}


@dataclass
class NicSpec:
    mac: str
    link: str
    uuid: str
    ip: str | None = None
    mode: str = "bridged"
    name: str | None = None

    def to_doc(self) -> dict:
        return {
            "mac": self.mac,
            "ip": self.ip,
            "mode": self.mode,
            "link": self.link,
            "uuid": self.uuid,
            "name": self.name,
        }


@dataclass
class DiskChild:
    """One logical volume backing a disk (data payload or replication metadata)."""

    role: str  # "data" | "meta"
    lv_name: str
    size: int
    uuid: str

    def to_doc(self) -> dict:
        return {"role": self.role, "lv_name": self.lv_name, "size": self.size, "uuid": self.uuid}


@dataclass
class DiskSpec:
    uuid: str
    template: str
    size: int
    node_a: str
    content_hash: str
    children: list[DiskChild]
    access: str = "rw"
    node_b: str | None = None
    minor_a: int | None = None
    minor_b: int | None = None
    port: int | None = None
    auth_key: str | None = None

    def nodes(self) -> list[str]:
        return [self.node_a] + ([self.node_b] if self.node_b else [])

    def to_doc(self) -> dict:
        return {
            "uuid": self.uuid,
            "template": self.template,
            "size": self.size,
            "access": self.access,
            "node_a": self.node_a,
            "node_b": self.node_b,
            "minor_a": self.minor_a,
            "minor_b": self.minor_b,
            "port": self.port,
            "auth_key": self.auth_key,
            "content_hash": self.content_hash,
            "children": [c.to_doc() for c in self.children],
        }


@dataclass
class InstanceRecord:
    name: str
    uuid: str
    serial: int
    ctime: float
    mtime: float
    admin_state: str
    primary_node: str
    secondary_nodes: list[str]
    os_spec: str
    hv_overrides: dict
    be_params: dict
    be_set: tuple  # keys explicitly given at creation, for report rendering
    nics: list[NicSpec]
    disks: list[DiskSpec]
    network_port: int

    @property
    def template(self) -> str:
        return self.disks[0].template if self.disks else TEMPLATE_PLAIN

    @property
    def display(self) -> int:
        return self.network_port - VNC_BASE_PORT

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "uuid": self.uuid,
            "serial": self.serial,
            "ctime": self.ctime,
            "mtime": self.mtime,
            "admin_state": self.admin_state,
            "primary_node": self.primary_node,
            "secondary_nodes": list(self.secondary_nodes),
            "os_spec": self.os_spec,
            "hv_overrides": dict(sorted(self.hv_overrides.items())),
            "be_params": dict(sorted(self.be_params.items())),
            "be_set": sorted(self.be_set),
            "nics": [n.to_doc() for n in self.nics],
            "disks": [d.to_doc() for d in self.disks],
            "network_port": self.network_port,
        }


@dataclass
class NodeRecord:
    name: str
    uuid: str
    mgmt_ip: str
    role: str
    vg_total: int
    mtotal: int
    mnode: int
    offline: bool = False
    minor_counter: int = 0

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "uuid": self.uuid,
            "mgmt_ip": self.mgmt_ip,
            "role": self.role,
            "offline": self.offline,
            "vg_total": self.vg_total,
            "mtotal": self.mtotal,
            "mnode": self.mnode,
            "minor_counter": self.minor_counter,
        }


@dataclass
class ClusterConfig:
    cluster_name: str
    master_node: str
    master_netdev: str
    enabled_hypervisors: list[str]
    default_nic_link: str
    vg_name: str
    hosts: dict
    rng_seed: int
    group_uuid: str = ""
    hypervisor_params: dict = field(default_factory=dict)  # hv -> {key -> value} overrides
    port_counter: int = PORT_BASE
    config_serial: int = 1
    has_certificates: bool = True
    nodes: dict = field(default_factory=dict)  # name -> NodeRecord
    instances: dict = field(default_factory=dict)  # name -> InstanceRecord
    _rng: random.Random = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._rng is None:
            self._rng = random.Random(self.rng_seed)
        for hv in self.enabled_hypervisors:
            self.hypervisor_params.setdefault(hv, {})

    # -- counters ---------------------------------------------------------

    def bump(self) -> int:
        self.config_serial += 1
        return self.config_serial

    def allocate_network_port(self) -> int:
        port = self.port_counter
        self.port_counter += 1
        self.bump()
        return port

    def allocate_drbd_minor(self, node_name: str) -> int:
        node = self.get_node(node_name)
        if node.minor_counter >= DRBD_MINORS_PER_NODE:
            raise PreconditionError(
                "minors-exhausted",
                f"node {node_name} has no free replication minors "
                f"(limit {DRBD_MINORS_PER_NODE})",
            )
        minor = node.minor_counter
        node.minor_counter += 1
        self.bump()
        return minor

    # -- identities -------------------------------------------------------

    def generate_identity(self, kind: str) -> str:
        """Draw a fresh mac/uuid/auth_key/token from the seeded stream.

        Deterministic for a fixed seed and call order; macs are retried
        until unique cluster-wide.
        """
        if kind == "mac":
            taken = {n.mac for i in self.instances.values() for n in i.nics}
            while True:
                mac = MAC_PREFIX + ":" + ":".join(f"{self._rng.randrange(256):02x}" for _ in range(3))
                if mac not in taken:
                    return mac
        if kind == "uuid":
            b = bytearray(self._rng.randrange(256) for _ in range(16))
            b[6] = (b[6] & 0x0F) | 0x40
            b[8] = (b[8] & 0x3F) | 0x80
            h = bytes(b).hex()
            return f"{h[:8]}-{h[8:12]}-{h[12:16]}-{h[16:20]}-{h[20:]}"
        if kind == "auth_key":
            return "".join(self._rng.choice("0123456789abcdef") for _ in range(40))
        if kind == "token":
            return "".join(self._rng.choice("0123456789abcdef") for _ in range(12))
        raise ValidationError("bad-identity-kind", f"cannot generate identity of kind {kind!r}")

    # -- lookups ----------------------------------------------------------

    def get_node(self, name: str) -> NodeRecord:
        try:
            return self.nodes[name]
        except KeyError:
            raise UnknownEntityError("unknown-node", f"node {name} is not part of the cluster") from None

    def get_instance(self, name: str) -> InstanceRecord:
        try:
            return self.instances[name]
        except KeyError:
            raise UnknownEntityError("unknown-instance", f"instance {name} is not configured") from None

    def candidates(self) -> list[NodeRecord]:
        """Nodes that hold a config copy: master plus master candidates, by name."""
        return [
            n for _, n in sorted(self.nodes.items())
            if n.role in (ROLE_MASTER, ROLE_CANDIDATE)
        ]

    def effective_hvparams(self, hv: str, overrides: dict | None = None) -> dict:
        params = dict(HV_DEFAULTS.get(hv, {}))
        params.update(self.hypervisor_params.get(hv, {}))
        if overrides:
            params.update(overrides)
        return params

    # -- serialization ----------------------------------------------------

    def to_doc(self, storage_doc: dict | None = None) -> dict:
        doc = {
            "cluster_name": self.cluster_name,
            "master_node": self.master_node,
            "master_netdev": self.master_netdev,
            "enabled_hypervisors": list(self.enabled_hypervisors),
            "hypervisor_params": {h: dict(sorted(p.items())) for h, p in sorted(self.hypervisor_params.items())},
            "default_nic_link": self.default_nic_link,
            "vg_name": self.vg_name,
            "group_uuid": self.group_uuid,
            "port_counter": self.port_counter,
            "config_serial": self.config_serial,
            "has_certificates": self.has_certificates,
            "hosts": dict(sorted(self.hosts.items())),
            "rng_seed": self.rng_seed,
            "nodes": {n: r.to_doc() for n, r in sorted(self.nodes.items())},
            "instances": {n: r.to_doc() for n, r in sorted(self.instances.items())},
        }
        if storage_doc is not None:
            doc["storage"] = storage_doc
        return doc

    def snapshot_bytes(self, storage_doc: dict | None = None) -> bytes:
        text = json.dumps(self.to_doc(storage_doc), sort_keys=True, indent=2) + "\n"
        return text.encode("utf-8")
