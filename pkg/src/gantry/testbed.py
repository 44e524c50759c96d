"""Lab profiles: ready-made simulated worlds for experiments and tests.

The default profile is three commodity machines on one managed switch,
each with a ~138 GiB volume group, bridged onto br-man (management +
storage, VLAN 100) and br-public (instance traffic, VLAN 200).  The
install ISO sits on the first machine; the others receive it through
copyfile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .clock import SimClock
from .engine import Engine
from .simnode import SimWorld

DEBIAN_ISO = "/iso/debian-7.9.0-amd64-netinst.iso"

WALKTHROUGH_SCENARIO = Path(__file__).parent / "scenarios" / "walkthrough.json"


@dataclass
class MachineSpec:
    name: str
    mgmt_ip: str
    mtotal: int  # MiB physical memory
    mnode: int  # MiB reserved by the node itself
    vg_mib: int = 141179  # ~137.87 GiB
    files: dict = field(default_factory=dict)


@dataclass
class LabSpec:
    cluster_name: str = "cluster.project.edu"
    cluster_ip: str = "192.168.20.220"
    vg_name: str = "ganeti"
    seed: int = 20151117
    machines: list = field(default_factory=list)

    def hosts(self) -> dict:
        table = {self.cluster_name: self.cluster_ip}
        for m in self.machines:
            table[m.name] = m.mgmt_ip
        return table


def default_lab() -> LabSpec:
    return LabSpec(machines=[
        MachineSpec("node1.project.edu", "192.168.20.222", mtotal=2458, mnode=246,
                    files={DEBIAN_ISO: "iso:debian-7.9.0-amd64-netinst"}),
        MachineSpec("node2.project.edu", "192.168.20.223", mtotal=2048, mnode=94),
        MachineSpec("node3.project.edu", "192.168.20.224", mtotal=2048, mnode=94),
    ])


def build_world(spec: LabSpec | None = None) -> SimWorld:
    spec = spec or default_lab()
    world = SimWorld(hosts=spec.hosts(), clock=SimClock())
    for m in spec.machines:
        node = world.add_node(m.name, mtotal=m.mtotal, mnode=m.mnode)
        node.file_catalog.update(m.files)
        world.storage.create_volume_group(m.name, spec.vg_name, m.vg_mib)
    return world


def build_engine(spec: LabSpec | None = None, state_dir: str | None = None,
                 seed: int | None = None) -> Engine:
    spec = spec or default_lab()
    world = build_world(spec)
    return Engine(world, seed=spec.seed if seed is None else seed,
                  state_dir=state_dir, local_node=spec.machines[0].name)
