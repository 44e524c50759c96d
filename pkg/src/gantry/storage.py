"""Per-node storage model: volume groups, logical volumes, replicated pairs.

Volume groups are carved into data/meta logical volumes; replicated disks
get a two-sided state machine (role, connection, disk health) plus a
simulated synchronization that is advanced by the clock owner.  Replicated
devices are never candidate physical volumes, so a pair can only live on
volumes carved here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError, UnknownEntityError, ValidationError
from .units import MIB_PER_GIB, fmt_duration, fmt_size_vgs

DEFAULT_VG = "ganeti"
DEFAULT_SYNC_RATE = 11.5  # MiB/s
DRBD_MAJOR = 147
DM_MAJOR = 254

ROLE_PRIMARY = "primary"
ROLE_SECONDARY = "secondary"
CONN_CONNECTED = "connected"
CONN_STANDALONE = "standalone"
DISK_INCONSISTENT = "inconsistent"
DISK_UP_TO_DATE = "up_to_date"


def meta_size(data_mib: int) -> int:
    """Size in MiB of the metadata volume paired with a data volume."""
    return 128 + 48 * math.ceil(data_mib / MIB_PER_GIB)


@dataclass
class VolumeGroup:
    node: str
    name: str
    total: int
    pv_count: int = 1

    def to_doc(self) -> dict:
        return {"node": self.node, "name": self.name, "total": self.total, "pv_count": self.pv_count}


@dataclass
class LogicalVolume:
    node: str
    vg: str
    lv_name: str
    size: int
    role: str  # "data" | "meta"
    uuid: str
    dm_minor: int

    @property
    def device(self) -> str:
        return f"/dev/{self.vg}/{self.lv_name} ({DM_MAJOR}:{self.dm_minor})"

    def to_doc(self) -> dict:
        return {
            "node": self.node,
            "vg": self.vg,
            "lv_name": self.lv_name,
            "size": self.size,
            "role": self.role,
            "uuid": self.uuid,
            "dm_minor": self.dm_minor,
        }


@dataclass
class DrbdSide:
    role: str = ROLE_SECONDARY
    conn: str = CONN_CONNECTED
    disk: str = DISK_INCONSISTENT

    def to_doc(self) -> dict:
        return {"role": self.role, "conn": self.conn, "disk": self.disk}


@dataclass
class ResyncProgress:
    percent: float
    remaining_seconds: float

    @property
    def text(self) -> str:
        return f"{self.percent:.2f}% done, {fmt_duration(self.remaining_seconds)} remaining (estimated)"


@dataclass
class DrbdPair:
    disk_uuid: str
    node_a: str
    node_b: str
    size: int
    port: int
    minors: dict  # node -> minor
    sides: dict  # node -> DrbdSide
    sync_rate: float = DEFAULT_SYNC_RATE
    sync_percent: float = 0.0

    def side(self, node: str) -> DrbdSide:
        try:
            return self.sides[node]
        except KeyError:
            raise UnknownEntityError(
                "unknown-node", f"node {node} holds no side of disk {self.disk_uuid}"
            ) from None

    def peer(self, node: str) -> str:
        return self.node_b if node == self.node_a else self.node_a

    def primaries(self) -> frozenset:
        return frozenset(n for n, s in self.sides.items() if s.role == ROLE_PRIMARY)

    def syncing(self) -> bool:
        return (
            self.sync_percent < 100.0
            and all(s.conn == CONN_CONNECTED for s in self.sides.values())
            and any(s.disk == DISK_INCONSISTENT for s in self.sides.values())
        )

    def up_to_date(self) -> bool:
        return all(s.disk == DISK_UP_TO_DATE for s in self.sides.values())

    def progress(self) -> ResyncProgress:
        remaining = (100.0 - self.sync_percent) / 100.0 * self.size / self.sync_rate
        return ResyncProgress(self.sync_percent, remaining)

    def to_doc(self) -> dict:
        return {
            "disk_uuid": self.disk_uuid,
            "node_a": self.node_a,
            "node_b": self.node_b,
            "size": self.size,
            "port": self.port,
            "minors": dict(sorted(self.minors.items())),
            "sides": {n: s.to_doc() for n, s in sorted(self.sides.items())},
            "sync_rate": self.sync_rate,
            "sync_percent": round(self.sync_percent, 6),
        }


class StorageState:
    """All volume groups, logical volumes and replicated pairs in the lab."""

    def __init__(self):
        self.vgs: dict = {}  # (node, vg name) -> VolumeGroup
        self.lvs: dict = {}  # (node, lv name) -> LogicalVolume
        self.pairs: dict = {}  # disk uuid -> DrbdPair
        self._dm_counters: dict = {}  # node -> next device-mapper minor
        self.role_history: list = []  # (sim time, disk uuid, frozenset of primary nodes, job id)

    # -- volume groups ----------------------------------------------------

    def create_volume_group(self, node: str, name: str, total: int) -> VolumeGroup:
        if (node, name) in self.vgs:
            raise PreconditionError("duplicate-vg", f"volume group {name} already exists on {node}")
        vg = VolumeGroup(node=node, name=name, total=total)
        self.vgs[(node, name)] = vg
        return vg

    def get_vg(self, node: str, name: str) -> VolumeGroup:
        try:
            return self.vgs[(node, name)]
        except KeyError:
            raise UnknownEntityError("vg-missing", f"no volume group {name} on node {node}") from None

    def node_lvs(self, node: str, vg: str | None = None):
        return [
            lv for (n, _), lv in sorted(self.lvs.items())
            if n == node and (vg is None or lv.vg == vg)
        ]

    def vg_free(self, node: str, name: str) -> int:
        vg = self.get_vg(node, name)
        return vg.total - sum(lv.size for lv in self.node_lvs(node, name))

    def vgs_row(self, node: str, name: str) -> dict:
        """One row as a vgs listing would print it."""
        vg = self.get_vg(node, name)
        return {
            "VG": vg.name,
            "#PV": vg.pv_count,
            "#LV": len(self.node_lvs(node, name)),
            "#SN": 0,
            "Attr": "wz--n-",
            "VSize": fmt_size_vgs(vg.total),
            "VFree": fmt_size_vgs(self.vg_free(node, name)),
        }

    # -- logical volumes --------------------------------------------------

    def carve_lv(self, node: str, vg_name: str, lv_name: str, size: int, role: str, uuid: str) -> LogicalVolume:
        free = self.vg_free(node, vg_name)
        if size > free:
            raise PreconditionError(
                "insufficient-space",
                f"node {node}: volume group {vg_name} has {free} MiB free, need {size} MiB",
            )
        if (node, lv_name) in self.lvs:
            raise PreconditionError("duplicate-lv", f"logical volume {lv_name} already exists on {node}")
        minor = self._dm_counters.get(node, 0)
        self._dm_counters[node] = minor + 1
        lv = LogicalVolume(node=node, vg=vg_name, lv_name=lv_name, size=size, role=role, uuid=uuid, dm_minor=minor)
        self.lvs[(node, lv_name)] = lv
        return lv

    def orphan_volumes(self, referenced_lv_names) -> list:
        """Volumes no configured disk refers to, as (node, vg, lv_name)."""
        wanted = set(referenced_lv_names)
        return [
            (node, lv.vg, lv.lv_name)
            for (node, name), lv in sorted(self.lvs.items())
            if name not in wanted
        ]

    # -- replicated pairs -------------------------------------------------

    def create_pair(self, disk_uuid: str, node_a: str, node_b: str, size: int,
                    port: int, minors: dict, sync_rate: float = DEFAULT_SYNC_RATE) -> DrbdPair:
        pair = DrbdPair(
            disk_uuid=disk_uuid,
            node_a=node_a,
            node_b=node_b,
            size=size,
            port=port,
            minors=dict(minors),
            sides={
                node_a: DrbdSide(role=ROLE_PRIMARY),
                node_b: DrbdSide(role=ROLE_SECONDARY),
            },
            sync_rate=sync_rate,
        )
        self.pairs[disk_uuid] = pair
        return pair

    def get_pair(self, disk_uuid: str) -> DrbdPair:
        try:
            return self.pairs[disk_uuid]
        except KeyError:
            raise UnknownEntityError("unknown-disk", f"no replicated pair for disk {disk_uuid}") from None

    def set_mode(self, disk_uuid: str, transition: str, node: str | None = None,
                 t: float = 0.0, job_id: int | None = None) -> DrbdPair:
        """Apply one transition of the replication state machine.

        Legal moves: connected<->standalone, promotion to dual or single
        primary only while connected, and demotion of one side to
        secondary.  Everything else is rejected.
        """
        pair = self.get_pair(disk_uuid)
        before = pair.primaries()
        if transition == "connected":
            for s in pair.sides.values():
                s.conn = CONN_CONNECTED
        elif transition == "standalone":
            for s in pair.sides.values():
                s.conn = CONN_STANDALONE
        elif transition == "dual_primary":
            self._require_connected(pair, transition)
            for s in pair.sides.values():
                s.role = ROLE_PRIMARY
        elif transition == "single_primary":
            self._require_connected(pair, transition)
            side = pair.side(self._require_node(node, transition))
            side.role = ROLE_PRIMARY
            pair.side(pair.peer(node)).role = ROLE_SECONDARY
        elif transition == "secondary":
            pair.side(self._require_node(node, transition)).role = ROLE_SECONDARY
        else:
            raise ValidationError("bad-transition", f"unknown transition {transition!r}")
        after = pair.primaries()
        if after != before:
            self.role_history.append((t, disk_uuid, after, job_id))
        return pair

    def _require_connected(self, pair: DrbdPair, transition: str):
        states = {s.conn for s in pair.sides.values()}
        if states != {CONN_CONNECTED}:
            raise PreconditionError(
                "illegal-transition",
                f"disk {pair.disk_uuid}: cannot move to {transition} while "
                f"{'/'.join(sorted(states))}; pair must be connected",
            )

    @staticmethod
    def _require_node(node: str | None, transition: str) -> str:
        if node is None:
            raise ValidationError("bad-transition", f"transition {transition} needs a target node")
        return node

    def force_role(self, disk_uuid: str, node: str, role: str,
                   t: float = 0.0, job_id: int | None = None):
        """Set one side's role outside the legality table (forced promotion
        of a surviving side, or demotion while disconnected)."""
        pair = self.get_pair(disk_uuid)
        before = pair.primaries()
        pair.side(node).role = role
        after = pair.primaries()
        if after != before:
            self.role_history.append((t, disk_uuid, after, job_id))

    def set_conn(self, disk_uuid: str, conn: str):
        for side in self.get_pair(disk_uuid).sides.values():
            side.conn = conn

    def resync_tick(self, disk_uuid: str, dt: float) -> ResyncProgress:
        """Advance one syncing pair by dt seconds of replication traffic."""
        pair = self.get_pair(disk_uuid)
        if not pair.syncing():
            raise PreconditionError("not-syncing", f"disk {disk_uuid} is not synchronizing")
        pair.sync_percent = min(100.0, pair.sync_percent + 100.0 * (pair.sync_rate * dt) / pair.size)
        if pair.sync_percent >= 100.0:
            pair.sync_percent = 100.0
            for s in pair.sides.values():
                s.disk = DISK_UP_TO_DATE
        return pair.progress()

    def tick_all(self, dt: float):
        for uuid in sorted(self.pairs):
            if self.pairs[uuid].syncing():
                self.resync_tick(uuid, dt)

    def to_doc(self) -> dict:
        return {
            "volume_groups": [vg.to_doc() for _, vg in sorted(self.vgs.items())],
            "logical_volumes": [lv.to_doc() for _, lv in sorted(self.lvs.items())],
            "drbd": [p.to_doc() for _, p in sorted(self.pairs.items())],
        }
