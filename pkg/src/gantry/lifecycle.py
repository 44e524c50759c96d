"""Instance operations, end to end, as jobs with operator-console log traces.

Each op logs the exact line sequence an operator would see: placement
decision, disk creation, replication sync progress, memory-transfer
progress during live migration, and warn-and-continue recovery during
failover from a dead node.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from . import allocator, membership
from .engine import register_op
from .errors import PreconditionError, UnknownEntityError, ValidationError
from .jobs import JobContext
from .model import (
    ADMIN_DOWN,
    ADMIN_UP,
    BE_DEFAULTS,
    TEMPLATE_DRBD,
    TEMPLATE_PLAIN,
    DiskChild,
    DiskSpec,
    InstanceRecord,
    NicSpec,
)
from .storage import CONN_CONNECTED, CONN_STANDALONE, DRBD_MAJOR, ROLE_PRIMARY, ROLE_SECONDARY, meta_size
from .units import fmt_size

if TYPE_CHECKING:
    from .engine import Engine

STATUS_RUNNING = "running"
STATUS_ADMIN_DOWN = "ADMIN_down"
STATUS_ERROR_DOWN = "ERROR_down"

LIST_FIELDS = ("name", "primary_node", "secondary_nodes", "status")
LIST_HEADERS = {
    "name": "Instance",
    "primary_node": "Primary_node",
    "secondary_nodes": "Secondary_Nodes",
    "status": "Status",
}

RESTART_NOTICE = (
    "Please don't forget that most parameters take effect only at the next "
    "(re)start of the instance initiated by ganeti; restarting from within "
    "the instance will not be enough."
)


# ---------------------------------------------------------------------------
# add

@register_op("instance_add")
def op_instance_add(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    name = p["name"]
    template = p.get("template", TEMPLATE_DRBD)
    if template not in (TEMPLATE_PLAIN, TEMPLATE_DRBD):
        raise ValidationError("bad-template", f"unknown disk template {template!r}")
    size = int(p["size_mib"])
    os_spec = p["os"]
    override = p.get("node")
    no_start = bool(p.get("no_start"))

    if name in cfg.instances:
        raise PreconditionError("duplicate-instance", f"instance {name} already exists")
    if os_spec not in membership.os_list(engine):
        raise UnknownEntityError("unknown-os", f"OS {os_spec} is not available on all nodes")
    if not p.get("no_name_check") and name not in cfg.hosts:
        raise PreconditionError("name-resolution-failed", f"instance name {name} does not resolve")

    be = dict(BE_DEFAULTS)
    be_overrides = dict(p.get("be") or {})
    be.update(be_overrides)
    if be["minmem"] > be["maxmem"]:
        raise ValidationError(
            "bad-be-params", f"minmem {be['minmem']} exceeds maxmem {be['maxmem']}"
        )

    primary, secondary = allocator.select_nodes(
        cfg, engine.world.storage, engine.online_nodes(),
        template, size, be["maxmem"], override=override,
    )
    if override is None:
        chosen = primary if secondary is None else f"{primary}, {secondary}"
        ctx.info(f"Selected nodes for instance {name} via iallocator hail: {chosen}")

    ctx.step("creating instance disks...")
    uuid = engine.identity("uuid")
    nic = NicSpec(
        mac=engine.identity("mac"),
        link=cfg.default_nic_link,
        uuid=engine.identity("uuid"),
    )
    network_port = cfg.allocate_network_port()
    disk = provision_instance_disks(engine, template, size, primary, secondary)

    ctx.message(f"adding instance {name} to cluster config")
    now = engine.world.clock.now
    inst = InstanceRecord(
        name=name,
        uuid=uuid,
        serial=1,
        ctime=now,
        mtime=now,
        admin_state=ADMIN_DOWN,
        primary_node=primary,
        secondary_nodes=[secondary] if secondary else [],
        os_spec=os_spec,
        hv_overrides={},
        be_params=be,
        be_set=tuple(sorted(be_overrides)),
        nics=[nic],
        disks=[disk],
        network_port=network_port,
    )
    cfg.instances[name] = inst
    cfg.bump()

    if template == TEMPLATE_DRBD:
        ctx.info(f"Waiting for instance {name} to sync disks")
        _wait_disk_sync(engine, ctx, inst)
        ctx.info(f"Instance {name}'s disks are in sync")
    ctx.step("running the instance OS create scripts...")

    if not no_start:
        _boot_instance(engine, inst)
        cfg.bump()
    return {
        "name": name,
        "primary_node": primary,
        "secondary_nodes": inst.secondary_nodes,
        "network_port": network_port,
    }


def provision_instance_disks(engine: "Engine", template: str, size: int,
                             primary: str, secondary: str | None) -> DiskSpec:
    """Carve the logical volumes and, for replicated disks, wire the pair."""
    cfg = engine.require_cluster()
    store = engine.world.storage
    for node in [primary] + ([secondary] if secondary else []):
        cfg.get_node(node)
        need = allocator.required_disk(template, size)
        free = store.vg_free(node, cfg.vg_name)
        if free < need:
            raise PreconditionError(
                "insufficient-space",
                f"node {node}: volume group {cfg.vg_name} has {free} MiB free, need {need} MiB",
            )

    disk_uuid = engine.identity("uuid")
    content_hash = engine.identity("auth_key")
    data_name = f"{disk_uuid}.disk_data"
    children = [DiskChild(role="data", lv_name=data_name, size=size, uuid=engine.identity("uuid"))]

    if template == TEMPLATE_PLAIN:
        store.carve_lv(primary, cfg.vg_name, data_name, size, "data", children[0].uuid)
        return DiskSpec(
            uuid=disk_uuid, template=template, size=size, node_a=primary,
            content_hash=content_hash, children=children,
        )

    meta = meta_size(size)
    meta_name = f"{disk_uuid}.disk_meta"
    children.append(DiskChild(role="meta", lv_name=meta_name, size=meta, uuid=engine.identity("uuid")))
    for node in (primary, secondary):
        store.carve_lv(node, cfg.vg_name, data_name, size, "data", children[0].uuid)
        store.carve_lv(node, cfg.vg_name, meta_name, meta, "meta", children[1].uuid)
    port = cfg.allocate_network_port()
    minors = {
        primary: cfg.allocate_drbd_minor(primary),
        secondary: cfg.allocate_drbd_minor(secondary),
    }
    auth_key = engine.identity("auth_key")
    store.create_pair(disk_uuid, primary, secondary, size, port, minors, sync_rate=engine.sync_rate)
    return DiskSpec(
        uuid=disk_uuid, template=template, size=size, node_a=primary, node_b=secondary,
        minor_a=minors[primary], minor_b=minors[secondary], port=port, auth_key=auth_key,
        content_hash=content_hash, children=children,
    )


def _wait_disk_sync(engine: "Engine", ctx: JobContext, inst: InstanceRecord):
    store = engine.world.storage
    for idx, disk in enumerate(inst.disks):
        if disk.template != TEMPLATE_DRBD:
            continue
        pair = store.get_pair(disk.uuid)
        first = True
        while pair.sync_percent < 100.0:
            engine.world.advance(engine.sync_initial_delay if first else engine.sync_report_interval)
            first = False
            ctx.info(f"- device disk/{idx}: {pair.progress().text}", advance=0)


def _boot_instance(engine: "Engine", inst: InstanceRecord, hv_overrides: dict | None = None):
    """Start the VM on its primary with the effective hypervisor parameters."""
    cfg = engine.require_cluster()
    params = cfg.effective_hvparams("kvm", {**inst.hv_overrides, **(hv_overrides or {})})
    boot_order = params.get("boot_order") or "disk"
    cdrom = params.get("cdrom_image_path") or None
    engine.world.vm_set_state(
        inst.primary_node, inst.name, "running",
        boot_order=boot_order, cdrom_path=cdrom,
        console_port=inst.network_port, memory=inst.be_params["maxmem"],
    )
    inst.admin_state = ADMIN_UP


# ---------------------------------------------------------------------------
# start / shutdown

@register_op("instance_start")
def op_instance_start(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(p["name"])
    if inst.admin_state == ADMIN_UP and engine.actual_state(inst.name) == ADMIN_UP:
        ctx.warning(f"Instance {inst.name} is already running")
        return {"name": inst.name, "state": STATUS_RUNNING}
    if not engine.node_online(inst.primary_node):
        raise PreconditionError(
            "primary-offline", f"primary node {inst.primary_node} is unreachable"
        )
    overrides = dict(p.get("hvparams") or {})
    if overrides:
        inst.hv_overrides.update(overrides)
        inst.serial += 1
    inst.mtime = engine.world.clock.now
    _boot_instance(engine, inst)
    cfg.bump()
    return {"name": inst.name, "state": STATUS_RUNNING}


@register_op("instance_shutdown")
def op_instance_shutdown(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(p["name"])
    if inst.admin_state == ADMIN_DOWN and engine.actual_state(inst.name) == ADMIN_DOWN:
        ctx.warning(f"Instance {inst.name} is already stopped")
        return {"name": inst.name, "state": STATUS_ADMIN_DOWN}
    if engine.node_online(inst.primary_node):
        engine.world.vm_set_state(inst.primary_node, inst.name, "stopped")
    else:
        ctx.warning(
            f"Could not shutdown instance {inst.name} on node {inst.primary_node}: "
            f"{engine.no_route(inst.primary_node)}"
        )
    inst.admin_state = ADMIN_DOWN
    inst.mtime = engine.world.clock.now
    cfg.bump()
    return {"name": inst.name, "state": STATUS_ADMIN_DOWN}


# ---------------------------------------------------------------------------
# info / list

def instance_status(engine: "Engine", inst: InstanceRecord) -> str:
    if inst.admin_state == ADMIN_DOWN:
        return STATUS_ADMIN_DOWN
    return STATUS_RUNNING if engine.actual_state(inst.name) == ADMIN_UP else STATUS_ERROR_DOWN


def instance_info(engine: "Engine", name: str) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(name)
    store = engine.world.storage
    clock = engine.world.clock
    actual = engine.actual_state(name)

    hv_effective = cfg.effective_hvparams("kvm")
    hv_params = []
    for key in sorted(set(hv_effective) | set(inst.hv_overrides)):
        if key in inst.hv_overrides:
            hv_params.append({"key": key, "value": inst.hv_overrides[key], "default": False})
        else:
            hv_params.append({"key": key, "value": hv_effective.get(key, ""), "default": True})

    be_params = []
    for key in sorted(inst.be_params):
        be_params.append({
            "key": key,
            "value": inst.be_params[key],
            "default": key not in inst.be_set,
        })
        if key == "maxmem":
            be_params.append({"key": "memory", "value": inst.be_params["maxmem"], "default": True})

    disks = []
    for idx, d in enumerate(inst.disks):
        entry = {
            "index": idx,
            "template": d.template,
            "size": d.size,
            "access": d.access,
            "uuid": d.uuid,
            "children": [c.to_doc() for c in d.children],
        }
        if d.template == TEMPLATE_DRBD:
            pair = store.get_pair(d.uuid)
            in_sync = pair.up_to_date()
            entry.update({
                "node_a": d.node_a,
                "node_b": d.node_b,
                "minor_a": d.minor_a,
                "minor_b": d.minor_b,
                "port": d.port,
                "auth_key": d.auth_key,
                "status": "in sync, status ok" if in_sync else "syncing",
                "drbd_device": f"/dev/drbd{d.minor_a} ({DRBD_MAJOR}:{d.minor_a})",
            })
        for child, lv_names in zip(entry["children"], d.children):
            lv = store.lvs.get((inst.primary_node, lv_names.lv_name))
            if lv is not None:
                child["device"] = lv.device
        disks.append(entry)

    return {
        "name": inst.name,
        "uuid": inst.uuid,
        "serial": inst.serial,
        "ctime": clock.iso_ts(inst.ctime),
        "mtime": clock.iso_ts(inst.mtime),
        "state": f"configured to be {inst.admin_state}, actual state is {actual}",
        "primary_node": inst.primary_node,
        "secondary_nodes": list(inst.secondary_nodes),
        "group": "default",
        "group_uuid": cfg.group_uuid,
        "os": inst.os_spec,
        "network_port": inst.network_port,
        "hypervisor": "kvm",
        "console": {
            "host": inst.primary_node,
            "port": inst.network_port,
            "display": inst.display,
        },
        "hv_params": hv_params,
        "be_params": be_params,
        "nics": [n.to_doc() for n in inst.nics],
        "disk_template": inst.template,
        "disks": disks,
        "status": instance_status(engine, inst),
    }


def render_instance_info(info: dict) -> str:
    """gnt-style textual report for one instance."""
    out = [f"- Instance name: {info['name']}"]
    out.append(f"  UUID: {info['uuid']}")
    out.append(f"  Serial number: {info['serial']}")
    out.append(f"  Creation time: {info['ctime']}")
    out.append(f"  Modification time: {info['mtime']}")
    out.append(f"  State: {info['state']}")
    out.append("  Nodes:")
    out.append(f"    - primary: {info['primary_node']}")
    out.append(f"      group: {info['group']} (UUID {info['group_uuid']})")
    if info["secondary_nodes"]:
        secs = ", ".join(info["secondary_nodes"])
        out.append(
            f"    - secondaries: {secs} (group {info['group']}, group UUID {info['group_uuid']})"
        )
    out.append(f"  Operating system: {info['os']}")
    out.append("  Operating system parameters:")
    out.append(f"  Allocated network port: {info['network_port']}")
    out.append(f"  Hypervisor: {info['hypervisor']}")
    console = info["console"]
    out.append(
        f"  console connection: kvm to {console['host']}:{console['port']} "
        f"(display {console['display']})"
    )
    out.append("  Hypervisor parameters:")
    for hp in info["hv_params"]:
        out.append(f"    {_param_line(hp)}")
    out.append("  Back-end parameters:")
    for bp in info["be_params"]:
        out.append(f"    {_param_line(bp)}")
    out.append("  NICs:")
    for idx, nic in enumerate(info["nics"]):
        out.append(f"    - nic/{idx}:")
        out.append(f"      MAC: {nic['mac']}")
        out.append(f"      IP: {nic['ip']}")
        out.append(f"      mode: {nic['mode']}")
        out.append(f"      link: {nic['link']}")
        out.append("      vlan: ")
        out.append("      network: None")
        out.append(f"      UUID: {nic['uuid']}")
        out.append(f"      name: {nic['name']}")
    out.append(f"  Disk template: {info['disk_template']}")
    out.append("  Disks:")
    for d in info["disks"]:
        out.append(f"    - disk/{d['index']}: {d['template']}, size {fmt_size(d['size'])}")
        out.append(f"      access mode: {d['access']}")
        if d["template"] == TEMPLATE_DRBD:
            out.append(f"      nodeA: {d['node_a']}, minor={d['minor_a']}")
            out.append(f"      nodeB: {d['node_b']}, minor={d['minor_b']}")
            out.append(f"      port: {d['port']}")
            out.append(f"      auth key: {d['auth_key']}")
            out.append(f"      on primary: {d['drbd_device']} {d['status']}")
            out.append(f"      on secondary: {d['drbd_device']} {d['status']}")
        out.append("      name: None")
        out.append(f"      UUID: {d['uuid']}")
        if d["template"] == TEMPLATE_DRBD:
            out.append("      child devices:")
            for cidx, child in enumerate(d["children"]):
                out.append(f"        - child {cidx}: plain, size {fmt_size(child['size'])}")
                out.append(f"          logical_id: ganeti/{child['lv_name']}")
                if child.get("device"):
                    out.append(f"          on primary: {child['device']}")
                    out.append(f"          on secondary: {child['device']}")
                out.append("          name: None")
                out.append(f"          UUID: {child['uuid']}")
    return "\n".join(out)


def _param_line(entry: dict) -> str:
    if entry["default"]:
        return f"{entry['key']}: default ({entry['value']})"
    return f"{entry['key']}: {entry['value']}"


def instance_rows(engine: "Engine", fields: list[str] | None = None) -> tuple[list[str], list[list[str]]]:
    cfg = engine.require_cluster()
    fields = list(fields) if fields else list(LIST_FIELDS)
    for f in fields:
        if f not in LIST_FIELDS:
            raise UnknownEntityError("unknown-field", f"unknown output field {f!r}")
    rows = []
    for name in sorted(cfg.instances):
        inst = cfg.instances[name]
        values = {
            "name": inst.name,
            "primary_node": inst.primary_node,
            "secondary_nodes": ",".join(inst.secondary_nodes),
            "status": instance_status(engine, inst),
        }
        rows.append([values[f] for f in fields])
    return [LIST_HEADERS[f] for f in fields], rows


# ---------------------------------------------------------------------------
# NIC hot-modify

@register_op("instance_modify_nic")
def op_instance_modify_nic(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(p["name"])
    idx = int(p.get("nic_index", 0))
    if idx < 0 or idx >= len(inst.nics):
        raise UnknownEntityError("bad-nic-index", f"instance {inst.name} has no NIC {idx}")
    link = p.get("link")
    known_links = {cfg.master_netdev, cfg.default_nic_link}
    if link not in known_links:
        raise UnknownEntityError("unknown-link", f"unknown bridge {link!r}")

    ctx.info("Trying to hotplug device...")
    inst.nics[idx].link = link
    inst.serial += 1
    inst.mtime = engine.world.clock.now
    cfg.bump()
    engine.world.pending_probe_drops.add(inst.name)
    ctx.info("Hotplug done.")
    return {
        "name": inst.name,
        "modified": [
            [f"nic.link/{idx}", link],
            [f"nic.mode/{idx}", "bridged"],
            [f"nic.vlan/{idx}", ""],
            [f"nic/{idx}", "hotplug:done"],
        ],
        "notice": RESTART_NOTICE,
    }


# ---------------------------------------------------------------------------
# migrate

@register_op("instance_migrate")
def op_instance_migrate(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(p["name"])
    if inst.template != TEMPLATE_DRBD:
        raise PreconditionError("not-drbd", f"instance {inst.name} has no replicated disks")
    src = inst.primary_node
    dst = inst.secondary_nodes[0]
    for node in (src, dst):
        if not engine.node_online(node):
            raise PreconditionError("node-offline", f"node {node} is unreachable")
    if inst.admin_state != ADMIN_UP or engine.actual_state(inst.name) != ADMIN_UP:
        raise PreconditionError("instance-not-running", f"instance {inst.name} is not running")
    store = engine.world.storage

    ctx.message(f"Migrating instance {inst.name}")
    ctx.step("checking disk consistency between source and target")
    for d in inst.disks:
        if not store.get_pair(d.uuid).up_to_date():
            raise PreconditionError("disks-degraded", f"disk {d.uuid} is not fully synchronized")

    ctx.step(f"switching node {dst} to secondary mode")
    _set_disks(engine, ctx, inst, "secondary", node=dst)
    ctx.step("changing into standalone mode")
    _set_disks(engine, ctx, inst, "standalone")
    ctx.step("changing disks into dual-master mode")
    _set_disks(engine, ctx, inst, "connected")
    _set_disks(engine, ctx, inst, "dual_primary")
    ctx.step("wait until resync is done")

    ctx.step(f"preparing {dst} to accept the instance")
    ctx.step(f"migrating instance to {dst}")
    ctx.step("starting memory transfer")
    vm = engine.world.get_node(src).vms[inst.name]
    transfer = engine.world.transfer_memory(
        src, dst, vm.memory, engine.memory_rate, engine.memory_report_every
    )
    for percent in transfer:
        ctx.step(f"memory transfer progress: {percent:.2f} %", advance=0)
    ctx.step("memory transfer complete")

    # cutover: the VM continues on the target; one probe is lost in the swap
    boot_order, cdrom = vm.boot_order, vm.cdrom_path
    engine.world.remove_vm(src, inst.name)
    engine.world.vm_set_state(
        dst, inst.name, "running", boot_order=boot_order, cdrom_path=cdrom,
        console_port=inst.network_port, memory=inst.be_params["maxmem"],
    )
    engine.world.pending_probe_drops.add(inst.name)

    ctx.step(f"switching node {src} to secondary mode")
    _set_disks(engine, ctx, inst, "secondary", node=src)
    ctx.step("wait until resync is done")
    ctx.step("changing into standalone mode")
    _set_disks(engine, ctx, inst, "standalone")
    ctx.step("changing disks into single-master mode")
    _set_disks(engine, ctx, inst, "connected")
    _set_disks(engine, ctx, inst, "single_primary", node=dst)
    ctx.step("wait until resync is done")

    inst.primary_node, inst.secondary_nodes = dst, [src]
    inst.mtime = engine.world.clock.now
    cfg.bump()
    ctx.step("done")
    return {"name": inst.name, "primary_node": dst, "secondary_nodes": [src]}


def _set_disks(engine: "Engine", ctx: JobContext, inst: InstanceRecord,
               transition: str, node: str | None = None):
    for d in inst.disks:
        if d.template == TEMPLATE_DRBD:
            engine.world.storage.set_mode(
                d.uuid, transition, node=node,
                t=engine.world.clock.now, job_id=ctx.job.id,
            )


# ---------------------------------------------------------------------------
# failover

@register_op("instance_failover")
def op_instance_failover(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(p["name"])
    ignore_consistency = bool(p.get("ignore_consistency"))
    if inst.template != TEMPLATE_DRBD:
        raise PreconditionError("not-drbd", f"instance {inst.name} has no replicated disks")
    src = inst.primary_node
    dst = inst.secondary_nodes[0]
    if not engine.node_online(dst):
        raise PreconditionError("secondary-offline", f"target node {dst} is unreachable")
    src_ok = engine.node_online(src)
    store = engine.world.storage

    ctx.message(f"Failover instance {inst.name}")
    ctx.step("checking disk consistency between source and target")
    if not ignore_consistency:
        if not src_ok:
            raise PreconditionError(
                "consistency-required",
                f"cannot verify disk consistency, node {src} is unreachable; "
                "use --ignore-consistency to fail over anyway",
            )
        for d in inst.disks:
            if not store.get_pair(d.uuid).up_to_date():
                raise PreconditionError("disks-degraded", f"disk {d.uuid} is not fully synchronized")

    ctx.step("shutting down instance on source node")
    if src_ok:
        engine.world.vm_set_state(src, inst.name, "stopped")
    else:
        ctx.warning(
            f"Could not shutdown instance {inst.name} on node {src}, proceeding anyway; "
            f"please make sure node {src} is down; error details: {engine.no_route(src)}"
        )

    ctx.step("deactivating the instance's disks on source node")
    deactivate_disks(engine, ctx, inst, src)

    inst.primary_node, inst.secondary_nodes = dst, [src]
    inst.admin_state = ADMIN_UP
    inst.mtime = engine.world.clock.now
    cfg.bump()
    ctx.distribute()

    ctx.step(f"activating the instance's disks on target node {dst}")
    now = engine.world.clock.now
    for idx, d in enumerate(inst.disks):
        if d.template != TEMPLATE_DRBD:
            continue
        if src_ok:
            # both ends reachable: reattach the pair and promote the target
            store.set_conn(d.uuid, CONN_CONNECTED)
            store.set_mode(d.uuid, "single_primary", node=dst, t=now, job_id=ctx.job.id)
        else:
            # peer is dead: the surviving side is promoted while standalone
            ctx.warning(
                f"Could not prepare block device disk/{idx} on node {src} "
                f"(is_primary=False, pass=1): {engine.no_route(src)}"
            )
            store.force_role(d.uuid, dst, ROLE_PRIMARY, t=now, job_id=ctx.job.id)

    ctx.step(f"starting the instance on the target node {dst}")
    _boot_instance(engine, inst)
    if not src_ok:
        src_uuid = cfg.nodes[src].uuid
        ctx.warning(f"Communication failure to node {src_uuid}: {engine.no_route(src)}")
    return {"name": inst.name, "primary_node": dst, "secondary_nodes": [src]}


def deactivate_disks(engine: "Engine", ctx: JobContext, inst: InstanceRecord, node: str) -> int:
    """Demote and disconnect an instance's disk sides on one node.

    Unreachable nodes produce one warning per disk and never abort.
    """
    store = engine.world.storage
    reachable = engine.node_online(node)
    touched = 0
    for idx, d in enumerate(inst.disks):
        if d.template != TEMPLATE_DRBD or node not in d.nodes():
            continue
        store.force_role(d.uuid, node, ROLE_SECONDARY,
                         t=engine.world.clock.now, job_id=ctx.job.id)
        store.set_conn(d.uuid, CONN_STANDALONE)
        touched += 1
        if not reachable:
            ctx.warning(
                f"Could not shutdown block device disk/{idx} on node {node}: "
                f"{engine.no_route(node)}"
            )
    return touched


@register_op("instance_deactivate_disks")
def op_instance_deactivate_disks(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    inst = cfg.get_instance(p["name"])
    node = p.get("node") or inst.primary_node
    touched = deactivate_disks(engine, ctx, inst, node)
    if touched == 0:
        raise PreconditionError(
            "no-disks-on-node", f"instance {inst.name} has no replicated disks on {node}"
        )
    return {"name": inst.name, "node": node, "disks": touched}
