"""Cluster bootstrap, node admission, verification and catalog distribution.

The OS catalog is derived from files on the nodes: every provider ships a
"default" variant, and extra variants exist when both the variants manifest
(one name per line) and the variant's KEY="value" config file are present
on every member node.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from . import allocator
from .engine import register_op
from .errors import PreconditionError, UnknownEntityError, ValidationError
from .jobs import JobContext
from .model import (
    ADMIN_UP,
    ROLE_CANDIDATE,
    ROLE_MASTER,
    ClusterConfig,
    NodeRecord,
)
from .simnode import VARIANT_CONF_DIR, VARIANTS_LIST_PATH

if TYPE_CHECKING:
    from .engine import Engine

OS_PROVIDERS = ("debootstrap", "image")

NODE_ADD_BANNER = (
    "-- WARNING --\n"
    "Performing this operation is going to replace the ssh daemon keypair\n"
    "on the target machine ({name}) with the ones of the current one\n"
    "and grant full intra-cluster ssh root access to/from it\n"
)


# ---------------------------------------------------------------------------
# bootstrap

@register_op("cluster_init")
def op_cluster_init(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    if engine.cluster is not None:
        raise PreconditionError("already-initialized", "the cluster is already initialized")
    cluster_name = p["cluster_name"]
    node_name = p.get("node") or engine.local_node
    vg_name = p.get("vg_name", "ganeti")
    if cluster_name not in engine.world.hosts:
        raise ValidationError("name-unresolvable", f"cluster name {cluster_name} does not resolve")
    if node_name not in engine.world.hosts:
        raise ValidationError("name-unresolvable", f"node name {node_name} does not resolve")
    sim = engine.world.get_node(node_name)
    vg = engine.world.storage.vgs.get((node_name, vg_name))
    if vg is None:
        raise PreconditionError("vg-missing", f"no volume group {vg_name} on node {node_name}")

    cfg = ClusterConfig(
        cluster_name=cluster_name,
        master_node=node_name,
        master_netdev=p.get("master_netdev", "br-man"),
        enabled_hypervisors=list(p.get("enabled_hypervisors", ["kvm"])),
        default_nic_link=p.get("default_nic_link", "br-public"),
        vg_name=vg_name,
        hosts=dict(engine.world.hosts),
        rng_seed=engine.seed,
    )
    cfg.group_uuid = cfg.generate_identity("uuid")
    cfg.nodes[node_name] = NodeRecord(
        name=node_name,
        uuid=cfg.generate_identity("uuid"),
        mgmt_ip=cfg.hosts[node_name],
        role=ROLE_MASTER,
        vg_total=vg.total,
        mtotal=sim.mtotal,
        mnode=sim.mnode,
    )
    sim.credentials = f"cluster:{cfg.generate_identity('token')}"
    engine.cluster = cfg
    engine.local_node = node_name
    return {"cluster": cluster_name, "master": node_name}


@register_op("cluster_modify_hvparams")
def op_cluster_modify_hvparams(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    spec = p["spec"]
    if ":" not in spec:
        raise ValidationError("parse-error", f"expected 'hypervisor:key=value,...', got {spec!r}")
    hv, _, body = spec.partition(":")
    if hv not in cfg.enabled_hypervisors:
        raise UnknownEntityError("unknown-hypervisor", f"hypervisor {hv} is not enabled")
    changes = {}
    for item in body.split(","):
        if "=" not in item:
            raise ValidationError("parse-error", f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        changes[key.strip()] = value.strip()
    params = cfg.hypervisor_params.setdefault(hv, {})
    for key, value in changes.items():
        if value == "":
            params.pop(key, None)  # empty value clears back to the built-in default
        else:
            params[key] = value
    cfg.bump()
    return {"hypervisor": hv, "changed": sorted(changes)}


# ---------------------------------------------------------------------------
# node admission

@register_op("node_add")
def op_node_add(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    caller = p.get("on_node") or engine.local_node
    if caller != cfg.master_node:
        raise PreconditionError("not-master", f"node {caller} is not the master")
    name = p["name"]
    if name in cfg.nodes:
        raise PreconditionError("duplicate-node", f"node {name} is already a cluster member")
    if name not in cfg.hosts:
        raise ValidationError("name-unresolvable", f"node name {name} does not resolve")
    if not engine.node_online(name):
        raise PreconditionError("unreachable-node", f"node {name} is unreachable")
    sim = engine.world.get_node(name)
    vg = engine.world.storage.vgs.get((name, cfg.vg_name))
    if vg is None:
        raise PreconditionError("vg-missing", f"no volume group {cfg.vg_name} on node {name}")

    # credential rotation: the target now carries the cluster keypair
    master_sim = engine.world.get_node(cfg.master_node)
    sim.credentials = master_sim.credentials
    cfg.nodes[name] = NodeRecord(
        name=name,
        uuid=cfg.generate_identity("uuid"),
        mgmt_ip=cfg.hosts[name],
        role=ROLE_CANDIDATE,
        vg_total=vg.total,
        mtotal=sim.mtotal,
        mnode=sim.mnode,
    )
    cfg.bump()
    ctx.info("Node will be a master candidate")
    return {"name": name, "role": ROLE_CANDIDATE}


def node_add_banner(name: str) -> str:
    return NODE_ADD_BANNER.format(name=name)


def node_list(engine: "Engine") -> list[dict]:
    cfg = engine.require_cluster()
    rows = []
    for row in allocator.capacity_rows(cfg, engine.world.storage):
        node = cfg.nodes[row.node]
        flagged = node.offline or not engine.node_online(row.node)
        rows.append({
            "name": row.node + (" *" if flagged else ""),
            "node": row.node,
            "offline": flagged,
            "power": engine.world.nodes[row.node].power if row.node in engine.world.nodes else "off",
            "role": node.role,
            "dtotal": row.dtotal,
            "dfree": row.dfree,
            "mtotal": row.mtotal,
            "mnode": row.mnode,
            "mfree": row.mfree,
            "pinst": row.pinst,
            "sinst": row.sinst,
        })
    return rows


# ---------------------------------------------------------------------------
# master failover

@register_op("master_failover")
def op_master_failover(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    caller = p.get("on_node") or engine.local_node
    old_master = cfg.master_node
    if engine.node_online(old_master):
        raise PreconditionError("master-still-alive", f"master {old_master} is still reachable")
    node = cfg.get_node(caller)
    if node.role != ROLE_CANDIDATE:
        raise PreconditionError("not-a-candidate", f"node {caller} is not a master candidate")
    newest = max(
        (engine.world.nodes[n.name].received_serial for n in cfg.candidates()
         if n.name in engine.world.nodes),
        default=0,
    )
    if engine.world.get_node(caller).received_serial < newest:
        raise PreconditionError(
            "stale-config", f"node {caller} does not hold the latest config (serial {newest})"
        )
    cfg.nodes[old_master].role = ROLE_CANDIDATE
    cfg.nodes[old_master].offline = True
    node.role = ROLE_MASTER
    cfg.master_node = caller
    engine.local_node = caller
    cfg.bump()
    return {"master": caller, "demoted": old_master}


# ---------------------------------------------------------------------------
# file and OS catalog distribution

@register_op("cluster_copyfile")
def op_cluster_copyfile(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    path = p["path"]
    master_sim = engine.world.get_node(cfg.master_node)
    if path not in master_sim.file_catalog:
        raise PreconditionError("file-missing-on-master", f"file {path} does not exist on the master")
    content = master_sim.file_catalog[path]
    results = []
    for name in sorted(cfg.nodes):
        if name == cfg.master_node:
            continue
        if engine.node_online(name):
            engine.world.get_node(name).file_catalog[path] = content
            results.append((name, True))
        else:
            ctx.warning(f"Copy of file {path} to node {name} failed: {engine.no_route(name)}")
            results.append((name, False))
    return {"path": path, "copies": [{"node": n, "ok": ok} for n, ok in results]}


@register_op("install_os_variant")
def op_install_os_variant(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    """Write a variant config + updated manifest onto the master node.

    Mirrors the files under the state directory; distribution to the other
    nodes still happens through copyfile, exactly like any other file.
    """
    cfg = engine.require_cluster()
    provider = p.get("provider", "image")
    if provider != "image":
        raise ValidationError("bad-provider", f"provider {provider} does not take file variants")
    variant = p["variant"]
    conf = p.get("config") or {}
    master_sim = engine.world.get_node(cfg.master_node)

    conf_path = f"{VARIANT_CONF_DIR}/{variant}.conf"
    conf_text = "".join(f'{k}="{v}"\n' for k, v in conf.items())
    manifest = master_sim.file_catalog.get(VARIANTS_LIST_PATH, "default\n")
    names = [line.strip() for line in manifest.splitlines() if line.strip()]
    if variant not in names:
        names.append(variant)
    manifest_text = "".join(f"{n}\n" for n in names)

    master_sim.file_catalog[conf_path] = conf_text
    master_sim.file_catalog[VARIANTS_LIST_PATH] = manifest_text

    mirror = engine.state_dir / "instance-image"
    (mirror / "variants").mkdir(parents=True, exist_ok=True)
    (mirror / "variants" / f"{variant}.conf").write_text(conf_text)
    (mirror / "variants.list").write_text(manifest_text)
    return {"provider": provider, "variant": variant, "paths": [conf_path, VARIANTS_LIST_PATH]}


def os_list(engine: "Engine") -> list[str]:
    """OS names installable everywhere: provider+variant with all files present."""
    cfg = engine.require_cluster()
    names = {"debootstrap+default"}
    common: set | None = None
    for node_name in cfg.nodes:
        sim = engine.world.nodes.get(node_name)
        variants = set()
        if sim is not None:
            manifest = sim.file_catalog.get(VARIANTS_LIST_PATH, "")
            for line in manifest.splitlines():
                v = line.strip()
                if not v:
                    continue
                if v == "default" or f"{VARIANT_CONF_DIR}/{v}.conf" in sim.file_catalog:
                    variants.add(v)
        common = variants if common is None else common & variants
    for v in sorted(common or set()):
        names.add(f"image+{v}")
    return sorted(names)


# ---------------------------------------------------------------------------
# verification

def cluster_verify(engine: "Engine"):
    """Submit the two verification jobs (cluster scope, then group scope)."""
    engine.require_cluster()
    job_a = engine.submit("verify_cluster", {})
    job_b = engine.submit("verify_group", {})
    return job_a, job_b


@register_op("verify_cluster")
def op_verify_cluster(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    findings = []
    ctx.step("Verifying cluster config", advance=0)
    masters = [n for n in cfg.nodes.values() if n.role == ROLE_MASTER]
    if len(masters) != 1 or cfg.master_node not in cfg.nodes:
        findings.append(f"cluster config: expected exactly one master, found {len(masters)}")
    ctx.step("Verifying cluster certificate files", advance=0)
    if not cfg.has_certificates:
        findings.append("cluster certificate files are missing")
    ctx.step("Verifying hypervisor parameters", advance=0)
    for hv, params in cfg.hypervisor_params.items():
        if hv not in cfg.enabled_hypervisors:
            findings.append(f"hypervisor {hv} has parameters but is not enabled")
        for k, v in params.items():
            if not isinstance(v, str):
                findings.append(f"hypervisor {hv}: parameter {k} is not a string")
    ctx.step("Verifying all nodes belong to an existing group", advance=0)
    for line in findings:
        ctx.warning(line)
    return {"findings": findings}


@register_op("verify_group")
def op_verify_group(engine: "Engine", ctx: JobContext, p: dict) -> dict:
    cfg = engine.require_cluster()
    store = engine.world.storage
    findings = []
    n_nodes = len(cfg.nodes)
    ctx.step("Verifying group 'default'", advance=0)
    ctx.step(f"Gathering data ({n_nodes} nodes)", advance=0)
    ctx.step(f"Gathering disk information ({n_nodes} nodes)", advance=1)

    ctx.step("Verifying configuration file consistency", advance=0)
    for node in cfg.candidates():
        if not engine.node_online(node.name):
            continue  # reported under node status
        got = engine.world.get_node(node.name).received_serial
        if got != cfg.config_serial:
            findings.append(
                f"node {node.name}: config file out of date (serial {got} != {cfg.config_serial})"
            )

    ctx.step("Verifying node status", advance=0)
    for name in sorted(cfg.nodes):
        if not engine.node_online(name):
            findings.append(f"node {name}: node is unreachable")

    ctx.step("Verifying instance status", advance=0)
    for name in sorted(cfg.instances):
        inst = cfg.instances[name]
        actual = engine.actual_state(name)
        if inst.admin_state == ADMIN_UP and actual != ADMIN_UP:
            findings.append(f"instance {name}: instance is configured to be up but is not running")
        if inst.admin_state != ADMIN_UP and actual == ADMIN_UP:
            findings.append(f"instance {name}: instance should not be running")

    ctx.step("Verifying orphan volumes", advance=0)
    referenced = {c.lv_name for i in cfg.instances.values() for d in i.disks for c in d.children}
    for node, vg, lv_name in store.orphan_volumes(referenced):
        findings.append(f"node {node}: volume {vg}/{lv_name} is unknown")

    ctx.step("Verifying N+1 Memory redundancy", advance=0)
    for node, overflow in allocator.check_n_plus_one(cfg, store):
        findings.append(
            f"node {node}: not enough memory to accommodate instance failovers "
            f"should node {node} fail ({overflow} MiB needed)"
        )

    ctx.step("Other Notes", advance=0)
    ctx.step("Hooks Results", advance=0)
    for line in findings:
        ctx.warning(line)
    return {"findings": findings}
