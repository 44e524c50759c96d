import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gantry.allocator import capacity_row, capacity_rows, check_n_plus_one, select_nodes
from gantry.errors import PreconditionError
from gantry.model import ClusterConfig, DiskChild, DiskSpec, InstanceRecord, NicSpec, NodeRecord
from gantry.storage import StorageState

from conftest import NODE1, NODE2, NODE3, TESTVM, submit_ok


# -- record builders (no engine, pure config) ---------------------------------

def bare_config(node_specs):
    """node_specs: list of (name, mtotal, mnode)."""
    cfg = ClusterConfig(
        cluster_name="c.lab", master_node=node_specs[0][0], master_netdev="br-man",
        enabled_hypervisors=["kvm"], default_nic_link="br-public", vg_name="ganeti",
        hosts={}, rng_seed=0,
    )
    for i, (name, mtotal, mnode) in enumerate(node_specs):
        cfg.nodes[name] = NodeRecord(
            name=name, uuid=f"node-{i}", mgmt_ip=f"10.0.0.{i}",
            role="master" if i == 0 else "master_candidate",
            vg_total=141179, mtotal=mtotal, mnode=mnode,
        )
    return cfg


def put_instance(cfg, name, primary, secondary=None, maxmem=512, admin_state="up",
                 template=None):
    template = template or ("drbd" if secondary else "plain")
    disk = DiskSpec(
        uuid=f"disk-{name}", template=template, size=128, node_a=primary,
        content_hash="0" * 40, node_b=secondary,
        children=[DiskChild("data", f"disk-{name}.disk_data", 128, f"c-{name}")],
    )
    cfg.instances[name] = InstanceRecord(
        name=name, uuid=f"uuid-{name}", serial=1, ctime=0.0, mtime=0.0,
        admin_state=admin_state, primary_node=primary,
        secondary_nodes=[secondary] if secondary else [],
        os_spec="image+default", hv_overrides={}, be_params={
            "minmem": maxmem // 2, "maxmem": maxmem, "vcpus": 1,
            "auto_balance": True, "spindle_use": 1,
        },
        be_set=("maxmem", "minmem"), nics=[NicSpec(mac=f"aa:00:00:00:00:{len(cfg.instances):02x}",
        link="br-public", uuid=f"nic-{name}")], disks=[disk], network_port=11000,
    )
    return cfg.instances[name]


# -- capacity rows ---------------------------------------------------------------

def test_row_for_fresh_node():
    cfg = bare_config([("n1", 2458, 246)])
    row = capacity_row(cfg, StorageState(), "n1")
    assert row.dtotal == row.dfree == 141179
    assert row.pinst == row.sinst == 0


def test_mfree_definition():
    cfg = bare_config([("n1", 2048, 94)])
    row = capacity_row(cfg, StorageState(), "n1")
    assert row.mfree == 1954


def test_running_primaries_consume_maxmem_stopped_do_not():
    cfg = bare_config([("n1", 2048, 94), ("n2", 2048, 94)])
    put_instance(cfg, "vm1", "n1", "n2", maxmem=512)
    put_instance(cfg, "vm2", "n1", "n2", maxmem=512, admin_state="down")
    row = capacity_row(cfg, StorageState(), "n1")
    assert row.mfree == 1954 - 512
    assert row.pinst == 2
    assert capacity_row(cfg, StorageState(), "n2").sinst == 2


def test_walkthrough_placement_counts(walkthrough):
    rows = {r.node: r for r in capacity_rows(walkthrough.cluster, walkthrough.world.storage)}
    assert rows[NODE2].pinst == 1  # testvm
    assert rows[NODE1].pinst == 1  # second
    assert rows[NODE1].sinst == 1  # testvm's secondary
    assert rows[NODE3].pinst == 1  # firstvm


# -- placement policy --------------------------------------------------------------

def fresh_paper_nodes():
    return bare_config([("node1.lab", 2458, 246), ("node2.lab", 2048, 94)])


def test_policy_prefers_most_free_memory():
    cfg = fresh_paper_nodes()
    primary, secondary = select_nodes(cfg, StorageState(), set(cfg.nodes), "drbd", 4096, 512)
    assert (primary, secondary) == ("node1.lab", "node2.lab")


def test_policy_tie_breaks_by_name():
    cfg = bare_config([("nb", 2048, 94), ("na", 2048, 94)])
    primary, secondary = select_nodes(cfg, StorageState(), set(cfg.nodes), "drbd", 4096, 512)
    assert (primary, secondary) == ("na", "nb")


def test_override_pins_primary():
    cfg = fresh_paper_nodes()
    primary, secondary = select_nodes(
        cfg, StorageState(), set(cfg.nodes), "plain", 4096, 512, override="node2.lab"
    )
    assert primary == "node2.lab"
    assert secondary is None


def test_no_feasible_placement_names_memory_constraint():
    cfg = fresh_paper_nodes()
    with pytest.raises(PreconditionError) as err:
        select_nodes(cfg, StorageState(), set(cfg.nodes), "plain", 128, 10**6)
    assert err.value.code == "no-feasible-placement"
    assert "memory" in err.value.message


def test_offline_nodes_are_not_candidates():
    cfg = fresh_paper_nodes()
    with pytest.raises(PreconditionError):
        select_nodes(cfg, StorageState(), {"node2.lab"}, "drbd", 4096, 512)


def test_placement_ignores_insertion_order():
    specs = [("nd", 2048, 94), ("na", 2400, 200), ("nc", 2048, 94), ("nb", 2458, 246)]
    baseline = None
    for rotation in range(4):
        rotated = specs[rotation:] + specs[:rotation]
        cfg = bare_config(rotated)
        choice = select_nodes(cfg, StorageState(), set(cfg.nodes), "drbd", 4096, 512)
        baseline = baseline or choice
        assert choice == baseline


# -- N+1 redundancy ------------------------------------------------------------------

def n_plus_one_oracle(cfg):
    """Brute force: fail each node, restart its replicated primaries one by
    one on their secondaries, summing whatever does not fit."""
    mfree = {}
    for name, node in cfg.nodes.items():
        used = sum(
            i.be_params["maxmem"] for i in cfg.instances.values()
            if i.admin_state == "up" and i.primary_node == name
        )
        mfree[name] = node.mtotal - node.mnode - used
    violations = []
    for failed in sorted(cfg.nodes):
        budget = dict(mfree)
        charged = set()
        for iname in sorted(cfg.instances):
            inst = cfg.instances[iname]
            if (
                inst.admin_state == "up"
                and inst.disks[0].template == "drbd"
                and inst.primary_node == failed
                and inst.secondary_nodes
            ):
                budget[inst.secondary_nodes[0]] -= inst.be_params["maxmem"]
                charged.add(inst.secondary_nodes[0])
        overflow = sum(max(0, -budget[s]) for s in charged)
        if overflow > 0:
            violations.append((failed, overflow))
    return violations


def test_empty_cluster_passes():
    cfg = bare_config([("n1", 2048, 94), ("n2", 2048, 94)])
    assert check_n_plus_one(cfg, StorageState()) == []


def test_overloaded_secondary_reports_overflow():
    # B can hold 600 MiB; two 512 MiB instances would need 1024
    cfg = bare_config([("a", 2048, 94), ("b", 600 + 94, 94)])
    put_instance(cfg, "vm1", "a", "b", maxmem=512)
    put_instance(cfg, "vm2", "a", "b", maxmem=512)
    assert check_n_plus_one(cfg, StorageState()) == [("a", 424)]


def test_walkthrough_end_state_passes(walkthrough):
    assert check_n_plus_one(walkthrough.cluster, walkthrough.world.storage) == []


def random_cluster(rng):
    n_nodes = rng.randint(2, 4)
    specs = [(f"n{i}", rng.randint(512, 4096), rng.randint(32, 256)) for i in range(n_nodes)]
    cfg = bare_config(specs)
    names = [s[0] for s in specs]
    for i in range(rng.randint(0, 6)):
        primary = rng.choice(names)
        drbd = rng.random() < 0.8
        secondary = None
        if drbd:
            secondary = rng.choice([n for n in names if n != primary])
        put_instance(
            cfg, f"vm{i}", primary, secondary,
            maxmem=rng.choice([64, 128, 256, 512, 1024]),
            admin_state=rng.choice(["up", "up", "down"]),
        )
    return cfg


@pytest.mark.parametrize("seed", range(25))
def test_check_agrees_with_oracle_on_random_clusters(seed):
    cfg = random_cluster(random.Random(seed))
    assert check_n_plus_one(cfg, StorageState()) == n_plus_one_oracle(cfg)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_check_agrees_with_oracle_property(seed):
    cfg = random_cluster(random.Random(seed))
    assert check_n_plus_one(cfg, StorageState()) == n_plus_one_oracle(cfg)


def test_rows_rederived_from_scratch_match_after_ops(walkthrough):
    submit_ok(walkthrough, "instance_shutdown", {"name": TESTVM})
    submit_ok(walkthrough, "instance_start", {"name": TESTVM})
    rows = capacity_rows(walkthrough.cluster, walkthrough.world.storage)
    for row in rows:
        again = capacity_row(walkthrough.cluster, walkthrough.world.storage, row.node)
        assert again == row
