import pytest

from gantry.scenario import run_scenario_file
from gantry.testbed import WALKTHROUGH_SCENARIO, build_engine

INIT_PARAMS = {
    "cluster_name": "cluster.project.edu",
    "node": "node1.project.edu",
    "master_netdev": "br-man",
    "enabled_hypervisors": ["kvm"],
    "default_nic_link": "br-public",
    "vg_name": "ganeti",
}

NODE1 = "node1.project.edu"
NODE2 = "node2.project.edu"
NODE3 = "node3.project.edu"
TESTVM = "testvm.project.edu"


def submit_ok(engine, op, params=None):
    job = engine.submit(op, params or {})
    assert job.status == "success", f"{op} failed: {job.result}"
    return job


def init_cluster(engine, nodes=(NODE2, NODE3)):
    submit_ok(engine, "cluster_init", INIT_PARAMS)
    for name in nodes:
        submit_ok(engine, "node_add", {"name": name})
    return engine


@pytest.fixture
def engine(tmp_path):
    """Bare three-machine lab, no cluster yet."""
    return build_engine(state_dir=str(tmp_path / "state"))


@pytest.fixture
def cluster(tmp_path):
    """Initialized three-node cluster, no instances."""
    e = build_engine(state_dir=str(tmp_path / "state"))
    return init_cluster(e)


@pytest.fixture
def walkthrough(tmp_path):
    """The full bring-up: three nodes, cd variant, ISO, three instances."""
    e = build_engine(state_dir=str(tmp_path / "state"))
    run_scenario_file(e, WALKTHROUGH_SCENARIO)
    return e


def job_lines(job):
    """(level, text) pairs: the trace with timestamps normalized away."""
    return [(line.level, line.text) for line in job.log]
