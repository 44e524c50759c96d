import pytest

from conftest import NODE1, NODE2, TESTVM
from gantry.api import ApiServer
from gantry.client import ApiClient, ApiError


@pytest.fixture
def served(walkthrough):
    server = ApiServer(walkthrough, addr="127.0.0.1:0").start()
    try:
        yield ApiClient(server.address), walkthrough
    finally:
        server.stop()


def test_info_reports_cluster_identity(served):
    client, engine = served
    doc = client.get("/2/info")
    assert doc["initialized"] is True
    assert doc["cluster_name"] == "cluster.project.edu"
    assert doc["master_node"] == NODE1


def test_nodes_listing(served):
    client, _ = served
    nodes = client.get("/2/nodes")["nodes"]
    assert [n["node"] for n in nodes] == sorted(n["node"] for n in nodes)
    assert {"dtotal", "dfree", "mtotal", "mnode", "mfree", "pinst", "sinst"} <= set(nodes[0])


def test_instances_listing_and_field_selection(served):
    client, _ = served
    doc = client.get("/2/instances")
    assert doc["headers"] == ["Instance", "Primary_node", "Secondary_Nodes", "Status"]
    assert len(doc["rows"]) == 3
    only_names = client.get("/2/instances?fields=name")
    assert only_names["rows"] == [["firstvm"], ["second"], [TESTVM]]


def test_instance_detail_includes_rendered_text(served):
    client, _ = served
    doc = client.get(f"/2/instances/{TESTVM}")
    assert doc["network_port"] == 11003
    assert doc["text"].startswith(f"- Instance name: {TESTVM}")


def test_get_unknown_instance_is_404(served):
    client, _ = served
    with pytest.raises(ApiError) as err:
        client.get("/2/instances/ghost.lab")
    assert err.value.http_status == 404


def test_post_returns_job_id_and_log_is_retrievable(served):
    client, _ = served
    resp = client.post(f"/2/instances/{TESTVM}/migrate", {})
    job = client.wait_job(resp["job_id"])
    assert job["status"] == "success"
    texts = [line["text"] for line in job["log"]]
    assert texts[0] == f"Migrating instance {TESTVM}"
    assert texts[-1] == "done"


def test_post_add_with_bad_memory_is_400(served):
    client, _ = served
    with pytest.raises(ApiError) as err:
        client.post("/2/instances", {
            "name": "bad.lab", "template": "plain", "os": "image+cd",
            "size_mib": 1024, "be": {"minmem": 1024, "maxmem": 512},
            "node": NODE2, "no_name_check": True,
        })
    assert err.value.http_status == 400


def test_post_migrate_plain_instance_is_409(served):
    client, _ = served
    with pytest.raises(ApiError) as err:
        client.post("/2/instances/firstvm/migrate", {})
    assert err.value.http_status == 409
    assert err.value.payload["code"] == "not-drbd"


def test_verify_returns_both_job_ids(served):
    client, _ = served
    resp = client.post("/2/cluster/verify", {})
    a, b = resp["job_ids"]
    assert b == a + 1
    assert resp["findings"] == []
    assert client.get(f"/2/jobs/{a}")["status"] == "success"


def test_jobs_listing_matches_queue(served):
    client, engine = served
    jobs = client.get("/2/jobs")["jobs"]
    assert [j["id"] for j in jobs] == [j.id for j in engine.queue.all()]


def test_unknown_job_is_404(served):
    client, _ = served
    with pytest.raises(ApiError) as err:
        client.get("/2/jobs/9999")
    assert err.value.http_status == 404


def test_os_endpoint(served):
    client, _ = served
    assert client.get("/2/os")["names"] == [
        "debootstrap+default", "image+cd", "image+default",
    ]


def test_sim_endpoints_power_probe_clock(served):
    client, _ = served
    before = client.get("/2/info")["now"]
    client.post("/2/sim/advance-clock", {"dt": 30})
    assert client.get("/2/info")["now"] == before + 30

    probe = client.post("/2/sim/probe", {"network": "public", "instance": TESTVM})
    assert client.wait_job(probe["job_id"])["result"]["result"] == "reply"

    client.post("/2/sim/power", {"node": NODE2, "power": "off"})
    probe = client.post("/2/sim/probe", {"network": "public", "instance": TESTVM})
    assert client.wait_job(probe["job_id"])["result"]["result"] == "timeout"


def test_unknown_route_is_404(served):
    client, _ = served
    with pytest.raises(ApiError) as err:
        client.get("/2/frobnicate")
    assert err.value.http_status == 404


def test_init_endpoint_on_fresh_daemon(engine):
    server = ApiServer(engine, addr="127.0.0.1:0").start()
    try:
        client = ApiClient(server.address)
        assert client.get("/2/info")["initialized"] is False
        client.post("/2/cluster/init", {
            "cluster_name": "cluster.project.edu", "node": NODE1,
            "master_netdev": "br-man", "enabled_hypervisors": ["kvm"],
            "default_nic_link": "br-public", "vg_name": "ganeti",
        })
        assert client.get("/2/info")["initialized"] is True
        client.post("/2/nodes", {"name": NODE2})
        assert len(client.get("/2/nodes")["nodes"]) == 2
    finally:
        server.stop()


def test_daemon_unreachable_error():
    from gantry.errors import DaemonUnreachable

    client = ApiClient("127.0.0.1:1")  # nothing listens there
    with pytest.raises(DaemonUnreachable):
        client.get("/2/info")
