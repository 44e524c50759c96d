"""HTTP+JSON wire API.

Versioned under /2.  Reads return current state; every POST submits one
numbered job (cluster verify submits its two) and answers with the job id.
Errors map to 400 (validation), 404 (unknown entity) and 409 (failed
precondition), body {"error": text}.  Submission is serialized under one
lock, so interleaved clients always see some sequential order.
"""

from __future__ import annotations

import json
import os
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import lifecycle, membership
from .engine import Engine
from .errors import GantryError
from .jobs import STATUS_SUCCESS

ADDR_ENV = "GANTRY_ADDR"
DEFAULT_ADDR = "127.0.0.1:5080"


def parse_addr(text: str | None = None) -> tuple[str, int]:
    raw = text or os.environ.get(ADDR_ENV, DEFAULT_ADDR)
    host, _, port = raw.rpartition(":")
    return host or "127.0.0.1", int(port)


class ApiServer:
    """Serves one engine; start() spins the listener thread."""

    def __init__(self, engine: Engine, addr: str | None = None):
        self.engine = engine
        self.lock = threading.RLock()
        host, port = parse_addr(addr)
        api = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # silence the default stderr chatter
                pass

            def do_GET(self):
                api.dispatch(self, "GET")

            def do_POST(self):
                api.dispatch(self, "POST")

        self.httpd = ThreadingHTTPServer((host, port), Handler)
        self.thread = threading.Thread(
            target=lambda: self.httpd.serve_forever(poll_interval=0.05), daemon=True
        )

    @property
    def address(self) -> str:
        host, port = self.httpd.server_address[:2]
        return f"{host}:{port}"

    def start(self):
        self.thread.start()
        return self

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()

    # -- request plumbing ---------------------------------------------------

    def dispatch(self, handler: BaseHTTPRequestHandler, method: str):
        path = handler.path.split("?")[0].rstrip("/")
        query = handler.path.partition("?")[2]
        body = {}
        if method == "POST":
            length = int(handler.headers.get("Content-Length") or 0)
            if length:
                try:
                    body = json.loads(handler.rfile.read(length))
                except json.JSONDecodeError:
                    return self._send(handler, 400, {"error": "request body is not valid JSON"})
        for pattern, verb, fn in ROUTES:
            if verb != method:
                continue
            m = pattern.match(path)
            if m:
                try:
                    with self.lock:
                        status, payload = fn(self.engine, body, query, *m.groups())
                except GantryError as err:
                    return self._send(handler, err.http_status, {"error": err.message, "code": err.code})
                return self._send(handler, status, payload)
        self._send(handler, 404, {"error": f"no route for {method} {path}"})

    @staticmethod
    def _send(handler: BaseHTTPRequestHandler, status: int, payload: dict):
        data = json.dumps(payload).encode("utf-8")
        handler.send_response(status)
        handler.send_header("Content-Type", "application/json")
        handler.send_header("Content-Length", str(len(data)))
        handler.send_header("Access-Control-Allow-Origin", "*")
        handler.end_headers()
        try:
            handler.wfile.write(data)
        except BrokenPipeError:
            pass


# ---------------------------------------------------------------------------
# route handlers


def _submit(engine: Engine, op: str, params: dict) -> tuple[int, dict]:
    job = engine.submit(op, params)
    if job.status != STATUS_SUCCESS:
        result = job.result or {}
        return result.get("http_status", 409), {
            "error": result.get("error", "job failed"),
            "code": result.get("code", ""),
            "job_id": job.id,
        }
    return 200, {"job_id": job.id, "result": job.result}


def get_info(engine, body, query):
    initialized = engine.cluster is not None
    doc = {"initialized": initialized, "now": engine.world.clock.now,
           "when": engine.world.clock.console_ts()}
    if initialized:
        cfg = engine.cluster
        doc.update({
            "cluster_name": cfg.cluster_name,
            "master_node": cfg.master_node,
            "config_serial": cfg.config_serial,
            "enabled_hypervisors": cfg.enabled_hypervisors,
            "default_nic_link": cfg.default_nic_link,
            "vg_name": cfg.vg_name,
        })
    return 200, doc


def get_nodes(engine, body, query):
    return 200, {"nodes": membership.node_list(engine)}


def get_instances(engine, body, query):
    fields = None
    if query.startswith("fields="):
        fields = [f for f in query[len("fields="):].split(",") if f]
    headers, rows = lifecycle.instance_rows(engine, fields)
    cfg = engine.require_cluster()
    detailed = []
    for name in sorted(cfg.instances):
        inst = cfg.instances[name]
        detailed.append({
            "name": inst.name,
            "primary_node": inst.primary_node,
            "secondary_nodes": list(inst.secondary_nodes),
            "status": lifecycle.instance_status(engine, inst),
            "admin_state": inst.admin_state,
            "actual_state": engine.actual_state(inst.name),
            "os": inst.os_spec,
            "disk_template": inst.template,
            "network_port": inst.network_port,
            "console": f"{inst.primary_node}:{inst.network_port}",
            "display": inst.display,
        })
    return 200, {"headers": headers, "rows": rows, "instances": detailed}


def get_instance(engine, body, query, name):
    info = lifecycle.instance_info(engine, name)
    info["text"] = lifecycle.render_instance_info(info)
    return 200, info


def post_instance_add(engine, body, query):
    return _submit(engine, "instance_add", body)


def post_instance_action(engine, body, query, name, action):
    ops = {
        "startup": "instance_start",
        "shutdown": "instance_shutdown",
        "migrate": "instance_migrate",
        "failover": "instance_failover",
        "modify": "instance_modify_nic",
        "deactivate-disks": "instance_deactivate_disks",
    }
    if action not in ops:
        return 404, {"error": f"unknown instance action {action!r}"}
    params = dict(body)
    params["name"] = name
    return _submit(engine, ops[action], params)


def get_os(engine, body, query):
    return 200, {"names": membership.os_list(engine)}


def post_cluster_init(engine, body, query):
    return _submit(engine, "cluster_init", body)


def post_cluster_modify(engine, body, query):
    return _submit(engine, "cluster_modify_hvparams", body)


def post_cluster_copyfile(engine, body, query):
    return _submit(engine, "cluster_copyfile", body)


def post_cluster_verify(engine, body, query):
    job_a, job_b = membership.cluster_verify(engine)
    findings = (job_a.result or {}).get("findings", []) + (job_b.result or {}).get("findings", [])
    return 200, {"job_ids": [job_a.id, job_b.id], "job_id": job_a.id, "findings": findings}


def post_node_add(engine, body, query):
    return _submit(engine, "node_add", body)


def get_jobs(engine, body, query):
    return 200, {"jobs": [j.to_doc(include_log=False) for j in engine.queue.all()]}


def get_job(engine, body, query, job_id):
    return 200, engine.queue.get(int(job_id)).to_doc()


def get_job_wait(engine, body, query, job_id):
    # jobs execute inline, so a queued/running job is never observable here
    return 200, engine.wait_job(int(job_id)).to_doc()


def post_sim_power(engine, body, query):
    return _submit(engine, "set_node_power", body)


def post_sim_advance_clock(engine, body, query):
    return _submit(engine, "advance_clock", body)


def post_sim_probe(engine, body, query):
    return _submit(engine, "probe", body)


ROUTES = [
    (re.compile(r"^/2/info$"), "GET", get_info),
    (re.compile(r"^/2/nodes$"), "GET", get_nodes),
    (re.compile(r"^/2/nodes$"), "POST", post_node_add),
    (re.compile(r"^/2/instances$"), "GET", get_instances),
    (re.compile(r"^/2/instances$"), "POST", post_instance_add),
    (re.compile(r"^/2/instances/([^/]+)$"), "GET", get_instance),
    (re.compile(r"^/2/instances/([^/]+)/([a-z-]+)$"), "POST", post_instance_action),
    (re.compile(r"^/2/os$"), "GET", get_os),
    (re.compile(r"^/2/cluster/init$"), "POST", post_cluster_init),
    (re.compile(r"^/2/cluster/modify$"), "POST", post_cluster_modify),
    (re.compile(r"^/2/cluster/copyfile$"), "POST", post_cluster_copyfile),
    (re.compile(r"^/2/cluster/verify$"), "POST", post_cluster_verify),
    (re.compile(r"^/2/jobs$"), "GET", get_jobs),
    (re.compile(r"^/2/jobs/(\d+)$"), "GET", get_job),
    (re.compile(r"^/2/jobs/(\d+)/wait$"), "GET", get_job_wait),
    (re.compile(r"^/2/sim/power$"), "POST", post_sim_power),
    (re.compile(r"^/2/sim/advance-clock$"), "POST", post_sim_advance_clock),
    (re.compile(r"^/2/sim/probe$"), "POST", post_sim_probe),
]
