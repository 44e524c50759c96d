"""The management engine: one lab world, at most one cluster, one job queue.

All mutations run inside jobs, serialized in submission order (single
writer).  Reads are plain function calls over the current state.  The
engine also owns config distribution: after any mutating job the snapshot
is pushed to the master and all master candidates unless the op already
distributed at a specific point in its sequence.
"""

from __future__ import annotations

import os
from pathlib import Path

from .errors import GantryError, PreconditionError, UnknownEntityError
from .jobs import STATUS_ERROR, STATUS_RUNNING, STATUS_SUCCESS, Job, JobContext, JobQueue
from .model import ADMIN_UP, ClusterConfig
from .simnode import SimWorld

STATE_DIR_ENV = "CLUSTER_STATE_DIR"
DEFAULT_STATE_DIR = "./state"
CONFIG_FILE_NAME = "config.data"
CONFIG_FILE_PATH = "/var/lib/ganeti/config.data"


class Engine:
    def __init__(self, world: SimWorld, seed: int = 0, state_dir: str | None = None,
                 local_node: str | None = None):
        self.world = world
        self.seed = seed
        self.cluster: ClusterConfig | None = None
        self.queue = JobQueue()
        self.local_node = local_node or (sorted(world.nodes)[0] if world.nodes else "")
        self.state_dir = Path(state_dir or os.environ.get(STATE_DIR_ENV, DEFAULT_STATE_DIR))
        self._executing = False
        self._distributed_serial = 0
        # Simulation pacing knobs; the defaults reproduce the reference traces.
        self.sync_report_interval = 60.0
        self.sync_initial_delay = 1.0
        self.sync_rate = 11.5  # MiB/s disk replication
        self.memory_rate = 11.0  # MiB/s live-migration memory transfer
        self.memory_report_every = 10.0

    # -- job execution ------------------------------------------------------

    def submit(self, op: str, params: dict | None = None) -> Job:
        """Queue and immediately execute one operation as a numbered job."""
        handler = OPS.get(op)
        if handler is None:
            raise UnknownEntityError("unknown-op", f"unknown operation {op!r}")
        if self._executing:
            raise PreconditionError("nested-job", "a job is already executing")
        job = self.queue.create(op, params or {}, self.world.clock.now)
        ctx = JobContext(self, job)
        job.status = STATUS_RUNNING
        self._executing = True
        try:
            result = handler(self, ctx, job.params)
        except GantryError as err:
            job.status = STATUS_ERROR
            job.result = {"error": err.message, "code": err.code, "http_status": err.http_status}
        else:
            job.status = STATUS_SUCCESS
            job.result = result if result is not None else {}
            dirty = self.cluster is not None and self.cluster.config_serial != self._distributed_serial
            if dirty and not ctx.distributed:
                self.distribute_config(ctx)
        finally:
            self._executing = False
            job.finished_t = self.world.clock.now
        return job

    def wait_job(self, job_id: int) -> Job:
        """Jobs run inline, so waiting returns the terminal job immediately."""
        return self.queue.get(job_id)

    # -- cluster access -------------------------------------------------------

    def require_cluster(self) -> ClusterConfig:
        if self.cluster is None:
            raise PreconditionError("cluster-not-initialized", "no cluster has been initialized")
        return self.cluster

    def node_online(self, name: str) -> bool:
        return self.world.reachable(name)

    def online_nodes(self) -> set:
        cfg = self.require_cluster()
        return {n for n in cfg.nodes if self.world.reachable(n)}

    def no_route(self, node_name: str) -> str:
        cfg = self.require_cluster()
        ip = cfg.nodes[node_name].mgmt_ip if node_name in cfg.nodes else self.world.hosts.get(node_name, "?")
        return self.world.no_route(node_name, ip)

    def actual_state(self, instance_name: str) -> str:
        cfg = self.require_cluster()
        inst = cfg.get_instance(instance_name)
        return ADMIN_UP if self.world.vm_running_on(inst.primary_node, inst.name) else "down"

    # -- config distribution ---------------------------------------------------

    def distribute_config(self, ctx: JobContext | None = None) -> list[tuple[str, bool]]:
        """Push the snapshot to the master and every master candidate.

        Unreachable targets are reported (and logged as warnings in the
        enclosing job), never raised.
        """
        cfg = self.require_cluster()
        payload = self.snapshot_bytes()
        results = []
        for node in cfg.candidates():
            sim = self.world.nodes.get(node.name)
            ok = sim is not None and self.world.reachable(node.name)
            if ok:
                sim.received_serial = cfg.config_serial
                if node.name == cfg.master_node:
                    self._write_snapshot(payload)
            elif ctx is not None:
                ctx.warning(
                    f"Copy of file {CONFIG_FILE_PATH} to node {node.name} failed: "
                    f"{self.no_route(node.name)}"
                )
            results.append((node.name, ok))
        self._distributed_serial = cfg.config_serial
        return results

    def _write_snapshot(self, payload: bytes):
        self.state_dir.mkdir(parents=True, exist_ok=True)
        (self.state_dir / CONFIG_FILE_NAME).write_bytes(payload)

    def snapshot_bytes(self) -> bytes:
        cfg = self.require_cluster()
        return cfg.snapshot_bytes(self.world.storage.to_doc())

    # -- identities -------------------------------------------------------------

    def identity(self, kind: str) -> str:
        return self.require_cluster().generate_identity(kind)


# Registered op handlers (name -> callable(engine, ctx, params)).
# Populated at import time by the modules that implement them.
OPS: dict = {}


def register_op(name: str):
    def wrap(fn):
        OPS[name] = fn
        return fn

    return wrap
