"""Numbered jobs with ordered, timestamped logs.

Jobs execute strictly in submission order, one at a time, holding the
cluster write lock; ids are monotonic from 1 and a terminal status never
changes.  Log lines render exactly as the operator console shows them:
bare messages, "* " step markers, "- INFO: " and "- WARNING: " prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownEntityError

STATUS_QUEUED = "queued"
STATUS_RUNNING = "running"
STATUS_SUCCESS = "success"
STATUS_ERROR = "error"

LEVEL_MESSAGE = "MESSAGE"
LEVEL_STEP = "STEP"
LEVEL_INFO = "INFO"
LEVEL_WARNING = "WARNING"

LEVEL_PREFIX = {
    LEVEL_MESSAGE: "",
    LEVEL_STEP: "* ",
    LEVEL_INFO: "- INFO: ",
    LEVEL_WARNING: "- WARNING: ",
}


@dataclass
class LogLine:
    t: float
    when: str  # console timestamp, rendered at log time
    level: str
    text: str

    def render(self) -> str:
        return f"{self.when} {LEVEL_PREFIX[self.level]}{self.text}"

    def to_doc(self) -> dict:
        return {"t": self.t, "when": self.when, "level": self.level, "text": self.text}


@dataclass
class Job:
    id: int
    op: str
    params: dict
    status: str = STATUS_QUEUED
    log: list = field(default_factory=list)
    result: dict | None = None
    submitted_t: float = 0.0
    finished_t: float | None = None

    @property
    def target(self) -> str:
        return str(self.params.get("name", ""))

    @property
    def summary(self) -> str:
        return f"{self.op.upper()}({self.target})" if self.target else self.op.upper()

    def rendered_log(self) -> list[str]:
        return [line.render() for line in self.log]

    def to_doc(self, include_log: bool = True) -> dict:
        doc = {
            "id": self.id,
            "op": self.op,
            "summary": self.summary,
            "status": self.status,
            "result": self.result,
            "submitted_t": self.submitted_t,
            "finished_t": self.finished_t,
            "log_tail": self.log[-1].text if self.log else "",
        }
        if include_log:
            doc["log"] = [line.to_doc() for line in self.log]
        return doc


class JobQueue:
    def __init__(self):
        self.jobs: dict = {}
        self._next_id = 1

    def create(self, op: str, params: dict, t: float) -> Job:
        job = Job(id=self._next_id, op=op, params=params, submitted_t=t)
        self._next_id += 1
        self.jobs[job.id] = job
        return job

    def get(self, job_id: int) -> Job:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise UnknownEntityError("unknown-job", f"no job with id {job_id}") from None

    def all(self) -> list[Job]:
        return [self.jobs[i] for i in sorted(self.jobs)]


class JobContext:
    """Handed to op handlers: logging, clock stepping, config distribution."""

    def __init__(self, engine, job: Job):
        self.engine = engine
        self.job = job
        self.distributed = False

    def log(self, level: str, text: str, advance: float = 1.0):
        clock = self.engine.world.clock
        if advance:
            self.engine.world.advance(advance)
        self.job.log.append(LogLine(t=clock.now, when=clock.console_ts(), level=level, text=text))

    def message(self, text: str, advance: float = 1.0):
        self.log(LEVEL_MESSAGE, text, advance)

    def step(self, text: str, advance: float = 1.0):
        self.log(LEVEL_STEP, text, advance)

    def info(self, text: str, advance: float = 1.0):
        self.log(LEVEL_INFO, text, advance)

    def warning(self, text: str, advance: float = 0.0):
        self.log(LEVEL_WARNING, text, advance)

    def distribute(self):
        """Push the config to all candidates now; failures become warnings."""
        self.distributed = True
        return self.engine.distribute_config(self)
