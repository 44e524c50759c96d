"""Scripted scenarios: ordered ops with activation times, run through jobs.

A scenario file is plain JSON: {"steps": [{"at": sim-seconds, "op": name,
"params": {...}}, ...]}.  Each step first advances the clock to its
activation time (if it is still in the future), then submits the op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .engine import Engine
from .errors import ValidationError
from .jobs import STATUS_SUCCESS, Job


@dataclass
class ScenarioStep:
    at: float
    op: str
    params: dict


def load_scenario(path) -> list[ScenarioStep]:
    doc = json.loads(Path(path).read_text())
    steps = doc.get("steps")
    if not isinstance(steps, list):
        raise ValidationError("bad-scenario", f"{path}: expected a top-level 'steps' list")
    out = []
    for i, raw in enumerate(steps):
        if "op" not in raw:
            raise ValidationError("bad-scenario", f"{path}: step {i} has no 'op'")
        out.append(ScenarioStep(at=float(raw.get("at", 0)), op=raw["op"],
                                params=dict(raw.get("params") or {})))
    return out


def run_scenario(engine: Engine, steps: list[ScenarioStep], strict: bool = True) -> list[Job]:
    jobs = []
    for step in steps:
        if step.at > engine.world.clock.now:
            engine.world.advance(step.at - engine.world.clock.now)
        job = engine.submit(step.op, step.params)
        jobs.append(job)
        if strict and job.status != STATUS_SUCCESS:
            raise ValidationError(
                "scenario-step-failed",
                f"step {step.op} (job {job.id}) failed: {job.result.get('error')}",
            )
    return jobs


def run_scenario_file(engine: Engine, path, strict: bool = True) -> list[Job]:
    return run_scenario(engine, load_scenario(path), strict=strict)
