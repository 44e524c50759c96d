"""Simulated wall clock.

Every timestamp in the system comes from this clock; real time is never
consulted, so scenario runs are reproducible and finish in milliseconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from .errors import ValidationError

DEFAULT_EPOCH = datetime(2015, 11, 17, 17, 19, 0)


@dataclass
class SimClock:
    epoch: datetime = DEFAULT_EPOCH
    now: float = 0.0

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise ValidationError("negative-dt", f"cannot advance the clock by {dt}s")
        self.now += dt
        return self.now

    def as_datetime(self, t: float | None = None) -> datetime:
        return self.epoch + timedelta(seconds=self.now if t is None else t)

    def console_ts(self, t: float | None = None) -> str:
        """Console-log form, e.g. "Wed Nov 18 16:35:12 2015"."""
        return self.as_datetime(t).strftime("%a %b %d %H:%M:%S %Y")

    def iso_ts(self, t: float | None = None) -> str:
        """Report form, e.g. "2015-11-18 16:35:27"."""
        return self.as_datetime(t).strftime("%Y-%m-%d %H:%M:%S")
