"""Deterministic event-queue engine: virtual clock, scheduling, seeded streams.

A single simulation instance is confined to one execution context; distinct
instances are independent and may run concurrently for parameter sweeps.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional

from .errors import InvalidDistributionParams, SchedulingInPast


class EventKind(Enum):
    REQUEST_ARRIVAL = "RequestArrival"
    BATCH_DISPATCH = "BatchDispatch"
    LAYER_COMPLETE = "LayerComplete"
    TOKEN_EMITTED = "TokenEmitted"
    REPLICA_READY = "ReplicaReady"
    METRICS_TICK = "MetricsTick"
    SCALE_DECISION = "ScaleDecision"
    MIGRATION_COMPLETE = "MigrationComplete"
    WORKLOAD_PHASE_CHANGE = "WorkloadPhaseChange"
    # Internal trigger for the periodic migration sweep; the sweep's actual
    # moves are recorded as MigrationComplete events.
    MIGRATION_CHECK = "MigrationCheck"


@dataclass(slots=True)
class Event:
    """A timestamped simulation occurrence.

    fire_time and sequence are assigned by SimCore.schedule(); sequence is a
    monotonically increasing insertion counter used to break time ties.
    """

    kind: EventKind
    payload: dict[str, Any] = field(default_factory=dict)
    fire_time: float = -1.0
    sequence: int = -1
    cancelled: bool = False


class EventHandle:
    """Permits cancellation of a scheduled event (tombstoned, not removed)."""

    __slots__ = ("event",)

    def __init__(self, event: Event):
        self.event = event

    def cancel(self) -> None:
        self.event.cancelled = True


class Clock:
    """Virtual clock in seconds; monotonically non-decreasing over a run."""

    __slots__ = ("now",)

    def __init__(self) -> None:
        self.now = 0.0


@dataclass(frozen=True)
class RunSummary:
    events_fired: int
    final_clock: float


class SimCore:
    """Min-heap event loop ordered by (fire_time, sequence)."""

    def __init__(
        self,
        handler: Optional[Callable[[Event], None]] = None,
        keep_log: bool = False,
    ):
        self.clock = Clock()
        self._heap: list[tuple[float, int, Event]] = []
        self._seq = itertools.count()
        self._handler = handler
        self.events_fired = 0
        self._last_key: tuple[float, int] = (-math.inf, -1)
        self.log: Optional[list[tuple[float, int, str]]] = [] if keep_log else None

    def schedule(self, event: Event, at: float) -> EventHandle:
        if at < self.clock.now:
            raise SchedulingInPast(
                f"cannot schedule {event.kind.value} at t={at} "
                f"(clock is at t={self.clock.now})"
            )
        event.fire_time = at
        event.sequence = next(self._seq)
        heapq.heappush(self._heap, (at, event.sequence, event))
        return EventHandle(event)

    def schedule_kind(self, kind: EventKind, at: float, **payload: Any) -> EventHandle:
        return self.schedule(Event(kind, payload), at)

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._heap if not ev.cancelled)

    def run_until(self, t_end: float) -> RunSummary:
        """Fire all events with fire_time <= t_end, then advance the clock to t_end."""
        if t_end < self.clock.now:
            raise ValueError(f"t_end={t_end} precedes clock {self.clock.now}")
        fired = 0
        while self._heap and self._heap[0][0] <= t_end:
            fire_time, seq, event = heapq.heappop(self._heap)
            if event.cancelled:
                continue
            key = (fire_time, seq)
            if key < self._last_key:
                raise RuntimeError(f"event fired out of order: {key} after {self._last_key}")
            self._last_key = key
            self.clock.now = fire_time
            if self.log is not None:
                self.log.append((fire_time, seq, event.kind.value))
            if self._handler is not None:
                self._handler(event)
            fired += 1
        self.clock.now = t_end
        self.events_fired += fired
        return RunSummary(events_fired=fired, final_clock=self.clock.now)


# seeded random streams


@dataclass(frozen=True)
class Exponential:
    rate: float


@dataclass(frozen=True)
class UniformInt:
    lo: int
    hi: int


@dataclass(frozen=True)
class Deterministic:
    value: float


Distribution = Exponential | UniformInt | Deterministic


class RandomStream:
    """One independent seeded substream per stochastic concern.

    The underlying generator is seeded from a hash of (seed, stream_id), so
    the same pair yields an identical sequence across runs and platforms and
    changing one stream's usage never perturbs another.
    """

    def __init__(self, seed: int, stream_id: str):
        self.seed = seed
        self.stream_id = stream_id
        digest = hashlib.sha256(f"{seed}:{stream_id}".encode()).digest()
        self._rng = random.Random(int.from_bytes(digest[:8], "big"))

    def draw(self, dist: Distribution) -> float:
        if isinstance(dist, Exponential):
            if not dist.rate > 0:
                raise InvalidDistributionParams(f"exponential rate must be > 0, got {dist.rate}")
            return self._rng.expovariate(dist.rate)
        if isinstance(dist, UniformInt):
            if not (isinstance(dist.lo, int) and isinstance(dist.hi, int)):
                raise InvalidDistributionParams("uniform_int bounds must be integers")
            if dist.lo > dist.hi:
                raise InvalidDistributionParams(f"uniform_int needs lo <= hi, got [{dist.lo}, {dist.hi}]")
            return self._rng.randint(dist.lo, dist.hi)
        if isinstance(dist, Deterministic):
            return dist.value
        raise InvalidDistributionParams(f"unknown distribution {dist!r}")

    def choice_index(self, n: int) -> int:
        """Uniform index into an n-element collection (empirical sampling)."""
        if n < 1:
            raise InvalidDistributionParams("cannot sample from an empty collection")
        return self._rng.randrange(n)
