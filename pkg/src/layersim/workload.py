"""Request stream generation: Poisson/closed-loop arrivals, length
distributions, phase-modulated rates, and trace replay.

Open-loop and trace schedules are generated up front as pure data; the
closed-loop policy is reactive (a completion immediately triggers the next
arrival) and is driven by the engine.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .core import Deterministic, Exponential, RandomStream, UniformInt
from .errors import InvalidSpec, MalformedTrace, NonMonotonicTimestamps


@dataclass(frozen=True)
class Empirical:
    """Sample uniformly from a frozen set of observed values."""

    values: tuple[int, ...]


LengthDist = Union[UniformInt, Deterministic, Empirical]


@dataclass(frozen=True)
class PoissonArrivals:
    rate: float     # requests/second before phase multipliers


@dataclass(frozen=True)
class ClosedLoopArrivals:
    concurrency: int


@dataclass(frozen=True)
class TraceArrivals:
    file: str


@dataclass(frozen=True)
class RatePhase:
    start: float
    multiplier: float


@dataclass(frozen=True)
class Arrival:
    time: float
    input_len: int
    output_len: int


@dataclass(frozen=True)
class WorkloadSpec:
    arrival: Union[PoissonArrivals, ClosedLoopArrivals, TraceArrivals]
    input_len_dist: LengthDist = UniformInt(50, 2048)
    output_len_dist: LengthDist = UniformInt(32, 512)
    phases: tuple[RatePhase, ...] = (RatePhase(0.0, 1.0),)
    duration: float = 60.0

    def validate(self) -> None:
        if self.duration <= 0:
            raise InvalidSpec(f"duration must be > 0, got {self.duration}")
        if isinstance(self.arrival, PoissonArrivals) and not self.arrival.rate > 0:
            raise InvalidSpec(f"poisson rate must be > 0, got {self.arrival.rate}")
        if isinstance(self.arrival, ClosedLoopArrivals) and self.arrival.concurrency < 1:
            raise InvalidSpec(f"concurrency must be >= 1, got {self.arrival.concurrency}")
        last = -float("inf")
        for ph in self.phases:
            if ph.start <= last:
                raise InvalidSpec("phase start times must be strictly increasing")
            if not ph.multiplier > 0:
                raise InvalidSpec(f"phase multipliers must be > 0, got {ph.multiplier}")
            last = ph.start
        if self.phases and self.phases[0].start != 0.0:
            raise InvalidSpec("first phase must start at t=0")
        for name, dist in (("input_len_dist", self.input_len_dist),
                           ("output_len_dist", self.output_len_dist)):
            if isinstance(dist, UniformInt):
                if dist.lo < 1 or dist.lo > dist.hi:
                    raise InvalidSpec(f"{name} needs 1 <= lo <= hi, got [{dist.lo}, {dist.hi}]")
            elif isinstance(dist, Deterministic):
                if dist.value < 1 or int(dist.value) != dist.value:
                    raise InvalidSpec(f"{name} must be a positive integer, got {dist.value}")
            elif isinstance(dist, Empirical):
                if not dist.values or any(v < 1 for v in dist.values):
                    raise InvalidSpec(f"{name} empirical values must be positive integers")


def draw_length(dist: LengthDist, stream: RandomStream) -> int:
    if isinstance(dist, Empirical):
        return dist.values[stream.choice_index(len(dist.values))]
    return int(stream.draw(dist))


def load_empirical(path: str | Path) -> Empirical:
    """Read an empirical length file: one positive integer per line."""
    values = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise InvalidSpec(f"{path}:{i}: not an integer: {line!r}") from None
    if not values:
        raise InvalidSpec(f"{path}: empirical file contains no samples")
    return Empirical(tuple(values))


def _phase_segments(spec: WorkloadSpec) -> list[tuple[float, float, float]]:
    """(start, end, multiplier) covering [0, duration)."""
    segments = []
    for i, ph in enumerate(spec.phases):
        if ph.start >= spec.duration:
            break
        end = spec.phases[i + 1].start if i + 1 < len(spec.phases) else spec.duration
        segments.append((ph.start, min(end, spec.duration), ph.multiplier))
    return segments


def gen_requests(spec: WorkloadSpec, streams: dict[str, RandomStream]) -> list[Arrival]:
    """Pregenerate the arrival schedule for open-loop and trace workloads.

    Poisson inter-arrivals are exponential at rate x multiplier; phase
    boundaries restart the draw, which is exact for a Poisson process.
    """
    spec.validate()
    if isinstance(spec.arrival, TraceArrivals):
        return replay_trace(spec.arrival.file)
    if isinstance(spec.arrival, ClosedLoopArrivals):
        raise InvalidSpec("closed-loop arrivals are reactive; drive them through the engine")

    arrivals_stream = streams["arrivals"]
    in_stream = streams["input_lens"]
    out_stream = streams["output_lens"]
    base_rate = spec.arrival.rate
    out: list[Arrival] = []
    for seg_start, seg_end, mult in _phase_segments(spec):
        t = seg_start
        dist = Exponential(base_rate * mult)
        while True:
            t += arrivals_stream.draw(dist)
            if t >= seg_end:
                break
            out.append(Arrival(
                time=t,
                input_len=draw_length(spec.input_len_dist, in_stream),
                output_len=draw_length(spec.output_len_dist, out_stream),
            ))
    return out


TRACE_HEADER = ["arrival_time_s", "input_tokens", "output_tokens"]


def replay_trace(path: str | Path) -> list[Arrival]:
    """Load a CSV trace (header arrival_time_s,input_tokens,output_tokens)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != TRACE_HEADER:
                raise MalformedTrace(f"{path}: expected header {','.join(TRACE_HEADER)}")
            out: list[Arrival] = []
            prev = -float("inf")
            for i, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 3:
                    raise MalformedTrace(f"{path}:{i}: expected 3 columns, got {len(row)}")
                try:
                    t = float(row[0])
                    input_len = int(row[1])
                    output_len = int(row[2])
                except ValueError as exc:
                    raise MalformedTrace(f"{path}:{i}: {exc}") from None
                if t < prev:
                    raise NonMonotonicTimestamps(f"{path}:{i}: {t} precedes {prev}")
                if t < 0 or input_len < 1 or output_len < 1:
                    raise MalformedTrace(f"{path}:{i}: negative time or non-positive lengths")
                prev = t
                out.append(Arrival(t, input_len, output_len))
            return out
    except OSError as exc:
        raise MalformedTrace(f"cannot read trace {path}: {exc}") from None


def write_trace(path: str | Path, arrivals: list[Arrival]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for a in arrivals:
            writer.writerow([repr(a.time), a.input_len, a.output_len])
