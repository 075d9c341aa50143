"""Per-layer pipeline semantics: batches, two-phase cost model, request advance.

A request traverses the full layer chain once per emitted token: the prefill
pass produces the first token, every decode pass produces one more. Batches
are formed per replica and are immutable once dispatched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import InconsistentPipelineState, PhaseMismatch


class Phase(Enum):
    PREFILL = "Prefill"
    DECODE = "Decode"
    DONE = "Done"


@dataclass(frozen=True)
class CostParams:
    """Per-layer service-time coefficients.

    Prefill is compute-heavy (beta, gamma over input tokens); decode leans on
    memory bandwidth (delta per request, mu per context token). alpha is a
    fixed per-batch overhead shared by both phases.
    """

    alpha: float = 0.0          # seconds per batch
    beta: float = 0.0           # seconds per input token (prefill)
    gamma: float = 0.0          # seconds per input token^2 (prefill attention)
    delta: float = 0.0          # seconds per request (decode step)
    mu: float = 0.0             # seconds per context token (decode step)
    memory_footprint: float = 0.0   # bytes resident per replica


@dataclass(frozen=True)
class ModelSpec:
    num_layers: int
    hidden_dim: int
    layer_costs: tuple[CostParams, ...]

    def payload_bytes(self, tokens: int) -> float:
        # half-precision activations between layer services
        return self.hidden_dim * tokens * 2.0


@dataclass(slots=True)
class Request:
    """One inference job and its progress through the pipeline."""

    request_id: int
    arrival_time: float
    input_len: int
    output_len: int
    tokens_emitted: int = 0
    phase: Phase = Phase.PREFILL
    next_layer: int = 0
    ttft: Optional[float] = None
    finish_time: Optional[float] = None
    first_token_time: Optional[float] = None
    last_token_time: Optional[float] = None
    tpot_gap_sum: float = 0.0
    last_enqueue_time: float = 0.0
    per_layer_max: list[float] = field(default_factory=list)

    def mean_tpot(self) -> float:
        if self.output_len <= 1:
            return 0.0
        return self.tpot_gap_sum / (self.output_len - 1)


@dataclass(slots=True)
class Batch:
    batch_id: int
    layer_id: int
    replica_id: str
    members: list[Request]
    phase: Phase
    dispatch_time: float
    enqueue_min: float
    complete_time: float = -1.0


@dataclass(frozen=True)
class BatchingPolicy:
    """Dispatch when the queue reaches max_size or the oldest request has
    waited max_wait seconds."""

    max_size: int
    max_wait: float


def prefill_time(params: CostParams, batch: Batch, compute_scale: float = 1.0) -> float:
    if batch.phase is not Phase.PREFILL:
        raise PhaseMismatch(f"prefill_time on a {batch.phase.value} batch")
    total_tokens = 0
    total_sq = 0
    for req in batch.members:
        total_tokens += req.input_len
        total_sq += req.input_len * req.input_len
    return (params.alpha + params.beta * total_tokens + params.gamma * total_sq) / compute_scale


def decode_step_time(
    params: CostParams,
    batch: Batch,
    contexts: list[int],
    compute_scale: float = 1.0,
) -> float:
    if batch.phase is not Phase.DECODE:
        raise PhaseMismatch(f"decode_step_time on a {batch.phase.value} batch")
    return (params.alpha + params.delta * len(batch.members) + params.mu * sum(contexts)) / compute_scale


def form_batch(replica, policy: BatchingPolicy, now: float, batch_id: int) -> Optional[Batch]:
    """Pop the oldest same-phase requests off a replica's queue as one batch.

    Triggered when the queue holds max_size requests or the head has waited
    max_wait; the batch takes the head's phase and skips requests in the
    other phase (they keep their queue positions).
    """
    queue = replica.queue
    if not queue:
        return None
    # deadline arithmetic matches batch_timer_deadline exactly, so a timer
    # firing at its deadline always satisfies the wait trigger
    if len(queue) < policy.max_size and now < queue[0][1] + policy.max_wait:
        return None
    phase = queue[0][0].phase
    members: list[Request] = []
    enqueue_min = math.inf
    kept: list[tuple[Request, float]] = []
    for req, t in queue:
        if req.phase is phase and len(members) < policy.max_size:
            members.append(req)
            if t < enqueue_min:
                enqueue_min = t
        else:
            kept.append((req, t))
    queue.clear()
    queue.extend(kept)
    return Batch(
        batch_id=batch_id,
        layer_id=replica.layer_id,
        replica_id=replica.replica_id,
        members=members,
        phase=phase,
        dispatch_time=now,
        enqueue_min=enqueue_min,
    )


def batch_timer_deadline(replica, policy: BatchingPolicy) -> Optional[float]:
    """When the head-of-queue request will hit the max_wait trigger."""
    if not replica.queue:
        return None
    return replica.queue[0][1] + policy.max_wait


class Advance(Enum):
    ROUTE = "route"        # continue to next_layer, same pass
    REENTER = "reenter"    # token emitted; start a new pass at layer 0
    DONE = "done"          # final token emitted; request finished


def advance_request(req: Request, completed_layer: int, now: float, num_layers: int) -> Advance:
    """Advance a request after a layer completion and report where it goes next.

    At the last layer, the prefill pass emits the first token (setting TTFT)
    and every decode pass emits one more; the request re-enters layer 0 until
    output_len tokens exist.
    """
    if req.phase is Phase.DONE or req.next_layer != completed_layer:
        raise InconsistentPipelineState(
            f"request {req.request_id} at layer {req.next_layer} ({req.phase.value}) "
            f"cannot complete layer {completed_layer}"
        )
    if completed_layer < num_layers - 1:
        req.next_layer = completed_layer + 1
        return Advance.ROUTE

    # last layer: a token is emitted
    if req.phase is Phase.PREFILL:
        req.tokens_emitted = 1
        req.ttft = now - req.arrival_time
        req.first_token_time = now
        req.phase = Phase.DECODE
    else:
        req.tokens_emitted += 1
        req.tpot_gap_sum += now - req.last_token_time
    req.last_token_time = now

    if req.tokens_emitted >= req.output_len:
        req.phase = Phase.DONE
        req.finish_time = now
        return Advance.DONE
    req.next_layer = 0
    return Advance.REENTER
