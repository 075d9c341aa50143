"""Load forecasting over arrival-rate series for proactive scaling.

Two forecasters are provided: exponentially weighted smoothing and a
sliding-window mean. Both are pure functions over series snapshots; anything
more elaborate plugs in through the same Forecaster signature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import EmptySeries, SeriesTooShort


@dataclass(frozen=True)
class LoadSeries:
    """(time, arrivals_per_second) samples with strictly increasing times."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        last = -float("inf")
        for t, rate in self.samples:
            if t <= last:
                raise ValueError(f"timestamps must strictly increase, {t} after {last}")
            if rate < 0:
                raise ValueError(f"rates must be >= 0, got {rate}")
            last = t

    def __len__(self) -> int:
        return len(self.samples)

    def rates(self) -> list[float]:
        return [r for _, r in self.samples]

    def prefix(self, n: int) -> "LoadSeries":
        return LoadSeries(self.samples[:n])


Forecaster = Callable[[LoadSeries], float]


def ewma_forecast(series: LoadSeries, alpha: float = 0.3) -> float:
    """s0 = x0; sk = alpha*xk + (1-alpha)*s(k-1); returns the final s."""
    if len(series) == 0:
        raise EmptySeries("cannot forecast from an empty series")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    rates = series.rates()
    s = rates[0]
    for x in rates[1:]:
        s = alpha * x + (1 - alpha) * s
    return s


def window_mean_forecast(series: LoadSeries, k: int = 10) -> float:
    """Mean of the last min(k, len) samples."""
    if len(series) == 0:
        raise EmptySeries("cannot forecast from an empty series")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    tail = series.rates()[-k:]
    return sum(tail) / len(tail)


def forecast_error(series: LoadSeries, forecaster: Forecaster, horizon: int) -> float:
    """Walk-forward one-step mean absolute error over the last `horizon` points.

    At each evaluated index j the forecaster sees only samples[:j] and is
    scored against samples[j].
    """
    n = len(series)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if n <= horizon:
        raise SeriesTooShort(f"series of {n} samples cannot score a horizon of {horizon}")
    total = 0.0
    for j in range(n - horizon, n):
        predicted = forecaster(series.prefix(j))
        actual = series.samples[j][1]
        total += abs(predicted - actual)
    return total / horizon
