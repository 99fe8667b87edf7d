"""Task outage indicator, Monte-Carlo outage probability, epsilon-capacity,
and the task achievable region boundary."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OutageRecord",
    "OutageProbability",
    "BoundaryEstimate",
    "outage_indicator",
    "outage_probability",
    "epsilon_capacity",
    "achievable_boundary",
]


@dataclass(frozen=True)
class OutageRecord:
    """One wireless inference compared against the standard risk."""

    wireless_loss: float
    standard_risk: float
    bound: float
    indicator: int
    rate: float
    channel_id: int


def outage_indicator(wireless_loss: float, standard_risk: float, bound: float) -> int:
    """1 when |loss - standard risk| >= bound (boundary inclusive)."""
    if bound < 0:
        raise ValueError(f"bound must be nonnegative, got {bound}")
    return int(abs(wireless_loss - standard_risk) >= bound)


@dataclass(frozen=True)
class OutageProbability:
    value: float
    std_error: float
    n: int


def outage_probability(records) -> OutageProbability:
    """Fraction of outage indicators set, with its Monte-Carlo standard error.

    Accepts OutageRecord instances or bare 0/1 indicators.
    """
    items = list(records)
    if not items:
        raise ValueError("need at least one record")
    flags = np.array(
        [r.indicator if isinstance(r, OutageRecord) else int(r) for r in items],
        dtype=np.float64,
    )
    p = float(np.mean(flags))
    n = flags.size
    return OutageProbability(value=p, std_error=float(np.sqrt(p * (1 - p) / n)), n=n)


def epsilon_capacity(capacity: float, epsilon: float) -> float:
    """C / (1 - epsilon); falls back to the plain capacity at epsilon = 0."""
    if capacity < 0:
        raise ValueError(f"capacity must be nonnegative, got {capacity}")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    return capacity / (1.0 - epsilon)


@dataclass(frozen=True)
class BoundaryEstimate:
    """Largest in-region sampled rate, with an interpolated refinement."""

    rate: float | None
    refined: float | None
    in_region: np.ndarray
    diagnostic: str = ""


def achievable_boundary(
    rates,
    mean_losses,
    standard_risk: float,
    bound: float,
) -> BoundaryEstimate:
    """Boundary of the task achievable region along a rate sweep.

    A sampled rate is in-region when |mean loss - standard risk| < bound.
    The boundary is the largest in-region sampled rate; if the next higher
    sample is out of region, the crossing of the bound is linearly
    interpolated between the two as a refined estimate.
    """
    rates = np.asarray(rates, dtype=np.float64)
    losses = np.asarray(mean_losses, dtype=np.float64)
    if rates.shape != losses.shape or rates.size < 2:
        raise ValueError("need matching rate/loss arrays with at least two points")
    order = np.argsort(rates)
    rates, losses = rates[order], losses[order]
    gaps = np.abs(losses - standard_risk)
    in_region = gaps < bound
    if not np.any(in_region):
        return BoundaryEstimate(
            rate=None,
            refined=None,
            in_region=in_region,
            diagnostic="no sampled rate lies inside the task achievable region",
        )
    last = int(np.max(np.nonzero(in_region)[0]))
    rate = float(rates[last])
    refined = rate
    if last + 1 < rates.size:
        # crossing of |loss - standard| = bound between the two samples
        d0, d1 = gaps[last], gaps[last + 1]
        if d1 > d0:
            frac = (bound - d0) / (d1 - d0)
            refined = float(rates[last] + frac * (rates[last + 1] - rates[last]))
    return BoundaryEstimate(rate=rate, refined=refined, in_region=in_region)
