"""Empirical risks, the wireless risk discrepancy, and its upper bounds.

The standard risk is the mean clipped loss over the clean pipeline; the
wireless risk sends every feature through the transmission chain first.
A loss clipped to [0, b] is (b/2)-sub-Gaussian, which feeds the
square-root bound; the sub-Gamma variant adds a linear tail term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel as phy
from . import network as net

__all__ = [
    "RiskReport",
    "standard_risk",
    "wireless_risk",
    "wireless_evaluation",
    "discrepancy",
    "signed_discrepancy",
    "sigma_from_clip",
    "subgaussian_bound",
    "subgamma_bound",
    "evaluate_risk_report",
]


def standard_risk(
    spec: net.NetworkSpec,
    params: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    clip: float,
) -> float:
    """Mean clipped loss over the dataset with the clean pipeline."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    losses, _ = net.batch_clipped_losses(spec, params, x, y, clip)
    return float(np.mean(losses))


@dataclass
class WirelessEvaluation:
    """Per-sample detail of one wireless pass over a dataset."""

    losses: np.ndarray
    predictions: np.ndarray
    stats: phy.TransmissionStats

    @property
    def mean_loss(self) -> float:
        return float(np.mean(self.losses))

    def accuracy(self, y: np.ndarray) -> float:
        return float(np.mean(self.predictions == np.asarray(y)))


def wireless_evaluation(
    spec: net.NetworkSpec,
    params: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    state: phy.ChannelState,
    clip: float,
    rng: np.random.Generator,
    fresh_fading: bool = True,
) -> WirelessEvaluation:
    """One pass of the dataset through the wireless pipeline.

    Every sample gets its own quasi-static fading draw (Rayleigh) and fresh
    noise.  Returns per-sample clipped losses, hard predictions, and the
    bit-level transmission stats.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    stats = phy.TransmissionStats()
    pipeline = phy.make_wireless_pipeline(
        state, rng, fresh_fading=fresh_fading, stats=stats
    )
    losses, logits = net.batch_clipped_losses(spec, params, x, y, clip, pipeline)
    return WirelessEvaluation(
        losses=losses, predictions=np.argmax(logits, axis=1), stats=stats
    )


def wireless_risk(
    spec: net.NetworkSpec,
    params: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    state: phy.ChannelState,
    clip: float,
    rng: np.random.Generator,
    fresh_fading: bool = True,
) -> float:
    """Mean clipped loss with features sent over the channel realization."""
    return wireless_evaluation(
        spec, params, x, y, state, clip, rng, fresh_fading=fresh_fading
    ).mean_loss


def discrepancy(standard: float, wireless_risks) -> float:
    """Mean absolute gap between per-draw wireless risks and the standard risk."""
    values = np.asarray(list(wireless_risks), dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one channel draw")
    return float(np.mean(np.abs(values - standard)))


def signed_discrepancy(standard: float, wireless_risks) -> float:
    """Mean signed gap, the quantity the sub-Gamma bound controls."""
    values = np.asarray(list(wireless_risks), dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one channel draw")
    return float(np.mean(values - standard))


def sigma_from_clip(clip: float) -> float:
    """Sub-Gaussian parameter of a loss bounded in [0, clip]: clip / 2."""
    if clip < 0:
        raise ValueError(f"clip must be nonnegative, got {clip}")
    return clip / 2.0


def subgaussian_bound(sigma: float, mi: float) -> float:
    """sigma * sqrt(2 * mi): upper bound on the wireless risk discrepancy."""
    if mi < 0:
        raise ValueError(f"mutual information must be nonnegative, got {mi}")
    return float(sigma * np.sqrt(2.0 * mi))


def subgamma_bound(sigma: float, c: float, mi: float) -> float:
    """sigma * sqrt(2 * mi) + c * mi: heavier-tailed variant of the bound."""
    if mi < 0:
        raise ValueError(f"mutual information must be nonnegative, got {mi}")
    if c < 0:
        raise ValueError(f"tail parameter must be nonnegative, got {c}")
    return float(sigma * np.sqrt(2.0 * mi) + c * mi)


@dataclass
class RiskReport:
    """Per-configuration bundle of risks, discrepancy, and bounds."""

    standard_risk: float
    wireless_risks: list[tuple[int, float]]
    discrepancy: float
    signed_discrepancy: float
    sigma: float
    mi_estimate: float
    bound: float
    accuracy: float
    ber: float
    subgamma_bound: float | None = None
    sample_losses: np.ndarray = field(default=None, repr=False)


def evaluate_risk_report(
    spec: net.NetworkSpec,
    params: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    state: phy.ChannelState,
    clip: float,
    n_draws: int,
    mi_estimate: float,
    rng: np.random.Generator,
    subgamma_c: float | None = None,
) -> RiskReport:
    """Assemble the full report for one channel configuration.

    Runs n_draws independent wireless passes (fresh per-sample fading and
    noise per draw), aggregates the discrepancy against the standard risk,
    and attaches the bound computed from the supplied MI estimate.  The
    per-sample loss matrix (n_draws, n) is kept for outage analysis.
    """
    if n_draws < 1:
        raise ValueError("need at least one channel draw")
    l_std = standard_risk(spec, params, x, y, clip)
    stats = phy.TransmissionStats()
    draws: list[tuple[int, float]] = []
    losses = np.empty((n_draws, np.asarray(x).shape[0]))
    hits = 0
    for i in range(n_draws):
        ev = wireless_evaluation(spec, params, x, y, state, clip, rng)
        draws.append((i, ev.mean_loss))
        losses[i] = ev.losses
        stats.add(ev.stats)
        hits += int(np.sum(ev.predictions == np.asarray(y)))
    values = [v for _, v in draws]
    sigma = sigma_from_clip(clip)
    return RiskReport(
        standard_risk=l_std,
        wireless_risks=draws,
        discrepancy=discrepancy(l_std, values),
        signed_discrepancy=signed_discrepancy(l_std, values),
        sigma=sigma,
        mi_estimate=mi_estimate,
        bound=subgaussian_bound(sigma, mi_estimate),
        subgamma_bound=(
            subgamma_bound(sigma, subgamma_c, mi_estimate)
            if subgamma_c is not None
            else None
        ),
        accuracy=hits / (n_draws * np.asarray(x).shape[0]),
        ber=stats.ber,
        sample_losses=losses,
    )
