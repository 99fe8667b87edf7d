"""Conditional mutual-information estimation from training trajectories.

The estimator reduces to a sum of squared projections of recorded loss
gradients onto the shift between the trajectory's quadratic-mean weights
and the pretrained prior mean.  Influence functions and the diagonal
empirical Fisher provide the covariance machinery behind that reduction;
a Gaussian closed-form KL is kept as an oracle.  The proportionality
constant of the estimator is fixed to 1: values are meaningful relative
to each other and enter the bound as reported.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .exceptions import NumericalError

__all__ = [
    "GradientLog",
    "MiEstimate",
    "FisherCovariance",
    "moving_quadratic_mean",
    "estimate_mi",
    "gaussian_kl",
    "influence_shift",
    "empirical_fisher_diagonal",
    "fisher_covariance",
]


class GradientLog:
    """Append-only store of flat per-batch loss gradients.

    A single training loop appends; estimation reads a frozen snapshot via
    as_matrix().  max_entries keeps only the most recent window.
    """

    def __init__(self, max_entries: int | None = None):
        self._entries: deque[np.ndarray] = deque(maxlen=max_entries)
        self._dim: int | None = None

    def append(self, grad: np.ndarray) -> None:
        grad = np.asarray(grad, dtype=np.float64)
        if grad.ndim != 1:
            raise ValueError("gradient entries must be flat vectors")
        if self._dim is None:
            self._dim = grad.shape[0]
        elif grad.shape[0] != self._dim:
            raise ValueError(
                f"gradient has dimension {grad.shape[0]}, log holds {self._dim}"
            )
        self._entries.append(grad.copy())

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def dim(self) -> int | None:
        return self._dim

    def as_matrix(self) -> np.ndarray:
        if not self._entries:
            raise ValueError("gradient log is empty")
        return np.stack(self._entries)


@dataclass
class MiEstimate:
    """Scalar MI estimate with the ingredients that produced it."""

    value: float
    n: int
    t: int
    delta_theta: np.ndarray = field(repr=False)


def moving_quadratic_mean(
    previous: np.ndarray,
    snapshots,
    rho: float,
    k: int | None = None,
) -> np.ndarray:
    """Componentwise sqrt(rho * prev^2 + (1-rho)/K * sum of snapshot^2).

    With all snapshots equal to the previous mean this is a fixed point.
    k defaults to the number of snapshots supplied.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must be in [0, 1), got {rho}")
    snapshots = np.atleast_2d(np.asarray(snapshots, dtype=np.float64))
    previous = np.asarray(previous, dtype=np.float64)
    if k is None:
        k = snapshots.shape[0]
    if k < 1:
        raise ValueError("need at least one snapshot")
    if snapshots.shape[0] != k or snapshots.shape[1] != previous.shape[0]:
        raise ValueError(
            f"snapshots have shape {snapshots.shape}, expected ({k}, {previous.shape[0]})"
        )
    return np.sqrt(rho * previous**2 + (1.0 - rho) / k * np.sum(snapshots**2, axis=0))


def estimate_mi(delta_theta: np.ndarray, log: GradientLog, n: int) -> MiEstimate:
    """(n/T) * sum over stored gradients of the squared projection onto
    delta_theta; zero exactly when every projection vanishes."""
    if len(log) == 0:
        raise ValueError("gradient log is empty")
    delta_theta = np.asarray(delta_theta, dtype=np.float64)
    grads = log.as_matrix()
    if delta_theta.shape != (grads.shape[1],):
        raise ValueError(
            f"delta has shape {delta_theta.shape}, gradients have dim {grads.shape[1]}"
        )
    proj = grads @ delta_theta
    t = grads.shape[0]
    return MiEstimate(
        value=float(n / t * np.sum(proj**2)), n=int(n), t=t, delta_theta=delta_theta
    )


def _as_cov(cov, dim: int) -> tuple[np.ndarray, bool]:
    """Normalize a covariance argument to (array, is_diagonal)."""
    cov = np.asarray(cov, dtype=np.float64)
    if cov.ndim == 0:
        cov = np.full(dim, float(cov))
    if cov.ndim == 1:
        if cov.shape[0] != dim:
            raise ValueError("diagonal covariance has wrong dimension")
        if np.any(cov <= 0):
            raise ValueError("covariance diagonal must be positive definite")
        return cov, True
    if cov.shape != (dim, dim):
        raise ValueError("covariance matrix has wrong shape")
    return cov, False


def gaussian_kl(mean1, cov1, mean2, cov2) -> float:
    """Closed-form KL divergence between two Gaussians, first relative to
    second.  Covariances may be scalars, diagonals, or full SPD matrices."""
    mean1 = np.atleast_1d(np.asarray(mean1, dtype=np.float64))
    mean2 = np.atleast_1d(np.asarray(mean2, dtype=np.float64))
    if mean1.shape != mean2.shape:
        raise ValueError("means have different dimensions")
    dim = mean1.shape[0]
    c1, diag1 = _as_cov(cov1, dim)
    c2, diag2 = _as_cov(cov2, dim)
    diff = mean1 - mean2

    if diag1 and diag2:
        logdet1 = float(np.sum(np.log(c1)))
        logdet2 = float(np.sum(np.log(c2)))
        quad = float(np.sum(diff**2 / c2))
        trace = float(np.sum(c1 / c2))
    else:
        d1 = np.diag(c1) if diag1 else c1
        d2 = np.diag(c2) if diag2 else c2
        try:
            chol1 = linalg.cholesky(d1, lower=True)
            chol2 = linalg.cholesky(d2, lower=True)
        except linalg.LinAlgError as exc:
            raise ValueError("covariance is not positive definite") from exc
        logdet1 = 2.0 * float(np.sum(np.log(np.diag(chol1))))
        logdet2 = 2.0 * float(np.sum(np.log(np.diag(chol2))))
        solve_diff = linalg.cho_solve((chol2, True), diff)
        quad = float(diff @ solve_diff)
        trace = float(np.trace(linalg.cho_solve((chol2, True), d1)))

    return 0.5 * (logdet2 - logdet1 - dim + quad + trace)


def influence_shift(
    per_sample_grads: np.ndarray,
    curvature: np.ndarray,
    xi: np.ndarray,
) -> np.ndarray:
    """First-order weight shift under bootstrap reweighting.

    per_sample_grads holds one row per sample, evaluated at the minimizer;
    curvature is the averaged Hessian (or Fisher) there, full SPD or
    diagonal.  Returns (1/n) * Psi^T (xi - 1) with psi_i the influence
    function -curvature^{-1} grad_i; xi of all ones maps to a zero shift.
    """
    grads = np.asarray(per_sample_grads, dtype=np.float64)
    if grads.ndim != 2:
        raise ValueError("per-sample gradients must form an (n, D) matrix")
    n, dim = grads.shape
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape != (n,):
        raise ValueError(f"bootstrap weights have shape {xi.shape}, expected ({n},)")
    curvature = np.asarray(curvature, dtype=np.float64)
    if curvature.ndim == 1:
        if np.any(curvature <= 0):
            raise NumericalError("diagonal curvature must be positive")
        psi = -grads / curvature[None, :]
    else:
        try:
            chol = linalg.cho_factor(curvature)
            psi = -linalg.cho_solve(chol, grads.T).T
        except linalg.LinAlgError as exc:
            cond = np.linalg.cond(curvature)
            raise NumericalError(
                f"curvature matrix is singular (condition number {cond:.3e})"
            ) from exc
    return psi.T @ (xi - 1.0) / n


def empirical_fisher_diagonal(log: GradientLog) -> np.ndarray:
    """Diagonal of the averaged per-gradient outer products."""
    grads = log.as_matrix()
    return np.mean(grads**2, axis=0)


@dataclass
class FisherCovariance:
    """Diagonal approximation of the prior covariance, 1/(n * Fisher)."""

    diagonal: np.ndarray
    floored: bool

    @property
    def dim(self) -> int:
        return self.diagonal.shape[0]


def fisher_covariance(
    log: GradientLog, n: int, floor: float = 1e-8
) -> FisherCovariance:
    """Covariance estimate from the diagonal empirical Fisher, scaled by
    1/n, with a floor on each Fisher entry to keep the inverse finite."""
    if n < 1:
        raise ValueError("need a positive sample count")
    fisher = empirical_fisher_diagonal(log)
    floored = bool(np.any(fisher < floor))
    return FisherCovariance(
        diagonal=1.0 / (n * np.maximum(fisher, floor)), floored=floored
    )
