"""Deterministic synthetic classification datasets.

Every generator balances the two classes to within one sample and splits
80/20 with floor(0.8 n) training samples after a seeded shuffle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError

__all__ = ["Dataset", "make_dataset", "GENERATORS"]


@dataclass(frozen=True)
class Dataset:
    name: str
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return self.x_train.shape[0] + self.x_test.shape[0]


def _class_counts(n: int) -> tuple[int, int]:
    return n // 2 + n % 2, n // 2


def _blobs2(n: int, noise: float, rng: np.random.Generator):
    """Two Gaussian clusters around (-2, 0) and (+2, 0)."""
    n0, n1 = _class_counts(n)
    centers = np.array([[-2.0, 0.0], [2.0, 0.0]])
    x = np.vstack(
        [
            centers[0] + noise * rng.standard_normal((n0, 2)),
            centers[1] + noise * rng.standard_normal((n1, 2)),
        ]
    )
    y = np.concatenate([np.zeros(n0, dtype=np.intp), np.ones(n1, dtype=np.intp)])
    return x, y


def _moons(n: int, noise: float, rng: np.random.Generator):
    """Two interleaved half-circles."""
    n0, n1 = _class_counts(n)
    t0 = np.linspace(0.0, np.pi, n0)
    t1 = np.linspace(0.0, np.pi, n1)
    outer = np.column_stack([np.cos(t0), np.sin(t0)])
    inner = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    x = np.vstack([outer, inner]) + noise * rng.standard_normal((n, 2))
    y = np.concatenate([np.zeros(n0, dtype=np.intp), np.ones(n1, dtype=np.intp)])
    return x, y


def _xor_rings(n: int, noise: float, rng: np.random.Generator):
    """Four rings at the quadrant centers, labeled by the XOR of the signs."""
    quadrants = [(1, 1), (-1, -1), (1, -1), (-1, 1)]  # first two: class 0
    n0, n1 = _class_counts(n)
    counts = [n0 - n0 // 2, n0 // 2, n1 - n1 // 2, n1 // 2]
    xs, ys = [], []
    for (sx, sy), count, label in zip(quadrants, counts, (0, 0, 1, 1)):
        angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
        radii = 0.75 + noise * rng.standard_normal(count)
        cx, cy = 1.5 * sx, 1.5 * sy
        xs.append(
            np.column_stack(
                [cx + radii * np.cos(angles), cy + radii * np.sin(angles)]
            )
        )
        ys.append(np.full(count, label, dtype=np.intp))
    return np.vstack(xs), np.concatenate(ys)


GENERATORS = {
    "blobs2": _blobs2,
    "moons": _moons,
    "xor-rings": _xor_rings,
}


def make_dataset(generator: str, n: int, noise: float, seed: int) -> Dataset:
    """Generate and split a dataset deterministically from its seed."""
    if generator not in GENERATORS:
        raise ConfigurationError(
            f"unknown generator {generator!r}; known: {sorted(GENERATORS)}"
        )
    if n < 10:
        raise ValueError(f"need n >= 10, got {n}")
    rng = np.random.default_rng(seed)
    x, y = GENERATORS[generator](n, noise, rng)
    perm = rng.permutation(n)
    x, y = x[perm], y[perm]
    n_train = int(np.floor(0.8 * n))
    return Dataset(
        name=generator,
        x_train=x[:n_train],
        y_train=y[:n_train],
        x_test=x[n_train:],
        y_test=y[n_train:],
        seed=seed,
    )
