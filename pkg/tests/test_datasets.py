"""Synthetic dataset generators: determinism, balance, split, separability."""

import numpy as np
import pytest
from scipy.optimize import linprog

from wdl.exceptions import ConfigurationError
from wdl.harness.datasets import GENERATORS, make_dataset


def linearly_separable(x, y):
    """LP feasibility for a margin-1 separating hyperplane."""
    signs = 2.0 * y - 1.0
    # -(sign * (w.x + b)) <= -1
    a_ub = -signs[:, None] * np.column_stack([x, np.ones(len(y))])
    b_ub = -np.ones(len(y))
    res = linprog(
        c=np.zeros(x.shape[1] + 1),
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(None, None)] * (x.shape[1] + 1),
        method="highs",
    )
    return res.success


class TestMakeDataset:
    @pytest.mark.parametrize("generator", sorted(GENERATORS))
    def test_deterministic(self, generator):
        a = make_dataset(generator, 120, 0.2, 9)
        b = make_dataset(generator, 120, 0.2, 9)
        assert np.array_equal(a.x_train, b.x_train)
        assert np.array_equal(a.y_test, b.y_test)

    @pytest.mark.parametrize("generator", sorted(GENERATORS))
    @pytest.mark.parametrize("n", [100, 101, 103])
    def test_balance_and_split(self, generator, n):
        ds = make_dataset(generator, n, 0.2, 1)
        labels = np.concatenate([ds.y_train, ds.y_test])
        counts = np.bincount(labels, minlength=2)
        assert abs(counts[0] - counts[1]) <= 1
        assert ds.x_train.shape[0] == int(np.floor(0.8 * n))
        assert ds.x_test.shape[0] == n - int(np.floor(0.8 * n))

    def test_blobs2_separable_at_zero_noise(self):
        ds = make_dataset("blobs2", 100, 0.0, 2)
        x = np.vstack([ds.x_train, ds.x_test])
        y = np.concatenate([ds.y_train, ds.y_test])
        # zero noise collapses each class to a single point
        assert len(np.unique(x[y == 0], axis=0)) == 1
        assert len(np.unique(x[y == 1], axis=0)) == 1
        assert linearly_separable(x, y)

    def test_blobs2_separable_with_noise(self):
        ds = make_dataset("blobs2", 200, 0.4, 5)
        x = np.vstack([ds.x_train, ds.x_test])
        y = np.concatenate([ds.y_train, ds.y_test])
        assert linearly_separable(x, y)

    def test_xor_rings_not_linearly_separable(self):
        ds = make_dataset("xor-rings", 200, 0.1, 3)
        x = np.vstack([ds.x_train, ds.x_test])
        y = np.concatenate([ds.y_train, ds.y_test])
        assert not linearly_separable(x, y)

    def test_unknown_generator(self):
        with pytest.raises(ConfigurationError):
            make_dataset("spirals", 100, 0.1, 0)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            make_dataset("blobs2", 9, 0.1, 0)
