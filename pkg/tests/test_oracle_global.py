#!/usr/bin/env python3
"""
Unit Tests for the Dense Global Oracle

The dense 4N x 4N solve shares no code with the tridiagonal path, so
agreement between the two is the main correctness check for fit_s2.
"""

import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from spline_core import (
    DenseTooLarge, EndCondition, NonFinite, SingularSystem, uniform_partition,
)
from spline_k2 import fit_s2
from oracle_global import (
    BASIS_GLOBAL, MAX_DENSE_INTERVALS, assemble_global_system, dense_solve,
    fit_s2_global,
)


END_CONDITIONS = (
    EndCondition.type_i(0.8, -0.3),
    EndCondition.type_ii(),
    EndCondition.type_iii(-1.0, 0.5),
)


def seeded_values(n_intervals, seed=5):
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, n_intervals + 1)


class TestEquivalence(unittest.TestCase):
    """Test the tridiagonal fit against the dense oracle"""

    def test_tridiagonal_matches_dense(self):
        grid = np.linspace(0.0, 3.0, 1201)
        for n_intervals in (4, 12, 20):
            partition = uniform_partition(0.0, 3.0, n_intervals)
            values = seeded_values(n_intervals)
            for alpha in (0.25, 1.0):
                for end in END_CONDITIONS:
                    with self.subTest(n=n_intervals, alpha=alpha, end=end.kind.value):
                        fast = fit_s2(partition, values, alpha, end).evaluate(grid)
                        dense = fit_s2_global(partition, values, alpha, end).evaluate(grid)
                        scale = 1.0 + np.max(np.abs(dense))
                        self.assertLess(np.max(np.abs(fast - dense)) / scale, 1e-8)

    def test_tridiagonal_matches_dense_away_from_origin(self):
        """Test agreement on [10, 13] and [20, 23] where global-x forms lose every digit"""
        values = seeded_values(12)
        for a, b in ((10.0, 13.0), (20.0, 23.0)):
            partition = uniform_partition(a, b, 12)
            grid = np.linspace(a, b, 601)
            for end in END_CONDITIONS:
                with self.subTest(domain=(a, b), end=end.kind.value):
                    fast = fit_s2(partition, values, 1.0, end)
                    dense = fit_s2_global(partition, values, 1.0, end)
                    reference = dense.evaluate(grid)
                    scale = 1.0 + np.max(np.abs(reference))
                    self.assertLess(np.max(np.abs(fast.evaluate(grid) - reference)) / scale, 1e-9)
                    np.testing.assert_allclose(fast.evaluate(partition.nodes), values, rtol=0, atol=1e-12)

    def test_single_interval(self):
        """Test N = 1 with Type I ends"""
        partition = uniform_partition(0.0, 1.0, 1)
        grid = np.linspace(0.0, 1.0, 101)
        for alpha in (1.0, 2.0):
            fast = fit_s2(partition, [0.3, -0.4], alpha, END_CONDITIONS[0]).evaluate(grid)
            dense = fit_s2_global(partition, [0.3, -0.4], alpha, END_CONDITIONS[0]).evaluate(grid)
            np.testing.assert_allclose(fast, dense, rtol=0, atol=1e-10)

    def test_global_basis_agrees_with_local(self):
        partition = uniform_partition(0.0, 3.0, 10)
        values = seeded_values(10, seed=9)
        end = EndCondition.type_ii()
        grid = np.linspace(0.0, 3.0, 301)
        local = fit_s2_global(partition, values, 1.0, end).evaluate(grid)
        shifted = fit_s2_global(partition, values, 1.0, end, basis=BASIS_GLOBAL).evaluate(grid)
        np.testing.assert_allclose(shifted, local, rtol=0, atol=1e-8 * (1.0 + np.max(np.abs(local))))

    def test_derivatives_agree(self):
        partition = uniform_partition(0.0, 3.0, 8)
        values = seeded_values(8, seed=2)
        end = EndCondition.type_i(0.0, 1.0)
        grid = np.linspace(0.0, 3.0, 401)
        fast = fit_s2(partition, values, 0.5, end)
        dense = fit_s2_global(partition, values, 0.5, end)
        for deriv in (1, 2):
            reference = dense.evaluate(grid, deriv)
            scale = 1.0 + np.max(np.abs(reference))
            self.assertLess(np.max(np.abs(fast.evaluate(grid, deriv) - reference)) / scale, 1e-7)


class TestAssembly(unittest.TestCase):
    """Test the dense system layout"""

    def test_row_counts(self):
        partition = uniform_partition(0.0, 1.0, 6)
        assembly = assemble_global_system(partition, seeded_values(6), 1.0, EndCondition.type_ii())
        self.assertEqual(assembly.matrix.shape, (24, 24))
        self.assertEqual(assembly.count('interpolation'), 12)
        self.assertEqual(assembly.count('continuity'), 10)
        self.assertEqual(assembly.count('end'), 2)
        self.assertEqual(assembly.row_kinds[:12], ['interpolation'] * 12)

    def test_interval_limit(self):
        partition = uniform_partition(0.0, 1.0, MAX_DENSE_INTERVALS + 1)
        with self.assertRaises(DenseTooLarge):
            assemble_global_system(partition, np.zeros(MAX_DENSE_INTERVALS + 2), 1.0,
                                   EndCondition.type_ii())

    def test_unknown_basis(self):
        partition = uniform_partition(0.0, 1.0, 2)
        with self.assertRaises(ValueError):
            assemble_global_system(partition, np.zeros(3), 1.0, EndCondition.type_ii(), basis='polar')


class TestDenseSolve(unittest.TestCase):
    """Test LU with partial pivoting and its failure modes"""

    def test_pivoting_solves_zero_leading_entry(self):
        solution = dense_solve([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0])
        np.testing.assert_allclose(solution, [3.0, 2.0])

    def test_singular_matrix(self):
        with self.assertRaises(SingularSystem) as context:
            dense_solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 2.0])
        self.assertEqual(context.exception.exit_code, 3)

    def test_zero_row(self):
        with self.assertRaises(SingularSystem):
            dense_solve([[1.0, 0.0], [0.0, 0.0]], [1.0, 0.0])

    def test_non_finite(self):
        with self.assertRaises(NonFinite):
            dense_solve([[1.0, np.nan], [0.0, 1.0]], [1.0, 0.0])

    def test_not_square(self):
        with self.assertRaises(ValueError):
            dense_solve(np.ones((2, 3)), [1.0, 0.0])


if __name__ == '__main__':
    unittest.main()
