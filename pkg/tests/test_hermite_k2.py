#!/usr/bin/env python3
"""
Unit Tests for Hermite Polyhyperbolic Fits and Shape Search

Tests C1 interpolation of values and slopes, reproduction of the
exponential space, the cubic Hermite limit, sampled shape checks and the
alpha-halving search.
"""

import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from spline_core import InvalidStudy, make_dataset, make_partition, uniform_partition
from spline_k2 import _eval_exp
from convergence import estimate_orders
from cubic_ref import fit_cubic_hermite, monotone_slopes
from hermite_k2 import (
    HERMITE_LIMIT_THRESHOLD, data_has_property, find_shape_preserving_alpha,
    fit_hermite_s2, shape_check,
)


def sin_problem(n_intervals=12):
    partition = uniform_partition(0.0, 3.0, n_intervals)
    x = partition.nodes
    return partition, np.sin(x), np.cos(x)


class TestHermiteFit(unittest.TestCase):
    """Test the local C1 fit"""

    def setUp(self):
        self.partition, self.values, self.slopes = sin_problem()
        self.spline = fit_hermite_s2(self.partition, self.values, self.slopes, 1.0)

    def test_matches_values_and_slopes_on_both_sides(self):
        """Test each node is interpolated in value and slope by both adjacent pieces"""
        nodes = self.partition.nodes
        for j in range(1, len(nodes) - 1):
            x = np.array([nodes[j]])
            for piece in (j, j + 1):
                index = np.array([piece])
                self.assertAlmostEqual(float(_eval_exp(self.spline, x, index, 0)[0]), self.values[j], places=11)
                self.assertAlmostEqual(float(_eval_exp(self.spline, x, index, 1)[0]), self.slopes[j], places=10)

    def test_slopes_from_dataset(self):
        data = make_dataset(self.partition, self.values, slopes=self.slopes)
        spline = fit_hermite_s2(self.partition, data, None, 1.0)
        np.testing.assert_allclose(spline.ends, self.spline.ends, rtol=0, atol=1e-14)
        np.testing.assert_allclose(spline.pieces, self.spline.pieces, rtol=0, atol=1e-14)

    def test_smoothness_and_records(self):
        self.assertEqual(self.spline.smoothness, 'C1')
        self.assertFalse(self.spline.all_limit)
        self.assertEqual(self.spline.to_records()[0]['representation'], 'exp_local')

    def test_reproduces_exponential_space(self):
        """Test cosh(ax) and x sinh(ax) with exact slopes come back unchanged"""
        alpha = 1.0
        partition = uniform_partition(0.0, 3.0, 6)
        x = partition.nodes
        grid = np.linspace(0.0, 3.0, 301)
        cases = [
            (np.cosh, lambda z: np.sinh(z)),
            (lambda z: z * np.sinh(z), lambda z: np.sinh(z) + z * np.cosh(z)),
        ]
        for f, df in cases:
            spline = fit_hermite_s2(partition, f(x), df(x), alpha)
            expected = f(grid)
            self.assertLess(np.max(np.abs(spline.evaluate(grid) - expected)),
                            1e-9 * np.max(np.abs(expected)))

    def test_cubic_hermite_limit(self):
        """Test the gap to the cubic Hermite fit shrinks like alpha^2"""
        cubic = fit_cubic_hermite(self.partition, self.values, self.slopes)
        grid = np.linspace(0.0, 3.0, 601)
        gaps = []
        for alpha in (0.2, 0.1):
            spline = fit_hermite_s2(self.partition, self.values, self.slopes, alpha)
            gaps.append(np.max(np.abs(spline.evaluate(grid) - cubic.evaluate(grid))))
        self.assertGreater(gaps[0] / gaps[1], 3.0)
        self.assertLess(gaps[0] / gaps[1], 5.0)

    def test_tiny_alpha_uses_cubic_pieces(self):
        alpha = 0.5 * HERMITE_LIMIT_THRESHOLD / self.partition.hbar
        spline = fit_hermite_s2(self.partition, self.values, self.slopes, alpha)
        cubic = fit_cubic_hermite(self.partition, self.values, self.slopes)
        self.assertTrue(spline.all_limit)
        grid = np.linspace(0.0, 3.0, 101)
        np.testing.assert_allclose(spline.evaluate(grid), cubic.evaluate(grid), rtol=0, atol=1e-7)
        record = spline.to_records()[0]
        self.assertEqual(record['representation'], 'cubic_local')
        np.testing.assert_allclose([record[key] for key in ('c0', 'c1', 'c2', 'c3')],
                                   cubic.pieces[0], rtol=0, atol=1e-7)

    def test_small_alpha_sweep_is_second_order(self):
        """Test the gap to the cubic Hermite fit keeps falling like alpha^2 down to alpha = 1e-3"""
        cubic = fit_cubic_hermite(self.partition, self.values, self.slopes)
        grid = np.linspace(0.0, 3.0, 601)
        gaps = []
        for alpha in (0.008, 0.004, 0.002, 0.001):
            spline = fit_hermite_s2(self.partition, self.values, self.slopes, alpha)
            gaps.append(float(np.max(np.abs(spline.evaluate(grid) - cubic.evaluate(grid)))))
        self.assertTrue(all(g1 < g0 for g0, g1 in zip(gaps, gaps[1:])), gaps)
        _, order = estimate_orders(gaps)
        self.assertGreaterEqual(order, 1.9, gaps)

    def test_domain_away_from_origin(self):
        """Test values and slopes are matched on [20, 23]"""
        partition = uniform_partition(20.0, 23.0, 12)
        x = partition.nodes
        spline = fit_hermite_s2(partition, np.sin(x), np.cos(x), 1.0)
        np.testing.assert_allclose(spline.evaluate(x), np.sin(x), rtol=0, atol=1e-12)
        np.testing.assert_allclose(spline.evaluate(x[:-1], 1), np.cos(x[:-1]), rtol=0, atol=1e-10)
        self.assertAlmostEqual(spline.evaluate(23.0, 1), np.cos(23.0), places=10)


class TestShapeCheck(unittest.TestCase):
    """Test sampled shape verification"""

    def test_data_properties(self):
        self.assertTrue(data_has_property([0.0, 1.0, 1.0, 2.0], 'monotone_up'))
        self.assertFalse(data_has_property([0.0, 1.0, 0.5], 'monotone_up'))
        self.assertTrue(data_has_property([3.0, 1.0, 1.0], 'monotone_down'))
        self.assertTrue(data_has_property([1.0, 0.0, 1.0, 4.0], 'convex'))
        self.assertFalse(data_has_property([0.0, -1e-3, 2.0], 'positive'))
        with self.assertRaises(InvalidStudy):
            data_has_property([1.0, 2.0], 'concave')

    def test_positive_spline_holds(self):
        partition = uniform_partition(-1.0, 1.0, 4)
        x = partition.nodes
        spline = fit_hermite_s2(partition, np.cosh(x), np.sinh(x), 1.0)
        report = shape_check(spline, 'positive', 256)
        self.assertTrue(report.holds)
        self.assertIsNone(report.witness)
        self.assertEqual(report.to_dict()['resolution'], 256)

    def test_overshoot_is_witnessed(self):
        """Test steep slopes on flat data produce a located violation"""
        partition = make_partition([0.0, 1.0, 2.0])
        spline = fit_hermite_s2(partition, [0.0, 0.0, 0.0], [5.0, 5.0, 5.0], 0.5)
        report = shape_check(spline, 'monotone_down', 128)
        self.assertFalse(report.holds)
        self.assertEqual(report.witness, 0.0)
        report = shape_check(spline, 'positive', 128)
        self.assertFalse(report.holds)
        self.assertGreater(report.witness, 0.0)
        self.assertLess(report.witness, 1.0)

    def test_bad_arguments(self):
        partition, values, slopes = sin_problem(4)
        spline = fit_hermite_s2(partition, values, slopes, 1.0)
        with self.assertRaises(InvalidStudy):
            shape_check(spline, 'positive', 16)
        with self.assertRaises(InvalidStudy):
            shape_check(spline, 'wiggly')


class TestShapeSearch(unittest.TestCase):
    """Test the alpha-halving search"""

    def test_step_data_with_monotone_slopes(self):
        partition = make_partition([0.0, 1.0, 2.0, 3.0, 4.0])
        values = np.array([0.0, 0.0, 0.1, 10.0, 10.0])
        slopes = monotone_slopes(partition, values)
        result = find_shape_preserving_alpha(partition, values, slopes, 'monotone_up',
                                             alpha0=1.0, resolution=512)
        self.assertTrue(result.found)
        self.assertTrue(result.report.holds)
        self.assertLessEqual(result.alpha, 1.0)
        self.assertEqual(result.alpha, 2.0 ** -result.halvings)

    def test_stops_once_every_interval_is_cubic(self):
        """Test a shape the data cannot carry ends at the cubic limit"""
        partition = make_partition([0.0, 1.0, 2.0, 3.0])
        values = np.array([0.0, 1.0, 0.5, 2.0])
        slopes = np.array([1.0, 0.0, 0.0, 1.0])
        result = find_shape_preserving_alpha(partition, values, slopes, 'monotone_up',
                                             alpha0=1.0, resolution=128)
        self.assertFalse(result.found)
        self.assertTrue(result.stopped_early)
        self.assertEqual(result.halvings, 14)
        self.assertFalse(result.to_dict()['report']['holds'])

    def test_halving_budget(self):
        partition = make_partition([0.0, 1.0, 2.0, 3.0])
        values = np.array([0.0, 1.0, 0.5, 2.0])
        slopes = np.array([1.0, 0.0, 0.0, 1.0])
        result = find_shape_preserving_alpha(partition, values, slopes, 'monotone_up',
                                             alpha0=1.0, resolution=64, max_halvings=3)
        self.assertFalse(result.found)
        self.assertFalse(result.stopped_early)
        self.assertEqual(result.halvings, 3)
        self.assertEqual(result.alpha, 0.125)


if __name__ == '__main__':
    unittest.main()
