#!/usr/bin/env python3
"""
Unit Tests for Second-Order Splines

Tests the tridiagonal assembly and Thomas solver, the per-interval slope
coefficients, reconstruction of the tanh pieces, the sech bridge to the
exponential form, end conditions, smoothness and exact reproduction of the
spline space.
"""

import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from spline_core import (
    EndCondition, NotDominant, SplineError, TensionTooLarge, data_scale,
    make_partition, uniform_partition,
)
from cubic_ref import fit_cubic
from convergence import estimate_orders
from oracle_global import fit_s2_global
from spline_k2 import (
    ExpSpline2, TanhSpline2, TridiagonalSystem, _eval_exp, _eval_tanh, assemble_s2_system,
    assemble_t2_system, bridge_data, eval2, exp_coefficients, fit_s2, fit_t2,
    interval_slope_coefficients, interval_weights, solve_pair, thomas_solve,
    to_exp_representation,
)


def one_sided(spline, x, j, deriv):
    """Derivative of piece j at x, regardless of which piece owns x"""
    x = np.atleast_1d(float(x))
    j = np.atleast_1d(j)
    if isinstance(spline, TanhSpline2):
        return float(_eval_tanh(spline, x, j, deriv)[0])
    return float(_eval_exp(spline, x, j, deriv)[0])


def node_mismatch(spline, deriv):
    """Largest jump of a derivative across interior nodes"""
    nodes = spline.partition.nodes
    jumps = [abs(one_sided(spline, nodes[j], j, deriv) - one_sided(spline, nodes[j], j + 1, deriv))
             for j in range(1, len(nodes) - 1)]
    return max(jumps)


def random_problem(n_intervals=12, seed=11, a=0.0, b=3.0):
    partition = uniform_partition(a, b, n_intervals)
    rng = np.random.default_rng(seed)
    return partition, rng.uniform(-1.0, 1.0, n_intervals + 1)


class TestThomasSolver(unittest.TestCase):
    """Test pivot-free tridiagonal elimination"""

    def test_small_dominant_system(self):
        """Test [3 1 0; 1 3 1; 0 1 3] x = [1 0 1] gives (3, -2, 3)/7"""
        system = TridiagonalSystem(sub=np.array([1.0, 1.0]), diag=np.array([3.0, 3.0, 3.0]),
                                   sup=np.array([1.0, 1.0]), rhs=np.array([1.0, 0.0, 1.0]))
        np.testing.assert_allclose(thomas_solve(system), [3.0 / 7.0, -2.0 / 7.0, 3.0 / 7.0],
                                   rtol=0, atol=1e-15)

    def test_zero_margin_rejected(self):
        """Test a system with a row of zero dominance margin is refused"""
        system = TridiagonalSystem(sub=np.array([1.0, 1.0]), diag=np.array([2.0, 2.0, 2.0]),
                                   sup=np.array([1.0, 1.0]), rhs=np.array([1.0, 0.0, 1.0]))
        self.assertEqual(system.dominance_margin, 0.0)
        with self.assertRaises(NotDominant) as context:
            thomas_solve(system)
        self.assertEqual(context.exception.exit_code, 3)

    def test_matches_dense_solve(self):
        """Test Thomas against numpy on a random dominant system"""
        rng = np.random.default_rng(3)
        n = 40
        sub = rng.uniform(-1.0, 1.0, n - 1)
        sup = rng.uniform(-1.0, 1.0, n - 1)
        diag = 2.5 + rng.uniform(0.0, 1.0, n)
        rhs = rng.uniform(-1.0, 1.0, n)
        system = TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs)
        expected = np.linalg.solve(system.to_dense(), rhs)
        solution = thomas_solve(system)
        np.testing.assert_allclose(solution, expected, rtol=0, atol=1e-13)
        self.assertLess(system.residual(solution), 1e-14)


class TestSlopeCoefficients(unittest.TestCase):
    """Test the per-interval slope coefficients"""

    def test_cubic_limit(self):
        """Test the alpha -> 0 limits +-h/3, +-h/6"""
        h = 0.7
        coeff = interval_slope_coefficients(np.array([h]), 1e-6, np.array([0.3]), np.array([1.0]))
        self.assertAlmostEqual(float(coeff.l10[0]), h / 6.0, places=10)
        self.assertAlmostEqual(float(coeff.l11[0]), h / 3.0, places=10)
        self.assertAlmostEqual(float(coeff.l00[0]), -h / 3.0, places=10)
        self.assertAlmostEqual(float(coeff.l01[0]), -h / 6.0, places=10)

    def test_coefficients_reproduce_a_tanh_piece(self):
        """Test end slopes of an arbitrary tanh piece follow from its end second derivatives"""
        alpha = 0.8
        for u0, u1 in ((-0.4, 0.9), (0.5, 1.75), (-3.0, -2.2)):
            partition = make_partition([u0, u1])
            piece = TanhSpline2(alpha=alpha, partition=partition,
                                pieces=np.array([[0.3, -1.2, 0.7, 0.5]]),
                                node_second_derivs=np.zeros(2))
            h = u1 - u0
            slope = (eval2(piece, u1) - eval2(piece, u0)) / h
            d2_0, d2_1 = eval2(piece, u0, 2), eval2(piece, u1, 2)
            coeff = interval_slope_coefficients(np.array([h]), alpha, np.array([u0]), np.array([u1]))
            left = float(coeff.l00[0]) * d2_0 + float(coeff.l01[0]) * d2_1
            right = float(coeff.l10[0]) * d2_0 + float(coeff.l11[0]) * d2_1
            self.assertAlmostEqual(eval2(piece, u0, 1) - slope, left, places=12, msg=(u0, u1))
            self.assertAlmostEqual(eval2(piece, u1, 1) - slope, right, places=12, msg=(u0, u1))


class TestTanhFit(unittest.TestCase):
    """Test the C2 tanh spline"""

    def setUp(self):
        self.partition, self.values = random_problem()
        self.end = EndCondition.type_i(0.4, -0.6)
        self.spline = fit_t2(self.partition, self.values, 1.0, self.end)
        self.scale = data_scale(self.values, np.array([0.4, 0.6]))

    def test_interpolates(self):
        """Test node values"""
        np.testing.assert_allclose(self.spline.evaluate(self.partition.nodes), self.values,
                                   rtol=0, atol=1e-12 * self.scale)

    def test_c2_smoothness(self):
        """Test value, slope and curvature agree across interior nodes"""
        for deriv in (0, 1, 2):
            self.assertLess(node_mismatch(self.spline, deriv), 1e-9 * self.scale, deriv)

    def test_second_derivatives_at_nodes(self):
        """Test the pieces carry the solved node second derivatives"""
        nodes = self.partition.nodes
        for j in range(len(nodes) - 1):
            self.assertAlmostEqual(one_sided(self.spline, nodes[j], j + 1, 2),
                                   self.spline.node_second_derivs[j], places=9)

    def test_type_i_slopes(self):
        """Test end slopes match the Type I payload"""
        self.assertAlmostEqual(eval2(self.spline, 0.0, 1), 0.4, places=10)
        self.assertAlmostEqual(eval2(self.spline, 3.0, 1), -0.6, places=10)

    def test_type_ii_is_natural(self):
        """Test Type II pins t'' to zero at both ends"""
        spline = fit_t2(self.partition, self.values, 1.0, EndCondition.type_ii())
        self.assertAlmostEqual(eval2(spline, 0.0, 2), 0.0, places=10)
        self.assertAlmostEqual(eval2(spline, 3.0, 2), 0.0, places=10)

    def test_third_derivative(self):
        """Test the analytic third derivative against differences of the second"""
        step = 1e-5
        for x in (0.4, 1.6, 2.9):
            numeric = (eval2(self.spline, x + step, 2) - eval2(self.spline, x - step, 2)) / (2 * step)
            self.assertAlmostEqual(eval2(self.spline, x, 3), numeric, places=4)

    def test_reproduces_constants_and_lines(self):
        """Test constants and lines with matching Type I slopes are reproduced"""
        x = self.partition.nodes
        grid = np.linspace(0.0, 3.0, 301)
        constant = fit_t2(self.partition, np.full(len(x), 2.5), 1.0, EndCondition.type_i(0.0, 0.0))
        np.testing.assert_allclose(constant.evaluate(grid), 2.5, rtol=0, atol=1e-12 * 3.5)
        line = fit_t2(self.partition, 2.0 * x + 1.0, 1.0, EndCondition.type_i(2.0, 2.0))
        np.testing.assert_allclose(line.evaluate(grid), 2.0 * grid + 1.0, rtol=0, atol=1e-12 * 8.0)

    def test_bad_derivative_order(self):
        """Test deriv 4 is rejected"""
        with self.assertRaises(ValueError):
            eval2(self.spline, 1.0, 4)

    def test_records(self):
        """Test coefficient records of the tanh form"""
        records = self.spline.to_records()
        self.assertEqual(len(records), 12)
        self.assertEqual(records[0]['representation'], 'tanh')
        self.assertEqual(set(records[0]), {'interval', 'x0', 'x1', 'representation', 'p0', 'p1', 'q0', 'q1'})


class TestDominance(unittest.TestCase):
    """Test the tension regime guard"""

    def test_doubling_alpha_eventually_fails(self):
        """Test doubling alpha on a partition straddling 0 ends in a regime failure"""
        partition = make_partition([-1.5, -0.5, 0.5, 1.5])
        values = np.array([1.0, -1.0, 1.0, -1.0])
        alpha = 1.0
        failure = None
        while alpha < 2048.0:
            try:
                fit_t2(partition, values, alpha, EndCondition.type_ii())
            except SplineError as e:
                failure = e
                break
            alpha *= 2.0
        self.assertIsNotNone(failure)
        self.assertEqual(failure.exit_code, 3)

    def test_assembly_reports_positive_margin(self):
        """Test a moderate problem assembles with positive dominance margin"""
        partition, values = random_problem()
        system = assemble_t2_system(partition, values, 0.5, EndCondition.type_ii())
        self.assertGreater(system.dominance_margin, 0.0)
        self.assertEqual(system.size, 13)


class TestPolyhyperbolicFit(unittest.TestCase):
    """Test fit_s2, the exponential form and the sech bridge"""

    def setUp(self):
        self.partition, self.values = random_problem()
        self.scale = data_scale(self.values)

    def test_sech_bridge(self):
        """Test cosh(ax) t(x) equals the exponential-form evaluation"""
        grid = np.linspace(0.0, 3.0, 500)
        for end in (EndCondition.type_i(0.3, 0.2), EndCondition.type_ii()):
            bridged, t_end = bridge_data(self.partition, self.values, 1.0, end)
            t = fit_t2(self.partition, bridged, 1.0, t_end)
            s = to_exp_representation(t)
            expected = np.cosh(grid) * t.evaluate(grid)
            deviation = np.max(np.abs(s.evaluate(grid) - expected))
            self.assertLess(deviation, 1e-10 * (1.0 + np.max(np.abs(expected))), end.kind)

    def test_interpolates_and_is_c2(self):
        """Test fit_s2 interpolates and is C2 for every end type"""
        ends = (EndCondition.type_i(0.5, -0.5), EndCondition.type_ii(), EndCondition.type_iii(1.0, -2.0))
        for end in ends:
            spline = fit_s2(self.partition, self.values, 1.0, end)
            np.testing.assert_allclose(spline.evaluate(self.partition.nodes), self.values,
                                       rtol=0, atol=1e-10 * self.scale)
            for deriv in (0, 1, 2):
                self.assertLess(node_mismatch(spline, deriv), 1e-9 * (self.scale + 2.0), (end.kind, deriv))

    def test_end_conditions_hold_for_s(self):
        """Test the payloads constrain s itself, not the tanh companion"""
        spline = fit_s2(self.partition, self.values, 1.0, EndCondition.type_i(0.5, -0.5))
        self.assertAlmostEqual(eval2(spline, 0.0, 1), 0.5, places=9)
        self.assertAlmostEqual(eval2(spline, 3.0, 1), -0.5, places=9)
        spline = fit_s2(self.partition, self.values, 1.0, EndCondition.type_iii(1.0, -2.0))
        self.assertAlmostEqual(eval2(spline, 0.0, 2), 1.0, places=9)
        self.assertAlmostEqual(eval2(spline, 3.0, 2), -2.0, places=9)
        spline = fit_s2(self.partition, self.values, 1.0, EndCondition.type_ii())
        self.assertAlmostEqual(eval2(spline, 0.0, 2), 0.0, places=9)
        self.assertAlmostEqual(eval2(spline, 3.0, 2), 0.0, places=9)

    def test_reproduces_spline_space_members(self):
        """Test cosh(ax) and (1 + x)cosh(ax) + x sinh(ax) are reproduced"""
        alpha = 0.7
        partition = uniform_partition(0.0, 3.0, 8)
        x = partition.nodes
        grid = np.linspace(0.0, 3.0, 400)

        def member(z):
            return (1.0 + z) * np.cosh(alpha * z) + z * np.sinh(alpha * z)

        def member_d1(z):
            return (np.cosh(alpha * z) + alpha * (1.0 + z) * np.sinh(alpha * z)
                    + np.sinh(alpha * z) + alpha * z * np.cosh(alpha * z))

        cases = [
            (lambda z: np.cosh(alpha * z), lambda z: alpha * np.sinh(alpha * z)),
            (member, member_d1),
        ]
        for f, df in cases:
            end = EndCondition.type_i(df(x[0]), df(x[-1]))
            spline = fit_s2(partition, f(x), alpha, end)
            expected = f(grid)
            deviation = np.max(np.abs(spline.evaluate(grid) - expected))
            self.assertLess(deviation, 1e-9 * np.max(np.abs(expected)))

    def test_piece_ode_residual(self):
        """Test every piece solves (D^2 - a^2)^2 s = 0 at interval midpoints"""
        alpha = 1.0
        spline = fit_s2(self.partition, self.values, alpha, EndCondition.type_ii())
        midpoints = 0.5 * (self.partition.nodes[:-1] + self.partition.nodes[1:])
        step = 1e-3

        def g(z):
            return spline.evaluate(z, 2) - alpha * alpha * spline.evaluate(z)

        residual = ((g(midpoints + step) - 2.0 * g(midpoints) + g(midpoints - step)) / step ** 2
                    - alpha * alpha * g(midpoints))
        self.assertLess(np.max(np.abs(residual)), 1e-4 * self.scale)

    def test_records(self):
        """Test the exponential form's coefficient records"""
        spline = fit_s2(self.partition, self.values, 1.0, EndCondition.type_ii())
        records = spline.to_records()
        self.assertEqual(records[0]['representation'], 'exp_local')
        self.assertEqual(records[-1]['x1'], 3.0)

    def test_domain_away_from_origin(self):
        """Test fit_s2 on a domain that does not contain 0"""
        partition = uniform_partition(4.0, 7.0, 6)
        values = np.linspace(1.0, 2.0, 7) ** 2
        spline = fit_s2(partition, values, 0.5, EndCondition.type_i(1.0, 5.0))
        np.testing.assert_allclose(spline.evaluate(partition.nodes), values, rtol=1e-9)
        self.assertAlmostEqual(eval2(spline, 4.0, 1), 1.0, places=7)


class TestNodeWeights(unittest.TestCase):
    """Test the end-slope weights of the node form"""

    def test_cubic_limit(self):
        """Test w, tau, mu, nu tend to 1, 0, h/3, h/6"""
        weights = interval_weights(np.array([0.6]), 1e-7)
        self.assertAlmostEqual(float(weights.w[0]), 1.0, places=12)
        self.assertLess(abs(float(weights.tau[0])), 1e-13)
        self.assertAlmostEqual(float(weights.mu[0]), 0.2, places=12)
        self.assertAlmostEqual(float(weights.nu[0]), 0.1, places=12)

    def test_series_and_closed_forms_meet(self):
        """Test the weights are continuous where the series branch hands over"""
        weights = interval_weights(np.array([0.5 * (1.0 - 1e-12), 0.5 * (1.0 + 1e-12)]), 1.0)
        for name in ('w', 'tau', 'mu', 'nu'):
            below, above = getattr(weights, name)
            self.assertAlmostEqual(float(below), float(above), places=10, msg=name)

    def test_mu_exceeds_nu(self):
        """Test mu > nu > 0 from alpha*h = 1e-6 up to 300"""
        h = np.logspace(-6.0, 2.5, 86)
        weights = interval_weights(h, 1.0)
        self.assertTrue(np.all(weights.nu > 0.0))
        self.assertTrue(np.all(weights.mu > weights.nu))

    def test_weights_give_end_slopes(self):
        """Test s'(x_0), s'(x_1) of a piece against w D - tau y0 - mu g0 - nu g1 and its mirror"""
        partition = make_partition([0.0, 1.3])
        y0, y1, g0, g1 = 0.4, -0.7, 1.1, -0.2
        for alpha in (1e-3, 0.8, 40.0):
            spline = ExpSpline2(alpha=alpha, partition=partition, ends=np.array([[y0, y1, g0, g1]]))
            weights = interval_weights(np.array([1.3]), alpha)
            w, tau, mu, nu = (float(v[0]) for v in (weights.w, weights.tau, weights.mu, weights.nu))
            slope = (y1 - y0) / 1.3
            left = w * slope - tau * y0 - mu * g0 - nu * g1
            right = w * slope + tau * y1 + nu * g0 + mu * g1
            self.assertAlmostEqual(eval2(spline, 0.0, 1), left, delta=1e-11 * (1.0 + abs(left)), msg=alpha)
            self.assertAlmostEqual(eval2(spline, 1.3, 1), right, delta=1e-11 * (1.0 + abs(right)), msg=alpha)
            self.assertAlmostEqual(eval2(spline, 0.0, 2) - alpha * alpha * y0, g0, places=9)
            self.assertAlmostEqual(eval2(spline, 1.3, 2) - alpha * alpha * y1, g1, places=9)

    def test_constant_in_exponential_basis(self):
        """Test s = 1 on [0, 1] at alpha = 1 has A = C = 1/2 and B = D = 0"""
        coefficients = exp_coefficients(1.0, np.array([1.0]), np.array([[1.0, 1.0, -1.0, -1.0]]))
        np.testing.assert_allclose(coefficients[0], [0.5, 0.0, 0.5, 0.0], rtol=0, atol=1e-15)


class TestOffOriginDomains(unittest.TestCase):
    """Test fits on domains far from x = 0"""

    DOMAINS = ((10.0, 13.0), (20.0, 23.0))

    def test_s2_interpolates_and_is_c2(self):
        for a, b in self.DOMAINS:
            partition, values = random_problem(a=a, b=b)
            scale = data_scale(values)
            for end in (EndCondition.type_ii(), EndCondition.type_i(0.5, -0.5)):
                with self.subTest(domain=(a, b), end=end.kind.value):
                    spline = fit_s2(partition, values, 1.0, end)
                    np.testing.assert_allclose(spline.evaluate(partition.nodes), values,
                                               rtol=0, atol=1e-12 * scale)
                    for deriv in (0, 1, 2):
                        self.assertLess(node_mismatch(spline, deriv), 1e-9 * (scale + 2.0), deriv)

    def test_t2_interpolates_and_is_c2(self):
        for a, b in self.DOMAINS:
            partition, values = random_problem(a=a, b=b)
            scale = data_scale(values)
            for end in (EndCondition.type_ii(), EndCondition.type_i(0.5, -0.5)):
                with self.subTest(domain=(a, b), end=end.kind.value):
                    spline = fit_t2(partition, values, 1.0, end)
                    np.testing.assert_allclose(spline.evaluate(partition.nodes), values,
                                               rtol=0, atol=1e-11 * scale)
                    for deriv in (0, 1, 2):
                        self.assertLess(node_mismatch(spline, deriv), 1e-9 * (scale + 2.0), deriv)
            spline = fit_t2(partition, values, 1.0, EndCondition.type_i(0.5, -0.5))
            self.assertAlmostEqual(eval2(spline, a, 1), 0.5, places=9)
            self.assertAlmostEqual(eval2(spline, b, 1), -0.5, places=9)

    def test_polyhyperbolic_fit_is_translation_invariant(self):
        """Test shifting the nodes shifts the fit"""
        base, values = random_problem()
        grid = np.linspace(0.0, 3.0, 601)
        reference = fit_s2(base, values, 1.0, EndCondition.type_ii()).evaluate(grid)
        for a, b in self.DOMAINS:
            partition = uniform_partition(a, b, 12)
            shifted = fit_s2(partition, values, 1.0, EndCondition.type_ii()).evaluate(grid + a)
            np.testing.assert_allclose(shifted, reference, rtol=0, atol=1e-11 * data_scale(values))

    def test_bridge_agrees_with_direct_fit(self):
        """Test the sech bridge and the direct system give the same s away from 0"""
        partition, values = random_problem(a=10.0, b=13.0)
        grid = np.linspace(10.0, 13.0, 301)
        for end in (EndCondition.type_i(0.3, 0.2), EndCondition.type_ii()):
            direct = fit_s2(partition, values, 1.0, end).evaluate(grid)
            bridged, t_end = bridge_data(partition, values, 1.0, end)
            via_tanh = to_exp_representation(fit_t2(partition, bridged, 1.0, t_end)).evaluate(grid)
            self.assertLess(np.max(np.abs(via_tanh - direct)), 1e-9 * (1.0 + np.max(np.abs(direct))),
                            end.kind)


class TestSmallTension(unittest.TestCase):
    """Test the k=2 fits approach the cubic spline as alpha -> 0"""

    def setUp(self):
        self.partition, self.values = random_problem(n_intervals=16)
        self.grid = np.linspace(0.0, 3.0, 481)
        self.scale = data_scale(self.values)

    def deviation(self, fit, alpha, end):
        cubic = fit_cubic(self.partition, self.values, end).evaluate(self.grid)
        spline = fit(self.partition, self.values, alpha, end)
        return float(np.max(np.abs(spline.evaluate(self.grid) - cubic)))

    def test_s2_tends_to_cubic(self):
        for end in (EndCondition.type_i(0.5, -0.5), EndCondition.type_ii()):
            for alpha in (1e-4, 1e-5, 1e-6):
                with self.subTest(end=end.kind.value, alpha=alpha):
                    bound = (100.0 * alpha * alpha + 1e-13) * self.scale
                    self.assertLess(self.deviation(fit_s2, alpha, end), bound)

    def test_t2_tends_to_cubic(self):
        for end in (EndCondition.type_i(0.5, -0.5), EndCondition.type_ii()):
            for alpha in (1e-4, 1e-5, 1e-6):
                with self.subTest(end=end.kind.value, alpha=alpha):
                    bound = (1000.0 * alpha * alpha + 1e-12) * self.scale
                    self.assertLess(self.deviation(fit_t2, alpha, end), bound)

    def test_tiny_tension_sweep_is_second_order(self):
        """Test distance to the cubic falls like alpha^2 for alpha from 8e-4 to 1e-4"""
        self.partition, self.values = random_problem(n_intervals=4)
        cases = ((fit_s2, EndCondition.type_i(0.5, -0.5)), (fit_s2, EndCondition.type_ii()),
                 (fit_t2, EndCondition.type_i(0.5, -0.5)))
        for fit, end in cases:
            with self.subTest(fit=fit.__name__, end=end.kind.value):
                errors = [self.deviation(fit, alpha, end) for alpha in (8e-4, 4e-4, 2e-4, 1e-4)]
                self.assertTrue(all(e1 < e0 for e0, e1 in zip(errors, errors[1:])), errors)
                _, order = estimate_orders(errors)
                self.assertGreaterEqual(order, 1.9, errors)

    def test_records_become_cubics(self):
        """Test pieces below the cubic threshold are written out as cubics"""
        end = EndCondition.type_ii()
        cubic = fit_cubic(self.partition, self.values, end)
        for fit in (fit_s2, fit_t2):
            records = fit(self.partition, self.values, 1e-6, end).to_records()
            self.assertEqual({record['representation'] for record in records}, {'cubic_local'})
            for record, piece in zip(records, cubic.pieces):
                np.testing.assert_allclose([record[key] for key in ('c0', 'c1', 'c2', 'c3')], piece,
                                           rtol=0, atol=1e-8 * (1.0 + np.max(np.abs(piece))))


class TestSingleInterval(unittest.TestCase):
    """Test fits on one interval"""

    def setUp(self):
        self.partition = make_partition([0.0, 1.0])
        self.values = np.array([0.3, -0.4])
        self.end = EndCondition.type_i(1.0, 0.5)

    def test_s2_type_i_matches_dense(self):
        grid = np.linspace(0.0, 1.0, 101)
        for alpha in (1.0, 2.0):
            with self.subTest(alpha=alpha):
                fast = fit_s2(self.partition, self.values, alpha, self.end)
                dense = fit_s2_global(self.partition, self.values, alpha, self.end).evaluate(grid)
                np.testing.assert_allclose(fast.evaluate(grid), dense, rtol=0, atol=1e-10)
                self.assertAlmostEqual(eval2(fast, 0.0, 1), 1.0, places=10)
                self.assertAlmostEqual(eval2(fast, 1.0, 1), 0.5, places=10)

    def test_t2_type_i(self):
        for alpha in (1.0, 2.0):
            with self.subTest(alpha=alpha):
                spline = fit_t2(self.partition, self.values, alpha, self.end)
                np.testing.assert_allclose(spline.evaluate(self.partition.nodes), self.values,
                                           rtol=0, atol=1e-13)
                self.assertAlmostEqual(eval2(spline, 0.0, 1), 1.0, places=10)
                self.assertAlmostEqual(eval2(spline, 1.0, 1), 0.5, places=10)

    def test_pair_solver(self):
        system = TridiagonalSystem(sub=np.array([1.0]), diag=np.array([2.0, 3.0]),
                                   sup=np.array([1.0]), rhs=np.array([3.0, 5.0]))
        np.testing.assert_allclose(solve_pair(system), [0.8, 1.4], rtol=0, atol=1e-15)
        singular = TridiagonalSystem(sub=np.array([2.0]), diag=np.array([1.0, 4.0]),
                                     sup=np.array([2.0]), rhs=np.array([1.0, 1.0]))
        with self.assertRaises(TensionTooLarge):
            solve_pair(singular)


class TestPolyhyperbolicSystem(unittest.TestCase):
    """Test the tridiagonal system for s'' - a^2 s at the nodes"""

    def test_dominant_for_every_tension(self):
        partition, values = random_problem()
        for alpha in (1e-6, 0.01, 1.0, 30.0, 200.0):
            for end in (EndCondition.type_i(0.5, -0.5), EndCondition.type_ii()):
                with self.subTest(alpha=alpha, end=end.kind.value):
                    system = assemble_s2_system(partition, values, alpha, end)
                    self.assertGreater(system.dominance_margin, 0.0)
                    self.assertEqual(system.size, 13)

    def test_type_ii_rows_pin_g(self):
        """Test Type II rows fix g_0 = -a^2 y_0 and g_N = -a^2 y_N"""
        partition, values = random_problem()
        system = assemble_s2_system(partition, values, 2.0, EndCondition.type_ii())
        self.assertEqual(system.diag[0], 1.0)
        self.assertEqual(system.sup[0], 0.0)
        self.assertAlmostEqual(system.rhs[0], -4.0 * values[0], places=15)
        self.assertAlmostEqual(system.rhs[-1], -4.0 * values[-1], places=15)

    def test_large_tension_interpolates(self):
        partition, values = random_problem()
        spline = fit_s2(partition, values, 200.0, EndCondition.type_ii())
        np.testing.assert_allclose(spline.evaluate(partition.nodes), values, rtol=0, atol=1e-12)
        self.assertTrue(np.all(np.isfinite(spline.evaluate(np.linspace(0.0, 3.0, 301)))))


if __name__ == '__main__':
    unittest.main()
