import math

import numpy as np
from django.test import SimpleTestCase

from protocol import analytic
from protocol.analytic import ESIMode, ProtocolConfig
from protocol.distributions import DistributionSpec
from protocol.exceptions import InfeasibleParameterError, ParameterDomainError
from protocol.renewal import derive_constants

UNIFORM = DistributionSpec.uniform(0, 2)
UNIT = DistributionSpec.deterministic(1)
THIRD = 1 / 3


class ProtocolConfigTests(SimpleTestCase):
    def test_invariants(self):
        for kwargs in (
            {'mode': 'two_bit', 'p': 2, 'u': -1},
            {'mode': 'two_bit', 'p': 0},
            {'mode': 'one_bit', 'p': 2, 'theta1': 1},
            {'mode': 'zero_bit_discharge', 'p': 2, 'theta3': 0},
            {'mode': 'zero_bit', 'p': 2},
        ):
            with self.subTest(**kwargs), self.assertRaises(ParameterDomainError):
                ProtocolConfig(**kwargs)

    def test_mode_from_string(self):
        self.assertEqual(ProtocolConfig(mode='zero_bit', p=2, T=40).mode, ESIMode.ZERO_BIT)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            ProtocolConfig(mode='three_bit', p=2)


class TwoBitTests(SimpleTestCase):
    def setUp(self):
        self.k = derive_constants(UNIFORM, UNIFORM)

    def test_metrics(self):
        metrics = analytic.two_bit_metrics(self.k, 10, 2)
        self.assertEqual(metrics.mode, ESIMode.TWO_BIT)
        self.assertAlmostEqual(metrics.rho, 0.340426, delta=1e-6)
        self.assertAlmostEqual(metrics.omega, 0.063830, delta=1e-6)
        self.assertAlmostEqual(metrics.aux['mean_cycle'], 47 / 3, places=12)
        self.assertAlmostEqual(metrics.aux['mean_tau_c'], 31 / 3, places=12)
        self.assertAlmostEqual(metrics.aux['mean_energy_at_crossing'], 32 / 3, places=12)
        self.assertAlmostEqual(metrics.aux['mean_tau_d'], 16 / 3, places=12)

    def test_zero_threshold(self):
        metrics = analytic.two_bit_metrics(self.k, 0, 2)
        self.assertAlmostEqual(metrics.rho, 0.5, places=12)
        self.assertAlmostEqual(metrics.omega, 1.5, places=12)

    def test_large_threshold(self):
        metrics = analytic.two_bit_metrics(self.k, 1e6, 2)
        self.assertAlmostEqual(metrics.rho, THIRD, delta=1e-4)
        self.assertAlmostEqual(metrics.omega * 1e6 / (2 * metrics.rho), 1, delta=1e-3)
        self.assertAlmostEqual(analytic.asymptotic_cycle_speed(self.k, 2, 1e6) * 1e6, 2 / 3, places=12)

    def test_bounds(self):
        rho_limit, omega_max = analytic.two_bit_bounds(self.k, 2)
        self.assertAlmostEqual(rho_limit, THIRD, places=12)
        self.assertAlmostEqual(omega_max, 1.5, places=12)
        self.assertAlmostEqual(analytic.two_bit_bounds(self.k, 1e-9)[0], 1, places=6)
        k = derive_constants(UNIT, UNIT)
        self.assertAlmostEqual(analytic.two_bit_bounds(k, 1)[1], 2, places=12)

    def test_speed_decreases_with_threshold(self):
        _, omega_max = analytic.two_bit_bounds(self.k, 2)
        omegas = [analytic.two_bit_metrics(self.k, u, 2).omega for u in np.linspace(0, 1000, 101)]
        self.assertTrue(all(later < earlier for earlier, later in zip(omegas, omegas[1:])))
        self.assertTrue(all(omega <= omega_max + 1e-12 for omega in omegas))

    def test_opportunistic(self):
        metrics = analytic.opportunistic_metrics(self.k, 2)
        self.assertAlmostEqual(metrics.rho, 0.6, places=12)
        self.assertAlmostEqual(metrics.omega, 1.2, places=12)

    def test_opportunistic_deterministic(self):
        k = derive_constants(UNIT, UNIT)
        for p in (0.5, 1, 3):
            metrics = analytic.opportunistic_metrics(k, p)
            self.assertEqual(metrics.rho, 1)
            self.assertAlmostEqual(metrics.omega, p, places=12)

    def test_opportunistic_fast_consumer(self):
        metrics = analytic.opportunistic_metrics(self.k, 1e9)
        self.assertLess(metrics.rho, 1e-8)
        self.assertAlmostEqual(metrics.omega, 3, places=6)

    def test_power_domain(self):
        with self.assertRaises(ParameterDomainError):
            analytic.two_bit_metrics(self.k, 10, 0)


class OneBitTests(SimpleTestCase):
    def setUp(self):
        self.k = derive_constants(UNIFORM, UNIFORM)

    def test_switch_time(self):
        self.assertAlmostEqual(analytic.one_bit_switch_time(self.k, 10, 0.1), 13.696982, delta=1e-5)
        self.assertAlmostEqual(analytic.min_switch_time(self.k, 0.1), 0.937463, delta=1e-6)
        self.assertAlmostEqual(analytic.one_bit_switch_time(self.k, 10, 0.5), 31 / 3, places=12)

    def test_metrics(self):
        metrics = analytic.one_bit_metrics(self.k, 10, 2, 0.1)
        self.assertAlmostEqual(metrics.rho, THIRD, places=12)
        self.assertAlmostEqual(metrics.omega, 0.0486725, delta=1e-6)
        self.assertAlmostEqual(metrics.t_c, 13.696982, delta=1e-5)
        self.assertAlmostEqual(metrics.aux['omega_bound'], 0.711139, delta=1e-6)
        self.assertAlmostEqual(metrics.aux['mean_tau_d'], metrics.t_c / 2, places=12)
        self.assertGreaterEqual(metrics.aux['omega_bound'], metrics.omega)

    def test_symmetric_rates(self):
        for u in (0, 10, 100):
            self.assertAlmostEqual(analytic.one_bit_metrics(self.k, u, 1, 0.1).rho, 0.5, places=12)

    def test_duty_cycle_ignores_threshold_and_target(self):
        reference = analytic.one_bit_metrics(self.k, 10, 2, 0.1).rho
        for u in (0, 5, 50, 500):
            for theta1 in (0.01, 0.1, 0.3, 0.49):
                self.assertEqual(analytic.one_bit_metrics(self.k, u, 2, theta1).rho, reference)

    def test_switch_time_monotone(self):
        by_u = [analytic.one_bit_switch_time(self.k, u, 0.1) for u in range(0, 500, 5)]
        self.assertTrue(all(later > earlier for earlier, later in zip(by_u, by_u[1:])))
        thetas = [i / 100 for i in range(1, 50)]
        by_theta = [analytic.one_bit_switch_time(self.k, 10, theta) for theta in thetas]
        self.assertTrue(all(later < earlier for earlier, later in zip(by_theta, by_theta[1:])))

    def test_nonpositive_switch_time(self):
        with self.assertRaises(InfeasibleParameterError) as ctx:
            analytic.one_bit_switch_time(self.k, 0, 0.99)
        self.assertEqual(ctx.exception.bound, 'switch_time')
        self.assertEqual(ctx.exception.exit_code, 3)


class ZeroBitTests(SimpleTestCase):
    def setUp(self):
        self.k = derive_constants(UNIFORM, UNIFORM)

    def test_coefficients(self):
        coeffs = analytic.zero_bit_coefficients(self.k, 2, 40, 0.1)
        self.assertAlmostEqual(coeffs.a, 2, places=12)
        self.assertAlmostEqual(coeffs.b, 0.0547458, delta=1e-7)
        self.assertAlmostEqual(coeffs.c, 0.000228108, delta=1e-9)
        self.assertAlmostEqual(coeffs.d, 1 / 120, places=12)
        self.assertAlmostEqual(coeffs.K, 4, places=12)
        self.assertAlmostEqual(coeffs.L, -0.856499, delta=1e-5)
        self.assertAlmostEqual(coeffs.M, -0.253861, delta=1e-6)
        self.assertAlmostEqual(coeffs.T_plus, 0.380792, delta=1e-5)
        self.assertAlmostEqual(coeffs.f(coeffs.T_plus), 0, places=9)

    def test_coefficients_vanish_for_long_periods(self):
        coeffs = analytic.zero_bit_coefficients(self.k, 2, 1e12, 0.1)
        self.assertLess(max(coeffs.b, coeffs.c, coeffs.d), 1e-11)

    def test_negative_discriminant_clamps_root(self):
        k = derive_constants(UNIT, DistributionSpec.exponential(1))
        coeffs = analytic.zero_bit_coefficients(k, 0.1, 10, 0.1)
        self.assertLess(coeffs.L ** 2 - 4 * coeffs.K * coeffs.M, 0)
        self.assertEqual(coeffs.T_plus, 0.0)

    def test_duty_cycle(self):
        metrics = analytic.zero_bit_duty_cycle(self.k, 2, 40, 0.1)
        self.assertEqual(metrics.mode, ESIMode.ZERO_BIT)
        self.assertAlmostEqual(metrics.rho, 0.288372, delta=1e-5)
        self.assertEqual(metrics.omega, 1 / 40)
        self.assertAlmostEqual(metrics.t_c, (1 - metrics.rho) * 40, places=12)
        self.assertLess(abs(metrics.aux['residual']), 1e-9)
        self.assertAlmostEqual(metrics.aux['consumed_energy'], 23.0698, delta=1e-3)
        self.assertAlmostEqual(metrics.aux['T_lower'], 0.937463, delta=1e-6)
        self.assertAlmostEqual(metrics.aux['T_simplified'], 0.547458, delta=1e-6)
        self.assertNotAlmostEqual(metrics.aux['L_printed'], -0.856499, places=3)

    def test_long_period_limit(self):
        for T in (1e5, 1e6):
            self.assertAlmostEqual(analytic.zero_bit_duty_cycle(self.k, 2, T, 0.1).rho, THIRD, delta=1e-3)

    def test_period_below_minimum_wait(self):
        with self.assertRaises(InfeasibleParameterError) as ctx:
            analytic.zero_bit_duty_cycle(self.k, 2, 0.5, 0.1)
        self.assertEqual(ctx.exception.bound, 't_c_min')
        self.assertIn('t_c,min', str(ctx.exception))

    def test_period_below_upper_root(self):
        # slow consumer: T_plus = 7.6 sits above t_c,min = 0.94
        report = analytic.zero_bit_feasibility(self.k, 0.1, 5, 0.1)
        self.assertTrue(report.positive_duty)
        self.assertFalse(report.below_one)
        self.assertEqual(report.violated, 'T_plus')
        with self.assertRaises(InfeasibleParameterError) as ctx:
            analytic.zero_bit_duty_cycle(self.k, 0.1, 5, 0.1)
        self.assertEqual(ctx.exception.bound, 'T_plus')
        self.assertTrue(analytic.zero_bit_feasibility(self.k, 0.1, 10, 0.1).feasible)

    def test_outage_target_at_half(self):
        # quantile term vanishes: 1 - rho = d + a rho
        metrics = analytic.zero_bit_duty_cycle(self.k, 2, 40, 0.5)
        self.assertAlmostEqual(metrics.rho, 119 / 360, places=12)

    def test_outage_target_above_half(self):
        coeffs = analytic.zero_bit_coefficients(self.k, 2, 40, 0.6)
        self.assertEqual(coeffs.root_sign, -1.0)
        metrics = analytic.zero_bit_duty_cycle(self.k, 2, 40, 0.6)
        rho = metrics.rho
        self.assertTrue(119 / 360 < rho < 1)
        self.assertLess(abs(metrics.aux['residual']), 1e-9)
        self.assertLess(1 - rho - coeffs.d - coeffs.a * rho, 0)
        rhos = [analytic.zero_bit_duty_cycle(self.k, 2, 40, theta1).rho for theta1 in (0.1, 0.3, 0.5, 0.7, 0.9)]
        self.assertTrue(all(later > earlier for earlier, later in zip(rhos, rhos[1:])))

    def test_outage_target_above_half_hits_upper_root(self):
        # t_c,min is negative here, so only f(T) > 0 can fail
        report = analytic.zero_bit_feasibility(self.k, 2, 1, 0.99)
        self.assertLess(report.t_c_min, 0)
        self.assertEqual(report.violated, 'T_plus')
        with self.assertRaises(InfeasibleParameterError) as ctx:
            analytic.zero_bit_duty_cycle(self.k, 2, 1, 0.99)
        self.assertEqual(ctx.exception.bound, 'T_plus')

    def test_random_draws_agree_with_direct_check(self):
        rng = np.random.default_rng(1000)
        feasible = 0
        for _ in range(1000):
            a_spec = DistributionSpec.uniform(0, rng.uniform(0.5, 3))
            x_spec = DistributionSpec.gamma(rng.uniform(0.5, 3), rng.uniform(0.2, 2))
            k = derive_constants(a_spec, x_spec)
            p = rng.uniform(0.1, 5)
            theta1 = rng.uniform(0.01, 0.99)
            T = math.exp(rng.uniform(math.log(0.1), math.log(1000)))

            coeffs = analytic.zero_bit_coefficients(k, p, T, theta1)
            direct = (coeffs.a + coeffs.d) ** 2 > coeffs.b + coeffs.c and T > coeffs.t_c_min
            report = analytic.zero_bit_feasibility(k, p, T, theta1)
            self.assertEqual(report.feasible, direct)
            if report.feasible:
                feasible += 1
                metrics = analytic.zero_bit_duty_cycle(k, p, T, theta1)
                self.assertTrue(0 < metrics.rho < 1)
                self.assertLess(abs(analytic.zero_bit_residual(coeffs, metrics.rho)), 1e-9)
        self.assertGreater(feasible, 100)


class ZeroBitDischargeTests(SimpleTestCase):
    def setUp(self):
        self.k = derive_constants(UNIFORM, UNIFORM)

    def test_period(self):
        self.assertAlmostEqual(analytic.zero_bit_discharge_period(self.k, 13.697271, 2, 0.9), 22.48223, delta=1e-4)
        self.assertAlmostEqual(analytic.zero_bit_discharge_period(self.k, 10, 2, 0.5), 15, places=12)

    def test_deterministic_period(self):
        k = derive_constants(UNIT, UNIT)
        for theta3 in (0.1, 0.5, 0.9):
            self.assertEqual(analytic.zero_bit_discharge_period(k, 10, 1, theta3), 20)

    def test_period_without_consume_phase(self):
        with self.assertRaises(InfeasibleParameterError) as ctx:
            analytic.zero_bit_discharge_period(self.k, 1, 2, 0.01)
        self.assertEqual(ctx.exception.bound, 'discharge_period')

    def test_metrics(self):
        metrics = analytic.zero_bit_discharge_metrics(self.k, 10, 2, 0.1, 0.9)
        self.assertEqual(metrics.mode, ESIMode.ZERO_BIT_DISCHARGE)
        self.assertAlmostEqual(metrics.t_c, 13.696982, delta=1e-5)
        self.assertAlmostEqual(metrics.aux['T'], 22.48177, delta=1e-4)
        self.assertAlmostEqual(metrics.rho, 1 - metrics.t_c / metrics.aux['T'], places=12)
        self.assertAlmostEqual(metrics.omega, 1 / metrics.aux['T'], places=12)
        self.assertAlmostEqual(metrics.aux['rho_large_u'], THIRD, places=12)


class ModeConsistencyTests(SimpleTestCase):
    def test_all_modes_converge(self):
        k = derive_constants(UNIFORM, UNIFORM)
        limit = analytic.asymptotic_duty_cycle(k, 2)
        self.assertAlmostEqual(limit, THIRD, places=12)
        self.assertAlmostEqual(analytic.two_bit_metrics(k, 1e5, 2).rho, limit, delta=1e-3)
        self.assertAlmostEqual(analytic.one_bit_metrics(k, 1e5, 2, 0.1).rho, limit, delta=1e-3)
        self.assertAlmostEqual(analytic.zero_bit_duty_cycle(k, 2, 1e5, 0.1).rho, limit, delta=1e-3)

    def test_analyze_dispatch(self):
        k = derive_constants(UNIFORM, UNIFORM)
        cases = [
            (ProtocolConfig(mode='two_bit', u=10, p=2), 0.340426),
            (ProtocolConfig(mode='one_bit', u=10, p=2), THIRD),
            (ProtocolConfig(mode='zero_bit', p=2, T=40), 0.288372),
        ]
        for protocol, rho in cases:
            with self.subTest(mode=protocol.mode):
                metrics = analytic.analyze(k, protocol)
                self.assertEqual(metrics.mode, protocol.mode)
                self.assertAlmostEqual(metrics.rho, rho, delta=1e-5)
                self.assertTrue(0 < metrics.rho < 1)
                self.assertGreater(metrics.omega, 0)
        discharge = analytic.analyze(k, ProtocolConfig(mode='zero_bit_discharge', u=10, p=2))
        self.assertEqual(discharge.mode, ESIMode.ZERO_BIT_DISCHARGE)
