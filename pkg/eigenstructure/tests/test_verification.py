from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from eigenstructure.exceptions import GenerationFailure, NotOutputNulling, UnknownOperation
from eigenstructure.verification import (
    CHECKS,
    MAX_DETAILS,
    VerifyOptions,
    check_ids,
    run_check,
    run_suite,
    trial_seed,
)


def failing_check(rng, options):
    return ['always fails']


def skipping_check(rng, options):
    raise GenerationFailure('nothing admissible')


def raising_check(rng, options):
    raise NotOutputNulling('not output-nulling')


class RunnerTest(SimpleTestCase):
    """
    Tests for the trial runner, with stand-in checks.
    """

    def test_trial_seeds(self):
        """
        Trial seeds are reproducible and differ between trials.
        """
        self.assertEqual(trial_seed(0, 3), trial_seed(0, 3))
        self.assertNotEqual(trial_seed(0, 3), trial_seed(0, 4))
        self.assertNotEqual(trial_seed(0, 3), trial_seed(1, 3))

    def test_failures_are_recorded(self):
        """
        A failing check reports the seed of its first trial and caps the details.
        """
        with patch.dict(CHECKS, {'fails': failing_check}):
            report = run_check('fails', VerifyOptions(trials=MAX_DETAILS + 5, seed=4))
        self.assertFalse(report.ok)
        self.assertEqual(report.failed, MAX_DETAILS + 5)
        self.assertEqual(report.first_failing_seed, trial_seed(4, 0))
        self.assertEqual(len(report.details), MAX_DETAILS)

    def test_generation_failures_are_skipped(self):
        """
        Trials whose instance cannot be drawn count as skipped, not failed.
        """
        with patch.dict(CHECKS, {'skips': skipping_check}):
            report = run_check('skips', VerifyOptions(trials=4))
        self.assertTrue(report.ok)
        self.assertEqual((report.trials, report.skipped), (0, 4))

    def test_numerical_errors_fail_the_trial(self):
        """
        A toolkit error inside a trial is a failure carrying the error name.
        """
        with patch.dict(CHECKS, {'raises': raising_check}):
            report = run_check('raises', VerifyOptions(trials=2))
        self.assertEqual(report.failed, 2)
        self.assertIn('NotOutputNulling', report.details[0]['message'])

    def test_unknown_check(self):
        """
        An unknown id raises UnknownOperation.
        """
        with self.assertRaises(UnknownOperation):
            run_suite('th99', VerifyOptions(trials=1))

    def test_check_ids(self):
        """
        Every registered check is listed, followed by 'all'.
        """
        ids = check_ids()
        self.assertEqual(ids[-1], 'all')
        for check in ('th1', 'th2', 'lattice', 'thlast', 'corollary-last', 'lemma-diag',
                      'lemma-reach', 'lemma-intersection', 'rstar-identity', 'placement',
                      'morse-zeros'):
            self.assertIn(check, ids)


class SuiteTest(SimpleTestCase):
    """
    Short runs of every registered check on systems up to eight states.
    """

    def setUp(self):
        self.options = VerifyOptions(trials=5, seed=7, nmax=8)

    def assertPasses(self, check):
        (report,) = run_suite(check, self.options)
        self.assertTrue(report.ok, report.details)
        self.assertEqual(report.passed + report.skipped, self.options.trials)

    def test_rank_identity(self):
        """
        rank [V_1 ... V_h] matches the Krylov ranks.
        """
        self.assertPasses('th1')

    def test_output_nulling_rank(self):
        """
        The Rosenbrock-mode rank identity holds with outputs.
        """
        self.assertPasses('th2')

    def test_lattice_maximum(self):
        """
        K_h is a friend-invariant subspace holding every assignable eigenvector.
        """
        self.assertPasses('lattice')

    def test_reachability_on_Kh(self):
        """
        Reachability on K_h has the dimension of K_h.
        """
        self.assertPasses('thlast')

    def test_controlled_invariant_in_krylov(self):
        """
        R_h is the largest controlled invariant subspace in the Krylov span.
        """
        self.assertPasses('corollary-last')

    def test_diagonal_krylov(self):
        """
        The diagonal Krylov bound holds.
        """
        self.assertPasses('lemma-diag')

    def test_self_reachability(self):
        """
        R* is its own reachability subspace.
        """
        self.assertPasses('lemma-reach')

    def test_intersection_formula(self):
        """
        The Markov-kernel formula matches the recursions.
        """
        self.assertPasses('lemma-intersection')

    def test_rstar_identity(self):
        """
        R* = V* ∩ S*.
        """
        self.assertPasses('rstar-identity')

    def test_placement(self):
        """
        Pole placement reproduces the requested spectrum.
        """
        self.assertPasses('placement')

    def test_morse_zeros(self):
        """
        The Morse decomposition accounts for the invariant zeros.
        """
        self.assertPasses('morse-zeros')

    def test_nearly_equal_eigenvalues_in_rank_identity(self):
        """
        Eight-state single-input trial with two eigenvalues 1e-3 apart.
        """
        self.assertEqual(CHECKS['th1'](np.random.default_rng(214246624), VerifyOptions()), [])

    def test_workers_do_not_change_the_report(self):
        """
        Threaded runs give the same counts and seeds as sequential ones.
        """
        sequential = run_check('lemma-diag', VerifyOptions(trials=6, seed=2, nmax=4))
        threaded = run_check('lemma-diag', VerifyOptions(trials=6, seed=2, nmax=4, workers=3))
        self.assertEqual(
            (sequential.passed, sequential.failed, sequential.first_failing_seed),
            (threaded.passed, threaded.failed, threaded.first_failing_seed),
        )
