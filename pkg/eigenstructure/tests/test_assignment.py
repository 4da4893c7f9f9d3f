import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from eigenstructure.assignment import (
    build_Kh,
    diag_krylov_saturation,
    kernel_rank,
    min_distinct_spectrum,
    moore_check,
    place,
    reach_on_Kh,
    rebalanced_blocks,
    synthesize_feedback,
)
from eigenstructure.exceptions import (
    DependentSelection,
    EmptyOutputError,
    InputError,
    NonDiagonalInput,
    TooCloseToForbidden,
)
from eigenstructure.feedback import Assigned, complex_feedback
from eigenstructure.pencils import PencilKernel, SpectrumSpec, reach_pencil_kernel
from eigenstructure.sysmodel import SystemQuad

from .support import fixture


def closed_loop_eigenvalues(system, F):
    eigs = np.linalg.eigvals(system.A + system.B @ F)
    return sorted(eigs, key=lambda z: (round(z.real, 8), z.imag))


class MooreCheckTest(SimpleTestCase):
    """
    Tests for the existence conditions on a set of eigenpairs.
    """

    def setUp(self):
        self.system = fixture('double_integrator')

    def test_valid_pairs(self):
        """
        (λ, (1, λ)) for λ = -1, -2 can be assigned to the double integrator.
        """
        report = moore_check(self.system.A, self.system.B, [
            (-1.0, np.array([1.0, -1.0])),
            (-2.0, np.array([1.0, -2.0])),
        ])
        self.assertTrue(report.ok)

    def test_dependent_vectors(self):
        """
        The same vector twice is not independent.
        """
        v = np.array([1.0, -1.0])
        report = moore_check(self.system.A, self.system.B, [(-1.0, v), (-2.0, v)])
        self.assertFalse(report.independent)
        self.assertFalse(report.ok)

    def test_membership_failure(self):
        """
        (A - λI) v must lie in im B; e2 at λ = -1 gives (1, 1), which does not.
        """
        report = moore_check(self.system.A, self.system.B, [(-1.0, np.array([0.0, 1.0]))])
        self.assertEqual(report.membership_failures, (0,))

    def test_conjugate_vector_required(self):
        """
        A pair of conjugate eigenvalues needs conjugate eigenvectors.
        """
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        B = np.eye(2)
        v = np.array([1.0, 1.0j])
        report = moore_check(A, B, [(1j, v), (-1j, np.array([1.0, 2.0j]))])
        self.assertTrue(report.self_conjugate)
        self.assertIn(0, report.conjugate_failures)

    def test_lone_complex_value(self):
        """
        A complex value without its conjugate breaks self-conjugacy.
        """
        report = moore_check(self.system.A, self.system.B, [(1j, np.array([1.0, 1j]))])
        self.assertFalse(report.self_conjugate)


class SynthesisTest(SimpleTestCase):
    """
    Tests for feedback synthesis from explicit kernel selections.
    """

    def setUp(self):
        self.system = fixture('double_integrator')

    def kernel(self, lam):
        return PencilKernel(lam, np.array([[1.0], [lam]]), np.array([[lam ** 2]]))

    def test_explicit_selection(self):
        """
        Picking (1, λ; λ²) at λ = -1, -2 gives F = [-2, -3].
        """
        result = synthesize_feedback(self.system.A, self.system.B, [
            (self.kernel(-1.0), [1.0]),
            (self.kernel(-2.0), [1.0]),
        ])
        assert_allclose(result.F, [[-2.0, -3.0]], atol=1e-12)
        self.assertLess(result.residual_eig, 1e-12)

    def test_eigenvectors_of_A_give_zero_feedback(self):
        """
        Selecting eigenvectors of A with w = 0 gives F = 0.
        """
        A = np.diag([-1.0, -2.0])
        B = np.eye(2)
        result = synthesize_feedback(A, B, [
            (PencilKernel(-1.0, np.array([[1.0], [0.0]]), np.zeros((2, 1))), [1.0]),
            (PencilKernel(-2.0, np.array([[0.0], [1.0]]), np.zeros((2, 1))), [1.0]),
        ])
        assert_allclose(result.F, np.zeros((2, 2)), atol=1e-14)

    def test_dependent_selection(self):
        """
        Two selections along the same direction are rejected.
        """
        kernel = PencilKernel(-1.0, np.array([[1.0], [-1.0]]), np.array([[1.0]]))
        with self.assertRaises(DependentSelection):
            synthesize_feedback(self.system.A, self.system.B, [(kernel, [1.0]), (kernel, [2.0])])

    def test_empty_selection(self):
        """
        Nothing to synthesize from.
        """
        with self.assertRaises(DependentSelection):
            synthesize_feedback(self.system.A, self.system.B, [])


class PlacementTest(SimpleTestCase):
    """
    Tests for pole placement and K_h.
    """

    def test_place_real_spectrum(self):
        """
        λ = -1, -2 on the double integrator gives F = [-2, -3].
        """
        system = fixture('double_integrator')
        result = place(system, SpectrumSpec.of([-1.0, -2.0]))
        assert_allclose(result.F, [[-2.0, -3.0]], atol=1e-9)
        assert_allclose(closed_loop_eigenvalues(system, result.F), [-2.0, -1.0], atol=1e-9)

    def test_place_complex_pair(self):
        """
        λ = -1 ± i gives s² + 2s + 2, i.e. F = [-2, -2], and F is real.
        """
        system = fixture('double_integrator')
        result = place(system, SpectrumSpec.of([-1 + 1j, -1 - 1j]))
        self.assertFalse(np.iscomplexobj(result.F))
        assert_allclose(result.F, [[-2.0, -2.0]], atol=1e-9)
        self.assertLess(result.imag_part, 1e-12)

    def test_condition_warning_threshold(self):
        """
        cond_warn decides whether the eigenvector condition number is reported.
        """
        system = fixture('double_integrator')
        spectrum = SpectrumSpec.of([-1.0, -2.0])
        self.assertEqual(place(system, spectrum).warnings, ())
        (warning,) = place(system, spectrum, cond_warn=1.0).warnings
        self.assertIn('ill-conditioned', warning)

    def test_unpaired_complex_vector(self):
        """
        A lone eigenvector at -1 + i gives a feedback with a visible
        imaginary part when formed without its conjugate.
        """
        system = fixture('double_integrator')
        kernel = reach_pencil_kernel(system.A, system.B, -1 + 1j)
        entry = Assigned(kernel.lam, kernel.V[:, 0], kernel.W[:, 0])
        Fc = complex_feedback([entry], 2, 1)
        self.assertGreater(np.max(np.abs(Fc.imag)), 0.1)

    def test_place_forbidden_value(self):
        """
        The uncontrollable eigenvalue 2 cannot be requested.
        """
        with self.assertRaises(TooCloseToForbidden):
            place(fixture('diag_e1'), SpectrumSpec.of([2.0]))

    def test_place_ignores_output(self):
        """
        Placement works on (A, B) even when C and D are present.
        """
        system = fixture('square_feedthrough')
        result = place(system, SpectrumSpec.of([-4.0, -5.0]))
        assert_allclose(closed_loop_eigenvalues(system, result.F), [-5.0, -4.0], atol=1e-8)

    def test_Kh_of_chain(self):
        """
        Two eigenvalues give a two-dimensional K_h on the 3-chain.
        """
        result = build_Kh(fixture('chain3'), SpectrumSpec.of([-1.0, -2.0]))
        self.assertEqual(result.Kh.dim, 2)
        self.assertEqual(result.mode, 'reachability')
        self.assertEqual(result.rank, 2)

    def test_Kh_rosenbrock_default(self):
        """
        With an output, K_h defaults to Rosenbrock mode; the relative-degree
        fixture has R* = 0, so K_h = 0 away from the zero.
        """
        result = build_Kh(fixture('relative_degree'), SpectrumSpec.of([-1.0]))
        self.assertEqual(result.mode, 'rosenbrock')
        self.assertTrue(result.Kh.is_zero)

    def test_reach_on_Kh(self):
        """
        On the 3-chain, K_2 meets im B only at 0, so nothing is reachable
        along it; K_3 is the whole space.
        """
        system = fixture('chain3')
        self.assertTrue(reach_on_Kh(system, SpectrumSpec.of([-1.0, -2.0])).is_zero)
        self.assertTrue(reach_on_Kh(system, SpectrumSpec.of([-1.0, -2.0, -3.0])).is_full)
        self.assertTrue(reach_on_Kh(fixture('relative_degree'), SpectrumSpec.of([-1.0])).is_zero)

    def test_mode_validation(self):
        """
        Unknown modes and Rosenbrock mode without output are input errors.
        """
        with self.assertRaises(InputError):
            build_Kh(fixture('chain3'), SpectrumSpec.of([-1.0]), mode='hamiltonian')
        with self.assertRaises(EmptyOutputError):
            build_Kh(fixture('chain3'), SpectrumSpec.of([-1.0]), mode='rosenbrock')


class KernelRankTest(SimpleTestCase):
    """
    Tests for rank [V_1 ... V_h] with nearly equal eigenvalues.
    """

    def setUp(self):
        self.system = fixture('double_integrator')

    def kernels(self, *lams):
        return [reach_pencil_kernel(self.system.A, self.system.B, lam) for lam in lams]

    def test_nearly_equal_eigenvalues(self):
        """
        Kernels at -1 and -1 + 1e-13 are parallel to rounding; the divided
        difference still gives rank 2, the Krylov rank.
        """
        self.assertEqual(kernel_rank(self.kernels(-1.0, -1.0 + 1e-13)), 2)

    def test_separated_eigenvalues_are_left_alone(self):
        """
        Blocks at -1 and -2 are returned as computed.
        """
        kernels = self.kernels(-1.0, -2.0)
        blocks = rebalanced_blocks(kernels)
        assert_allclose(blocks[1], kernels[1].V)
        self.assertEqual(kernel_rank(kernels), 2)

    def test_close_pair_keeps_the_span(self):
        """
        The divided difference of a close pair spans the same space as the
        two original blocks.
        """
        kernels = self.kernels(-1.0, -1.0 + 1e-3)
        blocks = rebalanced_blocks(kernels)
        before = np.hstack([k.V for k in kernels])
        after = np.hstack(blocks)
        self.assertEqual(np.linalg.matrix_rank(np.hstack([before, after]), tol=1e-6), 2)
        self.assertGreater(np.linalg.norm(blocks[1]), 0.1)


class MinimalSpectrumTest(SimpleTestCase):
    """
    Tests for the smallest number of distinct eigenvalues.
    """

    def test_chain_needs_three(self):
        """
        The 3-chain has Krylov index 3.
        """
        self.assertEqual(min_distinct_spectrum(fixture('chain3')), 3)

    def test_full_input_needs_one(self):
        """
        With B = I a single eigenvalue suffices.
        """
        system = SystemQuad.from_matrices(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2))
        self.assertEqual(min_distinct_spectrum(system), 1)

    def test_zero_rstar(self):
        """
        R* = 0 needs no eigenvalues at all in Rosenbrock mode.
        """
        self.assertEqual(min_distinct_spectrum(fixture('relative_degree')), 0)


class DiagonalSaturationTest(SimpleTestCase):
    """
    Tests for the Krylov index of diagonal pairs.
    """

    def test_scalar_matrix(self):
        """
        Δ = λI saturates after one step.
        """
        self.assertEqual(diag_krylov_saturation(3.0 * np.eye(3), np.ones((3, 1))), 1)

    def test_distinct_values(self):
        """
        Two distinct values and a generic H need two steps.
        """
        self.assertEqual(diag_krylov_saturation(np.diag([1.0, 2.0]), np.ones((2, 1))), 2)

    def test_zero_H(self):
        """
        H = 0 reaches nothing.
        """
        self.assertEqual(diag_krylov_saturation(np.diag([1.0, 2.0]), np.zeros((2, 1))), 0)

    def test_non_diagonal(self):
        """
        Off-diagonal entries are rejected.
        """
        with self.assertRaises(NonDiagonalInput):
            diag_krylov_saturation(np.array([[1.0, 1.0], [0.0, 2.0]]), np.ones((2, 1)))
