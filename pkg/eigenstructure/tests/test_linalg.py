import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from eigenstructure.exceptions import AmbientMismatch, DimensionMismatch, NonFiniteEntry
from eigenstructure.linalg import (
    Subspace,
    Tol,
    as_matrix,
    contains,
    equals,
    image_basis,
    image_of,
    is_real,
    kernel_basis,
    orthogonal_complement,
    pinv,
    preimage,
    projector_residual,
    rank_of,
    subspace_distance,
    subspace_intersect,
    subspace_sum,
)


class RankTest(SimpleTestCase):
    """
    Tests for the shared rank convention.
    """

    def test_zero_matrix_has_rank_zero(self):
        """
        A zero matrix has rank 0, also when it is empty.
        """
        self.assertEqual(rank_of(np.zeros((3, 2))), 0)
        self.assertEqual(rank_of(np.zeros((0, 4))), 0)

    def test_tiny_singular_value_is_dropped(self):
        """
        Singular values below rel * sigma_1 * max(shape) do not count.
        """
        self.assertEqual(rank_of(np.diag([1.0, 1e-14])), 1)
        self.assertEqual(rank_of(np.diag([1.0, 1e-6])), 2)

    def test_scale_replaces_sigma_one(self):
        """
        A numerically-zero product keeps rank 0 when the map norm is passed as scale.
        """
        noise = np.full((2, 2), 1e-17)
        self.assertEqual(rank_of(noise), 1)
        self.assertEqual(rank_of(noise, scale=1.0), 0)

    def test_tolerance_validation(self):
        """
        Tol rejects a non-positive rel and a negative abs.
        """
        with self.assertRaises(ValueError):
            Tol(rel=0.0)
        with self.assertRaises(ValueError):
            Tol(abs=-1.0)


class SubspaceAlgebraTest(SimpleTestCase):
    """
    Tests for kernels, images, sums, intersections and preimages.
    """

    def setUp(self):
        self.e = np.eye(3)
        self.U = image_basis(self.e[:, [0, 1]])
        self.V = image_basis(self.e[:, [1, 2]])

    def test_kernel_of_row(self):
        """
        ker [1, 1] is the line spanned by (1, -1).
        """
        K = kernel_basis(np.array([[1.0, 1.0]]))
        self.assertEqual(K.dim, 1)
        assert_allclose(np.array([[1.0, 1.0]]) @ K.basis, 0.0, atol=1e-14)

    def test_kernel_of_empty_map_is_everything(self):
        """
        A map with no rows has the whole space as kernel.
        """
        self.assertTrue(kernel_basis(np.zeros((0, 3))).is_full)

    def test_intersection_and_sum(self):
        """
        span{e1, e2} ∩ span{e2, e3} = span{e2}, and the sum is R^3.
        """
        meet = subspace_intersect(self.U, self.V)
        self.assertEqual(meet.dim, 1)
        self.assertTrue(equals(meet, image_basis(self.e[:, [1]])))
        self.assertTrue(subspace_sum(self.U, self.V).is_full)

    def test_dimension_formula(self):
        """
        dim(U + V) + dim(U ∩ V) = dim U + dim V for random subspaces.
        """
        rng = np.random.default_rng(3)
        U = image_basis(rng.standard_normal((6, 4)))
        V = image_basis(rng.standard_normal((6, 3)))
        total = subspace_sum(U, V).dim + subspace_intersect(U, V).dim
        self.assertEqual(total, U.dim + V.dim)

    def test_preimage(self):
        """
        {x : M x ∈ span{e2}} for M = diag(1, 0) is span{e2}.
        """
        S = image_basis(np.array([[0.0], [1.0]]))
        P = preimage(np.diag([1.0, 0.0]), S)
        self.assertEqual(P.dim, 1)
        self.assertTrue(contains(P, S))

    def test_preimage_of_zero_subspace_is_kernel(self):
        """
        M^{-1}{0} = ker M.
        """
        M = np.array([[1.0, 1.0, 0.0]])
        self.assertEqual(preimage(M, Subspace.zero(1)).dim, 2)

    def test_orthogonal_complement(self):
        """
        The complement of span{e1, e2} in R^3 is span{e3}.
        """
        W = orthogonal_complement(self.U)
        self.assertEqual(W.dim, 1)
        assert_allclose(np.abs(W.basis[:, 0]), [0.0, 0.0, 1.0], atol=1e-14)

    def test_image_of_zero_subspace(self):
        """
        Mapping {0} gives {0} in the target space.
        """
        Z = image_of(np.ones((2, 3)), Subspace.zero(3))
        self.assertEqual((Z.dim, Z.ambient_dim), (0, 2))

    def test_ambient_mismatch(self):
        """
        Subspaces of different spaces cannot be combined.
        """
        with self.assertRaises(AmbientMismatch):
            subspace_intersect(self.U, Subspace.full(2))

    def test_distance_of_equal_subspaces(self):
        """
        Two bases of the same plane are at distance ~0; different dims at infinity.
        """
        other = image_basis(self.e[:, [0, 1]] @ np.array([[1.0, 1.0], [0.0, 2.0]]))
        self.assertLess(subspace_distance(self.U, other), 1e-14)
        self.assertEqual(subspace_distance(self.U, Subspace.full(3)), float('inf'))


class MatrixHelpersTest(SimpleTestCase):
    """
    Tests for input validation and small helpers.
    """

    def test_as_matrix_rejects_nan(self):
        """
        NaN entries raise NonFiniteEntry.
        """
        with self.assertRaises(NonFiniteEntry):
            as_matrix([[1.0, float('nan')]])

    def test_as_matrix_checks_shape(self):
        """
        A vector is not a matrix, and declared shapes are enforced.
        """
        with self.assertRaises(DimensionMismatch):
            as_matrix([1.0, 2.0])
        with self.assertRaises(DimensionMismatch):
            as_matrix([[1.0, 2.0]], rows=2)

    def test_is_real(self):
        """
        Imaginary parts below tol.abs count as real.
        """
        self.assertTrue(is_real(np.array([[1 + 1e-12j]])))
        self.assertFalse(is_real(np.array([[1 + 1e-3j]])))

    def test_pinv_of_invertible_matrix(self):
        """
        [[1, 1], [-1, -2]]^+ is the inverse [[2, 1], [-1, -1]].
        """
        assert_allclose(pinv(np.array([[1.0, 1.0], [-1.0, -2.0]])), [[2.0, 1.0], [-1.0, -1.0]], atol=1e-12)

    def test_preimage_under_shift(self):
        """
        {x : (x2, 0) ∈ span{e2}} = span{e1}.
        """
        S = image_basis(np.array([[0.0], [1.0]]))
        P = preimage(np.array([[0.0, 1.0], [0.0, 0.0]]), S)
        self.assertTrue(equals(P, image_basis(np.array([[1.0], [0.0]]))))

    def test_image_of_proportional_columns(self):
        """
        [[1, 2], [2, 4]] has the one-dimensional image spanned by (1, 2)/√5.
        """
        U = image_basis(np.array([[1.0, 2.0], [2.0, 4.0]]))
        self.assertEqual(U.dim, 1)
        assert_allclose(np.abs(U.basis[:, 0]), np.array([1.0, 2.0]) / np.sqrt(5.0), atol=1e-12)

    def test_pinv_of_rank_deficient_matrix(self):
        """
        The pseudo-inverse satisfies M M^+ M = M.
        """
        M = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert_allclose(M @ pinv(M) @ M, M, atol=1e-12)

    def test_subspace_is_immutable(self):
        """
        The basis array of a Subspace is read-only.
        """
        S = Subspace.full(2)
        with self.assertRaises(ValueError):
            S.basis[0, 0] = 5.0


class RandomizedIdentitiesTest(SimpleTestCase):
    """
    Pseudo-inverse and preimage identities on random matrices.
    """

    def setUp(self):
        self.rng = np.random.default_rng(20)

    def low_rank(self, rows, cols, rank):
        return self.rng.standard_normal((rows, rank)) @ self.rng.standard_normal((rank, cols))

    def test_penrose_identities(self):
        """
        M X M = M, X M X = X and both products are symmetric, for tall, wide
        and rank-deficient M.
        """
        for rows, cols, rank in [(5, 3, 3), (3, 6, 3), (6, 6, 2), (4, 7, 1)]:
            M = self.low_rank(rows, cols, rank)
            X = pinv(M)
            self.assertEqual(X.shape, (cols, rows))
            assert_allclose(M @ X @ M, M, atol=1e-10)
            assert_allclose(X @ M @ X, X, atol=1e-10)
            assert_allclose((M @ X).T, M @ X, atol=1e-10)
            assert_allclose((X @ M).T, X @ M, atol=1e-10)

    def test_preimage_maps_into_subspace(self):
        """
        M maps the preimage of S into S, and the preimage holds ker M.
        """
        for rows, cols, rank, sdim in [(5, 4, 4, 2), (4, 6, 3, 1), (6, 6, 2, 3)]:
            M = self.low_rank(rows, cols, rank)
            S = image_basis(self.rng.standard_normal((rows, sdim)))
            P = preimage(M, S)
            self.assertLess(projector_residual(S, M @ P.basis), 1e-9)
            self.assertTrue(contains(P, kernel_basis(M)))
