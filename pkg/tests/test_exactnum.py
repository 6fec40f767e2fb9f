import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from duality_lab import exactnum as xn
from duality_lab.errors import DegenerateSpectrumError, RankError

from conftest import fractions, rational_matrices


def leibniz_det(a):
    """Permutation-sum determinant; independent of the elimination code."""
    n = a.shape[0]
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = Fraction(-1) ** inversions
        for i, j in enumerate(perm):
            term *= a[i, j]
        total += term
    return total


class TestCharPoly:
    def test_zero_matrix(self):
        assert xn.char_poly(xn.zeros((2, 2), True)) == [1, 0, 0]

    def test_diagonal(self):
        assert xn.char_poly(xn.diag(xn.exact_array([2, 3]))) == [1, -5, 6]

    def test_two_by_two(self):
        assert xn.char_poly(xn.exact_array([[2, -1], [1, 3]])) == [1, -5, 7]

    def test_coefficients_are_fractions(self):
        cp = xn.char_poly(xn.exact_array([[Fraction(1, 3), 2], [5, Fraction(-7, 2)]]))
        assert all(isinstance(c, Fraction) for c in cp)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            xn.char_poly(xn.zeros((2, 3), True))

    @given(st.integers(1, 5).flatmap(rational_matrices))
    def test_matches_leibniz_oracle(self, a):
        n = a.shape[0]
        cp = xn.char_poly(a)
        assert cp[0] == 1
        assert len(cp) == n + 1
        for lam in range(n + 1):
            assert xn.polyval(cp, Fraction(lam)) == leibniz_det(lam * xn.eye(n, True) - a)

    @given(st.integers(1, 5).flatmap(rational_matrices))
    def test_trace_and_determinant(self, a):
        n = a.shape[0]
        cp = xn.char_poly(a)
        assert cp[1] == -np.trace(a)
        assert cp[-1] == (-1) ** n * xn.det(a)

    def test_float_backend(self):
        a = np.array([[2, -1], [1, 3]], dtype=complex)
        np.testing.assert_allclose(xn.char_poly(a), [1, -5, 7], atol=1e-14)


class TestDet:
    @given(st.integers(1, 4).flatmap(rational_matrices))
    def test_exact_matches_leibniz(self, a):
        assert xn.det(a) == leibniz_det(a)

    def test_singular(self):
        assert xn.det(xn.exact_array([[1, 2], [2, 4]])) == 0


class TestSolve:
    @given(st.integers(1, 4).flatmap(rational_matrices), st.data())
    def test_exact_solution(self, a, data):
        if leibniz_det(a) == 0:
            return
        b = xn.exact_array(data.draw(st.lists(fractions(), min_size=len(a), max_size=len(a))))
        x = xn.solve(a, b)
        assert all(v == 0 for v in a @ x - b)

    def test_inverse(self):
        a = xn.exact_array([[2, 1], [7, 4]])
        assert xn.is_zero(a @ xn.inv(a) - xn.eye(2, True))


class TestEigSorted:
    def test_diagonal_order(self):
        vals, psi = xn.eig_sorted(np.diag([3.0, 1.0]).astype(complex))
        np.testing.assert_allclose(vals, [1, 3])
        np.testing.assert_allclose(np.abs(psi), [[0, 1], [1, 0]])

    def test_complex_pair_order(self):
        vals, _ = xn.eig_sorted(xn.complex_array([[2, -1], [1, 3]]))
        root = math.sqrt(3) / 2
        np.testing.assert_allclose(vals, [2.5 - 1j * root, 2.5 + 1j * root], atol=1e-14)

    def test_random_reconstruction(self, rng):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        vals, psi = xn.eig_sorted(a)
        assert xn.max_abs(a @ psi - psi * vals) <= 1e-9 * xn.max_abs(a)

    def test_normalisation(self, rng):
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        _, psi = xn.eig_sorted(a)
        for col in psi.T:
            assert col[np.argmax(np.abs(col))] == 1

    def test_repeated_calls_identical(self, rng):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        v1, p1 = xn.eig_sorted(a)
        v2, p2 = xn.eig_sorted(a)
        assert np.array_equal(v1, v2) and np.array_equal(p1, p2)

    def test_degenerate_spectrum(self):
        with pytest.raises(DegenerateSpectrumError):
            xn.eig_sorted(np.eye(3, dtype=complex))

    @given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=8))
    def test_lex_order_is_sorted(self, values):
        order = xn.lex_order(values, tol=0.0)
        keyed = [(complex(values[k]).real, complex(values[k]).imag) for k in order]
        assert keyed == sorted(keyed)


class TestRankOne:
    def test_example(self):
        xi, eta = xn.rank_one_factor(xn.exact_array([[1, 2], [3, 6]]))
        assert list(xi) == [Fraction(1, 3), 1]
        assert list(eta) == [3, 6]

    @pytest.mark.parametrize("bad", [[[0, 0], [0, 0]], [[1, 0], [0, 1]]])
    def test_rank_errors(self, bad):
        with pytest.raises(RankError):
            xn.rank_one_factor(xn.exact_array(bad))

    @given(st.lists(fractions(), min_size=3, max_size=3),
           st.lists(fractions(), min_size=3, max_size=3))
    def test_outer_round_trip(self, col, row):
        a = xn.outer(xn.exact_array(col), xn.exact_array(row))
        if xn.is_zero(a):
            return
        xi, eta = xn.rank_one_factor(a)
        assert xn.is_zero(xn.outer(xi, eta) - a)
        assert max(abs(v) for v in xi) == 1
        assert xn.minors_vanish(a)


class TestJson:
    @given(fractions(97))
    def test_fraction_round_trip(self, f):
        assert xn.scalar_from_json(xn.scalar_to_json(f)) == f

    @given(st.complex_numbers(allow_nan=False, allow_infinity=False))
    def test_complex_round_trip(self, c):
        assert xn.scalar_from_json(xn.scalar_to_json(c)) == c

    def test_formats(self):
        assert xn.scalar_to_json(Fraction(-3, 7)) == "-3/7"
        assert xn.scalar_to_json(1 + 2j) == [1.0, 2.0]
