from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from duality_lab import exactnum as xn
from duality_lab import spectral_models as sm
from duality_lab.errors import DegenerateSpectrumError, GenericityError, PoleError
from duality_lab.instances import random_multipole, sub_seed
from duality_lab.spectral_models import (MultiPoleLax, RVariant, SpectralKind, cybe_residual,
                                         gauge_matrix, gauge_matrix_recursive, partial_trace_2,
                                         r_matrix, trig_gaudin_raw, xxx_monodromy_eval,
                                         xxx_monodromy_product, xxz_local_lax, xxz_monodromy,
                                         xxz_monodromy_eval)

from conftest import distinct_fractions, fractions

E = xn.exact_array
TEST_POINTS = [Fraction(k, 1) + Fraction(2, 11) for k in range(-2, 3)]


def rational_vectors(n, bound=9):
    return st.lists(fractions(bound), min_size=n, max_size=n).map(E)


class TestMultiPoleLax:
    def test_scalar_gaudin(self):
        L = MultiPoleLax(SpectralKind.RATIONAL_GAUDIN, E([0]), E([0]), E([[1]]), E([[1]]))
        assert L.evaluate(Fraction(3))[0, 0] == Fraction(1, 3)

    @pytest.mark.parametrize("kind", list(SpectralKind))
    def test_infinity_is_twist(self, kind):
        L = random_multipole(kind, 3, 2, 4)
        assert xn.is_zero(L.evaluate(float("inf")) - xn.diag(L.twist))

    def test_pole_evaluation(self):
        L = random_multipole(SpectralKind.RATIONAL_GAUDIN, 2, 2, 1)
        with pytest.raises(PoleError):
            L.evaluate(L.poles[0])

    def test_repeated_poles_rejected(self):
        with pytest.raises(GenericityError):
            MultiPoleLax(SpectralKind.RATIONAL_GAUDIN, E([0, 1]), E([2, 2]),
                         E([[1, 1], [1, 1]]), E([[1, 1], [1, 1]]))

    @pytest.mark.parametrize("kind", list(SpectralKind))
    def test_residues_rank_one(self, kind):
        L = random_multipole(kind, 3, 3, 8)
        assert all(xn.minors_vanish(r) for r in L.residues())

    @pytest.mark.parametrize("kind", list(SpectralKind))
    def test_cleared_matrix_has_degree_m(self, kind):
        # prod (z - z_k) L(z) interpolated through M + 1 points predicts a further point
        L = random_multipole(kind, 2, 2, 3)
        def cleared(z):
            c = 1
            for zk in L.poles:
                c *= z - zk
            return c * L.evaluate(z)
        zs = [Fraction(k, 1) + Fraction(1, 5) for k in range(4)]
        vals = [cleared(z) for z in zs]
        # Lagrange extrapolation from the first three to the fourth point
        pred = 0
        for i in range(3):
            w = Fraction(1)
            for j in range(3):
                if j != i:
                    w *= (zs[3] - zs[j]) / (zs[i] - zs[j])
            pred = pred + w * vals[i]
        assert xn.is_zero(pred - vals[3])

    @pytest.mark.parametrize("kind", list(SpectralKind))
    def test_dict_round_trip(self, kind):
        L = random_multipole(kind, 2, 3, 5)
        L2 = MultiPoleLax.from_dict(L.to_dict())
        assert L2.exact and L2.kind is kind
        assert xn.is_zero(L.evaluate(Fraction(1, 7)) - L2.evaluate(Fraction(1, 7)))


class TestXXX:
    def test_single_site(self):
        V = E([2, 3])
        col, row = E([1, 2]), E([3, -1])
        T = xxx_monodromy_product(V, [(Fraction(1), (col, row))])
        lam = Fraction(4)
        expected = xn.diag(V) + xn.diag(V) @ xn.outer(col, row) / (lam - 1)
        assert xn.is_zero(T.evaluate(lam) - expected)

    def test_trivial_sites(self):
        V = E([1, 1])
        sites = [(Fraction(1), (E([0, 0]), E([1, 2]))), (Fraction(3), (E([1, 1]), E([0, 0])))]
        T = xxx_monodromy_product(V, sites)
        assert xn.is_zero(T.evaluate(Fraction(5, 2)) - xn.eye(2, True))

    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    def test_product_equals_sum(self, n, m, data):
        V = data.draw(rational_vectors(n))
        lams = data.draw(distinct_fractions(m))
        sites = [(lam, (data.draw(rational_vectors(n)), data.draw(rational_vectors(n))))
                 for lam in lams]
        T = xxx_monodromy_product(V, sites)
        assert all(xn.minors_vanish(r) for r in T.residues())
        for z in TEST_POINTS:
            assume(all(z != lam for lam in lams))
            assert xn.is_zero(T.evaluate(z) - xxx_monodromy_eval(V, sites, z))

    def test_accepts_rank_one_matrices(self):
        B = E([[1, 2], [3, 6]])
        T1 = xxx_monodromy_product(E([1, 2]), [(Fraction(0), B)])
        T2 = xxx_monodromy_product(E([1, 2]), [(Fraction(0), (E([1, 3]), E([1, 2])))])
        assert xn.is_zero(T1.evaluate(Fraction(2)) - T2.evaluate(Fraction(2)))


class TestXXZ:
    def test_trivial_local_lax(self):
        L = xxz_local_lax(Fraction(3), Fraction(2), (E([0, 0]), E([0, 0])))
        assert xn.is_zero(L - xn.eye(2, True))

    def test_scalar_local_lax(self):
        z, zk = Fraction(5), Fraction(2)
        L = xxz_local_lax(z, zk, (E([3]), E([Fraction(1, 2)])))
        assert L[0, 0] == 1 + zk * Fraction(3, 2) / (z - zk)

    @given(st.integers(1, 3), st.data())
    def test_local_lax_from_r_matrix(self, n, data):
        # 1 + tr_2(r(z / z_k) B_2) reproduces the local Lax matrix
        col, row = data.draw(rational_vectors(n)), data.draw(rational_vectors(n))
        zk = data.draw(fractions(nonzero=True))
        z = data.draw(fractions(nonzero=True))
        assume(z != zk)
        B = xn.outer(col, row)
        r = r_matrix(RVariant.TWISTED, z / zk, n)
        via_r = xn.eye(n, True) + partial_trace_2(r, B)
        assert xn.is_zero(via_r - xxz_local_lax(z, zk, (col, row)))

    def test_gauge_kills_lower_constant(self):
        V = E([2, 5])
        sites = [(Fraction(3), (E([1, 4]), E([2, -1])))]
        T, g = xxz_monodromy(V, sites, return_gauge=True)
        # the gauged sum form has constant term V with no strictly lower part
        big = Fraction(10 ** 30)
        const = T.evaluate(float("inf"))
        assert xn.is_zero(xn.strictly_lower(const))
        raw = xxz_monodromy_eval(V, sites, big)
        gauged = xn.inv(g) @ raw @ g
        assert xn.is_zero(gauged - T.evaluate(big))

    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    def test_product_equals_gauged_sum(self, n, m, data):
        V = data.draw(distinct_fractions(n, nonzero=True))
        zs = data.draw(distinct_fractions(m, nonzero=True))
        sites = [(zk, (data.draw(rational_vectors(n)), data.draw(rational_vectors(n))))
                 for zk in zs]
        T, g = xxz_monodromy(E(V), sites, return_gauge=True)
        assert all(xn.minors_vanish(r) for r in T.residues())
        for z in TEST_POINTS:
            assume(all(z != zk for zk in zs))
            assert xn.is_zero(xn.inv(g) @ xxz_monodromy_eval(E(V), sites, z) @ g - T.evaluate(z))

    def test_zero_inhomogeneity(self):
        with pytest.raises(GenericityError):
            xxz_monodromy(E([1, 2]), [(Fraction(0), (E([1, 1]), E([1, 1])))])


class TestGauge:
    def test_example(self):
        lam = E([0, 1])
        g = gauge_matrix(lam, E([[0], [1]]), E([[1, 0]]))
        assert g.tolist() == [[1, 0], [-1, 1]]
        s_bar = E([[0, 0], [1, 0]])
        assert xn.is_zero(xn.inv(g) @ (xn.diag(lam) + s_bar) @ g - xn.diag(lam))

    def test_zero_lower_part(self):
        g = gauge_matrix(E([1, 2, 3]), E([[1], [0], [0]]), E([[0, 0, 5]]))
        assert xn.is_zero(g - xn.eye(3, True))

    @given(st.integers(1, 6), st.integers(1, 3), st.data())
    def test_closed_equals_recursive(self, n, m, data):
        lam = E(data.draw(distinct_fractions(n)))
        xi = E(data.draw(st.lists(fractions(), min_size=n * m, max_size=n * m))).reshape(n, m)
        eta = E(data.draw(st.lists(fractions(), min_size=n * m, max_size=n * m))).reshape(m, n)
        g = gauge_matrix(lam, xi, eta)
        assert xn.is_zero(g - gauge_matrix(lam, xi, eta, method="recursive"))
        conj = xn.inv(g) @ (xn.diag(lam) + xn.strictly_lower(xi @ eta)) @ g
        assert xn.is_zero(conj - xn.diag(lam))

    def test_degenerate_twist(self):
        with pytest.raises(DegenerateSpectrumError):
            gauge_matrix_recursive(E([1, 1]), xn.zeros((2, 2), True))


class TestTrigGaudin:
    def test_scalar_reduction_is_identity(self):
        raw = trig_gaudin_raw(E([2]), E([3]), E([[1]]), E([[4]]))
        red = raw.reduce()
        assert xn.is_zero(raw(Fraction(5)) - red.evaluate(Fraction(5)))

    def test_zero_spins(self):
        raw = trig_gaudin_raw(E([2, 3]), E([1]), E([[0], [0]]), E([[0, 0]]))
        assert xn.is_zero(raw(Fraction(7)) - xn.diag(E([2, 3])))

    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    def test_char_poly_preserved(self, n, m, data):
        lam = E(data.draw(distinct_fractions(n)))
        poles = E(data.draw(distinct_fractions(m, nonzero=True)))
        xi = E(data.draw(st.lists(fractions(), min_size=n * m, max_size=n * m))).reshape(n, m)
        eta = E(data.draw(st.lists(fractions(), min_size=n * m, max_size=n * m))).reshape(m, n)
        raw = trig_gaudin_raw(lam, poles, xi, eta)
        red = raw.reduce()
        assert xn.is_zero(red.evaluate(float("inf")) - xn.diag(lam))
        for z in TEST_POINTS:
            assume(all(z != p for p in poles))
            assert xn.char_poly(raw(z)) == xn.char_poly(red.evaluate(z))


class TestRMatrix:
    def test_twisted_scalar(self):
        assert r_matrix(RVariant.TWISTED, Fraction(3), 1)[0, 0] == Fraction(1, 2)
        assert cybe_residual(RVariant.TWISTED, Fraction(2), Fraction(3), Fraction(5), 1) == 0

    def test_twisted_n2(self):
        assert cybe_residual(RVariant.TWISTED, Fraction(2), Fraction(3), Fraction(5), 2) == 0

    def test_multiplicative_n2(self):
        assert cybe_residual(RVariant.XXZ_MULTIPLICATIVE, Fraction(2), Fraction(3),
                             Fraction(5), 2) == 0

    @given(st.integers(1, 3), st.lists(fractions(nonzero=True), min_size=3, max_size=3,
                                       unique=True))
    def test_cybe_exact(self, n, zs):
        for variant in (RVariant.TWISTED, RVariant.XXZ_MULTIPLICATIVE):
            assert cybe_residual(variant, *zs, n) == 0

    def test_additive_float(self):
        assert cybe_residual(RVariant.XXZ_ADDITIVE, 0.3 + 0.1j, -0.7, 1.1 + 0.4j, 3) <= 1e-12

    def test_multiplicative_matches_additive(self):
        zeta = 0.3 + 0.2j
        add = r_matrix(RVariant.XXZ_ADDITIVE, zeta, 2).astype(complex)
        mul = r_matrix(RVariant.XXZ_MULTIPLICATIVE, np.exp(2 * zeta), 2).astype(complex)
        np.testing.assert_allclose(add, mul, atol=1e-12)

    def test_pole(self):
        with pytest.raises(PoleError):
            r_matrix(RVariant.TWISTED, Fraction(1), 2)

    @pytest.mark.parametrize("variant", [RVariant.TWISTED, RVariant.XXZ_MULTIPLICATIVE])
    def test_wrong_r_matrix_fails(self, variant, monkeypatch):
        # negative control: doubling one coefficient breaks the equation
        original = sm.r_matrix

        def corrupted(v, z, n):
            r = original(v, z, n).copy()
            r[1, n] = r[1, n] * 2
            return r
        monkeypatch.setattr(sm, "r_matrix", corrupted)
        assert cybe_residual(variant, Fraction(2), Fraction(3), Fraction(5), 2) != 0

    def test_twisted_needs_its_own_third_term(self):
        # the skew-symmetric form of the equation does not hold for the twisted r-matrix
        n = 2
        r = lambda a, b, x, y: sm.embed(r_matrix(RVariant.TWISTED, x / y, n), n, a, b)  # noqa: E731
        z1, z2, z3 = Fraction(2), Fraction(3), Fraction(5)
        r12, r23, r13 = r(0, 1, z1, z2), r(1, 2, z2, z3), r(0, 2, z1, z3)
        comm = lambda a, b: a @ b - b @ a  # noqa: E731
        assert not xn.is_zero(comm(r12, r13) + comm(r12, r23) + comm(r13, r23))
