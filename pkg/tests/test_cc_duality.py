from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from duality_lab import exactnum as xn
from duality_lab.cc_duality import (expand_hamiltonians, schlesinger_connection,
                                    verify_cc_identifications)
from duality_lab.errors import GenericityError, NumericError
from duality_lab.instances import random_multipole, random_phase_point, sub_seed
from duality_lab.manybody import ModelKind, PhasePoint, hamiltonian
from duality_lab.spectral_duality import gauged_lax
from duality_lab.spectral_models import PoleForm, SpectralKind

from conftest import distinct_fractions, fractions

CM = ModelKind.RATIONAL_CM
CHECKS = {"poles_are_positions", "twist_is_spectrum", "h0_is_cm_hamiltonian", "h0_from_spectrum",
          "gaudin_hamiltonians_vanish", "schlesinger_is_minus_p", "schlesinger_pairing"}


def exact_cm(n, seed):
    return random_phase_point(CM, n, sub_seed(seed, "cc-test"), "exact")


class TestSchlesingerConnection:
    def test_residue_example(self):
        nu = Fraction(3, 4)
        x = PhasePoint(xn.exact_array([0, 1]), xn.exact_array([2, 3]), nu)
        conn = schlesinger_connection(x)
        assert conn.residues[0].tolist() == [[-1, 0], [-nu, 0]]

    def test_free(self):
        x = PhasePoint(xn.exact_array([0, 1, 3]), xn.exact_array([2, 3, 5]), Fraction(0))
        conn = schlesinger_connection(x)
        for a, r in enumerate(conn.residues):
            E = xn.zeros((3, 3), True)
            E[a, a] = 1
            assert xn.is_zero(r + E)
        assert xn.is_zero(conn.constant - xn.diag(xn.exact_array([2, 3, 5])))

    def test_column_support(self):
        conn = schlesinger_connection(exact_cm(4, 0))
        for a, r in enumerate(conn.residues):
            mask = np.ones((4, 4), dtype=bool)
            mask[:, a] = False
            assert all(v == 0 for v in r[mask])

    def test_eigenbasis_twist_is_spectrum(self, cm_example):
        conn = schlesinger_connection(cm_example, eigenbasis=True)
        assert conn.kind is SpectralKind.RATIONAL_GAUDIN
        np.testing.assert_allclose(sorted(conn.twist, key=lambda v: v.imag),
                                   [2.5 - 0.8660254037844386j, 2.5 + 0.8660254037844386j])

    def test_eigenbasis_preserves_hamiltonians(self):
        x = exact_cm(3, 1)
        flat = expand_hamiltonians(schlesinger_connection(x))
        rotated = expand_hamiltonians(schlesinger_connection(x, eigenbasis=True))
        np.testing.assert_allclose(np.array(rotated.hamiltonians, dtype=complex),
                                   np.array(flat.hamiltonians, dtype=complex), atol=1e-9)

    def test_coincident_positions(self):
        x = PhasePoint(xn.exact_array([1, 1]), xn.exact_array([0, 1]), Fraction(1))
        with pytest.raises(GenericityError):
            schlesinger_connection(x)


class TestExpansion:
    def test_zero_residues(self):
        lam = xn.diag(xn.exact_array([1, 2]))
        zero = xn.zeros((2, 2), True)
        form = PoleForm(lam, xn.exact_array([0, 5]), (zero, zero))
        exp = expand_hamiltonians(form)
        assert exp.casimirs == [0, 0] and exp.hamiltonians == [0, 0]
        assert exp.h0 == Fraction(5, 2)

    def test_schlesinger_example(self, cm_example):
        exp = expand_hamiltonians(schlesinger_connection(cm_example))
        assert exp.hamiltonians == [-2, -3]
        assert exp.h0 == Fraction(11, 2)

    def test_gaudin_form_vanishes(self, cm_example):
        exp = expand_hamiltonians(gauged_lax(CM, cm_example))
        assert exp.hamiltonians == [0, 0]

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10 ** 6))
    def test_reconstruction_exact(self, n, m, seed):
        L = random_multipole(SpectralKind.RATIONAL_GAUDIN, n, m, seed)
        exp = expand_hamiltonians(L)
        for z in (Fraction(1, 3), Fraction(-5, 7), Fraction(101, 2)):
            if any(z == p for p in L.poles):
                continue
            A = L.evaluate(z)
            assert exp.reconstruct(z) == np.trace(A @ A) / 2

    def test_malformed_input(self):
        # a residue with a double pole component cannot be expanded with simple poles
        class Bad(PoleForm):
            def evaluate(self, z):
                return super().evaluate(z) + xn.eye(2, True) / (z - self.poles[0]) ** 2
        zero = xn.zeros((2, 2), True)
        with pytest.raises(NumericError):
            expand_hamiltonians(Bad(xn.eye(2, True), xn.exact_array([0]), (zero,)))


class TestIdentifications:
    def test_example(self, cm_example):
        rep = verify_cc_identifications(cm_example)
        assert {r.check_id for r in rep.rows} == CHECKS
        assert rep.passed, rep.to_json()
        row = next(r for r in rep.rows if r.check_id == "schlesinger_is_minus_p")
        assert row.residual == 0 and "nu p_a" in row.detail

    def test_free(self):
        x = PhasePoint(xn.exact_array([0, 1, 3]), xn.exact_array([2, 3, 5]), Fraction(0))
        assert verify_cc_identifications(x).passed

    def test_scalar(self):
        x = PhasePoint(xn.exact_array([Fraction(1, 2)]), xn.exact_array([3]), Fraction(2))
        exp = expand_hamiltonians(schlesinger_connection(x))
        assert exp.h0 == Fraction(9, 2) and exp.hamiltonians == [-3]
        assert verify_cc_identifications(x).passed

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_random_exact(self, n):
        for seed in range(2):
            rep = verify_cc_identifications(exact_cm(n, 10 * n + seed))
            assert rep.passed, rep.to_json()

    def test_float_point(self):
        x = random_phase_point(CM, 4, 3, "float")
        assert verify_cc_identifications(x).passed

    @given(distinct_fractions(3), st.lists(fractions(), min_size=3, max_size=3),
           fractions(nonzero=True))
    def test_hamiltonian_identities(self, q, p, nu):
        x = PhasePoint(xn.exact_array(q), xn.exact_array(p), nu)
        sch = expand_hamiltonians(schlesinger_connection(x))
        assert [-h for h in sch.hamiltonians] == list(x.p)
        assert sch.h0 == hamiltonian(CM, x)
        assert all(h == 0 for h in expand_hamiltonians(gauged_lax(CM, x)).hamiltonians)
