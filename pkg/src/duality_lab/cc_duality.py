"""Gaudin and Schlesinger Hamiltonians attached to the rational Calogero--Moser model.

For a matrix with simple poles ``L(z) = A0 + sum_a R_a / (z - z_a)``::

    1/2 tr L(z)^2 = H0 + sum_a C_a / (z - z_a)^2 + sum_a H_a / (z - z_a)

    C_a = 1/2 tr R_a^2
    H_a = tr(A0 R_a) + sum_{c != a} tr(R_a R_c) / (z_a - z_c)
    H0  = 1/2 tr A0^2

The Hamiltonians are taken as these residues rather than transcribed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exactnum as xn
from .errors import GenericityError, NumericError
from .manybody import ModelKind, PhasePoint, check_generic, hamiltonian, lax
from .report import DualityReport, digest
from .spectral_duality import _offdiag_ones, fictitious_lax, gauged_lax
from .spectral_models import MultiPoleLax, PoleForm


@dataclass(frozen=True)
class HamiltonianExpansion:
    casimirs: list
    hamiltonians: list
    h0: object
    poles: tuple

    def reconstruct(self, z):
        """``1/2 tr L(z)^2`` rebuilt from the coefficients."""
        total = self.h0
        for za, c, h in zip(self.poles, self.casimirs, self.hamiltonians):
            total = total + c / (z - za) ** 2 + h / (z - za)
        return total


def _half_trace_square(a: np.ndarray):
    return np.trace(a @ a) / 2


def expand_hamiltonians(form, check_points: int = 3) -> HamiltonianExpansion:
    """Expansion coefficients of ``1/2 tr L(z)^2`` for a :class:`PoleForm` or :class:`MultiPoleLax`.

    The expansion is checked against direct evaluation at ``check_points``
    sample points; a mismatch raises :class:`NumericError`.
    """
    if isinstance(form, MultiPoleLax):
        form = form.to_pole_form()
    a0 = form.constant
    poles = list(form.poles)
    res = list(form.residues)
    casimirs = [_half_trace_square(r) for r in res]
    hams = []
    for a, (za, ra) in enumerate(zip(poles, res)):
        h = np.trace(a0 @ ra)
        for c, (zc, rc) in enumerate(zip(poles, res)):
            if c != a:
                h = h + np.trace(ra @ rc) / (za - zc)
        hams.append(h)
    out = HamiltonianExpansion(casimirs, hams, _half_trace_square(a0), tuple(poles))
    exact = xn.is_exact(a0) and all(xn.is_exact(r) for r in res)
    samples = [p for p in range(2, 2 + 3 * check_points) if all(p != z for z in poles)]
    for z in samples[:check_points]:
        z = xn.to_fraction(z) if exact else complex(z, 0.5)
        direct = _half_trace_square(form.evaluate(z))
        diff = abs(direct - out.reconstruct(z))
        if (exact and diff != 0) or (not exact and diff > 1e-9 * max(1.0, abs(direct))):
            raise NumericError(f"expansion does not reconstruct 1/2 tr L^2 (off by {diff})")
    return out


def schlesinger_connection(x: PhasePoint, eigenbasis: bool = False):
    """``L'(z) = L^CM + sum_a O^a / (z - q_a)`` with ``O^a_ij = -nu (1 - d_ij) d_aj - d_ij d_aj``.

    With ``eigenbasis=True`` the connection is conjugated by the eigenvector
    matrix of ``L^CM`` and returned as a rational Gaudin :class:`MultiPoleLax`
    whose twist is the spectrum ``Q~`` (complex floats).
    """
    kind = ModelKind.RATIONAL_CM
    check_generic(kind, x)
    L = lax(kind, x)
    q, _, nu = x.native(kind)
    n = x.n
    exact = xn.is_exact(L)
    obar = _offdiag_ones(n, exact)
    if eigenbasis:
        evals, psi = xn.eig_sorted(xn.complex_array(L))
        psi_inv = np.linalg.inv(psi)
        xi = psi_inv @ (-complex(nu) * obar - np.eye(n))
        return MultiPoleLax(fictitious_lax(kind, x).kind, evals, xn.complex_array(q), xi, psi)
    residues = []
    for a in range(n):
        E = xn.zeros((n, n), exact)
        E[a, a] = 1
        residues.append(-(nu * obar + xn.eye(n, exact)) @ E)
    return PoleForm(L, xn.as_array(q, exact), tuple(residues))


def _shifted(x: PhasePoint, which: str, index: int, delta) -> PhasePoint:
    q, p = x.q.copy(), x.p.copy()
    target = q if which == "q" else p
    target[index] = target[index] + delta
    return PhasePoint(q, p, x.nu, x.multiplicative)


def verify_cc_identifications(x: PhasePoint, tol: float = 1e-9) -> DualityReport:
    """Itemised check of the classical-classical identifications for a rational CM point.

    Rows (tolerance 0 on exact input):

    - ``poles_are_positions``: poles of both spectral forms equal ``q``;
    - ``twist_is_spectrum``: the twist ``Q~`` consists of roots of ``char_poly(L)``;
    - ``h0_is_cm_hamiltonian``: ``H0`` equals the Calogero--Moser energy;
    - ``h0_from_spectrum``: ``H0 = 1/2 sum Q~_i^2`` (floating point);
    - ``gaudin_hamiltonians_vanish``: ``H_a = 0`` for the Gaudin form;
    - ``schlesinger_is_minus_p``: ``H_a + p_a = 0`` for the Schlesinger connection
      (the ``detail`` field records ``max |H_a + nu p_a|`` for comparison);
    - ``schlesinger_pairing``: ``dH_a/dp_b = -delta_ab`` and ``dH_a/dq_b = 0``,
      probed with unit shifts, so ``H_a`` pairs with ``q_a`` alone.
    """
    kind = ModelKind.RATIONAL_CM
    tag = digest(x.to_dict(kind))
    exact_tol = 0.0 if x.exact else tol
    report = DualityReport(config={"kind": kind.value})
    q, p, nu = x.native(kind)

    conn = schlesinger_connection(x)
    fict = fictitious_lax(kind, x)
    pole_err = max(xn.max_abs(xn.as_array(conn.poles, x.exact) - q),
                   xn.max_abs(xn.complex_array(fict.poles) - xn.complex_array(q)))
    report.add("poles_are_positions", tag, pole_err, exact_tol)

    twist_err = xn.root_distance(xn.char_poly(lax(kind, x)), fict.twist)
    report.add("twist_is_spectrum", tag, twist_err, tol)

    sch = expand_hamiltonians(conn)
    energy = hamiltonian(kind, x)
    report.add("h0_is_cm_hamiltonian", tag, abs(sch.h0 - energy), exact_tol)
    spec_h0 = sum(complex(t) ** 2 for t in fict.twist) / 2
    report.add("h0_from_spectrum", tag, abs(spec_h0 - complex(energy)) / max(1.0, abs(complex(energy))), tol)

    gaudin = expand_hamiltonians(gauged_lax(kind, x))
    report.add("gaudin_hamiltonians_vanish", tag, max(abs(h) for h in gaudin.hamiltonians), exact_tol)

    minus_p = max(abs(h + pa) for h, pa in zip(sch.hamiltonians, p))
    minus_nu_p = max(abs(h + nu * pa) for h, pa in zip(sch.hamiltonians, p))
    report.add("schlesinger_is_minus_p", tag, minus_p, exact_tol,
               detail=f"max|H_a + nu p_a| = {float(abs(minus_nu_p)):.6g}")

    one = xn.to_fraction(1) if x.exact else 1.0
    pairing = 0
    for b in range(x.n):
        for which in ("p", "q"):
            try:
                shifted = expand_hamiltonians(schlesinger_connection(_shifted(x, which, b, one)))
            except GenericityError:  # a unit shift in q can hit a collision
                shifted = expand_hamiltonians(
                    schlesinger_connection(_shifted(x, which, b, one / 7)))
            for a in range(x.n):
                expected = -1 if (which == "p" and a == b) else 0
                delta = shifted.hamiltonians[a] - sch.hamiltonians[a]
                if which == "p":
                    pairing = max(pairing, abs(delta - expected))
                else:
                    pairing = max(pairing, abs(delta))
    report.add("schlesinger_pairing", tag, pairing, exact_tol)
    return report
