"""Spectral duality of rank-one multi-pole Lax matrices and the route from it
back to the many-body dualities.

Spectral curves are compared through the cleared polynomial

    P(y, x) = det(y - L(x)) * prod_k (x - x_k),

which is a polynomial of degree N in ``y`` and at most M in ``x``.  Since
``prod_k (x - x_k) = det(x - twist)`` for the dual, every curve identity
between an N x N model and its M x M dual reads ``P(lam, z) = P_dual(z, lam)``,
i.e. one coefficient matrix is the transpose of the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactnum as xn
from .errors import DualityLabError, GenericityError
from .manybody import ModelKind, PhasePoint, lax
from .pq_duality import dualize, gauge_residual
from .report import DualityReport, digest
from .spectral_models import MultiPoleLax, PoleForm, SpectralKind


@dataclass(frozen=True)
class BivariatePoly:
    """``sum_ij coeffs[i, j] y^i x^j``.

    ``cleared`` lists the poles ``x_k`` whose factors ``(x - x_k)`` multiply
    ``det(y - L(x))``.
    """

    coeffs: np.ndarray
    cleared: tuple

    @property
    def exact(self) -> bool:
        return xn.is_exact(self.coeffs)

    def __call__(self, y, x):
        ys = [y ** i for i in range(self.coeffs.shape[0])]
        xs = [x ** j for j in range(self.coeffs.shape[1])]
        total = 0
        for i, yi in enumerate(ys):
            for j, xj in enumerate(xs):
                total = total + self.coeffs[i, j] * yi * xj
        return total

    def swapped(self) -> "BivariatePoly":
        return BivariatePoly(self.coeffs.T.copy(), self.cleared)

    def to_dict(self) -> dict:
        return {
            "coeffs": [[xn.scalar_to_json(v) for v in row] for row in self.coeffs],
            "cleared": [xn.scalar_to_json(v) for v in self.cleared],
        }


def _sample_points(poles, count: int, exact: bool):
    """``count`` small sample points avoiding ``poles``; shifts past any collision."""
    pts = []
    k = 0
    while len(pts) < count:
        k += 1
        x = Fraction(k, 1) + Fraction(1, 3) if exact else complex(k + 1 / 3, 0.25 * k)
        if all(x != p for p in poles):
            pts.append(x)
    return pts


def _interpolate(xs, values, exact: bool) -> np.ndarray:
    """Coefficients ``c_0..c_d`` of the polynomial through ``(xs, values)``."""
    d = len(xs)
    vander = xn.zeros((d, d), exact)
    for r, x in enumerate(xs):
        for c in range(d):
            vander[r, c] = x ** c
    return xn.solve(vander, xn.as_array(values, exact))


def spectral_poly(L) -> BivariatePoly:
    """Cleared characteristic polynomial of a :class:`MultiPoleLax` or :class:`PoleForm`.

    The ``y``-dependence comes from the characteristic polynomial at each of
    ``M + 1`` sample points; the ``x``-dependence is interpolated from them.
    """
    poles = list(L.poles)
    n = L.evaluate(float("inf")).shape[0]
    m = len(poles)
    exact = xn.is_exact(L.evaluate(float("inf"))) and xn.is_exact(np.asarray(poles))
    if isinstance(L, MultiPoleLax):
        exact = L.exact
    xs = _sample_points(poles, m + 1, exact)
    rows = []
    for x in xs:
        cp = xn.char_poly(L.evaluate(x))  # descending in y
        clear = 1
        for p in poles:
            clear = clear * (x - p)
        rows.append([c * clear for c in reversed(cp)])
    table = xn.as_array(rows, exact)  # table[sample, power of y]
    coeffs = xn.zeros((n + 1, m + 1), exact)
    for i in range(n + 1):
        coeffs[i, :] = _interpolate(xs, table[:, i], exact)
    return BivariatePoly(coeffs, tuple(poles))


# --------------------------------------------------------------------------
# dual constructions
# --------------------------------------------------------------------------

def dual_rational_gaudin(L: MultiPoleLax) -> MultiPoleLax:
    """``L~(lam) = Z + eta (lam - Lambda)^-1 xi`` of size M with poles at the twist entries."""
    if L.kind is not SpectralKind.RATIONAL_GAUDIN:
        raise ValueError("expected a rational Gaudin Lax matrix")
    return MultiPoleLax(SpectralKind.RATIONAL_GAUDIN, L.poles, L.twist, L.eta, L.xi)


def dual_tgaudin_to_xxx(L: MultiPoleLax) -> MultiPoleLax:
    """XXX monodromy ``T~(lam) = Z (1 + eta (lam - Lambda)^-1 xi)`` dual to a reduced trig Gaudin model."""
    if L.kind is not SpectralKind.TRIG_GAUDIN_REDUCED:
        raise ValueError("expected a reduced trigonometric Gaudin Lax matrix")
    return MultiPoleLax(SpectralKind.XXX_CHAIN, L.poles, L.twist, L.eta, L.xi)


def dual_xxz_chain(T: MultiPoleLax) -> MultiPoleLax:
    """XXZ monodromy ``T~(lam) = Z (1 + eta V (lam - V)^-1 xi)`` dual to ``T``."""
    if T.kind is not SpectralKind.XXZ_CHAIN:
        raise ValueError("expected an XXZ monodromy matrix")
    if any(v == 0 for v in T.twist):
        raise GenericityError("XXZ twist entries must be nonzero")
    return MultiPoleLax(SpectralKind.XXZ_CHAIN, T.poles, T.twist, T.eta, T.xi)


DUAL_TRANSFORMS = {
    "gaudin": dual_rational_gaudin,
    "tgaudin-xxx": dual_tgaudin_to_xxx,
    "xxz": dual_xxz_chain,
}


def curve_residual(L: MultiPoleLax, dual: MultiPoleLax):
    """Largest coefficient of ``P_L(lam, z) - P_dual(z, lam)``.

    Exact zero on rational input when the spectral curves coincide.
    """
    a = spectral_poly(L).coeffs
    b = spectral_poly(dual).swapped().coeffs
    if a.shape != b.shape:
        raise DualityLabError(f"curve degrees differ: {a.shape} vs {b.shape}")
    if not (xn.is_exact(a) and xn.is_exact(b)):
        a, b = xn.complex_array(a), xn.complex_array(b)
    return xn.max_abs(a - b)


def curves_coincide(L: MultiPoleLax, dual: MultiPoleLax, tol: float = 1e-9) -> bool:
    r = curve_residual(L, dual)
    if isinstance(r, Fraction):
        return r == 0
    scale = max(1.0, xn.max_abs(xn.complex_array(spectral_poly(L).coeffs)))
    return r <= tol * scale


def identity_residual(L: MultiPoleLax, dual: MultiPoleLax, lam, z):
    """``det(lam - L(z)) det(z - Z) - det(z - L~(lam)) det(lam - twist)`` at one point."""
    n, m = L.n, L.m
    exact = L.exact and dual.exact and xn.is_exact(lam) and xn.is_exact(z)
    lhs = xn.det(lam * xn.eye(n, exact) - L.evaluate(z)) * xn.det(z * xn.eye(m, exact) - xn.diag(L.poles))
    rhs = xn.det(z * xn.eye(m, exact) - dual.evaluate(lam)) * xn.det(lam * xn.eye(n, exact) - xn.diag(L.twist))
    return lhs - rhs


# --------------------------------------------------------------------------
# many-body models with a fictitious spectral parameter
# --------------------------------------------------------------------------

FICTITIOUS_KINDS = {
    ModelKind.RATIONAL_CM: SpectralKind.RATIONAL_GAUDIN,
    ModelKind.TRIG_CMS: SpectralKind.TRIG_GAUDIN_REDUCED,
    ModelKind.TRIG_RS: SpectralKind.XXZ_CHAIN,
}


def _offdiag_ones(n: int, exact: bool) -> np.ndarray:
    out = xn.zeros((n, n), exact)
    out[...] = Fraction(1) if exact else 1.0
    return out - xn.eye(n, exact)


def gauged_lax(kind: ModelKind, x: PhasePoint) -> PoleForm:
    """Many-body Lax matrix after the position-dependent diagonal gauge, before diagonalising.

    ==========  ==============  =====================  ============================
    kind        constant        poles                  residue at pole a
    ==========  ==============  =====================  ============================
    RationalCM  L               q_a                    nu Obar^a
    TrigCMS     L               w_a                    -nu E_aa Obar W
    TrigRS      L               w_a                    [L, W] E_aa
    ==========  ==============  =====================  ============================

    with ``Obar^a_ij = -(1 - delta_ij) delta_aj``.  Exact on exact input, and its
    characteristic polynomial is that of ``L`` for every ``z``.
    """
    if kind not in FICTITIOUS_KINDS:
        raise ValueError(f"no fictitious spectral parameter form for {kind.value}")
    L = lax(kind, x)
    pos, _, nu = x.native(kind)
    n = len(pos)
    exact = xn.is_exact(L)
    obar = _offdiag_ones(n, exact)
    W = xn.diag(pos)
    residues = []
    for a in range(n):
        E = xn.zeros((n, n), exact)
        E[a, a] = 1
        if kind is ModelKind.RATIONAL_CM:
            residues.append(-nu * (obar @ E))
        elif kind is ModelKind.TRIG_CMS:
            residues.append(-nu * (E @ obar @ W))
        else:
            residues.append((L @ W - W @ L) @ E)
    return PoleForm(L, xn.as_array(pos, exact), tuple(residues))


def _fictitious(kind: ModelKind, x: PhasePoint):
    if kind not in FICTITIOUS_KINDS:
        raise ValueError(f"no fictitious spectral parameter form for {kind.value}")
    L = xn.complex_array(lax(kind, x))
    pos, _, nu = x.native(kind)
    pos = xn.complex_array(pos)
    nu = complex(nu)
    n = len(pos)
    evals, psi = xn.eig_sorted(L)
    psi_inv = np.linalg.inv(psi)
    obar = np.ones((n, n)) - np.eye(n)
    W = np.diag(pos)
    if kind is ModelKind.RATIONAL_CM:
        xi, eta = -nu * psi_inv @ obar, psi
    elif kind is ModelKind.TRIG_CMS:
        xi, eta = -nu * psi_inv, np.diag(1 / pos) @ obar @ W @ psi
    else:
        if np.any(evals == 0):
            raise GenericityError("zero eigenvalue of the trigonometric RS Lax matrix")
        xi, eta = psi_inv @ np.linalg.solve(L, L @ W - W @ L), np.diag(1 / pos) @ psi
    out = MultiPoleLax(FICTITIOUS_KINDS[kind], evals, pos, xi, eta)
    return out, psi


def fictitious_lax(kind: ModelKind, x: PhasePoint) -> MultiPoleLax:
    """The many-body Lax matrix as a rank-one multi-pole Lax matrix in the eigenbasis.

    RationalCM gives a rational Gaudin model with twist ``Q~`` and poles ``q``;
    TrigCMS a reduced trigonometric Gaudin model with poles ``w = e^q``; TrigRS
    an XXZ monodromy with twist ``e^{Q~}`` and poles ``w``.  Complex floats,
    since the eigenvector matrix enters the residues.
    """
    return _fictitious(kind, x)[0]


def char_poly_drift(form, samples) -> object:
    """Largest change of the characteristic polynomial of ``form.evaluate(z)`` over ``samples``.

    Measured against the ``z -> infinity`` limit; exact on exact input.
    """
    ref = xn.char_poly(form.evaluate(float("inf")) if isinstance(form, MultiPoleLax)
                       else form.constant)
    worst = 0
    for z in _avoid_poles(samples, form.poles):
        cp = xn.char_poly(form.evaluate(z))
        worst = max(worst, max(abs(a - b) for a, b in zip(cp, ref)))
    return worst


def _avoid_poles(samples, poles):
    out = []
    for z in samples:
        while any(z == p for p in poles):
            z = z + Fraction(1, 97) if xn.is_exact(z) else z + 1e-2
        out.append(z)
    return out


def char_poly_drift_vs_lax(kind: ModelKind, x: PhasePoint, samples):
    """Distance between ``char_poly(L)`` and that of the fictitious Lax matrix at ``samples``.

    Samples that hit a pole are shifted slightly.
    """
    ref = xn.char_poly(lax(kind, x))
    form = gauged_lax(kind, x)
    worst = 0
    for z in _avoid_poles(samples, form.poles):
        cp = xn.char_poly(form.evaluate(z))
        worst = max(worst, max(abs(a - b) for a, b in zip(cp, ref)))
    return worst


_VIA_SPECTRAL_DUAL = {
    ModelKind.RATIONAL_CM: dual_rational_gaudin,
    ModelKind.TRIG_CMS: dual_tgaudin_to_xxx,
    ModelKind.TRIG_RS: dual_xxz_chain,
}


def _undo_gauge(kind: ModelKind, conj: np.ndarray, diag_vals: np.ndarray, lam) -> np.ndarray:
    """Remove the ``lam``-dependent diagonal gauge from ``Psi^-1 T~(lam) Psi``."""
    d = lam - diag_vals
    if kind is ModelKind.TRIG_CMS:
        return conj * d[None, :] / d[:, None]
    return conj * d[:, None] / d[None, :]


def dual_lax_via_spectral(kind: ModelKind, x: PhasePoint, lam) -> np.ndarray:
    """Dual many-body Lax matrix obtained from the spectral dual of the fictitious form.

    Up to a constant diagonal gauge it equals the Lax matrix of the dual model;
    for the correct gauge direction the result does not depend on ``lam``.
    """
    L, psi = _fictitious(kind, x)
    dual = _VIA_SPECTRAL_DUAL[kind](L)
    conj = np.linalg.solve(psi, dual.evaluate(complex(lam)) @ psi)
    return _undo_gauge(kind, conj, L.twist, complex(lam))


def pq_via_spectral(kind: ModelKind, x: PhasePoint, tol: float = 1e-8,
                    lams=(2.5 + 1.5j, -3.25 + 0.75j)) -> DualityReport:
    """Reproduce the many-body duality map through spectral duality.

    Rows: ``lambda_independence`` (the undone gauge leaves no ``lam``
    dependence) and ``dual_lax_match`` (agreement with the Lax matrix of the
    dual point from :func:`pq_duality.dualize`, after a diagonal gauge).
    Residuals are relative to the size of the dual Lax matrix.
    """
    tag = digest(x.to_dict(kind))
    report = DualityReport(config={"kind": kind.value})
    try:
        direct = dualize(kind, x)
        expected = xn.complex_array(lax(direct.dual_kind, direct.dual))
        mats = [dual_lax_via_spectral(kind, x, lam) for lam in lams]
    except DualityLabError as exc:
        report.add("pq_via_spectral", tag, float("inf"), tol, detail=f"{type(exc).__name__}: {exc}")
        return report
    scale = max(1.0, xn.max_abs(expected))
    drift = max(xn.max_abs(m - mats[0]) for m in mats[1:])
    report.add("lambda_independence", tag, drift / scale, tol)
    report.add("dual_lax_match", tag, gauge_residual(mats[0], expected) / scale, tol)
    return report
