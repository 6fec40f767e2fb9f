"""Ruijsenaars (action-angle) duality maps between many-body models.

Each map diagonalises the Lax matrix ``L = Psi f(Q~) Psi^-1``, takes the dual
positions from the eigenvalues, and reads the dual momenta off the diagonal
of ``L~ = Psi^-1 g(Q) Psi`` (``g`` is the identity or ``exp``).  The diagonal of
``L~`` does not depend on how the columns of ``Psi`` are scaled, so the dual
momenta are well defined; the remaining diagonal-gauge freedom is fixed when
comparing ``L~`` with the dual model's Lax matrix.

=====================  ============  =============  ==============
map                    source        dual           dual coupling
=====================  ============  =============  ==============
dualize_rational_cm    RationalCM    RationalCM     -nu
dualize_cms_to_rrs     TrigCMS       RationalRS     nu
dualize_rrs_to_cms     RationalRS    TrigCMS        nu
dualize_trig_rs        TrigRS        TrigRS         -nu (t -> 1/t)
=====================  ============  =============  ==============

Dual points are returned in native variables (``multiplicative=True``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import exactnum as xn
from .errors import GaugeError, GenericityError
from .manybody import ModelKind, PhasePoint, lax, _rrs_b, _trs_b


@dataclass(frozen=True)
class DualityResult:
    dual: PhasePoint
    psi: np.ndarray
    dual_matrix: np.ndarray
    residual: float
    dual_kind: ModelKind
    dual_coupling: complex


def diagonal_gauge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Diagonal ``d`` (with ``d[0] = 1``) such that ``diag(d)^-1 a diag(d) ~ b``.

    Solved from the first row, ``a[0, j] d_j = b[0, j]``.  Where both entries
    vanish the factor is free and set to 1.
    """
    n = a.shape[0]
    tiny = 1e-14 * max(1.0, xn.max_abs(a), xn.max_abs(b))
    d = np.ones(n, dtype=complex)
    for j in range(1, n):
        if abs(a[0, j]) <= tiny:
            if abs(b[0, j]) <= tiny:
                continue
            raise GaugeError("no diagonal gauge: first-row zero pattern differs")
        d[j] = b[0, j] / a[0, j]
    return d


def gauge_residual(a: np.ndarray, b: np.ndarray) -> float:
    """``|D^-1 a D - b|`` after solving the diagonal gauge ``D`` from the first row."""
    a = xn.complex_array(a)
    b = xn.complex_array(b)
    d = diagonal_gauge(a, b)
    return xn.max_abs(a * d[None, :] / d[:, None] - b)


def _eig(L):
    return xn.eig_sorted(xn.complex_array(L))


def _conjugate(psi, diagonal):
    """``Psi^-1 diag(diagonal) Psi``."""
    return np.linalg.solve(psi, diagonal[:, None] * psi)


def dualize_rational_cm(x: PhasePoint) -> DualityResult:
    """Self-duality of the rational Calogero--Moser model."""
    kind = ModelKind.RATIONAL_CM
    L = lax(kind, x)
    q, _, nu = x.native(kind)
    qt, psi = _eig(L)
    colsum = psi.sum(axis=0)
    scale = max(1.0, xn.max_abs(psi))
    if np.any(np.abs(colsum) < 1e-12 * scale):
        raise GaugeError("vanishing eigenvector column sum")
    psi = psi / colsum[None, :]
    Lt = _conjugate(psi, xn.complex_array(q))
    pt = np.diagonal(Lt).copy()
    dual = PhasePoint(qt, pt, -complex(nu), multiplicative=True)
    expected = lax(kind, dual)
    return DualityResult(dual, psi, Lt, xn.max_abs(Lt - expected), kind, -complex(nu))


def dualize_cms_to_rrs(x: PhasePoint) -> DualityResult:
    """Trigonometric CMS to rational RS.

    ``q~`` are the eigenvalues of ``L^CMS``, ``L~ = Psi^-1 W Psi`` and
    ``e^{p~_j} = L~_jj / b_j(q~)``.
    """
    L = lax(ModelKind.TRIG_CMS, x)
    w, _, nu = x.native(ModelKind.TRIG_CMS)
    qt, psi = _eig(L)
    Lt = _conjugate(psi, xn.complex_array(w))
    b = np.asarray(_rrs_b(qt, complex(nu)), dtype=complex)
    if np.any(b == 0) or np.any(np.diagonal(Lt) == 0):
        raise GenericityError("dual momentum undefined (zero diagonal or product factor)")
    ut = np.diagonal(Lt) / b
    dual = PhasePoint(qt, ut, complex(nu), multiplicative=True)
    expected = lax(ModelKind.RATIONAL_RS, dual)
    return DualityResult(dual, psi, Lt, gauge_residual(Lt, expected),
                         ModelKind.RATIONAL_RS, complex(nu))


def dualize_rrs_to_cms(x: PhasePoint) -> DualityResult:
    """Rational RS back to trigonometric CMS (inverse of :func:`dualize_cms_to_rrs`)."""
    L = lax(ModelKind.RATIONAL_RS, x)
    q, _, nu = x.native(ModelKind.RATIONAL_RS)
    wt, psi = _eig(L)
    Lt = _conjugate(psi, xn.complex_array(q))
    pt = np.diagonal(Lt).copy()
    dual = PhasePoint(wt, pt, complex(nu), multiplicative=True)
    expected = lax(ModelKind.TRIG_CMS, dual)
    return DualityResult(dual, psi, Lt, gauge_residual(Lt, expected),
                         ModelKind.TRIG_CMS, complex(nu))


def dualize_trig_rs(x: PhasePoint) -> DualityResult:
    """Self-duality of the trigonometric RS model (coupling flips sign)."""
    kind = ModelKind.TRIG_RS
    L = lax(kind, x)
    w, _, t = x.native(kind)
    wt, psi = _eig(L)
    if np.any(wt == 0):
        raise GenericityError("zero eigenvalue of the trigonometric RS Lax matrix")
    Lt = _conjugate(psi, xn.complex_array(w))
    tt = 1 / complex(t)
    b = np.asarray(_trs_b(wt, tt), dtype=complex)
    if np.any(b == 0) or np.any(np.diagonal(Lt) == 0):
        raise GenericityError("dual momentum undefined (zero diagonal or product factor)")
    ut = np.diagonal(Lt) / b
    dual = PhasePoint(wt, ut, tt, multiplicative=True)
    expected = lax(kind, dual)
    return DualityResult(dual, psi, Lt, gauge_residual(Lt, expected), kind, tt)


#: source kind -> map
DUALITY_MAPS: dict[ModelKind, Callable[[PhasePoint], DualityResult]] = {
    ModelKind.RATIONAL_CM: dualize_rational_cm,
    ModelKind.TRIG_CMS: dualize_cms_to_rrs,
    ModelKind.RATIONAL_RS: dualize_rrs_to_cms,
    ModelKind.TRIG_RS: dualize_trig_rs,
}


def dualize(kind: ModelKind, x: PhasePoint) -> DualityResult:
    return DUALITY_MAPS[kind](x)


# --------------------------------------------------------------------------
# anticanonicity
# --------------------------------------------------------------------------

def _additive_dual(result: DualityResult, base: DualityResult | None):
    """Additive ``(q~, p~)`` of a dual point; logs are unwrapped against ``base``."""
    kind = result.dual_kind
    out = []
    for attr, is_exp in (("q", kind.exp_positions), ("p", kind.exp_momenta)):
        v = xn.complex_array(getattr(result.dual, attr))
        if is_exp:
            if base is None:
                v = np.log(v)
            else:
                ref = xn.complex_array(getattr(base.dual, attr))
                v = np.log(ref) + np.log(v / ref)
        out.append(v)
    return np.concatenate(out)


def symplectic_form(n: int) -> np.ndarray:
    """Matrix of ``sum dp ^ dq`` in coordinates ordered ``(q, p)``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def duality_jacobian(kind: ModelKind, x: PhasePoint, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``(q, p) -> (q~, p~)`` in additive coordinates.

    Uses the fourth-order five-point stencil so truncation error stays below
    rounding error near mildly clustered spectra.
    """
    fn = DUALITY_MAPS[kind]
    xa = x.additive(kind)
    n = xa.n
    coords = np.concatenate([xn.complex_array(xa.q), xn.complex_array(xa.p)])
    base = fn(xa)
    step = h * max(1.0, float(np.max(np.abs(coords))))
    weights = {2: -1.0, 1: 8.0, -1: -8.0, -2: 1.0}
    jac = np.zeros((2 * n, 2 * n), dtype=complex)
    for a in range(2 * n):
        for k, w in weights.items():
            c = coords.copy()
            c[a] += k * step
            jac[:, a] += w * _additive_dual(fn(PhasePoint(c[:n], c[n:], xa.nu)), base)
        jac[:, a] /= 12 * step
    return jac


def check_anticanonical(kind: ModelKind, x: PhasePoint, h: float = 1e-5) -> float:
    """``|J^T Omega J + Omega|`` for the duality map starting at ``kind``.

    Zero (up to finite-difference error) when the map is anticanonical.
    """
    jac = duality_jacobian(kind, x, h)
    omega = symplectic_form(x.n)
    return xn.max_abs(jac.T @ omega @ jac + omega)


# --------------------------------------------------------------------------
# involution
# --------------------------------------------------------------------------

def _sorted_native(kind: ModelKind, x: PhasePoint):
    pos, mom, c = x.native(kind)
    pos, mom = xn.complex_array(pos), xn.complex_array(mom)
    order = xn.lex_order(pos)
    return pos[order], mom[order], complex(c)


def involution_check(kind: ModelKind, x: PhasePoint) -> float:
    """Distance between ``x`` and its double dual, in native variables.

    Positions of both points are sorted by the eigenvalue order first.
    """
    first = dualize(kind, x)
    second = dualize(first.dual_kind, first.dual)
    if second.dual_kind is not kind:  # pragma: no cover - table is closed
        raise AssertionError("double dual landed on a different model")
    a = _sorted_native(kind, x)
    b = _sorted_native(kind, second.dual)
    return max(xn.max_abs(a[0] - b[0]), xn.max_abs(a[1] - b[1]), abs(a[2] - b[2]))
