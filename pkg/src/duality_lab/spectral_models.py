"""Gaudin models, spin chains and classical r-matrices with rank-one residues.

A :class:`MultiPoleLax` of size ``n`` with ``m`` poles stores a diagonal
twist, the pole positions and factor matrices ``xi`` (n x m) and ``eta``
(m x n); the k-th residue is built from ``xi[:, k] (x) eta[k, :]``.  The kind
selects the evaluation formula::

    RATIONAL_GAUDIN       L(z) = twist + sum_k        xi^k eta^k / (z - z_k)
    TRIG_GAUDIN_REDUCED   L(z) = twist + sum_k  z_k   xi^k eta^k / (z - z_k)
    XXX_CHAIN             T(z) = twist (1 + sum_k     xi^k eta^k / (z - z_k))
    XXZ_CHAIN             T(z) = twist (1 + sum_k z_k xi^k eta^k / (z - z_k))
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactnum as xn
from .errors import DegenerateSpectrumError, GenericityError, PoleError


class SpectralKind(enum.Enum):
    RATIONAL_GAUDIN = "rational_gaudin"
    TRIG_GAUDIN_REDUCED = "trig_gaudin_reduced"
    XXX_CHAIN = "xxx_chain"
    XXZ_CHAIN = "xxz_chain"

    @property
    def weighted(self) -> bool:
        """Residues carry the extra pole factor ``z_k``."""
        return self in (SpectralKind.TRIG_GAUDIN_REDUCED, SpectralKind.XXZ_CHAIN)

    @property
    def chain(self) -> bool:
        return self in (SpectralKind.XXX_CHAIN, SpectralKind.XXZ_CHAIN)


def _all_distinct(values, exact: bool, tol: float = 1e-12) -> bool:
    for a, b in itertools.combinations(values, 2):
        if (a == b) if exact else abs(a - b) <= tol * max(1.0, abs(a), abs(b)):
            return False
    return True


def _is_infinite(z) -> bool:
    return isinstance(z, float) and math.isinf(z)


@dataclass(frozen=True)
class PoleForm:
    """``constant + sum_k residues[k] / (z - poles[k])`` with a general constant term."""

    constant: np.ndarray
    poles: np.ndarray
    residues: tuple

    def evaluate(self, z):
        if _is_infinite(z):
            return self.constant.copy()
        out = self.constant.copy()
        for zk, res in zip(self.poles, self.residues):
            if z == zk:
                raise PoleError(f"evaluation at the pole {zk}")
            out = out + res / (z - zk)
        return out


@dataclass(frozen=True)
class MultiPoleLax:
    kind: SpectralKind
    twist: np.ndarray
    poles: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    exact: bool = field(init=False)

    def __post_init__(self):
        twist, poles, xi, eta = (np.asarray(a) for a in (self.twist, self.poles, self.xi, self.eta))
        n, m = len(twist), len(poles)
        xi = xi.reshape(n, m)
        eta = eta.reshape(m, n)
        exact = all(xn.is_exact(a) for a in (twist, poles, xi, eta))
        conv = xn.exact_array if exact else xn.complex_array
        twist, poles, xi, eta = (conv(a) for a in (twist, poles, xi, eta))
        if not _all_distinct(poles, exact):
            raise GenericityError("poles must be pairwise distinct")
        if self.kind.weighted and any(p == 0 for p in poles):
            raise GenericityError("trigonometric poles must be nonzero")
        for name, value in (("twist", twist), ("poles", poles), ("xi", xi), ("eta", eta)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "exact", exact)

    @property
    def n(self) -> int:
        return len(self.twist)

    @property
    def m(self) -> int:
        return len(self.poles)

    def residue_factors(self, k: int):
        return self.xi[:, k], self.eta[k, :]

    def residues(self) -> list[np.ndarray]:
        """Residues of the evaluated matrix at each pole."""
        out = []
        V = xn.diag(self.twist)
        for k in range(self.m):
            r = xn.outer(*self.residue_factors(k))
            if self.kind.weighted:
                r = self.poles[k] * r
            if self.kind.chain:
                r = V @ r
            out.append(r)
        return out

    def to_pole_form(self) -> PoleForm:
        return PoleForm(xn.diag(self.twist), self.poles, tuple(self.residues()))

    def evaluate(self, z) -> np.ndarray:
        """The Lax/monodromy matrix at spectral parameter ``z``.

        ``z = float('inf')`` returns the twist.
        """
        if _is_infinite(z):
            return xn.diag(self.twist)
        if not self.exact or not xn.is_exact(z):
            z = complex(z) if not self.exact else z
        weights = []
        for zk in self.poles:
            if z == zk:
                raise PoleError(f"evaluation at the pole {zk}")
            weights.append((zk if self.kind.weighted else 1) / (z - zk))
        weights = np.asarray(weights, dtype=object if self.exact and xn.is_exact(z) else complex)
        if weights.dtype == object:
            body = self.xi @ (weights[:, None] * self.eta)
        else:
            body = xn.complex_array(self.xi) @ (weights[:, None] * xn.complex_array(self.eta))
        V = xn.diag(self.twist)
        if weights.dtype != object:
            V = xn.complex_array(V)
        if self.kind.chain:
            return V @ (xn.eye(self.n, weights.dtype == object) + body)
        return V + body

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "twist": [xn.scalar_to_json(v) for v in self.twist],
            "poles": [xn.scalar_to_json(v) for v in self.poles],
            "xi": [[xn.scalar_to_json(v) for v in row] for row in self.xi],
            "eta": [[xn.scalar_to_json(v) for v in row] for row in self.eta],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MultiPoleLax":
        twist = [xn.scalar_from_json(v) for v in d["twist"]]
        poles = [xn.scalar_from_json(v) for v in d["poles"]]
        xi = [[xn.scalar_from_json(v) for v in row] for row in d["xi"]]
        eta = [[xn.scalar_from_json(v) for v in row] for row in d["eta"]]
        n, m = len(twist), len(poles)
        exact = all(isinstance(v, Fraction) for v in twist + poles + sum(xi, []) + sum(eta, []))
        conv = xn.exact_array if exact else xn.complex_array
        xi_arr = conv(xi) if m else xn.zeros((n, 0), exact)
        eta_arr = conv(eta) if m else xn.zeros((0, n), exact)
        return cls(SpectralKind(d["kind"]), conv(twist), conv(poles), xi_arr, eta_arr)


def _factor(b) -> tuple[np.ndarray, np.ndarray]:
    """Accept a ``(column, row)`` pair or a rank-one matrix."""
    if isinstance(b, tuple):
        col, row = b
        return np.asarray(col), np.asarray(row)
    return xn.rank_one_factor(np.asarray(b))


# --------------------------------------------------------------------------
# XXX chain
# --------------------------------------------------------------------------

def _xxx_local(lam, site) -> np.ndarray:
    col, row = site
    n = len(col)
    return xn.eye(n, xn.is_exact(col) and xn.is_exact(lam)) + xn.outer(col, row) / lam


def xxx_monodromy_eval(V, sites: Sequence, lam) -> np.ndarray:
    """Ordered product ``V L^N(lam - lam_N) ... L^1(lam - lam_1)``; site N leftmost."""
    out = xn.diag(V)
    for lam_i, b in reversed(list(sites)):
        out = out @ _xxx_local(lam - lam_i, _factor(b))
    return out


def xxx_monodromy_product(V, sites: Sequence) -> MultiPoleLax:
    """Expand the XXX monodromy into sum form ``V (1 + sum_i S~^i / (lam - lam_i))``.

    ``sites`` is a list of ``(lam_i, B_i)`` with ``B_i`` a rank-one matrix or a
    ``(column, row)`` factor pair.  Each residue is
    ``[prod_{j>i} L^j(lam_i - lam_j)] B^i [prod_{j<i} L^j(lam_i - lam_j)]``,
    which is rank one.
    """
    V = np.asarray(V)
    lams = [s[0] for s in sites]
    factors = [_factor(s[1]) for s in sites]
    exact = xn.is_exact(V) and all(xn.is_exact(x) for x in lams) and all(
        xn.is_exact(c) and xn.is_exact(r) for c, r in factors)
    if not _all_distinct(lams, exact):
        raise GenericityError("repeated inhomogeneities")
    n, m = len(V), len(sites)
    xi = xn.zeros((n, m), exact)
    eta = xn.zeros((m, n), exact)
    for i, (lam_i, (col, row)) in enumerate(zip(lams, factors)):
        left = xn.eye(n, exact)
        for j in range(m - 1, i, -1):
            left = left @ _xxx_local(lam_i - lams[j], factors[j])
        right = xn.eye(n, exact)
        for j in range(i - 1, -1, -1):
            right = right @ _xxx_local(lam_i - lams[j], factors[j])
        xi[:, i] = left @ col
        eta[i, :] = row @ right
    conv = xn.exact_array if exact else xn.complex_array
    return MultiPoleLax(SpectralKind.XXX_CHAIN, conv(V), conv(lams), xi, eta)


# --------------------------------------------------------------------------
# XXZ chain
# --------------------------------------------------------------------------

def xxz_local_lax(z, zk, b) -> np.ndarray:
    """``1 + B_lower + z_k B / (z - z_k)`` with ``B_lower`` the strictly lower part of B."""
    if zk == 0:
        raise GenericityError("zero inhomogeneity")
    col, row = _factor(b)
    B = xn.outer(col, row)
    n = B.shape[0]
    exact = xn.is_exact(B) and xn.is_exact(z) and xn.is_exact(zk)
    if z == zk:
        raise PoleError("evaluation at the inhomogeneity")
    return xn.eye(n, exact) + xn.strictly_lower(B) + zk * B / (z - zk)


def xxz_monodromy_eval(V, sites: Sequence, z) -> np.ndarray:
    """Ordered product ``V L^M(z/z_M) ... L^1(z/z_1)`` (ungauged)."""
    out = xn.diag(V)
    for zk, b in reversed(list(sites)):
        out = out @ xxz_local_lax(z, zk, b)
    return out


def xxz_monodromy(V, sites: Sequence, return_gauge: bool = False):
    """Gauged sum form ``V (1 + sum_k z_k S^k / (z - z_k))`` of the XXZ monodromy.

    The product has constant term ``V (1 + U_lower)``; the lower-unitriangular
    gauge ``g`` with ``g^-1 V (1 + U_lower) g = V`` (see
    :func:`gauge_matrix_recursive`) removes the triangular part, so
    ``g^-1 T(z) g`` equals the returned matrix for every ``z``.
    """
    V = np.asarray(V)
    zs = [s[0] for s in sites]
    factors = [_factor(s[1]) for s in sites]
    exact = xn.is_exact(V) and all(xn.is_exact(x) for x in zs) and all(
        xn.is_exact(c) and xn.is_exact(r) for c, r in factors)
    if any(zk == 0 for zk in zs):
        raise GenericityError("zero inhomogeneity")
    if any(v == 0 for v in V):
        raise GenericityError("XXZ twist entries must be nonzero")
    if not _all_distinct(zs, exact):
        raise GenericityError("repeated inhomogeneities")
    conv = xn.exact_array if exact else xn.complex_array
    V = conv(V)
    n, m = len(V), len(sites)
    at_inf = xn.eye(n, exact)
    for k in range(m - 1, -1, -1):
        at_inf = at_inf @ (xn.eye(n, exact) + xn.strictly_lower(xn.outer(*factors[k])))
    Vm = xn.diag(V)
    g = gauge_matrix_recursive(V, Vm @ at_inf - Vm)
    ginv = xn.inv(g)
    Vinv = xn.diag([1 / v for v in V])
    xi = xn.zeros((n, m), exact)
    eta = xn.zeros((m, n), exact)
    for k in range(m):
        left = xn.eye(n, exact)
        for j in range(m - 1, k, -1):
            left = left @ xxz_local_lax(zs[k], zs[j], factors[j])
        right = xn.eye(n, exact)
        for j in range(k - 1, -1, -1):
            right = right @ xxz_local_lax(zs[k], zs[j], factors[j])
        col, row = factors[k]
        xi[:, k] = Vinv @ ginv @ Vm @ (left @ col)
        eta[k, :] = (row @ right) @ g
    out = MultiPoleLax(SpectralKind.XXZ_CHAIN, V, conv(zs), xi, eta)
    return (out, g) if return_gauge else out


# --------------------------------------------------------------------------
# triangular gauge
# --------------------------------------------------------------------------

def _check_twist(lam, exact: bool) -> None:
    if not _all_distinct(lam, exact):
        raise DegenerateSpectrumError("twist eigenvalues must be pairwise distinct")


def gauge_matrix_recursive(lam, s_lower: np.ndarray) -> np.ndarray:
    """Lower-unitriangular ``g`` with ``g^-1 (diag(lam) + s_lower) g = diag(lam)``.

    Column by column, for ``i > j``::

        g_ij (lam_j - lam_i) = S_ij + sum_{j < d < i} S_id g_dj
    """
    lam = np.asarray(lam)
    exact = xn.is_exact(lam) and xn.is_exact(s_lower)
    _check_twist(lam, exact)
    n = len(lam)
    g = xn.eye(n, exact)
    for j in range(n):
        for i in range(j + 1, n):
            acc = s_lower[i, j]
            for d in range(j + 1, i):
                acc = acc + s_lower[i, d] * g[d, j]
            g[i, j] = acc / (lam[j] - lam[i])
    return g


def gauge_matrix(lam, xi: np.ndarray, eta: np.ndarray, method: str = "closed") -> np.ndarray:
    """Gauge matrix removing the strictly lower part of ``S = xi @ eta``.

    ``method="closed"`` uses the product formula, for ``i > j``::

        g_ij = xi_i (1 + eta_{i-1} xi_{i-1} / (lam_j - lam_{i-1}))
                    ... (1 + eta_{j+1} xi_{j+1} / (lam_j - lam_{j+1})) eta_j
               / (lam_j - lam_i)

    with ``xi_i`` the i-th row of ``xi`` and ``eta_p`` the p-th column of
    ``eta``.  ``method="recursive"`` solves the triangular recursion instead.
    """
    lam = np.asarray(lam)
    if method == "recursive":
        return gauge_matrix_recursive(lam, xn.strictly_lower(xi @ eta))
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    exact = all(xn.is_exact(a) for a in (lam, xi, eta))
    _check_twist(lam, exact)
    n, m = xi.shape
    g = xn.eye(n, exact)
    ident = xn.eye(m, exact)
    for j in range(n):
        for i in range(j + 1, n):
            row = xi[i, :]
            for p in range(i - 1, j, -1):
                row = row @ (ident + xn.outer(eta[:, p], xi[p, :]) / (lam[j] - lam[p]))
            g[i, j] = (row @ eta[:, j]) / (lam[j] - lam[i])
    return g


# --------------------------------------------------------------------------
# trigonometric Gaudin
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RawTrigGaudin:
    """``L'(z) = Lambda + S_lower + sum_k z_k S^k / (z - z_k)`` with ``S^k = xi^k eta^k``."""

    twist: np.ndarray
    poles: np.ndarray
    xi: np.ndarray
    eta: np.ndarray

    def evaluate(self, z) -> np.ndarray:
        lam = np.asarray(self.twist)
        s_lower = xn.strictly_lower(self.xi @ self.eta)
        out = xn.diag(lam) + s_lower
        for k, zk in enumerate(self.poles):
            if z == zk:
                raise PoleError(f"evaluation at the pole {zk}")
            out = out + zk * xn.outer(self.xi[:, k], self.eta[k, :]) / (z - zk)
        return out

    def __call__(self, z) -> np.ndarray:
        return self.evaluate(z)

    def reduce(self, method: str = "closed") -> MultiPoleLax:
        """Conjugate by the triangular gauge: ``xi -> g^-1 xi``, ``eta -> eta g``."""
        g = gauge_matrix(self.twist, self.xi, self.eta, method)
        return MultiPoleLax(SpectralKind.TRIG_GAUDIN_REDUCED, self.twist, self.poles,
                            xn.solve(g, self.xi), self.eta @ g)


def trig_gaudin_raw(lam, poles, xi, eta) -> RawTrigGaudin:
    lam, poles, xi, eta = (np.asarray(a) for a in (lam, poles, xi, eta))
    exact = all(xn.is_exact(a) for a in (lam, poles, xi, eta))
    _check_twist(lam, exact)
    if not _all_distinct(poles, exact) or any(p == 0 for p in poles):
        raise GenericityError("poles must be distinct and nonzero")
    return RawTrigGaudin(lam, poles, xi, eta)


# --------------------------------------------------------------------------
# classical r-matrices
# --------------------------------------------------------------------------

class RVariant(enum.Enum):
    XXZ_ADDITIVE = "xxz_additive"
    XXZ_MULTIPLICATIVE = "xxz_multiplicative"
    TWISTED = "twisted"


def r_matrix(variant: RVariant, z, n: int) -> np.ndarray:
    """Classical r-matrix as an ``n^2 x n^2`` array in the ``kron`` basis.

    ``XXZ_ADDITIVE`` takes ``zeta`` (complex floats only); the other two take
    the multiplicative argument ``z = exp(2 zeta)`` and stay rational.
    """
    exact = xn.is_exact(z) and variant is not RVariant.XXZ_ADDITIVE
    if variant is RVariant.XXZ_ADDITIVE:
        z = complex(z)
        diag_c = np.cosh(z) / np.sinh(z)
        upper_c = np.exp(z) / np.sinh(z)
        lower_c = np.exp(-z) / np.sinh(z)
    elif variant is RVariant.XXZ_MULTIPLICATIVE:
        if z == 1:
            raise PoleError("r-matrix pole at z = 1")
        diag_c = (z + 1) / (z - 1)
        upper_c = 2 * z / (z - 1)
        lower_c = 2 / (z - 1) if not exact else Fraction(2) / (z - 1)
    elif variant is RVariant.TWISTED:
        if z == 1:
            raise PoleError("r-matrix pole at z = 1")
        base = 1 / (z - 1) if not exact else Fraction(1) / (z - 1)
        diag_c, upper_c, lower_c = base, base, base + 1
    else:  # pragma: no cover
        raise ValueError(variant)
    out = xn.zeros((n * n, n * n), exact)
    for i in range(n):
        for j in range(n):
            # E_ij (x) E_ji sits at row (i, j), column (j, i) of the kron basis
            out[i * n + j, j * n + i] = diag_c if i == j else (upper_c if i < j else lower_c)
    return out


def embed(r: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    """Place a two-site tensor on sites ``(a, b)`` of ``Mat_n^{(x)3}`` (0-based, any order)."""
    c = 3 - a - b
    t = r.reshape(n, n, n, n)  # [i_a, i_b, j_a, j_b]
    full = np.multiply.outer(t, xn.eye(n, xn.is_exact(r)))  # [i_a, i_b, j_a, j_b, i_c, j_c]
    row_axis = {a: 0, b: 1, c: 4}
    col_axis = {a: 2, b: 3, c: 5}
    perm = [row_axis[s] for s in range(3)] + [col_axis[s] for s in range(3)]
    return np.transpose(full, perm).reshape(n ** 3, n ** 3)


def partial_trace_2(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``tr_2(r (1 (x) B))``."""
    n = b.shape[0]
    t = r.reshape(n, n, n, n)  # [i, k, j, l] for E_ij (x) E_kl
    out = xn.zeros((n, n), xn.is_exact(r) and xn.is_exact(b))
    for i, j, k, l in itertools.product(range(n), repeat=4):
        out[i, j] = out[i, j] + t[i, k, j, l] * b[l, k]
    return out


def _sparse_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product that only visits nonzero entries; embedded r-matrices are very sparse."""
    out = xn.zeros((x.shape[0], y.shape[1]), xn.is_exact(x) and xn.is_exact(y))
    y_rows = {k: [(j, y[k, j]) for j in np.flatnonzero(y[k, :] != 0)] for k in range(y.shape[0])}
    for i, k in zip(*np.nonzero(x != 0)):
        xik = x[i, k]
        for j, ykj in y_rows[k]:
            out[i, j] = out[i, j] + xik * ykj
    return out


def _comm(x, y):
    if xn.is_exact(x) and xn.is_exact(y):
        return _sparse_matmul(x, y) - _sparse_matmul(y, x)
    return x @ y - y @ x


def cybe_residual(variant: RVariant, z1, z2, z3, n: int):
    """Largest entry of the classical Yang--Baxter left-hand side.

    Skew-symmetric XXZ forms use
    ``[r12, r23] + [r12, r13] + [r13, r23]`` with arguments ``z_a - z_b``
    (additive) or ``z_a / z_b`` (multiplicative).  The twisted r-matrix is not
    skew-symmetric and uses ``[r12, r23] + [r12, r13] + [r32(z3/z2), r13]``.
    """
    if variant is RVariant.XXZ_ADDITIVE:
        arg = lambda a, b: a - b  # noqa: E731
    else:
        arg = lambda a, b: a / b  # noqa: E731

    def r(a, b, x, y):
        return embed(r_matrix(variant, arg(x, y), n), n, a, b)

    r12 = r(0, 1, z1, z2)
    r23 = r(1, 2, z2, z3)
    r13 = r(0, 2, z1, z3)
    if variant is RVariant.TWISTED:
        third = _comm(r(2, 1, z3, z2), r13)
    else:
        third = _comm(r13, r23)
    return xn.max_abs(_comm(r12, r23) + _comm(r12, r13) + third)
