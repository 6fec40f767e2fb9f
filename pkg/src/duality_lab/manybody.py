"""Lax matrices of the Calogero--Moser and Ruijsenaars--Schneider families.

Variables
---------
Each model is evaluated in its *native* variables, where every formula is
rational:

============  =============  =============  ===============
kind          positions      momenta        coupling
============  =============  =============  ===============
RationalCM    q              p              nu
TrigCMS       w = exp(q)     p              nu
RationalRS    q              u = exp(p)     nu
TrigRS        w = exp(q)     u = exp(p)     t = exp(-nu)
============  =============  =============  ===============

A :class:`PhasePoint` either stores additive ``(q, p, nu)`` or, with
``multiplicative=True``, stores the native variables of the kind it is used
with.  Exact (Fraction) data only makes sense in native variables.
"""

from __future__ import annotations

import cmath
import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactnum as xn
from .errors import GenericityError


class ModelKind(enum.Enum):
    RATIONAL_CM = "rational_cm"
    TRIG_CMS = "trig_cms"
    RATIONAL_RS = "rational_rs"
    TRIG_RS = "trig_rs"

    @property
    def exp_positions(self) -> bool:
        return self in (ModelKind.TRIG_CMS, ModelKind.TRIG_RS)

    @property
    def exp_momenta(self) -> bool:
        return self in (ModelKind.RATIONAL_RS, ModelKind.TRIG_RS)

    @property
    def exp_coupling(self) -> bool:
        return self is ModelKind.TRIG_RS

    @property
    def is_rs(self) -> bool:
        return self.exp_momenta


@dataclass(frozen=True)
class PhasePoint:
    """Positions, momenta and coupling of an N-body model."""

    q: np.ndarray
    p: np.ndarray
    nu: object
    multiplicative: bool = False
    exact: bool = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.q)
        p = np.asarray(self.p)
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError("q and p must be vectors of equal length")
        exact = xn.is_exact(q) and xn.is_exact(p) and xn.is_exact(self.nu)
        if exact:
            q, p = xn.exact_array(q), xn.exact_array(p)
            nu = xn.to_fraction(self.nu)
        else:
            q, p, nu = xn.complex_array(q), xn.complex_array(p), complex(self.nu)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "exact", exact)

    @property
    def n(self) -> int:
        return len(self.q)

    def native(self, kind: ModelKind):
        """Return ``(positions, momenta, coupling)`` in the native variables of ``kind``."""
        if self.multiplicative:
            return self.q, self.p, self.nu
        x, y, c = self.q, self.p, self.nu
        if kind.exp_positions:
            x = np.exp(xn.complex_array(x))
        if kind.exp_momenta:
            y = np.exp(xn.complex_array(y))
        if kind.exp_coupling:
            c = cmath.exp(-complex(c))
        if any(isinstance(v, np.ndarray) and v.dtype != object for v in (x, y)) or (
            not xn.is_exact(c)
        ):
            x, y, c = xn.complex_array(x), xn.complex_array(y), complex(c)
        return x, y, c

    def additive(self, kind: ModelKind) -> "PhasePoint":
        """Additive ``(q, p, nu)`` using principal logarithms."""
        if not self.multiplicative:
            return self
        x, y, c = (xn.complex_array(self.q), xn.complex_array(self.p), complex(self.nu))
        if kind.exp_positions:
            x = np.log(x)
        if kind.exp_momenta:
            y = np.log(y)
        if kind.exp_coupling:
            c = -cmath.log(c)
        return PhasePoint(x, y, c)

    def to_dict(self, kind: ModelKind) -> dict:
        return {
            "kind": kind.value,
            "q": [xn.scalar_to_json(v) for v in self.q],
            "p": [xn.scalar_to_json(v) for v in self.p],
            "nu": xn.scalar_to_json(self.nu),
            "multiplicative": self.multiplicative,
        }

    def to_json(self, kind: ModelKind) -> str:
        return json.dumps(self.to_dict(kind), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> tuple[ModelKind, "PhasePoint"]:
        kind = ModelKind(d["kind"])
        q = [xn.scalar_from_json(v) for v in d["q"]]
        p = [xn.scalar_from_json(v) for v in d["p"]]
        nu = xn.scalar_from_json(d["nu"])
        values = q + p + [nu]
        if all(isinstance(v, Fraction) for v in values):
            point = cls(xn.exact_array(q), xn.exact_array(p), nu, d.get("multiplicative", False))
        else:
            point = cls(
                xn.complex_array([complex(v) for v in q]),
                xn.complex_array([complex(v) for v in p]),
                complex(nu),
                d.get("multiplicative", False),
            )
        return kind, point


# --------------------------------------------------------------------------
# genericity
# --------------------------------------------------------------------------

def _close(a, b, exact: bool, tol: float = 1e-12) -> bool:
    if exact:
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def check_generic(kind: ModelKind, x: PhasePoint) -> None:
    """Raise :class:`GenericityError` on coincident positions or RS pole conditions."""
    pos, _, c = x.native(kind)
    exact = xn.is_exact(pos)
    n = len(pos)
    if kind.exp_positions and any(_close(w, 0, exact) for w in pos):
        raise GenericityError("multiplicative position equal to zero")
    for i in range(n):
        for j in range(i + 1, n):
            if _close(pos[i], pos[j], exact):
                raise GenericityError(f"coincident positions {i} and {j}")
    if kind is ModelKind.RATIONAL_RS:
        for i in range(n):
            for j in range(n):
                if i != j and _close(pos[i] - pos[j] + c, 0, exact):
                    raise GenericityError(f"pole condition q_{i} - q_{j} + nu = 0")
    if kind is ModelKind.TRIG_RS:
        if _close(c, 0, exact):
            raise GenericityError("trigonometric RS needs exp(-nu) != 0")
        for i in range(n):
            for j in range(n):
                if i != j and _close(pos[i], c * pos[j], exact):
                    raise GenericityError(f"pole condition w_{i} = exp(-nu) w_{j}")


# --------------------------------------------------------------------------
# Lax matrices
# --------------------------------------------------------------------------

def _rrs_b(q, nu):
    n = len(q)
    b = []
    for j in range(n):
        prod = 1
        for k in range(n):
            if k != j:
                prod = prod * (q[j] - q[k] - nu) / (q[j] - q[k])
        b.append(prod)
    return b


def _trs_b(w, t):
    n = len(w)
    b = []
    for j in range(n):
        prod = 1
        for k in range(n):
            if k != j:
                prod = prod * (t * w[j] - w[k]) / (w[j] - w[k])
        b.append(prod)
    return b


def rrs_lax(q, u, nu) -> np.ndarray:
    """Rational RS Lax matrix in native variables ``(q, u = e^p, nu)``."""
    n = len(q)
    exact = xn.is_exact(np.asarray(q)) and xn.is_exact(np.asarray(u)) and xn.is_exact(nu)
    if nu == 0:  # removable 0/0 on the diagonal; free particles
        return xn.diag(xn.as_array(u, exact))
    out = xn.zeros((n, n), exact)
    b = _rrs_b(q, nu)
    for i in range(n):
        for j in range(n):
            out[i, j] = nu / (q[i] - q[j] + nu) * u[j] * b[j]
    return out


def trs_lax(w, u, t) -> np.ndarray:
    """Trigonometric RS Lax matrix in native variables ``(w, u, t = e^{-nu})``."""
    n = len(w)
    exact = xn.is_exact(np.asarray(w)) and xn.is_exact(np.asarray(u)) and xn.is_exact(t)
    if t == 1:  # nu = 0, free particles
        return xn.diag(xn.as_array(u, exact))
    out = xn.zeros((n, n), exact)
    b = _trs_b(w, t)
    for i in range(n):
        for j in range(n):
            out[i, j] = (1 - t) * w[i] / (w[i] - t * w[j]) * u[j] * b[j]
    return out


def lax(kind: ModelKind, x: PhasePoint) -> np.ndarray:
    """N x N Lax matrix of ``kind`` at ``x`` (exact when ``x`` is exact)."""
    check_generic(kind, x)
    pos, mom, c = x.native(kind)
    n = len(pos)
    if kind is ModelKind.RATIONAL_CM:
        out = xn.diag(mom)
        for i in range(n):
            for j in range(n):
                if i != j:
                    out[i, j] = c / (pos[i] - pos[j])
        return out
    if kind is ModelKind.TRIG_CMS:
        out = xn.diag(mom)
        for i in range(n):
            for j in range(n):
                if i != j:
                    out[i, j] = c * pos[j] / (pos[j] - pos[i])
        return out
    if kind is ModelKind.RATIONAL_RS:
        return rrs_lax(pos, mom, c)
    if kind is ModelKind.TRIG_RS:
        return trs_lax(pos, mom, c)
    raise ValueError(kind)  # pragma: no cover


def _ones(n: int, exact: bool) -> np.ndarray:
    out = xn.zeros((n, n), exact)
    out[...] = Fraction(1) if exact else 1.0
    return out


def moment_residual(kind: ModelKind, x: PhasePoint) -> np.ndarray:
    """LHS - RHS of the matrix equation characterising the Lax matrix of ``kind``.

    ============  ===================================================
    RationalCM    [Q, L] - nu (O - 1)
    TrigCMS       L - W L W^-1 - nu (O - 1)
    RationalRS    nu L + [Q, L] - nu O diag(L)
    TrigRS        L - t W^-1 L W - (1 - t) O diag(L)
    ============  ===================================================

    ``O`` is the all-ones matrix and ``W = diag(w)``.  Identically zero.
    """
    L = lax(kind, x)
    pos, _, c = x.native(kind)
    n = len(pos)
    exact = xn.is_exact(L)
    ident = xn.eye(n, exact)
    ones = _ones(n, exact)
    P = xn.diag(pos)
    dL = xn.diag(np.diagonal(L))
    if kind is ModelKind.RATIONAL_CM:
        return (P @ L - L @ P) - c * (ones - ident)
    if kind is ModelKind.TRIG_CMS:
        conj = np.array([[pos[i] * L[i, j] / pos[j] for j in range(n)] for i in range(n)],
                        dtype=L.dtype)
        return L - conj - c * (ones - ident)
    if kind is ModelKind.RATIONAL_RS:
        return c * L + (P @ L - L @ P) - c * (ones @ dL)
    conj = np.array([[L[i, j] * pos[j] / pos[i] for j in range(n)] for i in range(n)],
                    dtype=L.dtype)
    return L - c * conj - (1 - c) * (ones @ dL)


def _rank(a: np.ndarray, tol: float = 1e-9) -> int:
    if xn.is_exact(a):
        m = [list(r) for r in a]
        rank = 0
        rows, cols = a.shape
        for col in range(cols):
            piv = next((r for r in range(rank, rows) if m[r][col] != 0), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            for r in range(rank + 1, rows):
                f = m[r][col] / m[rank][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
            rank += 1
        return rank
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))


def trs_spectrum_check(x: PhasePoint):
    """Check that ``M = L W^-1 L^-1 W`` is ``t * 1`` plus a rank-one matrix.

    Returns ``(rank_defect, spectrum_residual)`` where ``rank_defect =
    rank(M - t) - 1`` and ``spectrum_residual`` measures the distance of the
    spectrum of ``M`` from ``{t^(1-N), t, ..., t}``: on exact input it is the
    largest characteristic-polynomial coefficient mismatch (a Fraction), on
    floats the optimal-matching eigenvalue distance.
    """
    kind = ModelKind.TRIG_RS
    L = lax(kind, x)
    w, _, t = x.native(kind)
    n = len(w)
    exact = xn.is_exact(L)
    W = xn.diag(w)
    Winv = xn.diag([1 / v for v in w])
    M = L @ Winv @ xn.inv(L) @ W
    rank_defect = _rank(M - t * xn.eye(n, exact)) - 1
    predicted = [t ** (1 - n)] + [t] * (n - 1)
    if exact:
        target = [Fraction(1)]
        for mu in predicted:
            target = [a - mu * b for a, b in zip(target + [0], [0] + target)]
        resid = max(abs(a - b) for a, b in zip(xn.char_poly(M), target))
        return rank_defect, resid
    from scipy.optimize import linear_sum_assignment

    vals = np.linalg.eigvals(M)
    pred = np.asarray(predicted, dtype=complex)
    cost = np.abs(vals[:, None] - pred[None, :])
    rows, cols = linear_sum_assignment(cost)
    return rank_defect, float(cost[rows, cols].max())


def hamiltonian(kind: ModelKind, x: PhasePoint, inverse: bool = False):
    """First non-trivial invariant of ``kind``.

    CM kinds: ``1/2 tr L^2`` in closed form.  RS kinds: ``tr L`` (or
    ``tr L^-1`` with ``inverse=True``).
    """
    check_generic(kind, x)
    pos, mom, c = x.native(kind)
    n = len(pos)
    if kind is ModelKind.RATIONAL_CM:
        h = sum(v * v for v in mom) / 2
        for i in range(n):
            for j in range(i + 1, n):
                h -= c * c / (pos[i] - pos[j]) ** 2
        return h
    if kind is ModelKind.TRIG_CMS:
        h = sum(v * v for v in mom) / 2
        for i in range(n):
            for j in range(i + 1, n):
                h -= c * c * pos[i] * pos[j] / (pos[i] - pos[j]) ** 2
        return h
    L = lax(kind, x)
    if inverse:
        return np.trace(xn.inv(L))
    return np.trace(L)
