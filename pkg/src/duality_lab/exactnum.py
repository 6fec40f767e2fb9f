"""Dense matrix kernels over two scalar backends.

Every matrix in the package is a 2-D :class:`numpy.ndarray` of one of two kinds:

* **exact** -- ``dtype=object`` holding :class:`fractions.Fraction` entries.
  Arithmetic is bit-exact, so polynomial identities can be checked for
  equality with zero.
* **float** -- ``dtype=complex128``.  Comparisons always go through a
  tolerance.

Functions here dispatch on the dtype.  Mixing backends promotes to complex.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateSpectrumError, NumericError, RankError

Scalar = Union[Fraction, complex]

#: residual bound for direct formula checks on the float backend
RTOL = 1e-9
#: separation below which two eigenvalues count as colliding
SEPARATION_TOL = 1e-12


# --------------------------------------------------------------------------
# construction and conversion
# --------------------------------------------------------------------------

def is_exact(a) -> bool:
    """True for object arrays (Fraction backend) and rational scalars."""
    if isinstance(a, np.ndarray):
        return a.dtype == object
    return isinstance(a, Rational)


def to_fraction(x) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer, str)):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"cannot represent {x!r} exactly")


def exact_array(values) -> np.ndarray:
    """Object array of Fractions with the shape of ``values``."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = to_fraction(arr[idx])
    return out


def complex_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object:
        out = np.empty(arr.shape, dtype=complex)
        for idx in np.ndindex(arr.shape):
            out[idx] = complex(arr[idx])
        return out
    return arr.astype(complex)


def as_array(values, exact: bool | None = None) -> np.ndarray:
    """Build an array on the requested backend, inferring it when ``exact`` is None."""
    if exact is None:
        arr = np.asarray(values, dtype=object)
        exact = all(isinstance(v, (Rational, str)) for v in arr.flat)
    return exact_array(values) if exact else complex_array(values)


def promote(*arrays):
    """Bring arrays to a common backend (exact only if all of them are)."""
    if all(is_exact(a) for a in arrays):
        return tuple(a if isinstance(a, np.ndarray) else to_fraction(a) for a in arrays)
    return tuple(complex_array(a) if isinstance(a, np.ndarray) else complex(a) for a in arrays)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=complex)


def eye(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def diag(values) -> np.ndarray:
    values = np.asarray(values)
    out = zeros((len(values), len(values)), values.dtype == object)
    for i, v in enumerate(values):
        out[i, i] = v
    return out


def outer(col, row) -> np.ndarray:
    col = np.asarray(col)
    row = np.asarray(row)
    return np.multiply.outer(col, row)


def strictly_lower(a: np.ndarray) -> np.ndarray:
    out = zeros(a.shape, is_exact(a))
    n = a.shape[0]
    for i in range(n):
        for j in range(i):
            out[i, j] = a[i, j]
    return out


# --------------------------------------------------------------------------
# norms and zero tests
# --------------------------------------------------------------------------

def max_abs(a) -> Union[Fraction, float]:
    """Largest entry modulus.  Exact (a Fraction) on the exact backend."""
    a = np.asarray(a)
    if a.size == 0:
        return Fraction(0) if a.dtype == object else 0.0
    if a.dtype == object:
        return max(abs(v) for v in a.flat)
    return float(np.max(np.abs(a)))


def is_zero(a) -> bool:
    """Bit-exact zero test; only meaningful on the exact backend."""
    return all(v == 0 for v in np.asarray(a).flat)


# --------------------------------------------------------------------------
# elimination
# --------------------------------------------------------------------------

def _check_square(a: np.ndarray) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a.shape[0]


def det(a: np.ndarray) -> Scalar:
    n = _check_square(a)
    if not is_exact(a):
        return complex(np.linalg.det(a))
    m = [list(row) for row in a]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return sign * result


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` (``b`` a vector or a matrix)."""
    n = _check_square(a)
    a, b = promote(a, b)
    if not is_exact(a):
        return np.linalg.solve(a, b)
    vec = b.ndim == 1
    rhs = b.reshape(n, -1)
    m = [list(a[i]) + list(rhs[i]) for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    x = np.empty((n, rhs.shape[1]), dtype=object)
    for i in range(n):
        x[i] = m[i][n:]
    return x[:, 0] if vec else x


def inv(a: np.ndarray) -> np.ndarray:
    n = _check_square(a)
    return solve(a, eye(n, is_exact(a)))


# --------------------------------------------------------------------------
# characteristic polynomials
# --------------------------------------------------------------------------

def char_poly(a: np.ndarray) -> list:
    """Coefficients ``[1, c1, ..., cN]`` of det(lambda*1 - A), descending powers.

    Faddeev--LeVerrier recursion; it only divides by integers, so it is
    exact on the Fraction backend.
    """
    n = _check_square(a)
    exact = is_exact(a)
    ident = eye(n, exact)
    coeffs = [Fraction(1) if exact else 1.0 + 0j]
    m = zeros((n, n), exact)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * ident
        tr = np.trace(a @ m)
        coeffs.append(-tr / k if exact else complex(-tr / k))
    return coeffs


def polyval(coeffs: Sequence, x):
    """Horner evaluation of a descending coefficient list."""
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


# --------------------------------------------------------------------------
# eigendecomposition
# --------------------------------------------------------------------------

def root_distance(coeffs: Sequence, values) -> float:
    """Newton estimate ``|p(v)| / |p'(v)|`` of the distance from each value to a root of ``p``.

    Returns the largest estimate over ``values``, relative to ``max(1, |v|)``.
    """
    cp = [complex(c) for c in coeffs]
    deriv = [c * (len(cp) - 1 - k) for k, c in enumerate(cp[:-1])]
    worst = 0.0
    for v in values:
        v = complex(v)
        step = abs(polyval(cp, v)) / max(abs(polyval(deriv, v)), 1e-300)
        worst = max(worst, step / max(1.0, abs(v)))
    return worst


def lex_order(values, tol: float = 1e-9) -> list[int]:
    """Indices sorting complex ``values`` by (re, im).

    Real parts closer than ``tol`` (relative to the largest modulus) are
    treated as equal so that a complex-conjugate pair from a real matrix
    always comes out with the negative imaginary part first.
    """
    values = np.asarray(values, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    by_re = sorted(range(len(values)), key=lambda k: (values[k].real, values[k].imag))
    order: list[int] = []
    group = [by_re[0]] if by_re else []
    for k in by_re[1:]:
        if values[k].real - values[group[-1]].real <= tol * scale:
            group.append(k)
        else:
            order.extend(sorted(group, key=lambda m: values[m].imag))
            group = [k]
    order.extend(sorted(group, key=lambda m: values[m].imag))
    return order


def eig_sorted(a: np.ndarray, sep_tol: float = SEPARATION_TOL, rtol: float = RTOL):
    """Eigenvalues and eigenvectors in a reproducible order and gauge.

    Returns ``(eigenvalues, Psi)`` with ``A @ Psi == Psi @ diag(eigenvalues)``.
    Eigenvalues are sorted by :func:`lex_order`; each column of ``Psi`` is
    scaled so that its first entry of largest modulus equals 1.

    Raises
    ------
    DegenerateSpectrumError
        if two eigenvalues are closer than ``sep_tol`` times the spectral scale.
    NumericError
        if LAPACK fails or the reconstruction residual exceeds ``rtol * |A|``.
    """
    n = _check_square(a)
    a = complex_array(a)
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(str(exc)) from exc
    scale = max(1.0, float(np.max(np.abs(vals)))) if n else 1.0
    for i, j in itertools.combinations(range(n), 2):
        if abs(vals[i] - vals[j]) < sep_tol * scale:
            raise DegenerateSpectrumError(
                f"eigenvalues {vals[i]:.6g} and {vals[j]:.6g} collide"
            )
    order = lex_order(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(n):
        col = vecs[:, k]
        vecs[:, k] = col / col[int(np.argmax(np.abs(col)))]
    resid = max_abs(a @ vecs - vecs * vals)
    if resid > rtol * max(max_abs(a), 1.0) * max(1.0, max_abs(vecs)):
        raise NumericError(f"eigen-residual {resid:.3g} exceeds tolerance")
    return vals, vecs


# --------------------------------------------------------------------------
# rank one
# --------------------------------------------------------------------------

def minors_vanish(a: np.ndarray, tol: float = 0.0) -> bool:
    """All 2x2 minors zero (exactly, or below ``tol * |A|^2`` on floats)."""
    rows, cols = a.shape
    bound = 0 if is_exact(a) else tol * max_abs(a) ** 2
    for i, k in itertools.combinations(range(rows), 2):
        for j, l in itertools.combinations(range(cols), 2):
            if abs(a[i, j] * a[k, l] - a[i, l] * a[k, j]) > bound:
                return False
    return True


def rank_one_factor(a: np.ndarray, tol: float = RTOL):
    """Split a rank-one matrix as ``xi (column) x eta (row)``.

    The largest-modulus entry of ``xi`` is 1.  On the exact backend the
    factorisation is exact and rank is decided by the vanishing of all 2x2
    minors; on floats ``|A - xi x eta| <= tol * |A|`` is required.
    """
    a = np.asarray(a)
    norm = max_abs(a)
    if norm == 0:
        raise RankError("zero matrix has rank 0")
    flat = int(np.argmax([abs(v) for v in a.flat]))
    i0, j0 = divmod(flat, a.shape[1])
    xi = a[:, j0] / a[i0, j0]
    eta = a[i0, :].copy()
    resid = max_abs(a - outer(xi, eta))
    if (resid != 0) if is_exact(a) else (resid > tol * norm):
        raise RankError(f"matrix is not rank one (residual {float(resid):.3g})")
    return xi, eta


# --------------------------------------------------------------------------
# JSON scalars
# --------------------------------------------------------------------------

def scalar_to_json(x):
    """Fractions as ``"p/q"`` strings, everything else as ``[re, im]``."""
    if isinstance(x, Rational):
        f = to_fraction(x)
        return f"{f.numerator}/{f.denominator}"
    z = complex(x)
    return [z.real, z.imag]


def scalar_from_json(x) -> Scalar:
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(re, im)
    if isinstance(x, int):
        return Fraction(x)
    return complex(x)


def vector_from_json(values) -> np.ndarray:
    items = [scalar_from_json(v) for v in values]
    return as_array(items)


def matrix_from_json(rows) -> np.ndarray:
    items = [[scalar_from_json(v) for v in row] for row in rows]
    return as_array(items)
