"""Time evolution of many-body and Gaudin models, and the Schlesinger deformation residual.

All integrators are classical fixed-step RK4 in complex floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactnum as xn
from .cc_duality import expand_hamiltonians
from .errors import GenericityError, NumericError, PoleError
from .manybody import ModelKind, PhasePoint, lax
from .spectral_duality import spectral_poly
from .spectral_models import MultiPoleLax, PoleForm

COLLISION_TOL = 1e-6


@dataclass
class FlowResult:
    times: list
    states: list
    invariants: dict
    dt: float
    order: int = 4
    drift: dict = field(init=False)

    def __post_init__(self):
        self.drift = {
            name: float(max(np.max(np.abs(np.asarray(v) - np.asarray(values[0]))) for v in values))
            for name, values in self.invariants.items()
        }

    @property
    def max_drift(self) -> float:
        return max(self.drift.values(), default=0.0)

    def final_state(self):
        return self.states[-1]


def rk4_step(rhs, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + h / 2 * k1)
    k3 = rhs(y + h / 2 * k2)
    k4 = rhs(y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate(rhs, y0, t_end, dt, invariants, sample_every, monitor=None) -> FlowResult:
    steps = int(round(t_end / dt))
    if steps < 1 or abs(steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError("t_end must be a positive multiple of dt")
    y = np.array(y0, dtype=complex)
    times, states = [0.0], [y.copy()]
    values = {name: [fn(y)] for name, fn in invariants.items()}
    for k in range(1, steps + 1):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            y = rk4_step(rhs, y, dt)
        if monitor is not None:
            monitor(y)
        if k % sample_every == 0 or k == steps:
            times.append(k * dt)
            states.append(y.copy())
            for name, fn in invariants.items():
                values[name].append(fn(y))
    return FlowResult(times, states, values, dt)


# --------------------------------------------------------------------------
# many-body models
# --------------------------------------------------------------------------

def _pair_diff(q):
    d = q[:, None] - q[None, :]
    np.fill_diagonal(d, 1.0)
    return d


def _rrs_dlogb(q, nu):
    """``dlb[i, j] = d log b_j / d q_i`` for the rational RS product factor."""
    n = len(q)
    d = _pair_diff(q)
    off = ~np.eye(n, dtype=bool)
    term = np.where(off, 1 / (d - nu) - 1 / d, 0)  # term[j, k]: k-th factor of b_j
    dlb = -term.T.copy()
    dlb[np.diag_indices(n)] = term.sum(axis=1)
    return dlb


def _trs_dlogb(w, t):
    """``dlb[i, j] = d log b_j / d q_i`` (``w = e^q``) for the trigonometric RS factor."""
    n = len(w)
    off = ~np.eye(n, dtype=bool)
    tw = t * w[:, None] - w[None, :]
    ww = w[:, None] - w[None, :]
    np.fill_diagonal(tw, 1.0)
    np.fill_diagonal(ww, 1.0)
    diag_part = np.where(off, t * w[:, None] / tw - w[:, None] / ww, 0).sum(axis=1)
    dlb = np.where(off, (-w[None, :] / tw + w[None, :] / ww).T, 0)
    dlb[np.diag_indices(n)] = diag_part
    return dlb


def manybody_vector_field(kind: ModelKind, nu: complex):
    """Canonical vector field ``(dq/dt, dp/dt)`` of the model's Hamiltonian in additive variables.

    CM kinds use ``H = 1/2 tr L^2``; RS kinds use ``H = tr L = sum_j e^{p_j} b_j(q)``.
    """
    nu = complex(nu)

    def rhs(y):
        n = len(y) // 2
        q, p = y[:n], y[n:]
        off = ~np.eye(n, dtype=bool)
        if kind is ModelKind.RATIONAL_CM:
            d = _pair_diff(q)
            dp = -np.where(off, 2 * nu ** 2 / d ** 3, 0).sum(axis=1)
            return np.concatenate([p, dp])
        if kind is ModelKind.TRIG_CMS:
            d = _pair_diff(q) / 2
            dp = -np.where(off, nu ** 2 * np.cosh(d) / (4 * np.sinh(d) ** 3), 0).sum(axis=1)
            return np.concatenate([p, dp])
        if kind is ModelKind.RATIONAL_RS:
            d = _pair_diff(q)
            b = np.prod(np.where(off, (d - nu) / d, 1), axis=1)
            dlb = _rrs_dlogb(q, nu)
        else:
            w, t = np.exp(q), np.exp(-nu)
            tw = t * w[:, None] - w[None, :]
            ww = w[:, None] - w[None, :]
            np.fill_diagonal(tw, 1.0)
            np.fill_diagonal(ww, 1.0)
            b = np.prod(np.where(off, tw / ww, 1), axis=1)
            dlb = _trs_dlogb(w, t)
        energy = np.exp(p) * b
        return np.concatenate([energy, -(dlb @ energy)])

    return rhs


def _lax_float(kind: ModelKind, y, nu) -> np.ndarray:
    n = len(y) // 2
    return xn.complex_array(lax(kind, PhasePoint(y[:n], y[n:], nu)))


def _power_traces(L: np.ndarray) -> np.ndarray:
    out, power = [], np.eye(len(L), dtype=complex)
    for _ in range(len(L)):
        power = power @ L
        out.append(np.trace(power))
    return np.array(out)


def evolve_manybody(kind: ModelKind, x: PhasePoint, t_end: float = 1.0, dt: float = 1e-3,
                    sample_every: int = 100) -> FlowResult:
    """RK4 trajectory; invariants ``tr L^k`` (k = 1..N) and the char-poly coefficients.

    Raises :class:`GenericityError` when two positions approach within
    ``1e-6`` (relative to the position scale).
    """
    xa = x.additive(kind)
    nu = complex(xa.nu)
    y0 = np.concatenate([xn.complex_array(xa.q), xn.complex_array(xa.p)])
    n = xa.n
    scale = max(1.0, float(np.max(np.abs(y0[:n]))))

    def monitor(y):
        q = y[:n]
        gaps = np.abs(_pair_diff(q))[~np.eye(n, dtype=bool)]
        if n > 1 and np.any(gaps < COLLISION_TOL * scale):
            raise GenericityError("particle collision along the trajectory")
        if not np.all(np.isfinite(y)):
            raise NumericError("non-finite state along the trajectory")

    invariants = {
        f"tr_L^{k + 1}": (lambda y, k=k: _power_traces(_lax_float(kind, y, nu))[k]) for k in range(n)
    }
    invariants["char_poly"] = lambda y: np.array(xn.char_poly(_lax_float(kind, y, nu)))
    return _integrate(manybody_vector_field(kind, nu), y0, t_end, dt, invariants,
                      sample_every, monitor)


def convergence_ratio(kind: ModelKind, x: PhasePoint, t_end: float = 1.0, dt: float = 0.1,
                      invariant: str = "tr_L^2") -> float:
    """Drift of ``invariant`` at step ``dt`` divided by the drift at ``dt / 2``.

    About 16 for a fourth-order method; ``dt`` must be large enough that the
    drift at ``dt / 2`` is well above rounding error.
    """
    coarse = evolve_manybody(kind, x, t_end, dt, sample_every=1)
    fine = evolve_manybody(kind, x, t_end, dt / 2, sample_every=1)
    return coarse.drift[invariant] / fine.drift[invariant]


# --------------------------------------------------------------------------
# Gaudin model
# --------------------------------------------------------------------------

def _gaudin_data(model):
    """``(twist vector, poles, residue stack)`` of a rational Gaudin model."""
    if isinstance(model, MultiPoleLax):
        form = model.to_pole_form()
    else:
        form = model
    const = form.constant
    if not xn.is_zero(const - xn.diag(np.diagonal(const))):
        raise ValueError("the Gaudin twist must be diagonal")
    return np.diagonal(const).copy(), list(form.poles), list(form.residues)


def _comm(a, b):
    return a @ b - b @ a


def gaudin_rhs(twist, poles, residues, a: int) -> list:
    """Right-hand side of the Gaudin flow ``t_a``.

    ``dS^j = -[S^a, S^j] / (z_a - z_j)`` for ``j != a`` and
    ``dS^a = sum_k [S^a, S^k] / (z_a - z_k) + [S^a, Lambda]``.
    Works for exact and float data.
    """
    Lam = xn.diag(twist)
    Sa = residues[a]
    out = []
    for j, (zj, Sj) in enumerate(zip(poles, residues)):
        if j == a:
            d = _comm(Sa, Lam)
            for k, (zk, Sk) in enumerate(zip(poles, residues)):
                if k != a:
                    d = d + _comm(Sa, Sk) / (poles[a] - zk)
        else:
            d = -_comm(Sa, Sj) / (poles[a] - zj)
        out.append(d)
    return out


def _gaudin_form(twist, poles, stack) -> PoleForm:
    return PoleForm(xn.complex_array(np.diag(twist)), xn.complex_array(poles), tuple(stack))


def evolve_gaudin(model, a: int, t_end: float = 1.0, dt: float = 1e-3,
                  sample_every: int = 100) -> FlowResult:
    """RK4 trajectory of the Gaudin flow ``t_a``; states are stacks ``(M, N, N)`` of residues.

    Tracked invariants: Casimirs ``C_c``, Hamiltonians ``H_b`` and ``H0``, the
    spectrum of each residue (char-poly coefficients) and the cleared
    spectral-polynomial coefficients.
    """
    twist, poles, residues = _gaudin_data(model)
    twist = xn.complex_array(twist)
    poles = xn.complex_array(poles)
    m = len(poles)
    y0 = np.array([xn.complex_array(r) for r in residues], dtype=complex)

    def rhs(y):
        return np.array(gaudin_rhs(twist, poles, list(y), a))

    def expansion(y):
        return expand_hamiltonians(_gaudin_form(twist, poles, list(y)), check_points=0)

    invariants = {
        "casimirs": lambda y: np.array(expansion(y).casimirs),
        "hamiltonians": lambda y: np.array(expansion(y).hamiltonians),
        "h0": lambda y: expansion(y).h0,
        "residue_spectra": lambda y: np.array([xn.char_poly(s) for s in y]),
        "spectral_poly": lambda y: spectral_poly(_gaudin_form(twist, poles, list(y))).coeffs,
    }
    if m == 0:
        invariants = {"h0": invariants["h0"]}
    return _integrate(rhs, y0, t_end, dt, invariants, sample_every)


def gaudin_flow_commutator(model, a: int, b: int, tau: float = 0.05, dt: float = 1e-3) -> float:
    """``|phi_b(phi_a(S)) - phi_a(phi_b(S))|`` for flows of duration ``tau``."""
    twist, poles, residues = _gaudin_data(model)
    twist, poles = xn.complex_array(twist), xn.complex_array(poles)

    def run(stack, first, second):
        for idx in (first, second):
            form = _gaudin_form(twist, poles, list(stack))
            stack = evolve_gaudin(form, idx, tau, dt, sample_every=10 ** 9).final_state()
        return stack

    start = np.array([xn.complex_array(r) for r in residues], dtype=complex)
    return float(np.max(np.abs(run(start, a, b) - run(start, b, a))))


def lie_poisson_flow(twist, poles, residues, a: int) -> list:
    """Flow of ``H_a`` computed from the bracket ``{S_ij, S_kl} = -S_il d_kj + S_kj d_il`` via ``f' = {H_a, f}``.

    The gradient of the quadratic ``H_a`` is taken by exact central differences
    (exact for quadratics), independently of :func:`gaudin_rhs`.
    """
    exact = all(xn.is_exact(r) for r in residues) and xn.is_exact(np.asarray(twist))
    form = lambda stack: PoleForm(xn.diag(twist), np.asarray(poles), tuple(stack))  # noqa: E731
    h_a = lambda stack: expand_hamiltonians(form(stack), check_points=0).hamiltonians[a]  # noqa: E731
    n = len(twist)
    eps = xn.to_fraction(1) if exact else 1e-3
    out = []
    for b in range(len(poles)):
        grad = xn.zeros((n, n), exact)
        for i in range(n):
            for j in range(n):
                plus = [r.copy() for r in residues]
                minus = [r.copy() for r in residues]
                plus[b][i, j] = plus[b][i, j] + eps
                minus[b][i, j] = minus[b][i, j] - eps
                grad[i, j] = (h_a(plus) - h_a(minus)) / (2 * eps)
        S = residues[b]
        d = xn.zeros((n, n), exact)
        for k in range(n):
            for l in range(n):
                acc = 0
                for i in range(n):
                    for j in range(n):
                        bracket = (-S[i, l] if k == j else 0) + (S[k, j] if i == l else 0)
                        acc = acc + grad[i, j] * bracket
                d[k, l] = acc
        out.append(d)
    return out


def bracket_consistency(model, a: int):
    """Largest difference between :func:`gaudin_rhs` and :func:`lie_poisson_flow`."""
    twist, poles, residues = _gaudin_data(model)
    lhs = gaudin_rhs(twist, poles, residues, a)
    rhs = lie_poisson_flow(twist, poles, residues, a)
    return max(xn.max_abs(u - v) for u, v in zip(lhs, rhs))


# --------------------------------------------------------------------------
# Schlesinger system
# --------------------------------------------------------------------------

def schlesinger_residual(model, a: int, z, kappa=1, perturb: tuple | None = None):
    """Norm of ``kappa dL/dz_a - kappa dM_a/dz - [L, M_a]`` at ``z``.

    ``L(z) = Lambda + sum_c S^c / (z - z_c)`` and ``M_a = -S^a / (z - z_a)``.
    The derivatives of the residues along ``z_a`` are taken from the
    Schlesinger equations; all explicit derivatives of pole terms are
    analytic, so the result is exactly zero on rational data.
    ``perturb = (j, eps)`` adds ``eps`` times the all-ones matrix to
    ``kappa dS^j/dz_a``, giving a residual proportional to ``eps``.
    """
    twist, poles, residues = _gaudin_data(model)
    if any(z == zc for zc in poles):
        raise PoleError("sample point at a pole")
    n = len(twist)
    exact = xn.is_exact(np.asarray(twist)) and all(xn.is_exact(r) for r in residues) and \
        xn.is_exact(z) and xn.is_exact(kappa)
    # kappa dS^c / dz_a from the Schlesinger equations
    flows = gaudin_rhs(twist, poles, residues, a)
    if perturb is not None:
        j, eps = perturb
        ones = xn.zeros((n, n), exact)
        ones[...] = xn.to_fraction(1) if exact else 1.0
        flows[j] = flows[j] + eps * ones
    Sa, za = residues[a], poles[a]
    # kappa d/dz_a L(z): implicit residue motion plus explicit pole motion
    lhs = kappa * Sa / (z - za) ** 2
    for c, (zc, F) in enumerate(zip(poles, flows)):
        lhs = lhs + F / (z - zc)
    # kappa d/dz M_a(z)
    lhs = lhs - kappa * Sa / (z - za) ** 2
    L = xn.diag(twist) + sum(S / (z - zc) for zc, S in zip(poles, residues))
    M = -Sa / (z - za)
    return xn.max_abs(lhs - _comm(L, M))
