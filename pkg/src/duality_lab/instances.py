"""Deterministic random instances for the verification suites."""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction

import numpy as np

from . import exactnum as xn
from .errors import DualityLabError, GenericityError
from .manybody import ModelKind, PhasePoint, check_generic
from .spectral_models import MultiPoleLax, SpectralKind

MAX_ENTRY = 97
MAX_REJECTIONS = 1000


def sub_seed(seed: int, *labels) -> int:
    """Stable 63-bit seed derived from ``seed`` and any labels."""
    blob = ":".join(str(v) for v in (seed,) + labels).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big") >> 1


def random_fraction(rng: random.Random, nonzero: bool = False) -> Fraction:
    """Fraction with numerator and denominator bounded by 97 in absolute value."""
    while True:
        f = Fraction(rng.randint(-MAX_ENTRY, MAX_ENTRY), rng.randint(1, MAX_ENTRY))
        if f != 0 or not nonzero:
            return f


def _distinct(values) -> bool:
    return len(set(values)) == len(values)


def _kind(kind):
    if isinstance(kind, (ModelKind, SpectralKind)):
        return kind
    for enum_cls in (ModelKind, SpectralKind):
        try:
            return enum_cls(kind)
        except ValueError:
            pass
    raise ValueError(f"unknown kind {kind!r}")


def random_phase_point(kind: ModelKind, n: int, seed: int, backend: str = "exact",
                       regime: str = "generic") -> PhasePoint:
    """Generic phase point; trig kinds are drawn in native variables when exact.

    ``regime="flow"`` draws real, well separated positions, small momenta and
    an imaginary coupling, for which the dynamics is repulsive.
    """
    if backend == "exact":
        rng = random.Random(seed)
        for _ in range(MAX_REJECTIONS):
            pos = [random_fraction(rng, nonzero=kind.exp_positions) for _ in range(n)]
            mom = [random_fraction(rng, nonzero=kind.exp_momenta) for _ in range(n)]
            c = random_fraction(rng, nonzero=True)
            if kind.exp_coupling and c == 1:
                continue
            if not _distinct(pos):
                continue
            x = PhasePoint(xn.exact_array(pos), xn.exact_array(mom), c,
                           multiplicative=kind.exp_positions or kind.exp_momenta)
            try:
                check_generic(kind, x)
            except GenericityError:
                continue
            return x
        raise GenericityError("no generic instance found within the rejection budget")
    if backend != "float":
        raise ValueError(f"unknown backend {backend!r}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REJECTIONS):
        if regime == "flow":
            q = np.sort(rng.uniform(-1.5, 1.5, size=n)) + 0.8 * np.arange(n)
            p = 0.3 * rng.normal(size=n)
            nu = complex(0, rng.uniform(0.2, 0.6))
        else:
            q = rng.normal(size=n) + 0.3j * rng.normal(size=n)
            p = 0.5 * rng.normal(size=n) + 0.2j * rng.normal(size=n)
            nu = complex(rng.uniform(0.2, 0.8), rng.uniform(-0.3, 0.3))
        x = PhasePoint(q.astype(complex), p.astype(complex), nu)
        try:
            check_generic(kind, x)
        except DualityLabError:
            continue
        return x
    raise GenericityError("no generic instance found within the rejection budget")


def random_multipole(kind: SpectralKind, n: int, m: int, seed: int,
                     backend: str = "exact", scale: float = 1.0) -> MultiPoleLax:
    """Rank-one multi-pole Lax matrix with distinct (nonzero where needed) twist and poles.

    On the float backend the residue factors are multiplied by ``scale``.
    """
    if backend == "exact":
        rng = random.Random(seed)
        draw = lambda nonzero=False: random_fraction(rng, nonzero)  # noqa: E731
    else:
        gen = np.random.default_rng(seed)
        draw = lambda nonzero=False: complex(gen.normal(), gen.normal())  # noqa: E731
    for _ in range(MAX_REJECTIONS):
        twist = [draw(kind is SpectralKind.XXZ_CHAIN) for _ in range(n)]
        poles = [draw(kind.weighted) for _ in range(m)]
        if not (_distinct(twist) and _distinct(poles)):
            continue
        factor = 1 if backend == "exact" else scale
        xi = [[factor * draw() for _ in range(m)] for _ in range(n)]
        eta = [[factor * draw() for _ in range(n)] for _ in range(m)]
        conv = xn.exact_array if backend == "exact" else xn.complex_array
        return MultiPoleLax(kind, conv(twist), conv(poles),
                            conv(xi).reshape(n, m), conv(eta).reshape(m, n))
    raise GenericityError("no generic instance found within the rejection budget")


def generate_instance(kind, n: int, m: int | None = None, seed: int = 0,
                      backend: str = "exact", regime: str = "generic") -> dict:
    """JSON descriptor of a random instance of ``kind``; deterministic in ``seed``."""
    kind = _kind(kind)
    if isinstance(kind, ModelKind):
        return random_phase_point(kind, n, seed, backend, regime).to_dict(kind)
    if m is None:
        raise ValueError("spectral kinds need the number of poles m")
    return random_multipole(kind, n, m, seed, backend).to_dict()


def load_instance(descriptor: dict):
    """``(kind, object)`` from a descriptor produced by :func:`generate_instance`."""
    kind = _kind(descriptor["kind"])
    if isinstance(kind, ModelKind):
        return PhasePoint.from_dict(descriptor)
    return kind, MultiPoleLax.from_dict(descriptor)
