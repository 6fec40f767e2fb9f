"""Verification suites: each one draws seeded instances and emits report rows."""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import exactnum as xn
from .cc_duality import verify_cc_identifications
from .errors import DualityLabError
from .flows import (bracket_consistency, convergence_ratio, evolve_gaudin, evolve_manybody,
                    gaudin_flow_commutator, schlesinger_residual)
from .instances import random_fraction, random_multipole, random_phase_point, sub_seed
from .manybody import ModelKind, lax, moment_residual
from .pq_duality import check_anticanonical, dualize, involution_check
from .report import DualityReport, digest
from .spectral_duality import (DUAL_TRANSFORMS, char_poly_drift_vs_lax, curve_residual,
                               pq_via_spectral, spectral_poly)
from .spectral_models import RVariant, SpectralKind, cybe_residual, gauge_matrix

SUITES = (
    "moment-maps", "pq-duality", "anticanonical", "spectral-curves", "ybe",
    "gauge-lemma", "cc-duality", "flows", "pq-via-spectral",
)

#: default (n range, m range, trials, backend) per suite
DEFAULTS = {
    "moment-maps": ((2, 6), (1, 1), 50, "exact"),
    "pq-duality": ((2, 4), (1, 1), 20, "float"),
    "anticanonical": ((2, 3), (1, 1), 20, "float"),
    "spectral-curves": ((1, 4), (1, 4), 25, "exact"),
    "ybe": ((1, 3), (1, 1), 20, "exact"),
    "gauge-lemma": ((1, 6), (1, 3), 50, "exact"),
    "cc-duality": ((2, 6), (1, 1), 20, "exact"),
    "flows": ((2, 4), (1, 3), 3, "float"),
    "pq-via-spectral": ((2, 4), (1, 1), 10, "float"),
}


@dataclass
class SuiteConfig:
    suite: str
    n: tuple | None = None
    m: tuple | None = None
    trials: int | None = None
    seed: int = 0
    backend: str | None = None
    tol: float | None = None
    out: str | None = None
    format: str = "json"

    def resolved(self, suite: str) -> "SuiteConfig":
        """Copy with suite defaults filled in for unset fields."""
        n, m, trials, backend = DEFAULTS[suite]
        return SuiteConfig(suite, tuple(self.n or n), tuple(self.m or m),
                           self.trials if self.trials is not None else trials,
                           self.seed, self.backend or backend, self.tol, self.out, self.format)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("format")
        for key in ("n", "m"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DUALITY_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _map_trials(fn, count: int) -> list:
    """``[fn(i) for i in range(count)]``, possibly concurrently; order is preserved."""
    threads = _threads()
    if threads == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _cycle(rng_range: tuple, i: int) -> int:
    lo, hi = rng_range
    return lo + i % (hi - lo + 1)


def _tol(cfg: SuiteConfig, default: float) -> float:
    """Exact checks keep tolerance 0 on the exact backend; ``--tol`` overrides the rest."""
    if default == 0 and cfg.backend == "exact":
        return 0.0
    if cfg.tol is not None:
        return cfg.tol
    return default if default else 1e-9


def _run_rows(fn, count: int) -> DualityReport:
    """Collect the reports of ``fn(i)`` over trials into one report."""
    report = DualityReport()
    for sub in _map_trials(fn, count):
        report.extend(sub)
    return report


def _failure(report: DualityReport, check_id: str, tag: str, exc: Exception) -> None:
    report.add(check_id, tag, float("inf"), 0.0, detail=f"{type(exc).__name__}: {exc}")


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------

def suite_moment_maps(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        rep = DualityReport()
        for kind in ModelKind:
            n = _cycle(cfg.n, i)
            x = random_phase_point(kind, n, sub_seed(cfg.seed, "moment", kind.value, i), cfg.backend)
            tag = digest(x.to_dict(kind))
            L = lax(kind, x)
            res = moment_residual(kind, x)
            scale = 1 if cfg.backend == "exact" else max(1.0, xn.max_abs(L))
            rep.add(f"moment_residual/{kind.value}", tag, xn.max_abs(res) / scale, _tol(cfg, 0))
        return rep
    return _run_rows(trial, cfg.trials)


def suite_pq_duality(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        rep = DualityReport()
        for kind in ModelKind:
            n = _cycle(cfg.n, i)
            x = random_phase_point(kind, n, sub_seed(cfg.seed, "pq", kind.value, i), cfg.backend)
            tag = digest(x.to_dict(kind))
            try:
                res = dualize(kind, x)
                scale = max(1.0, xn.max_abs(res.dual_matrix))
                rep.add(f"dual_lax_match/{kind.value}", tag, res.residual / scale, _tol(cfg, 1e-8))
                rep.add(f"involution/{kind.value}", tag, involution_check(kind, x), _tol(cfg, 1e-7))
                L = xn.complex_array(lax(kind, x))
                rep.add(f"dual_positions_are_eigenvalues/{kind.value}", tag,
                        xn.root_distance(xn.char_poly(L), res.dual.q), _tol(cfg, 1e-9))
                if kind is ModelKind.RATIONAL_CM:
                    Ld = xn.complex_array(lax(res.dual_kind, res.dual))
                    rep.add("dual_spectrum_is_positions/rational_cm", tag,
                            xn.root_distance(xn.char_poly(Ld), x.q), _tol(cfg, 1e-9))
            except DualityLabError as exc:
                _failure(rep, f"dual_lax_match/{kind.value}", tag, exc)
        return rep
    return _run_rows(trial, cfg.trials)


def suite_anticanonical(cfg: SuiteConfig) -> DualityReport:
    kinds = (ModelKind.RATIONAL_CM, ModelKind.TRIG_CMS, ModelKind.TRIG_RS, ModelKind.RATIONAL_RS)

    def trial(i):
        rep = DualityReport()
        for kind in kinds:
            n = _cycle(cfg.n, i)
            x = random_phase_point(kind, n, sub_seed(cfg.seed, "anticanonical", kind.value, i), "float")
            tag = digest(x.to_dict(kind))
            try:
                rep.add(f"anticanonical/{kind.value}", tag, check_anticanonical(kind, x), _tol(cfg, 1e-5))
            except DualityLabError as exc:
                _failure(rep, f"anticanonical/{kind.value}", tag, exc)
        return rep
    return _run_rows(trial, cfg.trials)


_CURVE_KINDS = {
    "gaudin": SpectralKind.RATIONAL_GAUDIN,
    "tgaudin-xxx": SpectralKind.TRIG_GAUDIN_REDUCED,
    "xxz": SpectralKind.XXZ_CHAIN,
}


def _residues_rank_one(L, exact: bool):
    tol = 0.0 if exact else 1e-9
    return all(xn.minors_vanish(r, tol) for r in L.residues())


def suite_spectral_curves(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        rep = DualityReport()
        for name, kind in _CURVE_KINDS.items():
            n, m = _cycle(cfg.n, i), _cycle(cfg.m, i // (cfg.n[1] - cfg.n[0] + 1))
            L = random_multipole(kind, n, m, sub_seed(cfg.seed, "curves", name, i), cfg.backend)
            tag = digest(L.to_dict())
            dual = DUAL_TRANSFORMS[name](L)
            r = curve_residual(L, dual)
            if not isinstance(r, Fraction):
                r = r / max(1.0, xn.max_abs(xn.complex_array(spectral_poly(L).coeffs)))
            rep.add(f"curve_coincidence/{name}", tag, r, _tol(cfg, 0))
            rep.add(f"dual_rank_one/{name}", tag, 0 if _residues_rank_one(dual, L.exact) else 1, 0.0)
        return rep
    return _run_rows(trial, cfg.trials)


def suite_ybe(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        rep = DualityReport()
        n = _cycle(cfg.n, i)
        rng = random.Random(sub_seed(cfg.seed, "ybe", i))
        while True:
            zs = [random_fraction(rng, nonzero=True) for _ in range(3)]
            if len(set(zs)) == 3:
                break
        tag = digest({"n": n, "z": [str(z) for z in zs]})
        for variant in (RVariant.XXZ_MULTIPLICATIVE, RVariant.TWISTED):
            args = zs if cfg.backend == "exact" else [complex(z) for z in zs]
            rep.add(f"cybe/{variant.value}", tag, cybe_residual(variant, *args, n), _tol(cfg, 0))
        additive = [complex(float(z), 0.1 * k) for k, z in enumerate(zs)]
        rep.add("cybe/xxz_additive", tag, cybe_residual(RVariant.XXZ_ADDITIVE, *additive, n),
                _tol(cfg, 1e-9))
        return rep
    return _run_rows(trial, cfg.trials)


def suite_gauge_lemma(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        rep = DualityReport()
        n, m = _cycle(cfg.n, i), _cycle(cfg.m, i // (cfg.n[1] - cfg.n[0] + 1))
        L = random_multipole(SpectralKind.RATIONAL_GAUDIN, n, m, sub_seed(cfg.seed, "gauge", i),
                             cfg.backend)
        tag = digest(L.to_dict())
        closed = gauge_matrix(L.twist, L.xi, L.eta, "closed")
        recursive = gauge_matrix(L.twist, L.xi, L.eta, "recursive")
        rep.add("gauge_closed_vs_recursive", tag, xn.max_abs(closed - recursive), _tol(cfg, 0))
        lam = xn.diag(L.twist)
        conj = xn.solve(closed, (lam + xn.strictly_lower(L.xi @ L.eta)) @ closed)
        rep.add("gauge_conjugation", tag, xn.max_abs(conj - lam), _tol(cfg, 0))
        return rep
    return _run_rows(trial, cfg.trials)


def suite_cc_duality(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        n = _cycle(cfg.n, i)
        x = random_phase_point(ModelKind.RATIONAL_CM, n, sub_seed(cfg.seed, "cc", i), cfg.backend)
        rep = verify_cc_identifications(x)
        if cfg.tol is not None:
            for row in rep.rows:
                if row.tolerance:
                    row.tolerance = cfg.tol
                    row.passed = row.residual <= cfg.tol
        return rep
    return _run_rows(trial, cfg.trials)


def _band_violation(ratio: float, lo: float = 8.0, hi: float = 32.0) -> float:
    if not np.isfinite(ratio):
        return float("inf")
    return max(0.0, lo - ratio, ratio - hi)


def suite_flows(cfg: SuiteConfig) -> DualityReport:
    def trial(i):
        rep = DualityReport()
        n = _cycle(cfg.n, i)
        for kind in ModelKind:
            x = random_phase_point(kind, n, sub_seed(cfg.seed, "flows", kind.value, i), "float",
                                   regime="flow")
            tag = digest(x.to_dict(kind))
            try:
                res = evolve_manybody(kind, x, 1.0, 1e-3)
                drift = max(v for k, v in res.drift.items() if k.startswith("tr_L^"))
                rep.add(f"isospectral_drift/{kind.value}", tag, drift, _tol(cfg, 1e-7))
                if i == 0:
                    ratio = convergence_ratio(kind, x, 1.0, 0.1)
                    rep.add(f"rk4_order/{kind.value}", tag, _band_violation(ratio), 0.0,
                            detail=f"ratio={ratio:.4f}")
            except DualityLabError as exc:
                _failure(rep, f"isospectral_drift/{kind.value}", tag, exc)
        m = _cycle(cfg.m, i)
        G = random_multipole(SpectralKind.RATIONAL_GAUDIN, n, m, sub_seed(cfg.seed, "gaudin", i),
                             "float", scale=0.5)
        tag = digest(G.to_dict())
        try:
            flow = evolve_gaudin(G, i % m, 1.0, 1e-3)
            for name in ("casimirs", "hamiltonians", "spectral_poly"):
                # curve coefficients are products of many entries; compare relatively
                scale = max(1.0, float(np.max(np.abs(flow.invariants[name][0]))))
                rep.add(f"gaudin_drift/{name}", tag, flow.drift[name] / scale, _tol(cfg, 1e-7))
            if m > 1:
                rep.add("gaudin_flows_commute", tag, gaudin_flow_commutator(G, 0, 1, 0.05, 1e-3),
                        _tol(cfg, 1e-6))
        except DualityLabError as exc:
            _failure(rep, "gaudin_drift", tag, exc)
        G = random_multipole(SpectralKind.RATIONAL_GAUDIN, n, m,
                             sub_seed(cfg.seed, "gaudin-exact", i), "exact")
        tag = digest(G.to_dict())
        rep.add("gaudin_bracket_consistency", tag, bracket_consistency(G, i % m), 0.0)
        z = Fraction(7, 3)
        while any(z == p for p in G.poles):
            z += 1
        rep.add("schlesinger_residual", tag,
                max(schlesinger_residual(G, a, z) for a in range(m)), 0.0)
        return rep
    return _run_rows(trial, cfg.trials)


def suite_pq_via_spectral(cfg: SuiteConfig) -> DualityReport:
    kinds = (ModelKind.RATIONAL_CM, ModelKind.TRIG_CMS, ModelKind.TRIG_RS)

    def trial(i):
        rep = DualityReport()
        n = _cycle(cfg.n, i)
        for kind in kinds:
            x = random_phase_point(kind, n, sub_seed(cfg.seed, "via", kind.value, i), "float")
            sub = pq_via_spectral(kind, x, _tol(cfg, 1e-8))
            for row in sub.rows:
                row.check_id = f"{row.check_id}/{kind.value}"
            rep.extend(sub)
            xe = random_phase_point(kind, n, sub_seed(cfg.seed, "via-exact", kind.value, i), "exact")
            samples = [Fraction(k, 1) + Fraction(1, 7) for k in range(n + 2)]
            rep.add(f"fictitious_char_poly_constant/{kind.value}", digest(xe.to_dict(kind)),
                    char_poly_drift_vs_lax(kind, xe, samples), 0.0)
        return rep
    return _run_rows(trial, cfg.trials)


RUNNERS = {
    "moment-maps": suite_moment_maps,
    "pq-duality": suite_pq_duality,
    "anticanonical": suite_anticanonical,
    "spectral-curves": suite_spectral_curves,
    "ybe": suite_ybe,
    "gauge-lemma": suite_gauge_lemma,
    "cc-duality": suite_cc_duality,
    "flows": suite_flows,
    "pq-via-spectral": suite_pq_via_spectral,
}


def run_suite(config: SuiteConfig) -> DualityReport:
    """Run one suite (or ``"all"``) and return the sorted report.

    Rows are ordered by check id, then by instance index, independently of
    the number of worker threads.
    """
    names = SUITES if config.suite == "all" else (config.suite,)
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
    report = DualityReport(config=config.echo())
    for name in names:
        sub = RUNNERS[name](config.resolved(name))
        sub.sort()
        report.extend(sub)
    return report
