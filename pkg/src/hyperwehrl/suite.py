"""Verification checks run by ``hyperwehrl suite``.

Each check returns a :class:`CheckResult`. Counts depend on the level:
``smoke`` is a seconds-long sanity pass, ``desk`` is the full acceptance
scale, ``deep`` doubles the corpora.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import functionals as F
from . import inequalities as I
from . import ode_lab as O
from .su11_states import basis_state, coherent_coeffs, random_state

RANDOM_M = 8

LEVELS = {
    "smoke": dict(n_entropy=12, n_fisher=3, n_norm=6, isometry_m=4, isometry_ks=(1.0, 2.0),
                  fd_points=20, n_alpha=3, n_beta=5, grid_size=1000, ode_kqs=(3.0,)),
    "desk": dict(n_entropy=201, n_fisher=50, n_norm=50, isometry_m=20,
                 isometry_ks=(1.0, 1.5, 2.0, 5.0), fd_points=100, n_alpha=10, n_beta=20,
                 grid_size=2000, ode_kqs=(3.0, 4.0)),
    "deep": dict(n_entropy=402, n_fisher=100, n_norm=100, isometry_m=40,
                 isometry_ks=(1.0, 1.5, 2.0, 5.0), fd_points=400, n_alpha=20, n_beta=40,
                 grid_size=4000, ode_kqs=(3.0, 4.0, 5.0)),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        d = {"name": self.name, "passed": self.passed, "details": self.details}
        if timing:
            d["seconds"] = self.seconds
        return d


def coherent_wehrl(level: str) -> CheckResult:
    """Coherent-state entropy equals ``2k/(2k-1)``."""
    rows, ok = [], True
    for k in (1.0, 1.5, 2.0, 5.0):
        s = F.wehrl_entropy(coherent_coeffs(0.0, k))
        target = 2 * k / (2 * k - 1)
        rows.append({"k": k, "wehrl": s, "target": target, "error": abs(s - target)})
        ok &= abs(s - target) < 1e-8
    return CheckResult("coherent_wehrl", ok, {"rows": rows, "tol": 1e-8})


def wehrl_lower_bound(level: str) -> CheckResult:
    """Random-state entropies against the proven bound and the conjectured value."""
    n = LEVELS[level]["n_entropy"]
    ks = (1.0, 1.5, 2.0)
    worst_bound = worst_conj = math.inf
    violations, conj_misses = [], []
    for seed in range(n):
        k = ks[seed % 3]
        s = F.wehrl_entropy(random_state(RANDOM_M, k, seed))
        bound, conj = I.wehrl_bound(k)
        worst_bound = min(worst_bound, s - bound)
        worst_conj = min(worst_conj, s - conj)
        if s < bound - 1e-8:
            violations.append({"seed": seed, "k": k, "wehrl": s, "bound": bound})
        if s < conj - 1e-8:
            conj_misses.append({"seed": seed, "k": k, "wehrl": s, "conjecture": conj})
    return CheckResult("wehrl_lower_bound", not violations,
                       {"states": n, "min_margin_bound": worst_bound,
                        "min_margin_conjecture": worst_conj, "violations": violations,
                        "conjecture_consistent": not conj_misses,
                        "conjecture_misses": conj_misses})


def fisher_identity(level: str) -> CheckResult:
    n = LEVELS[level]["n_fisher"]
    worst, bad = 0.0, []
    for seed in range(n):
        for k in (1.5, 2.0):
            psi = random_state(RANDOM_M, k, seed)
            for q in (2.0, 2.5, 3.0):
                r = F.fisher_integral(psi, q)
                worst = max(worst, r.rel_residual)
                if r.rel_residual >= 1e-7:
                    bad.append({"seed": seed, "k": k, "q": q, "rel_residual": r.rel_residual})
    return CheckResult("fisher_identity", not bad,
                       {"evaluations": 6 * n, "max_rel_residual": worst, "failures": bad,
                        "tol": 1e-7})


def norm_estimate(level: str) -> CheckResult:
    n = LEVELS[level]["n_norm"]
    ks = (1.0, 1.5, 2.0)
    worst, bad = math.inf, []
    for seed in range(n):
        k = ks[seed % 3]
        psi = random_state(RANDOM_M, k, seed)
        for q in (2.0, 3.0):
            r = I.norm_estimate_check(psi, k, q)
            worst = min(worst, r.deficit)
            if r.deficit < -1e-9:
                bad.append({"seed": seed, "k": k, "q": q, "deficit": r.deficit})
    eq = []
    eq_ok = True
    for c in (0.0, 0.5, 0.3 + 0.4j):
        r = I.norm_estimate_check(coherent_coeffs(c, 2.0), 2.0, 3.0)
        eq.append({"center": [c.real, c.imag] if isinstance(c, complex) else [c, 0.0],
                   "relative_deficit": r.relative_deficit})
        eq_ok &= abs(r.relative_deficit) < 1e-7
    l3 = F.lp_norm_q(coherent_coeffs(0.5, 1.0), 3.0)
    l3_ok = abs(l3 - 0.5) < 1e-8
    return CheckResult("norm_estimate", not bad and eq_ok and l3_ok,
                       {"min_deficit": worst, "violations": bad, "coherent_equality": eq,
                        "coherent_l3_k1": l3})


def sobolev_minimizer(level: str) -> CheckResult:
    grid = LEVELS[level]["grid_size"]
    prof, val = I.minimize_sobolev_functional(1.0, 3.0, grid_size=grid)
    target = I.norm_constant(1.0, 3.0)
    rel = abs(val - target) / target
    shape = I.profile_shape_error(prof)
    tol_v = 1e-4 if grid >= 2000 else 1e-3
    return CheckResult("sobolev_minimizer", rel < tol_v and shape < 1e-3,
                       {"value": val, "target": target, "rel_error": rel,
                        "shape_error": shape, "iterations": prof.meta["iterations"]})


def entropy_energy(level: str) -> CheckResult:
    pts = [I.phi_star(t) for t in (1.0, 5.0, 25.0, 100.0)]
    strict = all(p.strict for p in pts)
    gap = I.beckner_tangent_gap(100.0)
    series = 1 / 200 + 13 / (24 * 100 ** 2)
    gap_ok = abs(gap - series) < 5e-6
    return CheckResult("entropy_energy", strict and gap_ok,
                       {"points": [p.to_dict() for p in pts], "strict": strict,
                        "gap_k100": gap, "two_term_series": series,
                        "gap_minus_series": gap - series, "gap_matches": gap_ok,
                        "series_exact_second_order": I.tangent_gap_series(100.0, 2)})


def halfplane_family(level: str) -> CheckResult:
    rows, ok = [], True
    for kt in (2.0, 3.0):
        r = I.sobolev_family_check(kt)
        rows.append(r.to_dict())
        ok &= abs(r.relative_deficit) < 1e-6
    return CheckResult("halfplane_family", ok, {"rows": rows, "tol": 1e-6})


def ode_ground_state(level: str) -> CheckResult:
    P = O.OdeParams.extremizer_consistent(3.0, gamma=3.0)
    gs = O.bisect_ground_state(P, tol_alpha=1e-10)
    tr = O.shoot_near_ground(gs.alpha, P)
    tt = np.linspace(0.0, 10.0, 2001)
    sup = float(np.max(np.abs(tr.sample(tt)[:, 0] - O.exact_profile(P, 1.0, tt)[0])))
    res = O.exact_solution_residual(P, 1.0, np.linspace(0.01, 20.0, 4001))
    ok = abs(gs.alpha - 1.0) < 1e-4 and sup < 1e-5 and res < 1e-9
    return CheckResult("ode_ground_state", ok,
                       {"alpha_star": gs.alpha, "bracket": [gs.lo, gs.hi],
                        "sup_error": sup, "residual": res,
                        "classification": tr.classification})


def ode_structure(level: str) -> CheckResult:
    lv = LEVELS[level]
    runs, ok = [], True
    for preset in ("extremizer_consistent", "paper_literal"):
        for kq in lv["ode_kqs"]:
            gamma = kq / (kq - 2) if preset == "extremizer_consistent" else 1.0
            P = O.OdeParams.from_preset(preset, kq, gamma)
            rep = O.structure_suite(P, n_alpha=lv["n_alpha"], n_beta=lv["n_beta"])
            failed = [k for k, v in rep["checks"].items() if not v]
            runs.append({"preset": preset, "kq": kq, "gamma": gamma,
                         "alpha_star": rep["data"]["alpha_star"], "checks": rep["checks"],
                         "failed": failed})
            ok &= rep["ok"]
    return CheckResult("ode_structure", ok, {"runs": runs})


def infrastructure(level: str) -> CheckResult:
    lv = LEVELS[level]
    worst_iso = 0.0
    for k in lv["isometry_ks"]:
        for m in range(lv["isometry_m"] + 1):
            worst_iso = max(worst_iso, abs(F.lp_norm_q(basis_state(m, k), 2.0) - 1.0))
    rng = np.random.default_rng(12345)
    psi = random_state(RANDOM_M, 2.0, 7)
    worst_fd, skipped = 0.0, 0
    for _ in range(lv["fd_points"]):
        r = 0.9 * math.sqrt(rng.uniform())
        z = r * np.exp(2j * np.pi * rng.uniform())
        e = F.gradient_fd_check(psi, 3.0, z)
        if e is None:
            skipped += 1
            continue
        worst_fd = max(worst_fd, e)
    ok = worst_iso < 1e-10 and worst_fd < 1e-6
    return CheckResult("infrastructure", ok,
                       {"isometry_max_error": worst_iso, "fd_max_rel_error": worst_fd,
                        "fd_skipped": skipped})


CHECKS = {
    "coherent_wehrl": coherent_wehrl,
    "wehrl_lower_bound": wehrl_lower_bound,
    "fisher_identity": fisher_identity,
    "norm_estimate": norm_estimate,
    "sobolev_minimizer": sobolev_minimizer,
    "entropy_energy": entropy_energy,
    "halfplane_family": halfplane_family,
    "ode_ground_state": ode_ground_state,
    "ode_structure": ode_structure,
    "infrastructure": infrastructure,
}


def _run_one(args) -> CheckResult:
    name, level = args
    t0 = time.perf_counter()
    res = CHECKS[name](level)
    res.seconds = time.perf_counter() - t0
    return res


def worker_count() -> int:
    """Pool size from ``HYPERWEHRL_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("HYPERWEHRL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def run_checks(level: str = "desk", names=None, workers: int | None = None) -> list[CheckResult]:
    """Run checks (optionally in a process pool); results keep the input order."""
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    names = list(CHECKS) if names is None else list(names)
    workers = worker_count() if workers is None else workers
    jobs = [(n, level) for n in names]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_one, jobs))
