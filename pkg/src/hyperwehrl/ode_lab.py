"""Shooting study of the radial equation u'' + coth(tau) u' + f(u) = 0.

``f(u) = a |u|^(2/n) u - b u`` with ``n = kq > 2`` (odd extension for
``u < 0``). Trajectories start at ``u(0) = alpha``, ``u'(0) = 0`` and carry
the variation ``w = du/dalpha``, which solves
``w'' + coth(tau) w' + f'(u) w = 0`` with ``w(0) = 1``, ``w'(0) = 0``.

Classification of a trajectory:

* ``N``: ``u`` reaches 0 at ``b(alpha)`` (located by bisection on the dense
  output);
* ``P``: ``u`` stays positive and cannot reach 0 any more, detected by
  ``E < 0`` or ``u' >= 0`` with ``0 < u < xi0``, where
  ``E = u'^2/2 + F(u)`` is non-increasing;
* ``U`` (undetermined): neither happened by ``tau_max``. When ``u`` decays
  below ``floor * alpha`` at a rate no faster than the linear decay rate
  the trajectory is treated as near-ground-state: ``u`` is continued by
  its linearized tail ``u ~ exp(-lam tau)``,
  ``lam = (1 + sqrt(1 + 4b))/2``, and ``w`` is still integrated.

Two presets for ``(a, b)``:

* ``paper_literal``: ``b = n(n-2)``, ``a = gamma b``;
* ``extremizer_consistent``: ``b = n(n-2)/4``, ``a = gamma b``, for which
  ``alpha sech^n(tau/2)`` is an exact solution when
  ``gamma = (n/(n-2)) alpha^(-2/n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, IntegrationError, ParameterError, PropertyViolation, SearchError

TAU0 = 1e-4
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class OdeParams:
    """Nonlinearity ``f(u) = a_tilde u^(1+2/kq) - b_tilde u``."""

    a_tilde: float
    b_tilde: float
    kq: float
    preset: str = "custom"
    gamma: float | None = None

    def __post_init__(self):
        if not self.kq > 2:
            raise ParameterError(f"need kq > 2, got {self.kq}")
        if not (self.a_tilde > 0 and self.b_tilde > 0):
            raise ParameterError("a_tilde and b_tilde must be positive")
        if self.preset not in ("paper_literal", "extremizer_consistent", "custom"):
            raise ParameterError(f"unknown preset {self.preset!r}")

    @property
    def exponent(self) -> float:
        return 1.0 + 2.0 / self.kq

    @property
    def e(self) -> float:
        return 2.0 / self.kq

    @classmethod
    def paper_literal(cls, kq: float, gamma: float) -> "OdeParams":
        b = kq * (kq - 2)
        return cls(gamma * b, b, kq, "paper_literal", gamma)

    @classmethod
    def extremizer_consistent(cls, kq: float, gamma: float | None = None,
                              alpha_star: float | None = None) -> "OdeParams":
        """Quarter-constant preset; give ``gamma`` or the target ``alpha_star``."""
        if (gamma is None) == (alpha_star is None):
            raise ParameterError("give exactly one of gamma, alpha_star")
        if gamma is None:
            gamma = extremizer_gamma(kq, alpha_star)
        b = 0.25 * kq * (kq - 2)
        return cls(gamma * b, b, kq, "extremizer_consistent", gamma)

    @classmethod
    def from_preset(cls, preset: str, kq: float, gamma: float) -> "OdeParams":
        name = preset.replace("-", "_")
        if name == "paper_literal":
            return cls.paper_literal(kq, gamma)
        if name == "extremizer_consistent":
            return cls.extremizer_consistent(kq, gamma=gamma)
        raise ParameterError(f"unknown preset {preset!r}")

    def f(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.a_tilde * np.abs(u) ** self.e * u - self.b_tilde * u

    def fprime(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.a_tilde * self.exponent * np.abs(u) ** self.e - self.b_tilde

    def F(self, u):
        """Primitive of ``f`` vanishing at 0."""
        u = np.abs(np.asarray(u, dtype=np.float64))
        return self.a_tilde * u ** (2 + self.e) / (2 + self.e) - 0.5 * self.b_tilde * u * u

    def decay_rate(self) -> float:
        """Decay exponent of the linearized tail ``u'' + u' - b u = 0``."""
        return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * self.b_tilde))

    def growth_rate(self) -> float:
        """Growth exponent of ``w`` on the linearized tail."""
        return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * self.b_tilde))

    def as_dict(self) -> dict:
        return {"a_tilde": self.a_tilde, "b_tilde": self.b_tilde, "kq": self.kq,
                "exponent": self.exponent, "preset": self.preset, "gamma": self.gamma}


def extremizer_gamma(kq: float, alpha_star: float) -> float:
    """``gamma = (kq/(kq-2)) alpha*^(-2/kq)``."""
    return kq / (kq - 2) * alpha_star ** (-2.0 / kq)


@dataclass(frozen=True)
class CriticalPoints:
    """``xi2 < xi1 < xi0``: ``f'(xi2) = 0``, ``f(xi1) = 0``, ``F(xi0) = 0``."""

    xi0: float
    xi1: float
    xi2: float
    residuals: dict


def critical_points(params: OdeParams) -> CriticalPoints:
    n, a, b = params.kq, params.a_tilde, params.b_tilde
    xi1 = (b / a) ** (n / 2)
    xi2 = (b / (a * (1 + 2 / n))) ** (n / 2)
    xi0 = (b * (n + 1) / (a * n)) ** (n / 2)
    res = {"f(xi1)": float(params.f(xi1)) / (b * xi1),
           "f'(xi2)": float(params.fprime(xi2)) / b,
           "F(xi0)": float(params.F(xi0)) / (b * xi0 * xi0)}
    return CriticalPoints(xi0, xi1, xi2, res)


def exact_profile(params: OdeParams, alpha: float, tau):
    """``(u, u', u'')`` of ``alpha sech^n(tau/2)``."""
    n = params.kq
    tau = np.asarray(tau, dtype=np.float64)
    s = 1.0 / np.cosh(0.5 * tau)
    T = np.tanh(0.5 * tau)
    u = alpha * s ** n
    up = -0.5 * n * u * T
    upp = u * (0.25 * n * n * T * T - 0.25 * n * s * s)
    return u, up, upp


def exact_solution_residual(params: OdeParams, alpha: float, tau=None) -> float:
    """Max residual of ``alpha sech^n(tau/2)`` in the ODE on ``tau``."""
    if tau is None:
        tau = np.linspace(0.01, 20.0, 4001)
    tau = np.asarray(tau, dtype=np.float64)
    u, up, upp = exact_profile(params, alpha, tau)
    res = upp + up / np.tanh(tau) + params.f(u)
    return float(np.max(np.abs(res)))


@dataclass
class Trajectory:
    """Dense solution of the augmented system with its classification."""

    alpha: float
    params: OdeParams
    taus: np.ndarray
    states: np.ndarray
    stages: np.ndarray
    classification: str
    event_tau: float
    tau_max: float
    tail_tau: float | None = None
    first_positive_tau: float | None = None
    tolerances: dict = field(default_factory=dict)

    @property
    def u(self):
        return self.states[:, 0]

    @property
    def u_prime(self):
        return self.states[:, 1]

    @property
    def w(self):
        return self.states[:, 2]

    @property
    def w_prime(self):
        return self.states[:, 3]

    @property
    def energy(self):
        return 0.5 * self.u_prime ** 2 + self.params.F(self.u)

    @property
    def b_alpha(self) -> float | None:
        return self.event_tau if self.classification == "N" else None

    def end_tau(self) -> float:
        """Right end of the range where ``u > 0`` is known."""
        return self.event_tau if self.classification == "N" else float(self.taus[-1])

    def interior(self) -> np.ndarray:
        """Mask of grid points strictly inside ``(0, end_tau)``."""
        return self.taus < self.end_tau()

    def sample(self, tau) -> np.ndarray:
        """Dense-output state(s) at ``tau`` (scalar or array)."""
        tau_arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        idx = np.clip(np.searchsorted(self.taus, tau_arr, side="right") - 1,
                      0, len(self.taus) - 2)
        out = np.empty((tau_arr.size, 4))
        for j, (i, t) in enumerate(zip(idx, tau_arr)):
            h = self.taus[i + 1] - self.taus[i]
            out[j] = kernels.dense_eval(self.taus[i], h, self.states[i], self.stages[i],
                                        (t - self.taus[i]) / h)
        return out[0] if np.ndim(tau) == 0 else out

    def theta(self) -> np.ndarray:
        return theta_profile(self)

    def to_csv(self, path) -> None:
        th = self.theta()
        with open(path, "w") as fh:
            fh.write("tau,u,u_prime,w,w_prime,E,theta\n")
            E = self.energy
            for i, t in enumerate(self.taus):
                row = (t, *self.states[i], E[i], th[i])
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")

    def summary(self) -> dict:
        return {"alpha": self.alpha, "classification": self.classification,
                "event_tau": self.event_tau, "tau_max": self.tau_max,
                "tail_tau": self.tail_tau, "steps": int(len(self.taus) - 1),
                "params": self.params.as_dict(), "tolerances": dict(self.tolerances)}


def _bisect(fn, lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    """Bisection for a sign change of ``fn`` on ``[lo, hi]``."""
    flo = fn(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def series_start(alpha: float, params: OdeParams, tau0: float = TAU0) -> np.ndarray:
    fa = float(params.f(alpha))
    fpa = float(params.fprime(alpha))
    return np.array([alpha - 0.25 * fa * tau0 ** 2, -0.5 * fa * tau0,
                     1.0 - 0.25 * fpa * tau0 ** 2, -0.5 * fpa * tau0])


def shoot(alpha: float, params: OdeParams, tau_max: float = 40.0, tol: float = 1e-10,
          atol: float = 1e-12, max_step: float = 0.05, stop_on_positive: bool = True,
          floor: float = 1e-9) -> Trajectory:
    """Integrate from ``u(0) = alpha`` and classify (see module notes).

    Raises
    ------
    DomainError
        If ``alpha <= 0``.
    IntegrationError
        On step-size underflow or step-count exhaustion.
    """
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    cp = critical_points(params)
    lam = params.decay_rate()
    y0 = series_start(alpha, params)
    taus, ys, ks, status, first_pos, tail_idx = kernels.shoot_kernel(
        alpha, params.a_tilde, params.b_tilde, params.e, TAU0, y0, tau_max, tol, atol,
        max_step, floor * alpha, 2.0 * lam, cp.xi0, lam, stop_on_positive)
    diag = {"alpha": alpha, "tau": float(taus[-1]), "steps": int(len(taus) - 1)}
    if status == kernels.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow", diag)
    if status == kernels.STATUS_MAX_STEPS:
        raise IntegrationError("step budget exhausted", diag)
    tolerances = {"rtol": tol, "atol": atol, "max_step": max_step, "floor": floor,
                  "tau0": TAU0}
    traj = Trajectory(alpha, params, taus, ys, ks, "U", float(tau_max), float(tau_max),
                      tolerances=tolerances)
    if tail_idx >= 0:
        traj.tail_tau = float(taus[tail_idx])
    if first_pos >= 0:
        traj.first_positive_tau = float(taus[first_pos])
    if status == kernels.STATUS_CROSSED:
        i = len(taus) - 2
        t0, h = taus[i], taus[i + 1] - taus[i]

        def u_at(s):
            return kernels.dense_eval(t0, h, ys[i], ks[i], s)[0]

        s = _bisect(u_at, 0.0, 1.0, ROOT_TOL / h)
        traj.classification = "N"
        traj.event_tau = float(t0 + s * h)
    elif first_pos >= 0:
        traj.classification = "P"
        traj.event_tau = float(taus[first_pos])
    return traj


def classify(alpha: float, params: OdeParams, tau_max: float = 40.0, **kw) -> str:
    return shoot(alpha, params, tau_max, **kw).classification


@dataclass
class GroundStateResult:
    alpha: float
    lo: float
    hi: float
    iterations: int
    stopped_on: str
    witnesses: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def bisect_ground_state(params: OdeParams, tol_alpha: float = 1e-10,
                        tau_max: float = 40.0, max_doublings: int = 60,
                        **shoot_kw) -> GroundStateResult:
    """Bisection between ``P`` and ``N`` witnesses for the ground-state amplitude.

    Witnesses come from scanning ``alpha = xi0 * 2^j``. A midpoint
    classified ``U`` is returned directly as the estimate.

    Raises
    ------
    SearchError
        If no ``N`` witness appears below ``xi0 * 2^max_doublings`` or the
        starting point is not ``P``.
    """
    xi0 = critical_points(params).xi0
    lo = hi = None
    for j in range(max_doublings + 1):
        a = xi0 * 2.0 ** j
        c = classify(a, params, tau_max, **shoot_kw)
        if c == "N":
            hi = a
            break
        if c == "P":
            lo = a
    if hi is None:
        raise SearchError("no N witness below the overflow cap")
    if lo is None:
        raise SearchError("no P witness below the first N witness")
    witnesses = {"P": lo, "N": hi}
    it = 0
    stopped = "width"
    while hi - lo >= tol_alpha:
        it += 1
        mid = 0.5 * (lo + hi)
        c = classify(mid, params, tau_max, **shoot_kw)
        if c == "U":
            lo = hi = mid
            stopped = "undetermined"
            break
        if c == "N":
            hi = mid
        else:
            lo = mid
    return GroundStateResult(0.5 * (lo + hi), lo, hi, it, stopped, witnesses)


NEAR_GROUND_FLOORS = (1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3)


def shoot_near_ground(alpha: float, params: OdeParams, tau_max: float = 40.0,
                      floors=NEAR_GROUND_FLOORS, **shoot_kw) -> Trajectory:
    """Shoot an amplitude within bisection width of the ground state.

    The unstable direction amplifies the residual ``alpha - alpha*`` like
    ``exp(growth_rate * tau)``, so the linear tail must take over before
    that error is visible. The floor is raised until the trajectory is no
    longer classified ``P``; the floor used is kept in ``tolerances``.

    Raises
    ------
    DomainError
        If the trajectory is ``P`` for every floor (``alpha`` is not near
        the ground state).
    """
    traj = None
    for fl in floors:
        traj = shoot(alpha, params, tau_max, floor=fl, **shoot_kw)
        if traj.classification != "P":
            return traj
    raise DomainError("alpha is in P, not near the ground state")


# ---------------------------------------------------------------------------
# diagnostics along a trajectory
# ---------------------------------------------------------------------------


def theta_profile(traj: Trajectory) -> np.ndarray:
    """``theta = -sinh(tau) u'/u`` on the grid (NaN where ``u <= 0``)."""
    u = traj.u
    ok = (u > 0) & traj.interior()
    out = np.full(u.shape, np.nan)
    out[ok] = -np.sinh(traj.taus[ok]) * traj.u_prime[ok] / u[ok]
    return out


def beta_bar(traj: Trajectory) -> float:
    """``n (1 - b/(a alpha^(2/n)))``: largest ``beta`` with ``Phi(0) < 0``."""
    p = traj.params
    return p.kq * (1.0 - p.b_tilde / (p.a_tilde * traj.alpha ** p.e))


def _capital_phi_values(params: OdeParams, tau, u, beta):
    return (beta * params.e * params.a_tilde * np.abs(u) ** params.exponent
            - 2.0 * np.cosh(tau) * params.f(u))


def capital_phi(traj: Trajectory, beta: float) -> np.ndarray:
    """``Phi(tau; beta) = beta (2/n) a u^(1+2/n) - 2 cosh(tau) f(u)`` on the grid."""
    return _capital_phi_values(traj.params, traj.taus, traj.u, beta)


def _sign_changes(v: np.ndarray) -> np.ndarray:
    """Indices ``i`` with a sign change between ``v[i]`` and ``v[i+1]``."""
    s = np.sign(v)
    nz = np.nonzero(s)[0]
    if nz.size < 2:
        return np.zeros(0, dtype=int)
    flips = np.nonzero(s[nz[1:]] != s[nz[:-1]])[0]
    return nz[flips]


def _refine_on_grid(traj: Trajectory, fn_state, i: int) -> float:
    """Root of ``fn_state(tau, state)`` between grid points ``i`` and the next."""
    def g(t):
        return fn_state(t, traj.sample(t))
    lo, hi = float(traj.taus[i]), float(traj.taus[i + 1])
    hi = min(hi, traj.end_tau())
    return _bisect(g, lo, hi)


def count_sign_changes(traj: Trajectory, values: np.ndarray) -> np.ndarray:
    mask = traj.interior()
    return _sign_changes(values[mask])


def xi_crossing(traj: Trajectory, level: float) -> float | None:
    """First ``tau`` with ``u(tau) = level`` (``u`` decreasing through it)."""
    mask = traj.interior()
    idx = np.nonzero((traj.u[mask][:-1] > level) & (traj.u[mask][1:] <= level))[0]
    if idx.size == 0:
        return None
    return _refine_on_grid(traj, lambda t, y: y[0] - level, int(idx[0]))


def sigma_of_beta(traj: Trajectory, beta: float) -> float:
    """The unique sign change of ``Phi(.; beta)`` on ``(0, end)``.

    Raises
    ------
    DomainError
        Unless ``0 < beta < beta_bar``.
    PropertyViolation
        If the grid shows a number of sign changes other than one.
    """
    bb = beta_bar(traj)
    if not (0.0 < beta < bb):
        raise DomainError(f"need 0 < beta < {bb}, got {beta}")
    vals = capital_phi(traj, beta)
    ch = count_sign_changes(traj, vals)
    if ch.size != 1:
        raise PropertyViolation("Phi(.; beta) does not change sign exactly once",
                                {"beta": beta, "sign_changes": int(ch.size),
                                 "taus": traj.taus[ch].tolist(), "alpha": traj.alpha})
    p = traj.params
    return _refine_on_grid(
        traj, lambda t, y: float(_capital_phi_values(p, t, y[0], beta)), int(ch[0]))


def v_beta_and_rho(traj: Trajectory, beta: float):
    """``v = sinh(tau) u' + beta u`` on the grid and its first zero ``rho``.

    ``beta = 0`` gives ``rho = 0``.

    Raises
    ------
    PropertyViolation
        If ``v`` has more than one zero on ``(0, end)`` (or none for ``beta > 0``).
    """
    if beta < 0:
        raise DomainError("need beta >= 0")
    v = np.sinh(traj.taus) * traj.u_prime + beta * traj.u
    if beta == 0.0:
        return v, 0.0
    ch = count_sign_changes(traj, v)
    if ch.size != 1:
        raise PropertyViolation("v_beta does not have exactly one zero",
                                {"beta": beta, "sign_changes": int(ch.size),
                                 "alpha": traj.alpha})
    rho = _refine_on_grid(traj, lambda t, y: math.sinh(t) * y[1] + beta * y[0], int(ch[0]))
    return v, rho


@dataclass
class Beta0Result:
    beta0: float
    rho: float
    sigma: float
    gap: float
    beta_bar: float
    endpoint_gaps: tuple
    iterations: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def find_beta0(traj: Trajectory, tol: float = 1e-10, edge: float = 1e-3) -> Beta0Result:
    """Bisection on ``beta`` for ``rho(beta) = sigma(beta)`` inside ``(0, beta_bar)``.

    Raises
    ------
    PropertyViolation
        If ``rho - sigma`` does not change sign between the two ends.
    """
    bb = beta_bar(traj)
    if not bb > 0:
        raise PropertyViolation("beta_bar <= 0", {"beta_bar": bb, "alpha": traj.alpha})

    def gap(beta):
        return v_beta_and_rho(traj, beta)[1] - sigma_of_beta(traj, beta)

    lo, hi = edge * bb, (1.0 - edge) * bb
    glo, ghi = gap(lo), gap(hi)
    if not (glo < 0 < ghi):
        raise PropertyViolation("rho - sigma has no sign change on (0, beta_bar)",
                                {"gap_lo": glo, "gap_hi": ghi, "beta_bar": bb})
    it = 0
    mid, gm = lo, glo
    while it < 200:
        it += 1
        mid = 0.5 * (lo + hi)
        gm = gap(mid)
        if abs(gm) < tol or hi - lo < 1e-15 * bb:
            break
        if gm < 0:
            lo = mid
        else:
            hi = mid
    rho = v_beta_and_rho(traj, mid)[1]
    sig = sigma_of_beta(traj, mid)
    return Beta0Result(mid, rho, sig, abs(rho - sig), bb, (glo, ghi), it)


def admissibility_report(alpha: float, params: OdeParams, tau_max: float = 40.0,
                         raise_on_failure: bool = False, **shoot_kw) -> dict:
    """Sign structure of the variation ``w`` along one trajectory.

    For ``N``: exactly one sign change of ``w`` on ``(0, b)`` and
    ``w(b) < 0``. For ``U`` (near ground state): one sign change and
    ``|w(tau_max)| > 10^3 |w(0)|``. In both cases the first zero of ``w``
    must precede ``tau_1`` where ``u(tau_1) = xi1``.

    Raises
    ------
    DomainError
        If the trajectory is classified ``P``.
    PropertyViolation
        When ``raise_on_failure`` and a check fails.
    """
    traj = shoot(alpha, params, tau_max, **shoot_kw)
    if traj.classification == "P":
        kw = {k: v for k, v in shoot_kw.items() if k != "floor"}
        traj = shoot_near_ground(alpha, params, tau_max, **kw)
    cp = critical_points(params)
    mask = traj.interior()
    ch = _sign_changes(traj.w[mask])
    tau1 = xi_crossing(traj, cp.xi1)
    first_zero = None
    if ch.size:
        first_zero = _refine_on_grid(traj, lambda t, y: y[2], int(ch[0]))
    checks = {"one_sign_change": bool(ch.size == 1),
              "zero_before_tau1": bool(first_zero is not None and tau1 is not None
                                       and first_zero < tau1)}
    rep = {"alpha": alpha, "classification": traj.classification,
           "floor": traj.tolerances["floor"],
           "sign_changes": int(ch.size), "first_zero": first_zero, "tau1": tau1}
    if traj.classification == "N":
        wb = float(traj.sample(traj.event_tau)[2])
        rep["b_alpha"] = traj.event_tau
        rep["w_at_b"] = wb
        checks["w_at_b_negative"] = wb < 0
    else:
        w_end = float(traj.w[-1])
        rep["w_end"] = w_end
        rep["tail_tau"] = traj.tail_tau
        checks["unbounded_growth"] = bool(w_end < 0 and abs(w_end) > 1e3 * abs(traj.w[0]))
    rep["checks"] = checks
    rep["ok"] = all(checks.values())
    if raise_on_failure and not rep["ok"]:
        raise PropertyViolation("admissibility check failed",
                                {**rep, "trajectory": _dump(traj)})
    return rep


def _dump(traj: Trajectory, every: int = 10) -> dict:
    sl = slice(None, None, every)
    return {"tau": traj.taus[sl].tolist(), "u": traj.u[sl].tolist(), "w": traj.w[sl].tolist()}


# ---------------------------------------------------------------------------
# composite structure checks
# ---------------------------------------------------------------------------


def energy_monotone(traj: Trajectory) -> tuple[bool, float]:
    """Largest energy increase relative to ``|E(0)|``."""
    E = traj.energy[traj.interior() | (traj.taus <= traj.end_tau())]
    inc = float(np.max(np.diff(E), initial=0.0))
    scale = abs(float(E[0])) or 1.0
    return inc <= 1e-10 * scale, inc / scale


def beta_structure(traj: Trajectory, n_beta: int = 20) -> dict:
    """Unique sigma, decreasing sigma, single rho zero on a ``beta`` grid."""
    bb = beta_bar(traj)
    betas = bb * np.arange(1, n_beta + 1) / (n_beta + 1)
    sig, rho = [], []
    unique_sigma = single_v_zero = True
    problems = []
    for b in betas:
        try:
            sig.append(sigma_of_beta(traj, float(b)))
        except PropertyViolation as exc:
            unique_sigma = False
            sig.append(float("nan"))
            problems.append(exc.report)
        try:
            rho.append(v_beta_and_rho(traj, float(b))[1])
        except PropertyViolation as exc:
            single_v_zero = False
            rho.append(float("nan"))
            problems.append(exc.report)
    sig_arr = np.asarray(sig)
    decreasing = bool(np.all(np.diff(sig_arr) < 0))
    tau1 = xi_crossing(traj, critical_points(traj.params).xi1)
    return {"beta_bar": bb, "betas": betas.tolist(), "sigma": sig, "rho": rho,
            "tau1": tau1, "unique_sigma": unique_sigma, "sigma_decreasing": decreasing,
            "sigma_below_tau1": bool(tau1 is not None and np.all(sig_arr < tau1)),
            "single_v_zero": single_v_zero,
            "rho_increasing": bool(np.all(np.diff(np.asarray(rho)) > 0)),
            "problems": problems}


def theta_monotone(traj: Trajectory, tol: float = 1e-9) -> tuple[bool, float]:
    th = theta_profile(traj)
    th = th[np.isfinite(th)]
    worst = float(np.min(np.diff(th), initial=0.0))
    return worst >= -tol, worst


def structure_suite(params: OdeParams, n_alpha: int = 10, n_beta: int = 20,
                    tau_max: float = 40.0, factors=None) -> dict:
    """Run every trajectory-level property on one parameter set.

    Returns a dict with a ``checks`` map of booleans and the supporting data.
    """
    cp = critical_points(params)
    gs = bisect_ground_state(params, tau_max=tau_max)
    if factors is None:
        factors = np.linspace(1.02, 2.0, n_alpha)
    alphas = [gs.alpha * float(f) for f in factors]
    checks = {}
    data = {"params": params.as_dict(), "xi": [cp.xi0, cp.xi1, cp.xi2],
            "alpha_star": gs.alpha, "ground_state": gs.to_dict()}

    p_xi0 = shoot(cp.xi0, params, tau_max)
    checks["xi0_is_P"] = p_xi0.classification == "P"

    g = shoot_near_ground(gs.alpha, params, tau_max)
    data["ground_floor"] = g.tolerances["floor"]
    data["ground_class"] = g.classification
    ok_e, inc = energy_monotone(g)
    checks["energy_monotone_ground"] = ok_e
    ok_t, worst = theta_monotone(g)
    checks["theta_monotone_ground"] = ok_t
    data["theta_worst_step_ground"] = worst
    bs = beta_structure(g, n_beta)
    checks["sigma_unique_ground"] = bs["unique_sigma"]
    checks["sigma_decreasing_ground"] = bs["sigma_decreasing"]
    checks["v_single_zero_ground"] = bs["single_v_zero"]
    try:
        b0 = find_beta0(g, tol=1e-10)
        checks["beta0_ground"] = b0.gap < 1e-6
        data["beta0_ground"] = b0.to_dict()
    except PropertyViolation as exc:
        checks["beta0_ground"] = False
        data["beta0_ground"] = exc.report
    adm = admissibility_report(gs.alpha, params, tau_max, floor=g.tolerances["floor"])
    checks["ground_signature"] = adm["ok"]
    data["ground_admissibility"] = adm

    scan = []
    for a in alphas:
        tr = shoot(a, params, tau_max)
        row = {"alpha": a, "classification": tr.classification, "b_alpha": tr.b_alpha}
        row["energy_monotone"], _ = energy_monotone(tr)
        if tr.classification == "N":
            mask = tr.interior()
            row["u_prime_negative"] = bool(np.all(tr.u_prime[mask][1:] < 0))
            adm = admissibility_report(a, params, tau_max)
            row["admissibility"] = adm
            bsn = beta_structure(tr, n_beta)
            row["sigma_unique"] = bsn["unique_sigma"]
            row["sigma_decreasing"] = bsn["sigma_decreasing"]
            row["v_single_zero"] = bsn["single_v_zero"]
            row["theta_monotone"], _ = theta_monotone(tr)
            try:
                row["beta0_gap"] = find_beta0(tr, tol=1e-10).gap
            except PropertyViolation:
                row["beta0_gap"] = float("inf")
        scan.append(row)
    data["scan"] = scan
    in_n = [r for r in scan if r["classification"] == "N"]
    checks["scan_all_N"] = len(in_n) == len(scan)
    checks["energy_monotone_scan"] = all(r["energy_monotone"] for r in scan)
    checks["u_prime_negative_scan"] = all(r.get("u_prime_negative", False) for r in in_n)
    checks["w_one_sign_change_scan"] = all(
        r["admissibility"]["checks"]["one_sign_change"] for r in in_n)
    checks["w_at_b_negative_scan"] = all(
        r["admissibility"]["checks"]["w_at_b_negative"] for r in in_n)
    checks["w_zero_before_tau1_scan"] = all(
        r["admissibility"]["checks"]["zero_before_tau1"] for r in in_n)
    checks["sigma_unique_scan"] = all(r["sigma_unique"] for r in in_n)
    checks["sigma_decreasing_scan"] = all(r["sigma_decreasing"] for r in in_n)
    checks["v_single_zero_scan"] = all(r["v_single_zero"] for r in in_n)
    checks["beta0_scan"] = all(r["beta0_gap"] < 1e-6 for r in in_n)
    bvals = [r["b_alpha"] for r in in_n]
    checks["b_decreasing_scan"] = bool(np.all(np.diff(bvals) < 0))
    data["theta_monotone_scan"] = [r.get("theta_monotone") for r in in_n]
    return {"checks": checks, "ok": all(checks.values()), "data": data}
