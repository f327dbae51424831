"""Coordinates, invariant measures and quadrature on the disk and half-plane.

Disk conventions
----------------
``t = |zeta|^2`` is the radial variable. The coherent-state measure is

    dnu = (2k-1)/pi * (1-t)^(-2) d^2 zeta,   d^2 zeta = (1/2) dt dphi,

and the curvature -1 area element is ``dmu = 4 (1-t)^(-2) d^2 zeta``, so
``dnu = (2k-1)/(4 pi) dmu``.

Radial nodes are Gauss-Legendre in a graded coordinate ``s`` with
``t = 1 - (1-s)^m``; ``1 - t = (1-s)^m`` is then exact in floating point,
which keeps logarithmic boundary terms accurate. ``m = 1`` is plain
Gauss-Legendre in ``t``.

When the integrand has isolated singular points inside the disk (zeros of
a transform, where ``|Phi|^p`` or ``|Phi|^2 ln|Phi|^2`` lose smoothness) the
radial rule is split into panels at their radii and, on circles passing
near one of them, the uniform angular rule is replaced by graded
Gauss-Legendre panels clustered at their angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.special import roots_legendre

from .errors import AccuracyError, DomainError, ParameterError

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiskPoint:
    """A point ``zeta = re + i im`` of the open unit disk."""

    re: float
    im: float

    def __post_init__(self):
        if not (self.re * self.re + self.im * self.im < 1.0):
            raise DomainError(f"|zeta| >= 1 for zeta = {self.re}+{self.im}i")

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class HyperbolicPoint:
    """Geodesic polar coordinates about the origin: ``zeta = tanh(tau/2) e^{i phi}``."""

    tau: float
    phi: float

    def __post_init__(self):
        if not self.tau >= 0.0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")
        if not (0.0 <= self.phi < TWO_PI):
            raise DomainError(f"phi must lie in [0, 2pi), got {self.phi}")


def _wrap_angle(phi):
    phi = np.mod(phi, TWO_PI)
    # mod can return exactly 2pi for tiny negative inputs
    return np.where(phi >= TWO_PI, 0.0, phi)


def disk_to_hyperbolic(p: DiskPoint) -> HyperbolicPoint:
    """Map a disk point to ``(tau, phi)`` with ``tau = 2 atanh|zeta|``."""
    z = complex(p.re, p.im)
    r = abs(z)
    if r >= 1.0:
        raise DomainError("|zeta| >= 1")
    phi = float(_wrap_angle(math.atan2(z.imag, z.real))) if r > 0 else 0.0
    return HyperbolicPoint(2.0 * math.atanh(r), phi)


def hyperbolic_to_disk(h: HyperbolicPoint) -> DiskPoint:
    """Inverse of :func:`disk_to_hyperbolic`."""
    r = math.tanh(0.5 * h.tau)
    return DiskPoint(r * math.cos(h.phi), r * math.sin(h.phi))


def disk_to_hyperbolic_array(z: np.ndarray):
    """Vectorized ``zeta -> (tau, phi)``."""
    z = np.asarray(z, dtype=np.complex128)
    r = np.abs(z)
    if np.any(r >= 1.0):
        raise DomainError("|zeta| >= 1")
    tau = 2.0 * np.arctanh(r)
    phi = np.where(r > 0, _wrap_angle(np.angle(z)), 0.0)
    return tau, phi


def hyperbolic_to_disk_array(tau, phi) -> np.ndarray:
    return np.tanh(0.5 * np.asarray(tau)) * np.exp(1j * np.asarray(phi))


def hyperbolic_distance(z1, z2):
    """Geodesic distance in the curvature -1 disk metric."""
    z1 = np.asarray(z1, dtype=np.complex128)
    z2 = np.asarray(z2, dtype=np.complex128)
    d = np.abs(z1 - z2) / np.abs(1.0 - np.conj(z1) * z2)
    return 2.0 * np.arctanh(d)


def halfplane_to_disk(t, y):
    """Cayley map ``z = t + i y -> (z - i)/(z + i)``."""
    z = np.asarray(t) + 1j * np.asarray(y)
    return (z - 1j) / (z + 1j)


def disk_to_halfplane(zeta):
    """Inverse Cayley map, returning ``(t, y)``."""
    zeta = np.asarray(zeta, dtype=np.complex128)
    z = 1j * (1.0 + zeta) / (1.0 - zeta)
    return z.real, z.imag


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------


def check_k(k: float) -> None:
    if not (2.0 * k > 1.0):
        raise ParameterError(f"need 2k > 1, got k = {k}")


def nu_density(t, k: float):
    """Density of ``dnu`` with respect to ``d^2 zeta``: ``(2k-1)/pi (1-t)^-2``."""
    check_k(k)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr >= 1.0) or np.any(t_arr < 0.0):
        raise DomainError("t = |zeta|^2 must lie in [0, 1)")
    out = (2.0 * k - 1.0) / math.pi / (1.0 - t_arr) ** 2
    return float(out) if out.ndim == 0 else out


def mu_to_nu(k: float) -> float:
    """Factor turning a ``dmu`` integral into a ``dnu`` integral."""
    check_k(k)
    return (2.0 * k - 1.0) / (4.0 * math.pi)


# ---------------------------------------------------------------------------
# quadrature plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts and refinement policy.

    Level ``L`` uses ``radial_nodes * 2**L`` radial nodes per panel and
    ``angular_nodes * 2**L`` angular nodes. Refinement stops when two
    successive levels agree to ``rel_tol``.
    """

    radial_nodes: int = 256
    angular_nodes: int = 256
    rel_tol: float = 1e-10
    max_refinements: int = 4
    grading: int = 3
    near: float = 0.25

    def __post_init__(self):
        if self.radial_nodes < 16:
            raise ParameterError("radial_nodes must be >= 16")
        if self.angular_nodes < 8:
            raise ParameterError("angular_nodes must be >= 8")
        if not self.rel_tol > 0:
            raise ParameterError("rel_tol must be > 0")
        if self.max_refinements < 1:
            raise ParameterError("max_refinements must be >= 1")
        if self.grading < 1:
            raise ParameterError("grading must be >= 1")

    def counts(self, level: int) -> tuple[int, int]:
        f = 1 << level
        return self.radial_nodes * f, self.angular_nodes * f

    def as_dict(self) -> dict:
        return {"radial_nodes": self.radial_nodes, "angular_nodes": self.angular_nodes,
                "rel_tol": self.rel_tol, "max_refinements": self.max_refinements,
                "grading": self.grading, "near": self.near}


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=64)
def _gl(n: int):
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0):
    """``n``-point Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = _gl(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _close(new: np.ndarray, old: np.ndarray, rel_tol: float) -> bool:
    scale = np.maximum(np.abs(new), np.abs(old))
    diff = np.abs(new - old)
    return bool(np.all(diff <= rel_tol * scale))


@dataclass
class Refined:
    """Outcome of a refinement loop."""

    values: np.ndarray
    previous: np.ndarray
    level: int
    history: list = field(default_factory=list)

    @property
    def value(self) -> float:
        return float(self.values[0])

    @property
    def rel_change(self) -> float:
        scale = np.maximum(np.abs(self.values), 1e-300)
        return float(np.max(np.abs(self.values - self.previous) / scale))


def refine(evaluate: Callable[[int], np.ndarray], spec: QuadratureSpec,
           what: str = "integral") -> Refined:
    """Evaluate levels 0, 1, ... until two successive results agree.

    ``evaluate(level)`` returns a 1-D array of channel values; all channels
    must meet ``spec.rel_tol`` at once.
    """
    prev = np.atleast_1d(np.asarray(evaluate(0), dtype=np.float64))
    history = [prev]
    for level in range(1, spec.max_refinements + 1):
        cur = np.atleast_1d(np.asarray(evaluate(level), dtype=np.float64))
        history.append(cur)
        if not np.all(np.isfinite(cur)):
            raise AccuracyError(f"{what}: non-finite value at level {level}",
                                (prev.tolist(), cur.tolist()))
        if _close(cur, prev, spec.rel_tol):
            return Refined(cur, prev, level, history)
        prev = cur
    raise AccuracyError(
        f"{what}: no convergence to rel_tol={spec.rel_tol} after "
        f"{spec.max_refinements} refinements",
        (history[-2].tolist(), history[-1].tolist()))


def graded_radial_rule(n: int, grading: int = 1, breaks: Sequence[float] = (),
                       min_panel: int | None = None):
    """Composite radial rule on ``t in (0, 1)``.

    Returns ``(t, one_minus_t, weight)`` with ``sum weight h(t)``
    approximating ``int_0^1 h(t) dt``. ``breaks`` are ``t`` values where a
    new panel starts; panels share the ``n`` nodes in proportion to their
    length in ``s``, each getting at least ``min_panel`` (default ``n/4``),
    and are graded with ``u -> u^3`` towards the break points. A break at
    ``t = 0`` grades the first panel towards the origin.
    """
    m = int(grading)
    if min_panel is None:
        min_panel = max(16, n // 4)
    sb = [0.0, 1.0]
    origin = False
    for tb in breaks:
        if tb < 1e-14:
            origin = True
        elif tb < 1.0:
            sb.append(1.0 - (1.0 - tb) ** (1.0 / m))
    sb = np.unique(np.asarray(sb))
    keep = np.concatenate([[True], np.diff(sb) > 1e-12])
    sb = sb[keep]
    s_all, w_all = [], []
    last = len(sb) - 2
    for i, (a, b) in enumerate(zip(sb[:-1], sb[1:])):
        if last == 0 and not origin:
            s, ws = gauss_legendre(n, a, b)
            s_all.append(s)
            w_all.append(ws)
            continue
        # the node budget is shared by length, with a floor per panel;
        # each half is graded towards an adjacent break point
        npan = max(min_panel, int(math.ceil(n * (b - a))))
        nh = max(8, npan // 2)
        half = 0.5 * (b - a)
        u, wu = gauss_legendre(nh, 0.0, 1.0)
        for end, sign, is_break in ((a, 1.0, i > 0 or origin), (b, -1.0, i < last)):
            g, dg = (u ** 3, 3.0 * u ** 2 * wu) if is_break else (u, wu)
            s_all.append(end + sign * half * g)
            w_all.append(half * dg)
    s = np.concatenate(s_all)
    ws = np.concatenate(w_all)
    omt = (1.0 - s) ** m
    t = 1.0 - omt if m > 1 else s
    weight = ws * m * (1.0 - s) ** (m - 1)
    return t, omt, weight


def angular_rule(n: int, angles: Sequence[float] = ()):
    """Angular rule on ``[0, 2pi)``.

    Without ``angles`` this is the ``n``-point trapezoid rule. Otherwise
    the circle is cut at the given angles, each arc is split at its
    midpoint and each half carries Gauss-Legendre nodes graded towards the
    cut with ``u -> u^3``. Long arcs get proportionally more nodes.
    """
    if len(angles) == 0:
        phi = TWO_PI * np.arange(n) / n
        return phi, np.full(n, TWO_PI / n)
    a = np.unique(np.mod(np.asarray(angles, dtype=np.float64), TWO_PI))
    keep = np.concatenate([[True], np.diff(a) > 1e-12])
    a = a[keep]
    ends = np.concatenate([a, [a[0] + TWO_PI]])
    base = max(n // (2 * len(a)), 16)
    phis, ws = [], []
    for lo, hi in zip(ends[:-1], ends[1:]):
        half = 0.5 * (hi - lo)
        # never coarser than the uniform rule of the same level
        nh = max(base, int(math.ceil(n * half / TWO_PI)))
        u, wu = gauss_legendre(nh, 0.0, 1.0)
        g = u ** 3
        dg = 3.0 * u ** 2 * wu
        phis.append(lo + half * g)
        ws.append(half * dg)
        phis.append(hi - half * g)
        ws.append(half * dg)
    return np.mod(np.concatenate(phis), TWO_PI), np.concatenate(ws)


def disk_nodes(spec: QuadratureSpec, level: int,
               singular: Sequence[complex] = (), chunk: int = 1 << 18
               ) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield chunks ``(zeta, 1 - |zeta|^2, weight)`` of a disk rule.

    ``sum weight * h(zeta)`` approximates ``int h d^2 zeta``. The ordering
    is fixed so sums are bitwise reproducible.
    """
    n_r, n_phi = spec.counts(level)
    sing = np.asarray(list(singular), dtype=np.complex128)
    inside = sing[np.abs(sing) < 1.0]
    t, omt, wt = graded_radial_rule(n_r, spec.grading, np.abs(inside) ** 2)
    # nodes within 1e-15 of the rim carry negligible weight and, after
    # rounding in sqrt and the complex product, may land on the circle
    ok = omt > 1e-15
    t, omt, wt = t[ok], omt[ok], wt[ok]
    r = np.sqrt(t)
    wt = 0.5 * wt  # d^2 zeta = (1/2) dt dphi
    rad_s = np.abs(sing)
    ang_s = np.angle(sing)
    # group radii by the set of nearby singular points
    if sing.size:
        near = np.abs(r[:, None] - rad_s[None, :]) < spec.near
        keys = [tuple(np.nonzero(row)[0]) for row in near]
    else:
        keys = [()] * r.size
    groups: dict = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)
    for key in sorted(groups, key=lambda kk: groups[kk][0]):
        idx = np.asarray(groups[key])
        phi, wphi = angular_rule(n_phi, ang_s[list(key)] if key else ())
        rot = np.exp(1j * phi)
        per = max(1, chunk // phi.size)
        for j0 in range(0, idx.size, per):
            sel = idx[j0:j0 + per]
            z = (r[sel][:, None] * rot[None, :]).reshape(-1)
            om = np.repeat(omt[sel], phi.size)
            w = (wt[sel][:, None] * wphi[None, :]).reshape(-1)
            yield z, om, w


def _probe_boundary(weighted: Callable[[np.ndarray], np.ndarray], what: str) -> None:
    """Reject integrands whose weighted form grows like ``(1-t)^-1`` or faster."""
    eps = np.array([1e-6, 1e-8])
    with np.errstate(all="ignore"):
        h = np.abs(weighted(eps))
    if not np.all(np.isfinite(h)):
        raise DomainError(f"{what}: integrand not finite near the boundary")
    if h[0] > 0 and h[1] / h[0] >= 99.0 and h[1] * 1e-8 > 1e-300:
        raise DomainError(
            f"{what}: weighted integrand grows like (1-t)^-1 at the boundary; "
            "the integrand must carry (1-t)^(1+delta) decay against dnu")


def radial_integral_nu(g: Callable[[np.ndarray], np.ndarray], k: float,
                       spec: QuadratureSpec = DEFAULT_SPEC, grading: int = 1) -> float:
    """``int g dnu`` for a radial profile ``g(t)``, ``t = |zeta|^2``.

    Evaluates ``(2k-1) int_0^1 g(t) (1-t)^-2 dt`` by Gauss-Legendre (graded
    when ``grading > 1``) with node doubling until two levels agree to
    ``spec.rel_tol``.

    Raises
    ------
    DomainError
        When ``g (1-t)^-2`` is not integrable at ``t = 1``.
    AccuracyError
        When refinement fails; carries the last two estimates.
    """
    check_k(k)
    _probe_boundary(lambda e: g(1.0 - e) / e ** 2, "radial_integral_nu")

    def evaluate(level):
        n = spec.radial_nodes << level
        t, omt, w = graded_radial_rule(n, grading)
        return [(2.0 * k - 1.0) * float(np.sum(w * g(t) / omt ** 2))]

    return refine(evaluate, spec, "radial_integral_nu").value


def disk_integral_nu(g: Callable[[np.ndarray], np.ndarray], k: float,
                     spec: QuadratureSpec = DEFAULT_SPEC,
                     singular: Sequence[complex] = ()) -> float:
    """``int g dnu`` over the disk for a vectorized ``g(zeta)``.

    ``singular`` lists points where ``g`` is not smooth; the node set is
    aligned with them (see module notes).
    """
    check_k(k)
    _probe_boundary(
        lambda e: g(np.sqrt(1.0 - e) * np.exp(0.7j)) / e ** 2, "disk_integral_nu")
    c = (2.0 * k - 1.0) / math.pi

    def evaluate(level):
        total = 0.0
        for z, omt, w in disk_nodes(spec, level, singular):
            total += float(np.sum(w * np.asarray(g(z)) / omt ** 2))
        return [c * total]

    return refine(evaluate, spec, "disk_integral_nu").value


def disk_integral_mu(g: Callable[[np.ndarray], np.ndarray],
                     spec: QuadratureSpec = DEFAULT_SPEC,
                     singular: Sequence[complex] = ()) -> float:
    """``int g dmu`` over the disk, ``dmu = 4 (1-t)^-2 d^2 zeta``."""
    return 4.0 * math.pi * disk_integral_nu(g, 1.0, spec, singular)


def _halfplane_nodes(n_theta: int, n_s: int, s_lo: float, s_hi: float):
    th, wth = gauss_legendre(n_theta, -0.5 * math.pi, 0.5 * math.pi)
    s, ws = gauss_legendre(n_s, s_lo, s_hi)
    y = np.exp(s)
    lam = np.sqrt(1.0 + y * y)
    T = lam[:, None] * np.tan(th)[None, :]
    Y = np.broadcast_to(y[:, None], T.shape)
    # dt dy / y^2 = lam sec^2(theta) dtheta * y ds / y^2
    W = (ws * lam / y)[:, None] * (wth / np.cos(th) ** 2)[None, :]
    return T, Y, W


def _halfplane_range(g, rel: float = 1e-18) -> tuple[float, float] | None:
    grid = np.arange(-150.0, 150.0 + 1e-9, 0.5)
    th, wth = gauss_legendre(64, -0.5 * math.pi, 0.5 * math.pi)
    marg = np.empty(grid.size)
    with np.errstate(all="ignore"):
        for i, s in enumerate(grid):
            y = math.exp(s)
            lam = math.sqrt(1.0 + y * y)
            vals = np.asarray(g(lam * np.tan(th), np.full(th.size, y)), dtype=np.float64)
            marg[i] = abs(np.sum(wth / np.cos(th) ** 2 * vals)) * lam / y
    marg = np.where(np.isfinite(marg), marg, 0.0)
    top = marg.max()
    if top == 0.0:
        return None
    on = np.nonzero(marg > rel * top)[0]
    return float(grid[on[0]] - 1.0), float(grid[on[-1]] + 1.0)


def halfplane_integral_mu(g: Callable[[np.ndarray, np.ndarray], np.ndarray],
                          spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int int g(t, y) dt dy / y^2`` over the upper half-plane.

    Compactified with ``t = sqrt(1+y^2) tan(theta)``, ``y = e^s``;
    Gauss-Legendre in ``theta in (-pi/2, pi/2)`` and in ``s`` on a range
    truncated where the ``theta``-marginal falls below ``1e-18`` of its
    peak. The ``sqrt(1+y^2)`` scale tracks the Euclidean size of
    hyperbolic balls about ``i``.
    """
    rng = _halfplane_range(g)
    if rng is None:
        return 0.0
    s_lo, s_hi = rng

    def evaluate(level):
        n_s, n_th = spec.counts(level)
        T, Y, W = _halfplane_nodes(n_th, n_s, s_lo, s_hi)
        return [float(np.sum(W * g(T, Y)))]

    return refine(evaluate, spec, "halfplane_integral_mu").value
