"""Norms, entropies and Fisher information of coherent-state transforms.

All integrals are against ``dnu``. Writing ``s = 1 - |zeta|^2`` and
``Phi`` for the holomorphic part of the transform,

* ``int |L psi|^p dnu = (2k-1)/pi int s^(kp-2) |Phi|^p d^2 zeta``
* ``-int |L psi|^2 ln |L psi|^2 dnu
  = -(2k-1)/pi int s^(2k-2) |Phi|^2 (2k ln s + ln |Phi|^2) d^2 zeta``

For ``u = s^(kq/2) |Phi|^(q/2)`` the Euclidean gradient is

    |grad u|^2 = s^(kq-2) |Phi|^(q-2) |(q/2) s Phi' - kq conj(zeta) Phi|^2,

which equals ``u^2 [k^2q^2 r^2/s^2 - (kq^2/s) Re(zeta Phi'/Phi)
+ (q^2/4)|Phi'/Phi|^2]`` off the zeros of ``Phi`` and stays finite on
them. The hyperbolic gradient square is ``(s^2/4)`` times the Euclidean
one, hence ``int |grad u|^2_hyp dnu = (2k-1)/(4 pi) int |grad u|^2 d^2 zeta``.

The quadrature nodes are aligned with the zeros of ``Phi`` (see
:mod:`hyperwehrl.hyp_geom`), where ``|Phi|^p`` and ``|Phi|^2 ln|Phi|^2``
are not smooth.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DomainError, ParameterError
from .hyp_geom import DEFAULT_SPEC, DiskPoint, QuadratureSpec, refine
from .hyp_geom import disk_nodes
from .su11_states import StateVector, transform_array


@dataclass
class EntropyReport:
    """Entropies of ``rho = |L psi|^2``."""

    k: float
    wehrl: float
    renyi: dict
    l2_norm_sq: float
    level: int = 0
    state: str = ""
    spec: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["renyi"] = {str(r): v for r, v in self.renyi.items()}
        return d


@dataclass
class FisherReport:
    """Both sides of the gradient/norm identity for ``u = |L psi|^(q/2)``."""

    k: float
    q: float
    gradient_integral: float
    q_norm_integral: float
    residual: float
    rel_residual: float
    level: int = 0
    state: str = ""
    spec: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def singular_points(psi: StateVector, margin: float = 0.25,
                    relevance: float = 1e-5) -> np.ndarray:
    """Zeros of ``Phi`` that matter for quadrature.

    Kept are zeros within ``margin`` of the closed disk around which
    ``|L psi|`` reaches at least ``relevance`` times its maximum; zeros
    sitting where the transform is negligible (typically produced by
    truncating a series) only cost nodes.
    """
    z = psi.zeros()
    z = z[np.abs(z) < 1.0 + margin]
    if z.size == 0:
        return z
    # coarse maximum of |L psi|
    r = np.sqrt(np.linspace(0.0, 0.99, 40))
    ring = np.exp(2j * np.pi * np.arange(64) / 64)
    grid = (r[:, None] * ring[None, :]).ravel()
    top = float(np.max(np.abs(transform_array(psi, grid)[0])))
    circ = np.exp(2j * np.pi * np.arange(16) / 16)
    keep = []
    for zj in z:
        c = zj if abs(zj) < 0.995 else zj * (0.995 / abs(zj))
        pts = c + 0.05 * circ
        pts = pts[np.abs(pts) < 1.0]
        near = np.max(np.abs(transform_array(psi, pts)[0])) if pts.size else 0.0
        keep.append(near >= relevance * top)
    return z[np.asarray(keep, dtype=bool)]


def transform_sums(psi: StateVector, powers: Sequence[float] = (), grad_q: float = 0.0,
                   entropy: bool = False, spec: QuadratureSpec = DEFAULT_SPEC):
    """Refined fused sums ``[S_p..., S_grad, S_ent]`` over ``d^2 zeta``.

    Returns the :class:`~hyperwehrl.hyp_geom.Refined` record.
    """
    coef = np.ascontiguousarray(psi.holo_coeffs())
    k = psi.kval
    pw = np.asarray(list(powers), dtype=np.float64)
    sing = singular_points(psi, spec.near)

    def evaluate(level):
        acc = np.zeros(pw.size + 2)
        for z, omt, w in disk_nodes(spec, level, sing):
            acc += kernels.channel_sums(coef, z, omt, w, k, pw, grad_q, entropy)
        return acc

    return refine(evaluate, spec, "transform integral")


def _check_p(k: float, p: float) -> None:
    if not (k * p > 1.0):
        raise DomainError(f"need kp > 1 for integrability, got k={k}, p={p}")


def lp_norm_q(psi: StateVector, p: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int |L psi|^p dnu``.

    Raises
    ------
    DomainError
        If ``kp <= 1`` (the integral diverges at the boundary).
    """
    k = psi.kval
    _check_p(k, p)
    res = transform_sums(psi, [p], spec=spec)
    return (2 * k - 1) / math.pi * float(res.values[0])


def lp_norms(psi: StateVector, ps: Sequence[float],
             spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Several ``int |L psi|^p dnu`` from one pass over the nodes."""
    k = psi.kval
    for p in ps:
        _check_p(k, p)
    res = transform_sums(psi, ps, spec=spec)
    return (2 * k - 1) / math.pi * res.values[: len(ps)]


def wehrl_entropy(psi: StateVector, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``-int rho ln rho dnu`` with ``rho = |L psi|^2`` (``0 ln 0 = 0``)."""
    k = psi.kval
    res = transform_sums(psi, (), entropy=True, spec=spec)
    return -(2 * k - 1) / math.pi * float(res.values[-1])


def _check_renyi(k: float, r: float) -> None:
    if not (r > 1.0 and 2 * k * r > 2.0):
        raise DomainError(f"Renyi order needs r > 1 and 2kr > 2, got r={r}, k={k}")


def renyi_entropy(psi: StateVector, r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``(1/(1-r)) ln int rho^r dnu`` (standard sign convention)."""
    k = psi.kval
    _check_renyi(k, r)
    return math.log(lp_norm_q(psi, 2.0 * r, spec)) / (1.0 - r)


def entropy_report(psi: StateVector, orders: Sequence[float] = (),
                   spec: QuadratureSpec = DEFAULT_SPEC) -> EntropyReport:
    """Wehrl entropy, Renyi entropies and the L2 norm from one pass."""
    k = psi.kval
    for r in orders:
        _check_renyi(k, r)
    powers = [2.0] + [2.0 * r for r in orders]
    res = transform_sums(psi, powers, entropy=True, spec=spec)
    c = (2 * k - 1) / math.pi
    vals = c * res.values
    renyi = {float(r): math.log(vals[1 + i]) / (1.0 - r) for i, r in enumerate(orders)}
    return EntropyReport(k=k, wehrl=-float(vals[-1]), renyi=renyi,
                         l2_norm_sq=float(vals[0]), level=res.level,
                         state=psi.label, spec=spec.as_dict())


def check_kq(k: float, q: float) -> None:
    if not (k * q > 2.0):
        raise DomainError(f"need kq > 2, got k={k}, q={q}")


def fisher_integral(psi: StateVector, q: float,
                    spec: QuadratureSpec = DEFAULT_SPEC) -> FisherReport:
    """``int |grad |L psi|^(q/2)|^2 dnu`` against ``(kq/4) int |L psi|^q dnu``."""
    k = psi.kval
    check_kq(k, q)
    if q < 2.0:
        raise DomainError("q must be >= 2")
    res = transform_sums(psi, [q], grad_q=q, spec=spec)
    qn = (2 * k - 1) / math.pi * float(res.values[0])
    gi = (2 * k - 1) / (4 * math.pi) * float(res.values[1])
    resid = gi - 0.25 * k * q * qn
    return FisherReport(k=k, q=q, gradient_integral=gi, q_norm_integral=qn,
                        residual=resid, rel_residual=abs(resid) / abs(gi),
                        level=res.level, state=psi.label, spec=spec.as_dict())


# ---------------------------------------------------------------------------
# pointwise gradient checks
# ---------------------------------------------------------------------------


def u_field(psi: StateVector, q: float, z) -> np.ndarray:
    """``u = |L psi|^(q/2)`` at the points ``z``."""
    val, _, _ = transform_array(psi, z)
    return np.abs(val) ** (0.5 * q)


def grad_u_sq(psi: StateVector, q: float, z) -> np.ndarray:
    """Analytic Euclidean ``|grad u|^2`` (zero-safe factored form)."""
    z = np.asarray(z, dtype=np.complex128)
    _, phi, dphi = transform_array(psi, z)
    k = psi.kval
    s = 1.0 - np.abs(z) ** 2
    a2 = np.abs(phi) ** 2
    g = 0.5 * q * s * dphi - k * q * np.conj(z) * phi
    with np.errstate(divide="ignore", invalid="ignore"):
        fac = np.where(a2 > 0, a2 ** (0.5 * q - 1.0), 0.0) if q != 2 else 1.0
    return s ** (k * q - 2.0) * fac * np.abs(g) ** 2


def grad_u_sq_logform(psi: StateVector, q: float, z) -> np.ndarray:
    """Same quantity through the log-derivative expansion (needs ``Phi != 0``)."""
    z = np.asarray(z, dtype=np.complex128)
    _, phi, dphi = transform_array(psi, z)
    k = psi.kval
    r2 = np.abs(z) ** 2
    s = 1.0 - r2
    u2 = s ** (k * q) * np.abs(phi) ** q
    ld = dphi / phi
    return u2 * (k * k * q * q * r2 / s ** 2 - (k * q * q / s) * np.real(z * ld)
                 + 0.25 * q * q * np.abs(ld) ** 2)


def gradient_fd_check(psi: StateVector, q: float, p, h: float = 1e-6,
                      zero_tol: float = 1e-8):
    """Relative gap between analytic and central-difference ``|grad u|^2``.

    Returns ``None`` (skip signal) when ``|Phi(p)|`` is below ``zero_tol``.
    """
    k = psi.kval
    check_kq(k, q)
    z = p.z if isinstance(p, DiskPoint) else complex(p)
    _, phi, _ = transform_array(psi, np.array([z]))
    if abs(phi[0]) < zero_tol:
        return None
    pts = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    u = u_field(psi, q, pts)
    ux = (u[0] - u[1]) / (2 * h)
    uy = (u[2] - u[3]) / (2 * h)
    fd = ux * ux + uy * uy
    an = float(grad_u_sq(psi, q, np.array([z]))[0])
    scale = max(abs(an), abs(fd))
    return 0.0 if scale == 0.0 else abs(an - fd) / scale
