"""Discrete-series states and their coherent-state transforms.

A state is a finite coefficient sequence ``a_m`` in the orthonormal basis
``|k, m>``. Its transform on the disk is

    L psi(zeta) = (1 - |zeta|^2)^k * Phi(zeta),
    Phi(zeta)   = sum_m c_m conj(a_m) zeta^m,
    c_m         = sqrt(Gamma(m + 2k) / (m! Gamma(2k))).

Coherent states have the closed-form overlap

    <zeta0|zeta> = (1-|zeta0|^2)^k (1-|zeta|^2)^k (1 - conj(zeta0) zeta)^(-2k).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import betainc, gammaln

from . import kernels
from .errors import DomainError, ParameterError
from .hyp_geom import DiskPoint

RANDOM_DECAY = 0.7
COHERENT_TAIL_WARN = 1e-10


@dataclass(frozen=True)
class QuantumNumber:
    """Half-integer ``k = twice_k / 2`` with ``k >= 1``."""

    twice_k: int

    def __post_init__(self):
        if int(self.twice_k) != self.twice_k or self.twice_k < 2:
            raise ParameterError(f"twice_k must be an integer >= 2, got {self.twice_k}")

    @property
    def k(self) -> float:
        return 0.5 * self.twice_k

    @classmethod
    def of(cls, k: Union[float, "QuantumNumber"]) -> "QuantumNumber":
        if isinstance(k, QuantumNumber):
            return k
        tk = 2.0 * float(k)
        if abs(tk - round(tk)) > 1e-12:
            raise ParameterError(f"k must be a half-integer, got {k}")
        return cls(int(round(tk)))

    def __float__(self) -> float:
        return self.k


KLike = Union[float, QuantumNumber]


def _kval(k: KLike) -> float:
    return QuantumNumber.of(k).k


def log_basis_coeff(m: int, k: KLike) -> float:
    """Natural log of :func:`basis_coeff`; finite for every admissible ``(m, k)``."""
    if m < 0:
        raise DomainError(f"basis index must be >= 0, got {m}")
    kk = _kval(k)
    return 0.5 * (math.lgamma(m + 2 * kk) - math.lgamma(m + 1) - math.lgamma(2 * kk))


def basis_coeff(m: int, k: KLike) -> float:
    """``sqrt(Gamma(m+2k) / (m! Gamma(2k)))`` evaluated in the log domain.

    Returns ``inf`` (like :func:`basis_coeffs`) when the value itself exceeds
    the float64 range, e.g. ``m = 10**6, k = 100`` where the log is about 946;
    use :func:`log_basis_coeff` there.
    """
    lc = log_basis_coeff(m, k)
    return math.exp(lc) if lc < 709.0 else math.inf


def basis_coeffs(M: int, k: KLike) -> np.ndarray:
    """Vector of :func:`basis_coeff` for ``m = 0..M``."""
    kk = _kval(k)
    m = np.arange(M + 1, dtype=np.float64)
    return np.exp(0.5 * (gammaln(m + 2 * kk) - gammaln(m + 1) - gammaln(2 * kk)))


@dataclass(frozen=True)
class TransformValue:
    """``value = (1-|zeta|^2)^k * holo``; ``holo_deriv = dPhi/dzeta``."""

    value: complex
    holo: complex
    holo_deriv: complex


@dataclass
class StateVector:
    """Finite state ``sum_m a_m |k, m>``.

    Attributes
    ----------
    k : QuantumNumber
    coeffs : ndarray of complex
        ``a_0 .. a_M``.
    label : str
        Free-form provenance tag (``"coherent"``, ``"basis:1"``, ...).
    tail : float
        Norm-squared mass dropped by truncation (coherent states only).
    tail_flag : bool
        True when ``tail`` exceeds the warning threshold.
    """

    k: QuantumNumber
    coeffs: np.ndarray
    label: str = "custom"
    tail: float = 0.0
    tail_flag: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.k = QuantumNumber.of(self.k)
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128)).copy()
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ParameterError("coeffs must be a non-empty 1-D sequence")

    @property
    def kval(self) -> float:
        return self.k.k

    @property
    def M(self) -> int:
        return self.coeffs.size - 1

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ParameterError("cannot normalize the zero vector")
        return StateVector(self.k, self.coeffs / n, self.label, self.tail,
                           self.tail_flag, dict(self.meta))

    def holo_coeffs(self) -> np.ndarray:
        """Taylor coefficients ``c_m conj(a_m)`` of ``Phi``."""
        return basis_coeffs(self.M, self.k) * np.conj(self.coeffs)

    def zeros(self) -> np.ndarray:
        """Roots of ``Phi`` (all of them, inside the disk or not)."""
        c = self.holo_coeffs()
        nz = np.nonzero(np.abs(c) > 0)[0]
        if nz.size == 0:
            return np.zeros(0, dtype=np.complex128)
        c = c[: nz[-1] + 1]
        roots = np.roots(c[::-1]) if c.size > 1 else np.zeros(0)
        return np.asarray(roots, dtype=np.complex128)

    def __add__(self, other: "StateVector") -> "StateVector":
        if self.k != other.k:
            raise ParameterError("states must share k")
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, complex)
        a[: self.coeffs.size] += self.coeffs
        a[: other.coeffs.size] += other.coeffs
        return StateVector(self.k, a)

    def scale(self, c: complex) -> "StateVector":
        return StateVector(self.k, c * self.coeffs, self.label)

    def to_json(self) -> dict:
        return {"twice_k": self.k.twice_k,
                "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: Union[dict, str]) -> "StateVector":
        if isinstance(obj, str):
            obj = json.loads(obj)
        a = np.array([complex(re, im) for re, im in obj["coeffs"]])
        return cls(QuantumNumber(int(obj["twice_k"])), a)


def _as_complex(p) -> complex:
    if isinstance(p, DiskPoint):
        return p.z
    z = complex(p)
    if abs(z) >= 1.0:
        raise DomainError("|zeta| >= 1")
    return z


def transform_eval(psi: StateVector, p) -> TransformValue:
    """Evaluate ``L psi``, ``Phi`` and ``Phi'`` at one disk point."""
    z = _as_complex(p)
    phi, dphi = kernels.holo_eval(psi.holo_coeffs(), np.array([z]))
    val = (1.0 - abs(z) ** 2) ** psi.kval * phi[0]
    return TransformValue(complex(val), complex(phi[0]), complex(dphi[0]))


def transform_array(psi: StateVector, z: np.ndarray):
    """Vectorized transform: returns ``(value, phi, dphi)`` arrays."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("|zeta| >= 1")
    phi, dphi = kernels.holo_eval(psi.holo_coeffs(), z)
    return (1.0 - np.abs(z) ** 2) ** psi.kval * phi, phi, dphi


def coherent_kernel(z0, p, k: KLike):
    """Closed-form overlap ``<zeta0|zeta>`` (vectorized in ``p``)."""
    kk = _kval(k)
    a = _as_complex(z0)
    if isinstance(p, DiskPoint):
        z = p.z
    else:
        z = np.asarray(p, dtype=np.complex128)
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("|zeta| >= 1")
    out = ((1.0 - abs(a) ** 2) ** kk * (1.0 - np.abs(z) ** 2) ** kk
           * (1.0 - np.conj(a) * z) ** (-2.0 * kk))
    return complex(out) if np.ndim(out) == 0 else out


def coherent_tail(z0, k: KLike, M: int) -> float:
    """Mass ``sum_{m>M} |a_m|^2`` of the exact coherent state beyond ``M``.

    With ``x = |zeta0|^2`` the weights ``(1-x)^{2k} c_m^2 x^m`` are a
    negative-binomial law whose upper tail is ``I_x(M+1, 2k)``.
    """
    x = abs(_as_complex(z0)) ** 2
    if x == 0.0:
        return 0.0
    return float(betainc(M + 1, 2.0 * _kval(k), x))


def coherent_coeffs(z0, k: KLike, M: int | None = None) -> StateVector:
    """Truncated coherent state centred at ``zeta0``.

    ``a_m = (1-|zeta0|^2)^k c_m zeta0^m`` for ``m <= M``, renormalized, so
    that the transform reproduces :func:`coherent_kernel`. With
    ``M=None`` the smallest ``M`` whose tail is below ``1e-17`` is used.
    """
    a0 = _as_complex(z0)
    qk = QuantumNumber.of(k)
    if M is None:
        M = 0
        while coherent_tail(a0, qk, M) > 1e-17 and M < 100000:
            M = max(2 * M, M + 8)
        lo = M // 2
        while lo < M:
            mid = (lo + M) // 2
            if coherent_tail(a0, qk, mid) > 1e-17:
                lo = mid + 1
            else:
                M = mid
    if M < 0:
        raise DomainError("M must be >= 0")
    m = np.arange(M + 1)
    logc = 0.5 * (gammaln(m + 2 * qk.k) - gammaln(m + 1) - gammaln(2 * qk.k))
    if a0 == 0:
        a = np.zeros(M + 1, complex)
        a[0] = 1.0
    else:
        r = abs(a0)
        ang = a0 / r
        a = np.exp(logc + m * math.log(r)) * ang ** m
    tail = coherent_tail(a0, qk, M)
    psi = StateVector(qk, a, label="coherent", tail=tail,
                      tail_flag=tail > COHERENT_TAIL_WARN,
                      meta={"center": [a0.real, a0.imag]})
    return psi.normalize()


def basis_state(m: int, k: KLike) -> StateVector:
    """The basis vector ``|k, m>``."""
    if m < 0:
        raise DomainError("basis index must be >= 0")
    a = np.zeros(m + 1, complex)
    a[m] = 1.0
    return StateVector(QuantumNumber.of(k), a, label=f"basis:{m}")


def random_state(M: int, k: KLike, seed: int) -> StateVector:
    """Seeded random state with geometrically decaying coefficients.

    ``a_m = (g1 + i g2) * 0.7^m`` with ``g1, g2`` standard normals drawn
    from ``numpy.random.default_rng(seed)`` (PCG64), all real parts first
    and then all imaginary parts; normalized.
    """
    if M < 1:
        raise DomainError("M must be >= 1")
    rng = np.random.default_rng(int(seed))
    g = rng.standard_normal((2, M + 1))
    a = (g[0] + 1j * g[1]) * RANDOM_DECAY ** np.arange(M + 1)
    psi = StateVector(QuantumNumber.of(k), a, label="random", meta={"seed": int(seed), "M": M})
    return psi.normalize()
