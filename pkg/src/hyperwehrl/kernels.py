"""Hot loops: polynomial evaluation, fused quadrature sums, Dormand-Prince.

Every kernel has a numba-compiled form and a pure numpy/Python form.
``channel_sums`` and ``shoot_kernel`` dispatch on ``_accel.HAVE_NUMBA``;
the explicit ``*_numpy`` / ``*_python`` variants stay importable for the
benchmark and for cross-checking the two paths.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import HAVE_NUMBA, njit

# ---------------------------------------------------------------------------
# holomorphic part of a transform and fused integrand sums
# ---------------------------------------------------------------------------


@njit
def _holo_eval_jit(coef, z):
    n = z.shape[0]
    deg = coef.shape[0] - 1
    phi = np.empty(n, dtype=np.complex128)
    dphi = np.empty(n, dtype=np.complex128)
    for i in range(n):
        zi = z[i]
        p = coef[deg]
        dp = 0.0 + 0.0j
        for m in range(deg - 1, -1, -1):
            dp = dp * zi + p
            p = p * zi + coef[m]
        phi[i] = p
        dphi[i] = dp
    return phi, dphi


def holo_eval_numpy(coef: np.ndarray, z: np.ndarray):
    """Horner evaluation of ``sum coef[m] z**m`` and its derivative."""
    z = np.asarray(z, dtype=np.complex128)
    phi = np.full(z.shape, coef[-1], dtype=np.complex128)
    dphi = np.zeros(z.shape, dtype=np.complex128)
    for m in range(coef.shape[0] - 2, -1, -1):
        dphi = dphi * z + phi
        phi = phi * z + coef[m]
    return phi, dphi


def holo_eval(coef: np.ndarray, z: np.ndarray):
    """Return ``(phi, dphi)`` at the points ``z`` (any shape)."""
    z = np.asarray(z, dtype=np.complex128)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    if HAVE_NUMBA:
        flat = np.ascontiguousarray(z).reshape(-1)
        phi, dphi = _holo_eval_jit(coef, flat)
        return phi.reshape(z.shape), dphi.reshape(z.shape)
    return holo_eval_numpy(coef, z)


@njit
def _channel_sums_jit(coef, z, omt, w, k, powers, grad_q, want_entropy):
    npow = powers.shape[0]
    out = np.zeros(npow + 2)
    deg = coef.shape[0] - 1
    for i in range(z.shape[0]):
        zi = z[i]
        p = coef[deg]
        dp = 0.0 + 0.0j
        for m in range(deg - 1, -1, -1):
            dp = dp * zi + p
            p = p * zi + coef[m]
        a2 = p.real * p.real + p.imag * p.imag
        wi = w[i]
        lom = math.log(omt[i])
        if a2 > 0.0:
            la = math.log(a2)
            for j in range(npow):
                pj = powers[j]
                out[j] += wi * math.exp((k * pj - 2.0) * lom + 0.5 * pj * la)
            if want_entropy:
                out[npow + 1] += wi * math.exp((2.0 * k - 2.0) * lom + la) * (
                    2.0 * k * lom + la)
        if grad_q > 0.0:
            g = 0.5 * grad_q * omt[i] * dp - k * grad_q * zi.conjugate() * p
            g2 = g.real * g.real + g.imag * g.imag
            if grad_q == 2.0:
                out[npow] += wi * math.exp((2.0 * k - 2.0) * lom) * g2
            elif a2 > 0.0:
                out[npow] += wi * math.exp((k * grad_q - 2.0) * lom
                                           + (0.5 * grad_q - 1.0) * la) * g2
    return out


def channel_sums_numpy(coef, z, omt, w, k, powers, grad_q, want_entropy):
    """Vectorized twin of the compiled fused-sum kernel.

    Returns ``[S_p for p in powers] + [S_grad, S_ent]`` where, with
    ``Phi`` the holomorphic part and ``s = 1 - |z|^2``,

    * ``S_p    = sum w s^(kp-2) |Phi|^p``
    * ``S_grad = sum w s^(kq-2) |Phi|^(q-2) |(q/2) s Phi' - kq conj(z) Phi|^2``
    * ``S_ent  = sum w s^(2k-2) |Phi|^2 (2k ln s + ln |Phi|^2)``

    Terms with ``Phi = 0`` contribute their continuous limit (zero).
    """
    phi, dphi = holo_eval_numpy(coef, z)
    a2 = phi.real ** 2 + phi.imag ** 2
    pos = a2 > 0.0
    safe = np.where(pos, a2, 1.0)
    out = np.zeros(len(powers) + 2)
    for j, pj in enumerate(powers):
        term = w * omt ** (k * pj - 2.0) * safe ** (0.5 * pj)
        out[j] = np.sum(np.where(pos, term, 0.0))
    if grad_q > 0.0:
        g = 0.5 * grad_q * omt * dphi - k * grad_q * np.conj(z) * phi
        g2 = g.real ** 2 + g.imag ** 2
        if grad_q == 2.0:
            fac = np.ones_like(a2)
        else:
            fac = np.where(pos, safe ** (0.5 * grad_q - 1.0), 0.0)
        out[-2] = np.sum(w * omt ** (k * grad_q - 2.0) * fac * g2)
    if want_entropy:
        term = w * omt ** (2.0 * k - 2.0) * safe * (2.0 * k * np.log(omt) + np.log(safe))
        out[-1] = np.sum(np.where(pos, term, 0.0))
    return out


def channel_sums(coef, z, omt, w, k, powers, grad_q=0.0, want_entropy=False):
    """Fused weighted sums over a node set (see ``channel_sums_numpy``)."""
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    powers = np.ascontiguousarray(powers, dtype=np.float64)
    if HAVE_NUMBA:
        return _channel_sums_jit(coef, z, omt, w, float(k), powers,
                                 float(grad_q), bool(want_entropy))
    return channel_sums_numpy(coef, z, omt, w, float(k), powers,
                              float(grad_q), bool(want_entropy))


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) for the augmented radial ODE
# ---------------------------------------------------------------------------

DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
], dtype=np.float64)
DP_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# fifth-order minus embedded fourth-order weights
DP_E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200,
                 -22 / 525, 1 / 40])
# dense output: y(t + s h) = y + h * K.T @ (P @ [s, s^2, s^3, s^4])
DP_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
], dtype=np.float64)

STATUS_TAU_MAX = 0
STATUS_CROSSED = 1
STATUS_POSITIVE = 2
STATUS_UNDERFLOW = 3
STATUS_MAX_STEPS = 4


@njit
def _aug_rhs(tau, y, a, b, e, tail, lam, out):
    coth = 1.0 / math.tanh(tau)
    u = y[0]
    au = abs(u) ** e
    fp = a * (1.0 + e) * au - b
    if tail:
        out[0] = -lam * y[0]
        out[1] = -lam * y[1]
    else:
        out[0] = y[1]
        out[1] = -coth * y[1] - (a * au * u - b * u)
    out[2] = y[3]
    out[3] = -coth * y[3] - fp * y[2]


@njit
def _shoot_kernel(alpha, a, b, e, tau0, y0, tau_max, rtol, atol, max_step,
                  floor_u, slope_k, xi0, lam, stop_on_positive, max_steps,
                  C, A, B, E):
    cap = 1024
    ts = np.empty(cap)
    ys = np.empty((cap, 4))
    ks = np.empty((cap, 7, 4))
    ts[0] = tau0
    ys[0, :] = y0
    n = 1
    status = STATUS_TAU_MAX
    first_pos = -1
    tail_idx = -1
    tail = False
    t = tau0
    y = y0.copy()
    K = np.empty((7, 4))
    ytmp = np.empty(4)
    fbuf = np.empty(4)
    _aug_rhs(t, y, a, b, e, tail, lam, fbuf)
    K[0, :] = fbuf
    h = min(max_step, 1e-3)
    steps = 0
    while t < tau_max:
        if steps >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if h < 1e-14 * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
        if t + h > tau_max:
            h = tau_max - t
        for s in range(1, 7):
            for c in range(4):
                acc = 0.0
                for j in range(s):
                    acc += A[s, j] * K[j, c]
                ytmp[c] = y[c] + h * acc
            _aug_rhs(t + C[s] * h, ytmp, a, b, e, tail, lam, fbuf)
            K[s, :] = fbuf
        # ytmp now holds the fifth-order solution (FSAL row)
        err2 = 0.0
        for c in range(4):
            ec = 0.0
            for j in range(7):
                ec += E[j] * K[j, c]
            sc = atol + rtol * max(abs(y[c]), abs(ytmp[c]))
            err2 += (h * ec / sc) ** 2
        err = math.sqrt(err2 / 4.0)
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue
        steps += 1
        t_new = t + h
        if n >= cap:
            cap2 = cap * 2
            ts2 = np.empty(cap2)
            ys2 = np.empty((cap2, 4))
            ks2 = np.empty((cap2, 7, 4))
            ts2[:cap] = ts
            ys2[:cap] = ys
            ks2[:cap] = ks
            ts, ys, ks, cap = ts2, ys2, ks2, cap2
        ks[n - 1] = K
        ts[n] = t_new
        ys[n, :] = ytmp
        n += 1
        t = t_new
        y[:] = ytmp
        K[0, :] = K[6, :]
        if err == 0.0:
            h = min(max_step, h * 10.0)
        else:
            h = min(max_step, h * min(10.0, 0.9 * err ** -0.2))
        u = y[0]
        up = y[1]
        if u <= 0.0:
            status = STATUS_CROSSED
            break
        if not tail:
            energy = 0.5 * up * up + a * u ** (2.0 + e) / (2.0 + e) - 0.5 * b * u * u
            if first_pos < 0 and (energy < 0.0 or (up >= 0.0 and u < xi0)):
                first_pos = n - 1
                if stop_on_positive:
                    status = STATUS_POSITIVE
                    break
            if first_pos < 0 and u < floor_u and -up <= slope_k * u:
                tail = True
                tail_idx = n - 1
                _aug_rhs(t, y, a, b, e, tail, lam, fbuf)
                K[0, :] = fbuf
    return ts[:n].copy(), ys[:n].copy(), ks[:max(n - 1, 0)].copy(), status, first_pos, tail_idx


def shoot_kernel(alpha, a, b, e, tau0, y0, tau_max, rtol, atol, max_step,
                 floor_u, slope_k, xi0, lam, stop_on_positive=True,
                 max_steps=200000, use_jit=None):
    """Integrate the augmented system ``(u, u', w, w')`` from ``tau0``.

    Returns ``(taus, states, stages, status, first_positive, tail_index)``.
    ``stages[i]`` holds the seven stage derivatives of step ``i`` for dense
    output. ``status`` is one of the ``STATUS_*`` codes. After the
    decay floor is reached the ``u`` components follow the linearized
    exponential tail and only ``w`` is integrated honestly.
    """
    use_jit = HAVE_NUMBA if use_jit is None else use_jit
    fn = _shoot_kernel if use_jit else _shoot_kernel.py_func
    return fn(float(alpha), float(a), float(b), float(e), float(tau0),
              np.asarray(y0, dtype=np.float64), float(tau_max), float(rtol),
              float(atol), float(max_step), float(floor_u), float(slope_k),
              float(xi0), float(lam), bool(stop_on_positive), int(max_steps),
              DP_C, DP_A, DP_B, DP_E)


def dense_eval(t0: float, h: float, y0: np.ndarray, stages: np.ndarray, s):
    """Evaluate the continuous extension inside one step at ``t0 + s h``."""
    s = np.asarray(s, dtype=np.float64)
    powers = np.stack([s, s ** 2, s ** 3, s ** 4], axis=-1)
    coeff = powers @ DP_P.T  # (..., 7)
    return y0 + h * (coeff @ stages)
