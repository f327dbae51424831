"""Compiled kernels against their numpy / pure-Python twins."""

import numpy as np
import pytest
from scipy.integrate._ivp.rk import RK45

from hyperwehrl import kernels, ode_lab
from hyperwehrl.hyp_geom import DEFAULT_SPEC, disk_nodes
from hyperwehrl.su11_states import random_state

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba disabled")


def test_dormand_prince_tableau_matches_scipy():
    # the seventh (FSAL) stage is stored here as well; scipy keeps six
    assert np.allclose(kernels.DP_C[:6], RK45.C, rtol=0, atol=1e-16)
    assert np.allclose(kernels.DP_A[:6, :5], RK45.A, rtol=0, atol=1e-16)
    assert np.all(kernels.DP_A[:6, 5] == 0.0)
    assert np.allclose(kernels.DP_B[:6], RK45.B, rtol=0, atol=1e-16)
    assert np.allclose(kernels.DP_E, RK45.E, rtol=0, atol=1e-16)
    assert np.allclose(kernels.DP_P, RK45.P, rtol=0, atol=1e-16)


def test_tableau_consistency():
    # row sums of A equal C, weights sum to one
    assert np.allclose(kernels.DP_A.sum(axis=1), kernels.DP_C[:kernels.DP_A.shape[0]])
    assert kernels.DP_B.sum() == pytest.approx(1.0, abs=1e-15)


@needs_numba
def test_holo_eval_jit_matches_numpy():
    rng = np.random.default_rng(0)
    coef = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    z = 0.9 * np.sqrt(rng.uniform(size=500)) * np.exp(2j * np.pi * rng.uniform(size=500))
    a, da = kernels._holo_eval_jit(coef, z)
    b, db = kernels.holo_eval_numpy(coef, z)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-14)
    assert np.allclose(da, db, rtol=1e-13, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("grad_q,entropy", [(0.0, False), (3.0, True), (2.0, True)])
def test_channel_sums_jit_matches_numpy(grad_q, entropy):
    psi = random_state(8, 2.0, 4)
    coef = psi.holo_coeffs()
    z, omt, w = next(disk_nodes(DEFAULT_SPEC, 0, psi.zeros()))
    powers = np.array([2.0, 3.0, 3.5])
    a = kernels._channel_sums_jit(coef, z, omt, w, 2.0, powers, grad_q, entropy)
    b = kernels.channel_sums_numpy(coef, z, omt, w, 2.0, powers, grad_q, entropy)
    assert np.allclose(a, b, rtol=1e-12, atol=0)


@needs_numba
def test_shoot_kernel_jit_matches_python():
    P = ode_lab.OdeParams.paper_literal(3.0, 1.0)
    cp = ode_lab.critical_points(P)
    lam = P.decay_rate()
    y0 = ode_lab.series_start(4.0, P)
    args = (4.0, P.a_tilde, P.b_tilde, P.e, ode_lab.TAU0, y0, 40.0, 1e-10, 1e-12, 0.05,
            1e-9, 2 * lam, cp.xi0, lam, True)
    ta, ya, _, sa, _, _ = kernels.shoot_kernel(*args, use_jit=True)
    tb, yb, _, sb, _, _ = kernels.shoot_kernel(*args, use_jit=False)
    assert sa == sb == kernels.STATUS_CROSSED
    assert ta.shape == tb.shape
    assert np.allclose(ta, tb, rtol=1e-12, atol=1e-13)
    assert np.allclose(ya, yb, rtol=1e-10, atol=1e-12)


def test_dense_output_reproduces_step_ends():
    P = ode_lab.OdeParams.extremizer_consistent(3.0, gamma=3.0)
    tr = ode_lab.shoot(1.2, P)
    for i in (0, 5, 20):
        h = tr.taus[i + 1] - tr.taus[i]
        end = kernels.dense_eval(tr.taus[i], h, tr.states[i], tr.stages[i], 1.0)
        assert np.allclose(end, tr.states[i + 1], rtol=1e-9, atol=1e-12)
