import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperwehrl import ode_lab as O
from hyperwehrl.errors import DomainError, ParameterError, PropertyViolation

import oracles


@pytest.fixture(scope="module")
def ec3():
    return O.OdeParams.extremizer_consistent(3.0, gamma=3.0)


@pytest.fixture(scope="module")
def ground3(ec3):
    gs = O.bisect_ground_state(ec3, tol_alpha=1e-10)
    return gs, O.shoot_near_ground(gs.alpha, ec3)


@pytest.fixture(scope="module")
def pl3():
    return O.OdeParams.paper_literal(3.0, 1.0)


# ---- parameters and critical points ----

def test_presets():
    p = O.OdeParams.paper_literal(3.0, 2.0)
    assert (p.b_tilde, p.a_tilde) == (3.0, 6.0)
    q = O.OdeParams.extremizer_consistent(3.0, gamma=2.0)
    assert (q.b_tilde, q.a_tilde) == (0.75, 1.5)
    r = O.OdeParams.extremizer_consistent(4.0, alpha_star=4.0)
    assert r.gamma == pytest.approx(2.0 * 4.0 ** -0.5, rel=1e-15)
    assert O.OdeParams.from_preset("extremizer-consistent", 3.0, 3.0) == O.OdeParams(
        2.25, 0.75, 3.0, "extremizer_consistent", 3.0)
    assert q.exponent == pytest.approx(1 + 2 / 3, abs=1e-12)


def test_param_validation():
    with pytest.raises(ParameterError):
        O.OdeParams(1.0, 1.0, 2.0)
    with pytest.raises(ParameterError):
        O.OdeParams(-1.0, 1.0, 3.0)
    with pytest.raises(ParameterError):
        O.OdeParams.from_preset("other", 3.0, 1.0)
    with pytest.raises(ParameterError):
        O.OdeParams.extremizer_consistent(3.0)


def test_critical_point_examples():
    assert O.critical_points(O.OdeParams(2.0, 2.0, 3.0)).xi1 == pytest.approx(1.0, rel=1e-15)
    cp = O.critical_points(O.OdeParams(0.75, 0.75, 3.0))
    assert cp.xi0 == pytest.approx((4 / 3) ** 1.5, rel=1e-14)
    assert cp.xi0 == pytest.approx(1.5396, abs=1e-4)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(2.1, 12))
def test_critical_points_ordered_with_zero_residuals(a, b, n):
    p = O.OdeParams(a, b, n)
    cp = O.critical_points(p)
    assert cp.xi2 < cp.xi1 < cp.xi0
    assert all(abs(v) < 1e-12 for v in cp.residuals.values())


def test_exact_residual_and_factor_four_probe():
    ec = O.OdeParams.extremizer_consistent(3.0, gamma=3.0)
    assert O.exact_solution_residual(ec, 1.0) < 1e-9
    pl = O.OdeParams.paper_literal(3.0, 3.0)
    assert O.exact_solution_residual(pl, 1.0) > 0.1


@pytest.mark.parametrize("kq", [3.0, 4.0, 6.0])
def test_exact_residual_other_amplitudes(kq):
    for a in (0.5, 4.0):
        p = O.OdeParams.extremizer_consistent(kq, alpha_star=a)
        assert O.exact_solution_residual(p, a) < 1e-9 * max(1.0, a)


# ---- shooting ----

def test_shoot_matches_solve_ivp(ec3):
    tr = O.shoot(1.5, ec3)
    ref = oracles.ode_reference(1.5, ec3.a_tilde, ec3.b_tilde, 3.0, 40.0)
    assert tr.classification == "N"
    assert tr.b_alpha == pytest.approx(float(ref.t_events[0][0]), abs=1e-8)
    tt = np.linspace(0.5, 0.95 * tr.b_alpha, 25)
    assert np.allclose(tr.sample(tt), ref.sol(tt).T, rtol=0, atol=1e-8)


def test_shoot_exact_ground_state(ec3):
    tr = O.shoot(1.0, ec3, tau_max=40.0)
    assert tr.classification == "U"
    tt = np.linspace(0.0, 10.0, 1001)
    assert np.max(np.abs(tr.sample(tt)[:, 0] - O.exact_profile(ec3, 1.0, tt)[0])) < 1e-5


def test_classification_examples(ec3, ground3):
    gs, _ = ground3
    assert O.classify(O.critical_points(ec3).xi0, ec3) == "P"
    assert O.classify(2 * gs.alpha, ec3) == "N"


def test_shoot_domain(ec3):
    with pytest.raises(DomainError):
        O.shoot(0.0, ec3)


@pytest.mark.parametrize("alpha", [0.3, 0.8, 1.0, 1.3, 3.0])
def test_energy_non_increasing(ec3, alpha):
    assert O.energy_monotone(O.shoot(alpha, ec3))[0]


@pytest.mark.parametrize("alpha", [1.2, 1.5, 3.0])
def test_n_trajectories_decrease_to_zero(ec3, alpha):
    tr = O.shoot(alpha, ec3)
    assert tr.classification == "N"
    assert abs(tr.sample(tr.b_alpha)[0]) < 1e-10
    assert np.all(tr.u_prime[tr.interior()][1:] < 0)


@pytest.mark.parametrize("alpha", [0.5, 0.9, 0.99])
def test_p_classification_sound(ec3, alpha):
    tr = O.shoot(alpha, ec3, tau_max=40.0)
    assert tr.classification == "P"
    longer = O.shoot(alpha, ec3, tau_max=80.0, stop_on_positive=False)
    assert longer.classification != "N"


@pytest.mark.parametrize("alpha", [1.2, 2.0])
def test_b_alpha_stable_under_tighter_tolerance(ec3, alpha):
    a = O.shoot(alpha, ec3, tol=1e-10).b_alpha
    b = O.shoot(alpha, ec3, tol=1e-12, atol=1e-14).b_alpha
    assert abs(a - b) < 1e-8


def test_shoot_deterministic(ec3):
    a, b = O.shoot(1.7, ec3), O.shoot(1.7, ec3)
    assert np.array_equal(a.states, b.states) and a.b_alpha == b.b_alpha


def test_trajectory_csv(ec3, tmp_path):
    tr = O.shoot(1.5, ec3)
    path = tmp_path / "t.csv"
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "tau,u,u_prime,w,w_prime,E,theta"
    assert len(lines) == tr.taus.size + 1
    assert tr.summary()["classification"] == "N"


# ---- ground state ----

def test_ground_state_kq3(ground3):
    gs, _ = ground3
    assert abs(gs.alpha - 1.0) < 1e-4


def test_ground_state_kq4_target():
    p = O.OdeParams.extremizer_consistent(4.0, alpha_star=4.0)
    assert O.bisect_ground_state(p).alpha == pytest.approx(4.0, rel=1e-4)


def test_ground_state_paper_literal_deterministic(pl3):
    a = O.bisect_ground_state(pl3, tol_alpha=1e-10).alpha
    b = O.bisect_ground_state(pl3, tol_alpha=1e-10).alpha
    assert a == b
    assert a == pytest.approx(3.165710748839897, abs=1e-8)


def test_near_ground_rejects_p(ec3):
    with pytest.raises(DomainError):
        O.shoot_near_ground(0.5, ec3)


# ---- auxiliary functions ----

def test_theta_exact_ground_state(ground3):
    _, tr = ground3
    th = tr.sample(1.0)
    theta1 = -math.sinh(1.0) * th[1] / th[0]
    assert theta1 == pytest.approx(1.5 * math.sinh(1.0) * math.tanh(0.5), abs=1e-6)
    assert theta1 == pytest.approx(0.8147, abs=1e-4)
    vals = O.theta_profile(tr)
    fin = vals[np.isfinite(vals)]
    assert np.all(fin >= 0)
    assert O.theta_monotone(tr)[0]
    assert abs(vals[0]) < 1e-6


def test_capital_phi_beta_zero_single_change_at_tau1(ground3, ec3):
    _, tr = ground3
    ch = O.count_sign_changes(tr, O.capital_phi(tr, 0.0))
    assert ch.size == 1
    tau1 = O.xi_crossing(tr, O.critical_points(ec3).xi1)
    assert abs(tr.taus[ch[0]] - tau1) <= tr.taus[ch[0] + 1] - tr.taus[ch[0]]


def test_sigma_structure(ground3, ec3):
    _, tr = ground3
    bb = O.beta_bar(tr)
    assert bb == pytest.approx(2.0, rel=1e-6)
    tau1 = O.xi_crossing(tr, O.critical_points(ec3).xi1)
    assert O.sigma_of_beta(tr, 1e-6 * bb) == pytest.approx(tau1, abs=1e-4)
    assert O.capital_phi(tr, 0.5 * bb)[0] < 0
    sig = [O.sigma_of_beta(tr, b) for b in np.linspace(0.05, 0.95, 10) * bb]
    assert np.all(np.diff(sig) < 0) and sig[0] < tau1
    with pytest.raises(DomainError):
        O.sigma_of_beta(tr, bb)


def test_sigma_limit_at_beta_bar(ground3):
    # on the exact kq=3 ground state Phi's numerator is 1.5c^2 - 7.5c + 3 beta, c = cosh(tau)
    _, tr = ground3
    assert O.sigma_of_beta(tr, 2.0 * (1 - 1e-7)) == pytest.approx(math.acosh(4.0), abs=1e-4)


def test_rho_exact_ground_state(ground3):
    _, tr = ground3
    assert O.v_beta_and_rho(tr, 0.0)[1] == 0.0
    rhos = []
    for b in (0.2, 0.8, 1.5):
        rho = O.v_beta_and_rho(tr, b)[1]
        assert 3 * math.sinh(rho / 2) ** 2 == pytest.approx(b, rel=1e-6)
        rhos.append(rho)
    assert np.all(np.diff(rhos) > 0)


def test_beta0_endpoint_signs(ground3):
    _, tr = ground3
    bb = O.beta_bar(tr)
    lo = 1e-3 * bb
    assert O.v_beta_and_rho(tr, lo)[1] - O.sigma_of_beta(tr, lo) < 0
    # the far end has rho(beta_bar) = 2 asinh(sqrt(2/3)) < acosh(4)
    hi = (1 - 1e-3) * bb
    assert O.v_beta_and_rho(tr, hi)[1] - O.sigma_of_beta(tr, hi) < 0


@pytest.mark.xfail(strict=True, raises=PropertyViolation,
                   reason="rho < sigma on all of (0, beta_bar) for the exact kq=3 ground state")
def test_beta0_exists_extremizer_consistent(ground3):
    _, tr = ground3
    assert O.find_beta0(tr, tol=1e-10).gap < 1e-6


def test_beta0_paper_literal(pl3):
    gs = O.bisect_ground_state(pl3)
    tr = O.shoot_near_ground(gs.alpha, pl3)
    r1 = O.find_beta0(tr, tol=1e-10)
    r2 = O.find_beta0(tr, tol=1e-10)
    assert r1.gap < 1e-6 and 0 < r1.beta0 < r1.beta_bar
    assert r1.beta0 == r2.beta0


# ---- admissibility ----

def test_admissibility_examples(ground3, ec3):
    gs, _ = ground3
    near = O.admissibility_report(1.05 * gs.alpha, ec3)
    assert near["classification"] == "N" and near["sign_changes"] == 1
    assert near["w_at_b"] < 0 and near["ok"]
    at = O.admissibility_report(gs.alpha, ec3)
    assert at["checks"]["unbounded_growth"] and at["ok"]
    far = O.admissibility_report(1.5 * gs.alpha, ec3)
    assert far["b_alpha"] < near["b_alpha"]


def test_admissibility_raises_with_dump(ec3):
    # alpha in P: the near-ground retry fails for every floor
    with pytest.raises(DomainError):
        O.admissibility_report(0.5, ec3)
