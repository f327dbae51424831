import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperwehrl import functionals as F
from hyperwehrl.errors import DomainError
from hyperwehrl.su11_states import basis_state, coherent_coeffs, random_state

import oracles

KS = (1.0, 1.5, 2.0, 5.0)
CENTERS = (0.0, 0.5, 0.3 + 0.4j)

# dblquad over the disk with mpmath-evaluated power sums (tests/oracles.py);
# (seed, k) -> (Wehrl entropy, int |L psi|^3 dnu) for random_state(8, k, seed)
FROZEN_RANDOM = {
    (0, 1.0): (2.4119351798901945, 0.4112175095277393),
    (1, 1.5): (2.39363494297954, 0.363091652876716),
    (2, 2.0): (2.1866130742729677, 0.3954444352357142),
}


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("p", [2.0, 3.0, 4.5])
def test_coherent_lp_beta_integral(k, p):
    assert F.lp_norm_q(coherent_coeffs(0.0, k), p) == pytest.approx(
        oracles.coherent_lp(k, p), rel=1e-10)


def test_coherent_l3_at_k1_is_half():
    assert F.lp_norm_q(coherent_coeffs(0.0, 1.0), 3.0) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("m,k,p", [(1, 1.0, 3.0), (3, 1.5, 2.5), (5, 2.0, 4.0)])
def test_basis_lp_closed_form(m, k, p):
    assert F.lp_norm_q(basis_state(m, k), p) == pytest.approx(oracles.basis_lp(m, k, p),
                                                              rel=1e-10)


@given(st.integers(0, 10 ** 6), st.sampled_from(KS))
@settings(max_examples=15)
def test_isometry_random_states(seed, k):
    assert F.lp_norm_q(random_state(8, k, seed), 2.0) == pytest.approx(1.0, abs=1e-8)


def test_lp_domain():
    with pytest.raises(DomainError):
        F.lp_norm_q(coherent_coeffs(0.0, 1.0), 1.0)


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("center", CENTERS)
def test_coherent_wehrl(k, center):
    assert F.wehrl_entropy(coherent_coeffs(center, k)) == pytest.approx(
        2 * k / (2 * k - 1), abs=1e-8)


@pytest.mark.parametrize("m,k", [(1, 1.0), (3, 2.0), (2, 1.5)])
def test_basis_wehrl_against_oracle(m, k):
    s = F.wehrl_entropy(basis_state(m, k))
    assert s == pytest.approx(oracles.basis_wehrl(m, k), abs=1e-9)


def test_e1_entropy_above_bound():
    s = F.wehrl_entropy(basis_state(1, 1.0))
    assert s >= 2 * math.log(2)
    assert s == pytest.approx(2.8068528194400546, abs=1e-10)


@pytest.mark.parametrize("seed,k", sorted(FROZEN_RANDOM))
def test_random_state_frozen_values(seed, k):
    psi = random_state(8, k, seed)
    s_ref, l3_ref = FROZEN_RANDOM[(seed, k)]
    assert F.wehrl_entropy(psi) == pytest.approx(s_ref, abs=1e-9)
    assert F.lp_norm_q(psi, 3.0) == pytest.approx(l3_ref, rel=1e-9)


@given(st.integers(0, 10 ** 6), st.sampled_from((1.0, 1.5, 2.0)))
@settings(max_examples=15)
def test_wehrl_nonnegative_and_report_consistent(seed, k):
    psi = random_state(8, k, seed)
    rep = F.entropy_report(psi, orders=(1.5, 2.0))
    assert rep.wehrl >= 0
    assert rep.l2_norm_sq == pytest.approx(1.0, abs=1e-8)
    assert rep.wehrl == pytest.approx(F.wehrl_entropy(psi), rel=1e-12)
    assert rep.renyi[2.0] == pytest.approx(F.renyi_entropy(psi, 2.0), rel=1e-12)


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("r", [1.5, 2.0, 3.0])
def test_coherent_renyi(k, r):
    expected = math.log((2 * k - 1) / (2 * k * r - 1)) / (1 - r)
    assert F.renyi_entropy(coherent_coeffs(0.0, k), r) == pytest.approx(expected, rel=1e-10)


def test_coherent_renyi_example():
    assert F.renyi_entropy(coherent_coeffs(0.0, 1.0), 1.5) == pytest.approx(2 * math.log(2),
                                                                           rel=1e-12)


@pytest.mark.parametrize("seed,k", [(0, 1.0), (4, 1.5), (9, 2.0)])
def test_renyi_at_conjugate_order_dominates_coherent(seed, k):
    r = 1 + 1 / (2 * k)
    coh = F.renyi_entropy(coherent_coeffs(0.0, k), r)
    assert F.renyi_entropy(random_state(8, k, seed), r) >= coh - 1e-12


def test_renyi_domain():
    with pytest.raises(DomainError):
        F.renyi_entropy(coherent_coeffs(0.0, 1.0), 1.0)
    with pytest.raises(DomainError):
        F.renyi_entropy(coherent_coeffs(0.0, 1.0), 0.5)


@pytest.mark.parametrize("seed,k", [(0, 1.0), (5, 2.0)])
def test_renyi_tends_to_wehrl(seed, k):
    psi = random_state(8, k, seed)
    rs = np.array([1.1, 1.05, 1.025])
    vals = np.array([F.renyi_entropy(psi, r) for r in rs])
    # quadratic extrapolation in (r - 1) to r = 1
    limit = np.polyval(np.polyfit(rs - 1, vals, 2), 0.0)
    assert abs(limit - F.wehrl_entropy(psi)) < 1e-3


@given(st.integers(0, 10 ** 6), st.sampled_from((1.0, 1.5, 2.0)))
@settings(max_examples=10)
def test_log_norm_convex_in_p(seed, k):
    psi = random_state(8, k, seed)
    ps = np.linspace(2.0, 4.0, 9)
    logs = np.log(F.lp_norms(psi, ps))
    assert np.all(np.diff(logs, 2) >= -1e-9)


@pytest.mark.parametrize("seed", [0, 3, 8])
def test_fisher_q2_value(seed):
    rep = F.fisher_integral(random_state(8, 1.5, seed), 2.0)
    assert rep.gradient_integral == pytest.approx(0.75, abs=1e-8)


def test_fisher_coherent_q3():
    rep = F.fisher_integral(coherent_coeffs(0.0, 1.0), 3.0)
    assert rep.gradient_integral == pytest.approx(3 / 8, abs=1e-10)
    assert rep.q_norm_integral == pytest.approx(0.5, abs=1e-12)


def test_fisher_basis_state_against_oracle():
    rep = F.fisher_integral(basis_state(1, 2.0), 2.0)
    assert rep.rel_residual < 1e-8
    rep3 = F.fisher_integral(basis_state(1, 2.0), 3.0)
    assert rep3.gradient_integral == pytest.approx(oracles.basis_gradient_integral(1, 2.0, 3.0),
                                                   rel=1e-10)
    assert rep3.gradient_integral == pytest.approx(0.6137862137862138, rel=1e-10)


@given(st.integers(0, 10 ** 6), st.sampled_from((1.5, 2.0)), st.sampled_from((2.0, 2.5, 3.0)))
@settings(max_examples=20)
def test_fisher_identity_property(seed, k, q):
    assert F.fisher_integral(random_state(8, k, seed), q).rel_residual < 1e-7


def test_fisher_domain():
    with pytest.raises(DomainError):
        F.fisher_integral(coherent_coeffs(0.0, 1.0), 2.0)


def test_gradient_forms_agree_off_zeros():
    psi = random_state(8, 2.0, 3)
    z = np.array([0.1 + 0.2j, -0.5j, 0.7, -0.3 - 0.3j])
    assert np.allclose(F.grad_u_sq(psi, 3.0, z), F.grad_u_sq_logform(psi, 3.0, z),
                       rtol=1e-10, atol=0)


def test_gradient_fd_examples():
    assert F.gradient_fd_check(coherent_coeffs(0.0, 1.5), 2.0, 0.3) < 1e-6
    assert F.gradient_fd_check(random_state(8, 1.5, 7), 3.0, 0.2 + 0.1j) < 1e-6


def test_gradient_fd_skip_at_zero():
    # e_1 has Phi(0) = 0
    assert F.gradient_fd_check(basis_state(1, 2.0), 3.0, 0.0) is None


@given(st.floats(0.05, 0.9), st.floats(0, 2 * math.pi))
def test_gradient_rotation_covariance_radial_state(r, phi):
    psi = basis_state(2, 2.0)
    a = F.grad_u_sq(psi, 3.0, np.array([r]))[0]
    b = F.grad_u_sq(psi, 3.0, np.array([r * complex(math.cos(phi), math.sin(phi))]))[0]
    assert b == pytest.approx(a, rel=1e-11)


def test_reports_serialize():
    rep = F.entropy_report(coherent_coeffs(0.0, 1.0), orders=(2.0,))
    d = rep.to_dict()
    assert d["renyi"]["2.0"] == pytest.approx(rep.renyi[2.0]) and d["k"] == 1.0
    assert "spec" in F.fisher_integral(coherent_coeffs(0.0, 1.0), 3.0).to_dict()
