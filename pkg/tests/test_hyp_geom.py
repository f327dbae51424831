import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

from hyperwehrl.errors import AccuracyError, DomainError, ParameterError
from hyperwehrl.hyp_geom import (DEFAULT_SPEC, DiskPoint, HyperbolicPoint, QuadratureSpec,
                                 disk_integral_mu, disk_integral_nu, disk_to_halfplane,
                                 disk_to_hyperbolic, disk_to_hyperbolic_array,
                                 gauss_legendre, graded_radial_rule, halfplane_integral_mu,
                                 halfplane_to_disk, hyperbolic_distance,
                                 hyperbolic_to_disk, hyperbolic_to_disk_array, mu_to_nu,
                                 nu_density, radial_integral_nu, refine)
from hyperwehrl.su11_states import coherent_kernel

import oracles

radius = st.floats(0.0, 0.999, allow_nan=False)
angle = st.floats(0.0, 2 * math.pi, allow_nan=False, exclude_max=True)


# coordinates -------------------------------------------------------------

def test_origin_maps_to_origin():
    h = disk_to_hyperbolic(DiskPoint(0.0, 0.0))
    assert (h.tau, h.phi) == (0.0, 0.0)


def test_tanh_half_maps_to_unit_tau():
    h = disk_to_hyperbolic(DiskPoint(math.tanh(0.5), 0.0))
    assert h.tau == pytest.approx(1.0, abs=1e-15)
    assert h.phi == 0.0


def test_imaginary_point():
    h = disk_to_hyperbolic(DiskPoint(0.0, 0.6))
    assert h.tau == pytest.approx(2 * math.atanh(0.6), rel=1e-15)
    assert h.tau == pytest.approx(1.3862943611, abs=1e-10)
    assert h.phi == pytest.approx(math.pi / 2, abs=1e-15)


def test_angle_normalized_to_unit_circle_range():
    h = disk_to_hyperbolic(DiskPoint(0.1, -1e-18))
    assert 0.0 <= h.phi < 2 * math.pi


def test_outside_disk_rejected():
    with pytest.raises(DomainError):
        DiskPoint(0.8, 0.6)
    with pytest.raises(DomainError):
        disk_to_hyperbolic_array(np.array([1.0 + 0j]))


def test_round_trip_10k_points():
    rng = np.random.default_rng(1)
    z = 0.999 * np.sqrt(rng.uniform(size=10_000)) * np.exp(2j * np.pi * rng.uniform(size=10_000))
    tau, phi = disk_to_hyperbolic_array(z)
    assert np.max(np.abs(hyperbolic_to_disk_array(tau, phi) - z)) < 1e-12


@given(radius, angle)
def test_round_trip_property(r, phi):
    p = DiskPoint(r * math.cos(phi), r * math.sin(phi))
    q = hyperbolic_to_disk(disk_to_hyperbolic(p))
    assert abs(q.z - p.z) < 1e-12


@given(radius, angle, radius, angle, angle)
def test_distance_rotation_invariant(r1, a1, r2, a2, rot):
    z1, z2 = r1 * np.exp(1j * a1), r2 * np.exp(1j * a2)
    u = np.exp(1j * rot)
    assert hyperbolic_distance(u * z1, u * z2) == pytest.approx(
        hyperbolic_distance(z1, z2), rel=1e-9, abs=1e-12)


def test_distance_from_origin_is_tau():
    assert hyperbolic_distance(0.0, 0.6j) == pytest.approx(2 * math.atanh(0.6), rel=1e-14)


def test_cayley_round_trip():
    t, y = np.array([0.3, -2.0, 0.0]), np.array([0.5, 3.0, 1.0])
    z = halfplane_to_disk(t, y)
    assert abs(z[2]) < 1e-15  # i -> 0
    t2, y2 = disk_to_halfplane(z)
    assert np.allclose(t2, t) and np.allclose(y2, y)


def test_hyperbolic_point_validation():
    with pytest.raises(DomainError):
        HyperbolicPoint(-1.0, 0.0)


# measures ----------------------------------------------------------------

@pytest.mark.parametrize("t,k,expected", [(0.0, 1.0, 1 / math.pi), (0.5, 1.0, 4 / math.pi),
                                          (0.0, 1.5, 2 / math.pi)])
def test_nu_density_values(t, k, expected):
    assert nu_density(t, k) == pytest.approx(expected, rel=1e-15)


def test_nu_density_errors():
    with pytest.raises(DomainError):
        nu_density(1.0, 1.0)
    with pytest.raises(ParameterError):
        nu_density(0.1, 0.5)


def test_mu_to_nu_factor():
    assert mu_to_nu(1.5) == pytest.approx(2 / (4 * math.pi))


# quadrature --------------------------------------------------------------

def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(radial_nodes=8)
    with pytest.raises(ParameterError):
        QuadratureSpec(angular_nodes=4)
    with pytest.raises(ParameterError):
        QuadratureSpec(rel_tol=0.0)
    assert DEFAULT_SPEC.counts(2) == (1024, 1024)


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(10, 0.0, 2.0)
    assert np.dot(w, x ** 19) == pytest.approx(2 ** 20 / 20, rel=1e-14)


@pytest.mark.parametrize("g,k,expected", [
    (lambda t: (1 - t) ** 2, 1.0, 1.0),
    (lambda t: (1 - t) ** 3, 1.0, 0.5),
    (lambda t: (1 - t) ** 4, 2.0, 1.0),
])
def test_radial_integral_examples(g, k, expected):
    assert radial_integral_nu(g, k) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("m", [0, 3, 10, 40])
def test_radial_integral_beta_exactness(m):
    # (2k-1) int t^m (1-t)^{2k-2} (1-t)^2 ... here k=2, integrand t^m (1-t)^4
    val = radial_integral_nu(lambda t: t ** m * (1 - t) ** 4, 2.0)
    assert val == pytest.approx(3.0 * beta_fn(m + 1, 3), rel=1e-12)


def test_radial_integral_rejects_bare_weight():
    with pytest.raises(DomainError):
        radial_integral_nu(lambda t: np.ones_like(t), 1.0)


def test_disk_integral_examples():
    assert disk_integral_nu(lambda z: (1 - np.abs(z) ** 2) ** 2, 1.0) == pytest.approx(1.0, rel=1e-12)
    cos2 = lambda z: (1 - np.abs(z) ** 2) ** 2 * np.cos(np.angle(z)) ** 2
    assert disk_integral_nu(cos2, 1.0) == pytest.approx(0.5, rel=1e-10)


def test_disk_integral_coherent_kernel_is_isometric():
    g = lambda z: np.abs(coherent_kernel(0.5, z, 2.0)) ** 2
    assert disk_integral_nu(g, 2.0) == pytest.approx(1.0, rel=1e-10)


def test_disk_matches_radial_and_polar_oracle():
    g_r = lambda t: t * (1 - t) ** 3
    g_z = lambda z: np.abs(z) ** 2 * (1 - np.abs(z) ** 2) ** 3
    a = radial_integral_nu(g_r, 1.5)
    b = disk_integral_nu(g_z, 1.5)
    c = oracles.disk_integral_polar(lambda z: abs(z) ** 2 * (1 - abs(z) ** 2) ** 3, 1.5)
    assert b == pytest.approx(a, rel=1e-10)
    assert b == pytest.approx(c, rel=1e-9)


def test_measure_relation():
    g = lambda z: (1 - np.abs(z) ** 2) ** 3 * (1 + np.real(z))
    k = 2.5
    assert disk_integral_nu(g, k) == pytest.approx(
        mu_to_nu(k) * disk_integral_mu(g), rel=1e-12)


def test_halfplane_zero_integrand():
    assert halfplane_integral_mu(lambda t, y: np.zeros_like(t)) == 0.0


def test_halfplane_matches_disk_cayley():
    # g = (y/(1+t^2+y^2))^4 is radial on the disk: ((1-r^2)/(2(1+r^2)))^4
    hp = halfplane_integral_mu(lambda t, y: (y / (1 + t * t + y * y)) ** 4)
    disk = disk_integral_mu(
        lambda z: ((1 - np.abs(z) ** 2) / (2 * (1 + np.abs(z) ** 2))) ** 4)
    assert hp == pytest.approx(math.pi / 24, rel=1e-10)
    assert hp == pytest.approx(disk, rel=1e-10)


def test_refine_reports_last_two_estimates():
    spec = QuadratureSpec(max_refinements=2)
    with pytest.raises(AccuracyError) as exc:
        refine(lambda level: np.array([float(level)]), spec)
    assert exc.value.estimates == ([1.0], [2.0])


def test_graded_rule_integrates_polynomials():
    t, omt, w = graded_radial_rule(128, 3, breaks=[0.3, 0.7])
    assert np.all((t >= 0) & (t < 1))
    assert np.allclose(omt, 1 - t, atol=1e-15)
    assert np.dot(w, t ** 5) == pytest.approx(1 / 6, rel=1e-13)
