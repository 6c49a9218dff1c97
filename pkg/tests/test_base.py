import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from tensor_bundle import base
from tensor_bundle.base import covariant_derivative_along, geometry_at
from tensor_bundle.errors import BadParameter, NotPositiveDefinite, ShapeMismatch


def fd_christoffel(chart, x, h=1e-5):
    n = chart.n
    dg = np.zeros((n, n, n))
    for k in range(n):
        e = np.eye(n)[k] * h
        dg[k] = (chart.metric(x + e) - chart.metric(x - e)) / (2 * h)
    lower = dg.transpose(1, 0, 2) + dg.transpose(2, 1, 0) - dg
    return 0.5 * np.einsum("hm,mij->hij", np.linalg.inv(chart.metric(x)), lower)


def fd_riemann(chart, x, h=1e-4):
    n = chart.n
    G = geometry_at(chart, x, 1).gamma
    dG = np.zeros((n,) + G.shape)
    for k in range(n):
        e = np.eye(n)[k] * h
        dG[k] = (fd_christoffel(chart, x + e) - fd_christoffel(chart, x - e)) / (2 * h)
    lin = dG.transpose(0, 2, 3, 1)
    quad = np.einsum("skm,mlj->kljs", G, G)
    return lin - lin.transpose(1, 0, 2, 3) + quad - quad.transpose(1, 0, 2, 3)


def test_euclidean_is_flat():
    g = geometry_at(base.euclidean(2), [0.3, -0.4])
    assert np.all(g.gamma == 0) and np.all(g.riemann == 0) and g.scalar == 0
    assert np.array_equal(g.g, np.eye(2))


def test_sphere_equator_values(sphere):
    g = geometry_at(sphere, [math.pi / 2, 0.0])
    assert g.gamma[0, 1, 1] == pytest.approx(0.0, abs=1e-15)
    assert g.scalar == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("radius, kappa, scalar", [(1.0, 1.0, 2.0), (2.0, 0.25, 0.5)])
def test_sphere_scalar(radius, kappa, scalar):
    ch = base.sphere(radius)
    assert ch.kappa == kappa
    for x in ([0.7, 0.1], [2.0, -2.5]):
        assert geometry_at(ch, x).scalar == pytest.approx(scalar, rel=1e-12)


def test_hyperbolic_constant_curvature_identity():
    ch = base.hyperbolic(3)
    g = geometry_at(ch, [0.2, -0.3, 1.1])
    eye = np.eye(3)
    expect = ch.kappa * (np.einsum("sk,lj->kljs", eye, g.g) - np.einsum("sl,kj->kljs", eye, g.g))
    assert np.max(np.abs(g.riemann - expect)) < 1e-12
    assert np.max(np.abs(g.nabla_riemann)) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 2.8), st.floats(-3, 3))
def test_christoffel_against_finite_differences(a, b):
    ch = base.sphere(1.3)
    x = np.array([a, b])
    assert np.max(np.abs(geometry_at(ch, x, 1).gamma - fd_christoffel(ch, x))) < 1e-8


def test_riemann_against_finite_differences():
    ch = base.custom([["1 + x2^2", "x1/5"], ["x1/5", "2 + sin(x1)"]])
    x = np.array([0.3, 0.4])
    assert np.max(np.abs(geometry_at(ch, x, 2).riemann - fd_riemann(ch, x))) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.floats(0.3, 2.8), st.floats(-3, 3))
def test_riemann_symmetries(a, b):
    ch = base.product(base.sphere(1.0), base.hyperbolic(2))
    g = geometry_at(ch, [a, b, 0.1, 1.2], 2)
    R = np.einsum("klja,as->kljs", g.riemann, g.g)  # all lower
    assert np.max(np.abs(R + R.transpose(1, 0, 2, 3))) < 1e-12
    assert np.max(np.abs(R + R.transpose(0, 1, 3, 2))) < 1e-12
    bianchi = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
    assert np.max(np.abs(bianchi)) < 1e-12
    assert g.scalar == pytest.approx(2.0 - 2.0, abs=1e-12)


def test_latitude_holonomy(sphere):
    theta0 = 1.0

    def rhs(phi, v):
        geom = geometry_at(sphere, [theta0, phi], 1)
        return -covariant_derivative_along(geom.gamma, [0.0, 1.0], v, np.zeros(2), 1, 0)

    sol = solve_ivp(rhs, (0, 2 * math.pi), [1.0, 0.0], rtol=1e-11, atol=1e-12)
    v = sol.y[:, -1]
    angle = math.atan2(v[1] * math.sin(theta0), v[0])  # orthonormal frame components
    expect = 2 * math.pi * (1 - math.cos(theta0))
    diff = (abs(angle) - expect) % (2 * math.pi)
    assert min(diff, 2 * math.pi - diff) < 1e-8
    assert math.hypot(v[0], v[1] * math.sin(theta0)) == pytest.approx(1.0, abs=1e-9)


def test_identity_tensor_is_parallel(sphere):
    geom = geometry_at(sphere, [0.8, 0.2], 1)
    out = covariant_derivative_along(geom.gamma, [0.3, -0.7], np.eye(2), np.zeros((2, 2)), 1, 1)
    assert np.max(np.abs(out)) < 1e-15


def test_flat_constant_tensor_is_parallel():
    geom = geometry_at(base.euclidean(3), [0.1, 0.2, 0.3], 1)
    S = np.arange(9.0)
    assert np.all(covariant_derivative_along(geom.gamma, [1, 2, 3], S, np.zeros(9), 1, 1) == 0)


def test_errors():
    with pytest.raises(BadParameter):
        base.preset("torus")
    with pytest.raises(BadParameter):
        base.sphere(-1)
    with pytest.raises(NotPositiveDefinite):
        geometry_at(base.custom([["x1", "0"], ["0", "1"]]), [-1.0, 0.0])
    with pytest.raises(ShapeMismatch):
        geometry_at(base.euclidean(2), [0.0, 0.0, 0.0])
