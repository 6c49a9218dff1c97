import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensor_bundle import base
from tensor_bundle.base import geometry_at
from tensor_bundle.frames import (
    FiberPoint, frame_data, gamma_ops, horizontal_lift, to_adapted, to_natural, vertical_lift,
)

from conftest import random_point


def natural_frame(chart, z, n, p=1, q=1):
    P = FiberPoint.from_coords(z, n, p, q)
    return frame_data(P, geometry_at(chart, P.x, 1)).T


def fd_structure_constants(chart, P, h=1e-5):
    """[E_a, E_b] from finite differences of the natural frame components."""
    z0, D = P.coords, P.dim
    dT = np.array([(natural_frame(chart, z0 + h * e, P.n, P.p, P.q)
                    - natural_frame(chart, z0 - h * e, P.n, P.p, P.q)) / (2 * h) for e in np.eye(D)])
    T = natural_frame(chart, z0, P.n, P.p, P.q)
    br = np.einsum("aA,AbB->abB", T, dT) - np.einsum("bA,AaB->abB", T, dT)
    return np.einsum("abB,Bc->cab", br, np.linalg.inv(T))


def test_vertical_lift_identity():
    P = FiberPoint([0.1, 0.2], np.zeros(4))
    V = vertical_lift(np.eye(2), P)
    assert np.array_equal(V.h, [0, 0]) and np.array_equal(V.v, [1, 0, 0, 1])
    assert not vertical_lift(np.zeros((2, 2)), P).vector.any()


def test_vertical_lift_natural_components(sphere, rng):
    P = random_point(sphere, rng)
    fd = frame_data(P, geometry_at(sphere, P.x, 1))
    A = rng.normal(size=4)
    z = to_natural(vertical_lift(A, P), fd.T)
    assert np.array_equal(z[:2], [0, 0]) and np.allclose(z[2:], A, rtol=0, atol=0)


def test_horizontal_lift_on_flat_base(rng):
    ch = base.euclidean(2)
    P = random_point(ch, rng)
    fd = frame_data(P, geometry_at(ch, P.x, 1))
    z = to_natural(horizontal_lift([0.3, -1.0], P), fd.T)
    assert np.allclose(z, [0.3, -1.0, 0, 0, 0, 0], atol=0)


def test_horizontal_lift_identity_fiber(sphere):
    P = FiberPoint([1.0, 0.3], np.eye(2))
    fd = frame_data(P, geometry_at(sphere, P.x, 1))
    z = to_natural(horizontal_lift([1.0, 0.0], P), fd.T)
    assert np.max(np.abs(z[2:])) < 1e-15


def test_horizontal_lift_matches_transport_direction(sphere):
    # ∂_φ lifted at t = e1 ⊗ dx2: vertical part is the transport rate of t
    x0 = np.array([1.0, 0.3])
    t0 = np.array([0.0, 1.0, 0.0, 0.0])
    P = FiberPoint(x0, t0)
    z = to_natural(horizontal_lift([0.0, 1.0], P), frame_data(P, geometry_at(sphere, x0, 1)).T)

    def transport(s, steps=200):
        t, ds = t0.copy(), s / steps
        for k in range(steps):  # midpoint rule, second order
            def rate(tt, sk):
                G = geometry_at(sphere, x0 + np.array([0.0, sk]), 1).gamma[:, 1, :]
                T = tt.reshape(2, 2)
                return (-(G @ T) + T @ G).ravel()
            mid = t + 0.5 * ds * rate(t, k * ds)
            t = t + ds * rate(mid, (k + 0.5) * ds)
        return t

    h = 1e-3
    rate = (transport(h) - transport(-h)) / (2 * h)
    assert np.max(np.abs(z[2:] - rate)) < 1e-5
    assert np.max(np.abs(z[2:])) > 0.1


def test_gamma_ops_identity_and_zero(sphere, rng):
    P = random_point(sphere, rng)
    up, low = gamma_ops(np.eye(2), P)
    assert np.allclose(up.v, P.t) and np.allclose(low.v, P.t)
    up, low = gamma_ops(np.zeros((2, 2)), P)
    assert not up.vector.any() and not low.vector.any()


def test_flat_base_frame(rng):
    ch = base.euclidean(3)
    P = random_point(ch, rng)
    fd = frame_data(P, geometry_at(ch, P.x, 2))
    assert np.array_equal(fd.T, np.eye(P.dim))
    assert not fd.psi.any() and not fd.C.any()


def test_transition_block_triangular(sphere, rng):
    P = random_point(sphere, rng)
    T = frame_data(P, geometry_at(sphere, P.x, 1)).T
    n = P.n
    assert np.array_equal(T[:n, :n], np.eye(n)) and np.array_equal(T[n:, n:], np.eye(P.N))
    assert not T[n:, :n].any()


@pytest.mark.parametrize("pq", [(1, 1), (0, 2), (2, 1)])
def test_structure_constants_against_finite_differences(sphere, rng, pq):
    P = random_point(sphere, rng, *pq)
    fd = frame_data(P, geometry_at(sphere, P.x, 2))
    C_fd = fd_structure_constants(sphere, P)
    assert np.max(np.abs(fd.C - C_fd)) < 1e-6
    n = P.n
    assert not fd.C[:, n:, n:].any()  # vertical frame vectors commute
    assert np.allclose(fd.C[n:, :n, :n], np.transpose(fd.psi, (2, 0, 1)))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 2.8), st.floats(-3, 3), st.lists(st.floats(-2, 2), min_size=4, max_size=4),
       st.lists(st.floats(-5, 5), min_size=6, max_size=6))
def test_adapted_natural_round_trip(a, b, t, vec):
    ch = base.sphere(1.0)
    P = FiberPoint([a, b], t)
    fd = frame_data(P, geometry_at(ch, P.x, 1))
    back = to_adapted(to_natural(np.array(vec), fd.T), fd.T_inv)
    assert np.max(np.abs(back - vec)) < 1e-12
    assert math.isclose(np.linalg.det(fd.T), 1.0)
