import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensor_bundle import base
from tensor_bundle import structures as sts
from tensor_bundle.base import geometry_at
from tensor_bundle.connections import torsion
from tensor_bundle.frames import AdaptedField, FiberPoint, frame_data
from tensor_bundle.sasaki import bundle_at, levi_civita

from conftest import random_point, rescale

GOLDENS = (sts.GOLDEN, sts.GOLDEN_CONJUGATE)


def kind_field(rng, kind, P, center):
    """Linear adapted field that stays horizontal ('H'), vertical ('V') or mixed ('M')."""
    D, n = P.dim, P.n
    value, slope = rng.normal(size=D), 0.3 * rng.normal(size=(D, D))
    mask = {"H": np.r_[np.ones(n), np.zeros(P.N)], "V": np.r_[np.zeros(n), np.ones(P.N)],
            "M": np.ones(D)}[kind]
    return sts.linear_field(value * mask, slope * mask[:, None], center)


def test_apply_paracomplex():
    X = AdaptedField(np.array([1.0, 2.0]), np.array([3.0, 4.0, 5.0, 6.0]))
    JX = sts.PARACOMPLEX.apply(X)
    assert np.array_equal(JX.h, -X.h) and np.array_equal(JX.v, X.v)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
def test_structure_identities(vec):
    X = np.array(vec)
    J, DI = sts.PARACOMPLEX.matrix(2, 4), sts.DIAGONAL_IDENTITY.matrix(2, 4)
    assert np.array_equal(J @ J @ X, X) and np.array_equal(DI @ DI @ X, X)
    for psi in GOLDENS:
        M = psi.matrix(2, 4)
        assert np.max(np.abs(M @ M @ X - M @ X - X)) < 1e-12 * max(1.0, np.abs(X).max())
        F = sts.product_from_golden(psi)
        assert np.max(np.abs(F.matrix(2, 4) @ F.matrix(2, 4) @ X - X)) < 1e-12 * max(1.0, np.abs(X).max())
        back = sts.golden_from_product(F)
        assert back.h == pytest.approx(psi.h) and back.v == pytest.approx(psi.v)


@pytest.mark.parametrize("f_src", ["1", "exp(x1/5) + x2^2/7"])
def test_purity(sphere, rng, f_src):
    P = random_point(sphere, rng)
    G = bundle_at(sphere, rescale(f_src), P, derivs=1, with_aterms=False).metric.G
    for S in (sts.PARACOMPLEX, sts.DIAGONAL_IDENTITY, *GOLDENS):
        assert sts.purity_defect(S.matrix(2, 4), G, rng) < 1e-12
    assert sts.purity_defect(sts.shear_structure(2, 4), G, rng) > 0.1
    assert sts.purity_defect(sts.swap_structure(2, 4), G, rng) > 1e-3


def test_swap_is_pure_when_blocks_coincide(rng):
    ch = base.euclidean(2)
    P = FiberPoint([0.1, 0.2], np.zeros(4))
    G = bundle_at(ch, rescale("1"), P, derivs=1, with_aterms=False).metric.G
    assert sts.purity_defect(sts.swap_structure(2, 4), G, rng) < 1e-15
    assert sts.purity_defect(sts.shear_structure(2, 4), G, rng) > 0.1


def test_phi_vanishes_on_flat_base(rng):
    ch = base.euclidean(2)
    P = random_point(ch, rng)
    loc = sts.LocalFrames(ch, rescale("exp(x1)"), P)
    for kinds in ("HVH", "HHV", "MMM", "VVV"):
        X, Y, Z = (kind_field(rng, k, P, P.coords) for k in kinds)
        assert abs(sts.phi_operator(loc, sts.PARACOMPLEX, X, Y, Z)) < 1e-7


def test_phi_closed_form_on_sphere(sphere, rng):
    P = random_point(sphere, rng)
    loc = sts.LocalFrames(sphere, rescale("1"), P)
    X, Y, Z = (kind_field(rng, k, P, P.coords) for k in "HVH")
    phi = sts.phi_operator(loc, sts.PARACOMPLEX, X, Y, Z)
    assert abs(phi) > 1e-2
    assert phi == pytest.approx(sts.phi_closed_form_j(loc, X, Y, Z), abs=1e-5)
    X, Y, Z = (kind_field(rng, k, P, P.coords) for k in "VVV")
    assert abs(sts.phi_operator(loc, sts.PARACOMPLEX, X, Y, Z)) < 1e-6


@pytest.mark.parametrize("f_src", ["1", "exp(x1/5)"])
def test_quasi_para_kahler(sphere, rng, f_src):
    P = random_point(sphere, rng)
    loc = sts.LocalFrames(sphere, rescale(f_src), P)
    for _ in range(3):
        X, Y, Z = (kind_field(rng, "M", P, P.coords) for _ in range(3))
        assert abs(sts.cyclic_phi(loc, sts.PARACOMPLEX, X, Y, Z)) < 1e-5


def test_golden_phi_relation(sphere, rng):
    P = random_point(sphere, rng)
    loc = sts.LocalFrames(sphere, rescale("exp(x1/5)"), P)
    X, Y, Z = (kind_field(rng, "M", P, P.coords) for _ in range(3))
    F = sts.product_from_golden(sts.GOLDEN)
    lhs = sts.phi_operator(loc, F, X, Y, Z)
    assert lhs == pytest.approx(2 / np.sqrt(5) * sts.phi_operator(loc, sts.GOLDEN, X, Y, Z), abs=1e-6)


def test_product_connection_flat_is_symmetric(rng):
    ch = base.euclidean(2)
    P = random_point(ch, rng)
    b = bundle_at(ch, rescale("exp(x1)"), P, derivs=2, with_aterms=False)
    T = torsion(sts.product_connection(P, b.geom, b.f).coeff, b.frame.C)
    assert np.max(np.abs(T)) < 1e-15


def test_product_connection_torsion_on_sphere(sphere, rng):
    P = random_point(sphere, rng)
    b = bundle_at(sphere, rescale("exp(x1/5)"), P, derivs=2, with_aterms=False)
    conn = sts.product_connection(P, b.geom, b.f).coeff
    T = torsion(conn, b.frame.C)
    psi = frame_data(P, geometry_at(sphere, P.x, 2)).psi
    assert np.max(np.abs(T[2:, :2, :2] + np.transpose(psi, (2, 0, 1)))) < 1e-12
    assert np.max(np.abs(T[:2, :2, :2])) < 1e-12 and np.max(np.abs(T[:, 2:, 2:])) == 0
    # T(V C, H Y) is horizontal and equals the displayed vertical-horizontal block
    lc = levi_civita(P, b.geom, b.f).coeff
    assert np.max(np.abs(T[:2, 2:, :2] - 3 * lc[:2, 2:, :2])) < 1e-12
    assert np.max(np.abs(T[2:, 2:, :2])) < 1e-12 and np.abs(T[:2, 2:, :2]).max() > 1e-3
    assert not conn[:, 2:, 2:].any()
    displayed = sts.product_connection_11(P, b.geom, b.f).coeff
    assert np.max(np.abs(conn - displayed)) < 1e-14
