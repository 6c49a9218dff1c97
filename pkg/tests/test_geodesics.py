import csv
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tensor_bundle import base
from tensor_bundle.base import covariant_derivative_along, geometry_at
from tensor_bundle.connections import metric_connection
from tensor_bundle.errors import BadParameter, ChartExit, StepUnderflow
from tensor_bundle.frames import FiberPoint
from tensor_bundle.geodesics import (
    CurveState, a_term_residual, convergence_order, equation_residuals, fiber_acceleration,
    geodesic_rhs_lc, geodesic_rhs_metric, horizontal_lift, integrate, kinematic_residuals,
    oracle_geodesic, rhs_from_connection, to_natural_state, trace_columns, write_csv,
)
from tensor_bundle.oracle import natural_christoffel, natural_metric_jet
from tensor_bundle.sasaki import levi_civita

from conftest import rescale

TILT = 0.5
GREAT_CIRCLE_X0 = np.array([math.pi / 2, -math.pi / 2])
GREAT_CIRCLE_V0 = np.array([math.cos(TILT), math.sin(TILT)])


def test_flat_straight_line(plane):
    st = CurveState([-0.5, -0.5], np.arange(4.0) / 10, [0.6, 0.3], np.zeros(4))
    tr = integrate(geodesic_rhs_lc(plane, rescale("1")), st, 1.0, 1e-3, plane, rescale("1"))
    s = tr.s[:, None]
    assert np.max(np.abs(tr.x - (st.x + s * st.xdot))) < 1e-10
    assert np.max(np.abs(tr.t - st.t)) < 1e-12
    assert np.nanmax(tr.residual) < 1e-10


def test_flat_exp_base_acceleration():
    ch = base.euclidean(2)
    f = rescale("exp(x1)")
    st = CurveState([0.0, 0.0], np.zeros(4), [1.0, 0.0], np.zeros(4))
    dy = geodesic_rhs_lc(ch, f)(0.0, st.vector())
    assert dy[6] == pytest.approx(-0.5, abs=1e-15) and dy[7] == 0.0
    # induced-coordinate Christoffels of the explicit bundle metric
    z = to_natural_state(st, ch)
    G, _ = natural_metric_jet(ch, f, FiberPoint(st.x, st.t), 1)
    acc = -np.einsum("BAC,A,C->B", natural_christoffel(G).value, z[6:], z[6:])
    assert acc[0] == pytest.approx(-0.5, abs=1e-14)


def test_zero_section_reduces_to_base_equation(sphere):
    st = CurveState([1.0, 0.2], np.zeros(4), [0.3, -0.8], np.zeros(4))
    dy = geodesic_rhs_lc(sphere, rescale("1"))(0.0, st.vector())
    gam = geometry_at(sphere, st.x, 1).gamma
    assert np.allclose(dy[6:8], -np.einsum("rlj,l,j->r", gam, st.xdot, st.xdot), rtol=0, atol=1e-15)
    assert not dy[8:].any()


@pytest.mark.parametrize("f_src", ["1", "exp(x1/5) + x2^2/7"])
def test_reduced_rhs_matches_generic(sphere, rng, f_src):
    f = rescale(f_src)
    st = CurveState([1.1, 0.4], rng.normal(size=4), rng.normal(size=2), rng.normal(size=4))
    generic = rhs_from_connection(levi_civita, sphere, f)(0.0, st.vector())
    assert np.max(np.abs(geodesic_rhs_lc(sphere, f)(0.0, st.vector()) - generic)) < 1e-14
    generic_m = rhs_from_connection(metric_connection, sphere, f)(0.0, st.vector())
    assert np.max(np.abs(geodesic_rhs_metric(sphere, f)(0.0, st.vector()) - generic_m)) < 1e-14


def test_great_circle_lift_is_geodesic(sphere):
    S0 = np.array([0.3, 0.1, -0.2, 0.5])
    tr = horizontal_lift(sphere, GREAT_CIRCLE_X0, GREAT_CIRCLE_V0, S0, math.pi, 1e-2)
    assert np.nanmax(equation_residuals(tr, sphere, rescale("1"))) < 1e-6
    assert np.max(a_term_residual(tr, sphere, rescale("1"))) == 0.0
    assert np.nanmax(fiber_acceleration(tr, sphere)) < 1e-12


def test_lift_transport_against_ode(sphere):
    S0 = np.array([0.3, 0.1, -0.2, 0.5])
    tr = horizontal_lift(sphere, GREAT_CIRCLE_X0, GREAT_CIRCLE_V0, S0, 1.0, 1e-2)

    def rhs(s, y):
        x, v, S = y[:2], y[2:4], y[4:]
        gam = geometry_at(sphere, x, 1).gamma
        return np.concatenate([v, -np.einsum("rlj,l,j->r", gam, v, v),
                               -covariant_derivative_along(gam, v, S, np.zeros(4), 1, 1)])

    sol = solve_ivp(rhs, (0, 1), np.r_[GREAT_CIRCLE_X0, GREAT_CIRCLE_V0, S0], t_eval=tr.s,
                    rtol=1e-11, atol=1e-12)
    assert np.max(np.abs(sol.y[4:].T - tr.t)) < 1e-5


def test_flat_exp_lift_residual_is_a_term():
    ch = base.euclidean(2)
    f = rescale("exp(x1)")
    tr = horizontal_lift(ch, [-0.5, 0.0], [1.0, 0.0], np.eye(2).ravel(), 1.0, 1e-2)
    res = equation_residuals(tr, ch, f)
    pred = a_term_residual(tr, ch, f)
    assert np.nanmax(np.abs(res - pred)) < 1e-6
    assert np.min(pred) == pytest.approx(0.5)  # |A(ẋ,ẋ)|/2f = 1/2 for ẋ = e1


def test_energy_and_residuals_along_geodesic(sphere):
    f = rescale("exp(x1/5)")
    st = CurveState([1.2, 0.1], [0.4, -0.2, 0.1, 0.3], [0.4, 0.3], [0.1, -0.2, 0.05, 0.1])
    drift = {}
    for h in (2e-2, 1e-2):
        tr = integrate(geodesic_rhs_lc(sphere, f), st, 1.0, h, sphere, f)
        drift[h] = np.ptp(tr.energy) / tr.energy[0]
    assert drift[1e-2] < 1e-6
    assert drift[2e-2] / drift[1e-2] > 8
    assert np.nanmax(tr.residual) < 1e-6
    assert np.nanmax(fiber_acceleration(tr, sphere)) < 1e-6
    assert np.nanmax(kinematic_residuals(tr, sphere)) < 1e-6


def test_metric_connection_geodesic(sphere):
    f = rescale("exp(x1/5)")
    st = CurveState([1.2, 0.1], [0.4, -0.2, 0.1, 0.3], [0.4, 0.3], [0.1, -0.2, 0.05, 0.1])
    tr = integrate(geodesic_rhs_metric(sphere, f), st, 1.0, 1e-2, sphere, f, connection=metric_connection)
    assert np.nanmax(tr.residual) < 1e-6
    assert np.nanmax(fiber_acceleration(tr, sphere)) < 1e-6


def test_convergence_order(sphere):
    f = rescale("exp(x1/5)")
    st = CurveState([1.2, 0.1], [0.4, -0.2, 0.1, 0.3], [0.4, 0.3], [0.1, -0.2, 0.05, 0.1])
    assert convergence_order(geodesic_rhs_lc(sphere, f), st, 0.5, 0.1, sphere) >= 3


def test_oracle_gap(sphere):
    f = rescale("exp(x1/5)")
    st = CurveState([1.2, 0.1], [0.4, -0.2, 0.1, 0.3], [0.4, 0.3], [0.1, -0.2, 0.05, 0.1])
    tr = integrate(geodesic_rhs_lc(sphere, f), st, 1.0, 1e-2, sphere, f, record=False)
    Z = oracle_geodesic(sphere, f, st, tr.s)
    assert np.max(np.abs(Z - np.hstack([tr.x, tr.t]))) < 1e-4


def test_errors(sphere, plane):
    st = CurveState([1.2, 0.1], np.zeros(4), [0.4, 0.3], np.zeros(4))
    with pytest.raises(BadParameter):
        integrate(geodesic_rhs_lc(sphere, rescale("1")), st, 1.0, 0.0, sphere, rescale("1"))
    with pytest.raises(ChartExit):
        integrate(geodesic_rhs_lc(sphere, rescale("1")), CurveState([0.25, 0.0], np.zeros(4), [-1.0, 0.0],
                  np.zeros(4)), 1.0, 1e-2, sphere, rescale("1"))
    with pytest.raises(StepUnderflow):
        geodesic_rhs_lc(plane, rescale("x1^2"))(0.0, CurveState([1e-5, 0.0], np.zeros(4), [1.0, 0.0],
                                                                np.zeros(4)).vector())


def test_csv_trace(sphere, tmp_path):
    f = rescale("1")
    st = CurveState([1.2, 0.1], [0.4, -0.2, 0.1, 0.3], [0.4, 0.3], np.zeros(4))
    tr = integrate(geodesic_rhs_lc(sphere, f), st, 0.1, 1e-2, sphere, f)
    path = tmp_path / "trace.csv"
    write_csv(tr, sphere, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == trace_columns(2, 1, 1)
    assert len(rows) == len(tr.s) + 1
    first = np.array(rows[1], dtype=float)
    assert np.array_equal(first[1:3], tr.x[0]) and np.array_equal(first[3:7], tr.t[0])
    assert np.allclose(first[9:13], to_natural_state(tr.state(0), sphere)[8:], rtol=0, atol=0)
