import math

import numpy as np
import pytest

from conftest import S_SQUARE, Z1, ZHAT1, agm
from w9periods.errors import (DegeneracyError, LayoutError, ParameterError,
                              PathError)
from w9periods.periods import (LAYOUT_COVER, LAYOUT_ELLIPTIC, LAYOUT_GENUS2,
                               ArcPath, HyperellipticCurve,
                               calibrate_orientation_signs, arc_integrals,
                               build_cycles, integrate_arc, load_calibration,
                               period_matrices, period_matrix,
                               sqrt_determination)

SQRT3 = math.sqrt(3.0)


def genus2_curve():
    return HyperellipticCurve((-1.0, 0.0, S_SQUARE**2, 1.0, (2 + SQRT3) ** 2))


def cover_curve():
    a, c = S_SQUARE, 2 + SQRT3
    return HyperellipticCurve((-c, -1.0, -a, 1j, -1j, a, 1.0, c))


def elliptic_curve():
    return HyperellipticCurve((-1.0, 0.0, 1.0))


def test_curve_validation():
    with pytest.raises(DegeneracyError):
        HyperellipticCurve((0.0, 0.0, 1.0))
    with pytest.raises(ParameterError):
        HyperellipticCurve((0.0, 1.0))
    assert genus2_curve().genus == 2
    assert cover_curve().genus == 3
    assert elliptic_curve().genus == 1


def test_agm_oracle_complete_integral():
    # |integral over [0,1] of dx/sqrt(x(x-1)(x+1))| equals the classical
    # complete value pi / (sqrt(2) agm(1, 1/sqrt(2)))
    curve = elliptic_curve()
    expected = math.pi / (math.sqrt(2.0) * agm(1.0, 1.0 / math.sqrt(2.0)))
    val = integrate_arc(curve, ArcPath(0.0, 1.0), 1)
    assert abs(abs(val) - expected) < 1e-10
    # the lemniscatic closed form agrees with the agm value
    lemn = math.gamma(0.25) ** 2 / (2.0 * math.sqrt(2.0 * math.pi))
    assert abs(expected - lemn) < 1e-13


def test_arc_integral_symmetry():
    # both finite arcs of the square lattice curve have equal magnitude
    curve = elliptic_curve()
    left = integrate_arc(curve, ArcPath(-1.0, 0.0), 1)
    right = integrate_arc(curve, ArcPath(0.0, 1.0), 1)
    assert abs(abs(left) - abs(right)) < 1e-11
    # left arc is real, right arc is imaginary in the continuous branch
    assert abs(left.imag) < 1e-11
    assert abs(right.real) < 1e-11


def test_arc_integrals_vector_matches_scalar():
    curve = genus2_curve()
    path = ArcPath(0.0, S_SQUARE**2)
    both = arc_integrals(curve, path, [1, 2])
    for k in (1, 2):
        assert abs(both[k - 1] - integrate_arc(curve, path, k)) < 1e-13


def test_branch_sign_flips_value():
    curve = elliptic_curve()
    path = ArcPath(0.0, 1.0)
    assert abs(integrate_arc(curve, path, 1, branch_sign=-1)
               + integrate_arc(curve, path, 1)) < 1e-13


def test_clearance_guard():
    # a segment passing right through a foreign branch point
    curve = HyperellipticCurve((-1.0, 0.0, 0.5, 1.0, 2.0))
    with pytest.raises(PathError):
        integrate_arc(curve, ArcPath(0.0, 1.0), 1)


def test_build_cycles_layouts():
    plan2 = build_cycles(genus2_curve(), LAYOUT_GENUS2)
    assert plan2.genus == 2
    assert plan2.used_arcs() == [0, 1, 2, 3]
    plan3 = build_cycles(cover_curve(), LAYOUT_COVER)
    assert plan3.genus == 3
    assert plan3.used_arcs() == [0, 1, 2, 3, 5, 6]
    plan1 = build_cycles(elliptic_curve(), LAYOUT_ELLIPTIC)
    assert plan1.genus == 1
    with pytest.raises(LayoutError):
        build_cycles(elliptic_curve(), LAYOUT_GENUS2)
    with pytest.raises(LayoutError):
        build_cycles(genus2_curve(), "no_such_layout")


def test_intersection_form_real_layouts():
    J4 = np.zeros((4, 4), dtype=int)
    J4[:2, 2:] = -np.eye(2, dtype=int)
    J4[2:, :2] = np.eye(2, dtype=int)
    assert np.array_equal(
        build_cycles(genus2_curve(), LAYOUT_GENUS2).intersection_matrix(), J4)
    assert np.array_equal(
        build_cycles(elliptic_curve(), LAYOUT_ELLIPTIC).intersection_matrix(),
        np.array([[0, -1], [1, 0]]))


def test_sqrt_determination_chain():
    curve = genus2_curve()
    plan = build_cycles(curve, LAYOUT_GENUS2)
    table = sqrt_determination(curve, plan)
    # the midpoint principal branch is already the continuous one on the
    # real arcs of an M-curve
    assert table == {0: 1, 1: 1, 2: 1, 3: 1}


def test_period_matrix_genus2_fixture():
    curve = genus2_curve()
    plan = build_cycles(curve, LAYOUT_GENUS2)
    Z = period_matrix(curve, plan)
    assert np.abs(Z - Z1).max() < 1e-6


def test_period_matrix_cover_fixture():
    curve = cover_curve()
    plan = build_cycles(curve, LAYOUT_COVER)
    Zhat = period_matrix(curve, plan)
    assert np.abs(Zhat - ZHAT1).max() < 1e-6


def test_period_ratio_elliptic():
    curve = elliptic_curve()
    plan = build_cycles(curve, LAYOUT_ELLIPTIC)
    Z = period_matrix(curve, plan)
    assert abs(Z[0, 0] - 1j) < 1e-9
    pair = period_matrices(curve, plan)
    expected = math.pi / (math.sqrt(2.0) * agm(1.0, 1.0 / math.sqrt(2.0)))
    assert abs(abs(pair.A[0, 0]) - expected) < 1e-10
    assert abs(abs(pair.B[0, 0]) - expected) < 1e-10


def test_calibration_reproducible():
    for layout in (LAYOUT_ELLIPTIC, LAYOUT_GENUS2, LAYOUT_COVER):
        signs = calibrate_orientation_signs(layout)
        assert all(s == 1 for s in signs)


def test_load_calibration_matches_build():
    tables = load_calibration()
    assert tuple(tables[LAYOUT_GENUS2]) == (1, 1, 1, 1, 1, 1)
    assert tuple(tables[LAYOUT_COVER]) == (1, 1, 1, 1, 1, 1, 1, 1)
