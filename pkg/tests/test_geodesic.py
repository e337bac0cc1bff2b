import math

import numpy as np
import pytest

from conftest import Z1, ZHAT1
from w9periods import geodesic as geo
from w9periods import w9
from w9periods.errors import ParameterError, ShapeMismatchError
from w9periods.periods import LAYOUT_COVER, build_cycles, period_matrix
from w9periods.siegel import base_change, is_riemann_matrix
from w9periods.theta import ThetaCharacteristic, theta_char

# rational representation of the basis change taking the structured cover
# matrix to the one-characteristic form with constant diagonal
M6 = np.array([
    [0, 0, 1, 0, 0, 0],
    [-1, 1, -1, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [1, 1, 1, 0, 1, 1],
    [1, 0, 1, 0, 1, 0],
    [1, 1, 1, 1, 1, 0],
])

CH_111_000 = ThetaCharacteristic((1, 1, 1), (0, 0, 0))
CH_111_101 = ThetaCharacteristic((1, 1, 1), (1, 0, 1))


def test_zhat_fixture():
    assert np.abs(geo.zhat_of_ty(1.0, 4.0 / 3.0) - ZHAT1).max() < 1e-14


def test_zhat_shape_and_domain():
    Zhat = geo.zhat_of_ty(2.0, 1.5)
    assert is_riemann_matrix(Zhat)
    shape = w9.cover_shape_extract(Zhat)
    assert abs(shape.z1 - 1.5j) < 1e-14
    with pytest.raises(ParameterError):
        geo.zhat_of_ty(2.0, 1.2)  # 1.2 < 2t/3 = 4/3
    with pytest.raises(ParameterError):
        geo.zhat_of_ty(0.5, 2.0)


def test_domain_boundary():
    for t in (1.0, 2.0, 5.0):
        Zhat = geo.zhat_of_ty(t, 2 * t / 3 + 1e-3)
        assert is_riemann_matrix(Zhat, tol=1e-12)
        with pytest.raises(ParameterError):
            geo.zhat_of_ty(t, 2 * t / 3 - 1e-3)


def test_zhat_prime_fixture_and_base_change():
    Zp = geo.zhat_prime(1.0, 4.0 / 3.0)
    assert abs(Zp[0, 0] - (0.5 + 5j / 6)) < 1e-14
    assert abs(Zp[0, 1] - (0.5 - 1j / 6)) < 1e-14
    rng = np.random.default_rng(30)
    for _ in range(5):
        t = 1.0 + 2.0 * rng.random()
        y = 2 * t / 3 + 0.2 + rng.random()
        direct = geo.zhat_prime(t, y)
        via_action = base_change(geo.zhat_of_ty(t, y), M6)
        assert np.abs(direct - via_action).max() < 1e-12


def test_z_fixture_and_consistency():
    assert np.abs(geo.z_of_ty(1.0, 4.0 / 3.0) - Z1).max() < 1e-14
    rng = np.random.default_rng(31)
    for _ in range(5):
        t = 1.0 + 2.0 * rng.random()
        y = 2 * t / 3 + 0.2 + rng.random()
        Z = geo.z_of_ty(t, y)
        assert np.abs(Z - w9.base_from_cover(geo.zhat_of_ty(t, y))).max() < 1e-12
        det_im = np.linalg.det(Z.imag)
        assert det_im > 0


def test_main_series_fixture_and_reality():
    assert abs(geo.main_series(1.0, 4.0 / 3.0)) < 1e-10
    for t in np.linspace(1.0, 3.0, 5):
        for y in np.linspace(2 * t / 3 + 0.15, 2 * t / 3 + 2.0, 5):
            assert abs(geo.main_series(float(t), float(y)).imag) < 1e-12
    with pytest.raises(ParameterError):
        geo.main_series(2.0, 1.0)


def test_main_series_matches_transformed_theta():
    rng = np.random.default_rng(32)
    for _ in range(5):
        t = 1.0 + 2.0 * rng.random()
        y = 2 * t / 3 + 0.2 + rng.random()
        th = theta_char(CH_111_000, np.zeros(3), geo.zhat_prime(t, y))
        factor = np.exp(math.pi * (-3 * t / 8 + 9j / 8))
        assert abs(th - factor * geo.main_series(t, y)) < 1e-10


def test_solve_y_at_one():
    pt = geo.solve_y(1.0)
    assert abs(pt.y - 4.0 / 3.0) < 1e-8
    assert np.abs(pt.Z - Z1).max() < 1e-8
    assert np.abs(pt.Zhat - ZHAT1).max() < 1e-8
    assert pt.residual < 1e-10
    assert pt.flags == ()


def test_solve_y_at_two_cross_checked():
    pt = geo.solve_y(2.0)
    assert 4.0 / 3.0 < pt.y < 10.0
    assert abs(theta_char(CH_111_101, np.zeros(3), pt.Zhat)) < 1e-8
    assert abs(theta_char(CH_111_000, np.zeros(3), geo.zhat_prime(2.0, pt.y))) < 1e-9


def test_solve_y_validation():
    with pytest.raises(ParameterError):
        geo.solve_y(0.5)
    with pytest.raises(ParameterError):
        geo.SolverConfig(root_tol=-1)


def test_trace_grid():
    pts = geo.trace(1.0, 3.0, 9)
    assert len(pts) == 9
    assert [p.t for p in pts] == list(np.linspace(1.0, 3.0, 9))
    for p in pts:
        assert p.y > 2 * p.t / 3
        assert p.residual < 1e-10
        assert not p.flags


def test_trace_single_point():
    pts = geo.trace(1.0, 1.0, 1)
    assert len(pts) == 1
    assert abs(pts[0].y - 4.0 / 3.0) < 1e-8


def test_trace_grid_refinement_is_consistent():
    coarse = geo.trace(1.0, 3.0, 5)
    fine = {round(p.t, 9): p.y for p in geo.trace(1.0, 3.0, 9)}
    for p in coarse:
        assert abs(fine[round(p.t, 9)] - p.y) < 1e-8


def test_extract_ty_roundtrip():
    assert geo.extract_ty_from_cover(ZHAT1) == (1.0, 4.0 / 3.0)
    rng = np.random.default_rng(33)
    for _ in range(5):
        t = 1.0 + 2.0 * rng.random()
        y = 2 * t / 3 + 0.2 + rng.random()
        t2, y2 = geo.extract_ty_from_cover(geo.zhat_of_ty(t, y))
        assert abs(t2 - t) < 1e-12 and abs(y2 - y) < 1e-12
    with pytest.raises(ShapeMismatchError):
        geo.extract_ty_from_cover(1j * np.eye(3))


def test_extract_ty_from_quadrature_cover():
    cover = w9.double_cover(w9.curve_Qs(0.2))
    Zhat = period_matrix(cover, build_cycles(cover, LAYOUT_COVER))
    t, y = geo.extract_ty_from_cover(Zhat, shape_tol=1e-6)
    assert abs(geo.main_series(t, y)) < 1e-6


def test_theorem_consistency_at_solved_points():
    for t in (1.0, 1.5, 2.5):
        pt = geo.solve_y(t)
        assert abs(theta_char(CH_111_101, np.zeros(3), pt.Zhat)) < 1e-9
