import math

import numpy as np
import pytest

from w9periods.errors import AccuracyError, ParameterError
from w9periods.quadrature import (DEFAULT_QUAD, QuadConfig, integrate_levels,
                                  tanh_sinh_nodes)


def test_config_validation():
    with pytest.raises(ParameterError):
        QuadConfig(tol=0)
    with pytest.raises(ParameterError):
        QuadConfig(min_level=7, max_level=5)


def test_nodes_structure():
    u, one_minus, one_plus, w = tanh_sinh_nodes(5)
    assert len(u) % 2 == 1
    mid = len(u) // 2
    assert u[mid] == 0.0
    # u saturates to +-1 in floating point at the extreme nodes, but the
    # stable endpoint quantities never vanish or overflow
    assert np.all(np.diff(u) >= 0)
    assert np.all(np.diff(one_minus) <= 0)
    assert np.all(np.diff(one_plus) >= 0)
    assert np.all(one_minus > 0) and np.all(one_plus > 0)
    assert one_minus.min() < 1e-40 and one_plus.min() < 1e-40
    assert np.abs(one_minus - (1.0 - u)).max() < 1e-15
    assert np.abs(one_plus - (1.0 + u)).max() < 1e-15
    assert np.all(w > 0)


def test_weights_integrate_constant():
    # integral of 1 over [-1, 1]
    _, _, _, w = tanh_sinh_nodes(7)
    assert abs(w.sum() - 2.0) < 1e-13


def test_smooth_integral():
    def eval_terms(level):
        u, _, _, w = tanh_sinh_nodes(level)
        return np.array([np.sum(w * np.cos(u))])

    val = integrate_levels(eval_terms, DEFAULT_QUAD)[0]
    assert abs(val - 2.0 * math.sin(1.0)) < 1e-13


def test_inverse_sqrt_endpoint_singularities():
    # integral of 1/sqrt(1-u^2) over [-1, 1] is pi; the endpoint factors
    # come from the stable 1 -+ u quantities
    def eval_terms(level):
        _, one_minus, one_plus, w = tanh_sinh_nodes(level)
        return np.array([np.sum(w / np.sqrt(one_minus * one_plus))])

    val = integrate_levels(eval_terms, DEFAULT_QUAD)[0]
    assert abs(val - math.pi) < 1e-12


def test_fixed_level_bypasses_convergence():
    calls = []

    def eval_terms(level):
        calls.append(level)
        u, _, _, w = tanh_sinh_nodes(level)
        return np.array([np.sum(w * u * u)])

    val = integrate_levels(eval_terms, DEFAULT_QUAD, level=8)
    assert calls == [8]
    assert abs(val[0] - 2.0 / 3.0) < 1e-12


def test_nonconvergent_raises():
    rng = np.random.default_rng(0)

    def eval_terms(level):
        return np.array([rng.normal()])

    with pytest.raises(AccuracyError):
        integrate_levels(eval_terms, QuadConfig(tol=1e-13, max_level=7))
