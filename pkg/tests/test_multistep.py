from fractions import Fraction

import numpy as np
import pytest

from subfactor_lab.algebra.multistep import (
    contraction_identity, e_interval, fvrt_check, jones_word, multistep_recursion_check,
    recursion_exponent, shift_identity, temperley_lieb_residuals, tl_identity_checks)
from subfactor_lab.errors import DepthError, PreconditionError

TOL = 1e-8


@pytest.mark.parametrize('k, m', [(-1, 1), (-1, 2), (0, 1), (0, 2), (1, 2)])
def test_interval_is_projection(c2_tower, k, m):
    projection = e_interval(c2_tower, k, m)
    assert projection.level == k + 2 * m
    assert projection.projection_residual <= TOL
    assert projection.exponent == Fraction(-m * (m - 1), 2)


def test_interval_trace(c2_tower):
    # Tr(e_[k,k+m]) = τ^m
    for k, m in [(-1, 1), (-1, 2), (0, 2)]:
        value = e_interval(c2_tower, k, m).value
        assert c2_tower.trace(k + 2 * m, value) == pytest.approx(c2_tower.tau ** m, abs=1e-10)


def test_interval_arguments(c2_tower):
    with pytest.raises(PreconditionError):
        e_interval(c2_tower, -2, 1)
    with pytest.raises(PreconditionError):
        e_interval(c2_tower, 0, -1)
    with pytest.raises(DepthError):
        e_interval(c2_tower, 0, 3)


def test_jones_word(c2_tower):
    assert np.allclose(jones_word(c2_tower, [], 2), c2_tower.identity(2))
    word = jones_word(c2_tower, [1, 2, 1], 2)
    assert np.allclose(word, c2_tower.tau * c2_tower.jones(1, 2))


@pytest.mark.parametrize('fixture, k, m, n', [
    ('c2_tower', -1, 1, 2),
    ('c2_tower', -1, 2, 4),
    ('c2_tower', 0, 1, 2),
    ('c1_tower', -1, 1, 4),
    ('c1_tower', 0, 1, 4),
])
def test_basic_construction(fixture, k, m, n, request):
    tower = request.getfixturevalue(fixture)
    report = fvrt_check(tower, k, m, seed=0, tol=TOL)
    assert report.passed, report.residuals
    assert report.residuals['kernel_dimension'] == 0.0
    assert report.residuals['generation_deficit'] == 0.0
    assert report.details['n'] == n
    assert report.details['scale_exponent'] == Fraction(-m, 2)


def test_basic_construction_needs_a_step(c2_tower):
    with pytest.raises(PreconditionError):
        fvrt_check(c2_tower, 0, 0)


def test_basic_construction_checks_basis_levels(c2_tower):
    with pytest.raises(PreconditionError):
        fvrt_check(c2_tower, -1, 2, basis=c2_tower.basis(0))


def test_basic_construction_beyond_depth(c1_tower):
    with pytest.raises(DepthError):
        fvrt_check(c1_tower, 0, 2)


def test_temperley_lieb(any_tower):
    residuals = temperley_lieb_residuals(any_tower)
    assert set(residuals) == {'projection', 'adjacent', 'distant'}
    assert max(residuals.values()) <= TOL


@pytest.mark.parametrize('n', [0, 1, 2])
def test_contraction_identity(c2_tower, n):
    assert contraction_identity(c2_tower, n) <= TOL


@pytest.mark.parametrize('n', [0, 1])
def test_shift_identity(c2_tower, n):
    assert shift_identity(c2_tower, n) <= TOL


def test_tl_identity_checks(c2_tower):
    report = tl_identity_checks(c2_tower, 1, tol=TOL)
    assert report.passed, report.residuals
    assert 'shift' in report.residuals
    assert report.details == {'n': 1}


def test_tl_identity_checks_without_shift(c2_tower):
    report = tl_identity_checks(c2_tower, 2, tol=TOL)
    assert 'shift' not in report.residuals
    assert report.passed


def test_tl_identity_checks_depth(c2_tower):
    with pytest.raises(DepthError):
        tl_identity_checks(c2_tower, 3)


@pytest.mark.parametrize('n', [0, 1])
def test_multistep_recursion(c2_tower, n):
    assert recursion_exponent(n) == -(n + 1)
    assert multistep_recursion_check(c2_tower, n) <= TOL


def test_multistep_recursion_depth(c2_tower):
    with pytest.raises(DepthError):
        multistep_recursion_check(c2_tower, 2)


def test_multistep_recursion_c1(c1_tower):
    assert multistep_recursion_check(c1_tower, 0) <= TOL
