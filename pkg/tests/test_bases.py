from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subfactor_lab.algebra.automorphisms import random_unitary
from subfactor_lab.algebra.bases import (
    Basis, compose_bases, lift_basis, mixed, perturbed, tower_basis, tower_basis_exponent,
    watatani_index)
from subfactor_lab.config import TestingConfig
from subfactor_lab.errors import PreconditionError

TOL = 1e-8


def _hand_basis_c2(tower):
    M = tower.inclusion.big
    swap = M.unit(0, 0, 1) + M.unit(0, 1, 0)
    return Basis(tower, 0, -1, [M.identity(), swap], label='hand')


def _hand_basis_c1(tower):
    M = tower.inclusion.big
    return Basis(tower, 0, -1, [np.sqrt(2) * u for u in M.units()], label='hand')


@pytest.mark.parametrize('fixture, n', [
    ('c1_tower', 4), ('c2_tower', 2), ('c3_tower', 3), ('c4_tower', 1)])
def test_constructed_basis_size(fixture, n, request):
    assert request.getfixturevalue(fixture).basis(0).n == n


def test_constructed_basis_passes(any_tower):
    report = any_tower.basis(0).verify(TOL, samples=8, seed=0)
    assert report.passed, report.residuals
    assert report.skipped == []
    assert set(report.residuals) == {
        'condition_1_projection', 'condition_1_trace', 'condition_2',
        'condition_3', 'condition_3_adjoint'}


@pytest.mark.parametrize('factory', [_hand_basis_c1, _hand_basis_c2])
def test_hand_bases(factory, c1_tower, c2_tower):
    tower = c1_tower if factory is _hand_basis_c1 else c2_tower
    basis = factory(tower)
    assert basis.verify(TOL, samples=4).passed


def test_hand_basis_c2_has_identity_q(c2_tower):
    q = _hand_basis_c2(c2_tower).q_matrix
    assert np.allclose(q[0][0].matrix(), np.eye(2))
    assert np.allclose(q[0][1].matrix(), 0)
    assert np.allclose(q[1][1].matrix(), np.eye(2))
    assert np.allclose(_hand_basis_c2(c2_tower).q_operator(), np.eye(4))


def test_coordinates_c2(c2_tower):
    basis = _hand_basis_c2(c2_tower)
    e12 = c2_tower.inclusion.big.unit(0, 0, 1)
    row = basis.coordinates(e12)
    assert np.allclose(row[0].matrix(), 0)
    assert np.allclose(row[1].matrix(), np.diag([1.0, 0.0]))


def test_coordinates_are_fixed_by_q(c3_tower):
    basis = c3_tower.basis(0)
    x = c3_tower.level(0).random_element(3)
    row = basis.coordinates(x)
    for a, b in zip(basis.row_times_q(row), row):
        assert np.allclose(a.matrix(), b.matrix(), atol=1e-10)


@pytest.mark.parametrize('fixture, index', [
    ('c1_tower', 4.0), ('c2_tower', 2.0), ('c3_tower', (3 + np.sqrt(5)) / 2), ('c4_tower', 1.0)])
def test_watatani_index(fixture, index, request):
    tower = request.getfixturevalue(fixture)
    value = watatani_index(tower.basis(0))
    assert np.allclose(value.matrix(), index * np.eye(value.parent.size), atol=1e-8)
    assert tower.basis(0).watatani_residual() < TOL


@pytest.mark.parametrize('fixture', ['c1_tower', 'c2_tower', 'c3_tower'])
def test_perturbed_family_fails(fixture, request):
    basis = request.getfixturevalue(fixture).basis(0)
    report = perturbed(basis).verify(TOL, samples=4)
    assert max(report.residuals.values()) > 1e-3


@settings(deadline=None, max_examples=10)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_mixed_families_are_bases(c3_tower, seed):
    basis = c3_tower.basis(0)
    family = mixed(basis, random_unitary(basis.n, np.random.default_rng(seed)))
    assert family.condition_2()['condition_2'] <= 1e-10
    report = family.verify(TOL, samples=4, seed=seed)
    assert report.passed, report.residuals


def test_composite_basis_c2(c2_tower):
    composite = compose_bases(c2_tower.basis(0), c2_tower.basis(1))
    assert composite.n == 4
    assert (composite.top, composite.bottom) == (1, -1)
    assert composite.tau_effective == pytest.approx(0.25)
    assert composite.verify(TOL, samples=4).passed


def test_compose_needs_a_chain(c2_tower):
    with pytest.raises(PreconditionError):
        compose_bases(c2_tower.basis(1), c2_tower.basis(0))


def test_composing_with_the_trivial_basis(c2_tower):
    basis = c2_tower.basis(0)
    level = c2_tower.level(0)
    below = Basis(c2_tower, -1, -1, [c2_tower.identity(-1)], label='trivial')
    above = Basis(c2_tower, 0, 0, [level.identity()], label='trivial')
    for composite in (compose_bases(below, basis), compose_bases(basis, above)):
        assert (composite.top, composite.bottom) == (0, -1)
        assert composite.n == basis.n
        for a, b in zip(composite.elements, basis.elements):
            assert level.residual(a, b) < 1e-12
        assert composite.verify(TOL, samples=4).passed


def test_composition_is_associative(c2_tower):
    b0, b1, b2 = c2_tower.basis(0), c2_tower.basis(1), c2_tower.basis(2)
    left = compose_bases(compose_bases(b0, b1), b2)
    right = compose_bases(b0, compose_bases(b1, b2))
    assert (left.top, left.bottom, left.n) == (right.top, right.bottom, right.n) == (2, -1, 8)
    level = c2_tower.level(2)
    for a, b in zip(left.elements, right.elements):
        assert level.residual(a, b) < 1e-10


@pytest.mark.parametrize('fixture', ['c2_tower', 'c3_tower'])
def test_reconstruction_implies_the_other_conditions(fixture, request):
    tower = request.getfixturevalue(fixture)
    basis = tower.basis(0)
    for seed in range(3):
        family = mixed(basis, random_unitary(basis.n, np.random.default_rng(seed)))
        assert max(family.condition_3(samples=4, seed=seed).values()) <= TOL
        assert max(family.condition_1().values()) <= TOL
        assert family.condition_2()['condition_2'] <= TOL


@pytest.mark.parametrize('fixture', ['c1_tower', 'c2_tower', 'c3_tower'])
def test_each_condition_rejects_a_perturbed_family(fixture, request):
    family = perturbed(request.getfixturevalue(fixture).basis(0))
    assert max(family.condition_1().values()) > 1e-3
    assert family.condition_2()['condition_2'] > 1e-3
    assert max(family.condition_3(samples=4).values()) > 1e-3


@pytest.mark.parametrize('j', [1, 2, 3])
def test_lifted_bases_c2(c2_tower, j):
    basis = c2_tower.basis(j)
    assert basis.n == 2
    report = basis.verify(TOL, samples=4)
    assert report.passed, report.residuals


def test_lifted_basis_c1_index(c1_tower):
    lifted = c1_tower.basis(1)
    assert lifted.n == 4
    value = watatani_index(lifted)
    assert np.allclose(value, 4.0 * np.eye(value.shape[0]), atol=1e-8)


def test_lift_checks_levels(c2_tower):
    with pytest.raises(PreconditionError):
        lift_basis(c2_tower, 2, c2_tower.basis(0))


def test_tower_basis_exponents():
    assert tower_basis_exponent(1) == 0
    assert tower_basis_exponent(2) == Fraction(-1, 2)
    assert tower_basis_exponent(3) == Fraction(-3, 2)


@pytest.mark.parametrize('fixture, k', [
    ('c2_tower', 2), ('c2_tower', 3), ('c1_tower', 2), ('c3_tower', 2)])
def test_tower_basis(fixture, k, request):
    tower = request.getfixturevalue(fixture)
    base = tower.basis(0)
    basis = tower_basis(tower, k, base)
    assert basis.n == base.n ** k
    assert (basis.top, basis.bottom) == (k - 1, -1)
    report = basis.verify(TOL, samples=4)
    assert report.passed, report.residuals
    assert report.skipped == []


def test_tower_basis_with_offset(c2_tower):
    basis = tower_basis(c2_tower, 2, c2_tower.basis(1))
    assert (basis.top, basis.bottom) == (2, 0)
    assert basis.verify(TOL, samples=4).passed


def test_tower_basis_cardinality_cap(c1_tower, monkeypatch):
    monkeypatch.setattr(TestingConfig, 'MAX_BASIS_CARDINALITY', 8)
    with pytest.raises(PreconditionError):
        tower_basis(c1_tower, 2, c1_tower.basis(0))


def test_condition_two_skipped_when_shallow(c3_tower):
    report = c3_tower.basis(3).verify(TOL, samples=2)
    assert report.skipped == ['condition_2']
    assert report.passed
