import functools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subfactor_lab.algebra.tower import (
    Tower, feasible_depth, interval_exponent, predicted_block_dims, predicted_dims)
from subfactor_lab.catalog import load_entry
from subfactor_lab.config import TestingConfig
from subfactor_lab.errors import DepthError, PreconditionError


def test_level_dimensions_c2(c2_tower):
    assert [c2_tower.dim(k) for k in range(-1, 6)] == [2, 4, 8, 16, 32, 64, 128]


def test_level_dimensions_c1(c1_tower):
    assert [c1_tower.dim(k) for k in range(-1, 4)] == [1, 4, 16, 64, 256]


def test_dimensions_match_prediction(any_tower):
    predicted = any_tower.predicted_dims()
    assert all(any_tower.dim(k) == predicted[k] for k in range(-1, any_tower.depth + 1))


def test_predicted_block_dims_c3(c3):
    blocks = predicted_block_dims(c3, 4)
    assert blocks[1] == (3, 2)
    assert blocks[2] == (3, 5)
    assert blocks[3] == (8, 5)
    assert predicted_dims(c3, 4)[4] == 233


@pytest.mark.parametrize('name, depth', [('c1', 3), ('c2', 6), ('c3', 4)])
def test_feasible_depth(name, depth, request):
    assert feasible_depth(request.getfixturevalue(name)) == depth


def test_cost_cap_raises_depth_error(c2, monkeypatch):
    monkeypatch.setattr(TestingConfig, 'MAX_GNS_DIM', 8)
    with pytest.raises(DepthError) as excinfo:
        Tower(c2, depth=2)
    assert excinfo.value.needed == 2
    assert excinfo.value.available == 1


def test_unbuilt_level(c1_tower):
    with pytest.raises(DepthError):
        c1_tower.level(4)


def test_jones_projection_c2(c2_tower):
    e1 = c2_tower.jones(1)
    assert np.allclose(e1 @ e1, e1)
    assert np.allclose(e1, e1.conj().T)
    assert round(np.trace(e1).real) == 2


def test_jones_projection_index(c2_tower):
    with pytest.raises(PreconditionError):
        c2_tower.jones(0)


def test_trace_is_normalized(any_tower):
    for k in range(1, any_tower.depth + 1):
        assert any_tower.trace(k, any_tower.identity(k)) == pytest.approx(1.0, abs=1e-10)


def test_markov_property(any_tower):
    tau = any_tower.tau
    M = any_tower.inclusion.big
    for seed in range(3):
        x = M.random_element(seed)
        value = any_tower.trace(1, any_tower.up(1, x) @ any_tower.jones(1))
        assert value == pytest.approx(tau * x.trace(), abs=1e-10)


def test_markov_property_higher_levels(c2_tower):
    for k in range(2, c2_tower.depth + 1):
        level = c2_tower.level(k - 1)
        x = level.random_element(k)
        value = c2_tower.trace(k, c2_tower.up(k, x) @ c2_tower.jones(k))
        assert value == pytest.approx(c2_tower.tau * level.trace(x), abs=1e-10)


def test_level_one_weights_c2(c2_tower):
    structure = c2_tower.block_structure(1)
    level = c2_tower.level(1)
    for P in structure.central_projections:
        # each block has size 2 and multiplicity 1 on L²(M₂)
        assert level.trace(P).real / 2 == pytest.approx(0.25, abs=1e-10)


def test_trace_is_tracial_and_faithful(c3_tower):
    level = c3_tower.level(2)
    x, y = level.random_element(1), level.random_element(2)
    assert level.trace(x @ y) == pytest.approx(level.trace(y @ x), abs=1e-10)
    assert level.trace(level.adjoint(x) @ x).real > 0


def test_canonical_decomposition_rebuilds(c3_tower):
    level = c3_tower.level(2)
    X = level.random_element(7)
    basis = c3_tower.basis(1)
    coefficients = c3_tower.canonical_decomposition(2, X)
    rebuilt = sum(
        c3_tower.up(2, c) @ c3_tower.jones(2) @ c3_tower.up(2, lam)
        for c, lam in zip(coefficients, basis.elements))
    assert np.allclose(rebuilt, X, atol=1e-9)


def test_canonical_decomposition_of_numerically_zero_elements(c3_tower):
    level, lower = c3_tower.level(3), c3_tower.level(2)
    coefficients = c3_tower.canonical_decomposition(3, 0.0 * level.identity())
    assert all(lower.hs_norm(c) <= 1e-12 for c in coefficients)
    elements = c3_tower.basis(3).elements
    for a in elements:
        for b in elements:
            coefficients = c3_tower.canonical_decomposition(3, a @ level.adjoint(b))
            assert len(coefficients) == c3_tower.basis(2).n


def test_canonical_decomposition_needs_level_one(c2_tower):
    with pytest.raises(PreconditionError):
        c2_tower.canonical_decomposition(0, c2_tower.identity(0))


def test_expectation_onto_previous(c2_tower):
    for k in range(1, 4):
        level, lower = c2_tower.level(k), c2_tower.level(k - 1)
        X = level.random_element(10 + k)
        E = c2_tower.expectation_onto_previous(k, X)
        assert lower.trace(E) == pytest.approx(level.trace(X), abs=1e-10)
        assert lower.residual(c2_tower.expectation_onto_previous(k, c2_tower.up(k, E)), E) < 1e-8


def test_jones_compression(c2_tower):
    for k in range(1, 4):
        lower = c2_tower.level(k - 1)
        x = lower.random_element(20 + k)
        e = c2_tower.jones(k)
        lhs = e @ c2_tower.up(k, x) @ e
        expected = c2_tower.expectation_onto_previous(k - 1, x)
        rhs = c2_tower.up(k, c2_tower.up(k - 1, expected)) @ e
        assert c2_tower.level(k).residual(lhs, rhs) < 1e-8


def test_composite_expectation_reaches_n(c2_tower):
    X = c2_tower.level(3).random_element(4)
    E = c2_tower.expectation(X, 3, -1)
    assert E.parent == c2_tower.inclusion.small
    assert E.trace() == pytest.approx(c2_tower.trace(3, X), abs=1e-10)


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_pushdown(c2_tower, seed):
    level = c2_tower.level(1)
    X = level.random_element(seed)
    e1 = c2_tower.jones(1)
    x0 = c2_tower.pushdown(1, X)
    assert level.residual(X @ e1, c2_tower.up(1, x0) @ e1) <= 1e-8
    read = c2_tower.read_back(1, X @ e1)
    assert (read - x0).hs_norm() <= 1e-10 * max(x0.hs_norm(), 1.0)


def test_expectation_of_jones_projection(c2_tower):
    for k in range(1, 4):
        E = c2_tower.expectation_onto_previous(k, c2_tower.jones(k))
        expected = c2_tower.tau * c2_tower.identity(k - 1)
        assert c2_tower.level(k - 1).residual(E, expected) < 1e-10


def test_pushdown_of_jones_projection(any_tower):
    for k in range(1, min(any_tower.depth, 2) + 1):
        x0 = any_tower.pushdown(k, any_tower.jones(k))
        lower = any_tower.level(k - 1)
        assert lower.residual(x0, lower.identity()) < 1e-10


def test_pushdown_of_lower_elements(c3_tower):
    for k in range(1, 3):
        lower = c3_tower.level(k - 1)
        a = lower.random_element(30 + k)
        assert lower.residual(c3_tower.pushdown(k, c3_tower.up(k, a)), a) < 1e-10


def test_pushdown_through_conditional_expectation(any_tower):
    inclusion = any_tower.inclusion
    m = inclusion.big.random_element(41)
    x0 = any_tower.pushdown(1, any_tower.jones(1) @ any_tower.up(1, m))
    expected = inclusion.embed(inclusion.conditional_expectation(m))
    assert any_tower.level(0).residual(x0, expected) < 1e-10


@functools.lru_cache(maxsize=None)
def _level_one_tower(name):
    return Tower(load_entry(name).inclusion(), depth=1, seed=0, tol=1e-10)


@pytest.mark.parametrize('name', ['C1', 'C2', 'C3', 'C4'])
@settings(deadline=None, max_examples=100)
@given(seed=st.integers(min_value=0, max_value=10 ** 6))
def test_pushdown_across_catalog(name, seed):
    tower = _level_one_tower(name)
    level, lower = tower.level(1), tower.level(0)
    X = level.random_element(seed)
    e1 = tower.jones(1)
    x0 = tower.pushdown(1, X)
    assert level.residual(X @ e1, tower.up(1, x0) @ e1) <= 1e-10
    assert lower.residual(tower.read_back(1, X @ e1), x0) <= 1e-10


def test_interval_single_step_is_jones(c2_tower):
    assert np.allclose(c2_tower.interval(0, 1), c2_tower.jones(2))
    assert np.allclose(c2_tower.interval(-1, 1), c2_tower.jones(1))


def test_interval_zero_steps_is_identity(c2_tower):
    assert np.allclose(c2_tower.interval(1, 0), c2_tower.identity(1))


def test_interval_beyond_depth(c1_tower):
    with pytest.raises(DepthError):
        c1_tower.interval(0, 2)


def test_interval_exponent():
    assert interval_exponent(1) == 0
    assert interval_exponent(2) == -1
    assert interval_exponent(3) == -3


def test_extend_to_is_idempotent(c4):
    tower = Tower(c4, depth=1)
    tower.extend_to(2)
    assert tower.depth == 2
    tower.extend_to(1)
    assert tower.depth == 2
