"""Pimsner-Popa bases: equivalence of the three conditions, composition, lifting, tower bases."""
import numpy as np

from subfactor_lab.algebra.automorphisms import random_unitary
from subfactor_lab.algebra.bases import (
    compose_bases, mixed, perturbed, tower_basis, tower_basis_exponent, watatani_index)
from subfactor_lab.config import get_config
from subfactor_lab.suites import SuiteGroup

basis_suites = SuiteGroup('bases')

# a perturbed family must miss some condition by at least this much
DETECTION_MARGIN = 1e-3


def _prefixed(prefix, residuals):
    return {f"{prefix}:{name}": value for name, value in residuals.items()}


@basis_suites.suite(
    'basis-equivalence', aliases=('thm2.2',),
    statement="for the constructed basis of M over N, Q is a projection with tr(Q) = τ⁻¹/n, "
              "Σ λ* e₁ λ = 1 and x = Σ E(x λ*) λ; Σ λ* λ = τ⁻¹; perturbed families fail",
    min_depth=1)
def basis_equivalence_suite(ctx):
    tower = ctx.tower
    basis = tower.basis(0)
    report = basis.verify(ctx.tol, ctx.samples, ctx.seed)
    residuals = dict(report.residuals)

    residuals['watatani'] = basis.watatani_residual()
    level0, level1 = tower.level(0), tower.level(1)
    e1 = tower.jones(1)
    total = None
    for lam in basis.elements:
        up = tower.up(1, lam)
        term = level1.adjoint(up) @ e1 @ up
        total = term if total is None else total + term
    residuals['watatani_from_sum'] = level0.residual(
        tower.tau * watatani_index(basis), tower.expectation_onto_previous(1, total))

    x = level0.random_element(ctx.seed + 77)
    row = basis.coordinates(x)
    residuals['coordinates_fixed_by_q'] = max(
        tower.level(-1).residual(a, b) for a, b in zip(basis.row_times_q(row), row))

    rng = np.random.default_rng(ctx.seed)
    mixed_report = mixed(basis, random_unitary(basis.n, rng)).verify(ctx.tol, ctx.samples, ctx.seed)
    residuals.update(_prefixed('mixed', mixed_report.residuals))

    detected = perturbed(basis).verify(ctx.tol, ctx.samples, ctx.seed)
    worst = max(detected.residuals.values())
    residuals['perturbation_detected'] = max(0.0, DETECTION_MARGIN - worst)

    details = {
        'n': basis.n,
        'tau': tower.tau,
        'skipped_conditions': report.skipped,
        'perturbed_worst_residual': worst,
    }
    return residuals, details


@basis_suites.suite(
    'basis-composition', aliases=('cor2.6',),
    statement="{λ_i μ_j} is a basis of P over N for bases λ of M over N and μ of P over M",
    min_depth=1)
def basis_composition_suite(ctx):
    tower = ctx.tower
    residuals, details = {}, {}
    for j in range(0, min(tower.depth, 2)):
        composite = compose_bases(tower.basis(j), tower.basis(j + 1))
        report = composite.verify(ctx.tol, ctx.samples, ctx.seed)
        residuals.update(_prefixed(f"levels {j + 1}/{j - 1}", report.residuals))
        details[f"levels {j + 1}/{j - 1}"] = {'n': composite.n, 'skipped': report.skipped}
    return residuals, details


@basis_suites.suite(
    'basis-lift', aliases=('cor2.7',),
    statement="{τ^{-1/2} e_{k+1} λ_i} is a basis of level k+1 over level k",
    min_depth=2)
def basis_lift_suite(ctx):
    tower = ctx.tower
    residuals, details = {}, {}
    for j in range(1, min(tower.depth, 3) + 1):
        report = tower.basis(j).verify(ctx.tol, ctx.samples, ctx.seed)
        residuals.update(_prefixed(f"level {j}", report.residuals))
        details[f"level {j}"] = {'n': report.n, 'skipped': report.skipped}
    return residuals, details


@basis_suites.suite(
    'tower-basis', aliases=('cor2.9',),
    statement="τ^{-k(k-1)/4} λ_{i_1} e₁ λ_{i_2} e₂ e₁ λ_{i_3} … is a basis of level k−1 over N",
    min_depth=1)
def tower_basis_suite(ctx):
    tower = ctx.tower
    config = get_config()
    base = tower.basis(0)
    residuals, details = {}, {}
    for k in range(2, 4):
        if k - 1 > tower.depth or base.n ** k > config.MAX_BASIS_CARDINALITY:
            break
        basis = tower_basis(tower, k, base)
        report = basis.verify(ctx.tol, ctx.samples, ctx.seed)
        residuals.update(_prefixed(f"k={k}", report.residuals))
        residuals[f"k={k}:cardinality"] = float(abs(basis.n - base.n ** k))
        details[f"k={k}"] = {
            'n': basis.n,
            'prefactor_exponent': tower_basis_exponent(k),
            'skipped': report.skipped,
        }
    return residuals, details
