"""Trace invariance of N-invariant automorphisms and their extension up the tower."""
import numpy as np

from subfactor_lab.algebra.automorphisms import (
    check_trace_preserving, extend_automorphism, extend_tower, extension_report,
    random_n_invariant, random_unitary)
from subfactor_lab.algebra.bases import mixed
from subfactor_lab.suites import SuiteGroup

automorphism_suites = SuiteGroup('automorphisms')


def _base_automorphism(ctx, offset=0):
    """The spec file's automorphism when it leaves N invariant, else a seeded random one."""
    alpha = ctx.automorphism
    if offset == 0 and alpha is not None and alpha.n_invariant:
        return alpha, 'spec file'
    return random_n_invariant(ctx.inclusion, ctx.seed + offset), f'random (seed {ctx.seed + offset})'


@automorphism_suites.suite(
    'trace-invariance', aliases=('lem3.1',),
    statement="tr ∘ α₀ = tr for every automorphism α₀ of M with α₀(N) = N")
def trace_invariance_suite(ctx):
    worst = 0.0
    count = ctx.samples
    for s in range(count):
        alpha = random_n_invariant(ctx.inclusion, ctx.seed + s)
        worst = max(worst, check_trace_preserving(alpha))
    residuals = {'random_automorphisms': worst}
    if ctx.automorphism is not None and ctx.automorphism.n_invariant:
        residuals['spec_automorphism'] = check_trace_preserving(ctx.automorphism)
    return residuals, {'samples': count}


@automorphism_suites.suite(
    'automorphism-extension', aliases=('thm3.2',),
    statement="α₀ extends to a unique trace-preserving automorphism α₁ of level 1 "
              "with α₁|M = α₀ and α₁(e₁) = e₁",
    min_depth=1)
def automorphism_extension_suite(ctx):
    tower = ctx.tower
    alpha0, source = _base_automorphism(ctx)
    basis = tower.basis(0)
    alpha = extend_automorphism(tower, basis, alpha0)
    residuals = {f"level 0:{k}": v for k, v in extension_report(alpha, 0, seed=ctx.seed).residuals.items()}
    residuals.update({
        f"level 1:{k}": v for k, v in extension_report(alpha, 1, seed=ctx.seed).residuals.items()})

    rng = np.random.default_rng(ctx.seed + 1)
    other = extend_automorphism(tower, mixed(basis, random_unitary(basis.n, rng)), alpha0)
    residuals['uniqueness'] = alpha.distance(other, 1)
    return residuals, {'automorphism': source, 'sigma': alpha0.sigma}


@automorphism_suites.suite(
    'tower-automorphism', aliases=('cor3.3',),
    statement="α₀ extends level by level to α_k on the whole tower, fixing every e_j; "
              "extensions compose",
    min_depth=2)
def tower_automorphism_suite(ctx):
    tower = ctx.tower
    depth = min(tower.depth, 3)
    alpha0, source = _base_automorphism(ctx)
    beta0, _ = _base_automorphism(ctx, offset=1)
    alpha = extend_tower(tower, alpha0, depth)
    beta = extend_tower(tower, beta0, depth)
    residuals = {}
    for k in range(1, depth + 1):
        report = extension_report(alpha, k, seed=ctx.seed)
        residuals.update({f"level {k}:{name}": v for name, v in report.residuals.items()})

    composed = extend_tower(tower, alpha0.compose(beta0), depth)
    product = alpha.compose(beta)
    residuals['composition'] = max(composed.distance(product, k) for k in range(1, depth + 1))
    return residuals, {'automorphism': source, 'depth': depth}
