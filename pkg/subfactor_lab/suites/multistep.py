"""Multi-step basic constructions and the Jones projection identities behind them."""
from subfactor_lab.algebra.multistep import (
    contraction_identity, e_interval, fvrt_check, multistep_recursion_check,
    recursion_exponent, shift_identity, temperley_lieb_residuals)
from subfactor_lab.suites import SuiteGroup

multistep_suites = SuiteGroup('multistep')

MAX_STEPS = 2


def interval_pairs(depth, max_steps=MAX_STEPS, max_bottom=1):
    """(k, m) with m ≤ max_steps, −1 ≤ k ≤ max_bottom and level k+2m built."""
    return [
        (k, m)
        for m in range(1, max_steps + 1)
        for k in range(-1, max_bottom + 1)
        if k + 2 * m <= depth
    ]


@multistep_suites.suite(
    'basic-construction', aliases=('lem3.4',),
    statement="with f = e_[k,k+m]: f x f = E(x) f, n ↦ n f is injective, "
              "span{x f y} is level k+2m and {τ^{-m/2} f λ} is a basis over level k+m",
    min_depth=1)
def basic_construction_suite(ctx):
    residuals, details = {}, {}
    for k, m in interval_pairs(ctx.depth, max_bottom=0):
        report = fvrt_check(ctx.tower, k, m, samples=min(ctx.samples, 4), seed=ctx.seed)
        residuals.update({f"({k},{m}):{name}": v for name, v in report.residuals.items()})
        details[f"({k},{m})"] = report.details
    return residuals, details


@multistep_suites.suite(
    'multistep', aliases=('thm3.5',),
    statement="e_[k,k+m] is a projection, e_[k,k+1] = e_{k+2}, and "
              "e_[−1,n+1] = τ^{-(n+1)} (e_{n+2} … e_{2n+3}) e_[−1,n] (e_{2n+2} … e_{n+2})",
    min_depth=1)
def multistep_suite(ctx):
    tower = ctx.tower
    residuals, details = {}, {'pairs': [], 'recursion': {}}
    for k, m in interval_pairs(ctx.depth):
        projection = e_interval(tower, k, m, tol=float('inf'))
        residuals[f"({k},{m}):projection"] = projection.projection_residual
        if m == 1:
            residuals[f"({k},{m}):single_jones"] = tower.level(k + 2).residual(
                projection.value, tower.jones(k + 2))
        details['pairs'].append({'k': k, 'm': m, 'exponent': projection.exponent})
    n = 0
    while 2 * n + 3 <= tower.depth:
        residuals[f"recursion n={n}"] = multistep_recursion_check(tower, n)
        details['recursion'][n] = recursion_exponent(n)
        n += 1
    return residuals, details


@multistep_suites.suite(
    'temperley-lieb', aliases=('tl',),
    statement="e_i² = e_i = e_i*, e_i e_{i±1} e_i = τ e_i, e_i e_j = e_j e_i for |i−j| ≥ 2, "
              "and (e₁ … e_{2n+1})(e_{2n} … e₁) = τ^{2n} e₁",
    min_depth=1)
def temperley_lieb_suite(ctx):
    tower = ctx.tower
    residuals = temperley_lieb_residuals(tower)
    checked = []
    n = 0
    while 2 * n + 1 <= tower.depth and n <= 2:
        residuals[f"contraction n={n}"] = contraction_identity(tower, n)
        checked.append(n)
        n += 1
    return residuals, {'contraction_n': checked}


@multistep_suites.suite(
    'shift-identity', aliases=('eq3.4',),
    statement="(e_{2n+2} … e_{n+3})(e_{n+2} … e_{2n+3}) = τⁿ e_{2n+2} e_{2n+3}",
    min_depth=3)
def shift_identity_suite(ctx):
    tower = ctx.tower
    residuals = {}
    n = 0
    while 2 * n + 3 <= tower.depth and n <= 1:
        residuals[f"n={n}"] = shift_identity(tower, n)
        n += 1
    return residuals, {'n': list(range(n))}
