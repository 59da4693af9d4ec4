"""Markov trace, conditional expectations, level structure and pushdown."""
import numpy as np

from subfactor_lab.algebra.structure import equal_up_to_block_permutation
from subfactor_lab.suites import SuiteGroup

tower_suites = SuiteGroup('tower')


def _max(values, default=0.0):
    return max(values, default=default)


@tower_suites.suite(
    'markov',
    statement="Gᵗ G t = ‖G‖² t with Σ n t = 1, s = G t, and Tr(x e₁) = τ tr(x) on level 1",
    min_depth=1)
def markov_suite(ctx):
    inclusion = ctx.inclusion
    markov = inclusion.markov
    G = inclusion.matrix.astype(float)
    t = np.array(markov.t_vec)
    s = np.array(markov.s_vec)
    n = np.array(inclusion.big.block_dims)
    d = np.array(inclusion.small.block_dims)
    tower = ctx.tower
    level = tower.level(1)
    e1 = tower.jones(1)
    markov_property = _max(
        abs(level.trace(tower.up(1, x) @ e1) - markov.tau * x.trace())
        for x in [inclusion.big.random_element(ctx.seed + i) for i in range(ctx.samples)])
    residuals = {
        'eigen_residual': markov.eigen_residual / markov.norm_sq,
        'dual_eigen_residual': float(np.linalg.norm(G @ G.T @ s - markov.norm_sq * s)) / markov.norm_sq,
        'state_on_M': abs(float(n @ t) - 1.0),
        'state_on_N': abs(float(d @ s) - 1.0),
        'modulus': abs(markov.tau * markov.norm_sq - 1.0),
        'markov_property': markov_property,
    }
    return residuals, markov.to_dict()


@tower_suites.suite(
    'conditional-expectation',
    statement="E is idempotent, bimodular, positive and trace preserving on every level; "
              "e₁ x e₁ = E_N(x) e₁",
    min_depth=1)
def conditional_expectation_suite(ctx):
    tower = ctx.tower
    inclusion = ctx.inclusion
    N, M = inclusion.small, inclusion.big
    residuals = dict.fromkeys(
        ('idempotent', 'bimodular', 'trace_preserving', 'positivity', 'jones_compression'), 0.0)
    for i in range(ctx.samples):
        x = M.random_element(ctx.seed + 10 * i)
        a = N.random_element(ctx.seed + 10 * i + 1)
        b = N.random_element(ctx.seed + 10 * i + 2)
        ex = inclusion.conditional_expectation(x)
        again = inclusion.conditional_expectation(inclusion.embed(ex))
        residuals['idempotent'] = max(
            residuals['idempotent'], (again - ex).hs_norm() / max(ex.hs_norm(), 1e-300))
        sandwich = inclusion.conditional_expectation(inclusion.embed(a) @ x @ inclusion.embed(b))
        expected = a @ ex @ b
        residuals['bimodular'] = max(
            residuals['bimodular'], (sandwich - expected).hs_norm() / max(expected.hs_norm(), 1e-300))
        residuals['trace_preserving'] = max(residuals['trace_preserving'], abs(ex.trace() - x.trace()))
        positive = inclusion.conditional_expectation(x.adjoint() @ x)
        lowest = min(float(np.linalg.eigvalsh(block).min()) for block in positive.blocks)
        residuals['positivity'] = max(residuals['positivity'], max(0.0, -lowest))

        e1 = tower.jones(1)
        lhs = e1 @ tower.up(1, x) @ e1
        rhs = tower.up(1, inclusion.embed(ex)) @ e1
        residuals['jones_compression'] = max(
            residuals['jones_compression'], tower.level(1).residual(lhs, rhs))

    levels = {}
    for k in range(1, tower.depth + 1):
        level, lower = tower.level(k), tower.level(k - 1)
        worst = 0.0
        for i in range(min(ctx.samples, 4)):
            X = level.random_element(ctx.seed + 100 * k + i)
            E = tower.expectation_onto_previous(k, X)
            worst = max(
                worst,
                lower.residual(tower.expectation_onto_previous(k, tower.up(k, E)), E),
                abs(lower.trace(E) - level.trace(X)) / max(level.hs_norm(X), 1e-300),
            )
        levels[k] = worst
    residuals['tower_levels'] = _max(levels.values())
    return residuals, {'per_level': levels}


@tower_suites.suite(
    'structure',
    statement="dim of every level equals Σ b_k² from the G/Gᵗ recursion; "
              "level k sits in level k+1 with inclusion matrix Gᵗ or G",
    min_depth=1)
def structure_suite(ctx):
    tower = ctx.tower
    G = ctx.inclusion.matrix
    predicted = tower.predicted_dims()
    predicted_blocks = tower.predicted_block_dims()
    residuals = {
        'dimension_mismatch': float(sum(
            abs(tower.dim(k) - predicted[k]) for k in range(-1, tower.depth + 1))),
    }
    mismatched_blocks, mismatched_inclusions = 0, 0
    observed = {}
    for k in range(1, tower.depth + 1):
        structure = tower.block_structure(k, with_next=False)
        observed[k] = {
            'block_dims': structure.block_dims,
            'inclusion_from_previous': structure.inclusion_from_previous,
        }
        if sorted(structure.block_dims) != sorted(predicted_blocks[k]):
            mismatched_blocks += 1
        expected = G.T if k % 2 else G
        if not equal_up_to_block_permutation(structure.inclusion_from_previous, expected):
            mismatched_inclusions += 1
    residuals['block_dims_mismatch'] = float(mismatched_blocks)
    residuals['inclusion_mismatch'] = float(mismatched_inclusions)
    details = {'predicted_dims': predicted, 'levels': observed}
    return residuals, details


@tower_suites.suite(
    'pushdown', aliases=('lem2.1',),
    statement="for X in level k, X e_k = x₀ e_k with x₀ = τ⁻¹ E(X e_k), and x₀ is unique",
    min_depth=1)
def pushdown_suite(ctx):
    tower = ctx.tower
    residuals = {'pushdown': 0.0, 'uniqueness': 0.0}
    top = min(tower.depth, 2)
    for k in range(1, top + 1):
        level, lower = tower.level(k), tower.level(k - 1)
        jones = tower.jones(k)
        for i in range(ctx.samples):
            X = level.random_element(ctx.seed + 1000 * k + i)
            x0 = (1.0 / tower.tau) * tower.expectation_onto_previous(k, X @ jones)
            residuals['pushdown'] = max(
                residuals['pushdown'], level.residual(X @ jones, tower.up(k, x0) @ jones))
            residuals['uniqueness'] = max(
                residuals['uniqueness'], lower.residual(tower.read_back(k, X @ jones), x0))
    return residuals, {'levels': list(range(1, top + 1)), 'samples_per_level': ctx.samples}
