"""
Multi-step Jones projections and the identities among products of Jones projections.

e_[k,k+m] lives in level k+2m and exhibits level k ⊆ level k+m ⊆ level k+2m
as a basic construction. All products are evaluated in the top level of the
expression after pushing every factor up; nothing is rewritten symbolically.
"""
import logging
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
import scipy.linalg

from subfactor_lab.algebra.bases import Basis, tower_basis
from subfactor_lab.algebra.multimatrix import orthonormalize, relative_residual
from subfactor_lab.algebra.tower import interval_exponent
from subfactor_lab.config import get_config
from subfactor_lab.errors import ConsistencyError, DepthError, PreconditionError
from subfactor_lab.models.serializer import SerializerMixin

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class IntervalProjection:
    k: int
    m: int
    value: object
    exponent: Fraction
    projection_residual: float

    @property
    def level(self):
        return self.k + 2 * self.m


@dataclass
class IdentityReport(SerializerMixin):
    """Named residuals of a family of operator identities."""
    name: str
    tolerance: float
    residuals: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r <= self.tolerance for r in self.residuals.values())


def jones_word(tower, indices, level):
    """e_{i_1} e_{i_2} … in ``level``; the empty word is 1."""
    return reduce(operator.matmul, (tower.jones(i, level) for i in indices), tower.identity(level))


def e_interval(tower, k, m, tol=None):
    """
    e_[k,k+m] with its projection residual.

    Raises:
        DepthError: level k+2m is not built
        ConsistencyError: the product is not a projection within tolerance
    """
    tol = tower.tol if tol is None else tol
    if m < 0 or k < -1:
        raise PreconditionError(f"e_[{k},{k + m}] needs k ≥ −1 and m ≥ 0")
    value = tower.interval(k, m)
    level = tower.level(k + 2 * m)
    residual = max(
        level.residual(value @ value, value),
        level.residual(level.adjoint(value), value),
    )
    if residual > tol:
        raise ConsistencyError(f"e_[{k},{k + m}] is not a projection (residual {residual:.3e})")
    return IntervalProjection(k, m, value, interval_exponent(m), residual)


def fvrt_check(tower, k, m, basis=None, samples=4, seed=None, tol=None):
    """
    Check that level k ⊆ level k+m ⊆ level k+2m is a basic construction with f = e_[k,k+m].

    Residuals:
        sum_identity: Σ λ* f λ = 1 for the tower basis λ of level k+m over level k
        compression: f x f = E(x) f for random x in level k+m
        expectation_two_ways: E(x) read back from f x f agrees with E(x)
        kernel_dimension: dimension of the kernel of n ↦ n f on level k
        generation_deficit: dim(level k+2m) − dim span{x f y}
        normalized_basis: condition (3) of {τ^{-m/2} f λ} over level k+m
        commutation: f commutes with level k
    """
    config = get_config()
    tol = tower.tol if tol is None else tol
    seed = tower.seed if seed is None else seed
    if m < 1:
        raise PreconditionError("fvrt_check needs m ≥ 1")
    top = k + 2 * m
    tower.require(top)
    f = e_interval(tower, k, m, tol).value
    if basis is None:
        basis = tower_basis(tower, m, tower.basis(k + 1))
    if basis.top != k + m or basis.bottom != k:
        raise PreconditionError(f"expected a basis of level {k + m} over level {k}")

    level = tower.level(top)
    middle = tower.level(k + m)
    bottom = tower.level(k)
    report = IdentityReport(f'basic construction ({k},{m})', tol)
    r = report.residuals
    report.details.update({'k': k, 'm': m, 'n': basis.n, 'scale_exponent': Fraction(-m, 2)})

    r.update({'sum_identity': basis.condition_2(f)['condition_2']})

    injection = np.array([
        (tower.lift(u, k, top) @ f).ravel() for u in bottom.units()]).T
    singular = scipy.linalg.svdvals(injection)
    r['kernel_dimension'] = float(np.sum(singular <= config.RANK_CUTOFF * singular[0]))
    report.details['smallest_singular_ratio'] = float(singular[-1] / singular[0])

    r['compression'] = 0.0
    r['expectation_two_ways'] = 0.0
    for s in range(samples):
        x = middle.random_element(seed + 300 + s)
        expected = tower.expectation(x, k + m, k)
        lifted = tower.lift(x, k + m, top)
        compressed = f @ lifted @ f
        r['compression'] = max(r['compression'], level.residual(
            compressed, tower.lift(expected, k, top) @ f))
        coefficients, *_ = np.linalg.lstsq(injection, compressed.ravel(), rcond=None)
        r['expectation_two_ways'] = max(r['expectation_two_ways'], bottom.residual(
            bottom.from_coords(coefficients), expected))

    middle_units = [tower.lift(u, k + m, top) for u in middle.units()]
    products = np.array([(x @ f @ y).ravel() for x in middle_units for y in middle_units])
    rows, _ = orthonormalize(products)
    r['generation_deficit'] = float(level.dim - len(rows))

    scale = tower.tau ** (-m / 2.0)
    family = Basis(tower, top, k + m,
                   [scale * (f @ tower.lift(lam, k + m, top)) for lam in basis.elements],
                   label='normalized')
    conditions = family.condition_3(samples=samples, seed=seed)
    r['normalized_basis'] = max(conditions.values())

    r['commutation'] = max(
        relative_residual(f @ tower.lift(u, k, top), tower.lift(u, k, top) @ f, np.linalg.norm)
        for u in bottom.units())
    logger.info(f"Checked basic construction for (k, m) = ({k}, {m})")
    return report


def contraction_identity(tower, n):
    """(e_1 … e_{2n+1})(e_{2n} … e_1) − τ^{2n} e_1, in level 2n+1."""
    top = 2 * n + 1
    lhs = jones_word(tower, range(1, top + 1), top) @ jones_word(tower, range(2 * n, 0, -1), top)
    rhs = tower.tau ** (2 * n) * tower.jones(1, top)
    return tower.level(top).residual(lhs, rhs)


def shift_identity(tower, n):
    """(e_{2n+2} … e_{n+3})(e_{n+2} … e_{2n+3}) − τⁿ e_{2n+2} e_{2n+3}, in level 2n+3."""
    top = 2 * n + 3
    lhs = (jones_word(tower, range(2 * n + 2, n + 2, -1), top)
           @ jones_word(tower, range(n + 2, 2 * n + 4), top))
    rhs = tower.tau ** n * (tower.jones(2 * n + 2, top) @ tower.jones(2 * n + 3, top))
    return tower.level(top).residual(lhs, rhs)


def temperley_lieb_residuals(tower):
    """Projection and Temperley-Lieb relations for every pair of built Jones projections."""
    residuals = {'projection': 0.0, 'adjacent': 0.0, 'distant': 0.0}
    tau = tower.tau
    for i in range(1, tower.depth + 1):
        level = tower.level(i)
        e = tower.jones(i)
        residuals['projection'] = max(
            residuals['projection'], level.residual(e @ e, e), level.residual(level.adjoint(e), e))
        for j in range(1, i):
            ei, ej = tower.jones(i, i), tower.jones(j, i)
            if i - j == 1:
                residuals['adjacent'] = max(
                    residuals['adjacent'],
                    level.residual(ei @ ej @ ei, tau * ei),
                    level.residual(ej @ ei @ ej, tau * ej))
            else:
                residuals['distant'] = max(residuals['distant'], level.residual(ei @ ej, ej @ ei))
    return residuals


def tl_identity_checks(tower, n, tol=None):
    """
    Contraction identity at n, the shift identity at n when level 2n+3 exists,
    and the Temperley-Lieb relations on every built level.
    """
    tol = tower.tol if tol is None else tol
    if 2 * n + 1 > tower.depth:
        raise DepthError(f"the contraction identity at n={n} needs depth {2 * n + 1}",
                         needed=2 * n + 1, available=tower.depth)
    report = IdentityReport(f'Jones identities n={n}', tol)
    report.residuals['contraction'] = contraction_identity(tower, n)
    if 2 * n + 3 <= tower.depth:
        report.residuals['shift'] = shift_identity(tower, n)
    report.residuals.update(temperley_lieb_residuals(tower))
    report.details['n'] = n
    return report


def recursion_exponent(n):
    """Exponent of τ in the e_[−1,n+1] recursion."""
    return -(n + 1)


def multistep_recursion_check(tower, n):
    """e_[−1,n+1] − τ^{-(n+1)} (e_{n+2} … e_{2n+3}) e_[−1,n] (e_{2n+2} … e_{n+2}), in level 2n+3."""
    top = 2 * n + 3
    if top > tower.depth:
        raise DepthError(f"the recursion at n={n} needs depth {top}", needed=top, available=tower.depth)
    lhs = tower.interval(-1, n + 2)
    inner = tower.lift(tower.interval(-1, n + 1), 2 * n + 1, top)
    rhs = (tower.tau ** recursion_exponent(n)) * (
        jones_word(tower, range(n + 2, 2 * n + 4), top)
        @ inner
        @ jones_word(tower, range(2 * n + 2, n + 1, -1), top))
    return tower.level(top).residual(lhs, rhs)
