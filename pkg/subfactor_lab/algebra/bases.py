"""
Pimsner-Popa bases.

A family {λ_i} in level ``top`` is a basis over level ``bottom`` when any of the
equivalent conditions holds:

    (1) Q = (E(λ_i λ_j*)) is a projection in M_n(bottom) with normalized trace τ⁻¹/n,
    (2) Σ λ_i* f λ_i = 1 for the Jones projection f of the pair,
    (3) x = Σ E(x λ_i*) λ_i for every x in ``top``.

For adjacent levels f = e_{top+1}; for a pair of levels further apart f is the
multi-step projection e_[bottom, top] and τ is replaced by τ^{top−bottom}.
"""
import logging
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import TYPE_CHECKING

import numpy as np

from subfactor_lab.algebra.multimatrix import relative_residual
from subfactor_lab.algebra.structure import matrix_units
from subfactor_lab.config import get_config
from subfactor_lab.errors import ConsistencyError, DepthError, PreconditionError
from subfactor_lab.models.serializer import SerializerMixin

if TYPE_CHECKING:
    from subfactor_lab.algebra.tower import Tower

logger = logging.getLogger(__name__)


def _total(items):
    return reduce(operator.add, items)


@dataclass
class BasisReport(SerializerMixin):
    n: int
    top: int
    bottom: int
    tau_effective: float
    tolerance: float
    residuals: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r <= self.tolerance for r in self.residuals.values())


@dataclass(eq=False)
class Basis:
    """
    A finite family in level ``top`` certified over level ``bottom``.

    Args:
        tower: the Tower holding both levels
        top: level containing the elements
        bottom: level the family is a basis over
        elements: λ_1..λ_n
        projection: Jones projection used by condition (2); defaults to e_[bottom, top]
    """
    tower: 'Tower'
    top: int
    bottom: int
    elements: list
    label: str = ''
    projection: object = field(default=None, repr=False)

    @property
    def n(self):
        return len(self.elements)

    @property
    def steps(self):
        return self.top - self.bottom

    @property
    def tau_effective(self):
        return self.tower.tau ** self.steps

    @property
    def q_matrix(self):
        """q_ij = E(λ_i λ_j*) in the bottom level."""
        level = self.tower.level(self.top)
        return [
            [self.expectation(a @ level.adjoint(b)) for b in self.elements]
            for a in self.elements
        ]

    def expectation(self, x):
        return self.tower.expectation(x, self.top, self.bottom)

    def up(self, x):
        return self.tower.lift(x, self.bottom, self.top)

    def q_operator(self, q=None):
        """Q as a block matrix of left regular representations of the q_ij."""
        bottom = self.tower.level(self.bottom)
        q = self.q_matrix if q is None else q
        return np.block([[bottom.left_rep(entry) for entry in row] for row in q])

    def coordinates(self, x):
        """Row (E(x λ_1*), …, E(x λ_n*)) over the bottom level."""
        level = self.tower.level(self.top)
        return [self.expectation(x @ level.adjoint(lam)) for lam in self.elements]

    def row_times_q(self, row):
        q = self.q_matrix
        return [_total(row[i] @ q[i][j] for i in range(self.n)) for j in range(self.n)]

    def reconstruct(self, row):
        return _total(self.up(r) @ lam for r, lam in zip(row, self.elements))

    # -- the three conditions -------------------------------------------

    def condition_1(self):
        bottom = self.tower.level(self.bottom)
        q = self.q_matrix
        Q = self.q_operator(q)
        norm = np.linalg.norm
        trace = sum(bottom.trace(q[i][i]) for i in range(self.n)).real / self.n
        return {
            'condition_1_projection': max(
                relative_residual(Q @ Q, Q, norm), relative_residual(Q.conj().T, Q, norm)),
            'condition_1_trace': abs(trace - (1.0 / self.tau_effective) / self.n),
        }

    def default_projection(self):
        return self.tower.interval(self.bottom, self.steps)

    def condition_2(self, projection=None):
        """Σ λ* f λ = 1, evaluated in level bottom + 2·steps where f lives."""
        if projection is None:
            projection = self.projection
        if projection is None:
            projection = self.default_projection()
        tower = self.tower
        target = self.bottom + 2 * self.steps
        level = tower.level(target)
        lifted = [tower.lift(lam, self.top, target) for lam in self.elements]
        total = _total(level.adjoint(lam) @ projection @ lam for lam in lifted)
        return {'condition_2': level.residual(total, level.identity())}

    def sample_elements(self, samples=None, seed=None, max_units=256):
        config = get_config()
        samples = config.SAMPLES if samples is None else samples
        seed = self.tower.seed if seed is None else seed
        level = self.tower.level(self.top)
        randoms = [level.random_element(seed + 1000 + s) for s in range(samples)]
        return randoms + level.units()[:max_units]

    def condition_3(self, samples=None, seed=None):
        level = self.tower.level(self.top)
        direct, adjoint_form = 0.0, 0.0
        for x in self.sample_elements(samples, seed):
            rebuilt = self.reconstruct(self.coordinates(x))
            direct = max(direct, level.residual(rebuilt, x))
            rebuilt = _total(
                level.adjoint(lam) @ self.up(self.expectation(lam @ x)) for lam in self.elements)
            adjoint_form = max(adjoint_form, level.residual(rebuilt, x))
        return {'condition_3': direct, 'condition_3_adjoint': adjoint_form}

    def verify(self, tol=None, samples=None, seed=None):
        """Residuals of all three conditions; condition (2) is skipped when the tower is too shallow."""
        tol = get_config().TOLERANCE if tol is None else tol
        report = BasisReport(self.n, self.top, self.bottom, self.tau_effective, tol)
        report.residuals.update(self.condition_1())
        try:
            report.residuals.update(self.condition_2())
        except DepthError as e:
            logger.debug(f"Condition (2) skipped: {e}")
            report.skipped.append('condition_2')
        report.residuals.update(self.condition_3(samples, seed))
        return report

    def watatani_residual(self):
        level = self.tower.level(self.top)
        index = watatani_index(self)
        return level.residual(index, (1.0 / self.tau_effective) * level.identity())


# -- constructions ------------------------------------------------------

def construct_basis(tower, seed=None):
    """
    Basis of M over N from partial isometries of M₁ under e₁.

    Each block of M₁ is cut into chunks of as many minimal projections as e₁
    holds in that block; every chunk gives a partial isometry v with
    v*v ≤ e₁, the chunks of all blocks are summed into v_1..v_n with
    Σ v_i v_i* = 1, and λ_i = (pushdown of v_i)*.
    """
    seed = tower.seed if seed is None else seed
    level = tower.level(1)
    structure = tower.block_structure(1, with_next=False)
    jones = level.jones
    per_block = []
    for r, central in enumerate(structure.central_projections):
        size = structure.block_dims[r]
        units, under = matrix_units(level, central, jones, size, seed + 31 * r)
        if under == 0:
            raise ConsistencyError(f"e₁ vanishes on block {r} of level 1")
        chunks = []
        for start in range(0, size, under):
            rows = range(start, min(start + under, size))
            chunks.append(_total(units[p] @ units[l].conj().T for l, p in enumerate(rows)))
        per_block.append(chunks)

    n = max(len(chunks) for chunks in per_block)
    isometries = [
        _total(chunks[i] for chunks in per_block if i < len(chunks)) for i in range(n)
    ]
    elements = [tower.read_back(1, v).adjoint() for v in isometries]
    logger.info(f"Constructed a basis of M over N with {n} elements")
    return Basis(tower, 0, -1, elements, label='constructed')


def lift_basis(tower, k, basis):
    """{τ^{-1/2} e_{k+1} up(λ_i)}: basis of level k+1 over level k."""
    if basis.top != k or basis.bottom != k - 1:
        raise PreconditionError(f"lift_basis expects a basis of level {k} over level {k - 1}")
    jones = tower.jones(k + 1)
    scale = tower.tau ** -0.5
    elements = [scale * (jones @ tower.up(k + 1, lam)) for lam in basis.elements]
    return Basis(tower, k + 1, k, elements, label=f'lift of {basis.label or "basis"}')


def compose_bases(inner, outer):
    """{λ_i μ_j}, i outer and j inner: basis of outer.top over inner.bottom."""
    if inner.top != outer.bottom or inner.tower is not outer.tower:
        raise PreconditionError("bases do not form a chain N ⊆ M ⊆ P")
    tower = inner.tower
    elements = [
        tower.lift(lam, inner.top, outer.top) @ mu
        for lam in inner.elements
        for mu in outer.elements
    ]
    return Basis(tower, outer.top, inner.bottom, elements, label='composite')


def tower_basis_exponent(k):
    """Exponent −k(k−1)/4 of τ in the tower-basis prefactor."""
    return Fraction(-k * (k - 1), 4)


def tower_basis(tower, k, basis):
    """
    Basis of level b+k over level b from a basis of level b+1 over level b.

    Elements are τ^{-k(k-1)/4} λ_{i_1} e'_1 λ_{i_2} e'_2 e'_1 λ_{i_3} … λ_{i_k}
    over all index tuples, with e'_j = e_{b+1+j}; b = −1 gives a basis of
    level k−1 over N.
    """
    if basis.steps != 1:
        raise PreconditionError("tower_basis expects a basis of adjacent levels")
    config = get_config()
    if basis.n ** k > config.MAX_BASIS_CARDINALITY:
        raise PreconditionError(
            f"tower basis would have {basis.n ** k} elements, cap is {config.MAX_BASIS_CARDINALITY}")
    b = basis.bottom
    if k == 1:
        return Basis(tower, b + 1, b, list(basis.elements), label='tower basis k=1')
    top = b + k
    tower.require(top)
    lifted = [tower.lift(lam, b + 1, top) for lam in basis.elements]
    current = list(lifted)
    for j in range(2, k + 1):
        # e'_{j-1} … e'_1
        descending = _total_product(
            tower.jones(b + 1 + i, top) for i in range(j - 1, 0, -1))
        current = [p @ descending @ lam for p in current for lam in lifted]
    prefactor = tower.tau ** float(tower_basis_exponent(k))
    elements = [prefactor * p for p in current]
    return Basis(tower, top, b, elements, label=f'tower basis k={k}')


def _total_product(items):
    return reduce(operator.matmul, items)


def watatani_index(basis):
    """Σ λ_i* λ_i; equals τ⁻¹·1 for a basis."""
    level = basis.tower.level(basis.top)
    return _total(level.adjoint(lam) @ lam for lam in basis.elements)


def perturbed(basis, index=0, amount=0.1):
    """The family with λ_index replaced by λ_index + amount·1."""
    level = basis.tower.level(basis.top)
    elements = list(basis.elements)
    elements[index] = elements[index] + amount * level.identity()
    return Basis(basis.tower, basis.top, basis.bottom, elements, label='perturbed')


def mixed(basis, unitary):
    """μ_i = Σ_j U_ij λ_j for a scalar unitary U; again a basis."""
    unitary = np.asarray(unitary)
    elements = [
        _total(unitary[i, j] * lam for j, lam in enumerate(basis.elements))
        for i in range(basis.n)
    ]
    return Basis(basis.tower, basis.top, basis.bottom, elements, label='mixed')
