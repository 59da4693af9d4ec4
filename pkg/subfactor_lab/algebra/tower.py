"""
The Jones tower N = M₋₁ ⊆ M₀ = M ⊆ M₁ ⊆ M₂ ⊆ … of basic constructions.

Level k ≥ 1 is realized as operators on the GNS space of level k−1. The trace on
level k is defined by the canonical decomposition

    X = Σ_i up(c_i) · e_k · up(λ_i),    Tr(X) = τ · Σ_i tr(c_i λ_i),

where {λ_i} is a basis of level k−1 over level k−2. Level 1 is first built
without a trace, the basis of M over N is extracted from its block structure,
and only then is the trace attached.
"""
import logging
import operator
from fractions import Fraction
from functools import reduce

import numpy as np

from subfactor_lab.algebra.bases import construct_basis, lift_basis
from subfactor_lab.algebra.levels import AlgebraLevel, OperatorLevel
from subfactor_lab.algebra.multimatrix import complex_gaussian, orthonormalize, relative_residual
from subfactor_lab.algebra.structure import algebra_structure, block_structure
from subfactor_lab.config import get_config
from subfactor_lab.errors import ConsistencyError, DepthError, NumericError, PreconditionError

logger = logging.getLogger(__name__)


def total(items):
    return reduce(operator.add, items)


def frobenius(x):
    return float(np.linalg.norm(x))


def predicted_block_dims(inclusion, depth):
    """Block sizes per level: b₋₁ = d, b₀ = n, then alternately G·b and Gᵗ·b."""
    G = inclusion.matrix
    dims = {-1: np.array(inclusion.small.block_dims), 0: np.array(inclusion.big.block_dims)}
    for k in range(1, depth + 1):
        dims[k] = G @ dims[k - 1] if k % 2 else G.T @ dims[k - 1]
    return {k: tuple(int(b) for b in v) for k, v in dims.items()}


def predicted_dims(inclusion, depth):
    """Linear dimension Σ b² of every level up to ``depth``."""
    return {k: sum(b * b for b in v) for k, v in predicted_block_dims(inclusion, depth).items()}


def feasible_depth(inclusion, limit=32):
    """Deepest level within the GNS-dimension and level-size caps."""
    config = get_config()
    dims = predicted_dims(inclusion, limit)
    depth = 0
    for k in range(1, limit + 1):
        if dims[k] > config.MAX_GNS_DIM or dims[k] * dims[k - 1] ** 2 > config.MAX_LEVEL_ENTRIES:
            break
        depth = k
    return depth


class Tower:
    """
    Tower of basic constructions over a connected inclusion with Markov data.

    Args:
        inclusion: validated Inclusion (Markov data is attached if missing)
        depth: number of basic constructions to perform
        seed: seed for every generic choice made while building
        tol: relative tolerance of the internal consistency checks
    """

    def __init__(self, inclusion, depth=1, seed=None, tol=None):
        config = get_config()
        if inclusion.markov is None:
            inclusion = inclusion.with_markov()
        self.inclusion = inclusion
        self.tau = inclusion.markov.tau
        self.seed = config.SEED if seed is None else seed
        self.tol = config.TOLERANCE if tol is None else tol
        self.depth = 0
        self._levels = {
            -1: AlgebraLevel(-1, inclusion.small),
            0: AlgebraLevel(0, inclusion.big),
        }
        self._structures = {
            -1: algebra_structure(self._levels[-1]),
            0: algebra_structure(self._levels[0], inclusion.matrix),
        }
        self._bases = {}
        self._jones = {}
        self.extend_to(depth)

    # -- levels and maps ------------------------------------------------

    def level(self, k):
        if k not in self._levels:
            raise DepthError(f"level {k} is not built (depth {self.depth})",
                             needed=k, available=self.depth)
        return self._levels[k]

    def require(self, k):
        """Raise DepthError unless level k is built."""
        self.level(k)

    def dim(self, k):
        return self.level(k).dim

    def identity(self, k):
        return self.level(k).identity()

    def gns(self, k):
        return self.level(k).gns()

    def up(self, k, x):
        """Embed an element of level k−1 into level k."""
        if k == 0:
            return self.inclusion.embed(x)
        return self.level(k - 1).left_rep(x)

    def lift(self, x, source, target):
        for k in range(source + 1, target + 1):
            x = self.up(k, x)
        return x

    def jones(self, k, at=None):
        """e_k viewed in level ``at`` (default: level k)."""
        at = k if at is None else at
        if k < 1:
            raise PreconditionError(f"Jones projections start at e_1, got e_{k}")
        if (k, at) not in self._jones:
            if at == k:
                self._jones[(k, at)] = self.level(k).jones
            else:
                self._jones[(k, at)] = self.up(at, self.jones(k, at - 1))
        return self._jones[(k, at)]

    def jones_projection(self, k):
        """e_k as a matrix on the GNS space of level k−1."""
        return self.jones(k)

    def _jones_matrix(self, k):
        # projection onto the image of level k−2 inside L²(level k−1)
        lower, upper = self.level(k - 2), self.level(k - 1)
        columns = np.array([upper.vector(self.up(k - 1, o)) for o in lower.ortho_basis()]).T
        q, _ = np.linalg.qr(columns)
        return q @ q.conj().T

    # -- construction ---------------------------------------------------

    def extend_to(self, depth):
        while self.depth < depth:
            self.basic_construction_step()
        return self

    def _check_cost(self, k):
        config = get_config()
        dims = predicted_dims(self.inclusion, k)
        if dims[k] > config.MAX_GNS_DIM or dims[k] * dims[k - 1] ** 2 > config.MAX_LEVEL_ENTRIES:
            available = feasible_depth(self.inclusion)
            raise DepthError(
                f"level {k} of dimension {dims[k]} on a space of dimension {dims[k - 1]} "
                f"exceeds the dense-matrix caps; feasible depth is {available}",
                needed=k, available=available)
        return dims[k]

    def _spanning_set(self, k, jones):
        # k ≥ 2: x·e_k·y = Σ_j (x a_j)·e_k·λ_j, so the right factors can be the basis
        lower = self.level(k - 1)
        reps = np.array([lower.left_rep(u) for u in lower.units()])
        if k == 1:
            right = reps
        else:
            right = np.array([lower.left_rep(lam) for lam in self.basis(k - 1).elements])
        products = (reps @ jones)[:, None] @ right[None, :]
        return products.reshape(-1, jones.size)

    def _check_closure(self, level):
        rng = np.random.default_rng(self.seed + level.index)
        x = level.from_coords(complex_gaussian(rng, level.dim))
        y = level.from_coords(complex_gaussian(rng, level.dim))
        residuals = {
            'identity': level.span_residual(level.identity()),
            'product': level.span_residual(x @ y),
            'adjoint': level.span_residual(level.adjoint(x)),
        }
        worst = max(residuals, key=residuals.get)
        if residuals[worst] > self.tol:
            raise ConsistencyError(
                f"level {level.index} span is not a unital *-algebra: "
                f"{worst} residual {residuals[worst]:.3e}")

    def basic_construction_step(self):
        """Build level depth+1 from level depth and the Jones projection e_{depth+1}."""
        k = self.depth + 1
        expected = self._check_cost(k)
        jones = self._jones_matrix(k)
        vectors = self._spanning_set(k, jones)
        rows, _ = orthonormalize(vectors)
        if len(rows) != expected:
            raise ConsistencyError(
                f"level {k} has dimension {len(rows)}, expected {expected} from the inclusion matrix")
        size = jones.shape[0]
        level = OperatorLevel(k, rows.reshape(-1, size, size), jones)
        self._check_closure(level)
        self._levels[k] = level

        if k == 1:
            self._structures[1] = block_structure(
                level, self._structures[0], lambda x: self.up(1, x), seed=self.seed)
            self._bases[0] = construct_basis(self, seed=self.seed)

        weights = np.array([self.trace_extension(k, f) for f in level.frame])
        density = np.tensordot(weights, level.frame.conj().transpose(0, 2, 1), axes=1)
        density = 0.5 * (density + density.conj().T)
        self._levels[k] = level.with_density(density)
        self.depth = k
        logger.info(f"Built level {k}: dimension {level.dim} on a space of dimension {size}")
        return self._levels[k]

    # -- bases ----------------------------------------------------------

    def basis(self, j):
        """Basis of level j over level j−1 (j ≥ 0); lifted from below for j ≥ 1."""
        if j < 0:
            raise PreconditionError(f"no basis of level {j} over level {j - 1}")
        if j not in self._bases:
            self.require(max(j, 1))
            self._bases[j] = lift_basis(self, j - 1, self.basis(j - 1))
        return self._bases[j]

    # -- canonical decomposition and its consequences --------------------

    def canonical_decomposition(self, k, X, basis=None, check=True):
        """
        Coefficients c_i in level k−1 with X = Σ up(c_i)·e_k·up(λ_i).

        Computed without any expectation: c_i is X applied to the GNS vector of λ_i*.
        """
        if k < 1:
            raise PreconditionError("canonical decomposition needs k ≥ 1")
        basis = self.basis(k - 1) if basis is None else basis
        lower = self.level(k - 1)
        coefficients = [
            lower.element(X @ lower.vector(lower.adjoint(lam))) for lam in basis.elements
        ]
        if check:
            jones = self.jones(k)
            rebuilt = total(
                self.up(k, c) @ jones @ self.up(k, lam)
                for c, lam in zip(coefficients, basis.elements))
            residual = relative_residual(rebuilt, X, frobenius)
            if residual > self.tol:
                raise NumericError(
                    f"canonical decomposition on level {k} misses by {residual:.3e}")
        return coefficients

    def trace_extension(self, k, X, basis=None):
        """Markov trace of level k; levels ≤ 0 use their block weights."""
        if k <= 0:
            return self.level(k).trace(X)
        basis = self.basis(k - 1) if basis is None else basis
        lower = self.level(k - 1)
        coefficients = self.canonical_decomposition(k, X, basis)
        return self.tau * sum(
            lower.trace(c @ lam) for c, lam in zip(coefficients, basis.elements))

    def trace(self, k, X):
        return self.level(k).trace(X)

    def expectation_onto_previous(self, k, X):
        """Trace-preserving conditional expectation of level k onto level k−1."""
        if k == 0:
            return self.inclusion.conditional_expectation(X)
        basis = self.basis(k - 1)
        coefficients = self.canonical_decomposition(k, X, basis)
        return self.tau * total(c @ lam for c, lam in zip(coefficients, basis.elements))

    def expectation(self, X, top, bottom):
        """Composite expectation from level ``top`` down to level ``bottom``."""
        for k in range(top, bottom, -1):
            X = self.expectation_onto_previous(k, X)
        return X

    def pushdown(self, k, X):
        """The unique x₀ in level k−1 with X·e_k = up(x₀)·e_k, as τ⁻¹·E(X·e_k)."""
        jones = self.jones(k)
        x0 = (1.0 / self.tau) * self.expectation_onto_previous(k, X @ jones)
        residual = relative_residual(X @ jones, self.up(k, x0) @ jones, frobenius)
        if residual > self.tol:
            raise NumericError(f"pushdown on level {k} misses by {residual:.3e}")
        return x0

    def read_back(self, k, X):
        """Pushdown without a trace on level k: X applied to the GNS vector of 1."""
        lower = self.level(k - 1)
        return lower.element(X @ lower.vector(lower.identity()))

    # -- structure ------------------------------------------------------

    def _structure(self, k):
        if k not in self._structures:
            previous = self._structure(k - 1)
            self._structures[k] = block_structure(
                self.level(k), previous, lambda x: self.up(k, x), seed=self.seed + k)
        return self._structures[k]

    def block_structure(self, k, with_next=True):
        """Block dims, central projections and inclusion matrices of level k."""
        structure = self._structure(k)
        if with_next and structure.inclusion_to_next is None and k + 1 <= self.depth:
            structure.inclusion_to_next = self._structure(k + 1).inclusion_from_previous
        return structure

    def predicted_dims(self, depth=None):
        return predicted_dims(self.inclusion, self.depth if depth is None else depth)

    def predicted_block_dims(self, depth=None):
        return predicted_block_dims(self.inclusion, self.depth if depth is None else depth)

    # -- multi-step projections -----------------------------------------

    def interval(self, k, m):
        """
        e_[k,k+m] in level k+2m: τ^{-m(m-1)/2} times the groups
        (e_{k+m+1+j} e_{k+m+j} … e_{k+2+j}) for j = 0..m−1.
        """
        if m == 0:
            self.require(k)
            return self.identity(k)
        top = k + 2 * m
        if top > self.depth:
            raise DepthError(
                f"e_[{k},{k + m}] lives in level {top}, tower depth is {self.depth}",
                needed=top, available=self.depth)
        product = self.identity(top)
        for j in range(m):
            for index in range(k + m + 1 + j, k + 1 + j, -1):
                product = product @ self.jones(index, top)
        return interval_prefactor(self.tau, m) * product


def interval_exponent(m):
    """Exponent of τ in the prefactor of e_[k,k+m]."""
    return Fraction(-m * (m - 1), 2)


def interval_prefactor(tau, m):
    return tau ** float(interval_exponent(m))
