"""
Automorphisms of M leaving N globally invariant, and their extension up the tower.

An automorphism of a multi-matrix algebra is a block permutation σ followed by
an inner automorphism, α(x) = u·σ(x)·u*. Given α₀ with α₀(N) = N, the
extension to level k is

    α_k(X) = Σ_i up(α_{k-1}(c_i)) · e_k · up(α_{k-1}(λ_i))

for the canonical decomposition X = Σ up(c_i) e_k up(λ_i). Extensions are
stored as matrices in the level's linear basis.
"""
import itertools
import logging
import operator
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from subfactor_lab.algebra.multimatrix import complex_gaussian, span_basis
from subfactor_lab.config import get_config
from subfactor_lab.errors import PreconditionError, StructuralError
from subfactor_lab.models.serializer import SerializerMixin

logger = logging.getLogger(__name__)


def _total(items):
    return reduce(operator.add, items)


def random_unitary(size, rng):
    """Haar-distributed unitary: QR of a complex Gaussian with the phases of R removed."""
    q, r = np.linalg.qr(complex_gaussian(rng, (size, size)))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


@dataclass(eq=False)
class FdAutomorphism:
    """α(x) = u · permute(x) · u*, where permute moves block j to block σ(j)."""
    inclusion: object
    sigma: tuple
    unitary: object
    n_invariant: bool = False

    @property
    def algebra(self):
        return self.inclusion.big

    def permute(self, x):
        blocks = [None] * len(self.sigma)
        for j, target in enumerate(self.sigma):
            blocks[target] = x.blocks[j]
        return self.algebra.element(blocks)

    def apply(self, x):
        return self.unitary @ self.permute(x) @ self.unitary.adjoint()

    __call__ = apply

    def restrict(self, n):
        """α on N, read through the embedding."""
        return self.inclusion.conditional_expectation(self.apply(self.inclusion.embed(n)))

    def compose(self, other):
        """self ∘ other."""
        sigma = tuple(self.sigma[other.sigma[j]] for j in range(len(self.sigma)))
        unitary = self.unitary @ self.permute(other.unitary)
        return make_automorphism(self.inclusion, sigma, unitary)

    def matrix(self):
        """Matrix of α in the matrix-unit coordinates of M."""
        return np.array([self.apply(u).vector() for u in self.algebra.units()]).T


def check_n_invariance(inclusion, sigma, unitary):
    """α(embed(N)) = embed(N), compared as spans."""
    embedded = [inclusion.embed(u) for u in inclusion.small.units()]
    alpha = FdAutomorphism(inclusion, sigma, unitary)
    images = [alpha.apply(x) for x in embedded]
    _, rank = span_basis(embedded + images)
    return rank == inclusion.small.dim


def make_automorphism(inclusion, sigma, unitary, tol=None):
    """
    Validate (σ, u) and flag whether α(N) = N.

    Raises:
        StructuralError: σ is not a permutation of M's blocks preserving block sizes
        PreconditionError: u is not unitary
    """
    tol = get_config().TOLERANCE if tol is None else tol
    algebra = inclusion.big
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(algebra.num_blocks)):
        raise StructuralError(f"σ = {sigma} is not a permutation of {algebra.num_blocks} blocks")
    dims = algebra.block_dims
    if any(dims[sigma[j]] != dims[j] for j in range(len(sigma))):
        raise StructuralError(f"σ = {sigma} does not preserve block sizes {dims}")
    if unitary.parent != algebra:
        unitary = algebra.element(unitary.blocks)
    defect = (unitary.adjoint() @ unitary - algebra.identity()).hs_norm()
    if defect > tol:
        raise PreconditionError(f"u is not unitary: ‖u*u − 1‖₂ = {defect:.3e}")
    invariant = check_n_invariance(inclusion, sigma, unitary)
    logger.debug(f"Automorphism σ={sigma}: N-invariant = {invariant}")
    return FdAutomorphism(inclusion, sigma, unitary, invariant)


def identity_automorphism(inclusion):
    algebra = inclusion.big
    return make_automorphism(inclusion, tuple(range(algebra.num_blocks)), algebra.identity())


def check_trace_preserving(alpha):
    """max |tr(α(x)) − tr(x)| over the matrix units of M."""
    if not alpha.n_invariant:
        raise PreconditionError("trace preservation is only asserted for N-invariant automorphisms")
    return max(abs(alpha.apply(u).trace() - u.trace()) for u in alpha.algebra.units())


def bratteli_symmetries(inclusion, limit=720):
    """
    Every pair (π, σ) with G(π(i), σ(j)) = G(i, j), d_π(i) = d_i and n_σ(j) = n_j.

    At most ``limit`` permutations σ are examined.
    """
    G = inclusion.matrix
    d = inclusion.small.block_dims
    n = inclusion.big.block_dims
    found = []
    for sigma in itertools.islice(itertools.permutations(range(len(n))), limit):
        if any(n[sigma[j]] != n[j] for j in range(len(n))):
            continue
        moved = G[:, list(sigma)]
        candidates = [
            [a for a in range(len(d)) if d[a] == d[i] and np.array_equal(moved[a], G[i])]
            for i in range(len(d))
        ]
        for pi in itertools.product(*candidates):
            if len(set(pi)) == len(pi):
                found.append((tuple(pi), tuple(sigma)))
    return found


def symmetry_unitary(inclusion, pi, sigma):
    """Permutation unitary P with P·permute(embed(a))·P* = embed(a') where a'_π(i) = a_i."""
    algebra = inclusion.big
    blocks = [None] * algebra.num_blocks
    for j, target in enumerate(sigma):
        size = algebra.block_dims[j]
        source_segments = inclusion._segments(j)
        target_slots = {}
        for i, offset in inclusion._segments(target):
            target_slots.setdefault(i, []).append(offset)
        P = np.zeros((size, size), dtype=complex)
        taken = {}
        for i, offset in source_segments:
            slot = target_slots[pi[i]][taken.get(i, 0)]
            taken[i] = taken.get(i, 0) + 1
            for s in range(inclusion.small.block_dims[i]):
                P[slot + s, offset + s] = 1.0
        blocks[target] = P
    return algebra.element(blocks)


def relative_commutant_unitary(inclusion, rng):
    """Random unitary of N'∩M: blocks kron(W_i, 1_{d_i}) inside every M-block."""
    G = inclusion.matrix
    blocks = []
    for j in range(inclusion.big.num_blocks):
        parts = []
        for i, d in enumerate(inclusion.small.block_dims):
            if G[i, j]:
                parts.append(np.kron(random_unitary(int(G[i, j]), rng), np.eye(d)))
        blocks.append(scipy.linalg.block_diag(*parts))
    return inclusion.big.element(blocks)


def random_n_invariant(inclusion, seed):
    """Random α₀ with α₀(N) = N: Ad(embed(w)·c·P) after a Bratteli symmetry."""
    rng = np.random.default_rng(seed)
    symmetries = bratteli_symmetries(inclusion)
    pi, sigma = symmetries[rng.integers(len(symmetries))]
    w = inclusion.small.element(random_unitary(d, rng) for d in inclusion.small.block_dims)
    c = relative_commutant_unitary(inclusion, rng)
    P = symmetry_unitary(inclusion, pi, sigma)
    return make_automorphism(inclusion, sigma, inclusion.embed(w) @ c @ P)


# -- extension up the tower ---------------------------------------------

@dataclass
class ExtensionReport(SerializerMixin):
    level: int
    tolerance: float
    residuals: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r <= self.tolerance for r in self.residuals.values())


@dataclass(eq=False)
class TowerAutomorphism:
    """α₀ on M and its extensions α_1..α_depth stored as matrices in each level's frame."""
    tower: object
    base: FdAutomorphism
    matrices: dict = field(default_factory=dict)

    @property
    def depth(self):
        return max(self.matrices, default=0)

    def apply(self, k, X):
        if k == 0:
            return self.base.apply(X)
        if k == -1:
            return self.base.restrict(X)
        level = self.tower.level(k)
        return level.from_coords(self.matrices[k] @ level.coords(X))

    def compose(self, other):
        """self ∘ other, level by level."""
        depth = min(self.depth, other.depth)
        return TowerAutomorphism(
            self.tower,
            self.base.compose(other.base),
            {k: self.matrices[k] @ other.matrices[k] for k in range(1, depth + 1)},
        )

    def distance(self, other, k):
        """Relative distance between two extensions on level k."""
        if k == 0:
            a, b = self.base.matrix(), other.base.matrix()
        else:
            a, b = self.matrices[k], other.matrices[k]
        return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b)))


def _check_invariance(tower, alpha, k, tol):
    """α_{k−1}(level k−2) ⊆ level k−2, measured as Y − up(E(Y))."""
    if k == 1:
        if not alpha.base.n_invariant:
            raise PreconditionError("α₀ does not leave N invariant")
        return
    upper = tower.level(k - 1)
    lower = tower.level(k - 2)
    worst = 0.0
    for y in lower.units():
        image = alpha.apply(k - 1, tower.up(k - 1, y))
        back = tower.up(k - 1, tower.expectation_onto_previous(k - 1, image))
        worst = max(worst, upper.residual(image, back))
    if worst > tol:
        raise PreconditionError(
            f"α_{k - 1} does not leave level {k - 2} invariant (residual {worst:.3e})")


def _extension_matrix(tower, alpha, k, basis):
    level = tower.level(k)
    jones = tower.jones(k)
    images = [tower.up(k, alpha.apply(k - 1, lam)) for lam in basis.elements]
    columns = []
    for f in level.frame:
        coefficients = tower.canonical_decomposition(k, f, basis)
        value = _total(
            tower.up(k, alpha.apply(k - 1, c)) @ jones @ image
            for c, image in zip(coefficients, images))
        columns.append(level.coords(value))
    return np.array(columns).T


def extend_automorphism(tower, basis, alpha0, tol=None):
    """α₁ on level 1 from α₀ and a basis of M over N."""
    tol = tower.tol if tol is None else tol
    alpha = TowerAutomorphism(tower, alpha0)
    _check_invariance(tower, alpha, 1, tol)
    alpha.matrices[1] = _extension_matrix(tower, alpha, 1, basis)
    logger.info("Extended α₀ to level 1")
    return alpha


def extend_tower(tower, alpha0, depth=None, tol=None):
    """α_1..α_depth, re-checking α_{k−1}(level k−2) = level k−2 before every step."""
    depth = tower.depth if depth is None else depth
    tol = tower.tol if tol is None else tol
    tower.require(depth)
    alpha = TowerAutomorphism(tower, alpha0)
    for k in range(1, depth + 1):
        _check_invariance(tower, alpha, k, tol)
        alpha.matrices[k] = _extension_matrix(tower, alpha, k, tower.basis(k - 1))
        logger.info(f"Extended automorphism to level {k}")
    return alpha


def extension_report(alpha, k, samples=4, seed=None, tol=None):
    """Homomorphism, *, Jones, restriction, trace, bijectivity, expectation and isometry residuals."""
    tower = alpha.tower
    tol = tower.tol if tol is None else tol
    seed = tower.seed if seed is None else seed
    level = tower.level(k)
    lower = tower.level(k - 1)
    report = ExtensionReport(k, tol)
    r = report.residuals
    for key in ('homomorphism', 'star', 'restriction', 'trace', 'expectation', 'isometry'):
        r[key] = 0.0
    for s in range(samples):
        x = level.random_element(seed + 500 + 2 * s)
        y = level.random_element(seed + 501 + 2 * s)
        ax, ay = alpha.apply(k, x), alpha.apply(k, y)
        r['homomorphism'] = max(r['homomorphism'], level.residual(alpha.apply(k, x @ y), ax @ ay))
        r['star'] = max(r['star'], level.residual(alpha.apply(k, level.adjoint(x)), level.adjoint(ax)))
        r['trace'] = max(r['trace'], abs(level.trace(ax) - level.trace(x)))
        hs = level.hs_norm(x)
        r['isometry'] = max(r['isometry'], abs(level.hs_norm(ax) - hs) / hs)
        z = lower.random_element(seed + 700 + s)
        r['restriction'] = max(r['restriction'], level.residual(
            alpha.apply(k, tower.up(k, z)), tower.up(k, alpha.apply(k - 1, z))))
        r['expectation'] = max(r['expectation'], lower.residual(
            tower.expectation_onto_previous(k, ax),
            alpha.apply(k - 1, tower.expectation_onto_previous(k, x))))
    if k >= 1:
        r['jones'] = max(
            level.residual(alpha.apply(k, tower.jones(j, k)), tower.jones(j, k))
            for j in range(1, k + 1))
        matrix = alpha.matrices[k]
    else:
        matrix = alpha.base.matrix()
    singular = scipy.linalg.svdvals(matrix)
    r['bijective_rank_deficit'] = float(np.sum(singular <= 1e-8 * singular[0]))
    return report
