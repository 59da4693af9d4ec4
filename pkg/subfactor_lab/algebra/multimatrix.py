"""
Finite direct sums of complex matrix algebras.

A ``MultiMatrixAlgebra`` is M_{n_1} ⊕ ... ⊕ M_{n_p} together with trace
weights t_j, the trace of a minimal projection in block j, so that

    tr(x) = Σ_j t_j · Tr(x_j)

is a faithful tracial state. ``AlgebraElement`` values are immutable: every
operation returns a fresh element.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from subfactor_lab.config import get_config
from subfactor_lab.errors import StructuralError

logger = logging.getLogger(__name__)

STATE_TOLERANCE = 1e-8


def complex_gaussian(rng, shape):
    """Standard complex Gaussian entries, E|z|^2 = 1."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class MultiMatrixAlgebra:
    """
    Block dimensions plus trace weights.

    Args:
        block_dims: sizes n_1..n_p of the matrix blocks
        trace_weights: t_1..t_p; defaults to the normalized trace t_j = 1/Σn
    """
    block_dims: tuple
    trace_weights: tuple = None

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise StructuralError(f"block dimensions must be positive, got {dims}")
        if self.trace_weights is None:
            weights = tuple(1.0 / sum(dims) for _ in dims)
        else:
            weights = tuple(float(t) for t in self.trace_weights)
        if len(weights) != len(dims):
            raise StructuralError(f"{len(weights)} trace weights for {len(dims)} blocks")
        if any(not t > 0 for t in weights):
            raise StructuralError(f"trace weights must be positive, got {weights}")
        total = sum(n * t for n, t in zip(dims, weights))
        if abs(total - 1.0) > STATE_TOLERANCE:
            raise StructuralError(f"trace is not a state: Σ n_j t_j = {total}")
        object.__setattr__(self, 'block_dims', dims)
        object.__setattr__(self, 'trace_weights', weights)

    @property
    def num_blocks(self):
        return len(self.block_dims)

    @property
    def dim(self):
        """Linear dimension Σ n_j²."""
        return sum(n * n for n in self.block_dims)

    @property
    def size(self):
        """Size Σ n_j of the block-diagonal matrices."""
        return sum(self.block_dims)

    def with_weights(self, trace_weights):
        return MultiMatrixAlgebra(self.block_dims, tuple(trace_weights))

    def element(self, blocks):
        return AlgebraElement(self, tuple(blocks))

    def zero(self):
        return self.element(np.zeros((n, n), dtype=complex) for n in self.block_dims)

    def identity(self):
        return self.element(np.eye(n, dtype=complex) for n in self.block_dims)

    def block_unit(self, j):
        """Minimal central projection onto block j."""
        return self.element(
            np.eye(n, dtype=complex) if i == j else np.zeros((n, n), dtype=complex)
            for i, n in enumerate(self.block_dims)
        )

    def unit(self, j, p, q):
        """Matrix unit e^{(j)}_{pq}."""
        blocks = [np.zeros((n, n), dtype=complex) for n in self.block_dims]
        blocks[j][p, q] = 1.0
        return self.element(blocks)

    def units(self):
        """All matrix units, block by block, row-major inside a block."""
        return [
            self.unit(j, p, q)
            for j, n in enumerate(self.block_dims)
            for p in range(n)
            for q in range(n)
        ]

    def from_vector(self, vector):
        """Inverse of ``AlgebraElement.vector``."""
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (self.dim,):
            raise StructuralError(f"vector of length {vector.shape} for algebra of dim {self.dim}")
        blocks, offset = [], 0
        for n in self.block_dims:
            blocks.append(vector[offset:offset + n * n].reshape(n, n))
            offset += n * n
        return self.element(blocks)

    def from_matrix(self, matrix):
        """Read a block-diagonal matrix of size Σn; off-diagonal blocks must vanish."""
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (self.size, self.size):
            raise StructuralError(f"matrix of shape {matrix.shape}, expected {self.size}x{self.size}")
        blocks, offset = [], 0
        for n in self.block_dims:
            blocks.append(matrix[offset:offset + n, offset:offset + n])
            offset += n
        element = self.element(blocks)
        if not np.allclose(element.matrix(), matrix, atol=1e-12):
            raise StructuralError("matrix is not block diagonal for this algebra")
        return element

    def random_element(self, seed, self_adjoint=False):
        return random_element(self, seed, self_adjoint=self_adjoint)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """One complex matrix per block of ``parent``."""
    parent: MultiMatrixAlgebra
    blocks: tuple

    # numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
        if len(blocks) != self.parent.num_blocks:
            raise StructuralError(
                f"{len(blocks)} blocks for an algebra with {self.parent.num_blocks} blocks")
        for b, n in zip(blocks, self.parent.block_dims):
            if b.shape != (n, n):
                raise StructuralError(f"block of shape {b.shape}, expected {(n, n)}")
            b.flags.writeable = False
        object.__setattr__(self, 'blocks', blocks)

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            raise StructuralError(f"expected an AlgebraElement, got {type(other).__name__}")
        if other.parent != self.parent:
            raise StructuralError(
                f"parent mismatch: {self.parent.block_dims} vs {other.parent.block_dims}")

    def _new(self, blocks):
        return AlgebraElement(self.parent, tuple(blocks))

    def __add__(self, other):
        self._check(other)
        return self._new(a + b for a, b in zip(self.blocks, other.blocks))

    def __sub__(self, other):
        self._check(other)
        return self._new(a - b for a, b in zip(self.blocks, other.blocks))

    def __neg__(self):
        return self._new(-a for a in self.blocks)

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            raise StructuralError("use @ for the algebra product")
        return self._new(scalar * a for a in self.blocks)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._new(a / scalar for a in self.blocks)

    def __matmul__(self, other):
        self._check(other)
        return self._new(a @ b for a, b in zip(self.blocks, other.blocks))

    def adjoint(self):
        return self._new(a.conj().T for a in self.blocks)

    def trace(self):
        return trace(self)

    def inner(self, other):
        return inner_product(self, other)

    def hs_norm(self):
        return hs_norm(self)

    def vector(self):
        """Concatenated row-major entries of the blocks (no trace weighting)."""
        return np.concatenate([b.ravel() for b in self.blocks])

    def matrix(self):
        """The element as one block-diagonal matrix."""
        return scipy.linalg.block_diag(*self.blocks)

    def __repr__(self):
        return f"AlgebraElement(dims={self.parent.block_dims})"


def add(x, y):
    return x + y


def mul(x, y):
    return x @ y


def scale(x, c):
    return c * x


def adjoint(x):
    return x.adjoint()


def trace(x):
    """tr(x) = Σ_j t_j Tr(x_j)."""
    return complex(sum(t * np.trace(b) for t, b in zip(x.parent.trace_weights, x.blocks)))


def inner_product(x, y):
    """⟨x, y⟩ = tr(y* x)."""
    x._check(y)
    return complex(sum(
        t * np.vdot(b, a) for t, a, b in zip(x.parent.trace_weights, x.blocks, y.blocks)
    ))


def hs_norm(x):
    return float(np.sqrt(max(inner_product(x, x).real, 0.0)))


def weighted_vector(x):
    """Coordinates in which the Euclidean inner product is the trace inner product."""
    return np.concatenate([
        np.sqrt(t) * b.ravel() for t, b in zip(x.parent.trace_weights, x.blocks)
    ])


def relative_residual(x, y, norm, floor=None):
    """
    norm(x − y) / max(norm(x), norm(y)).

    Below ``floor`` (default TOLERANCE) the absolute residual is returned, so
    two numerically zero operands compare as equal instead of as noise / noise.
    """
    floor = get_config().TOLERANCE if floor is None else floor
    difference = float(norm(x - y))
    scale_ = max(norm(x), norm(y))
    if scale_ < floor:
        return difference
    return difference / scale_


def orthonormalize(vectors, cutoff=None):
    """
    Classical Gram-Schmidt with reorthogonalization over the rows of ``vectors``.

    Args:
        vectors: array of shape (count, dim)
        cutoff: relative rank cutoff; a vector is kept when its residual after
            projection exceeds cutoff × (largest input norm)

    Returns:
        tuple: (orthonormal rows of shape (rank, dim), indices of the kept inputs)
    """
    if cutoff is None:
        cutoff = get_config().RANK_CUTOFF
    vectors = np.asarray(vectors, dtype=complex)
    count, dim = vectors.shape
    largest = max(float(np.max(np.linalg.norm(vectors, axis=1))), 0.0) if count else 0.0
    basis = np.zeros((min(count, dim), dim), dtype=complex)
    kept = []
    if largest == 0.0:
        return basis[:0], kept
    threshold = cutoff * largest
    rank = 0
    for index in range(count):
        w = vectors[index].copy()
        for _ in range(2):
            if rank:
                q = basis[:rank]
                w -= q.T @ (q.conj() @ w)
        norm = np.linalg.norm(w)
        if norm > threshold:
            basis[rank] = w / norm
            kept.append(index)
            rank += 1
            if rank == dim:
                break
    return basis[:rank], kept


def span_basis(items, cutoff=None):
    """
    Orthonormal spanning list of the linear span of ``items``.

    AlgebraElements are orthonormalized for the trace inner product; raw
    matrices for the Frobenius inner product.

    Returns:
        tuple: (orthonormal list, rank)
    """
    items = list(items)
    if not items:
        raise StructuralError("span_basis needs a nonempty list")
    first = items[0]
    if isinstance(first, AlgebraElement):
        parent = first.parent
        for x in items[1:]:
            first._check(x)
        rows, _ = orthonormalize(np.array([weighted_vector(x) for x in items]), cutoff)
        root = np.concatenate([np.full(n * n, 1.0 / np.sqrt(t))
                               for n, t in zip(parent.block_dims, parent.trace_weights)])
        basis = [parent.from_vector(root * row) for row in rows]
    else:
        shape = np.shape(first)
        if any(np.shape(x) != shape for x in items):
            raise StructuralError("span_basis needs items of a common shape")
        rows, _ = orthonormalize(np.array([np.asarray(x).ravel() for x in items]), cutoff)
        basis = [row.reshape(shape) for row in rows]
    return basis, len(basis)


def random_element(algebra, seed, self_adjoint=False):
    """Complex Gaussian element; the self-adjoint variant returns (x + x*)/2."""
    rng = np.random.default_rng(seed)
    x = algebra.element(complex_gaussian(rng, (n, n)) for n in algebra.block_dims)
    if self_adjoint:
        x = 0.5 * (x + x.adjoint())
    return x
