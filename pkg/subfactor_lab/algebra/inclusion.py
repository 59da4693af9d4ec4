"""
Connected unital inclusions N ⊆ M of multi-matrix algebras.

The inclusion matrix G has one row per block of N and one column per block
of M; G(i, j) counts the copies of N-block i inside M-block j. Inside an
M-block the copies are laid out in increasing N-block order.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from subfactor_lab.algebra.multimatrix import MultiMatrixAlgebra
from subfactor_lab.config import get_config
from subfactor_lab.errors import InclusionError, NumericError, PreconditionError, StructuralError
from subfactor_lab.models.serializer import SerializerMixin

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarkovData(SerializerMixin):
    norm_sq: float
    tau: float
    t_vec: tuple
    s_vec: tuple
    iterations: int = 0
    eigen_residual: float = 0.0


def is_connected(matrix):
    """Connectedness of the bipartite graph with an edge wherever G(i, j) > 0."""
    rows, cols = matrix.shape
    adjacency = np.zeros((rows + cols, rows + cols), dtype=int)
    adjacency[:rows, rows:] = matrix > 0
    adjacency[rows:, :rows] = (matrix > 0).T
    count, _ = connected_components(scipy.sparse.csr_matrix(adjacency), directed=False)
    return count == 1


def perron_frobenius(matrix, tol=None, max_iter=None):
    """
    Perron-Frobenius eigenpair of a symmetric nonnegative irreducible matrix.

    Power iteration on matrix + trace(matrix)·1 from the all-ones vector; the
    shift removes period-two oscillation.

    Returns:
        tuple: (eigenvalue as Rayleigh quotient, unit eigenvector, iterations)
    """
    config = get_config()
    tol = config.PF_TOLERANCE if tol is None else tol
    max_iter = config.PF_MAX_ITER if max_iter is None else max_iter
    matrix = np.asarray(matrix, dtype=float)
    shifted = matrix + np.trace(matrix) * np.eye(len(matrix))
    v = np.ones(len(matrix)) / np.sqrt(len(matrix))
    for iteration in range(1, max_iter + 1):
        w = shifted @ v
        w /= np.linalg.norm(w)
        if np.linalg.norm(w - v) <= tol:
            v = w
            break
        v = w
    else:
        raise NumericError(f"power iteration did not converge after {max_iter} iterations")
    logger.debug(f"Power iteration converged after {iteration} iterations")
    eigenvalue = float(v @ matrix @ v / (v @ v))
    return eigenvalue, v, iteration


@dataclass(frozen=True, eq=False)
class Inclusion:
    """
    N ⊆ M given by an inclusion matrix, with the canonical embedding.

    ``markov`` is None until ``with_markov`` has been called; the algebras then
    carry the Markov trace weights t (on M) and s = G·t (on N).
    """
    small: MultiMatrixAlgebra
    big: MultiMatrixAlgebra
    matrix: np.ndarray
    markov: MarkovData = None

    @property
    def tau(self):
        if self.markov is None:
            raise PreconditionError("inclusion has no Markov data yet")
        return self.markov.tau

    def _segments(self, j):
        """(N-block, offset) for every copy inside M-block j, in layout order."""
        segments, offset = [], 0
        for i, d in enumerate(self.small.block_dims):
            for _ in range(int(self.matrix[i, j])):
                segments.append((i, offset))
                offset += d
        return segments

    def embed(self, n):
        """Canonical unital *-embedding of N into M."""
        if n.parent != self.small:
            raise StructuralError("embed expects an element of the small algebra")
        blocks = []
        for j in range(self.big.num_blocks):
            copies = [n.blocks[i] for i, _ in self._segments(j)]
            blocks.append(scipy.linalg.block_diag(*copies))
        return self.big.element(blocks)

    def conditional_expectation(self, x):
        """
        Trace-preserving conditional expectation E_N: M → N.

        E_N(x)_i = (Σ_j t_j Σ_copies x_{j, copy}) / s_i, the trace-orthogonal
        projection onto embed(N) read back in N.
        """
        if self.markov is None:
            raise PreconditionError("conditional expectation needs Markov data")
        if x.parent != self.big:
            raise StructuralError("conditional expectation expects an element of the big algebra")
        sums = [np.zeros((d, d), dtype=complex) for d in self.small.block_dims]
        for j, t in enumerate(self.big.trace_weights):
            for i, offset in self._segments(j):
                d = self.small.block_dims[i]
                sums[i] += t * x.blocks[j][offset:offset + d, offset:offset + d]
        return self.small.element(
            total / s for total, s in zip(sums, self.small.trace_weights))

    def with_markov(self):
        data = markov_data(self)
        return Inclusion(
            small=self.small.with_weights(data.s_vec),
            big=self.big.with_weights(data.t_vec),
            matrix=self.matrix,
            markov=data,
        )

    def to_dict(self):
        return {
            'dims_N': list(self.small.block_dims),
            'dims_M': list(self.big.block_dims),
            'G': self.matrix.tolist(),
        }


def validate_inclusion(dims_N, dims_M, G):
    """
    Check G describes a connected unital inclusion and build the embedding.

    Raises:
        InclusionError: "degenerate inclusion", "not connected" or "not unital"
    """
    dims_N = tuple(int(d) for d in dims_N)
    dims_M = tuple(int(n) for n in dims_M)
    matrix = np.asarray(G)
    if matrix.ndim != 2 or matrix.shape != (len(dims_N), len(dims_M)):
        raise StructuralError(
            f"inclusion matrix of shape {matrix.shape}, expected {(len(dims_N), len(dims_M))}")
    if not np.all(np.equal(np.mod(matrix, 1), 0)) or np.any(matrix < 0):
        raise StructuralError("inclusion matrix must have nonnegative integer entries")
    matrix = matrix.astype(int)

    zero_rows = [i for i in range(matrix.shape[0]) if not matrix[i].any()]
    zero_cols = [j for j in range(matrix.shape[1]) if not matrix[:, j].any()]
    if zero_rows or zero_cols:
        raise InclusionError(
            InclusionError.DEGENERATE, f"zero rows {zero_rows}, zero columns {zero_cols}")
    if not is_connected(matrix):
        raise InclusionError(InclusionError.NOT_CONNECTED)
    expected = matrix.T @ np.array(dims_N)
    if tuple(expected) != dims_M:
        raise InclusionError(
            InclusionError.NOT_UNITAL, f"Gᵗ·dims_N = {tuple(expected.tolist())} but dims_M = {dims_M}")

    inclusion = Inclusion(MultiMatrixAlgebra(dims_N), MultiMatrixAlgebra(dims_M), matrix)
    logger.debug(f"Validated inclusion {dims_N} ⊆ {dims_M}")
    return inclusion


def markov_data(inclusion):
    """Markov trace of the inclusion: ‖G‖², τ = ‖G‖⁻², t on M and s = G·t on N."""
    G = inclusion.matrix.astype(float)
    gram = G.T @ G
    norm_sq, vector, iterations = perron_frobenius(gram)
    vector = np.abs(vector)
    if np.any(vector <= 0):
        raise NumericError("Perron-Frobenius vector is not strictly positive")
    dims_M = np.array(inclusion.big.block_dims, dtype=float)
    t_vec = vector / (dims_M @ vector)
    s_vec = G @ t_vec
    residual = float(np.linalg.norm(gram @ t_vec - norm_sq * t_vec))
    logger.info(f"Markov trace: ‖G‖² = {norm_sq:.12g}, τ = {1.0 / norm_sq:.12g}")
    return MarkovData(
        norm_sq=norm_sq,
        tau=1.0 / norm_sq,
        t_vec=tuple(float(t) for t in t_vec),
        s_vec=tuple(float(s) for s in s_vec),
        iterations=iterations,
        eigen_residual=residual,
    )


def build_inclusion(dims_N, dims_M, G):
    """Validate and attach the Markov trace in one step."""
    return validate_inclusion(dims_N, dims_M, G).with_markov()
