"""
Concrete representations of tower levels.

Levels −1 and 0 are multi-matrix algebras (``AlgebraLevel``). Every level
k ≥ 1 is a concrete operator algebra on the GNS space of level k−1
(``OperatorLevel``): a Frobenius-orthonormal linear basis of d×d matrices,
d = dim of level k−1, plus a density W with Tr(X) = trace(W X).

Both expose the same interface so tower code never branches on the level type:
products are ``@``, linear combinations use ``+``/``*``, and everything else goes
through the level object.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from subfactor_lab.algebra.multimatrix import (
    complex_gaussian, relative_residual, weighted_vector)
from subfactor_lab.errors import ConsistencyError, NumericError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GnsSpace:
    """L²(level): orthonormal basis for ⟨x, y⟩ = Tr(y* x) and the left regular representation."""
    dimension: int
    ortho_basis: list
    left_rep: object


class Level(ABC):
    index: int

    @property
    @abstractmethod
    def dim(self):
        """Linear dimension, equal to the GNS dimension."""

    @property
    def has_trace(self):
        return True

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def units(self):
        """A linear basis of the level."""

    @abstractmethod
    def coords(self, x):
        """Coordinates of x in ``units()``."""

    @abstractmethod
    def from_coords(self, coefficients): ...

    @abstractmethod
    def adjoint(self, x): ...

    @abstractmethod
    def trace(self, x): ...

    @abstractmethod
    def inner(self, x, y):
        """⟨x, y⟩ = Tr(y* x)."""

    @abstractmethod
    def vector(self, x):
        """GNS coordinates of x̂ in the orthonormal basis."""

    @abstractmethod
    def element(self, vector):
        """Inverse of ``vector``."""

    @abstractmethod
    def left_rep(self, x):
        """Matrix of ξ ↦ x·ξ on the GNS space."""

    @abstractmethod
    def ortho_basis(self): ...

    def hs_norm(self, x):
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))

    def residual(self, x, y):
        return relative_residual(x, y, self.hs_norm)

    def random_element(self, seed, self_adjoint=False):
        rng = np.random.default_rng(seed)
        x = self.from_coords(complex_gaussian(rng, self.dim))
        if self_adjoint:
            x = 0.5 * (x + self.adjoint(x))
        return x

    def gns(self):
        return GnsSpace(self.dim, self.ortho_basis(), self.left_rep)


class AlgebraLevel(Level):
    """Level −1 (N) or level 0 (M), a multi-matrix algebra with its Markov weights."""

    def __init__(self, index, algebra):
        self.index = index
        self.algebra = algebra
        self._root = np.concatenate([
            np.full(n * n, np.sqrt(t))
            for n, t in zip(algebra.block_dims, algebra.trace_weights)
        ])

    @property
    def dim(self):
        return self.algebra.dim

    def identity(self):
        return self.algebra.identity()

    def units(self):
        return self.algebra.units()

    def coords(self, x):
        return x.vector()

    def from_coords(self, coefficients):
        return self.algebra.from_vector(coefficients)

    def adjoint(self, x):
        return x.adjoint()

    def trace(self, x):
        return x.trace()

    def inner(self, x, y):
        return x.inner(y)

    def hs_norm(self, x):
        return x.hs_norm()

    def random_element(self, seed, self_adjoint=False):
        return self.algebra.random_element(seed, self_adjoint=self_adjoint)

    def vector(self, x):
        return weighted_vector(x)

    def element(self, vector):
        return self.algebra.from_vector(np.asarray(vector) / self._root)

    def left_rep(self, x):
        # (x_j ξ_j).ravel() = (x_j ⊗ 1)·ξ_j.ravel() for row-major ravel
        return scipy.linalg.block_diag(*[
            np.kron(b, np.eye(n)) for b, n in zip(x.blocks, self.algebra.block_dims)
        ])

    def ortho_basis(self):
        # t_j^{-1/2} e^{(j)}_{pq}
        return [self.element(row) for row in np.eye(self.dim)]


class OperatorLevel(Level):
    """
    Level k ≥ 1 acting on the GNS space of level k−1.

    Args:
        index: level number k
        frame: array (D, d, d), Frobenius-orthonormal linear basis
        jones: e_k as a d×d matrix
        density: W with Tr(X) = trace(W X); None while the level is provisional
    """

    def __init__(self, index, frame, jones, density=None):
        self.index = index
        self.frame = frame
        self.jones = jones
        self.density = density
        self.size = frame.shape[1]
        self._frame_flat = frame.reshape(frame.shape[0], -1).conj()
        self._ortho = None
        self._ortho_w = None
        if density is not None:
            self._build_gns()

    def _build_gns(self):
        W = self.density
        FW = self.frame @ W
        gram = self._frame_flat @ FW.reshape(self.dim, -1).T
        gram = 0.5 * (gram + gram.conj().T)
        try:
            upper = scipy.linalg.cholesky(gram, lower=False)
        except np.linalg.LinAlgError as e:
            raise NumericError(f"trace on level {self.index} is not faithful: {e}")
        change = scipy.linalg.solve_triangular(upper, np.eye(self.dim), lower=False)
        self._ortho = np.tensordot(change.T, self.frame, axes=1)
        self._ortho_flat = self._ortho.reshape(self.dim, -1).conj()
        self._ortho_w = self._ortho @ W

    def with_density(self, density):
        return OperatorLevel(self.index, self.frame, self.jones, density)

    @property
    def dim(self):
        return self.frame.shape[0]

    @property
    def has_trace(self):
        return self.density is not None

    def _require_trace(self):
        if self.density is None:
            raise ConsistencyError(f"level {self.index} has no trace yet")

    def identity(self):
        return np.eye(self.size, dtype=complex)

    def units(self):
        return list(self.frame)

    def coords(self, x):
        return self._frame_flat @ np.asarray(x).ravel()

    def from_coords(self, coefficients):
        return np.tensordot(np.asarray(coefficients, dtype=complex), self.frame, axes=1)

    def span_residual(self, x):
        """Relative distance of a d×d matrix from the span of the level."""
        norm = np.linalg.norm(x)
        if norm == 0.0:
            return 0.0
        return float(np.linalg.norm(x - self.from_coords(self.coords(x))) / norm)

    def adjoint(self, x):
        return np.asarray(x).conj().T

    def trace(self, x):
        self._require_trace()
        return complex(np.einsum('ij,ji->', self.density, x))

    def inner(self, x, y):
        self._require_trace()
        return complex(np.vdot(y, x @ self.density))

    def vector(self, x):
        self._require_trace()
        return self._ortho_flat @ (x @ self.density).ravel()

    def element(self, vector):
        self._require_trace()
        return np.tensordot(np.asarray(vector, dtype=complex), self._ortho, axes=1)

    def left_rep(self, x):
        self._require_trace()
        images = (x @ self._ortho_w).reshape(self.dim, -1)
        return self._ortho_flat @ images.T

    def ortho_basis(self):
        self._require_trace()
        return list(self._ortho)
