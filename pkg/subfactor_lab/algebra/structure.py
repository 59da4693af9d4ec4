"""
Block structure of concrete tower levels.

The center of a level is found as the null space of commutators with two
generic elements; a generic self-adjoint central element then splits into the
minimal central projections. Block sizes come from the rank of the compressed
algebra, and inclusion matrices from ranks of products of central projections.
"""
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from subfactor_lab.config import get_config
from subfactor_lab.errors import ConsistencyError
from subfactor_lab.models.serializer import SerializerMixin

logger = logging.getLogger(__name__)


@dataclass
class BlockStructure(SerializerMixin):
    index: int
    block_dims: tuple
    multiplicities: tuple
    center_dim: int
    inclusion_from_previous: np.ndarray = None
    inclusion_to_next: np.ndarray = None
    attempts: int = 1
    central_projections: list = field(default_factory=list, repr=False)

    def to_dict(self, exclude=None, include=None):
        exclude = list(exclude or []) + ['central_projections']
        return super().to_dict(exclude=exclude, include=include)

    @property
    def linear_dim(self):
        return sum(m * m for m in self.block_dims)


def _integer(value, what):
    rounded = int(round(float(np.real(value))))
    if abs(value - rounded) > 1e-6:
        raise ConsistencyError(f"{what} = {value} is not an integer")
    return rounded


def _clusters(values, gap):
    """Split sorted eigenvalues wherever consecutive values differ by more than ``gap``."""
    groups, start = [], 0
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > gap:
            groups.append(range(start, i))
            start = i
    groups.append(range(start, len(values)))
    return groups


def spectral_split(h, expected, gap):
    """
    Spectral projections of a self-adjoint matrix with ``expected`` distinct eigenvalues.

    Returns None when the spectrum does not separate into exactly ``expected``
    clusters with relative gap at least ``gap``.
    """
    values, vectors = scipy.linalg.eigh(h)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    groups = _clusters(values / scale, gap)
    if len(groups) != expected:
        return None
    projections = []
    for group in groups:
        v = vectors[:, group.start:group.stop]
        projections.append(v @ v.conj().T)
    return projections


def center_basis(level, seed):
    """Coefficient vectors (columns) of the center in the level's linear basis."""
    frame = level.frame
    dim = frame.shape[0]
    columns = []
    for offset in range(2):
        g = level.random_element(seed + offset)
        commutators = frame @ g - g @ frame
        columns.append(commutators.reshape(dim, -1).T)
    return scipy.linalg.null_space(np.vstack(columns), rcond=1e-8)


def algebra_structure(level, inclusion_matrix=None):
    algebra = level.algebra
    return BlockStructure(
        index=level.index,
        block_dims=algebra.block_dims,
        multiplicities=tuple(1 for _ in algebra.block_dims),
        center_dim=algebra.num_blocks,
        inclusion_from_previous=inclusion_matrix,
        central_projections=[algebra.block_unit(j) for j in range(algebra.num_blocks)],
    )


def block_structure(level, previous=None, up=None, seed=None):
    """
    Block dimensions, minimal central projections and inclusion from the previous level.

    Args:
        level: an OperatorLevel (trace not required)
        previous: BlockStructure of the level below, or None
        up: map from the level below into ``level``
        seed: seed of the generic central element

    Raises:
        ConsistencyError: center does not split after the configured retries
    """
    config = get_config()
    seed = config.SEED if seed is None else seed
    center = center_basis(level, seed)
    center_dim = center.shape[1]
    frame = level.frame

    projections = None
    for attempt in range(1, config.CENTER_RETRIES + 1):
        rng = np.random.default_rng(seed + 7919 * attempt)
        coefficients = rng.standard_normal(center_dim) + 1j * rng.standard_normal(center_dim)
        h = np.tensordot(center @ coefficients, frame, axes=1)
        h = 0.5 * (h + h.conj().T)
        projections = spectral_split(h, center_dim, config.CENTER_GAP)
        if projections is not None:
            break
        logger.warning(f"Level {level.index}: central spectrum near-degenerate, retrying ({attempt})")
    else:
        raise ConsistencyError(
            f"level {level.index}: center of dimension {center_dim} did not split "
            f"after {config.CENTER_RETRIES} attempts")

    block_dims, multiplicities = [], []
    for P in projections:
        compressed = (frame @ P).reshape(level.dim, -1)
        singular = scipy.linalg.svdvals(compressed)
        rank = int(np.sum(singular > 1e-8 * singular[0]))
        m = int(round(np.sqrt(rank)))
        if m * m != rank:
            raise ConsistencyError(f"level {level.index}: block of dimension {rank} is not a square")
        size = _integer(np.trace(P), 'rank of central projection')
        if size % m:
            raise ConsistencyError(f"level {level.index}: block {m} does not divide rank {size}")
        block_dims.append(m)
        multiplicities.append(size // m)

    structure = BlockStructure(
        index=level.index,
        block_dims=tuple(block_dims),
        multiplicities=tuple(multiplicities),
        center_dim=center_dim,
        attempts=attempt,
        central_projections=projections,
    )
    if previous is not None and up is not None:
        structure.inclusion_from_previous = inclusion_between(previous, structure, up)
    logger.info(f"Level {level.index}: blocks {structure.block_dims}")
    return structure


def inclusion_between(lower, upper, up):
    """Inclusion matrix of ``lower`` into ``upper`` from their central projections."""
    matrix = np.zeros((len(lower.block_dims), len(upper.block_dims)), dtype=int)
    for a, Q in enumerate(lower.central_projections):
        lifted = up(Q)
        for r, P in enumerate(upper.central_projections):
            rank = _integer(np.trace(lifted @ P), 'rank of projection product')
            count = rank * upper.block_dims[r] / (lower.block_dims[a] * np.trace(P).real)
            matrix[a, r] = _integer(count, 'inclusion multiplicity')
    return matrix


def equal_up_to_block_permutation(first, second, max_rows=8):
    """True when the matrices agree after permuting rows and columns."""
    first, second = np.asarray(first), np.asarray(second)
    if first.shape != second.shape:
        return False
    target = sorted(map(tuple, second.T.tolist()))
    if first.shape[0] > max_rows:
        return sorted(map(tuple, first.T.tolist())) == target
    for rows in itertools.permutations(range(first.shape[0])):
        if sorted(map(tuple, first[list(rows)].T.tolist())) == target:
            return True
    return False


def matrix_units(level, central, under, count, seed):
    """
    Matrix units E_{p0} of the block with central support ``central``.

    The minimal projections lying under the projection ``under`` come first.

    Args:
        level: OperatorLevel containing the block
        central: minimal central projection P of the block
        under: projection in the level commuting with P (e.g. a Jones projection)
        count: block size m

    Returns:
        tuple: (list of E_{p0} for p = 0..m−1, number of projections under ``under``)
    """
    config = get_config()
    eP = under @ central
    rest = central - eP
    values, vectors = scipy.linalg.eigh(central)
    support = vectors[:, values > 0.5]
    for attempt in range(config.CENTER_RETRIES):
        h1 = level.random_element(seed + 2 * attempt, self_adjoint=True)
        h2 = level.random_element(seed + 2 * attempt + 1, self_adjoint=True)
        h = eP @ h1 @ eP + rest @ h2 @ rest
        compressed = support.conj().T @ h @ support
        split = spectral_split(0.5 * (compressed + compressed.conj().T), count, config.CENTER_GAP)
        if split is not None:
            break
        logger.warning(f"Level {level.index}: minimal projections did not separate, retrying")
    else:
        raise ConsistencyError(f"level {level.index}: could not split a block of size {count}")

    minimal = [support @ p @ support.conj().T for p in split]
    flags = [abs(np.trace(p @ eP) - np.trace(p)) < 1e-6 * abs(np.trace(p)) for p in minimal]
    ordered = [p for p, f in zip(minimal, flags) if f] + [p for p, f in zip(minimal, flags) if not f]
    under_count = sum(flags)

    first = ordered[0]
    multiplicity = np.trace(first).real
    x = level.random_element(seed + 104729)
    units = [first]
    for p in ordered[1:]:
        E = p @ x @ first
        norm = np.sqrt(np.trace(E.conj().T @ E).real / multiplicity)
        if norm < 1e-10:
            raise ConsistencyError(f"level {level.index}: degenerate matrix unit")
        units.append(E / norm)
    return units, under_count
