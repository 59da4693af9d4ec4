"""
Catalog of inclusions: the packaged spec files C1-C4 and the seeded random entries R0-R19.
"""
import logging
from pathlib import Path

import numpy as np

from subfactor_lab.algebra.inclusion import is_connected
from subfactor_lab.errors import ConsistencyError, SpecParseError
from subfactor_lab.models.specfile import InclusionSpec

logger = logging.getLogger(__name__)

CATALOG_DIR = Path(__file__).parent
FIXED_ENTRIES = ('C1', 'C2', 'C3', 'C4')
RANDOM_ENTRIES = 20

# bounds on the random entries
MAX_TOTAL_DIM = 64
MAX_DIM_M = 32
MAX_BLOCKS = 3
MAX_BLOCK_SIZE = 3
MAX_MULTIPLICITY = 2


def catalog_names():
    return list(FIXED_ENTRIES) + [f"R{i}" for i in range(RANDOM_ENTRIES)]


def random_inclusion(seed, max_attempts=10000):
    """
    Seeded random connected inclusion with dim N + dim M ≤ 64 and dim M ≤ 32.

    Block sizes of N and multiplicities are drawn until the inclusion is
    connected and within the bounds; M's block sizes follow from unitality.
    """
    rng = np.random.default_rng(seed)
    for attempt in range(max_attempts):
        rows = int(rng.integers(1, MAX_BLOCKS + 1))
        cols = int(rng.integers(1, MAX_BLOCKS + 1))
        dims_N = rng.integers(1, MAX_BLOCK_SIZE + 1, size=rows)
        G = rng.integers(0, MAX_MULTIPLICITY + 1, size=(rows, cols))
        if not G.any(axis=1).all() or not G.any(axis=0).all() or not is_connected(G):
            continue
        dims_M = G.T @ dims_N
        dim_N, dim_M = int(np.sum(dims_N ** 2)), int(np.sum(dims_M ** 2))
        if dim_M > MAX_DIM_M or dim_N + dim_M > MAX_TOTAL_DIM:
            continue
        logger.debug(f"Random inclusion for seed {seed} after {attempt + 1} draws")
        return InclusionSpec(
            name=f"R{seed}",
            dims_N=tuple(int(d) for d in dims_N),
            dims_M=tuple(int(n) for n in dims_M),
            G=tuple(tuple(int(g) for g in row) for row in G),
        )
    raise ConsistencyError(f"no admissible random inclusion for seed {seed}")


def load_entry(name):
    """Spec of a catalog entry by name."""
    if name in FIXED_ENTRIES:
        return InclusionSpec.load(CATALOG_DIR / f"{name}.spec")
    if name.startswith('R') and name[1:].isdigit() and int(name[1:]) < RANDOM_ENTRIES:
        return random_inclusion(int(name[1:]))
    raise KeyError(name)


def resolve_spec(argument):
    """A spec-file path or a catalog entry name."""
    path = Path(argument)
    if path.is_file():
        return InclusionSpec.load(path)
    try:
        return load_entry(argument)
    except KeyError:
        raise SpecParseError(
            f"'{argument}' is neither a spec file nor a catalog entry "
            f"({', '.join(catalog_names())})")
