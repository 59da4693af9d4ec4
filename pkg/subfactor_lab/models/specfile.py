"""
Line-oriented inclusion spec files.

    # comment
    name: C2
    dims_N: 1 1
    dims_M: 2
    G:
      1
      1
    depth: 5
    sigma: 0
    u:
      0,0 1,0
      1,0 0,0

Scalar keys take their value after the colon. ``G`` and ``u`` take indented
rows on the following lines. Complex entries of u are "re,im" pairs (a bare
number is real). u is the full block-diagonal matrix of the unitary in M and
σ a 0-based permutation of the blocks of M.
"""
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from subfactor_lab.algebra.automorphisms import make_automorphism
from subfactor_lab.algebra.inclusion import build_inclusion
from subfactor_lab.errors import SpecParseError
from subfactor_lab.models.serializer import SerializerMixin

logger = logging.getLogger(__name__)

SCALAR_KEYS = ('name', 'dims_N', 'dims_M', 'depth', 'sigma')
MATRIX_KEYS = ('G', 'u')
REQUIRED_KEYS = ('name', 'dims_N', 'dims_M', 'G')


def _integers(text, key, line):
    try:
        return tuple(int(item) for item in text.split())
    except ValueError:
        raise SpecParseError(f"{key} must be a list of integers, got '{text}'", line)


def _complex(item, line):
    try:
        if ',' in item:
            re, im = item.split(',')
            return complex(float(re), float(im))
        return complex(float(item), 0.0)
    except ValueError:
        raise SpecParseError(f"'{item}' is not a complex entry 're,im'", line)


def _format_complex(value):
    return f"{value.real!r},{value.imag!r}"


@dataclass
class InclusionSpec(SerializerMixin):
    name: str
    dims_N: tuple
    dims_M: tuple
    G: tuple
    depth: int = None
    sigma: tuple = None
    u: tuple = None

    @property
    def has_automorphism(self):
        return self.sigma is not None or self.u is not None

    @classmethod
    def parse(cls, text):
        """
        Parse spec-file text.

        Raises:
            SpecParseError: malformed line, unknown or duplicate key, wrong row length
        """
        values, rows, lines = {}, {}, {}
        current = None
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split('#', 1)[0].rstrip()
            if not content.strip():
                continue
            if content[0].isspace():
                if current is None:
                    raise SpecParseError("indented row outside a matrix key", number)
                rows[current].append((number, content.strip()))
                continue
            key, sep, value = content.partition(':')
            key, value = key.strip(), value.strip()
            if not sep:
                raise SpecParseError(f"expected 'key: value', got '{content.strip()}'", number)
            if key not in SCALAR_KEYS and key not in MATRIX_KEYS:
                raise SpecParseError(f"unknown key '{key}'", number)
            if key in lines:
                raise SpecParseError(f"duplicate key '{key}' (first on line {lines[key]})", number)
            lines[key] = number
            if key in MATRIX_KEYS:
                if value:
                    raise SpecParseError(f"{key} rows go on the following indented lines", number)
                rows[key] = []
                current = key
            else:
                if not value:
                    raise SpecParseError(f"{key} has no value", number)
                values[key] = value
                current = None

        for key in REQUIRED_KEYS:
            if key not in lines:
                raise SpecParseError(f"missing key '{key}'")

        dims_N = _integers(values['dims_N'], 'dims_N', lines['dims_N'])
        dims_M = _integers(values['dims_M'], 'dims_M', lines['dims_M'])
        G = []
        for index, (number, row) in enumerate(rows['G']):
            entries = _integers(row, f"G row {index}", number)
            if len(entries) != len(dims_M):
                raise SpecParseError(
                    f"G row {index} has {len(entries)} entries, expected {len(dims_M)}", number)
            G.append(entries)
        if len(G) != len(dims_N):
            raise SpecParseError(f"G has {len(G)} rows, expected {len(dims_N)}", lines['G'])

        depth = None
        if 'depth' in values:
            try:
                depth = int(values['depth'])
            except ValueError:
                raise SpecParseError(f"depth must be an integer, got '{values['depth']}'", lines['depth'])
            if depth < 0:
                raise SpecParseError("depth must be nonnegative", lines['depth'])

        sigma = None
        if 'sigma' in values:
            sigma = _integers(values['sigma'], 'sigma', lines['sigma'])
            if sorted(sigma) != list(range(len(dims_M))):
                raise SpecParseError(
                    f"sigma {sigma} is not a permutation of {len(dims_M)} blocks", lines['sigma'])

        u = None
        if 'u' in rows:
            size = sum(dims_M)
            u = []
            for index, (number, row) in enumerate(rows['u']):
                entries = tuple(_complex(item, number) for item in row.split())
                if len(entries) != size:
                    raise SpecParseError(
                        f"u row {index} has {len(entries)} entries, expected {size}", number)
                u.append(entries)
            if len(u) != size:
                raise SpecParseError(f"u has {len(u)} rows, expected {size}", lines['u'])
            u = tuple(u)

        return cls(values['name'], dims_N, dims_M, tuple(G), depth, sigma, u)

    @classmethod
    def load(cls, path):
        path = Path(path)
        logger.debug(f"Reading spec file {path}")
        return cls.parse(path.read_text(encoding='utf-8'))

    def format(self):
        """Spec-file text; ``parse(format())`` gives back an equal spec."""
        lines = [
            f"name: {self.name}",
            f"dims_N: {' '.join(map(str, self.dims_N))}",
            f"dims_M: {' '.join(map(str, self.dims_M))}",
            "G:",
        ]
        lines += ["  " + ' '.join(map(str, row)) for row in self.G]
        if self.depth is not None:
            lines.append(f"depth: {self.depth}")
        if self.sigma is not None:
            lines.append(f"sigma: {' '.join(map(str, self.sigma))}")
        if self.u is not None:
            lines.append("u:")
            lines += ["  " + ' '.join(_format_complex(v) for v in row) for row in self.u]
        return '\n'.join(lines) + '\n'

    def fingerprint(self):
        return hashlib.sha256(self.format().encode('utf-8')).hexdigest()[:16]

    def inclusion(self):
        """Validated inclusion with its Markov trace."""
        return build_inclusion(self.dims_N, self.dims_M, np.array(self.G, dtype=int))

    def automorphism(self, inclusion=None):
        """The automorphism declared by sigma/u, or None when the file has neither."""
        if not self.has_automorphism:
            return None
        inclusion = self.inclusion() if inclusion is None else inclusion
        algebra = inclusion.big
        sigma = self.sigma if self.sigma is not None else tuple(range(algebra.num_blocks))
        if self.u is None:
            unitary = algebra.identity()
        else:
            unitary = algebra.from_matrix(np.array(self.u, dtype=complex))
        return make_automorphism(inclusion, sigma, unitary)
