import numpy as np
import pytest

from subfactor_lab.catalog import CATALOG_DIR, FIXED_ENTRIES
from subfactor_lab.errors import InclusionError, SpecParseError
from subfactor_lab.models.specfile import InclusionSpec

C3_TEXT = """\
# golden-ratio inclusion
name: C3
dims_N: 1 1
dims_M: 1 2
G:
  1 1   # first row
  0 1
depth: 4
"""


def test_parse():
    spec = InclusionSpec.parse(C3_TEXT)
    assert spec.name == 'C3'
    assert spec.dims_N == (1, 1)
    assert spec.dims_M == (1, 2)
    assert spec.G == ((1, 1), (0, 1))
    assert spec.depth == 4
    assert spec.sigma is None and spec.u is None
    assert not spec.has_automorphism


@pytest.mark.parametrize('name', FIXED_ENTRIES)
def test_catalog_files_round_trip(name):
    spec = InclusionSpec.load(CATALOG_DIR / f"{name}.spec")
    assert InclusionSpec.parse(spec.format()) == spec


def test_complex_entries():
    spec = InclusionSpec.parse(
        "name: X\ndims_N: 1 1\ndims_M: 2\nG:\n  1\n  1\nu:\n  0,1 0\n  0 0,-1\n")
    assert spec.u == ((1j, 0j), (0j, -1j))
    assert InclusionSpec.parse(spec.format()).u == spec.u


@pytest.mark.parametrize('text, line, message', [
    ("name: X\ndims_N: 1\ndims_M: 2\nG:\n  2\ncolor: red\n", 6, "unknown key 'color'"),
    ("name: X\nname: Y\ndims_N: 1\ndims_M: 2\nG:\n  2\n", 2, "duplicate key 'name'"),
    ("name: X\ndims_N: 1 1\ndims_M: 1 2\nG:\n  1\n  0 1\n", 5, "G row 0 has 1 entries, expected 2"),
    ("name: X\ndims_N: 1 1\ndims_M: 2\nG:\n  1\n", 4, "G has 1 rows, expected 2"),
    ("name: X\ndims_N: 1\ndims_M: 2\nG:\n  2\ndepth: -1\n", 6, "depth must be nonnegative"),
    ("name: X\ndims_N: 1\ndims_M: 2\nG:\n  2\ndepth: two\n", 6, "depth must be an integer"),
    ("name: X\ndims_N: 1\ndims_M: 2\nG:\n  2\nsigma: 1\n", 6, "not a permutation"),
    ("name: X\ndims_N: a\ndims_M: 2\nG:\n  2\n", 2, "list of integers"),
    ("  2\nname: X\n", 1, "indented row outside a matrix key"),
    ("name X\n", 1, "expected 'key: value'"),
    ("name: X\ndims_N: 1\ndims_M: 2\nG:\n  2\nu:\n  1 0\n", 6, "u has 1 rows, expected 2"),
    ("name: X\ndims_N: 1\ndims_M: 2\nG:\n  2\nu:\n  1 x\n  0 1\n", 7, "not a complex entry"),
])
def test_parse_errors(text, line, message):
    with pytest.raises(SpecParseError, match=message) as excinfo:
        InclusionSpec.parse(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}: ")


def test_missing_key():
    with pytest.raises(SpecParseError, match="missing key 'G'") as excinfo:
        InclusionSpec.parse("name: X\ndims_N: 1\ndims_M: 2\n")
    assert excinfo.value.line is None


def test_fingerprint():
    spec = InclusionSpec.parse(C3_TEXT)
    assert spec.fingerprint() == InclusionSpec.parse(spec.format()).fingerprint()
    assert len(spec.fingerprint()) == 16
    other = InclusionSpec.parse(C3_TEXT.replace('depth: 4', 'depth: 3'))
    assert other.fingerprint() != spec.fingerprint()


def test_inclusion():
    inclusion = InclusionSpec.parse(C3_TEXT).inclusion()
    assert inclusion.matrix.tolist() == [[1, 1], [0, 1]]
    assert inclusion.tau == pytest.approx((3 - np.sqrt(5)) / 2)


def test_inclusion_errors_are_not_parse_errors():
    spec = InclusionSpec.parse("name: X\ndims_N: 1 1\ndims_M: 1 1\nG:\n  1 0\n  0 1\n")
    with pytest.raises(InclusionError):
        spec.inclusion()


def test_automorphism_defaults():
    spec = InclusionSpec.parse("name: X\ndims_N: 1 1\ndims_M: 2\nG:\n  1\n  1\nsigma: 0\n")
    alpha = spec.automorphism()
    assert alpha.sigma == (0,)
    assert np.allclose(alpha.unitary.matrix(), np.eye(2))
    assert alpha.n_invariant


def test_no_automorphism():
    assert InclusionSpec.parse(C3_TEXT).automorphism() is None


def test_to_dict():
    data = InclusionSpec.parse(C3_TEXT).to_dict()
    assert data['G'] == [[1, 1], [0, 1]]
    assert data['depth'] == 4
