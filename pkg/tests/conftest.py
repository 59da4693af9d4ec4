import os

# Must be set before the package reads its configuration
os.environ['SUBFACTOR_ENV'] = 'test'

import pytest

from subfactor_lab.algebra.tower import Tower
from subfactor_lab.catalog import load_entry


@pytest.fixture(scope='session')
def c1():
    return load_entry('C1').inclusion()

@pytest.fixture(scope='session')
def c2():
    return load_entry('C2').inclusion()

@pytest.fixture(scope='session')
def c3():
    return load_entry('C3').inclusion()

@pytest.fixture(scope='session')
def c4():
    return load_entry('C4').inclusion()

@pytest.fixture(scope='session')
def c1_tower(c1):
    return Tower(c1, depth=3, seed=0)

@pytest.fixture(scope='session')
def c2_tower(c2):
    return Tower(c2, depth=5, seed=0)

@pytest.fixture(scope='session')
def c3_tower(c3):
    return Tower(c3, depth=3, seed=0)

@pytest.fixture(scope='session')
def c4_tower(c4):
    return Tower(c4, depth=3, seed=0)

@pytest.fixture(params=['c1_tower', 'c2_tower', 'c3_tower', 'c4_tower'])
def any_tower(request):
    return request.getfixturevalue(request.param)
