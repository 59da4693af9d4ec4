from subfactor_lab.algebra.multimatrix import AlgebraElement, MultiMatrixAlgebra
from subfactor_lab.algebra.inclusion import Inclusion, MarkovData, build_inclusion, markov_data, validate_inclusion
from subfactor_lab.algebra.tower import Tower
from subfactor_lab.algebra.bases import Basis, compose_bases, construct_basis, lift_basis, tower_basis
from subfactor_lab.algebra.automorphisms import (
    FdAutomorphism, TowerAutomorphism, extend_automorphism, extend_tower, make_automorphism)
from subfactor_lab.algebra.multistep import e_interval, fvrt_check, multistep_recursion_check, tl_identity_checks

__all__ = [
    'AlgebraElement', 'MultiMatrixAlgebra',
    'Inclusion', 'MarkovData', 'build_inclusion', 'markov_data', 'validate_inclusion',
    'Tower',
    'Basis', 'compose_bases', 'construct_basis', 'lift_basis', 'tower_basis',
    'FdAutomorphism', 'TowerAutomorphism', 'extend_automorphism', 'extend_tower', 'make_automorphism',
    'e_interval', 'fvrt_check', 'multistep_recursion_check', 'tl_identity_checks',
]
