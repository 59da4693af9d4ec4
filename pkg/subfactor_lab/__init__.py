"""
subfactor-lab: multi-matrix inclusions, Jones towers, Pimsner-Popa bases,
automorphism extensions and multi-step basic constructions.
"""
__version__ = '0.1.0'
