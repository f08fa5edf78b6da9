"""Numerical laboratory for the stability of the entropy equation

    H(x, y, z) = H(x + y, 0, z) + H(x, y, 0).
"""

__version__ = "0.1.0"
