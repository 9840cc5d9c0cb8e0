"""Finite-model spectral duality for commutative C*-categories.

The library represents finite-dimensional commutative C*-categories by their
structure tensors, finite Fell line-bundle spaceoids by partial bijections
with a unit-modulus cocycle, and implements the spectrum functor, the section
functor, the Gel'fand and evaluation natural isomorphisms and the spectral
theorem for non-full Hilbert C*-bimodules over commutative algebras.
"""

from .numlin import Tolerance, DEFAULT_TOL

__all__ = ["Tolerance", "DEFAULT_TOL"]
__version__ = "0.1.0"
