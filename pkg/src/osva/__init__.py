"""Computational toolkit for open-string vertex algebras.

Subpackages and modules:

* ``scalars``: exact arithmetic in Q(sqrt 2)
* ``fusion``: fusion rings and fusing-coupling matrices (built-in Ising data)
* ``solver``: structure-constant equations for algebra objects
* ``modes``: truncated mode calculus and axiom checks
* ``geom``: boundary-disk moduli elements and the geometric vertex map
* ``cli``: command line front end
"""
__version__ = "0.1.0"
