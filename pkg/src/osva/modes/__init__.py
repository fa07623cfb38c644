"""Truncated mode calculus for open-string vertex algebras."""
from .axioms import (
    associativity_samples,
    c0_membership,
    check_identity,
    check_associativity,
    check_creation,
    check_D_derivative,
    check_d_conjugation,
    check_virasoro,
    check_weight_property,
    commutativity_probe,
)
from .core import (
    GradedSpace,
    MatrixElement,
    MissingConformalData,
    OsvaInstance,
    basis_vec,
    iterate_element,
    matrix_element_product,
    opposite_vertex,
    pair,
    vertex_eval,
)
from .instances import (
    AssociativeAlgebraInstance,
    HeisenbergInstance,
    NonAssociativeError,
    TableInstance,
    TensorInstance,
    make_assoc_algebra_instance,
    make_heisenberg_instance,
    make_tensor_instance,
    matrix_algebra_table,
    partitions,
)

__all__ = [n for n in dir() if not n.startswith("_")]
