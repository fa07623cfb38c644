"""
Ising fusion data
=================

Load the built-in three-sector fusion data, check the ring, and look at the
one genuinely two-dimensional fusing matrix.
"""
import itertools

from osva.fusion import coupling_pairs, ising_builtin, validate_fusing, validate_ring
from osva.solver import diagonal_double_check

data = ising_builtin()
ring = data.ring
print("sectors:", ring.sectors, "weights:", [str(w) for w in ring.lowest_weights])

# nonzero fusion coefficients N_ij^k
for i, j, k in itertools.product(range(ring.rank), repeat=3):
    if ring.N(i, j, k):
        print(f"  N[{i},{j}]^{k} = {ring.N(i, j, k)}")

# ring associativity and unit laws, all exact
print(validate_ring(ring))

# which (m, n) channels couple for sigma x sigma x sigma -> sigma
print("coupling (2,2,2,2):", sorted(coupling_pairs(ring, 2, 2, 2, 2)))
F = data.F(2, 2, 2, 2)
for m in range(2):
    print("  ", [str(F.value(m, n)) for n in range(2)])

# entries outside the coupling graph are decoupled, not zero
print("F(2,2,2,2)[2,2] =", F.value(2, 2))
print(validate_fusing(data))

# the blocks are orthogonal, so the diagonal double is associative
print(diagonal_double_check(data))
