"""
Small algebra objects
=====================

Search for associative unital algebras over the Ising data with small
multiplicity spaces, then re-check every hit in exact arithmetic.
"""
from osva.fusion import ising_builtin
from osva.solver import build_constraints, solve_small, unit_uniqueness_check, verify_algebra

data = ising_builtin()

for dims in [(1, 0, 0), (1, 1, 0), (1, 0, 1), (2, 0, 0), (0, 1, 0)]:
    system = build_constraints(data, dims)
    res = solve_small(data, dims)
    print(f"dims {dims}: {len(system.variables)} unknowns, "
          f"{len(system.quadratic_equations)} quadratic equations, {len(res)} solutions")
    for alg in res:
        ok = verify_algebra(data, alg).passed
        unique = unit_uniqueness_check(data, alg).passed
        flat = {k: [str(x) for c in T for p in c for x in p] for k, T in alg.C.items()}
        nonzero = {k: v for k, v in flat.items() if v}
        print(f"   verified={ok} unique unit={unique}  C={nonzero}")

# (1,1,0) is the vacuum plus the fermion: C_11^0 can be 0 or 1,
# the second is the familiar Z/2 extension
