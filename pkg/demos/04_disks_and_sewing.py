"""
Disks with punctures
====================

Evaluate the geometric vertex map on a few standard disks and compare
sewing with contraction over intermediate weights.
"""
from osva.geom import (
    check_sewing_axiom,
    conformal_error,
    extract_conformal,
    extract_vacuum,
    phi_vector,
    sew_affine,
    standard_element,
)
from osva.modes import make_heisenberg_instance, vertex_eval

h = make_heisenberg_instance(8)
a = {(1,): 1}

P = standard_element("P", r=0.5)
print(P.to_json())
print("Phi(P(0.5)) == Y(., 0.5):", phi_vector(h, P, [a, a]) == vertex_eval(h, a, 0.5, a))

# arity-0 disks give back the vacuum and, by differentiating in A_2, omega
print("vacuum:", extract_vacuum(h))
for eps in (1e-2, 5e-3, 1e-4):
    print(f"eps={eps:g}: conformal error {conformal_error(h, extract_conformal(h, eps)):.2e}")

# sewing P(0.6) into the puncture at 0 of P(1.0)
Q = sew_affine(standard_element("P", r=1.0), 2, standard_element("P", r=0.6))
print("sewn:", Q.to_json())
rep = check_sewing_axiom(h, standard_element("P", r=1.0), 2, standard_element("P", r=0.6),
                         [a, a, h.vacuum], h.vacuum)
print(rep)

# sewing into the other puncture is the iterate side; the truncation shows
rep = check_sewing_axiom(h, standard_element("P", r=0.6), 1, standard_element("P", r=0.4),
                         [a, a, h.vacuum], h.vacuum)
print(rep)
