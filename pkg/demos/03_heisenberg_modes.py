"""
Free boson modes
================

Truncated Fock space of one free boson.  Modes come from the iterate
formula, so every identity below is checked in rational arithmetic.
"""
from fractions import Fraction

from osva.modes import (
    associativity_samples,
    check_associativity,
    check_virasoro,
    make_heisenberg_instance,
    matrix_element_product,
)

h = make_heisenberg_instance(8)
print("dimension per weight:", [len(h.space.of_weight(w)) for w in h.space.weights()])

a = (1,)
print("alpha(1) alpha(-1) 1 =", h.mode(a, 1, a))
print("L(0) alpha(-2) 1 =", h.L(0, (2,)))
print("conformal vector:", h.conformal, "central charge", h.central_charge)
print(check_virasoro(h, (-3, 3)))

# two-point function <1, Y(alpha,1) Y(alpha,r2) 1> should be (1 - r2)^-2,
# the truncated value approaches it geometrically in r2
for cut in (8, 12, 16, 20):
    hc = make_heisenberg_instance(cut)
    me = matrix_element_product(hc, {(): 1}, [({a: 1}, 1.0), ({a: 1}, 0.6)], {(): 1})
    print(f"cutoff {cut:2d}: {me.value:.6f}  (exact {1 / 0.4 ** 2:.6f})")

# the product-iterate comparison converges much more slowly
for cut in (8, 12):
    hc = make_heisenberg_instance(cut)
    rep = check_associativity(hc, associativity_samples(hc, 2))
    print(f"associativity residual at cutoff {cut}: {rep.residual:.3g}")

# L(2) kills the vacuum, so this is the bracket [L(2), L(-2)] 1 = c/2
print("L(2) L(-2) 1 =", h.Lvec(2, h.L(-2, ())), "==", {(): Fraction(1, 2)})
