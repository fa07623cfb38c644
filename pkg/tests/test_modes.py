import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osva.modes import (
    NonAssociativeError,
    TableInstance,
    associativity_samples,
    c0_membership,
    check_associativity,
    check_creation,
    check_D_derivative,
    check_d_conjugation,
    check_identity,
    check_virasoro,
    check_weight_property,
    commutativity_probe,
    make_assoc_algebra_instance,
    make_heisenberg_instance,
    make_tensor_instance,
    matrix_algebra_table,
    matrix_element_product,
    opposite_vertex,
    pair,
    vertex_eval,
)
from osva.modes.core import MissingConformalData, exp_apply, vsum, vscale

VAC = ()
A1 = (1,)


@pytest.fixture(scope="module")
def heis():
    return make_heisenberg_instance(8)


@pytest.fixture(scope="module")
def m2():
    table, labels = matrix_algebra_table(2)
    return make_assoc_algebra_instance(table, 4, labels)


@pytest.fixture(scope="module")
def m2h(m2, heis):
    return make_tensor_instance(m2, heis)


# ---------------------------------------------------------------------------
# independent free-boson oracle: alpha(n) on partitions and Sugawara modes


def alpha(n, vec):
    out = {}
    for lam, c in vec.items():
        if n < 0:
            key = tuple(sorted(lam + (-n,), reverse=True))
            out[key] = out.get(key, 0) + c
        elif n > 0 and n in lam:
            rest = list(lam)
            rest.remove(n)
            key = tuple(rest)
            out[key] = out.get(key, 0) + c * n * lam.count(n)
    return {k: c for k, c in out.items() if c}


def sugawara(m, vec, cutoff):
    """L(m) = 1/2 sum_k :alpha(m-k) alpha(k):, normal ordered."""
    total = {}
    bound = cutoff + abs(m) + 2
    for k in range(-bound, bound + 1):
        j = m - k
        if k < j:
            first, second = k, j  # annihilator (larger index) acts first
        else:
            first, second = j, k
        x = alpha(second, vec)
        x = alpha(first, x)
        for key, c in x.items():
            if sum(key) <= cutoff:
                total[key] = total.get(key, 0) + Fraction(c, 2)
    return {k: c for k, c in total.items() if c}


# ---------------------------------------------------------------------------


def test_basis_sizes():
    h = make_heisenberg_instance(4)
    assert [len(h.space.of_weight(w)) for w in h.space.weights()] == [1, 1, 2, 3, 5]


def test_cutoff_minimum():
    with pytest.raises(ValueError):
        make_heisenberg_instance(1)


def test_alpha_one(heis):
    assert heis.mode(A1, 1, A1) == {VAC: 1}


def test_L0_eigenvalue(heis):
    assert heis.L(0, (2,)) == {(2,): 2}


def test_alpha_modes_match_oracle(heis):
    for v in heis.space.basis:
        for n in heis.mode_indices(A1, v):
            assert heis.mode(A1, n, v) == alpha(int(n), {v: 1}), (n, v)


def test_virasoro_modes_match_sugawara(heis):
    for v in heis.space.basis:
        for m in range(-3, 4):
            if sum(v) - m > 8:
                continue
            assert heis.L(m, v) == sugawara(m, {v: Fraction(1)}, 8), (m, v)


def test_weight_bookkeeping(heis):
    h = make_heisenberg_instance(6)
    for u, v in itertools.product(h.space.basis, repeat=2):
        for n in range(-8, 8):
            for k in h.mode(u, n, v):
                assert sum(k) == sum(u) - n - 1 + sum(v)


# ---------------------------------------------------------------------------
# vertex operators


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20.0))
def test_identity_property(r):
    h = make_heisenberg_instance(4)
    for v in h.space.basis:
        assert vertex_eval(h, h.vacuum, r, {v: Fraction(1)}) == {v: 1.0}


def test_two_alpha_vacuum_component(heis):
    out = vertex_eval(heis, {A1: 1}, 2.0, {A1: 1})
    assert out[VAC] == 0.25


def test_assoc_product_independent_of_r(m2):
    for r in (0.3, 1.0, 4.0):
        assert vertex_eval(m2, {"E12": 1}, r, {"E21": 1}) == {"E11": 1.0}


def test_vertex_eval_rejects_nonpositive(heis):
    with pytest.raises(ValueError):
        vertex_eval(heis, {A1: 1}, 0.0, {A1: 1})


def test_opposite_assoc_is_opposite_product(m2):
    for a, b in itertools.product(m2.space.basis, repeat=2):
        got = opposite_vertex(m2, {a: 1}, -1.0, {b: 1})
        assert got == {k: float(c) for k, c in m2.product(b, a).items()}


def test_opposite_vacuum(heis):
    for v in heis.space.basis:
        got = opposite_vertex(heis, heis.vacuum, -1.0, {v: Fraction(1)})
        if sum(v) == 0:
            assert got == {v: 1.0}
        # e^{-D} e^{D} v = v except for terms pushed past the cutoff
        low = {k: c for k, c in got.items() if abs(c) > 1e-9}
        if sum(v) <= 2:
            assert low.get(v) == pytest.approx(1.0)
            assert all(k == v or sum(k) >= 8 for k in low)


def test_opposite_unwound(heis):
    u = {A1: 1}
    direct = opposite_vertex(heis, u, -0.5, u)
    manual = exp_apply(heis.D, vertex_eval(heis, u, 0.5, u), -0.5)
    assert direct == manual


def test_opposite_rejects_positive(heis):
    with pytest.raises(ValueError):
        opposite_vertex(heis, {A1: 1}, 0.5, {A1: 1})


def test_matrix_element_single_factor(heis):
    u, w, d = {A1: 1}, {(2,): 1}, {(1, 1, 1): 1}
    me = matrix_element_product(heis, d, [(u, 0.7)], w)
    assert me.value == pair(d, vertex_eval(heis, u, 0.7, w))
    assert not me.tail_flag


def test_two_point_function():
    exact = 1 / (1.0 - 0.6) ** 2
    errs = []
    for cut in (8, 12, 16):
        h = make_heisenberg_instance(cut)
        me = matrix_element_product(h, {VAC: 1}, [({A1: 1}, 1.0), ({A1: 1}, 0.6)], {VAC: 1})
        errs.append(abs(me.value - exact))
    assert errs[0] > errs[1] > errs[2]
    # truncated sum of k 0.6^(k-1) for k <= cutoff, checked in closed form
    assert errs[0] == pytest.approx(sum(k * 0.6 ** (k - 1) for k in range(9, 400)), rel=1e-9)


def test_matrix_element_assoc(m2):
    for a, b, c in itertools.product(m2.space.basis, repeat=3):
        me = matrix_element_product(m2, {"E11": 1}, [({a: 1}, 2.0), ({b: 1}, 1.0)], {c: 1})
        prod = vsum(vscale(m2.product(x, c), k) for x, k in m2.product(a, b).items())
        assert me.value == prod.get("E11", 0)


def test_matrix_element_ordering(heis):
    with pytest.raises(ValueError):
        matrix_element_product(heis, {VAC: 1}, [({A1: 1}, 0.5), ({A1: 1}, 0.6)], {VAC: 1})


# ---------------------------------------------------------------------------
# axiom checks


def test_assoc_associativity_exact(m2):
    samples = [(a, b, c, d, 1.0, 0.6) for a, b, c, d in itertools.product(m2.space.basis, repeat=4)]
    rep = check_associativity(m2, samples)
    assert rep.passed and rep.residual == 0


def test_m2_not_commutative(m2):
    assert not commutativity_probe(m2, "E12", "E21")
    assert commutativity_probe(m2, "E11", "E11")


def test_associativity_rejects_bad_radii(heis):
    with pytest.raises(ValueError):
        check_associativity(heis, [(A1, A1, VAC, VAC, 1.0, 0.4)])


def test_associativity_residual_decreases():
    res = []
    for cut in (6, 8, 10, 12):
        h = make_heisenberg_instance(cut)
        res.append(check_associativity(h, associativity_samples(h, 1)).residual)
    for a, b in zip(res, res[1:]):
        assert b <= 1.1 * a


def test_tensor_associativity_scale(heis, m2h):
    base = check_associativity(heis, [(A1, A1, VAC, VAC, 1.0, 0.6)]).residual
    s = [(("E12", A1), ("E21", A1), ("E11", VAC), ("E11", VAC), 1.0, 0.6)]
    assert check_associativity(m2h, s).residual == pytest.approx(base)


@pytest.mark.parametrize("a", [1, 2, Fraction(3, 2)])
def test_d_conjugation(heis, a):
    rep = check_d_conjugation(heis, a)
    assert rep.passed and rep.residual == 0


def test_d_conjugation_float(heis):
    assert check_d_conjugation(heis, 1.7, [(A1, A1), ((2,), (1, 1))]).passed


def test_d_conjugation_exponent(heis):
    # mode n = 1 of alpha on alpha: exponent 1 + 1 - 1 - 1 = 0
    out = heis.mode(A1, 1, A1)
    assert out == {VAC: 1} and sum(VAC) - 1 == 1 + 1 - 1 - 1 - 1


def test_d_conjugation_rejects_mixed(heis):
    with pytest.raises(ValueError):
        check_d_conjugation(heis, 2, [({VAC: 1, A1: 1}, A1)])


def test_d_conjugation_assoc(m2):
    assert check_d_conjugation(m2, 2).passed


def test_D_derivative(heis, m2, m2h):
    for inst in (heis, m2):
        rep = check_D_derivative(inst)
        assert rep.passed and rep.residual == 0
    assert check_D_derivative(m2h, [("E12", A1), ("E11", (2,))]).passed


def test_D_derivative_alpha_m0(heis):
    # (D alpha)_0 = 0 * alpha_{-1}
    Du = heis.D(A1)
    assert Du == {(2,): 1}
    for v in heis.space.basis:
        assert heis.mode_vec(Du, 0, {v: 1}) == {}


def test_creation(heis, m2, m2h):
    for inst in (heis, m2, m2h):
        rep = check_creation(inst)
        assert rep.passed and rep.residual == 0
    assert heis.mode(A1, -2, VAC) == heis.D(A1) == {(2,): 1}


def test_identity_check(heis, m2h):
    assert check_identity(heis).passed
    assert check_identity(m2h).passed


def test_weight_property_integer(heis):
    rep = check_weight_property(heis, 0, 0)
    assert rep.details["mode_offsets"] == [0]
    assert rep.details["output_offsets"] == [0]


def test_weight_property_stable():
    a = check_weight_property(make_heisenberg_instance(5), 0, 0).details
    b = check_weight_property(make_heisenberg_instance(7), 0, 0).details
    assert a["mode_offsets"] == b["mode_offsets"]
    assert a["output_offsets"] == b["output_offsets"]


def ising_like_table():
    h, q = Fraction(1, 2), Fraction(1, 16)
    basis = ["1", "psi", "sigma"]
    weights = {"1": 0, "psi": h, "sigma": q}
    modes = {}
    for b in basis:
        modes[("1", -1, b)] = {b: 1}
        modes[(b, -1, "1")] = {b: 1}
    modes[("psi", 2 * h - 1, "psi")] = {"1": 1}
    modes[("psi", h - 1, "sigma")] = {"sigma": Fraction(1, 2)}
    modes[("sigma", h - 1, "psi")] = {"sigma": Fraction(1, 2)}
    modes[("sigma", 2 * q - 1, "sigma")] = {"1": 1}
    modes[("sigma", 2 * q - h - 1, "sigma")] = {"psi": 1}
    return TableInstance(basis, weights, {"1": 1}, modes, cutoff=1)


def test_weight_property_fractional():
    inst = ising_like_table()
    rep = check_weight_property(inst, Fraction(1, 16), Fraction(1, 16))
    assert rep.passed
    # sigma_n sigma at n = -7/8 and n = -11/8
    assert rep.details["mode_offsets"] == [Fraction(1, 8), Fraction(5, 8)]
    assert set(rep.details["output_offsets"]) == {Fraction(7, 8), Fraction(3, 8)}
    rep = check_weight_property(inst, Fraction(1, 2), Fraction(1, 16))
    assert set(rep.details["mode_offsets"]) == {Fraction(1, 2)}


def test_table_rejects_bad_weight():
    with pytest.raises(ValueError):
        TableInstance(["1", "x"], {"1": 0, "x": 1}, {"1": 1}, {("x", 1, "x"): {"x": 1}})


def test_virasoro(heis):
    rep = check_virasoro(heis, (-3, 3))
    assert rep.passed and rep.residual == 0
    assert heis.central_charge == 1


def test_virasoro_l2_lm2_on_vacuum(heis):
    x = heis.Lvec(2, heis.L(-2, VAC))
    y = heis.Lvec(-2, heis.L(2, VAC))
    diff = {k: x.get(k, 0) - y.get(k, 0) for k in set(x) | set(y)}
    assert {k: c for k, c in diff.items() if c} == {VAC: Fraction(1, 2)}


def test_virasoro_requires_conformal():
    with pytest.raises(MissingConformalData):
        check_virasoro(ising_like_table())


def test_c0_vacuum_everywhere(heis, m2, m2h):
    for inst in (heis, m2, m2h, ising_like_table()):
        assert c0_membership(inst, inst.vacuum).passed


def test_c0_rejects_off_diagonal(m2h):
    rep = c0_membership(m2h, {("E12", VAC): 1})
    assert not rep.passed
    assert not rep.details["skew_symmetry"]
    assert any("E21" in w.input for w in rep.witnesses)


def test_c0_identity_times_alpha(m2h):
    u = {("E11", A1): 1, ("E22", A1): 1}
    assert c0_membership(m2h, u).passed


@pytest.mark.parametrize(
    "coeffs, scalar",
    [((1, 0, 0, 1), True), ((3, 0, 0, 3), True), ((1, 0, 0, 0), False), ((0, 1, 0, 0), False), ((2, 0, 1, 2), False)],
)
def test_c0_center_is_scalars(m2h, coeffs, scalar):
    u = {(lab, VAC): Fraction(c) for lab, c in zip(["E11", "E12", "E21", "E22"], coeffs) if c}
    low = [b for b in m2h.space.basis if sum(b[1]) <= 2]
    assert c0_membership(m2h, u, basis=low).passed == scalar


def test_c0_fractional_weight_fails():
    inst = ising_like_table()
    rep = c0_membership(inst, {"sigma": 1})
    assert not rep.passed and not rep.details["integral_weight"]


# ---------------------------------------------------------------------------
# instance constructors


def test_one_dim_algebra_exact():
    inst = make_assoc_algebra_instance([[[1]]], 1)
    for rep in (check_creation(inst), check_D_derivative(inst), check_d_conjugation(inst, 2), check_virasoro(inst)):
        assert rep.passed and rep.residual == 0
    rep = check_associativity(inst, [(0, 0, 0, 0, 1.0, 0.6)])
    assert rep.residual == 0


def octonion_table():
    triples = [(1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5)]
    t = {}
    for i in range(8):
        t[0, i] = {i: 1}
        t[i, 0] = {i: 1}
    for i in range(1, 8):
        t[i, i] = {0: -1}
    for a, b, c in triples:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            t[x, y] = {z: 1}
            t[y, x] = {z: -1}
    return t


def test_octonions_rejected():
    with pytest.raises(NonAssociativeError) as exc:
        make_assoc_algebra_instance(octonion_table(), 8)
    a, b, c = exc.value.triple
    assert 0 not in (a, b, c)


def test_no_unit_rejected():
    with pytest.raises(ValueError, match="unit"):
        make_assoc_algebra_instance({(0, 0): {}}, 1)


def test_assoc_shape(m2):
    assert set(m2.space.weights()) == {0}
    assert m2.vacuum == {"E11": 1, "E22": 1}
    assert m2.mode("E12", -2, "E21") == {}
    assert m2.D("E12") == {}


def test_tensor_with_scalars_matches(heis):
    scal = make_assoc_algebra_instance([[[1]]], 1)
    t = make_tensor_instance(scal, heis)
    for u, v in itertools.product(heis.space.basis[:12], repeat=2):
        for n in heis.mode_indices(u, v):
            assert t.mode((0, u), n, (0, v)) == {(0, k): c for k, c in heis.mode(u, n, v).items()}
    assert t.vacuum == {(0, VAC): 1}
    assert t.conformal == {(0, (1, 1)): Fraction(1, 2)}


def test_tensor_virasoro(m2h):
    assert check_virasoro(m2h, (-2, 2)).passed


def test_tensor_requires_weight_zero(heis):
    with pytest.raises(ValueError):
        make_tensor_instance(heis, heis)
