"""Axiom checks on truncated instances.

Every check returns a ``CheckReport``.  Mode-level identities are compared
exactly when the instance has exact scalars; only identities involving
radii are floating.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from ..report import CheckReport
from .core import (
    OsvaInstance,
    Vec,
    basis_vec,
    components,
    iterate_element,
    matrix_element_product,
    vadd,
    vdiff_norm,
    vscale,
    vsum,
    weight_of,
)


def _fmt(x) -> str:
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k!r}: {c}" for k, c in x.items()) + "}"
    return repr(x)


def _labels(inst, samples):
    return list(inst.space.basis) if samples is None else list(samples)


def _as_vec(x) -> Vec:
    return x if isinstance(x, dict) else basis_vec(x)


def _residual(x: Vec, y: Vec) -> float:
    return vdiff_norm(x, y)


# ---------------------------------------------------------------------------


def check_associativity(inst: OsvaInstance, samples, tol: float = 1e-4) -> CheckReport:
    """Compare ``<v', Y(u,r1)Y(v,r2)w>`` with ``<v', Y(Y(u,r1-r2)v,r2)w>``.

    ``samples`` is a list of ``(u, v, w, v', r1, r2)``; vectors may be basis
    labels.  Details carry the number of product sums whose top shell looked
    unconverged.
    """
    rep = CheckReport("associativity", tolerance=tol)
    tails = 0
    worst = None
    for s in samples:
        u, v, w, vd, r1, r2 = s
        if not (r1 > r2 > r1 - r2 > 0):
            raise ValueError(f"radii ({r1}, {r2}) do not satisfy r1 > r2 > r1-r2 > 0")
        u, v, w, vd = map(_as_vec, (u, v, w, vd))
        prod = matrix_element_product(inst, vd, [(u, r1), (v, r2)], w)
        it = iterate_element(inst, vd, u, r1 - r2, v, r2, w)
        tails += prod.tail_flag
        res = abs(prod.value - it)
        if worst is None or res > worst[0]:
            worst = (res, s, prod.value, it)
    if worst is not None:
        res, s, pv, iv = worst
        rep.residual = res
        rep.passed = res <= tol
        if not rep.passed:
            rep.witnesses.append(_witness(s, pv, iv))
    rep.details = {"samples": len(samples), "tail_flags": tails, "cutoff": inst.space.cutoff}
    return rep


def _witness(s, expected, got):
    from ..report import Witness

    u, v, w, vd, r1, r2 = s
    return Witness(f"u={_fmt(u)} v={_fmt(v)} w={_fmt(w)} v'={_fmt(vd)} r=({r1}, {r2})", expected, got)


def associativity_samples(inst: OsvaInstance, max_weight=2, radii=(1.0, 0.6)):
    """All basis quadruples with weights up to ``max_weight``."""
    low = [b for b in inst.space.basis if inst.space.wt(b) <= max_weight]
    r1, r2 = radii
    return [(u, v, w, d, r1, r2) for u in low for v in low for w in low for d in low]


def check_d_conjugation(inst: OsvaInstance, a, samples=None) -> CheckReport:
    """Per-mode form of ``a^d Y(u,r) a^-d = Y(a^d u, a r)``.

    For homogeneous u, v and each retained n the left side scales the
    coefficient of ``u_n v`` by ``a^(wt out - wt v)``, the right side by
    ``a^(wt u - n - 1)``.  Samples are pairs ``(u, v)``; default is all
    basis pairs.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    exact = isinstance(a, (int, Fraction))
    rep = CheckReport("d_conjugation", tolerance=0.0 if exact else 1e-12)
    pairs = samples
    if pairs is None:
        pairs = [(u, v) for u in inst.space.basis for v in inst.space.basis]
    count = 0
    for u, v in pairs:
        u, v = _as_vec(u), _as_vec(v)
        wu, wv = weight_of(inst.space, u), weight_of(inst.space, v)
        if wu is None or wv is None:
            continue
        for n in {n for ul in u for vl in v for n in inst.mode_indices(ul, vl)}:
            out = inst.mode_vec(u, n, v)
            for k, c in out.items():
                e_left = inst.space.wt(k) - wv
                e_right = wu - n - 1
                count += 1
                if exact and e_left.denominator == 1 and e_right.denominator == 1:
                    lhs = Fraction(a) ** int(e_left) * c
                    rhs = Fraction(a) ** int(e_right) * c
                    if lhs != rhs:
                        rep.fail(f"u={_fmt(u)} n={n} v={_fmt(v)} at {k!r}", rhs, lhs)
                else:
                    lhs = float(a) ** float(e_left) * float(c)
                    rhs = float(a) ** float(e_right) * float(c)
                    err = abs(lhs - rhs) / max(1.0, abs(rhs))
                    if err > rep.tolerance:
                        rep.fail(f"u={_fmt(u)} n={n} v={_fmt(v)} at {k!r}", rhs, lhs, err)
    rep.details = {"coefficients": count}
    return rep


def check_D_derivative(inst: OsvaInstance, samples=None) -> CheckReport:
    """``(Du)_m = -m u_{m-1}`` and ``[D, u_m] = -m u_{m-1}`` on retained modes.

    The bracket is evaluated on basis vectors v whose images stay inside the
    cutoff, so neither side loses terms to truncation.
    """
    rep = CheckReport("D_derivative")
    us = _labels(inst, samples)
    cut = inst.space.cutoff
    coef = bracket = 0
    for u in us:
        wu = inst.space.wt(u)
        Du = inst.D(u)
        for v in inst.space.basis:
            wv = inst.space.wt(v)
            Dv = inst.D(v) if wv + 1 <= cut else None
            for m in inst.mode_indices(u, v):
                target = vscale(inst.mode(u, m - 1, v), -m) if wu + wv - m <= cut else None
                if wu + 1 <= cut and target is not None:
                    got = inst.mode_vec(Du, m, basis_vec(v))
                    coef += 1
                    if got != target:
                        rep.fail(f"(D{u!r})_{m} {v!r}", target, got, max(1.0, _residual(got, target)))
                out = inst.mode(u, m, v)
                wout = wu + wv - m - 1
                if Dv is not None and target is not None and wout + 1 <= cut:
                    got = vadd(inst.Dvec(out), inst.mode_vec(basis_vec(u), m, Dv), -1)
                    bracket += 1
                    if got != target:
                        rep.fail(f"[D, {u!r}_{m}] {v!r}", target, got, max(1.0, _residual(got, target)))
    rep.details = {"coefficient_checks": coef, "bracket_checks": bracket}
    return rep


def check_creation(inst: OsvaInstance) -> CheckReport:
    """``u_n 1 = 0`` unless n is a negative integer, and ``u_{-k-1}1 = D^k u / k!``."""
    rep = CheckReport("creation")
    cut = inst.space.cutoff
    vac = inst.vacuum
    count = 0
    for u in inst.space.basis:
        ns = {n for vl in vac for n in inst.mode_indices(u, vl)}
        powers = {0: basis_vec(u)}
        for n in sorted(ns, reverse=True):
            got = inst.mode_vec(basis_vec(u), n, vac)
            count += 1
            if n.denominator == 1 and n <= -1:
                k = int(-n - 1)
                if inst.space.wt(u) + k > cut:
                    continue
                for j in range(1, k + 1):
                    if j not in powers:
                        powers[j] = inst.Dvec(powers[j - 1])
                expected = vscale(powers[k], Fraction(1, factorial(k)))
            else:
                expected = {}
            if got != expected:
                rep.fail(f"{u!r}_{n} 1", expected, got, max(1.0, _residual(got, expected)))
    rep.details = {"modes_checked": count}
    return rep


def check_weight_property(inst: OsvaInstance, n1, n2) -> CheckReport:
    """Scan mode outputs for inputs in the classes ``n1 + Z`` and ``n2 + Z``.

    ``mode_offsets`` is the set of mode indices mod 1 with a nonzero output
    (the finite set of the weight axiom, mod Z); ``output_offsets`` is the set
    of ``wt(out) - n1 - n2`` mod 1.
    """
    n1, n2 = Fraction(n1), Fraction(n2)
    rep = CheckReport("weight_property")

    def cls(b, t):
        return (inst.space.wt(b) - t).denominator == 1

    us = [b for b in inst.space.basis if cls(b, n1)]
    vs = [b for b in inst.space.basis if cls(b, n2)]
    mode_off, out_off = set(), set()
    for u in us:
        for v in vs:
            for n in inst.mode_indices(u, v):
                out = inst.mode(u, n, v)
                if not out:
                    continue
                mode_off.add(n % 1)
                for k in out:
                    w = inst.space.wt(k)
                    if w != inst.space.wt(u) + inst.space.wt(v) - n - 1:
                        rep.fail(f"{u!r}_{n} {v!r}", inst.space.wt(u) + inst.space.wt(v) - n - 1, w)
                    out_off.add((w - n1 - n2) % 1)
    rep.details = {
        "classes": [n1 % 1, n2 % 1],
        "mode_offsets": sorted(mode_off),
        "output_offsets": sorted(out_off),
        "inputs": [len(us), len(vs)],
    }
    return rep


def check_virasoro(inst: OsvaInstance, mode_range=(-3, 3), tol: float = 0.0) -> CheckReport:
    """Virasoro brackets on basis vectors, plus ``L(0) = d`` and ``L(-1) = D``.

    Only vectors for which every intermediate of ``L(m)L(n)v`` and
    ``L(n)L(m)v`` stays inside the cutoff are used.
    """
    if inst.conformal is None or inst.central_charge is None:
        from .core import MissingConformalData

        raise MissingConformalData(f"{inst.name} has no conformal data")
    rep = CheckReport("virasoro", tolerance=tol)
    lo, hi = mode_range
    c = inst.central_charge
    cut = inst.space.cutoff
    count = 0
    worst = 0.0
    for m in range(lo, hi + 1):
        for n in range(lo, hi + 1):
            for v in inst.space.basis:
                w = inst.space.wt(v)
                if max(w - n, w - m, w - m - n) > cut:
                    continue
                lhs = vadd(inst.Lvec(m, inst.L(n, v)), inst.Lvec(n, inst.L(m, v)), -1)
                rhs = vscale(inst.L(m + n, v), m - n)
                if m + n == 0:
                    rhs = vadd(rhs, {v: c * Fraction(m ** 3 - m, 12)})
                count += 1
                r = _residual(lhs, rhs)
                if r > tol:
                    rep.fail(f"[L({m}), L({n})] {v!r}", rhs, lhs, r)
                worst = max(worst, r)
    for v in inst.space.basis:
        got = inst.L(0, v)
        exp = inst.grading(basis_vec(v))
        r = _residual(got, exp)
        if r > tol:
            rep.fail(f"L(0) {v!r}", exp, got, r)
        worst = max(worst, r)
        if inst.space.wt(v) + 1 <= cut:
            got, exp = inst.L(-1, v), inst.D(v)
            r = _residual(got, exp)
            if r > tol:
                rep.fail(f"L(-1) {v!r}", exp, got, r)
            worst = max(worst, r)
    rep.residual = max(rep.residual, worst)
    rep.passed = rep.residual <= tol
    rep.details = {"bracket_checks": count, "central_charge": c, "mode_range": [lo, hi]}
    return rep


def c0_membership(inst: OsvaInstance, u, tol: float = 0.0, basis=None) -> CheckReport:
    """Membership of u in the meromorphic center.

    Three sub-checks, all required: (a) integral weights, (b) only integral
    modes act nonzero, (c) skew-symmetry
    ``v_n u = sum_k (-1)^(n+k+1) D^(k) u_{n+k} v`` on every retained integer mode.
    """
    u = _as_vec(u)
    rep = CheckReport("c0_membership", tolerance=tol)
    vs = _labels(inst, basis)
    cut = inst.space.cutoff
    sub = {"integral_weight": True, "integral_modes": True, "skew_symmetry": True}

    for k in u:
        if inst.space.wt(k).denominator != 1:
            sub["integral_weight"] = False
            rep.fail(f"wt {k!r}", "integer", inst.space.wt(k))

    checked = 0
    for wu, uc in components(inst.space, u).items():
        for v in vs:
            wv = inst.space.wt(v)
            for ul in uc:
                for n in inst.mode_indices(ul, v):
                    if n.denominator != 1 and inst.mode(ul, n, v):
                        sub["integral_modes"] = False
                        rep.fail(f"u_{n} {v!r}", "no fractional modes", inst.mode(ul, n, v))
            ns = {n for ul in uc for n in inst.mode_indices(v, ul) if n.denominator == 1}
            for n in sorted(ns):
                wout = wu + wv - n - 1
                if wout > cut:
                    continue
                lhs = inst.mode_vec(basis_vec(v), n, uc)
                terms = []
                k = 0
                while wout - k >= 0:
                    x = inst.mode_vec(uc, n + k, basis_vec(v))
                    for _ in range(k):
                        x = inst.Dvec(x)
                    sign = -1 if (n + k + 1) % 2 else 1
                    terms.append(vscale(x, Fraction(sign, factorial(k))))
                    k += 1
                rhs = vsum(terms)
                checked += 1
                r = _residual(lhs, rhs)
                if r > tol:
                    sub["skew_symmetry"] = False
                    rep.fail(f"v={v!r} n={n}", rhs, lhs, max(r, 1.0) if tol == 0 else r)
    rep.details = dict(sub, skew_checks=checked)
    rep.passed = all(sub.values()) and rep.residual <= tol
    return rep


def commutativity_probe(inst: OsvaInstance, u, v) -> bool:
    """True when ``u_{-1} v == v_{-1} u``; a cheap non-commutativity witness."""
    u, v = _as_vec(u), _as_vec(v)
    return inst.mode_vec(u, -1, v) == inst.mode_vec(v, -1, u)


def check_identity(inst: OsvaInstance, radii=(0.3, 0.7, 1.0, 2.5)) -> CheckReport:
    """``Y(1, r) v = v`` for every basis v and each sampled radius."""
    from .core import vertex_eval

    rep = CheckReport("identity")
    for r in radii:
        for v in inst.space.basis:
            got = vertex_eval(inst, inst.vacuum, r, basis_vec(v))
            want = {v: 1.0}
            res = _residual(got, want)
            if res > 0:
                rep.fail(f"Y(1, {r}) {v!r}", want, got, res)
    rep.details = {"radii": list(radii), "basis_size": len(inst.space.basis)}
    return rep
