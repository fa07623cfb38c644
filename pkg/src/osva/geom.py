"""Boundary-disk moduli elements and their evaluation on a truncated instance.

A moduli element of arity n is the upper half disk with ordered boundary
punctures ``inf, r_1, ..., r_{n-1}, 0`` and local coordinates given by jets.
The determinant-line scalar is fixed to 1.  Sewing is implemented for the
affine subclass only (no higher jet terms at the two punctures being glued).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Sequence

from .modes.core import (
    OsvaInstance,
    Vec,
    components,
    exp_apply,
    matrix_element_product,
    pair,
    vdiff_norm,
    vertex_eval,
    vscale,
    vsum,
)
from .report import CheckReport

DEFAULT_JET_ORDER = 4


class NotSewable(ValueError):
    pass


@dataclass(frozen=True)
class CoordinateJet:
    """Truncated local coordinate ``exp(sum A_j x^(j+1) d/dx)(a0 x)``.

    ``a0`` is None for the coordinate at infinity.
    """

    A: tuple = ()
    a0: float | None = 1

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(self.A))
        if self.a0 is not None and not self.a0 > 0:
            raise ValueError("a0 must be positive")
        for x in self.A:
            if x != x or x in (inf, -inf):
                raise ValueError("jet entries must be finite")

    @property
    def is_affine(self) -> bool:
        return all(x == 0 for x in self.A)

    def coeff(self, j: int):
        return self.A[j - 1] if 0 < j <= len(self.A) else 0

    def to_json(self) -> dict:
        out = {"A": [_num_json(x) for x in self.A]}
        if self.a0 is not None:
            out = {"a0": _num_json(self.a0), **out}
        return out

    @classmethod
    def from_json(cls, obj, at_infinity=False) -> "CoordinateJet":
        A = tuple(_num(x) for x in obj.get("A", []))
        if at_infinity:
            if "a0" in obj:
                raise ValueError("the jet at infinity has no a0")
            return cls(A, None)
        return cls(A, _num(obj.get("a0", 1)))


def _num(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers")
    return x


def _num_json(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


INF_JET = CoordinateJet((), None)
UNIT_JET = CoordinateJet((), 1)


@dataclass(frozen=True)
class ModuliElement:
    positions: tuple = ()
    jet0: CoordinateJet = INF_JET
    jets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))
        object.__setattr__(self, "jets", tuple(self.jets))
        if self.jet0.a0 is not None:
            raise ValueError("the jet at infinity carries no a0")
        n = len(self.jets)
        if n == 0:
            if self.positions:
                raise ValueError("an arity-0 element has no positions")
            if self.jet0.coeff(1) != 0:
                raise ValueError("arity-0 elements need A_1 = 0 at infinity")
        elif len(self.positions) != n - 1:
            raise ValueError(f"arity {n} needs {n - 1} positions, got {len(self.positions)}")
        pts = list(self.positions) + ([0] if n else [])
        if any(p == 0 for p in self.positions):
            raise ValueError("positions must be nonzero")
        if len(set(pts)) != len(pts):
            raise ValueError("positions must be distinct")
        for j in self.jets:
            if j.a0 is None:
                raise ValueError("positive punctures need a scale a0")

    @property
    def n(self) -> int:
        return len(self.jets)

    def punctures(self) -> list:
        """Positions of punctures 1..n; the last one sits at 0."""
        return list(self.positions) + [0]

    def to_json(self) -> dict:
        return {
            "positions": [_num_json(p) for p in self.positions],
            "jet0": self.jet0.to_json(),
            "jets": [j.to_json() for j in self.jets],
        }

    @classmethod
    def from_json(cls, obj) -> "ModuliElement":
        if not isinstance(obj, dict):
            raise ValueError("moduli element must be an object")
        return cls(
            tuple(_num(p) for p in obj.get("positions", [])),
            CoordinateJet.from_json(obj.get("jet0", {}), at_infinity=True),
            tuple(CoordinateJet.from_json(j) for j in obj.get("jets", [])),
        )


def standard_element(kind: str, *, r=None, eps=None, i=None, a=None) -> ModuliElement:
    """``identity``, ``P`` (needs r), ``A`` (needs eps, i; arity 0) or ``scale`` (needs a)."""
    if kind == "identity":
        return ModuliElement((), INF_JET, (UNIT_JET,))
    if kind == "P":
        if r is None or not r > 0:
            raise ValueError("P(r) needs r > 0")
        return ModuliElement((r,), INF_JET, (UNIT_JET, UNIT_JET))
    if kind == "A":
        if i is None or i < 1 or eps is None:
            raise ValueError("A(eps; i) needs eps and i >= 1")
        if i == 1:
            raise ValueError("A(eps; 1) is not an arity-0 element (A_1 must vanish)")
        A = tuple(eps if j == i else 0 for j in range(1, i + 1))
        return ModuliElement((), CoordinateJet(A, None), ())
    if kind == "scale":
        if a is None or not a > 0:
            raise ValueError("scale(a) needs a > 0")
        return ModuliElement((), INF_JET, (CoordinateJet((), a),))
    raise ValueError(f"unknown standard element {kind!r}")


def coord_series(jet: CoordinateJet, order: int = DEFAULT_JET_ORDER) -> list:
    """Taylor coefficients ``[c_0, ..., c_order]`` of the jet's coordinate."""
    a0 = 1 if jet.a0 is None else jet.a0
    term = [0] * (order + 1)
    if order >= 1:
        term[1] = a0
    total = list(term)
    k = 0
    while any(term):
        k += 1
        new = [0] * (order + 1)
        # A_j x^(j+1) d/dx sends x^m to m A_j x^(m+j)
        for m, c in enumerate(term):
            if not c:
                continue
            for j in range(1, order - m + 1):
                A = jet.coeff(j)
                if A:
                    new[m + j] += m * A * c
        term = [c / k if isinstance(c, float) else Fraction(c) / k for c in new]
        total = [x + y for x, y in zip(total, term)]
    return total


def _scale_op(inst, a0, x: Vec) -> Vec:
    if a0 == 1:
        return x
    out = {}
    for k, c in x.items():
        w = inst.space.wt(k)
        if isinstance(a0, (int, Fraction)) and w.denominator == 1:
            out[k] = c * Fraction(a0) ** (-int(w))
        else:
            out[k] = c * float(a0) ** float(-w)
    return out


def _jet_exp(inst, coeffs: dict, sign: int, x: Vec) -> Vec:
    """``exp(-sum A_j L(sign*j)) x``; identity when all A_j vanish."""
    coeffs = {j: A for j, A in coeffs.items() if A != 0}
    if not coeffs:
        return x
    if not inst.has_conformal:
        from .modes.core import MissingConformalData

        raise MissingConformalData(f"{inst.name} has no conformal data")

    def op(label):
        return vsum(vscale(inst.L(sign * j, label), -A) for j, A in coeffs.items())

    return exp_apply(op, x, Fraction(1))


def virasoro_jet_action(inst: OsvaInstance, jet: CoordinateJet, direction: str, v: Vec) -> Vec:
    """``+``: ``exp(-sum A_j L(j)) a0^(-L(0)) v``; ``-``: ``exp(-sum A_j L(-j)) v``."""
    if direction not in ("+", "-"):
        raise ValueError("direction must be '+' or '-'")
    if not jet.is_affine and not inst.has_conformal:
        from .modes.core import MissingConformalData

        raise MissingConformalData(f"{inst.name} has no conformal data")
    coeffs = {j: jet.coeff(j) for j in range(1, len(jet.A) + 1)}
    if direction == "+":
        x = _scale_op(inst, 1 if jet.a0 is None else jet.a0, v)
        return _jet_exp(inst, coeffs, 1, x)
    return _jet_exp(inst, coeffs, -1, v)


def _ordered(Q: ModuliElement, args):
    """Reorder punctures so positions decrease to 0.

    Returns ``(shift, positions, jets, args)``: when the smallest position t
    is negative everything is translated by -t and the translation comes back
    as ``exp(t L(-1))`` applied before the jet at infinity.
    """
    pts = Q.punctures()
    t = min(pts)
    shifted = [p - t for p in pts]
    order = sorted(range(Q.n), key=lambda k: -shifted[k])
    return t, [shifted[k] for k in order], [Q.jets[k] for k in order], [args[k] for k in order]


def _outer_map(inst, Q: ModuliElement, t):
    """The weight-raising operator applied last: translation, then the jet at infinity."""

    def apply(x: Vec) -> Vec:
        if t != 0:
            x = exp_apply(inst.D, x, t)
        return virasoro_jet_action(inst, Q.jet0, "-", x)

    trivial = t == 0 and Q.jet0.is_affine
    return apply, trivial


def _check_args(Q, args):
    if Q.n == 0:
        raise ValueError("arity-0 elements are evaluated with phi0")
    if len(args) != Q.n:
        raise ValueError(f"element of arity {Q.n} needs {Q.n} arguments, got {len(args)}")


def phi_vector(inst: OsvaInstance, Q: ModuliElement, args: Sequence[Vec]) -> Vec:
    """The (truncated) vector ``Phi(Q)(v_1, ..., v_n)``."""
    _check_args(Q, args)
    t, pos, jets, args = _ordered(Q, args)
    dressed = [virasoro_jet_action(inst, j, "+", a) for j, a in zip(jets, args)]
    x = dressed[-1]
    for u, r in zip(reversed(dressed[:-1]), reversed(pos[:-1])):
        x = vertex_eval(inst, u, r, x)
    outer, _ = _outer_map(inst, Q, t)
    return outer(x)


def phi_eval(inst: OsvaInstance, Q: ModuliElement, args: Sequence[Vec], vdual: Vec):
    """``<v', Phi(Q)(v_1, ..., v_n)>`` through ``matrix_element_product``."""
    _check_args(Q, args)
    t, pos, jets, args = _ordered(Q, args)
    dressed = [virasoro_jet_action(inst, j, "+", a) for j, a in zip(jets, args)]
    outer, trivial = _outer_map(inst, Q, t)
    if not trivial:
        # pull v' back through the weight-raising outer map
        top = max((inst.space.wt(k) for k in vdual), default=None)
        dual = {}
        for b in inst.space.basis:
            if top is not None and inst.space.wt(b) <= top:
                c = pair(vdual, outer({b: Fraction(1)}))
                if c != 0:
                    dual[b] = c
        vdual = dual
    if Q.n == 1:
        return pair(vdual, dressed[0])
    factors = list(zip(dressed[:-1], pos[:-1]))
    return matrix_element_product(inst, vdual, factors, dressed[-1]).value


def phi0(inst: OsvaInstance, jet0: CoordinateJet) -> Vec:
    """Arity-0 evaluation ``exp(-sum A_j L(-j)) 1``."""
    if jet0.coeff(1) != 0:
        raise ValueError("arity-0 elements need A_1 = 0")
    return virasoro_jet_action(inst, jet0, "-", dict(inst.vacuum))


def extract_vacuum(inst: OsvaInstance) -> Vec:
    return phi0(inst, INF_JET)


def extract_conformal(inst: OsvaInstance, eps: float = 1e-4) -> Vec:
    """Central difference ``-(Phi0(A(eps;2)) - Phi0(A(-eps;2))) / (2 eps)``."""
    if eps == 0:
        raise ValueError("eps must be nonzero")
    if not inst.has_conformal:
        from .modes.core import MissingConformalData

        raise MissingConformalData(f"{inst.name} has no conformal data")
    plus = phi0(inst, standard_element("A", eps=eps, i=2).jet0)
    minus = phi0(inst, standard_element("A", eps=-eps, i=2).jet0)
    keys = sorted(set(plus) | set(minus), key=lambda k: inst.space.basis.index(k))
    out = {}
    for k in keys:
        c = -(float(plus.get(k, 0)) - float(minus.get(k, 0))) / (2 * eps)
        if c != 0:
            out[k] = c
    return out


def sew_affine(Q1: ModuliElement, i: int, Q2: ModuliElement) -> ModuliElement:
    """Sew puncture i of Q1 to the puncture at infinity of Q2.

    Both glued coordinates must be affine: puncture i of Q1 carries
    ``a(w - p_i)`` and Q2 has the standard coordinate at infinity.  Gluing
    with ``w -> -1/w`` places puncture k of Q2 at ``p_i + s_k / a`` with jet
    ``(a b_k, a^j A_j)``.  Raises NotSewable when no separating radius exists.
    """
    if not 1 <= i <= Q1.n:
        raise ValueError(f"puncture index {i} out of range 1..{Q1.n}")
    ji = Q1.jets[i - 1]
    if not ji.is_affine or not Q2.jet0.is_affine:
        raise ValueError("sew_affine needs affine coordinates at the glued punctures")
    a = ji.a0
    pts1 = Q1.punctures()
    p = pts1[i - 1]
    inner = max((abs(s) for s in Q2.positions), default=0)
    outer = min((abs(q - p) for k, q in enumerate(pts1) if k != i - 1), default=inf)
    if not inner < a * outer:
        raise NotSewable(
            f"no radius separates the glued disks: need max|s_k| = {inner} < a*min|p_j - p_i| = {a * outer}"
        )
    new_pos = [p + s / a for s in Q2.punctures()]
    new_jets = [CoordinateJet(tuple(A * a ** (j + 1) for j, A in enumerate(jk.A)), a * jk.a0) for jk in Q2.jets]
    pts = pts1[: i - 1] + new_pos + pts1[i:]
    jets = Q1.jets[: i - 1] + tuple(new_jets) + Q1.jets[i:]
    return ModuliElement(tuple(pts[:-1]), Q1.jet0, jets)


def check_sewing_axiom(inst: OsvaInstance, Q1: ModuliElement, i: int, Q2: ModuliElement,
                       vectors: Sequence[Vec], vdual: Vec, tol: float = 1e-4) -> CheckReport:
    """Compare Phi of the sewn element with the contraction of Phi(Q1) and Phi(Q2).

    ``vectors`` are the arguments of the sewn element in its puncture order.
    The contraction feeds each weight component of Phi(Q2)(...) into slot i
    of Phi(Q1) and sums.
    """
    Q = sew_affine(Q1, i, Q2)
    vectors = list(vectors)
    if len(vectors) != Q.n:
        raise ValueError(f"sewn element has arity {Q.n}, got {len(vectors)} vectors")
    rep = CheckReport("sewing", tolerance=tol)
    sewn = phi_eval(inst, Q, vectors, vdual)
    inner_args = vectors[i - 1 : i - 1 + Q2.n]
    x = phi_vector(inst, Q2, inner_args)
    shells = {}
    for w, comp in components(inst.space, x).items():
        args = vectors[: i - 1] + [comp] + vectors[i - 1 + Q2.n :]
        shells[w] = phi_eval(inst, Q1, args, vdual)
    contraction = sum(shells.values(), 0.0)
    rep.residual = abs(float(sewn) - float(contraction))
    rep.passed = rep.residual <= tol
    if not rep.passed:
        rep.fail(f"sew at puncture {i}: {Q.to_json()}", contraction, sewn, rep.residual)
    rep.details = {"sewn_element": Q.to_json(), "sewn_value": float(sewn), "contraction": float(contraction)}
    return rep


def conformal_error(inst: OsvaInstance, approx: Vec) -> float:
    """Largest coefficient error of an approximation to the conformal element."""
    return vdiff_norm(approx, inst.conformal or {})
