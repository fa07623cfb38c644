"""Graded spaces, sparse vectors and the truncated vertex operator.

Vectors are plain dicts ``{basis label: coefficient}``.  Coefficients are
Fractions wherever the instance allows; the only floating step is the radius
power ``r**(-n-1)``.  A single weight cutoff bounds the basis, every
intermediate projection and every exponential series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

Label = Hashable
Vec = dict


class MissingConformalData(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    basis: tuple
    weight: Mapping[Label, Fraction]
    cutoff: Fraction

    def __post_init__(self):
        for b in self.basis:
            if self.weight[b] > self.cutoff:
                raise ValueError(f"basis vector {b!r} has weight {self.weight[b]} above the cutoff")

    def wt(self, label) -> Fraction:
        return self.weight[label]

    def weights(self) -> list[Fraction]:
        return sorted(set(self.weight[b] for b in self.basis))

    def of_weight(self, w) -> list:
        return [b for b in self.basis if self.weight[b] == w]

    def __contains__(self, label):
        return label in self.weight


# ---------------------------------------------------------------------------
# sparse vector helpers


def vadd(x: Vec, y: Vec, scale=1) -> Vec:
    out = dict(x)
    for k, c in y.items():
        out[k] = out.get(k, 0) + scale * c
    return {k: c for k, c in out.items() if c != 0}


def vscale(x: Vec, s) -> Vec:
    if s == 0:
        return {}
    return {k: s * c for k, c in x.items()}


def vsum(vecs: Iterable[Vec]) -> Vec:
    out: dict = {}
    for v in vecs:
        for k, c in v.items():
            out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c != 0}


def pair(dual: Vec, x: Vec):
    """``<v', x>`` with ``v'`` given by its coefficients on the dual basis."""
    return sum((c * x[k] for k, c in dual.items() if k in x), 0)


def vdiff_norm(x: Vec, y: Vec) -> float:
    keys = set(x) | set(y)
    return max((abs(float(x.get(k, 0) - y.get(k, 0))) for k in keys), default=0.0)


def apply_linear(op: Callable[[Label], Vec], x: Vec) -> Vec:
    return vsum(vscale(op(k), c) for k, c in x.items())


def project(space: GradedSpace, x: Vec, w) -> Vec:
    return {k: c for k, c in x.items() if space.wt(k) == w}


def components(space: GradedSpace, x: Vec) -> dict:
    out: dict = {}
    for k, c in x.items():
        out.setdefault(space.wt(k), {})[k] = c
    return dict(sorted(out.items()))


def weight_of(space: GradedSpace, x: Vec):
    """Weight of a homogeneous vector; raises for mixed weights."""
    ws = {space.wt(k) for k in x}
    if len(ws) > 1:
        raise ValueError(f"vector is not homogeneous (weights {sorted(ws)})")
    return ws.pop() if ws else None


def exp_apply(op: Callable[[Label], Vec], x: Vec, t) -> Vec:
    """``exp(t*op) x`` for a weight-raising or weight-lowering ``op``.

    The series stops once a term vanishes, which the cutoff guarantees for
    raising operators and the lower weight bound for lowering ones.
    """
    out = dict(x)
    term = dict(x)
    k = 0
    while term:
        k += 1
        term = vscale(apply_linear(op, term), t / k)
        out = vadd(out, term)
        if k > 10_000:
            raise RuntimeError("exponential series did not terminate")
    return out


# ---------------------------------------------------------------------------
# instance interface


class OsvaInstance:
    """A truncated open-string vertex algebra presented by its modes.

    Subclasses provide ``mode(u, n, v)`` returning ``u^+_n v`` for basis
    labels with output truncated at the cutoff, ``D(v)`` and optionally
    ``L(m, v)`` with ``conformal``/``central_charge`` set.
    """

    name = "instance"
    space: GradedSpace
    vacuum: Vec
    conformal: Vec | None = None
    central_charge: Fraction | None = None

    def mode(self, u, n, v) -> Vec:
        raise NotImplementedError

    def D(self, v) -> Vec:
        raise NotImplementedError

    def L(self, m: int, v) -> Vec:
        if self.conformal is None:
            raise MissingConformalData(f"{self.name} has no conformal element")
        return vsum(vscale(self.mode(w, Fraction(m + 1), v), c) for w, c in self.conformal.items())

    @property
    def has_conformal(self) -> bool:
        return self.conformal is not None

    # -- derived ------------------------------------------------------------
    def mode_indices(self, u, v, out_weights=None) -> list[Fraction]:
        """Mode indices that can land inside the truncated space."""
        wu, wv = self.space.wt(u), self.space.wt(v)
        ws = self.space.weights() if out_weights is None else sorted(set(out_weights))
        return [wu + wv - 1 - w for w in ws]

    def mode_vec(self, u: Vec, n, v: Vec) -> Vec:
        """Bilinear extension of ``mode`` to vectors."""
        return vsum(
            vscale(self.mode(ul, n, vl), cu * cv) for ul, cu in u.items() for vl, cv in v.items()
        )

    def Dvec(self, x: Vec) -> Vec:
        return apply_linear(self.D, x)

    def Lvec(self, m: int, x: Vec) -> Vec:
        return apply_linear(lambda v: self.L(m, v), x)

    def grading(self, x: Vec) -> Vec:
        """The grading operator ``d``."""
        return {k: self.space.wt(k) * c for k, c in x.items() if self.space.wt(k) != 0}


def basis_vec(label) -> Vec:
    return {label: Fraction(1)}


def radius_power(r: float, n) -> float:
    """``r**(-n-1)`` for r > 0 (principal real branch)."""
    return float(r) ** float(-Fraction(n) - 1)


def vertex_eval(inst: OsvaInstance, u: Vec, r: float, v: Vec, out_weights=None) -> Vec:
    """``Y^O(u, r) v`` summed over modes whose output lies within the cutoff."""
    if not r > 0:
        raise ValueError("vertex_eval needs r > 0; use opposite_vertex for r < 0")
    out: dict = {}
    for ul, cu in u.items():
        for vl, cv in v.items():
            for n in inst.mode_indices(ul, vl, out_weights):
                m = inst.mode(ul, n, vl)
                if not m:
                    continue
                s = radius_power(r, n) * float(cu * cv)
                for k, c in m.items():
                    out[k] = out.get(k, 0.0) + s * float(c)
    return {k: c for k, c in out.items() if c != 0}


def opposite_vertex(inst: OsvaInstance, u: Vec, r: float, v: Vec) -> Vec:
    """``Y^O(u, r) v`` for r < 0, defined as ``exp(rD) Y^O(v, -r) u``."""
    if not r < 0:
        raise ValueError("opposite_vertex needs r < 0")
    return exp_apply(inst.D, vertex_eval(inst, v, -r, u), float(r))


@dataclass
class MatrixElement:
    value: float
    tail_flag: bool
    shells: dict

    def __float__(self):
        return float(self.value)


def _check_decreasing(radii):
    for a, b in zip(radii, radii[1:]):
        if not a > b:
            raise ValueError(f"radii must be strictly decreasing, got {list(radii)}")
    if radii and not radii[-1] > 0:
        raise ValueError("radii must be positive")


def matrix_element_product(inst: OsvaInstance, vdual: Vec, factors, w: Vec) -> MatrixElement:
    """``<v', Y(u_1, r_1) P ... Y(u_n, r_n) w>`` with projections up to the cutoff.

    ``shells`` holds the contribution of each weight of the state fed into the
    outermost operator; ``tail_flag`` is raised when the top shell carries
    more than 10% of the total.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    _check_decreasing([r for _, r in factors])
    x = w
    for u, r in reversed(factors[1:]):
        x = vertex_eval(inst, u, r, x)
    u1, r1 = factors[0]
    out_w = {inst.space.wt(k) for k in vdual}
    shells = {}
    for wt, comp in components(inst.space, x).items():
        shells[wt] = pair(vdual, vertex_eval(inst, u1, r1, comp, out_weights=out_w))
    total = sum(shells.values(), 0.0)
    tail = False
    if len(factors) > 1:
        top = inst.space.weights()[-1]
        last = shells.get(top, 0.0)
        tail = abs(last) > 0.1 * abs(total) if total else abs(last) > 0
    return MatrixElement(total, tail, shells)


def iterate_element(inst: OsvaInstance, vdual: Vec, u: Vec, r0: float, v: Vec, r2: float, w: Vec) -> float:
    """``<v', Y(Y(u, r0) v, r2) w>`` with the inner output summed to the cutoff."""
    x = vertex_eval(inst, u, r0, v)
    out_w = {inst.space.wt(k) for k in vdual}
    return pair(vdual, vertex_eval(inst, x, r2, w, out_weights=out_w))


def factorial(k: int) -> int:
    return math.factorial(k)
