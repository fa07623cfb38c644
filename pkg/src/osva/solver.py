"""Structure-constant equations for algebra objects over fusion data.

An algebra object assigns a multiplicity space ``E^a`` to each sector and
structure constants ``C[(a1, a2, a3, i)]`` mapping ``E^{a1} (x) E^{a2}`` to
``E^{a3}``, one for each basis intertwining operator ``i < N_{a1 a2}^{a3}``
(indices are 0-based).  Tensors are stored as nested tuples ``C[key][c][p][q]``
with ``c`` indexing ``E^{a3}``, ``p`` indexing ``E^{a1}`` and ``q`` indexing
``E^{a2}``.  Associativity reads, for every ``a1..a5, k, l``::

    sum_{a,i,j} F_{a;a5}^{ij;kl}(a1,a2,a3;a4) C_{a1 a}^{a4;i} o (id (x) C_{a2 a3}^{a;j})
        = C_{a5 a3}^{a4;l} o (C_{a1 a2}^{a5;k} (x) id)

and the unit equations say that ``C_{ea}^{a;0}(1^e (x) .)`` and
``C_{ae}^{a;0}(. (x) 1^e)`` are the identity of ``E^a``.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.optimize import least_squares

from .fusion import DC, FusionData
from .report import CheckReport
from .scalars import QSqrt2, rref, to_float

log = logging.getLogger(__name__)

__all__ = [
    "AlgebraObject",
    "Equation",
    "ConstraintSystem",
    "SolveResult",
    "build_constraints",
    "verify_algebra",
    "solve_small",
    "diagonal_double_check",
    "unit_uniqueness_check",
    "lift_to_qsqrt2",
    "algebra_to_json",
    "algebra_from_json",
]

ZERO = QSqrt2(0)
ONE = QSqrt2(1)


@dataclass(frozen=True)
class AlgebraObject:
    dims: Mapping[int, int]
    unit_vector: tuple
    C: Mapping[tuple[int, int, int, int], tuple]
    free_parameters: tuple = ()

    def tensor(self, a1, a2, a3, i):
        return self.C[(a1, a2, a3, i)]


def _tensor_keys(data: FusionData, dims):
    ring = data.ring
    keys = []
    for a1, a2, a3 in itertools.product(range(ring.rank), repeat=3):
        for i in range(ring.N(a1, a2, a3)):
            keys.append((a1, a2, a3, i))
    return keys


def _check_dims(data: FusionData, dims) -> dict[int, int]:
    ring = data.ring
    if isinstance(dims, (list, tuple)):
        if len(dims) != ring.rank:
            raise ValueError(f"expected {ring.rank} dimensions, got {len(dims)}")
        dims = dict(enumerate(dims))
    out = {}
    for a, d in dims.items():
        if isinstance(a, str):
            if a not in ring.sectors:
                raise ValueError(f"dims given for unknown sector {a!r}")
            a = ring.index(a)
        if not (isinstance(a, int) and 0 <= a < ring.rank):
            raise ValueError(f"dims given for unknown sector {a!r}")
        if not isinstance(d, int) or d < 0:
            raise ValueError(f"dimension of sector {a} must be a nonnegative integer")
        out[a] = d
    return {a: out.get(a, 0) for a in range(ring.rank)}


# ---------------------------------------------------------------------------
# sparse polynomials over Q(sqrt 2): {sorted tuple of variable ids: coefficient}


def _pmul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            out[m] = out.get(m, ZERO) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _padd(p, q, scale=ONE):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, ZERO) + scale * c
    return {m: c for m, c in out.items() if c}


def _psubst(p, values: dict):
    """Substitute ``values`` (var -> polynomial) into ``p``."""
    out = {}
    for mono, c in p.items():
        term = {(): c}
        for v in mono:
            term = _pmul(term, values.get(v, {(v,): ONE}))
        out = _padd(out, term)
    return out


def _degree(p):
    return max((len(m) for m in p), default=0)


def _pvars(p):
    return {v for m in p for v in m}


@dataclass(frozen=True)
class Equation:
    label: str
    lhs: dict
    rhs: dict
    kind: str  # "associativity" or "unit"

    def residual_poly(self):
        return _padd(self.lhs, self.rhs, QSqrt2(-1))


@dataclass(frozen=True)
class ConstraintSystem:
    variables: tuple  # ("C", key, c, p, q) or ("unit", x)
    quadratic_equations: tuple[Equation, ...]
    linear_equations: tuple[Equation, ...]
    dims: Mapping[int, int]

    def index(self):
        return {v: n for n, v in enumerate(self.variables)}


def _variables(data, dims):
    vs = []
    for key in _tensor_keys(data, dims):
        a1, a2, a3, _ = key
        for c, p, q in itertools.product(range(dims[a3]), range(dims[a1]), range(dims[a2])):
            vs.append(("C", key, c, p, q))
    vs.extend(("unit", x) for x in range(dims[0]))
    return tuple(vs)


def build_constraints(data: FusionData, dims) -> ConstraintSystem:
    """Expand associativity and unit equations into scalar polynomial equations.

    Order is deterministic: ``(a1, a2, a3, a4, a5)`` lexicographic, then
    ``k, l``, then the output/input coordinates.
    """
    dims = _check_dims(data, dims)
    ring = data.ring
    variables = _variables(data, dims)
    vid = {v: n for n, v in enumerate(variables)}
    R = range(ring.rank)

    def x(key, c, p, q):
        return {(vid[("C", key, c, p, q)],): ONE}

    quad = []
    for a1, a2, a3, a4, a5 in itertools.product(R, repeat=5):
        n12, n53 = ring.N(a1, a2, a5), ring.N(a5, a3, a4)
        if not (n12 and n53):
            continue
        d1, d2, d3, d4, d5 = dims[a1], dims[a2], dims[a3], dims[a4], dims[a5]
        if not (d1 and d2 and d3 and d4):
            continue
        fmat = data.F(a1, a2, a3, a4)
        for k, l in itertools.product(range(n12), range(n53)):
            for c, p, q, s in itertools.product(range(d4), range(d1), range(d2), range(d3)):
                lhs = {}
                for a in R:
                    blk = fmat.block(a, a5)
                    if blk is DC or not dims[a]:
                        continue
                    na, nb = ring.N(a1, a, a4), ring.N(a2, a3, a)
                    for i, j in itertools.product(range(na), range(nb)):
                        f = blk[i * nb + j][k * n53 + l]
                        if not f:
                            continue
                        for t in range(dims[a]):
                            term = _pmul(x((a1, a, a4, i), c, p, t), x((a2, a3, a, j), t, q, s))
                            lhs = _padd(lhs, term, f)
                rhs = {}
                for t in range(d5):
                    rhs = _padd(rhs, _pmul(x((a5, a3, a4, l), c, t, s), x((a1, a2, a5, k), t, p, q)))
                label = f"assoc a=({a1},{a2},{a3};{a4}) a5={a5} k={k} l={l} coord=({c};{p},{q},{s})"
                quad.append(Equation(label, lhs, rhs, "associativity"))

    lin = []
    de = dims[0]
    for a in R:
        da = dims[a]
        if not da:
            continue
        # C_{ea}^{a;0}(1^e (x) alpha) = alpha
        key = (0, a, a, 0)
        for c, q in itertools.product(range(da), range(da)):
            lhs = {}
            for t in range(de):
                lhs = _padd(lhs, _pmul(x(key, c, t, q), {(vid[("unit", t)],): ONE}))
            rhs = {(): ONE} if c == q else {}
            lin.append(Equation(f"left unit a={a} coord=({c};{q})", lhs, rhs, "unit"))
        key = (a, 0, a, 0)
        for c, p in itertools.product(range(da), range(da)):
            lhs = {}
            for t in range(de):
                lhs = _padd(lhs, _pmul(x(key, c, p, t), {(vid[("unit", t)],): ONE}))
            rhs = {(): ONE} if c == p else {}
            lin.append(Equation(f"right unit a={a} coord=({c};{p})", lhs, rhs, "unit"))
    return ConstraintSystem(variables, tuple(quad), tuple(lin), dims)


# ---------------------------------------------------------------------------
# independent verifier: direct contraction of the tensors, no polynomial layer


def verify_algebra(data: FusionData, alg: AlgebraObject) -> CheckReport:
    """Evaluate associativity and unit equations exactly at ``alg``."""
    ring = data.ring
    dims = _check_dims(data, dict(alg.dims))
    rep = CheckReport("algebra object: associativity and unit equations")
    R = range(ring.rank)

    for key in alg.C:
        a1, a2, a3, i = key
        if i >= ring.N(a1, a2, a3):
            rep.fail(f"C{key}", "absent (fusion space too small)", "present")
    tensors = dict(alg.C)
    for a1, a2, a3 in itertools.product(R, repeat=3):
        for i in range(ring.N(a1, a2, a3)):
            T = tensors.get((a1, a2, a3, i))
            shape = (dims[a3], dims[a1], dims[a2])
            if T is None and 0 in shape:
                # maps into or out of a zero space may be omitted
                T = tensors[(a1, a2, a3, i)] = _zero_tensor(shape)
            if T is None or not _shape_ok(T, shape):
                rep.fail(f"C{(a1, a2, a3, i)} shape", shape, "missing" if T is None else "mismatched")
    if rep.witnesses:
        return rep
    if len(alg.unit_vector) != dims[0]:
        rep.fail("unit vector", dims[0], len(alg.unit_vector))
        return rep

    def C(a1, a2, a3, i, c, p, q):
        return tensors[(a1, a2, a3, i)][c][p][q]

    checked = 0
    for a1, a2, a3, a4, a5 in itertools.product(R, repeat=5):
        n12, n53 = ring.N(a1, a2, a5), ring.N(a5, a3, a4)
        if not (n12 and n53):
            continue
        fmat = data.F(a1, a2, a3, a4)
        for k, l in itertools.product(range(n12), range(n53)):
            for c, p, q, s in itertools.product(
                range(dims[a4]), range(dims[a1]), range(dims[a2]), range(dims[a3])
            ):
                left = ZERO
                for a in R:
                    blk = fmat.block(a, a5)
                    if blk is DC:
                        continue
                    na, nb = ring.N(a1, a, a4), ring.N(a2, a3, a)
                    for i, j in itertools.product(range(na), range(nb)):
                        f = blk[i * nb + j][k * n53 + l]
                        inner = sum(
                            (C(a1, a, a4, i, c, p, t) * C(a2, a3, a, j, t, q, s) for t in range(dims[a])),
                            ZERO,
                        )
                        left = left + f * inner
                right = sum(
                    (C(a5, a3, a4, l, c, t, s) * C(a1, a2, a5, k, t, p, q) for t in range(dims[a5])),
                    ZERO,
                )
                checked += 1
                if left != right:
                    rep.fail(
                        f"assoc a=({a1},{a2},{a3};{a4}) a5={a5} k={k} l={l} coord=({c};{p},{q},{s})",
                        left,
                        right,
                    )
    u = alg.unit_vector
    for a in R:
        da = dims[a]
        for c, q in itertools.product(range(da), range(da)):
            want = ONE if c == q else ZERO
            left = sum((C(0, a, a, 0, c, t, q) * u[t] for t in range(dims[0])), ZERO)
            right = sum((C(a, 0, a, 0, c, q, t) * u[t] for t in range(dims[0])), ZERO)
            checked += 2
            if left != want:
                rep.fail(f"left unit a={a} coord=({c};{q})", want, left)
            if right != want:
                rep.fail(f"right unit a={a} coord=({c};{q})", want, right)
    rep.details["equations_checked"] = checked
    return rep


def _zero_tensor(shape):
    if not shape:
        return ZERO
    return tuple(_zero_tensor(shape[1:]) for _ in range(shape[0]))


def _shape_ok(T, shape):
    if not shape:
        return not isinstance(T, (list, tuple))
    return isinstance(T, (list, tuple)) and len(T) == shape[0] and all(_shape_ok(x, shape[1:]) for x in T)


# ---------------------------------------------------------------------------
# exact lifting of floating-point roots


def lift_to_qsqrt2(x: float, bound: int = 64, gap: float = 1e-7):
    """Find ``a + b*sqrt(2)`` of height <= ``bound`` within ``gap`` of ``x``.

    Candidates are scanned by increasing height of ``b`` so the simplest
    representation wins.  Returns None when nothing fits.
    """
    if not np.isfinite(x):
        return None
    sqrt2 = 2.0**0.5
    bs = sorted(
        {Fraction(p, q) for q in range(1, bound + 1) for p in range(-bound, bound + 1)},
        key=lambda f: (max(abs(f.numerator), f.denominator), f.denominator, abs(f.numerator), f < 0),
    )
    for b in bs:
        rem = x - float(b) * sqrt2
        a = Fraction(rem).limit_denominator(bound)
        if abs(a.numerator) > bound:
            continue
        cand = QSqrt2(a, b)
        if abs(to_float(cand) - x) <= gap:
            return cand
    return None


# ---------------------------------------------------------------------------
# search


@dataclass
class SolveResult:
    solutions: list[AlgebraObject]
    partial: bool = False
    uncertified_roots: list = field(default_factory=list)
    nodes: int = 0

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]


def _weight_vector(var, dims, torus):
    w = [0] * len(torus)
    if var[0] != "C":
        return w
    _, (a1, a2, a3, _i), c, p, q = var
    for basis, sign in (((a1, p), 1), ((a2, q), 1), ((a3, c), -1)):
        if basis in torus:
            w[torus[basis]] += sign
    return w


def _rank(vectors):
    if not vectors:
        return 0
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    _, piv = rref(rows, len(rows[0]))
    return len(piv)


class _Search:
    def __init__(self, data, system, gauge_fixing, search_bound, rng, n_starts):
        self.data = data
        self.system = system
        self.gauge_fixing = gauge_fixing
        self.search_bound = search_bound
        self.rng = rng
        self.n_starts = n_starts
        self.nodes = 0
        self.partial = False
        self.uncertified = []
        self.found = {}
        dims = system.dims
        self.torus = {}
        for a in sorted(dims):
            for xb in range(dims[a]):
                if (a, xb) != (0, 0):
                    self.torus[(a, xb)] = len(self.torus)
        self.weights = [_weight_vector(v, dims, self.torus) for v in system.variables]

    # propagate linear consequences until fixpoint; returns (assign, elim, eqs) or None
    def _propagate(self, assign, elim, eqs):
        assign, elim = dict(assign), dict(elim)
        while True:
            subs = {v: {(): c} if c else {} for v, c in assign.items()}
            subs.update(elim)
            new = []
            for p in eqs:
                p = _psubst(p, subs) if _pvars(p) & subs.keys() else p
                if not p:
                    continue
                if _degree(p) == 0:
                    return None
                new.append(p)
            eqs = new
            linear = [p for p in eqs if _degree(p) == 1]
            if not linear:
                return assign, elim, eqs
            vs = sorted(set().union(*(_pvars(p) for p in linear)))
            col = {v: n for n, v in enumerate(vs)}
            rows = []
            for p in linear:
                row = [ZERO] * (len(vs) + 1)
                for m, c in p.items():
                    if m:
                        row[col[m[0]]] = c
                    else:
                        row[-1] = -c
                rows.append(row)
            red, piv = rref(rows, len(vs) + 1)
            if len(vs) in piv:
                return None
            for r, pc in zip(red, piv):
                v = vs[pc]
                others = {(vs[t],): -r[t] for t in range(len(vs)) if t != pc and r[t]}
                if others:
                    expr = dict(others)
                    if r[-1]:
                        expr[()] = r[-1]
                    elim[v] = expr
                    # earlier eliminations may reference v
                    for w in list(elim):
                        if w != v and v in _pvars(elim[w]):
                            elim[w] = _psubst(elim[w], {v: expr})
                else:
                    assign[v] = r[-1]
                    for w in list(elim):
                        if v in _pvars(elim[w]):
                            elim[w] = _psubst(elim[w], {v: {(): r[-1]} if r[-1] else {}})
            # fold fully determined eliminations into assignments
            for w in list(elim):
                e = elim[w]
                if _degree(e) == 0:
                    assign[w] = e.get((), ZERO)
                    del elim[w]

    def run(self, assign, elim, eqs, fixed_weights):
        self.nodes += 1
        if self.nodes > self.search_bound:
            self.partial = True
            return
        state = self._propagate(assign, elim, eqs)
        if state is None:
            return
        assign, elim, eqs = state
        if not eqs:
            if self.gauge_fixing:
                # unconstrained couplings still split into a zero and a nonzero orbit
                base_rank = _rank(fixed_weights)
                for v in range(len(self.system.variables)):
                    if v in assign or v in elim:
                        continue
                    w = self.weights[v]
                    if any(w) and _rank(fixed_weights + [w]) > base_rank:
                        self.run({**assign, v: ZERO}, elim, eqs, fixed_weights)
                        self.run({**assign, v: ONE}, elim, eqs, fixed_weights + [w])
                        return
            self._finish(assign, elim)
            return
        open_vars = sorted(set().union(*(_pvars(p) for p in eqs)))
        freq = {v: sum(v in _pvars(p) for p in eqs) for v in open_vars}
        if self.gauge_fixing:
            base_rank = _rank(fixed_weights)
            for v in sorted(open_vars, key=lambda v: (-freq[v], v)):
                w = self.weights[v]
                if any(w) and _rank(fixed_weights + [w]) > base_rank:
                    self.run({**assign, v: ZERO}, elim, eqs, fixed_weights)
                    self.run({**assign, v: ONE}, elim, eqs, fixed_weights + [w])
                    return
        v = max(open_vars, key=lambda v: (freq[v], -v))
        cands = [ZERO]
        for val in self._numeric_candidates(eqs, open_vars, v):
            lifted = lift_to_qsqrt2(val)
            if lifted is None:
                self.uncertified.append((self.system.variables[v], val))
                self.partial = True
            elif lifted not in cands:
                cands.append(lifted)
        w = self.weights[v]
        for c in cands:
            # a nonzero branch value pins this rescaling direction too
            fw = fixed_weights + [w] if c and any(w) else fixed_weights
            self.run({**assign, v: c}, elim, eqs, fw)

    def _numeric_candidates(self, eqs, open_vars, target):
        col = {v: n for n, v in enumerate(open_vars)}
        terms = [[(to_float(c), [col[v] for v in m]) for m, c in p.items()] for p in eqs]

        def F(x):
            return np.array([sum(c * np.prod([x[i] for i in idx]) for c, idx in t) for t in terms])

        def J(x):
            out = np.zeros((len(terms), len(open_vars)))
            for r, t in enumerate(terms):
                for c, idx in t:
                    for pos, i in enumerate(idx):
                        rest = idx[:pos] + idx[pos + 1:]
                        out[r, i] += c * np.prod([x[j] for j in rest])
            return out

        vals = []
        for _ in range(self.n_starts):
            x0 = self.rng.normal(scale=1.5, size=len(open_vars))
            try:
                sol = least_squares(F, x0, jac=J, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
            except (ValueError, np.linalg.LinAlgError):
                continue
            if np.max(np.abs(F(sol.x)), initial=0.0) < 1e-9:
                val = float(sol.x[col[target]])
                if not any(abs(val - u) < 1e-6 for u in vals):
                    vals.append(val)
        return sorted(vals)

    def _finish(self, assign, elim):
        sysm = self.system
        free = []
        values = dict(assign)
        elim_vars = set(elim)
        for v in range(len(sysm.variables)):
            if v not in values and v not in elim_vars:
                values[v] = ZERO
                free.append(sysm.variables[v])
        for w, expr in elim.items():
            val = _psubst(expr, {v: {(): c} if c else {} for v, c in values.items()})
            values[w] = val.get((), ZERO)
        alg = _assemble(self.data, sysm, values, tuple(free))
        report = verify_algebra(self.data, alg)
        if not report.passed:
            log.debug("candidate rejected by verifier: %s", report.witnesses[:1])
            return
        key = tuple(values[v] for v in range(len(sysm.variables)))
        self.found.setdefault(key, alg)


def _assemble(data, system, values, free=()):
    dims = system.dims
    vid = system.index()
    C = {}
    for key in _tensor_keys(data, dims):
        a1, a2, a3, _ = key
        C[key] = tuple(
            tuple(
                tuple(values[vid[("C", key, c, p, q)]] for q in range(dims[a2]))
                for p in range(dims[a1])
            )
            for c in range(dims[a3])
        )
    unit = tuple(values[vid[("unit", t)]] for t in range(dims[0]))
    return AlgebraObject(dict(dims), unit, C, free)


def solve_small(
    data: FusionData,
    dims,
    gauge_fixing: bool = True,
    search_bound: int = 20000,
    seed: int = 0,
    n_starts: int = 24,
) -> SolveResult:
    """Find algebra objects with the given multiplicity dimensions.

    The unit is fixed to the first basis vector of ``E^e`` and the unit
    equations are solved exactly, which makes ``C_{ea}^{a;0}`` and
    ``C_{ae}^{a;0}`` the identity on that slice.  With ``gauge_fixing`` the
    remaining basis rescalings of the ``E^a`` are used to set one coupling per
    independent rescaling direction to 0 or 1 (rescalings over C), and when
    ``dim E^e = 2`` the shift ``e1 -> e1 + c 1^e`` removes the ``e1`` component
    of ``e1 * e1``.  Remaining
    quadratics are branched on candidate values from numeric root finding,
    lifted to Q(sqrt 2), and every leaf is certified by :func:`verify_algebra`.

    ``partial`` is set when the node budget ran out or a numeric root could
    not be lifted; such roots are listed in ``uncertified_roots``.
    """
    dims = _check_dims(data, dims)
    if any(d > 2 for d in dims.values()):
        raise ValueError("solve_small handles multiplicity dimensions <= 2")
    system = build_constraints(data, dims)
    if len(system.variables) > 24:
        raise ValueError(f"{len(system.variables)} unknowns exceed the limit of 24")
    if dims[0] == 0:
        # no room for the unit 1^e
        return SolveResult([], nodes=0)
    vid = system.index()
    assign = {vid[("unit", 0)]: ONE}
    for t in range(1, dims[0]):
        assign[vid[("unit", t)]] = ZERO
    if gauge_fixing and dims[0] == 2:
        # e1 -> e1 + c*1^e shifts the e1-coefficient of e1*e1 by 2c
        assign[vid[("C", (0, 0, 0, 0), 1, 1, 1)]] = ZERO
    eqs = [e.residual_poly() for e in system.linear_equations + system.quadratic_equations]
    search = _Search(data, system, gauge_fixing, search_bound, np.random.default_rng(seed), n_starts)
    search.run(assign, {}, eqs, [])
    sols = [search.found[k] for k in sorted(search.found, key=lambda k: [(to_float(x), x.a, x.b) for x in k])]
    return SolveResult(sols, search.partial, search.uncertified, search.nodes)


# ---------------------------------------------------------------------------
# diagonal double and unit uniqueness


def diagonal_double_check(data: FusionData) -> CheckReport:
    """Column orthonormality of every fusing-coupling matrix over Q(sqrt 2).

    For each quadruple and coupled columns ``n, n'`` checks
    ``sum_m F_{m;n} F_{m;n'} = delta_{n n'}``, the condition under which the
    diagonal sum of ``Y (x) Y`` over all sectors is associative.
    """
    ring = data.ring
    rep = CheckReport("diagonal double: sum_m F_mn F_mn' = delta")
    count = 0
    for quad in itertools.product(range(ring.rank), repeat=4):
        mat = data.fusing[quad]
        cols = sorted({n for (_m, n) in mat.entries})
        for n, n2 in itertools.product(cols, cols):
            total = ZERO
            for m in range(ring.rank):
                f1, f2 = mat.value(m, n), mat.value(m, n2)
                if f1 is DC or f2 is DC:
                    continue
                total = total + f1 * f2
            want = ONE if n == n2 else ZERO
            count += 1
            if total != want:
                rep.fail(f"F{quad} columns (n,n')=({n},{n2})", want, total)
    rep.details["column_pairs_checked"] = count
    return rep


def unit_uniqueness_check(data: FusionData, alg: AlgebraObject) -> CheckReport:
    """``dim E^e == 1`` is the multiplicity-level form of a unique unit."""
    de = alg.dims.get(0, 0)
    rep = CheckReport("unit uniqueness: dim E^e = 1")
    rep.details["dim_E_e"] = de
    rep.details["unique_unit"] = de == 1
    if de != 1:
        rep.fail("dim E^e", 1, de)
    return rep


# ---------------------------------------------------------------------------
# JSON encoding (same scalar encoding as fusion-data files)


def algebra_to_json(data: FusionData, alg: AlgebraObject) -> dict:
    lab = data.ring.sectors
    return {
        "dims": {lab[a]: d for a, d in sorted(alg.dims.items())},
        "unit": [x.to_json() for x in alg.unit_vector],
        "C": [
            {
                "key": [lab[a1], lab[a2], lab[a3], i],
                "tensor": [[[x.to_json() for x in row] for row in mat] for mat in alg.C[(a1, a2, a3, i)]],
            }
            for (a1, a2, a3, i) in sorted(alg.C)
        ],
        "free_parameters": [_var_name(data, v) for v in alg.free_parameters],
    }


def _var_name(data, var):
    lab = data.ring.sectors
    if var[0] == "unit":
        return f"unit[{var[1]}]"
    _, (a1, a2, a3, i), c, p, q = var
    return f"C[{lab[a1]},{lab[a2]},{lab[a3]},{i}][{c}][{p}][{q}]"


def algebra_from_json(data: FusionData, obj: dict) -> AlgebraObject:
    ring = data.ring
    dims = {ring.index(s): int(d) for s, d in obj["dims"].items()}
    dims = {a: dims.get(a, 0) for a in range(ring.rank)}
    unit = tuple(QSqrt2.from_json(x) for x in obj["unit"])
    C = {}
    for ent in obj["C"]:
        a1, a2, a3 = (ring.index(s) for s in ent["key"][:3])
        C[(a1, a2, a3, int(ent["key"][3]))] = tuple(
            tuple(tuple(QSqrt2.from_json(x) for x in row) for row in mat) for mat in ent["tensor"]
        )
    return AlgebraObject(dims, unit, C)
