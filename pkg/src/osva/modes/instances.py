"""Concrete instances: associative algebras, the free boson, tensor products
and explicit mode tables."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Sequence

from ..scalars import rref
from .core import GradedSpace, OsvaInstance, Vec, vadd, vscale, vsum


class NonAssociativeError(ValueError):
    def __init__(self, triple, lhs, rhs):
        self.triple = triple
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"multiplication table is not associative at {triple}: (ab)c={lhs}, a(bc)={rhs}")


# ---------------------------------------------------------------------------
# associative algebras


def _table_from(mult_table, dim) -> dict:
    """Normalize structure constants to ``{(i, j): {k: c}}``.

    Accepts a nested ``dim x dim x dim`` list ``c[i][j][k]`` or a mapping
    ``(i, j) -> {k: c}``.
    """
    out = {}
    if isinstance(mult_table, Mapping):
        for (i, j), row in mult_table.items():
            vec = {int(k): Fraction(c) for k, c in dict(row).items() if Fraction(c) != 0}
            out[int(i), int(j)] = vec
    else:
        if len(mult_table) != dim:
            raise ValueError(f"expected {dim} rows in the structure constants")
        for i in range(dim):
            for j in range(dim):
                row = mult_table[i][j]
                if len(row) != dim:
                    raise ValueError(f"entry ({i},{j}) must have {dim} coefficients")
                out[i, j] = {k: Fraction(c) for k, c in enumerate(row) if Fraction(c) != 0}
    for (i, j) in out:
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValueError(f"index ({i},{j}) out of range for dimension {dim}")
    return out


def _mul(table, dim, x: Vec, y: Vec) -> Vec:
    return vsum(vscale(table.get((i, j), {}), a * b) for i, a in x.items() for j, b in y.items())


def find_unit(table, dim) -> Vec | None:
    """Solve ``e*x = x*e = x`` for all basis x; return the unit or None."""
    rows = []
    for x in range(dim):
        for k in range(dim):
            # coefficient of e_k in e*x and x*e, as linear forms in e
            left = [table.get((i, x), {}).get(k, Fraction(0)) for i in range(dim)]
            right = [table.get((x, i), {}).get(k, Fraction(0)) for i in range(dim)]
            rhs = Fraction(1 if k == x else 0)
            rows.append(left + [rhs])
            rows.append(right + [rhs])
    red, piv = rref(rows, dim + 1)
    if dim in piv:
        return None
    sol = [Fraction(0)] * dim
    for row, p in zip(red, piv):
        sol[p] = row[dim]
    return {i: c for i, c in enumerate(sol) if c != 0}


class AssociativeAlgebraInstance(OsvaInstance):
    """All weights 0, D = 0 and a single mode ``u_{-1} v = uv``."""

    def __init__(self, table, dim, labels=None, name="assoc"):
        self.name = name
        self.dim = dim
        self.table = table
        self.labels = tuple(labels) if labels is not None else tuple(range(dim))
        self._index = {l: i for i, l in enumerate(self.labels)}
        self.space = GradedSpace(self.labels, {l: Fraction(0) for l in self.labels}, Fraction(0))
        unit = find_unit(table, dim)
        if unit is None:
            raise ValueError("multiplication table has no two-sided unit")
        self.vacuum = {self.labels[i]: c for i, c in unit.items()}
        self.conformal = {}
        self.central_charge = Fraction(0)

    def product(self, u, v) -> Vec:
        i, j = self._index[u], self._index[v]
        return {self.labels[k]: c for k, c in self.table.get((i, j), {}).items()}

    def mode(self, u, n, v) -> Vec:
        if n != -1:
            return {}
        return self.product(u, v)

    def D(self, v) -> Vec:
        return {}

    def L(self, m, v) -> Vec:
        return {}


def make_assoc_algebra_instance(mult_table, dim: int, labels=None) -> AssociativeAlgebraInstance:
    """Instance from structure constants; rejects tables that are not associative.

    The failing basis triple is attached to the raised ``NonAssociativeError``.
    """
    table = _table_from(mult_table, dim)
    for a in range(dim):
        for b in range(dim):
            ab = table.get((a, b), {})
            for c in range(dim):
                lhs = _mul(table, dim, ab, {c: 1})
                rhs = _mul(table, dim, {a: 1}, table.get((b, c), {}))
                if lhs != rhs:
                    raise NonAssociativeError((a, b, c), lhs, rhs)
    return AssociativeAlgebraInstance(table, dim, labels)


def matrix_algebra_table(n: int) -> tuple[dict, list]:
    """Structure constants of the n x n matrix units ``E_ij E_kl = d_jk E_il``."""
    labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    idx = {(i, j): i * n + j for i in range(n) for j in range(n)}
    table = {}
    for (i, j), a in idx.items():
        for (k, l), b in idx.items():
            table[a, b] = {idx[i, l]: Fraction(1)} if j == k else {}
    return table, labels


# ---------------------------------------------------------------------------
# free boson


def partitions(n: int, largest: int | None = None):
    """Partitions of n as non-increasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def _alpha(k: int, state: tuple) -> Vec:
    """``alpha(k)`` on the monomial ``alpha(-state)1``."""
    if k < 0:
        return {tuple(sorted(state + (-k,), reverse=True)): Fraction(1)}
    if k == 0:
        return {}
    mult = state.count(k)
    if not mult:
        return {}
    s = list(state)
    s.remove(k)
    return {tuple(s): Fraction(k * mult)}


def _alpha_vec(k: int, x: Vec) -> Vec:
    return vsum(vscale(_alpha(k, s), c) for s, c in x.items())


class HeisenbergInstance(OsvaInstance):
    """Rank-one free boson truncated at an integer weight.

    Basis labels are partitions; ``(2, 1)`` stands for ``alpha(-2)alpha(-1)1``.
    Modes come from the iterate formula for ``alpha(-p)b``; the derivation
    uses only ``[alpha(m), alpha(n)] = m delta_{m+n,0}`` and the vacuum.
    """

    def __init__(self, cutoff: int):
        if cutoff < 2:
            raise ValueError("the free boson instance needs cutoff >= 2")
        self.name = "heisenberg"
        self.cutoff = int(cutoff)
        basis = tuple(p for w in range(self.cutoff + 1) for p in partitions(w))
        self.space = GradedSpace(basis, {p: Fraction(sum(p)) for p in basis}, Fraction(self.cutoff))
        self.vacuum = {(): Fraction(1)}
        self.conformal = {(1, 1): Fraction(1, 2)}
        self.central_charge = Fraction(1)
        self._mode = lru_cache(maxsize=None)(self._mode_uncached)

    def mode(self, u, n, v) -> Vec:
        n = Fraction(n)
        if n.denominator != 1:
            return {}
        return self._mode(u, int(n), v)

    def _mode_uncached(self, u: tuple, n: int, v: tuple) -> Vec:
        out_w = sum(u) + sum(v) - n - 1
        if out_w < 0 or out_w > self.cutoff:
            return {}
        if not u:
            return {v: Fraction(1)} if n == -1 else {}
        p, b = u[0], u[1:]
        wb = sum(b)
        result: dict = {}
        # alpha(-p-j) b_{n+j} v
        j = 0
        while wb + sum(v) - (n + j) - 1 >= 0:
            coef = comb(p + j - 1, j)
            inner = self._mode(b, n + j, v)
            if inner:
                result = vadd(result, _alpha_vec(-p - j, inner), coef)
            j += 1
        # -(-1)^p b_{n-p-j} alpha(j) v, only j >= 1 with alpha(j)v != 0
        sign = -1 if p % 2 == 0 else 1
        for j in range(1, (max(v) if v else 0) + 1):
            av = _alpha(j, v)
            if not av:
                continue
            coef = sign * comb(p + j - 1, j)
            for s, c in av.items():
                inner = self._mode(b, n - p - j, s)
                if inner:
                    result = vadd(result, inner, coef * c)
        return {k: c for k, c in result.items() if sum(k) <= self.cutoff}

    def D(self, v) -> Vec:
        out: dict = {}
        for i, part in enumerate(v):
            if i and v[i - 1] == part:
                continue
            mult = v.count(part)
            s = list(v)
            s.remove(part)
            key = tuple(sorted(s + [part + 1], reverse=True))
            out[key] = out.get(key, 0) + Fraction(part * mult)
        return {k: c for k, c in out.items() if sum(k) <= self.cutoff}


def make_heisenberg_instance(cutoff: int) -> HeisenbergInstance:
    return HeisenbergInstance(cutoff)


# ---------------------------------------------------------------------------
# tensor products


class TensorInstance(OsvaInstance):
    """``A (x) V`` with A an associative algebra (all weights 0)."""

    def __init__(self, alg: AssociativeAlgebraInstance, va: OsvaInstance):
        if any(w != 0 for w in alg.space.weights()):
            raise ValueError("the algebra factor must be concentrated in weight 0")
        self.name = f"{alg.name}*{va.name}"
        self.alg, self.va = alg, va
        basis = tuple((a, u) for u in va.space.basis for a in alg.space.basis)
        self.space = GradedSpace(basis, {(a, u): va.space.wt(u) for a, u in basis}, va.space.cutoff)
        self.vacuum = {(a, u): ca * cu for a, ca in alg.vacuum.items() for u, cu in va.vacuum.items()}
        if va.conformal is not None:
            self.conformal = {
                (a, u): ca * cu for a, ca in alg.vacuum.items() for u, cu in va.conformal.items()
            }
            self.central_charge = va.central_charge
        else:
            self.conformal = None
            self.central_charge = None

    def mode(self, u, n, v) -> Vec:
        (a, x), (b, y) = u, v
        ab = self.alg.mode(a, -1, b)
        if not ab:
            return {}
        xy = self.va.mode(x, n, y)
        return {(k, z): ck * cz for k, ck in ab.items() for z, cz in xy.items()}

    def D(self, v) -> Vec:
        a, x = v
        return {(a, z): c for z, c in self.va.D(x).items()}

    def L(self, m, v) -> Vec:
        if self.conformal is None:
            return super().L(m, v)
        a, x = v
        return {(a, z): c for z, c in self.va.L(m, x).items()}


def make_tensor_instance(alg: AssociativeAlgebraInstance, va: OsvaInstance) -> TensorInstance:
    return TensorInstance(alg, va)


# ---------------------------------------------------------------------------
# explicit mode tables


class TableInstance(OsvaInstance):
    """An instance given by an explicit finite mode table.

    ``modes`` maps ``(u, n, v)`` to output vectors; missing entries are zero.
    Used for graded spaces with fractional weights where no closed formula
    is wired in.  Entries that break the weight bookkeeping are rejected.
    """

    def __init__(self, basis: Sequence, weights: Mapping, vacuum, modes: Mapping,
                 D: Mapping | None = None, cutoff=None, name="table"):
        self.name = name
        w = {b: Fraction(weights[b]) for b in basis}
        cut = Fraction(cutoff) if cutoff is not None else max(w.values())
        self.space = GradedSpace(tuple(basis), w, cut)
        self.vacuum = dict(vacuum)
        self._modes = {}
        for (u, n, v), out in modes.items():
            n = Fraction(n)
            for k in out:
                if w[k] != w[u] - n - 1 + w[v]:
                    raise ValueError(f"mode entry {(u, n, v)} violates the weight bookkeeping at {k!r}")
            self._modes[u, n, v] = {k: c for k, c in out.items() if c != 0}
        self._D = {k: dict(v) for k, v in (D or {}).items()}
        for k, out in self._D.items():
            for t in out:
                if w[t] != w[k] + 1:
                    raise ValueError(f"D entry for {k!r} does not raise the weight by one")

    def mode(self, u, n, v) -> Vec:
        return dict(self._modes.get((u, Fraction(n), v), {}))

    def D(self, v) -> Vec:
        return dict(self._D.get(v, {}))

    def table_entries(self):
        return dict(self._modes)
