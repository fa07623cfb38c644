"""Fusion rings with fusing-coupling matrices.

Sectors are addressed by integer index internally; index 0 is always the unit
sector.  Labels (strings) are only used for file I/O.

A fusing matrix for the quadruple ``(i, j, k; l)`` has an entry for each pair
``(m, n)``.  The entry is the marker :data:`DC` ("decoupled") exactly when
``m`` is not coupled with ``n`` through ``(i, j, k; l)``, i.e. when one of the
fusion spaces ``V_{im}^l, V_{jk}^m, V_{ij}^n, V_{nk}^l`` vanishes.  A stored
zero is a genuine coefficient and is *not* the same as DC.

Coupled entries are blocks of shape ``(N_im^l * N_jk^m, N_ij^n * N_nk^l)``;
row ``p * N_jk^m + q`` pairs basis ``p`` of ``V_{im}^l`` with basis ``q`` of
``V_{jk}^m`` and columns are ordered the same way for ``(V_{ij}^n, V_{nk}^l)``.
With all multiplicities equal to one every block is 1x1.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Mapping

from .report import CheckReport
from .scalars import QSqrt2, parse_rational

__all__ = [
    "DC",
    "FusionDataError",
    "FusionRing",
    "FusingMatrix",
    "FusionData",
    "load_fusion_data",
    "dump_fusion_data",
    "coupling_pairs",
    "validate_ring",
    "validate_fusing",
    "ising_builtin",
]


class _Decoupled:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DC"

    def __bool__(self):
        raise TypeError("DC has no truth value; compare with `is DC`")


DC = _Decoupled()


class FusionDataError(ValueError):
    """Malformed fusion-data document; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class FusionRing:
    sectors: tuple[str, ...]
    lowest_weights: tuple[Fraction, ...]
    fusion: Mapping[tuple[int, int, int], int]

    @property
    def rank(self) -> int:
        return len(self.sectors)

    def N(self, i: int, j: int, k: int) -> int:
        return self.fusion.get((i, j, k), 0)

    def index(self, label: str) -> int:
        return self.sectors.index(label)


@dataclass(frozen=True)
class FusingMatrix:
    context: tuple[int, int, int, int]
    entries: Mapping[tuple[int, int], tuple[tuple[QSqrt2, ...], ...]]

    def block(self, m: int, n: int):
        """The block at ``(m, n)``, or DC."""
        return self.entries.get((m, n), DC)

    def value(self, m: int, n: int):
        """Scalar entry for multiplicity-free data (DC when decoupled)."""
        b = self.entries.get((m, n), DC)
        if b is DC:
            return DC
        if len(b) != 1 or len(b[0]) != 1:
            raise ValueError(f"entry {(m, n)} of F{self.context} is a {len(b)}x{len(b[0])} block")
        return b[0][0]

    def support(self) -> set[tuple[int, int]]:
        return set(self.entries)


@dataclass(frozen=True)
class FusionData:
    ring: FusionRing
    fusing: Mapping[tuple[int, int, int, int], FusingMatrix]

    def F(self, i: int, j: int, k: int, l: int) -> FusingMatrix:
        return self.fusing[(i, j, k, l)]


# ---------------------------------------------------------------------------
# I/O


def _require(obj, key, path, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise FusionDataError(path, f"missing field '{key}'")
    v = obj[key]
    if not isinstance(v, kind):
        raise FusionDataError(f"{path}.{key}", f"expected {kind.__name__}")
    return v


def _scalar(obj, path) -> QSqrt2:
    try:
        return QSqrt2.from_json(obj)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise FusionDataError(path, str(exc)) from None


def load_fusion_data(text) -> FusionData:
    """Parse a fusion-data document (JSON text or an already-decoded dict).

    Only the shape is checked here; run :func:`validate_ring` and
    :func:`validate_fusing` for the mathematical consistency conditions.
    """
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FusionDataError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    else:
        doc = text
    if not isinstance(doc, dict):
        raise FusionDataError("$", "top level must be an object")

    labels = _require(doc, "sectors", "$", list)
    if not labels:
        raise FusionDataError("$.sectors", "at least one sector is required")
    seen = set()
    for p, s in enumerate(labels):
        if not isinstance(s, str):
            raise FusionDataError(f"$.sectors[{p}]", "sector labels must be strings")
        if s in seen:
            raise FusionDataError(f"$.sectors[{p}]", f"duplicate sector label {s!r}")
        seen.add(s)
    unit = _require(doc, "unit", "$", str)
    if unit not in seen:
        raise FusionDataError("$.unit", f"unknown sector {unit!r}")
    # unit sector is moved to index 0
    order = [unit] + [s for s in labels if s != unit]
    idx = {s: p for p, s in enumerate(order)}

    def sector(x, path):
        if not isinstance(x, str) or x not in idx:
            raise FusionDataError(path, f"unknown sector {x!r}")
        return idx[x]

    wdoc = _require(doc, "weights", "$", dict)
    weights = []
    for s in order:
        if s not in wdoc:
            raise FusionDataError("$.weights", f"missing weight for sector {s!r}")
        try:
            weights.append(parse_rational(wdoc[s]))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise FusionDataError(f"$.weights.{s}", str(exc)) from None
    for s in wdoc:
        sector(s, f"$.weights.{s}")

    fusion = {}
    for p, row in enumerate(_require(doc, "fusion", "$", list)):
        path = f"$.fusion[{p}]"
        if not isinstance(row, list) or len(row) != 4:
            raise FusionDataError(path, "expected [i, j, k, N]")
        i, j, k = (sector(row[q], f"{path}[{q}]") for q in range(3))
        n = row[3]
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise FusionDataError(f"{path}[3]", "multiplicity must be a nonnegative integer")
        if (i, j, k) in fusion:
            raise FusionDataError(path, f"duplicate fusion entry {row[:3]}")
        if n:
            fusion[(i, j, k)] = n
    ring = FusionRing(tuple(order), tuple(weights), fusion)

    fusing = {}
    for p, mat in enumerate(_require(doc, "fusing", "$", list)):
        path = f"$.fusing[{p}]"
        q = _require(mat, "ijkl", path, list)
        if len(q) != 4:
            raise FusionDataError(f"{path}.ijkl", "expected four sectors")
        quad = tuple(sector(x, f"{path}.ijkl[{t}]") for t, x in enumerate(q))
        if quad in fusing:
            raise FusionDataError(f"{path}.ijkl", f"duplicate matrix for {q}")
        entries = {}
        for t, ent in enumerate(_require(mat, "entries", path, list)):
            epath = f"{path}.entries[{t}]"
            mn = _require(ent, "mn", epath, list)
            if len(mn) != 2:
                raise FusionDataError(f"{epath}.mn", "expected [m, n]")
            key = (sector(mn[0], f"{epath}.mn[0]"), sector(mn[1], f"{epath}.mn[1]"))
            if key in entries:
                raise FusionDataError(f"{epath}.mn", f"duplicate entry {mn}")
            if "value" in ent and "block" in ent:
                raise FusionDataError(epath, "give either 'value' or 'block', not both")
            if "value" in ent:
                entries[key] = ((_scalar(ent["value"], f"{epath}.value"),),)
            elif "block" in ent:
                rows = ent["block"]
                if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
                    raise FusionDataError(f"{epath}.block", "expected a nonempty list of rows")
                if len({len(r) for r in rows}) != 1 or not rows[0]:
                    raise FusionDataError(f"{epath}.block", "ragged or empty rows")
                entries[key] = tuple(
                    tuple(_scalar(x, f"{epath}.block[{a}][{b}]") for b, x in enumerate(r))
                    for a, r in enumerate(rows)
                )
            else:
                raise FusionDataError(epath, "missing field 'value'")
        fusing[quad] = FusingMatrix(quad, entries)

    for quad in itertools.product(range(ring.rank), repeat=4):
        if quad not in fusing:
            names = [order[x] for x in quad]
            raise FusionDataError("$.fusing", f"missing matrix for quadruple ({', '.join(names)})")
    return FusionData(ring, fusing)


def dump_fusion_data(data: FusionData) -> str:
    """Serialize to the JSON document format; output is deterministic."""
    ring = data.ring
    lab = ring.sectors
    doc = {
        "sectors": list(lab),
        "unit": lab[0],
        "weights": {s: str(w) for s, w in zip(lab, ring.lowest_weights)},
        "fusion": [[lab[i], lab[j], lab[k], n] for (i, j, k), n in sorted(ring.fusion.items()) if n],
        "fusing": [],
    }
    for quad in sorted(data.fusing):
        mat = data.fusing[quad]
        entries = []
        for (m, n) in sorted(mat.entries):
            b = mat.entries[(m, n)]
            if len(b) == 1 and len(b[0]) == 1:
                entries.append({"mn": [lab[m], lab[n]], "value": b[0][0].to_json()})
            else:
                entries.append({"mn": [lab[m], lab[n]], "block": [[x.to_json() for x in r] for r in b]})
        doc["fusing"].append({"ijkl": [lab[x] for x in quad], "entries": entries})
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# checks


def coupling_pairs(ring: FusionRing, i: int, j: int, k: int, l: int) -> set[tuple[int, int]]:
    """All (m, n) with m coupled to n through (i, j, k; l)."""
    r = range(ring.rank)
    return {
        (m, n)
        for m in r
        for n in r
        if ring.N(i, m, l) and ring.N(j, k, m) and ring.N(i, j, n) and ring.N(n, k, l)
    }


def validate_ring(ring: FusionRing) -> CheckReport:
    """Unit laws and associativity of the fusion ring, exhaustively."""
    rep = CheckReport("fusion ring: unit laws and associativity")
    r = range(ring.rank)
    e = 0
    for a, b in itertools.product(r, r):
        want = int(a == b)
        if ring.N(e, a, b) != want:
            rep.fail(f"N(e,{a};{b})", want, ring.N(e, a, b))
        if ring.N(a, e, b) != want:
            rep.fail(f"N({a},e;{b})", want, ring.N(a, e, b))
    count = 0
    for i, j, k, l in itertools.product(r, repeat=4):
        lhs = sum(ring.N(i, j, m) * ring.N(m, k, l) for m in r)
        rhs = sum(ring.N(j, k, m) * ring.N(i, m, l) for m in r)
        count += 1
        if lhs != rhs:
            rep.fail(f"(i,j,k,l)=({i},{j},{k},{l})", lhs, rhs)
    rep.details["associativity_identities"] = count
    rep.details["sectors"] = ring.rank
    return rep


def validate_fusing(data: FusionData) -> CheckReport:
    """DC pattern against the coupling relation, block shapes, unit-sector form."""
    ring = data.ring
    rep = CheckReport("fusing-coupling matrices: DC pattern and unit form")
    n_quads = 0
    for quad in itertools.product(range(ring.rank), repeat=4):
        i, j, k, l = quad
        mat = data.fusing.get(quad)
        if mat is None:
            rep.fail(f"F{quad}", "matrix", "missing")
            continue
        n_quads += 1
        coupled = coupling_pairs(ring, i, j, k, l)
        stored = mat.support()
        for mn in sorted(stored - coupled):
            rep.fail(f"F{quad} entry {mn}", "DC", "value (pair is decoupled)")
        for mn in sorted(coupled - stored):
            rep.fail(f"F{quad} entry {mn}", "value", "DC (pair is coupled)")
        for (m, n) in sorted(stored & coupled):
            b = mat.entries[(m, n)]
            shape = (ring.N(i, m, l) * ring.N(j, k, m), ring.N(i, j, n) * ring.N(n, k, l))
            got = (len(b), len(b[0]))
            if got != shape:
                rep.fail(f"F{quad} entry {(m, n)} shape", shape, got)
        if 0 in (i, j, k) and coupled and stored == coupled:
            # one coupled pair, scalar +-1
            if len(coupled) != 1:
                rep.fail(f"F{quad} unit form", "single entry", sorted(coupled))
                continue
            for mn in coupled:
                b = mat.entries[mn]
                if len(b) == 1 and len(b[0]) == 1 and b[0][0] not in (QSqrt2(1), QSqrt2(-1)):
                    rep.fail(f"F{quad} unit form at {mn}", "+-1", b[0][0])
    rep.details["quadruples"] = n_quads
    return rep


def ising_builtin() -> FusionData:
    """Fusion rules and fusing-coupling matrices of the c=1/2 minimal model."""
    text = resources.files("osva.data").joinpath("ising.json").read_text()
    return load_fusion_data(text)
