import itertools
import json
import time
from dataclasses import replace
from fractions import Fraction

import pytest

from osva.fusion import (
    DC,
    FusionData,
    FusionDataError,
    FusingMatrix,
    coupling_pairs,
    dump_fusion_data,
    ising_builtin,
    load_fusion_data,
    validate_fusing,
    validate_ring,
)
from osva.scalars import SQRT2, QSqrt2


@pytest.fixture(scope="module")
def ising():
    return ising_builtin()


def _brute_coupling(N, i, j, k, l):
    return {
        (m, n)
        for m in range(3)
        for n in range(3)
        if N(i, m, l) and N(j, k, m) and N(i, j, n) and N(n, k, l)
    }


ISING_TRIPLES = {
    (0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2),
    (1, 1, 0), (1, 2, 2), (2, 1, 2), (2, 2, 0), (2, 2, 1),
}


def test_builtin_shape(ising):
    ring = ising.ring
    assert ring.sectors == ("0", "1", "2")
    assert ring.lowest_weights == (Fraction(0), Fraction(1, 2), Fraction(1, 16))
    nonzero = {t for t in itertools.product(range(3), repeat=3) if ring.N(*t)}
    assert nonzero == ISING_TRIPLES
    assert all(ring.N(*t) == 1 for t in ISING_TRIPLES)
    assert len(ising.fusing) == 81


def test_builtin_named_entries(ising):
    assert ising.F(0, 0, 0, 0).entries == {(0, 0): ((QSqrt2(1),),)}
    assert ising.F(1, 2, 1, 2).entries == {(2, 2): ((QSqrt2(-1),),)}
    assert ising.F(2, 1, 2, 1).entries == {(2, 2): ((QSqrt2(-1),),)}
    h = SQRT2 / 2
    F = ising.F(2, 2, 2, 2)
    assert [[F.value(m, n) for n in range(2)] for m in range(2)] == [[h, h], [h, -h]]
    assert F.value(2, 2) is DC


def test_coupling_examples(ising):
    ring = ising.ring
    assert coupling_pairs(ring, 2, 2, 2, 2) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert coupling_pairs(ring, 0, 0, 0, 0) == {(0, 0)}
    assert coupling_pairs(ring, 1, 1, 1, 0) == set()


def test_support_equals_coupling(ising):
    for quad in itertools.product(range(3), repeat=4):
        want = _brute_coupling(ising.ring.N, *quad)
        assert ising.F(*quad).support() == want, quad


def test_validate_ring_pass(ising):
    t = time.perf_counter()
    rep = validate_ring(ising.ring)
    assert time.perf_counter() - t < 1.0
    assert rep.passed and rep.residual == 0
    assert rep.details["associativity_identities"] == 81


def test_validate_ring_flipped_n220(ising):
    fusion = dict(ising.ring.fusion)
    fusion[(2, 2, 0)] = 0
    rep = validate_ring(replace(ising.ring, fusion=fusion))
    assert not rep.passed
    failing = {w.input for w in rep.witnesses}
    # frozen from a hand recomputation of both sides of ring associativity
    assert failing == {
        "(i,j,k,l)=(1,2,2,0)",
        "(i,j,k,l)=(1,2,2,1)",
        "(i,j,k,l)=(2,2,1,0)",
        "(i,j,k,l)=(2,2,1,1)",
    }


def test_single_sector():
    doc = {
        "sectors": ["e"], "unit": "e", "weights": {"e": "0"},
        "fusion": [["e", "e", "e", 1]],
        "fusing": [{"ijkl": ["e", "e", "e", "e"], "entries": [{"mn": ["e", "e"], "value": {"a": "1", "b": "0"}}]}],
    }
    data = load_fusion_data(json.dumps(doc))
    assert data.ring.rank == 1
    assert validate_ring(data.ring).passed
    assert validate_fusing(data).passed


def test_validate_fusing_pass(ising):
    rep = validate_fusing(ising)
    assert rep.passed and not rep.witnesses


def _with_entries(data, quad, entries):
    fusing = dict(data.fusing)
    fusing[quad] = FusingMatrix(quad, entries)
    return FusionData(data.ring, fusing)


def test_validate_fusing_decoupled_value(ising):
    F = ising.F(2, 2, 2, 2)
    bad = _with_entries(ising, (2, 2, 2, 2), {**F.entries, (2, 2): ((QSqrt2(1),),)})
    rep = validate_fusing(bad)
    assert not rep.passed
    assert any("(2, 2)" in w.input and w.expected == "DC" for w in rep.witnesses)


def test_validate_fusing_wrong_position(ising):
    bad = _with_entries(ising, (1, 1, 0, 0), {(0, 0): ((QSqrt2(1),),)})
    rep = validate_fusing(bad)
    assert not rep.passed
    assert any("entry (0, 0)" in w.input for w in rep.witnesses)


def test_round_trip(ising):
    text = dump_fusion_data(ising)
    again = load_fusion_data(text)
    assert again == ising
    assert dump_fusion_data(again) == text


def test_missing_matrix_error(ising):
    doc = json.loads(dump_fusion_data(ising))
    doc["fusing"] = [f for f in doc["fusing"] if f["ijkl"] != ["2", "2", "2", "2"]]
    with pytest.raises(FusionDataError, match=r"\(2, 2, 2, 2\)|2, 2, 2, 2"):
        load_fusion_data(json.dumps(doc))


def test_duplicate_sector_error():
    doc = {"sectors": ["a", "a"], "unit": "a", "weights": {}, "fusion": [], "fusing": []}
    with pytest.raises(FusionDataError, match="duplicate"):
        load_fusion_data(json.dumps(doc))


def test_parse_error_has_location():
    with pytest.raises(FusionDataError, match="line 1"):
        load_fusion_data("{not json")


def test_dc_is_not_zero():
    assert DC != 0 and DC is not None
    with pytest.raises(TypeError):
        bool(DC)
