import pytest
from hypothesis import given, settings

from dlkit.errors import DialectError
from dlkit.model import ext_mask, satisfies
from dlkit.syntax import Direct, Inverse, parse_concept, parse_tbox, rank, to_core
from dlkit.types import canonical_model, concept_sat, enumerate_types, leadsto

from fixtures import concept_texts
from gen import random_tboxes
from oracle import universe


def _type(table, positives):
    out = 0
    for c in positives:
        out |= 1 << table.pos[to_core(parse_concept(c))]
    return out


def test_type_counts():
    T = parse_tbox("A [= some r.A")
    assert len(enumerate_types(T, "tp", "ALC")) == 4
    tpT = enumerate_types(T, "tpT", "ALC")
    assert len(tpT) == 3 and _type(tpT, ["A"]) not in tpT
    assert len(enumerate_types(parse_tbox(""), "tp", "ALC")) == 1
    only = enumerate_types(parse_tbox("A [= not A"), "tpT", "ALC")
    assert [only.render_type(t) for t in only] == ["not A"]


def test_leadsto_examples():
    table = enumerate_types(parse_tbox("A [= some r.A"), "tp", "ALC")
    r = Direct("r")
    with_a = _type(table, ["A"])
    assert leadsto(table, _type(table, ["some r.A"]), r, with_a)
    assert not leadsto(table, 0, r, with_a)
    inv = enumerate_types(parse_tbox("some inv(r).B [= B"), "tp", "ALCI")
    s0, s1 = _type(inv, ["B"]), 0
    assert not leadsto(inv, s0, r, s1)
    assert leadsto(inv, s0, r, _type(inv, ["some inv(r).B"]))
    assert not leadsto(inv, s1, Inverse("r"), s0)


def test_concept_sat_examples():
    assert not concept_sat(parse_concept("(A and not A)"), dialect="ALC")
    assert not concept_sat(parse_concept("(some r.A and all r.not A)"), dialect="ALC")
    T = parse_tbox("A [= bot")
    assert not concept_sat(parse_concept("A"), T, "ALC")
    assert concept_sat(parse_concept("not A"), T, "ALC")
    assert concept_sat(parse_concept("(some inv(r).A and all r.B)"), dialect="ALCI")


def test_dialect_checked():
    with pytest.raises(DialectError):
        enumerate_types(parse_tbox("some inv(r).A [= A"), "tp", "ALC")


def _corpus():
    return random_tboxes(40, seed=3, max_clos=8)


def test_canonical_model_realizes_types():
    for T in _corpus():
        table = enumerate_types(T, "tp", "ALC")
        M = canonical_model(table)
        for c in table.base:
            m = ext_mask(M, c)
            for i, t in enumerate(table.types):
                assert bool(m >> i & 1) == bool(t >> table.pos[c] & 1)


def test_canonical_model_over_tpT_satisfies_T():
    for T in _corpus():
        table = enumerate_types(T, "tpT", "ALC")
        if len(table):
            assert satisfies(canonical_model(table), T).ok


def test_survivors_match_small_models():
    """A type survives iff some interpretation with at most three elements realizes it."""
    U = universe(("A", "B"))
    for T in _corpus():
        table = enumerate_types(T, "tpT", "ALC")
        models = U.models(T)
        realized = set()
        for n, ok in models.items():
            code = sum(U.ext(n, c).astype(object) << k for k, c in enumerate(table.base)) if table.base else 0
            if table.base:
                realized.update(int(x) for x in code[ok].reshape(-1))
            elif ok.any():
                realized.add(0)
        assert realized == set(table.types)


def test_tpk_restricts_closure():
    T = parse_tbox("A [= some r.some r.B")
    t1 = enumerate_types(T, "tpk", "ALC", k=1)
    assert all(rank(c) <= 1 for c in t1.base)


@settings(max_examples=60, deadline=None)
@given(concept_texts(depth=2), concept_texts(depth=2))
def test_canonical_model_soundness_property(left, right):
    T = parse_tbox(f"{left} [= {right}")
    table = enumerate_types(T, "tpT", "ALC")
    if not len(table):
        return
    M = canonical_model(table)
    assert satisfies(M, T).ok
    for c in table.base:
        m = ext_mask(M, c)
        for i, t in enumerate(table.types):
            assert bool(m >> i & 1) == bool(t >> table.pos[c] & 1)
