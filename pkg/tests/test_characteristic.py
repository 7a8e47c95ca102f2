import pytest
from hypothesis import given, settings, strategies as st

from dlkit.characteristic import CharRequest, char_round_trip_check, characteristic, el_minimal_model
from dlkit.errors import ConstructionError, ResourceError
from dlkit.games import stratified_relation
from dlkit.model import ext_mask
from dlkit.syntax import Signature, canonical, grade, parse_concept, rank, render

import fixtures as fx
from fixtures import interpretations

SIG = Signature(concept_names={"A"}, role_names={"r"})


def test_isolated_point_alc():
    X = characteristic(CharRequest("ALC", "pointed", 1, None, SIG), fx.interp("elem d\n"), "d")
    assert X == canonical(parse_concept("(not A and all r.bot)"))


def test_counting_conjunct_is_capped():
    I = fx.interp("elem d\nelem a\nelem b\nlabel a A\nlabel b A\nedge r d a\nedge r d b\n")
    X = characteristic(CharRequest("ALCQ", "pointed", 1, 2, SIG), I, "d")
    assert "min 2 r.A" in render(X)
    assert grade(X) <= 2


def test_el_examples():
    I = fx.interp("elem d\nelem e\nlabel e A\nedge r d e\n")
    assert render(characteristic(CharRequest("EL", "pointed", 1, None, SIG), I, "d")) == "some r.A"
    glob = characteristic(CharRequest("ALC", "global-ALCu", 0, None, Signature(role_names={"r"})), fx.interp("elem d\n"))
    assert render(glob) == "top"


def test_request_validation():
    with pytest.raises(ValueError):
        CharRequest("ALCQ", "pointed", 1)
    with pytest.raises(ResourceError):
        CharRequest("ALC", "pointed", 99)


def _path_len(I, d, cap=3):
    """Length of the longest r-path from d, capped."""
    frontier, k = {d}, 0
    while k < cap:
        frontier = {b for a, b in I.edges.get("r", ()) if a in frontier}
        if not frontier:
            break
        k += 1
    return k


@pytest.mark.parametrize("dialect", ["ALC", "ALCI", "ALCQ", "EL", "ELneg"])
def test_self_satisfaction_and_rank(dialect):
    for I in fx.NAMED.values():
        for n in range(3):
            for kappa in ((1, 2, 3) if dialect == "ALCQ" else (None,)):
                req = CharRequest(dialect, "pointed", n, kappa)
                for i, d in enumerate(I.domain):
                    X = characteristic(req, I, d)
                    assert ext_mask(I, X) >> i & 1
                    assert rank(X) <= n
                    if dialect == "ALC" and n and "r" in I.signature.role_names and _path_len(I, d) >= n - 1:
                        assert rank(X) == n


@pytest.mark.parametrize("dialect,kappa", [("ALC", None), ("ALCI", None), ("ALCQ", 2), ("EL", None), ("ELneg", None)])
def test_round_trip_on_fixture_pairs(dialect, kappa):
    for I, H in fx.fixture_pairs(12):
        for n in range(3):
            for d in I.domain:
                assert all(char_round_trip_check(CharRequest(dialect, "pointed", n, kappa), I, d, H))


@pytest.mark.parametrize("scope,kappa", [("global-ALCu", None), ("global-ALCIu", None), ("global-ALCQu1", 2),
                                         ("global-ALCQu", 2), ("global-ELuneg", None)])
def test_global_round_trip(scope, kappa):
    for I, H in fx.fixture_pairs(10):
        for n in range(2):
            d = I.domain[0]
            assert all(char_round_trip_check(CharRequest("ALC", scope, n, kappa), I, d, H))


def test_levels_refine():
    # level n+1 concepts imply level n concepts on every fixture element
    for I in fx.NAMED.values():
        for n in range(2):
            for i, d in enumerate(I.domain):
                lo = ext_mask(I, characteristic(CharRequest("ALC", "pointed", n), I, d))
                hi = ext_mask(I, characteristic(CharRequest("ALC", "pointed", n + 1), I, d))
                assert hi & ~lo == 0


def test_el_minimal_model_examples():
    p = el_minimal_model(parse_concept("(A and B)"))
    assert len(p.interp) == 1 and p.interp.label(p.point) == {"A", "B"}
    p = el_minimal_model(parse_concept("some r.A"))
    assert len(p.interp) == 2 and p.interp.edges["r"] == {("m0", "m1")} and p.interp.label("m1") == {"A"}
    p = el_minimal_model(parse_concept("top"))
    assert len(p.interp) == 1 and not p.interp.label(p.point)
    with pytest.raises(ConstructionError):
        el_minimal_model(parse_concept("not A"))


@settings(max_examples=40, deadline=None)
@given(interpretations(max_n=4), st.integers(0, 2))
def test_el_minimal_model_simulates_into_source(I, n):
    d = I.domain[0]
    X = characteristic(CharRequest("EL", "pointed", n), I, d)
    p = el_minimal_model(X)
    assert ext_mask(p.interp, X) & 1
    lvl = stratified_relation("el-sim", n, None, p.interp, I).level(n)
    assert (p.point, d) in lvl


@settings(max_examples=40, deadline=None)
@given(interpretations(max_n=4, prefix="x"), interpretations(max_n=4, prefix="y"), st.integers(0, 2),
       st.sampled_from(["ALC", "ALCQ", "EL", "ELneg"]))
def test_round_trip_property(I, H, n, dialect):
    req = CharRequest(dialect, "pointed", n, 2 if dialect == "ALCQ" else None)
    assert all(char_round_trip_check(req, I, I.domain[0], H))
