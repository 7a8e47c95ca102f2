import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dlkit.errors import DLError
from dlkit.minimize import KINDS, companion_ok, minimal_companion
from dlkit.model import Interpretation

import fixtures as fx
from fixtures import interpretations


def all_interps(m, names=("A",), roles=("r",)):
    """Every interpretation over m elements and the given symbols."""
    dom = [f"z{i}" for i in range(m)]
    pairs = list(itertools.product(dom, dom))
    for lab in itertools.product(range(1 << len(names)), repeat=m):
        labels = {d: {a for j, a in enumerate(names) if lab[i] >> j & 1} for i, d in enumerate(dom)}
        for bits in itertools.product(range(1 << len(pairs)), repeat=len(roles)):
            edges = {r: {pairs[k] for k in range(len(pairs)) if b >> k & 1} for r, b in zip(roles, bits)}
            yield Interpretation(dom, labels, edges)


def no_smaller(I, kind, size, names=("A",)):
    return not any(companion_ok(I, H, kind) for m in range(1, size) for H in all_interps(m, names))


def test_two_points():
    assert len(minimal_companion(fx.TWO_POINTS, "alcqu1")) == 1
    assert len(minimal_companion(fx.TWO_POINTS, "alcqu")) == 2
    assert len(minimal_companion(fx.TWO_POINTS, "alc-global")) == 1
    assert no_smaller(fx.TWO_POINTS, "alcqu", 2, names=())


def test_clique_alcqu1():
    c = minimal_companion(fx.CLIQUE, "alcqu1")
    J = c.interpretation
    assert len(J) == 2
    for d in J.domain:
        assert sum(1 for a, _ in J.edges["r"] if a == d) == 2
        assert (d, d) in J.edges["r"]
    assert no_smaller(fx.CLIQUE, "alcqu1", 2, names=())
    assert len(minimal_companion(fx.CLIQUE, "alc-global")) == 1
    assert len(minimal_companion(fx.CLIQUE, "alcqu")) == 3


def test_provenance_covers_outputs():
    c = minimal_companion(fx.CLIQUE, "alcqu1")
    assert set(c.provenance) == set(c.interpretation.domain)
    assert all(c.provenance[d] for d in c.provenance)


def test_individuals_rejected_for_counting_kinds():
    with pytest.raises(DLError):
        minimal_companion(fx.interp("elem d\nind a d\n"), "alcqu1")
    with pytest.raises(ValueError):
        minimal_companion(fx.REFL, "nope")


@settings(max_examples=60, deadline=None)
@given(interpretations(max_n=5, names=("A",)), st.sampled_from(KINDS))
def test_companions_are_sound_and_idempotent(I, kind):
    J = minimal_companion(I, kind).interpretation
    assert companion_ok(I, J, kind)
    assert len(minimal_companion(J, kind)) == len(J)


@settings(max_examples=60, deadline=None)
@given(interpretations(max_n=5, names=("A",)))
def test_size_ordering(I):
    a, b, c = (len(minimal_companion(I, k)) for k in KINDS)
    assert a <= b <= c <= len(I)


@settings(max_examples=40, deadline=None)
@given(interpretations(max_n=4, names=("A",)), st.sampled_from(KINDS))
def test_minimal_by_brute_force(I, kind):
    k = len(minimal_companion(I, kind))
    if k <= 3:
        assert no_smaller(I, kind, k)
