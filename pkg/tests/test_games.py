import random

from hypothesis import given, settings, strategies as st

from dlkit.games import KINDS, bisim_classes, distinguish, global_related, greatest_relation, stratified_relation
from dlkit.model import direct_product, ext_mask
from dlkit.syntax import dialect_of, parse_concept, rank, render

import fixtures as fx
from fixtures import interpretations


def test_simulation_both_ways_without_bisimulation():
    I, H = fx.EX_SIM_I, fx.EX_SIM_H
    assert ("d", "e") in greatest_relation("el-sim", I, H)
    assert ("e", "d") in greatest_relation("el-sim", H, I)
    assert ("d", "e") in greatest_relation("equi-sim", I, H)
    assert ("d", "e") not in greatest_relation("alc-bisim", I, H)


def test_clique_all_pairs_counting_bisimilar():
    tab = greatest_relation("alcq-bisim", fx.CLIQUE, fx.CLIQUE)
    assert len(tab.pairs) == 9


def test_reflexive_point_against_lollipop():
    tab = greatest_relation("alc-bisim", fx.REFL, fx.LOLLIPOP)
    assert {("d", "d2"), ("d", "e2")} <= tab.pairs
    assert global_related("alc-bisim", fx.REFL, fx.LOLLIPOP).ok


def test_equisim_pair_for_forall():
    tab = greatest_relation("equi-sim", fx.FORALL_MODEL, fx.FORALL_COUNTER)
    assert {("d", "e"), ("a", "a2"), ("c", "b")} <= tab.pairs
    assert global_related("equi-sim", fx.FORALL_MODEL, fx.FORALL_COUNTER).ok


def test_corrected_inclusion_pair_not_globally_equisimilar():
    v = global_related("equi-sim", fx.EQ_J, fx.EQ_H)
    assert not v.ok and v.uncovered_right == ["g"]


def test_stratified_examples():
    tab = stratified_relation("alc-bisim", 2, None, fx.CHAIN1, fx.CHAIN2)
    assert ("a0", "b0") in tab.level(1)
    assert ("a0", "b0") not in tab.level(2)
    lvl0 = stratified_relation("alc-bisim", 0, None, fx.EX_SIM_I, fx.EX_SIM_H).level(0)
    assert lvl0 == {(d, e) for d in fx.EX_SIM_I.domain for e in fx.EX_SIM_H.domain
                    if fx.EX_SIM_I.label(d) == fx.EX_SIM_H.label(e)}
    p, q = fx.interp("elem d\n"), fx.interp("elem e\n")
    for kind in KINDS:
        assert stratified_relation(kind, 0, 1, p, q).level(0) == {("d", "e")}


def test_serialization():
    tab = stratified_relation("alc-bisim", 1, None, fx.REFL, fx.LOLLIPOP)
    assert tab.serialize() == "level 0: (d,d2) (d,e2)\nlevel 1: (d,d2) (d,e2)\n"


def test_global_identity():
    for I in fx.NAMED.values():
        for kind in KINDS:
            assert global_related(kind, I, I).ok


def test_distinguish_examples():
    C = distinguish("alc-bisim", (fx.EX_SIM_I, "d"), (fx.EX_SIM_H, "e"), 3)
    assert render(C) == "some r.(A and not B)"
    I = fx.interp("elem d\nelem a\nlabel a A\nedge r d a\n")
    H = fx.interp("elem e\nelem b\nedge r e b\n")
    assert render(distinguish("el-sim", (I, "d"), (H, "e"), 2)) == "some r.A"
    assert distinguish("alc-bisim", (fx.REFL, "d"), (fx.LOLLIPOP, "d2"), 4) is None


@settings(max_examples=60, deadline=None)
@given(interpretations(max_n=4, prefix="x"), interpretations(max_n=4, prefix="y"), st.sampled_from(KINDS))
def test_levels_decrease_and_fixpoint_is_stable(I, H, kind):
    tab = stratified_relation(kind, 5, 2, I, H)
    for k in range(len(tab.levels) - 1):
        assert tab.levels[k + 1] <= tab.levels[k]
    fix = greatest_relation(kind, I, H)
    again = stratified_relation(kind, len(fix.levels) + 1, None, I, H)
    assert again.pairs == fix.pairs


@settings(max_examples=60, deadline=None)
@given(interpretations(max_n=5), st.sampled_from(KINDS))
def test_equivalence_properties(I, kind):
    rel = greatest_relation(kind, I, I).pairs
    dom = I.domain
    assert all((d, d) in rel for d in dom)
    for a in dom:
        for b in dom:
            for c in dom:
                if (a, b) in rel and (b, c) in rel:
                    assert (a, c) in rel
            if kind != "el-sim" and (a, b) in rel:
                assert (b, a) in rel


@settings(max_examples=60, deadline=None)
@given(interpretations(max_n=4, prefix="x"), interpretations(max_n=4, prefix="y"))
def test_finer_relations_imply_alc(I, H):
    alc = greatest_relation("alc-bisim", I, H).pairs
    assert greatest_relation("alcq-bisim", I, H).pairs <= alc
    assert greatest_relation("alci-bisim", I, H).pairs <= alc


def _kind_for(C):
    base = dialect_of(C).base
    return {"EL": "el-sim", "EL⊔": "el-sim", "EL¬": "equi-sim"}.get(base, "alc-bisim")


def test_invariance_transfer():
    rng = random.Random(5)
    for _ in range(500):
        I = fx.random_interp(rng, rng.randint(1, 4), prefix="x")
        H = fx.random_interp(rng, rng.randint(1, 4), prefix="y")
        C = parse_concept(_gen(rng, 3, rng.random() < 0.4))
        n = rank(C)
        kind = _kind_for(C)
        lvl = stratified_relation(kind, n, None, I, H).level(n)
        ei, eh = ext_mask(I, C), ext_mask(H, C)
        for i, d in enumerate(I.domain):
            for j, e in enumerate(H.domain):
                if (d, e) in lvl:
                    if kind == "el-sim":
                        assert not (ei >> i & 1) or (eh >> j & 1)
                    else:
                        assert (ei >> i & 1) == (eh >> j & 1)


def _gen(rng, d, el):
    if d == 0 or rng.random() < 0.3:
        return rng.choice(["A", "B", "top"])
    ops = ["and", "some"] if el else ["not", "and", "or", "some", "all"]
    op = rng.choice(ops)
    if op == "not":
        return f"not {_gen(rng, d - 1, el)}"
    if op in ("and", "or"):
        return f"({_gen(rng, d - 1, el)} {op} {_gen(rng, d - 1, el)})"
    return f"{op} r.{_gen(rng, d - 1, el)}"


def test_bisimulation_respects_products():
    small = [fx.REFL, fx.LOLLIPOP, fx.CHAIN1, fx.POINT_A, fx.TWO_POINTS, fx.EX_SIM_H]
    for I1 in small:
        for H1 in small:
            r1 = greatest_relation("alc-bisim", I1, H1).pairs
            if not r1:
                continue
            for I2 in small[:4]:
                for H2 in small[:4]:
                    r2 = greatest_relation("alc-bisim", I2, H2).pairs
                    if not r2:
                        continue
                    P, Q = direct_product([I1, I2]), direct_product([H1, H2])
                    rel = greatest_relation("alc-bisim", P, Q).pairs
                    for d, e in r1:
                        for d2, e2 in r2:
                            assert (f"({d},{d2})", f"({e},{e2})") in rel


def test_classes_are_joint():
    cls = bisim_classes(fx.REFL, fx.LOLLIPOP)[-1]
    assert len(set(cls)) == 1
