"""Named interpretations and small random structures shared by the tests."""
from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from dlkit.model import Interpretation, parse_interpretation


def interp(text: str) -> Interpretation:
    return parse_interpretation(text)


# simulation both ways without bisimulation
EX_SIM_I = interp("""
elem d
elem b
elem c
label b A
label b B
label c A
edge r d b
edge r d c
""")
EX_SIM_H = interp("""
elem e
elem g
label g A
label g B
edge r e g
""")

POINT_A = interp("elem d\nlabel d A\n")
POINT_B = interp("elem e\nlabel e B\n")

# two elements, no edges: the universal role still links them
TWO_NO_EDGES = interp("elem d\nelem e\n")

# T = {some r.A [= some r.B}
EQ_J = interp("""
elem c
elem a
elem b
label a A
label b B
edge r c a
edge r c b
""")
EQ_H = interp("""
elem d
elem e
elem f
elem g
elem h
label e A
label h A
label f B
edge r d e
edge r d f
edge r g h
""")

CLIQUE = Interpretation(
    ["0", "1", "2"], {}, {"r": {(a, b) for a in "012" for b in "012" if a != b}}
)
TWO_POINTS = interp("elem 0\nelem 1\n")
REFL = interp("elem d\nedge r d d\n")
LOLLIPOP = interp("elem d2\nelem e2\nedge r d2 e2\nedge r e2 e2\n")

# equi-simulation pair for {top [= all r.A}
FORALL_MODEL = interp("""
elem d
elem a
elem c
label a A
edge r d a
""")
FORALL_COUNTER = interp("""
elem e
elem a2
elem b
label a2 A
edge r e a2
edge r e b
""")

CHAIN1 = interp("elem a0\nelem a1\nedge r a0 a1\n")
CHAIN2 = interp("elem b0\nelem b1\nelem b2\nedge r b0 b1\nedge r b1 b2\n")

NAMED = {
    "sim_I": EX_SIM_I,
    "sim_H": EX_SIM_H,
    "point_A": POINT_A,
    "point_B": POINT_B,
    "two": TWO_NO_EDGES,
    "eq_J": EQ_J,
    "eq_H": EQ_H,
    "clique": CLIQUE,
    "two_points": TWO_POINTS,
    "refl": REFL,
    "lollipop": LOLLIPOP,
    "forall_model": FORALL_MODEL,
    "forall_counter": FORALL_COUNTER,
    "chain1": CHAIN1,
    "chain2": CHAIN2,
}


def random_interp(rng: random.Random, n: int, names=("A", "B"), roles=("r",), p_edge=0.35, prefix="x"):
    dom = [f"{prefix}{i}" for i in range(n)]
    labels = {d: {a for a in names if rng.random() < 0.5} for d in dom}
    edges = {r: {(a, b) for a in dom for b in dom if rng.random() < p_edge} for r in roles}
    return Interpretation(dom, labels, edges)


def fixture_pairs(count=24, seed=7):
    """Deterministic pairs of interpretations with at most six elements."""
    rng = random.Random(seed)
    named = [
        (EX_SIM_I, EX_SIM_H),
        (EQ_J, EQ_H),
        (FORALL_MODEL, FORALL_COUNTER),
        (REFL, LOLLIPOP),
        (CHAIN1, CHAIN2),
        (CLIQUE, REFL),
        (POINT_A, POINT_B),
    ]
    out = list(named)
    while len(out) < count:
        I = random_interp(rng, rng.randint(1, 6), prefix="x")
        H = random_interp(rng, rng.randint(1, 6), prefix="y")
        out.append((I, H))
    return out


@st.composite
def interpretations(draw, max_n=4, names=("A", "B"), roles=("r",), prefix="x"):
    n = draw(st.integers(1, max_n))
    dom = [f"{prefix}{i}" for i in range(n)]
    labels = {d: set(draw(st.sets(st.sampled_from(names)))) if names else set() for d in dom}
    pairs = list(itertools.product(dom, dom))
    edges = {r: set(draw(st.sets(st.sampled_from(pairs), max_size=len(pairs)))) for r in roles}
    return Interpretation(dom, labels, edges)


def _concept_text(draw, depth, names, roles, el):
    atoms = list(names) + ["top"]
    if depth == 0:
        return draw(st.sampled_from(atoms))
    ops = ["atom", "and", "some"] if el else ["atom", "not", "and", "or", "some", "all"]
    op = draw(st.sampled_from(ops))
    if op == "atom":
        return draw(st.sampled_from(atoms))
    if op == "not":
        return f"not {_concept_text(draw, depth - 1, names, roles, el)}"
    if op in ("and", "or"):
        a = _concept_text(draw, depth - 1, names, roles, el)
        b = _concept_text(draw, depth - 1, names, roles, el)
        return f"({a} {op} {b})"
    r = draw(st.sampled_from(roles))
    return f"{op} {r}.{_concept_text(draw, depth - 1, names, roles, el)}"


@st.composite
def concept_texts(draw, depth=3, names=("A", "B"), roles=("r",), el=False):
    return _concept_text(draw, draw(st.integers(0, depth)), names, roles, el)
