"""Smallest globally related companions of finite interpretations.

``alc-global`` factors by the largest auto-bisimulation.  The counting kinds
work on the partial tree-unravelling: elements of one counting-bisimulation
class are grouped as siblings (r-successors of one path), the largest group
of every class is kept, every other group is mapped injectively into it, and
paths are finally identified by the input element they end in.  ``alcqu``
additionally treats all root paths of a class as one group, which keeps the
number of elements per class.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .errors import ConstructionError, DLError
from .games import bisim_classes, global_related
from .model import DEFAULT_MAX_ELEMS, Interpretation, SEP, partial_tree_unravel, quotient

KINDS = ("alc-global", "alcqu1", "alcqu")


@dataclass
class Companion:
    """Result of :func:`minimal_companion`.  ``provenance`` maps each output
    element to the partial-unravelling paths (or input elements) it stands for."""

    kind: str
    interpretation: Interpretation
    provenance: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def __len__(self):
        return len(self.interpretation)


def _classes(I: Interpretation, kind: str) -> Dict[str, int]:
    rel = "alc-bisim" if kind == "alc-global" else "alcq-bisim"
    cls = bisim_classes(I, Interpretation([]), rel)[-1]
    return dict(zip(I.domain, cls))


def _alc_global(I: Interpretation) -> Companion:
    cls = _classes(I, "alc-global")
    blocks: Dict[int, List[str]] = {}
    for d in I.domain:
        blocks.setdefault(cls[d], []).append(d)
    Q = quotient(I, list(blocks.values()))
    return Companion("alc-global", Q, dict(Q.provenance))


def _counting(I: Interpretation, kind: str, max_elems: int) -> Companion:
    if I.individuals:
        raise DLError("counting companions are not defined with individuals")
    cls = _classes(I, kind)
    P = partial_tree_unravel(I, max_elems=max_elems)
    last = {p: P.provenance[p][0] for p in P.domain}
    path = {p: P.provenance[p][1] for p in P.domain}
    order = {d: i for i, d in enumerate(I.domain)}

    # sibling groups per class: (parent path, role) -> paths of that class
    groups: Dict[int, List[Tuple[str, ...]]] = {}
    sib: Dict[tuple, List[str]] = {}
    for r in sorted(P.edges):
        for a, b in sorted(P.edges[r], key=lambda e: P.index[e[1]]):
            sib.setdefault((a, r, cls[last[b]]), []).append(b)
    for (_, _, c), members in sib.items():
        groups.setdefault(c, []).append(tuple(members))
    roots = [p for p in P.domain if len(path[p]) == 1]
    if kind == "alcqu":
        by_class: Dict[int, List[str]] = {}
        for p in roots:
            by_class.setdefault(cls[last[p]], []).append(p)
        for c, members in by_class.items():
            groups.setdefault(c, []).append(tuple(members))
    else:
        for p in roots:
            groups.setdefault(cls[last[p]], []).append((p,))

    # largest group per class; ties go to the lexicographically least one
    def key(g):
        return (-len(g), sorted(order[last[p]] for p in g), sorted(P.index[p] for p in g))

    keep: Dict[int, Tuple[str, ...]] = {}
    for c, gs in groups.items():
        best = min(gs, key=key)
        # cut paths with a repeated element back to its first occurrence;
        # the last element is unchanged, so members stay distinct
        cut = []
        for p in best:
            seq = path[p]
            first = seq.index(seq[-1])
            cut.append(SEP.join(seq[: first + 1]) if first != len(seq) - 1 else p)
        keep[c] = tuple(cut)

    letters = {c: sorted({last[p] for p in g}, key=order.get) for c, g in keep.items()}

    def sigma(c: int, members: List[str]) -> Dict[str, str]:
        # injective into the kept group, fixed on shared elements, so the
        # map depends only on the set of elements and agrees across paths
        target = letters[c]
        shared = [d for d in members if d in target]
        free = [d for d in target if d not in members]
        out = {d: d for d in shared}
        rest = [d for d in members if d not in target]
        if len(rest) > len(free):
            raise DLError("kept group is not maximal")
        out.update(zip(rest, free))
        return out

    dom = sorted({d for ls in letters.values() for d in ls}, key=order.get)
    edges: Dict[str, set] = {}
    for x in dom:
        for r in sorted(I.edges):
            succ = I.successors(x, r)
            by_c: Dict[int, List[str]] = {}
            for y in succ:
                by_c.setdefault(cls[y], []).append(y)
            for c, ys in by_c.items():
                ys = sorted(ys, key=order.get)
                for y, z in sigma(c, ys).items():
                    edges.setdefault(r, set()).add((x, z))
    labels = {d: I.label(d) for d in dom}
    prov = {d: tuple(p for p in keep[cls[d]] if p.split(SEP)[-1] == d) for d in dom}
    J = Interpretation(dom, labels, edges, provenance=prov, sig=I._sig)
    return Companion(kind, J, prov)


def minimal_companion(I: Interpretation, kind: str = "alc-global",
                      max_elems: int = DEFAULT_MAX_ELEMS, check: bool = True) -> Companion:
    """The smallest interpretation globally related to ``I`` under ``kind``.

    With ``check`` the result is verified with the bisimulation games:
    ALC-global bisimilarity for ``alc-global``, global ALCQ bisimilarity for
    ``alcqu1`` and the graded (element-counting) variant for ``alcqu``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown companion kind {kind!r}; expected one of {KINDS}")
    if kind == "alc-global":
        out = _alc_global(I)
    else:
        out = _counting(I, kind, max_elems)
    if check and not companion_ok(I, out.interpretation, kind):
        raise ConstructionError(f"{kind} companion failed verification")
    return out


def companion_ok(I: Interpretation, J: Interpretation, kind: str) -> bool:
    """Is ``J`` globally related to ``I`` under the relation of ``kind``?"""
    if kind == "alc-global":
        return global_related("alc-bisim", I, J).ok
    return global_related("alcq-bisim", I, J, graded=(kind == "alcqu")).ok
