"""Bisimulation and simulation relations between finite interpretations.

Bisimulation variants are computed by partition refinement on the disjoint
union of the two inputs (each variant is an equivalence there); simulation
is refined pairwise with bitsets.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .model import Interpretation, bits
from .syntax import Signature, render

KINDS = ("alc-bisim", "alci-bisim", "alcq-bisim", "el-sim", "equi-sim")
ALIASES = {
    "bisim": "alc-bisim",
    "alc": "alc-bisim",
    "alci": "alci-bisim",
    "alcq": "alcq-bisim",
    "el": "el-sim",
    "sim": "el-sim",
    "equisim": "equi-sim",
    "equi": "equi-sim",
}


def _kind(kind: str) -> str:
    k = ALIASES.get(kind, kind)
    if k not in KINDS:
        raise ValueError(f"unknown relation kind {kind!r}")
    return k


@dataclass
class RelationTable:
    """Pair sets per refinement level; ``pairs`` is the last level."""

    kind: str
    left: Interpretation
    right: Interpretation
    levels: List[frozenset] = field(default_factory=list)

    @property
    def pairs(self) -> frozenset:
        return self.levels[-1]

    def __contains__(self, pair):
        return pair in self.pairs

    def level(self, k: int) -> frozenset:
        return self.levels[min(k, len(self.levels) - 1)]

    def serialize(self, all_levels: bool = True) -> str:
        li, ri = self.left.index, self.right.index
        out = []
        rng = range(len(self.levels)) if all_levels else [len(self.levels) - 1]
        for k in rng:
            ps = sorted(self.levels[k], key=lambda p: (li[p[0]], ri[p[1]]))
            out.append(f"level {k}: " + " ".join(f"({a},{b})" for a, b in ps))
        return "\n".join(o.rstrip() for o in out) + "\n"


def _atoms(I: Interpretation, d: str, names: Optional[frozenset]) -> frozenset:
    lab = I.label(d)
    if names is not None:
        lab = lab & names
    inds = frozenset("{" + a + "}" for a, x in I.individuals.items() if x == d)
    return lab | inds


def _roles(I, H, sig: Optional[Signature]):
    if sig is not None:
        return sorted(sig.role_names)
    return sorted(I.role_names | H.role_names)


class _Joint:
    """Disjoint union of two interpretations as adjacency lists."""

    def __init__(self, I: Interpretation, H: Interpretation, sig: Optional[Signature], inverse: bool):
        self.I, self.H = I, H
        self.n = len(I)
        names = sig.concept_names if sig is not None else None
        self.atoms = [_atoms(I, d, names) for d in I.domain] + [_atoms(H, e, names) for e in H.domain]
        self.succ = []
        for r in _roles(I, H, sig):
            self.succ.append(self._adj(r, False))
            if inverse:
                self.succ.append(self._adj(r, True))

    def _adj(self, r, inv):
        out = []
        for J, off in ((self.I, 0), (self.H, self.n)):
            sm = J.succ_mask(r) if not inv else J.succ_mask(_inv(r))
            out.extend([off + j for j in bits(m)] for m in sm)
        return out


def _inv(r):
    from .syntax import Inverse

    return Inverse(r)


def _renumber(keys) -> List[int]:
    ids: Dict[object, int] = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def bisim_classes(
    I: Interpretation,
    H: Interpretation,
    kind: str = "alc-bisim",
    n: Optional[int] = None,
    kappa: Optional[int] = None,
    sig: Optional[Signature] = None,
) -> List[List[int]]:
    """Class ids per level on the joint domain (I first, then H)."""
    kind = _kind(kind)
    J = _Joint(I, H, sig, inverse=(kind == "alci-bisim"))
    cls = _renumber(J.atoms)
    levels = [cls]
    counting = kind == "alcq-bisim"
    while n is None or len(levels) <= n:
        keys = []
        for x in range(len(cls)):
            parts = [cls[x]]
            for adj in J.succ:
                if counting:
                    c = Counter(cls[y] for y in adj[x])
                    if kappa is not None:
                        c = {k: min(v, kappa) for k, v in c.items()}
                    parts.append(tuple(sorted(c.items())))
                else:
                    parts.append(frozenset(cls[y] for y in adj[x]))
            keys.append(tuple(parts))
        new = _renumber(keys)
        if n is None and len(set(new)) == len(set(cls)):
            break
        levels.append(new)
        cls = new
    return levels


def _pairs_from_classes(I, H, cls) -> frozenset:
    n = len(I)
    byc: Dict[int, List[str]] = {}
    for j, e in enumerate(H.domain):
        byc.setdefault(cls[n + j], []).append(e)
    return frozenset((d, e) for i, d in enumerate(I.domain) for e in byc.get(cls[i], ()))


def _sim_levels(I, H, n, sig) -> List[List[int]]:
    """Simulation I -> H as per-element bitsets over H, one list per level."""
    names = sig.concept_names if sig is not None else None
    roles = _roles(I, H, sig)
    hat = [_atoms(H, e, names) for e in H.domain]
    cur = []
    for d in I.domain:
        a = _atoms(I, d, names)
        m = 0
        for j, b in enumerate(hat):
            if a <= b:
                m |= 1 << j
        cur.append(m)
    levels = [cur]
    isucc = [[list(bits(m)) for m in I.succ_mask(r)] for r in roles]
    hsucc = [H.succ_mask(r) for r in roles]
    while n is None or len(levels) <= n:
        new = []
        for i in range(len(I)):
            m = cur[i]
            keep = 0
            for j in bits(m):
                ok = True
                for ri in range(len(roles)):
                    hs = hsucc[ri][j]
                    for i2 in isucc[ri][i]:
                        if not hs & cur[i2]:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    keep |= 1 << j
            new.append(keep)
        if n is None and new == cur:
            break
        levels.append(new)
        cur = new
    return levels


def _sim_pairs(I, H, level) -> frozenset:
    return frozenset((d, H.domain[j]) for i, d in enumerate(I.domain) for j in bits(level[i]))


def stratified_relation(
    kind: str,
    n: Optional[int],
    kappa: Optional[int],
    I: Interpretation,
    H: Interpretation,
    sig: Optional[Signature] = None,
) -> RelationTable:
    """Levels 0..n of the relation (until stability when ``n`` is None)."""
    kind = _kind(kind)
    if kind in ("alc-bisim", "alci-bisim", "alcq-bisim"):
        lv = bisim_classes(I, H, kind, n, kappa if kind == "alcq-bisim" else None, sig)
        levels = [_pairs_from_classes(I, H, c) for c in lv]
    elif kind == "el-sim":
        levels = [_sim_pairs(I, H, lv) for lv in _sim_levels(I, H, n, sig)]
    else:
        fw = _sim_levels(I, H, n, sig)
        bw = _sim_levels(H, I, n, sig)
        k = max(len(fw), len(bw))
        levels = []
        for i in range(k):
            a = _sim_pairs(I, H, fw[min(i, len(fw) - 1)])
            b = _sim_pairs(H, I, bw[min(i, len(bw) - 1)])
            levels.append(frozenset(p for p in a if (p[1], p[0]) in b))
    if n is not None:
        while len(levels) <= n:
            levels.append(levels[-1])
    return RelationTable(kind, I, H, levels)


def greatest_relation(kind: str, I: Interpretation, H: Interpretation, sig: Optional[Signature] = None) -> RelationTable:
    """The largest relation of the given kind (refined to a fixpoint)."""
    return stratified_relation(kind, None, None, I, H, sig)


@dataclass
class GlobalVerdict:
    ok: bool
    uncovered_left: List[str] = field(default_factory=list)
    uncovered_right: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    @property
    def uncovered(self) -> List[str]:
        return self.uncovered_left + self.uncovered_right


def global_related(
    kind: str,
    I: Interpretation,
    H: Interpretation,
    n: Optional[int] = None,
    kappa: Optional[int] = None,
    graded: bool = False,
    sig: Optional[Signature] = None,
) -> GlobalVerdict:
    """Global relatedness: the relation is total on I and onto H.

    With ``graded`` (counting kinds only) every class must also have the same
    number of members on both sides, counted up to ``kappa`` (or exactly when
    ``kappa`` is None)."""
    kind = _kind(kind)
    tab = stratified_relation(kind, n, kappa, I, H, sig)
    rel = tab.pairs
    left = {d for d, _ in rel}
    right = {e for _, e in rel}
    ul = [d for d in I.domain if d not in left]
    ur = [e for e in H.domain if e not in right]
    if graded:
        if kind != "alcq-bisim":
            raise ValueError("graded global relation needs the alcq-bisim kind")
        cls = bisim_classes(I, H, kind, n, kappa, sig)[-1]
        m = len(I)
        ci = Counter(cls[:m])
        ch = Counter(cls[m:])
        cap = kappa if kappa is not None else max(len(I), len(H))
        bad = {c for c in set(ci) | set(ch) if min(ci[c], cap) != min(ch[c], cap)}
        ul = [d for i, d in enumerate(I.domain) if d in ul or cls[i] in bad]
        ur = [e for j, e in enumerate(H.domain) if e in ur or cls[m + j] in bad]
    return GlobalVerdict(not ul and not ur, ul, ur)


def distinguish(kind: str, left, right, max_n: int, kappa: Optional[int] = None, sig: Optional[Signature] = None):
    """A concept satisfied at the left point but not at the right one.

    Looks for the least level n <= max_n that separates the points and returns
    the shortest conjunct of the left point's level-n characteristic concept
    that already separates them (ties broken by rendered text).  Returns None
    when the points are related up to ``max_n``."""
    from .characteristic import CharRequest, characteristic
    from .model import holds

    kind = _kind(kind)
    (I, d), (H, e) = left, right
    if sig is None:
        sig = I.signature.union(H.signature)
    if kind == "alcq-bisim" and kappa is None:
        deg = 1
        for J in (I, H):
            for r in J.role_names:
                deg = max([deg] + [bin(m).count("1") for m in J.succ_mask(r)])
        kappa = deg + 1
    tab = stratified_relation(kind, max_n, kappa, I, H, sig)
    dialect = {"alc-bisim": "ALC", "alci-bisim": "ALCI", "alcq-bisim": "ALCQ", "el-sim": "EL", "equi-sim": "ELneg"}[kind]
    for n in range(max_n + 1):
        if (d, e) in tab.level(n):
            continue
        X = characteristic(CharRequest(dialect, "pointed", n, kappa, sig), I, d)
        from .syntax import And, length

        parts = X.args if isinstance(X, And) else (X,)
        cands = [c for c in parts if holds(I, d, c) and not holds(H, e, c)]
        if kind == "equi-sim" and not cands:
            cands = [X]
        cands.sort(key=lambda c: (length(c), render(c)))
        return cands[0]
    return None
