"""Characteristic concepts and the minimal model of a characteristic EL concept.

All builders memoize per call and canonicalize their output, so points
related at a level receive syntactically identical concepts.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional

from .errors import ConstructionError, DialectError, ResourceError
from .model import Interpretation, Pointed, ext_mask
from .syntax import (
    And,
    Concept,
    Direct,
    Exists,
    Forall,
    Inverse,
    Name,
    Nominal,
    Not,
    Signature,
    Top,
    UNIVERSAL,
    canonical,
    conj,
    disj,
    render,
)

DIALECTS = ("ALC", "ALCI", "ALCQ", "EL", "ELneg")
SCOPES = ("pointed", "global-ALCu", "global-ALCIu", "global-ALCQu", "global-ALCQu1", "global-ELuneg")
MAX_LEVEL = 6

_SCOPE_DIALECT = {
    "global-ALCu": "ALC",
    "global-ALCIu": "ALCI",
    "global-ALCQu": "ALCQ",
    "global-ALCQu1": "ALCQ",
    "global-ELuneg": "ELneg",
}


@dataclass(frozen=True)
class CharRequest:
    dialect: str
    scope: str = "pointed"
    n: int = 0
    kappa: Optional[int] = None
    sig: Optional[Signature] = None

    def __post_init__(self):
        if self.dialect not in DIALECTS:
            raise DialectError(f"unknown dialect {self.dialect!r}")
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")
        if self.n < 0:
            raise ValueError("level must be non-negative")
        if self.n > MAX_LEVEL:
            raise ResourceError(f"level {self.n} exceeds the cap {MAX_LEVEL}")
        base = self.base_dialect
        if base == "ALCQ" and (self.kappa is None or self.kappa < 1):
            raise ValueError("ALCQ characteristic concepts need a positive kappa")

    @property
    def base_dialect(self) -> str:
        return _SCOPE_DIALECT.get(self.scope, self.dialect)


class _Builder:
    def __init__(self, I: Interpretation, req: CharRequest):
        self.I = I
        self.req = req
        sig = req.sig if req.sig is not None else I.signature
        self.names = sorted(sig.concept_names)
        self.roles = sorted(sig.role_names)
        self.inds = sorted(sig.individual_names)
        self.memo: Dict[tuple, Concept] = {}

    # level-0 atoms; individuals act as concept names
    def _pos_neg(self, d):
        lab = self.I.label(d)
        pos = [Name(a) for a in self.names if a in lab]
        neg = [Name(a) for a in self.names if a not in lab]
        for a in self.inds:
            (pos if self.I.individuals.get(a) == d else neg).append(Nominal(a))
        return pos, neg

    def x0(self, d, style):
        pos, neg = self._pos_neg(d)
        if style == "EL":
            return canonical(conj(pos))
        if style == "ALC":
            return canonical(conj(pos + [Not(disj(neg))]))
        return canonical(conj(pos + [Not(c) for c in neg]))

    def role_list(self, inverse: bool):
        out = [Direct(r) for r in self.roles]
        if inverse:
            out += [Inverse(r) for r in self.roles]
        return out

    def succ(self, d, role):
        return self.I.successors(d, role)

    # -- ALC / ALCI
    def alc(self, d, n, inverse=False):
        key = ("alci" if inverse else "alc", d, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        parts = [self.x0(d, "ALC")]
        if n > 0:
            for r in self.role_list(inverse):
                kids = [self.alc(e, n - 1, inverse) for e in self.succ(d, r)]
                parts += [Exists(r, 1, k) for k in kids]
                parts.append(Forall(r, 1, disj(kids)))
        out = canonical(conj(parts))
        self.memo[key] = out
        return out

    # -- ALCQ
    def alcq(self, d, n):
        key = ("alcq", d, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        k = self.req.kappa
        parts = [self.x0(d, "ALCQ")]
        if n > 0:
            for r in self.role_list(False):
                kids = Counter(self.alcq(e, n - 1) for e in self.succ(d, r))
                for X, cnt in kids.items():
                    parts.append(count_restriction(r, cnt, k, X))
                parts.append(Forall(r, 1, disj(kids)))
        out = canonical(conj(parts))
        self.memo[key] = out
        return out

    # -- EL
    def el(self, d, n):
        key = ("el", d, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        parts = [self.x0(d, "EL")]
        if n > 0:
            for r in self.role_list(False):
                parts += [Exists(r, 1, self.el(e, n - 1)) for e in self.succ(d, r)]
        out = canonical(conj(parts))
        self.memo[key] = out
        return out

    def el_failures(self, d, n) -> List[Concept]:
        """EL concepts of rank <= n false at d such that every EL concept of
        rank <= n false at d entails one of them."""
        key = ("fail", d, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        _, neg = self._pos_neg(d)
        out = {canonical(c): None for c in neg}
        if n > 0:
            for r in self.role_list(False):
                kids = self.succ(d, r)
                choices = [self.el_failures(e, n - 1) for e in kids]
                if any(not c for c in choices):
                    continue
                cands = set()
                for combo in itertools.product(*choices):
                    cands.add(frozenset(combo))
                    if len(cands) > 200_000:
                        raise ResourceError("EL-negation characteristic concept too large")
                # keep the weakest: conjunct sets that are minimal under inclusion
                minimal = [s for s in cands if not any(o < s for o in cands)]
                for s in sorted(minimal, key=lambda s: sorted(map(render, s))):
                    out.setdefault(canonical(Exists(r, 1, conj(s))), None)
        res = sorted(out, key=render)
        self.memo[key] = res
        return res

    def elneg(self, d, n):
        key = ("elneg", d, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = canonical(conj([self.el(d, n)] + [Not(f) for f in self.el_failures(d, n)]))
        self.memo[key] = out
        return out

    def pointed(self, d, dialect=None):
        dialect = dialect or self.req.base_dialect
        n = self.req.n
        if dialect == "ALC":
            return self.alc(d, n)
        if dialect == "ALCI":
            return self.alc(d, n, inverse=True)
        if dialect == "ALCQ":
            return self.alcq(d, n)
        if dialect == "EL":
            return self.el(d, n)
        return self.elneg(d, n)

    def global_concept(self):
        scope = self.req.scope
        per = [self.pointed(d) for d in self.I.domain]
        cover = Forall(UNIVERSAL, 1, disj(per))
        if scope == "global-ALCQu":
            counts = Counter(per)
            exists = [count_restriction(UNIVERSAL, c, self.req.kappa, X) for X, c in counts.items()]
        else:
            exists = [Exists(UNIVERSAL, 1, X) for X in dict.fromkeys(per)]
        return canonical(conj(exists + [cover]))


def count_restriction(role, count: int, kappa: int, X: Concept) -> Concept:
    """``= count`` below kappa, otherwise ``>= kappa``."""
    if count < kappa:
        return conj([Exists(role, count, X), Not(Exists(role, count + 1, X))])
    return Exists(role, kappa, X)


def characteristic(req: CharRequest, I: Interpretation, d: Optional[str] = None) -> Concept:
    """Characteristic concept of (I, d), or of I for the global scopes."""
    if req.scope == "pointed":
        if d is None:
            raise ValueError("pointed characteristic concept needs an element")
        return _Builder(I, req).pointed(d)
    if d is not None:
        raise ValueError("global characteristic concepts take no element")
    return _Builder(I, req).global_concept()


def pointed_and_global(req: CharRequest, I: Interpretation, d: str) -> Concept:
    """Global concept of I together with the pointed concept of d."""
    b = _Builder(I, req)
    return canonical(conj([b.global_concept(), b.pointed(d)]))


_KIND = {"ALC": "alc-bisim", "ALCI": "alci-bisim", "ALCQ": "alcq-bisim", "EL": "el-sim", "ELneg": "equi-sim"}


def char_round_trip_check(req: CharRequest, I: Interpretation, d: str, H: Interpretation) -> List[bool]:
    """For each element e of H: does ``e`` satisfying the characteristic
    concept agree with (d, e) being related at level n?"""
    from .games import global_related, stratified_relation

    sig = req.sig if req.sig is not None else I.signature.union(H.signature)
    req = CharRequest(req.dialect, req.scope, req.n, req.kappa, sig)
    base = req.base_dialect
    kind = _KIND[base]
    kappa = req.kappa if base == "ALCQ" else None
    tab = stratified_relation(kind, req.n, kappa, I, H, sig)
    rel = tab.level(req.n)
    if req.scope == "pointed":
        X = characteristic(req, I, d)
        glob = True
    else:
        X = pointed_and_global(req, I, d)
        glob = global_related(
            kind, I, H, n=req.n, kappa=kappa, graded=(req.scope == "global-ALCQu"), sig=sig
        ).ok
    m = ext_mask(H, X)
    return [bool(m >> j & 1) == ((d, e) in rel and glob) for j, e in enumerate(H.domain)]


def el_minimal_model(X: Concept, sig: Optional[Signature] = None) -> Pointed:
    """Tree model of a characteristic EL concept: the root carries the
    concept names of the top conjunction, each existential conjunct adds a
    child.  Symbols of ``sig`` not mentioned stay empty."""
    domain, labels, edges = [], {}, {}
    counter = itertools.count()

    def build(c):
        d = f"m{next(counter)}"
        domain.append(d)
        parts = c.args if isinstance(c, And) else (c,)
        lab = set()
        kids = []
        for p in parts:
            if isinstance(p, Top):
                continue
            if isinstance(p, Name):
                lab.add(p.name)
            elif isinstance(p, Exists) and p.bound == 1 and p.role.kind == "direct":
                kids.append(p)
            else:
                raise ConstructionError(f"not a characteristic EL concept: {render(X)}")
        labels[d] = lab
        for p in kids:
            e = build(p.arg)
            edges.setdefault(p.role.name, set()).add((d, e))
        return d

    root = build(canonical(X))
    return Pointed(Interpretation(domain, labels, edges, sig=sig), root)
