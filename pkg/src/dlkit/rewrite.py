"""Rewritability deciders.

* :func:`alci_to_alc` eliminates pairs (s, S) of a type and a set of
  T-types until a fixpoint is reached;
* :func:`equisim_invariant` eliminates tuples (s, s0, t0, ..., sl, tl)
  kept in dense boolean arrays, one per family (l, m);
* :func:`product_preserved` searches pairs of potential tree models whose
  root product violates the TBox;
* :func:`alc_to_el` combines the last two.

Negative verdicts carry a witness pair that is checked with the games and
model modules before the verdict is returned.
"""
from __future__ import annotations

import itertools
import os
import string
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DialectError, ResourceError
from .games import global_related
from .model import (
    Interpretation,
    direct_product,
    disjoint_union,
    popcount,
    quotient,
    restrict,
    satisfies,
)
from .syntax import And, Direct, Name, TBox, dialect_of, rank, render, signature_of, to_core
from .types import TypeTable, _eval_core, canonical_model, enumerate_types

REWRITABLE = "REWRITABLE"
NOT_REWRITABLE = "NOT_REWRITABLE"
INVARIANT = "INVARIANT"
NOT_INVARIANT = "NOT_INVARIANT"
PRESERVED = "PRESERVED"
NOT_PRESERVED = "NOT_PRESERVED"
INCONCLUSIVE = "INCONCLUSIVE"

POSITIVE = (REWRITABLE, INVARIANT, PRESERVED)
NEGATIVE = (NOT_REWRITABLE, NOT_INVARIANT, NOT_PRESERVED)

DEFAULT_MAX_STEPS = 5_000_000
MAX_PAIRS = 400_000
MAX_TUPLE_CELLS = 60_000_000
SHRINK_LIMIT = 60
TRACE_LIMIT = 2000


@dataclass
class Witness:
    """``model`` satisfies T, ``countermodel`` does not, and the two are
    related by ``relation`` (for products, ``countermodel`` is the product
    of ``factors``)."""

    relation: str
    model: Interpretation
    countermodel: Interpretation
    factors: Tuple[Interpretation, ...] = ()
    point: Optional[str] = None
    tuple: str = ""


@dataclass
class Verdict:
    answer: str
    witness: Optional[Witness] = None
    trace: List[str] = field(default_factory=list)

    @property
    def positive(self) -> bool:
        return self.answer in POSITIVE

    @property
    def exit_code(self) -> int:
        if self.answer in POSITIVE:
            return 0
        if self.answer in NEGATIVE:
            return 1
        return 3

    def __str__(self):
        return self.answer


class Budget:
    """Step counter; exhausting it raises :class:`ResourceError`."""

    def __init__(self, max_steps: Optional[int] = None):
        if max_steps is None:
            env = os.environ.get("DLKIT_MAX_STEPS")
            max_steps = int(env) if env else DEFAULT_MAX_STEPS
        self.max_steps = max_steps
        self.steps = 0

    def tick(self, n: int = 1):
        self.steps += n
        if self.steps > self.max_steps:
            raise ResourceError(f"step budget of {self.max_steps} exhausted")


class _Trace(list):
    def log(self, line: str):
        if len(self) < TRACE_LIMIT:
            self.append(line)
        elif len(self) == TRACE_LIMIT:
            self.append("... (trace truncated)")


def _require(T: TBox, allowed: Sequence[str], what: str):
    d = dialect_of(T)
    if d.u is not None or d.base not in allowed:
        raise DialectError(f"{what} needs a TBox in {'/'.join(allowed)}, got {d}")


_ALC = ("EL", "EL⊔", "EL¬", "ALC")


def _bits_of(mask: int) -> List[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _role_names(table: TypeTable) -> List[str]:
    return sorted({c.role.name for _, c in table.existentials})


def _row_masks(M: np.ndarray) -> List[int]:
    out = []
    for row in M:
        m = 0
        for j in np.nonzero(row)[0]:
            m |= 1 << int(j)
        out.append(m)
    return out


# ---------------------------------------------------------------------------
# witness checking and shrinking


def _valid_pair(T: TBox, relation: str, model: Interpretation, counter: Interpretation) -> bool:
    if len(model) == 0 or len(counter) == 0:
        return False
    if not satisfies(model, T).ok or satisfies(counter, T).ok:
        return False
    return global_related(relation, counter, model).ok


def _shrink_pair(T, relation, model, counter, budget: Budget):
    """Greedy element and edge deletion keeping the pair a valid witness."""
    if len(model) + len(counter) > SHRINK_LIMIT:
        return model, counter
    changed = True
    while changed:
        changed = False
        for side in (1, 0):
            cur = counter if side else model
            for a, b in itertools.combinations(list(cur.domain), 2):
                if a not in cur.index or b not in cur.index or cur.label(a) != cur.label(b):
                    continue
                budget.tick(len(model) + len(counter))
                blocks = [[a, b]] + [[d] for d in cur.domain if d not in (a, b)]
                cand = quotient(cur, blocks)
                pair = (model, cand) if side else (cand, counter)
                if _valid_pair(T, relation, *pair):
                    model, counter = pair
                    cur = cand
                    changed = True
        for side in (1, 0):
            cur = counter if side else model
            for d in list(cur.domain):
                budget.tick(len(model) + len(counter))
                cand = restrict(cur, [x for x in cur.domain if x != d])
                pair = (model, cand) if side else (cand, counter)
                if _valid_pair(T, relation, *pair):
                    model, counter = pair
                    cur = cand
                    changed = True
        for side in (1, 0):
            cur = counter if side else model
            for r in sorted(cur.edges):
                for e in sorted(cur.edges[r]):
                    if e not in cur.edges.get(r, ()):
                        continue
                    budget.tick(len(model) + len(counter))
                    edges = dict(cur.edges)
                    edges[r] = cur.edges[r] - {e}
                    cand = cur.replace(edges=edges)
                    pair = (model, cand) if side else (cand, counter)
                    if _valid_pair(T, relation, *pair):
                        model, counter = pair
                        cur = cand
                        changed = True
    return model, counter


def _all_small(n: int, names: Sequence[str], roles: Sequence[str], cap: int):
    dom = [f"x{i}" for i in range(n)]
    cells = [(a, b) for a in dom for b in dom]
    nl = n * len(names)
    ne = len(cells) * len(roles)
    if 1 << (nl + ne) > cap:
        return None
    out = []
    for code in range(1 << (nl + ne)):
        labels = {d: {a for j, a in enumerate(names) if code >> (i * len(names) + j) & 1} for i, d in enumerate(dom)}
        edges = {
            r: {cells[k] for k in range(len(cells)) if code >> (nl + ri * len(cells) + k) & 1}
            for ri, r in enumerate(roles)
        }
        out.append(Interpretation(dom, labels, edges))
    return out


def _smallest_pair(T, relation, budget: Budget, max_total: int = 4, cap: int = 5000):
    """Exhaustive search for a witness pair with at most ``max_total``
    elements over the signature of T; None when too large or absent."""
    sig = signature_of(T)
    names, roles = sorted(sig.concept_names), sorted(sig.role_names)
    pools = {}
    for n in range(1, max_total):
        got = _all_small(n, names, roles, cap)
        if got is None:
            break
        budget.tick(len(got))
        pools[n] = ([I for I in got if satisfies(I, T).ok], [I for I in got if not satisfies(I, T).ok])
    for total in range(2, max_total + 1):
        for nm in range(1, total):
            nc = total - nm
            if nm not in pools or nc not in pools:
                continue
            for M in pools[nm][0]:
                for C in pools[nc][1]:
                    budget.tick()
                    if global_related(relation, C, M).ok:
                        return M, C
    return None


def _rename(I: Interpretation, prefix: str) -> Interpretation:
    m = {d: f"{prefix}{i}" for i, d in enumerate(I.domain)}
    return Interpretation(
        [m[d] for d in I.domain],
        {m[d]: I.label(d) for d in I.domain},
        {r: {(m[a], m[b]) for a, b in ps} for r, ps in I.edges.items()},
        {a: m[d] for a, d in I.individuals.items()},
        provenance={m[d]: d for d in I.domain},
    )


def _auto_quotient(I: Interpretation, kind: str) -> Interpretation:
    from .games import bisim_classes

    cls = bisim_classes(I, Interpretation([]), kind)[-1]
    blocks: Dict[int, List[str]] = {}
    for d, c in zip(I.domain, cls):
        blocks.setdefault(c, []).append(d)
    return quotient(I, list(blocks.values()))


# ---------------------------------------------------------------------------
# ALCI to ALC


class _PairSystem:
    """Pairs (s, S): ``s`` indexes tp, ``S`` is a bitmask over tpT."""

    def __init__(self, T: TBox, budget: Budget):
        self.T = T
        self.tp = enumerate_types(T, "tp", "ALCI")
        self.tpT = enumerate_types(T, "tpT", "ALCI")
        self.budget = budget
        tp, tpT = self.tp, self.tpT
        self.tps = tp.types
        self.tts = tpT.types
        self.roles = _role_names(tp)
        self.Ltp = {r: _row_masks(tp.leadsto_matrix(Direct(r), self.tps, self.tps)) for r in self.roles}
        self.LT = {r: _row_masks(tp.leadsto_matrix(Direct(r), self.tts, self.tts)) for r in self.roles}
        # existential requirements, split by direction
        self.fwd = {}  # s index -> list of (r, body mask over tp)
        self.bwd = {}
        def body_mask(c, types):
            m = 0
            for i, t in enumerate(types):
                if tp.holds(c, t):
                    m |= 1 << i
            return m

        self._body_tp = {}
        self._body_T = {}
        for i, c in tp.existentials:
            self._body_tp[c] = body_mask(c.arg, self.tps)
            self._body_T[c] = body_mask(c.arg, self.tts)
        for k, s in enumerate(self.tps):
            self.fwd[k] = [(c.role.name, c) for i, c in tp.existentials if s >> i & 1 and not c.role.inverse]
            self.bwd[k] = [(c.role.name, c) for i, c in tp.existentials if s >> i & 1 and c.role.inverse]
        self.tfwd = {}
        for k, t in enumerate(self.tts):
            self.tfwd[k] = [(c.role.name, c) for i, c in tp.existentials if t >> i & 1 and not c.role.inverse]
        tset = set(self.tts)
        self.outside = {k for k, s in enumerate(self.tps) if s not in tset}
        self._pre: Dict[Tuple[str, int], int] = {}

    def pre(self, r: str, S: int) -> int:
        """Types of tpT having a possible r-successor inside S."""
        key = (r, S)
        hit = self._pre.get(key)
        if hit is None:
            hit = 0
            for k, row in enumerate(self.LT[r]):
                if row & S:
                    hit |= 1 << k
            self._pre[key] = hit
        return hit

    def initial(self) -> set:
        groups: Dict[frozenset, int] = {}
        for k, t in enumerate(self.tts):
            a = self.tp.atoms_of(t)
            groups[a] = groups.get(a, 0) | 1 << k
        total = sum((1 << popcount(groups.get(self.tp.atoms_of(s), 0))) - 1 for s in self.tps)
        if total > MAX_PAIRS:
            raise ResourceError(f"{total} initial pairs exceed the cap {MAX_PAIRS}")
        Y = set()
        for si, s in enumerate(self.tps):
            G = groups.get(self.tp.atoms_of(s), 0)
            sub = G
            while sub:
                Y.add((si, sub))
                sub = (sub - 1) & G
        return Y

    def lifted(self, r, p, q) -> bool:
        (s0, S0), (s1, S1) = p, q
        return bool(self.Ltp[r][s0] >> s1 & 1) and S0 & ~self.pre(r, S1) == 0

    def run(self, trace: _Trace) -> set:
        Y = self.initial()
        trace.log(f"initial pairs: {len(Y)}")
        rnd = 0
        while True:
            rnd += 1
            groups: Dict[str, Dict[int, Dict[int, int]]] = {r: {} for r in self.roles}
            by_s: Dict[int, List[int]] = {}
            for s, S in Y:
                by_s.setdefault(s, []).append(S)
                for r in self.roles:
                    g = groups[r].setdefault(s, {})
                    M = self.pre(r, S)
                    g[M] = g.get(M, 0) | S
            dead = []
            for p in sorted(Y):
                self.budget.tick()
                why = self._violation(p, groups, by_s)
                if why:
                    dead.append((p, why))
            if not dead:
                break
            for p, why in dead:
                Y.discard(p)
                trace.log(f"round {rnd}: drop {self.show(p)} by {why}")
        trace.log(f"final pairs: {len(Y)}")
        return Y

    def _violation(self, p, groups, by_s) -> Optional[str]:
        s0, S0 = p
        # r1: forward existential of s0
        for r, c in self.fwd[s0]:
            cand = self.Ltp[r][s0] & self._body_tp[c]
            if not any(S0 & ~M == 0 for s1 in _bits_of(cand) for M in groups[r].get(s1, ())):
                return f"r1 ({render(c)})"
        # r2: inverse existential of s0 (s0 plays s1 there)
        for r, c in self.bwd[s0]:
            ok = False
            P = None
            for sp in _bits_of(self._body_tp[c]):
                if not self.Ltp[r][sp] >> s0 & 1:
                    continue
                if P is None:
                    P = self.pre(r, S0)
                if any(Sp & ~P == 0 for Sp in by_s.get(sp, ())):
                    ok = True
                    break
            if not ok:
                return f"r2 ({render(c)})"
        # r3: forward existentials of members of S0
        for t0 in _bits_of(S0):
            for r, c in self.tfwd[t0]:
                W = self.LT[r][t0] & self._body_T[c]
                ok = any(
                    S0 & ~M == 0 and U & W
                    for s1 in _bits_of(self.Ltp[r][s0])
                    for M, U in groups[r].get(s1, {}).items()
                )
                if not ok:
                    return f"r3 ({render(c)} in t{t0})"
        return None

    def show(self, p) -> str:
        s, S = p
        return f"(s{s}, {{{', '.join(f't{k}' for k in _bits_of(S))}}})"

    # -- witness
    def witness(self, Y: set, root) -> Tuple[Interpretation, Interpretation]:
        order = sorted(Y, key=lambda p: (popcount(p[1]), p))
        chosen = [root]
        seen = {root}
        i = 0

        def pick(pred):
            best = None
            for q in order:
                if pred(q):
                    if q in seen:
                        return q
                    if best is None:
                        best = q
            return best

        while i < len(chosen):
            p = chosen[i]
            i += 1
            s0, S0 = p
            need = []
            for r, c in self.fwd[s0]:
                need.append(lambda q, r=r, c=c: self._body_tp[c] >> q[0] & 1 and self.lifted(r, p, q))
            for r, c in self.bwd[s0]:
                need.append(lambda q, r=r, c=c: self._body_tp[c] >> q[0] & 1 and self.lifted(r, q, p))
            for t0 in _bits_of(S0):
                for r, c in self.tfwd[t0]:
                    W = self.LT[r][t0] & self._body_T[c]
                    need.append(lambda q, r=r, W=W: q[1] & W and self.lifted(r, p, q))
            for pred in need:
                self.budget.tick(len(order))
                q = pick(pred)
                if q is None:  # impossible on a stable set
                    raise AssertionError("stable pair set lacks a witness")
                if q not in seen:
                    seen.add(q)
                    chosen.append(q)
        name = {p: f"p{k}" for k, p in enumerate(chosen)}
        lab = lambda s: self.tp.atoms_of(s)
        J_edges: Dict[str, set] = {r: set() for r in self.roles}
        for r in self.roles:
            for p in chosen:
                for q in chosen:
                    if self.lifted(r, p, q):
                        J_edges[r].add((name[p], name[q]))
        J = Interpretation([name[p] for p in chosen], {name[p]: lab(self.tps[p[0]]) for p in chosen}, J_edges)
        # H: triples plus the canonical model of tpT for inverse witnesses
        trip = [(p, t) for p in chosen for t in _bits_of(p[1])]
        tname = {x: f"{name[x[0]]}.t{x[1]}" for x in trip}
        K = canonical_model(self.tpT, prefix="k")
        dom = [tname[x] for x in trip] + list(K.domain)
        labels = {tname[x]: lab(self.tts[x[1]]) for x in trip}
        labels.update({d: K.label(d) for d in K.domain})
        H_edges: Dict[str, set] = {r: set(K.edges.get(r, ())) for r in self.roles}
        for r in self.roles:
            for (p, t) in trip:
                for (q, t2) in trip:
                    if self.LT[r][t] >> t2 & 1 and (name[p], name[q]) in J_edges[r]:
                        H_edges[r].add((tname[(p, t)], tname[(q, t2)]))
                for k in range(len(self.tts)):
                    if self.LT[r][k] >> t & 1:
                        H_edges[r].add((f"k{k}", tname[(p, t)]))
        H = Interpretation(dom, labels, H_edges)
        return J, H


def alci_to_alc(T: TBox, witness: bool = True, max_steps: Optional[int] = None) -> Verdict:
    """Decide whether an ALCI TBox has an equivalent ALC TBox."""
    _require(T, _ALC + ("ALCI",), "ALCI-to-ALC rewritability")
    trace = _Trace()
    budget = Budget(max_steps)
    try:
        sysm = _PairSystem(T, budget)
        trace.log(f"|tp| = {len(sysm.tps)}, |tpT| = {len(sysm.tts)}")
        Y = sysm.run(trace)
    except ResourceError as e:
        trace.log(f"resource: {e}")
        return Verdict(INCONCLUSIVE, None, trace)
    bad = sorted((p for p in Y if p[0] in sysm.outside), key=lambda p: (popcount(p[1]), p))
    if not bad:
        return Verdict(REWRITABLE, None, trace)
    root = bad[0]
    trace.log(f"violating pair {sysm.show(root)}: s{root[0]} = {sysm.tp.render_type(sysm.tps[root[0]])}")
    if not witness:
        return Verdict(NOT_REWRITABLE, None, trace)
    J, H = sysm.witness(Y, root)
    wit = _finish_bisim_witness(T, J, H, budget, trace)
    wit.tuple = sysm.show(root)
    return Verdict(NOT_REWRITABLE, wit, trace)


def _finish_bisim_witness(T, J, H, budget, trace) -> Witness:
    if satisfies(J, T).ok or not satisfies(H, T).ok:
        raise AssertionError("witness construction failed its model checks")
    if global_related("alc-bisim", J, H).uncovered_left:
        raise AssertionError("witness elements lack bisimilar partners")
    J = _auto_quotient(J, "alci-bisim")
    H = _auto_quotient(H, "alci-bisim")
    # the violating side absorbs the model so the relation becomes global
    if not global_related("alc-bisim", J, H).ok:
        J = disjoint_union([J, H])
    try:
        H, J = _shrink_pair(T, "alc-bisim", H, J, budget)
        if len(H) + len(J) > 2:
            small = _smallest_pair(T, "alc-bisim", budget, min(4, len(H) + len(J) - 1))
            if small is not None:
                H, J = small
    except ResourceError:
        trace.log("witness shrinking stopped by the step budget")
    H, J = _rename(H, "e"), _rename(J, "d")
    if not _valid_pair(T, "alc-bisim", H, J):
        raise AssertionError("witness failed verification")
    trace.log(f"witness verified: model {len(H)} elements, countermodel {len(J)} elements")
    return Witness("alc-bisim", H, J)


# ---------------------------------------------------------------------------
# invariance under global equi-simulation


def _cross(src: TypeTable, dst: TypeTable, r: str) -> np.ndarray:
    """M[i, j]: src type i ~>_r dst type j (forward clause only, ALC)."""
    idx = [(i, c) for i, c in src.existentials if c.role == Direct(r)]
    neg = np.array([[0 if t >> i & 1 else 1 for i, _ in idx] for t in src.types], dtype=np.int32).reshape(len(src.types), len(idx))
    body = np.array([[1 if dst.holds(c.arg, t) else 0 for _, c in idx] for t in dst.types], dtype=np.int32).reshape(len(dst.types), len(idx))
    return (neg @ body.T) == 0


def _pos_s(k: int) -> int:
    return 1 + 2 * k


def _pos_t(k: int) -> int:
    return 2 + 2 * k


@dataclass(frozen=True)
class _Rule:
    name: str
    trigger: int  # position holding the existential
    target: Tuple[int, int]  # (l', m')
    edges: Tuple[Tuple[int, int], ...]  # (source position, target position)
    filt: int  # target position that must contain the body


def _rules(l: int, m: int) -> List[_Rule]:
    mm = max(m - 1, 0)
    out = []
    if m > 0:
        e = [(_pos_t(0), _pos_t(0))]
        e += [(_pos_t(k), _pos_t(k + 1)) for k in range(l + 1)]
        e += [(_pos_s(k), _pos_s(k + 1)) for k in range(l + 1)]
        out.append(_Rule("RULE 1", _pos_t(0), (l + 1, m - 1), tuple(e), _pos_t(0)))
    same = [(_pos_t(k), _pos_t(k)) for k in range(l + 1)] + [(_pos_s(k), _pos_s(k)) for k in range(l + 1)]
    out.append(_Rule("RULE 2", _pos_s(0), (l, mm), tuple([(_pos_s(0), 0)] + same), 0))
    out.append(_Rule("RULE 3", 0, (l, mm), tuple([(0, 0)] + same), 0))
    for i in range(1, l + 1):
        if m > 0:
            e = [(_pos_t(i), _pos_t(0))]
            e += [(_pos_t(h), _pos_t(h - i + 1)) for h in range(i, l + 1)]
            e += [(_pos_s(h), _pos_s(h - i + 1)) for h in range(i, l + 1)]
            out.append(_Rule(f"RULE 4[{i}]", _pos_t(i), (l - i + 1, m - 1), tuple(e), _pos_t(0)))
        e = [(_pos_s(i), 0)]
        e += [(_pos_t(h), _pos_t(h - i)) for h in range(i, l + 1)]
        e += [(_pos_s(h), _pos_s(h - i)) for h in range(i, l + 1)]
        out.append(_Rule(f"RULE 5[{i}]", _pos_s(i), (l - i, mm), tuple(e), 0))
    return out


class _TupleSystem:
    def __init__(self, T: TBox, budget: Budget):
        self.T = T
        self.budget = budget
        self.R = rank(T)
        self.S = enumerate_types(T, "tpT", "ALC")
        self.P = [enumerate_types(T, "tpk", "ALC", k=m) for m in range(self.R + 1)]
        self.roles = sorted({c.role.name for _, c in self.S.existentials})
        self.fams = [(l, m) for m in range(self.R + 1) for l in range(self.R + 1 - m)]
        self._cross: Dict[tuple, np.ndarray] = {}
        cells = 0
        for l, m in self.fams:
            cells += len(self.S.types) ** (l + 2) * len(self.P[m].types) ** (l + 1)
        if cells > MAX_TUPLE_CELLS:
            raise ResourceError(f"tuple families need {cells} cells (cap {MAX_TUPLE_CELLS})")

    def space(self, fam, pos) -> TypeTable:
        return self.S if pos == 0 or pos % 2 == 1 else self.P[fam[1]]

    def cross(self, a: TypeTable, b: TypeTable, r: str) -> np.ndarray:
        key = (id(a), id(b), r)
        hit = self._cross.get(key)
        if hit is None:
            hit = self._cross[key] = _cross(a, b, r)
        return hit

    def shape(self, fam):
        l, m = fam
        return tuple([len(self.S.types)] + [len(self.S.types), len(self.P[m].types)] * (l + 1))

    @staticmethod
    def _atoms_matrix(A: TypeTable, B: TypeTable, rel) -> np.ndarray:
        return np.array([[rel(A.atoms_of(a), B.atoms_of(b)) for b in B.types] for a in A.types], dtype=bool).reshape(
            len(A.types), len(B.types)
        )

    @staticmethod
    def _apply_pair(Y, i, j, M):
        shape = [1] * Y.ndim
        shape[i] = M.shape[0]
        shape[j] = M.shape[1]
        Y &= M.reshape(shape)

    def initial(self) -> Dict[tuple, np.ndarray]:
        Y = {}
        S = self.S
        sub = lambda a, b: a <= b
        eq = lambda a, b: a == b
        for fam in self.fams:
            l, m = fam
            P = self.P[m]
            arr = np.ones(self.shape(fam), dtype=bool)
            self._apply_pair(arr, 0, _pos_s(0), self._atoms_matrix(S, S, sub))
            for k in range(l + 1):
                self._apply_pair(arr, _pos_s(k), _pos_t(k), self._atoms_matrix(S, P, eq))
            for k in range(l):
                self._apply_pair(arr, _pos_t(k), _pos_t(k + 1), self._atoms_matrix(P, P, sub))
            Y[fam] = arr
        return Y

    def triggers(self, fam, rule: _Rule):
        """(role, concept, trigger vector over the trigger space)."""
        tab = self.space(fam, rule.trigger)
        out = []
        for i, c in tab.existentials:
            vec = np.array([bool(t >> i & 1) for t in tab.types], dtype=bool)
            if vec.any():
                out.append((c.role.name, c, vec))
        return out

    def _operands(self, fam, rule: _Rule, r: str, c):
        tfam = rule.target
        ops = []
        for sp, tp_ in rule.edges:
            M = self.cross(self.space(fam, sp), self.space(tfam, tp_), r)
            if tp_ == rule.filt:
                M = M & self._body(tfam, tp_, c)[None, :]
            ops.append((sp, tp_, M))
        return ops

    def _body(self, tfam, pos, c) -> np.ndarray:
        tab = self.space(tfam, pos)
        return np.array([tab.holds(c.arg, t) for t in tab.types], dtype=bool)

    def supported(self, Y, fam, rule: _Rule, r, c, rows=None, cache=None) -> np.ndarray:
        """Boolean array over the source family: a witness tuple exists.

        ``rows`` restricts the trigger axis to the given indices (the result
        then has that many entries along it)."""
        tfam = rule.target
        letters = string.ascii_letters
        n_t = Y[tfam].ndim
        tl = letters[:n_t]
        sl = {}
        if cache is not None and tfam in cache:
            target = cache[tfam]
        else:
            target = Y[tfam].astype(np.float32)
            if cache is not None:
                cache[tfam] = target
        ops = [target]
        subs = [tl]
        for sp, tp_, M in self._operands(fam, rule, r, c):
            if sp not in sl:
                sl[sp] = letters[n_t + len(sl)]
            if rows is not None and sp == rule.trigger:
                M = M[rows]
            ops.append(M.astype(np.float32))
            subs.append(sl[sp] + tl[tp_])
        outp = sorted(sl)
        expr = ",".join(subs) + "->" + "".join(sl[p] for p in outp)
        self.budget.tick(max(1, Y[tfam].size // 1000))
        res = np.einsum(expr, *ops, optimize="greedy") > 0.5
        shape = [1] * Y[fam].ndim
        for p in outp:
            shape[p] = len(rows) if (rows is not None and p == rule.trigger) else Y[fam].shape[p]
        return res.reshape(shape)

    def run(self, trace: _Trace) -> Dict[tuple, np.ndarray]:
        Y = self.initial()
        for fam in self.fams:
            trace.log(f"family l={fam[0]} m={fam[1]}: {int(Y[fam].sum())} initial tuples")
        rnd = 0
        changed = set(self.fams)
        while True:
            rnd += 1
            dead = {}
            cache = {}
            for fam in self.fams:
                for rule in _rules(*fam):
                    # support only shrinks when the target family lost tuples
                    if rule.target not in changed:
                        continue
                    for r, c, vec in self.triggers(fam, rule):
                        rows = np.nonzero(vec)[0]
                        trig = np.take(Y[fam], rows, axis=rule.trigger)
                        if not trig.any():
                            continue
                        bad = trig & ~self.supported(Y, fam, rule, r, c, rows, cache)
                        n = int(bad.sum())
                        if n:
                            trace.log(f"round {rnd}: {rule.name} on {render(c)} drops {n} tuples from l={fam[0]} m={fam[1]}")
                            full = dead.get(fam)
                            if full is None:
                                full = dead[fam] = np.zeros_like(Y[fam])
                            idx = [slice(None)] * full.ndim
                            idx[rule.trigger] = rows
                            full[tuple(idx)] |= bad
            if not dead:
                break
            for fam, bad in dead.items():
                Y[fam] &= ~bad
            changed = set(dead)
        for fam in self.fams:
            trace.log(f"family l={fam[0]} m={fam[1]}: {int(Y[fam].sum())} final tuples")
        return Y

    def violators(self, Y):
        out = []
        for k in range(self.R + 1):
            P = self.P[k]
            proj = {self.S.project(t, P) for t in self.S.types}
            arr = Y[(0, k)]
            for si in range(len(self.S.types)):
                for ti, t in enumerate(P.types):
                    if t not in proj and arr[si, si, ti]:
                        out.append((k, si, ti))
        return out

    def show(self, fam, idx) -> str:
        l, m = fam
        parts = [f"s=S{idx[0]}"]
        for k in range(l + 1):
            parts.append(f"s{k}=S{idx[_pos_s(k)]}")
            parts.append(f"t{k}=P{m}.{idx[_pos_t(k)]}")
        return "(" + ", ".join(parts) + ")"

    def witness(self, Y, root_fam, root_idx) -> Tuple[Interpretation, Interpretation]:
        tuples = [(root_fam, root_idx)]
        ids = {tuples[0]: 0}
        conns = []  # (role, source id, target id, edges)
        i = 0
        while i < len(tuples):
            fam, idx = tuples[i]
            i += 1
            for rule in _rules(*fam):
                tab = self.space(fam, rule.trigger)
                t = tab.types[idx[rule.trigger]]
                for k, c in tab.existentials:
                    if not t >> k & 1:
                        continue
                    r = c.role.name
                    self.budget.tick(Y[rule.target].size // 1000 + 1)
                    mask = Y[rule.target].copy()
                    for sp, tp_, M in self._operands(fam, rule, r, c):
                        shape = [1] * mask.ndim
                        shape[tp_] = M.shape[1]
                        mask &= M[idx[sp]].reshape(shape)
                    hits = np.argwhere(mask)
                    if not len(hits):
                        raise AssertionError("stable tuple set lacks a witness")
                    key = (rule.target, tuple(int(x) for x in hits[0]))
                    if key not in ids:
                        ids[key] = len(tuples)
                        tuples.append(key)
                    conns.append((r, ids[(fam, idx)], ids[key], rule.edges))
        name = lambda tid, pos: f"x{tid}.{pos}"
        dom, labels = [], {}
        for tid, (fam, idx) in enumerate(tuples):
            for pos in range(len(idx)):
                tab = self.space(fam, pos)
                dom.append(name(tid, pos))
                labels[name(tid, pos)] = tab.atoms_of(tab.types[idx[pos]])
        edges: Dict[str, set] = {}
        for r, a, b, es in conns:
            for sp, tp_ in es:
                edges.setdefault(r, set()).add((name(a, sp), name(b, tp_)))
        J = Interpretation(dom, labels, edges)
        H = restrict(J, [d for d in dom if int(d.split(".")[1]) % 2 == 1 or d.endswith(".0")])
        return J, H


def equisim_invariant(T: TBox, witness: bool = True, max_steps: Optional[int] = None) -> Verdict:
    """Decide invariance of an ALC TBox under global equi-simulation."""
    _require(T, _ALC, "equi-simulation invariance")
    trace = _Trace()
    budget = Budget(max_steps)
    try:
        sysm = _TupleSystem(T, budget)
        trace.log(f"rank {sysm.R}, |tpT| = {len(sysm.S.types)}, |tp^k| = {[len(p.types) for p in sysm.P]}")
        trace.log("RULE 1 target read with all components fresh: C in t0', t0 ~> t0', t0 ~> t1', s0 ~> s1'")
        Y = sysm.run(trace)
    except ResourceError as e:
        trace.log(f"resource: {e}")
        return Verdict(INCONCLUSIVE, None, trace)
    bad = sysm.violators(Y)
    if not bad:
        return Verdict(INVARIANT, None, trace)
    k, si, ti = bad[0]
    fam, idx = (0, k), (si, si, ti)
    trace.log(f"violating tuple {sysm.show(fam, idx)} with t in tp^{k} outside tpT")
    if not witness:
        return Verdict(NOT_INVARIANT, None, trace)
    J, H = sysm.witness(Y, fam, idx)
    if satisfies(J, T).ok or not satisfies(H, T).ok or not global_related("equi-sim", J, H).ok:
        raise AssertionError("equi-simulation witness failed verification")
    J = _auto_quotient(J, "alc-bisim")
    H = _auto_quotient(H, "alc-bisim")
    try:
        H, J = _shrink_pair(T, "equi-sim", H, J, budget)
    except ResourceError:
        trace.log("witness shrinking stopped by the step budget")
    H, J = _rename(H, "e"), _rename(J, "d")
    if not _valid_pair(T, "equi-sim", H, J):
        raise AssertionError("equi-simulation witness failed verification")
    trace.log(f"witness verified: model {len(H)} elements, countermodel {len(J)} elements")
    return Verdict(NOT_INVARIANT, Witness("equi-sim", H, J, tuple=sysm.show(fam, idx)), trace)


# ---------------------------------------------------------------------------
# preservation under direct products


@dataclass
class _Rep:
    tau: int  # index into tpT
    kids: Dict[str, Tuple[int, ...]]  # role -> representatives one level down
    prof: Dict[str, int]  # role -> OR of the children's profiles


class _ProductSearch:
    def __init__(self, T: TBox, budget: Budget, prune: bool = True):
        self.T = T
        self.budget = budget
        self.prune = prune
        self.S = enumerate_types(T, "tpT", "ALC")
        self.R = rank(T)
        S = self.S
        self.roles = sorted({c.role.name for _, c in S.existentials})
        self.names_mask = 0
        for i, c in enumerate(S.base):
            if isinstance(c, Name):
                self.names_mask |= 1 << i
        self.ands = sorted(
            [(i, c) for i, c in enumerate(S.base) if isinstance(c, And)], key=lambda ic: len(render(ic[1]))
        )
        self.lead = {r: S.leadsto_matrix(Direct(r)) for r in self.roles}
        self.axioms = [(to_core(l), to_core(r)) for l, r in T.axioms]
        self.levels: List[List[_Rep]] = []
        self.pi: List[List[List[int]]] = []

    def _complete(self, bitsv: int, h: int) -> int:
        pos = self.S.pos
        for i, c in self.ands:
            if rank(c) <= h and _eval_core(c, pos, bitsv, {}):
                bitsv |= 1 << i
        return bitsv

    def _ex(self, h: int, r: str):
        return [(i, c) for i, c in self.S.existentials if c.role.name == r and rank(c) <= h]

    def build(self, trace: _Trace):
        S = self.S
        reps0 = [_Rep(k, {}, {}) for k in range(len(S.types))]
        self.levels = [reps0]
        pi0 = [[self._complete(S.types[a.tau] & S.types[b.tau] & self.names_mask, 0) for b in reps0] for a in reps0]
        self.pi = [pi0]
        trace.log(f"height 0: {len(reps0)} representatives")
        for h in range(1, self.R + 1):
            self._level(h, trace)

    def _level(self, h: int, trace: _Trace):
        S = self.S
        low = self.levels[-1]
        pil = self.pi[-1]
        n = len(low)
        ex = {r: self._ex(h, r) for r in self.roles}
        # child profile of a: bit (b * |ex_r| + j) when body j holds in pi(a, b)
        Q = {r: [] for r in self.roles}
        for r in self.roles:
            w = len(ex[r])
            for a in range(n):
                q = 0
                for b in range(n):
                    t = pil[a][b]
                    for j, (_, c) in enumerate(ex[r]):
                        if S.holds(c.arg, t):
                            q |= 1 << (b * w + j)
                Q[r].append(q)
        reps: List[_Rep] = []
        for k, tau in enumerate(S.types):
            req = [(c.role.name, c) for i, c in S.existentials if tau >> i & 1]
            full = (1 << len(req)) - 1
            opts = []
            for r in self.roles:
                for a, rep in enumerate(low):
                    if self.lead[r][k, rep.tau]:
                        cov = 0
                        for j, (rr, c) in enumerate(req):
                            if rr == r and S.holds(c.arg, S.types[rep.tau]):
                                cov |= 1 << j
                        opts.append((r, a, cov))
            ri = {r: i for i, r in enumerate(self.roles)}
            start = (0, tuple(0 for _ in self.roles)) if self.prune else (0, frozenset())
            states = {start: ()}
            todo = deque([start])
            while todo:
                st = todo.popleft()
                cov, key = st
                chosen = states[st]
                for o, (r, a, c) in enumerate(opts):
                    if chosen and o <= chosen[-1] and not self.prune:
                        continue
                    self.budget.tick()
                    if self.prune:
                        prof = list(key)
                        prof[ri[r]] |= Q[r][a]
                        nst = (cov | c, tuple(prof))
                    else:
                        nst = (cov | c, key | {(r, a)})
                    if nst not in states:
                        states[nst] = chosen + (o,)
                        todo.append(nst)
            for (cov, key), chosen in states.items():
                if cov != full:
                    continue
                kids = {r: tuple(a for o in chosen for rr, a, _ in [opts[o]] if rr == r) for r in self.roles}
                if self.prune:
                    prof = {r: key[ri[r]] for r in self.roles}
                else:
                    prof = {r: 0 for r in self.roles}
                    for r in self.roles:
                        for a in kids[r]:
                            prof[r] |= Q[r][a]
                reps.append(_Rep(k, kids, prof))
        # product types at height h
        pih = []
        colmask = {}
        for r in self.roles:
            w = len(ex[r])
            for j in range(w):
                m = 0
                for b in range(n):
                    m |= 1 << (b * w + j)
                colmask[(r, j)] = m
        blocks = []
        for Yr in reps:
            bm = {}
            for r in self.roles:
                w = len(ex[r])
                m = 0
                for b in Yr.kids[r]:
                    m |= ((1 << w) - 1) << (b * w)
                bm[r] = m
            blocks.append(bm)
        for X in reps:
            row = []
            for yi, Yr in enumerate(reps):
                self.budget.tick()
                t = S.types[X.tau] & S.types[Yr.tau] & self.names_mask
                for r in self.roles:
                    hit = X.prof[r] & blocks[yi][r]
                    if not hit:
                        continue
                    for j, (i, _) in enumerate(ex[r]):
                        if hit & colmask[(r, j)]:
                            t |= 1 << i
                row.append(self._complete(t, h))
            pih.append(row)
        self.levels.append(reps)
        self.pi.append(pih)
        trace.log(f"height {h}: {len(reps)} representatives")

    def violates(self, t: int) -> Optional[int]:
        for k, (l, r) in enumerate(self.axioms):
            if self.S.holds(l, t) and not self.S.holds(r, t):
                return k
        return None

    def find(self):
        top = self.pi[-1]
        for x in range(len(top)):
            for y in range(len(top)):
                k = self.violates(top[x][y])
                if k is not None:
                    return x, y, k
        return None

    # -- witness trees
    def tree(self, x: int, prefix: str):
        """Materialise the representative tree; returns (domain, labels,
        edges, type map, root)."""
        S = self.S
        dom, labels, edges, tmap = [], {}, {}, {}
        counter = itertools.count()

        def build(h, rep_i):
            d = f"{prefix}{next(counter)}"
            rep = self.levels[h][rep_i]
            dom.append(d)
            labels[d] = S.atoms_of(S.types[rep.tau])
            tmap[d] = rep.tau
            for r in self.roles:
                for a in rep.kids.get(r, ()):
                    e = build(h - 1, a)
                    edges.setdefault(r, set()).add((d, e))
            return d

        root = build(self.R, x)
        return dom, labels, edges, tmap, root

    def continued(self, x: int, prefix: str) -> Tuple[Interpretation, str, Interpretation]:
        """The truncated tree and its continuation to a model of T."""
        S = self.S
        dom, labels, edges, tmap, root = self.tree(x, prefix)
        tree = Interpretation(dom, labels, edges)
        if not is_potential_tree_model(tree, root, tmap, S, self.R):
            raise AssertionError("representative tree is not a potential tree model")
        depth = _depths(tree, root)
        K = canonical_model(S, prefix=prefix + "k")
        dom2 = list(dom) + list(K.domain)
        labels2 = dict(labels)
        labels2.update({d: K.label(d) for d in K.domain})
        edges2 = {r: set(ps) for r, ps in edges.items()}
        for r, ps in K.edges.items():
            edges2.setdefault(r, set()).update(ps)
        for d in dom:
            if depth[d] == self.R and any(S.types[tmap[d]] >> i & 1 for i, _ in S.existentials):
                k = tmap[d]
                for r in self.roles:
                    for j in np.nonzero(self.lead[r][k])[0]:
                        edges2.setdefault(r, set()).add((d, f"{prefix}k{int(j)}"))
        full = Interpretation(dom2, labels2, edges2)
        from .model import forward_reachable

        full = restrict(full, forward_reachable(full, [root]))
        return tree, root, full


def _depths(I: Interpretation, root: str) -> Dict[str, int]:
    depth = {root: 0}
    todo = deque([root])
    while todo:
        d = todo.popleft()
        for ps in I.edges.values():
            for a, b in ps:
                if a == d and b not in depth:
                    depth[b] = depth[d] + 1
                    todo.append(b)
    return depth


def is_potential_tree_model(I: Interpretation, root: str, tmap: Dict[str, int], S: TypeTable, depth: int) -> bool:
    """The three conditions on a type-labelled tree of the given depth:
    labels agree with the types, existentials below the last level are
    witnessed, and every edge follows the possible-successor relation."""
    dep = _depths(I, root)
    if set(dep) != set(I.domain) or max(dep.values()) > depth:
        return False
    for d in I.domain:
        t = S.types[tmap[d]]
        if I.label(d) & S.atoms_of(t) != S.atoms_of(t) or I.label(d) - S.atoms_of(t):
            return False
    for r, ps in I.edges.items():
        for a, b in ps:
            if not S.leadsto(S.types[tmap[a]], Direct(r), S.types[tmap[b]]):
                return False
    for d in I.domain:
        if dep[d] >= depth:
            continue
        t = S.types[tmap[d]]
        for i, c in S.existentials:
            if t >> i & 1:
                kids = I.successors(d, c.role)
                if not any(S.holds(c.arg, S.types[tmap[e]]) for e in kids):
                    return False
    return True


def product_preserved(
    T: TBox, witness: bool = True, max_steps: Optional[int] = None, prune: bool = True
) -> Verdict:
    """Decide preservation of an ALC TBox under direct products by searching
    pairs of potential tree models of depth rank T."""
    _require(T, _ALC, "product preservation")
    trace = _Trace()
    budget = Budget(max_steps)
    try:
        search = _ProductSearch(T, budget, prune)
        trace.log(f"rank {search.R}, |tpT| = {len(search.S.types)}, pruning {'on' if prune else 'off'}")
        search.build(trace)
        hit = search.find()
    except ResourceError as e:
        trace.log(f"resource: {e}")
        return Verdict(INCONCLUSIVE, None, trace)
    if hit is None:
        trace.log("no pair of potential tree models violates T at the product root")
        return Verdict(PRESERVED, None, trace)
    x, y, k = hit
    trace.log(f"representatives {x} and {y} violate axiom {k} at the product root")
    if not witness:
        return Verdict(NOT_PRESERVED, None, trace)
    _, ra, A = search.continued(x, "a")
    _, rb, B = search.continued(y, "b")
    P = direct_product([A, B])
    root = f"({ra},{rb})"
    if not satisfies(A, T).ok or not satisfies(B, T).ok or satisfies(P, T).ok:
        raise AssertionError("product witness failed verification")
    trace.log(f"witness verified: factors {len(A)} and {len(B)} elements, product violates T at {root}")
    return Verdict(NOT_PRESERVED, Witness("product", A, P, factors=(A, B), point=root), trace)


# ---------------------------------------------------------------------------
# ALC to EL


def alc_to_el(T: TBox, witness: bool = True, max_steps: Optional[int] = None) -> Verdict:
    """An ALC TBox is EL-rewritable iff it is invariant under global
    equi-simulation and preserved under direct products."""
    _require(T, _ALC, "ALC-to-EL rewritability")
    e = equisim_invariant(T, witness, max_steps)
    trace = [f"equi-simulation: {e.answer}"] + ["  " + x for x in e.trace]
    if e.answer == NOT_INVARIANT:
        return Verdict(NOT_REWRITABLE, e.witness, trace)
    p = product_preserved(T, witness, max_steps)
    trace += [f"products: {p.answer}"] + ["  " + x for x in p.trace]
    if p.answer == NOT_PRESERVED:
        return Verdict(NOT_REWRITABLE, p.witness, trace)
    if INCONCLUSIVE in (e.answer, p.answer):
        return Verdict(INCONCLUSIVE, None, trace)
    return Verdict(REWRITABLE, None, trace)
