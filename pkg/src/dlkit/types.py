"""Closure-relative types, type elimination and the possible-successor
relation.

A type is stored as an int bitmask over the ordered positive closure
members; the negative half of the closure is implied.  Only names and
existentials are free choices, conjunction members follow by evaluation.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import DialectError, ResourceError
from .model import Interpretation
from .syntax import (
    And,
    Bot,
    Concept,
    Exists,
    Name,
    Not,
    Role,
    TBox,
    Top,
    clos_positive,
    conj,
    dialect_of,
    rank,
    render,
    to_core,
)

MODES = ("tp", "tpT", "tpk")
DEFAULT_MAX_ATOMS = 22


def inverse_of(role: Role) -> Role:
    return Role("direct" if role.inverse else "inverse", role.name)


class TypeTable:
    """Types over an ordered positive closure.

    ``base`` lists the positive closure members; ``types`` the surviving
    types as bitmasks over ``base`` in ascending order."""

    def __init__(self, base: List[Concept], types: List[int], mode: str, dialect: str, tbox: Optional[TBox] = None, k: Optional[int] = None):
        self.base = base
        self.pos = {c: i for i, c in enumerate(base)}
        self.types = sorted(types)
        self.mode = mode
        self.dialect = dialect
        self.tbox = tbox
        self.k = k
        self.existentials = [(i, c) for i, c in enumerate(base) if isinstance(c, Exists)]
        self.roles = sorted({c.role for _, c in self.existentials})
        self._leads: Dict[Role, np.ndarray] = {}

    def __len__(self):
        return len(self.types)

    def __iter__(self):
        return iter(self.types)

    def __contains__(self, t):
        return t in set(self.types)

    def holds(self, c: Concept, t: int) -> bool:
        """Membership of a core concept (or its negation) in type ``t``."""
        if isinstance(c, Top):
            return True
        if isinstance(c, Bot):
            return False
        if isinstance(c, Not):
            return not self.holds(c.arg, t)
        i = self.pos.get(c)
        if i is not None:
            return bool(t >> i & 1)
        if isinstance(c, And):
            return all(self.holds(a, t) for a in c.args)
        raise KeyError(f"{render(c)} is not in the closure")

    def members(self, t: int) -> List[Concept]:
        """The type as a list of closure members (positive or negated)."""
        return [c if t >> i & 1 else Not(c) for i, c in enumerate(self.base)]

    def render_type(self, t: int) -> str:
        ms = self.members(t)
        if not ms:
            return "top"
        return render(conj(ms)) if len(ms) > 1 else render(ms[0])

    def atoms_of(self, t: int) -> frozenset:
        return frozenset(c.name for i, c in enumerate(self.base) if isinstance(c, Name) and t >> i & 1)

    def leadsto_matrix(self, role: Role, src: Optional[Sequence[int]] = None, dst: Optional[Sequence[int]] = None) -> np.ndarray:
        """Boolean matrix M[i, j] = src[i] ~>_role dst[j]."""
        src = self.types if src is None else src
        dst = self.types if dst is None else dst
        return leadsto_matrix(self, role, src, dst)

    def leadsto(self, t: int, role: Role, t2: int) -> bool:
        return leadsto(self, t, role, t2)

    def project(self, t: int, other: "TypeTable") -> int:
        """Restrict a type to the closure of ``other`` (a sub-closure)."""
        out = 0
        for i, c in enumerate(other.base):
            j = self.pos[c]
            if t >> j & 1:
                out |= 1 << i
        return out


def _eval_core(c: Concept, pos: Dict[Concept, int], t: int, memo: dict) -> bool:
    if isinstance(c, Top):
        return True
    if isinstance(c, Bot):
        return False
    if isinstance(c, Not):
        return not _eval_core(c.arg, pos, t, memo)
    if isinstance(c, (Name, Exists)):
        return bool(t >> pos[c] & 1)
    if isinstance(c, And):
        return all(_eval_core(a, pos, t, memo) for a in c.args)
    raise TypeError(c)


def _condition_vectors(table: TypeTable, role: Role, types: Sequence[int]):
    """neg[i, j]: existential j over ``role`` absent in type i;
    body[i, j]: body of existential j holds in type i."""
    idx = [(i, c) for i, c in table.existentials if c.role == role]
    neg = np.zeros((len(types), len(idx)), dtype=np.int32)
    body = np.zeros((len(types), len(idx)), dtype=np.int32)
    for a, t in enumerate(types):
        for b, (i, c) in enumerate(idx):
            neg[a, b] = 0 if t >> i & 1 else 1
            body[a, b] = 1 if table.holds(c.arg, t) else 0
    return neg, body


def leadsto_matrix(table: TypeTable, role: Role, src: Sequence[int], dst: Sequence[int]) -> np.ndarray:
    n_s, n_d = len(src), len(dst)
    ok = np.ones((n_s, n_d), dtype=bool)
    neg_s, _ = _condition_vectors(table, role, src)
    _, body_d = _condition_vectors(table, role, dst)
    if neg_s.shape[1]:
        ok &= (neg_s @ body_d.T) == 0
    if table.dialect == "ALCI" or role.inverse:
        inv = inverse_of(role)
        _, body_s = _condition_vectors(table, inv, src)
        neg_d, _ = _condition_vectors(table, inv, dst)
        if neg_d.shape[1]:
            ok &= (body_s @ neg_d.T) == 0
    return ok


def leadsto(table: TypeTable, t: int, role: Role, t2: int) -> bool:
    """t ~>_role t2: no absent existential of t over role has its body in
    t2, and (for inverse-aware closures) symmetrically for t2."""
    for i, c in table.existentials:
        if c.role == role and not t >> i & 1 and table.holds(c.arg, t2):
            return False
        if c.role == inverse_of(role) and not t2 >> i & 1 and table.holds(c.arg, t):
            return False
    return True


def leadsto_pairs(table: TypeTable, s0: int, S0: Iterable[int], role: Role, s1: int, S1: Iterable[int]) -> bool:
    """Lifted relation on pairs (s, S): s0 ~> s1 and every t0 in S0 has a
    possible successor in S1."""
    if not leadsto(table, s0, role, s1):
        return False
    S1 = list(S1)
    return all(any(leadsto(table, t0, role, t1) for t1 in S1) for t0 in S0)


def _roles_of(base) -> List[Role]:
    return sorted({c.role for c in base if isinstance(c, Exists)})


def _check_dialect(T_items, dialect):
    for x in T_items:
        d = dialect_of(x)
        if d.u is not None or d.base not in ("EL", "EL⊔", "EL¬", "ALC", "ALCI"):
            raise DialectError(f"types are defined for ALC/ALCI only, got {d}")
        if dialect == "ALC" and d.base == "ALCI":
            raise DialectError("inverse roles need the ALCI dialect")


def eliminate(table: TypeTable, types: List[int]) -> List[int]:
    """Drop types whose existentials lack a surviving possible successor."""
    roles = _roles_of(table.base)
    alive = np.ones(len(types), dtype=bool)
    mats = {r: leadsto_matrix(table, r, types, types) for r in roles}
    # need[r][a, b]: type a contains existential b over r
    needs = []
    for r in roles:
        idx = [(i, c) for i, c in table.existentials if c.role == r]
        has = np.array([[bool(t >> i & 1) for i, _ in idx] for t in types], dtype=bool).reshape(len(types), len(idx))
        body = np.array([[table.holds(c.arg, t) for _, c in idx] for t in types], dtype=bool).reshape(len(types), len(idx))
        needs.append((mats[r], has, body))
    while True:
        changed = False
        for M, has, body in needs:
            if not has.shape[1]:
                continue
            # witness[a, b]: some alive t' with a ~> t' and body b in t'
            reach = M & alive[None, :]
            witness = (reach.astype(np.int32) @ body.astype(np.int32)) > 0
            bad = (has & ~witness).any(axis=1) & alive
            if bad.any():
                alive &= ~bad
                changed = True
        if not changed:
            break
    return [t for t, a in zip(types, alive) if a]


def _all_assignments(base: List[Concept], max_atoms: int) -> List[int]:
    pos = {c: i for i, c in enumerate(base)}
    atoms = [i for i, c in enumerate(base) if isinstance(c, (Name, Exists))]
    ands = [(i, c) for i, c in enumerate(base) if isinstance(c, And)]
    if len(atoms) > max_atoms:
        raise ResourceError(f"{len(atoms)} closure atoms exceed the cap {max_atoms}")
    # conjunctions in an order where parts come first
    ands.sort(key=lambda ic: len(render(ic[1])))
    out = []
    for bitsv in itertools.product((0, 1), repeat=len(atoms)):
        t = 0
        for b, i in zip(bitsv, atoms):
            if b:
                t |= 1 << i
        for i, c in ands:
            if _eval_core(c, pos, t, {}):
                t |= 1 << i
        out.append(t)
    return out


def _axiom_ok(table: TypeTable, T: TBox, t: int) -> bool:
    for lhs, rhs in T.axioms:
        if table.holds(to_core(lhs), t) and not table.holds(to_core(rhs), t):
            return False
    return True


def enumerate_types(
    T: TBox,
    mode: str = "tp",
    dialect: str = "ALCI",
    k: Optional[int] = None,
    extra: Sequence[Concept] = (),
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> TypeTable:
    """Surviving types for ``T`` in the given mode.

    ``tpk`` uses the rank-<=k part of the closure (maximal satisfiable
    subsets of it); ``extra`` concepts are added to the closure."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    _check_dialect([T, *extra], dialect)
    base = clos_positive([T, *extra])
    if mode == "tpk":
        if k is None:
            raise ValueError("tpk needs k")
        base = [c for c in base if rank(c) <= k]
    table = TypeTable(base, [], mode, dialect, T, k)
    cands = _all_assignments(base, max_atoms)
    if mode == "tpT":
        cands = [t for t in cands if _axiom_ok(table, T, t)]
    table.types = sorted(eliminate(table, cands))
    return table


def canonical_model(table: TypeTable, types: Optional[Sequence[int]] = None, prefix: str = "t") -> Interpretation:
    """Elements are the types, r-edges follow the possible-successor
    relation, labels are the names in each type."""
    types = list(table.types if types is None else types)
    dom = [f"{prefix}{i}" for i in range(len(types))]
    labels = {dom[i]: table.atoms_of(t) for i, t in enumerate(types)}
    edges = {}
    for r in sorted({c.role.name for _, c in table.existentials}):
        M = table.leadsto_matrix(Role("direct", r), types, types)
        edges[r] = {(dom[i], dom[j]) for i, j in zip(*np.nonzero(M))}
    return Interpretation(dom, labels, edges)


def concept_sat(C: Concept, T: Optional[TBox] = None, dialect: str = "ALCI") -> bool:
    """Satisfiability of C (with respect to T when given) by elimination."""
    tb = T if T is not None else TBox(())
    table = enumerate_types(tb, "tpT" if T is not None else "tp", dialect, extra=[C])
    core = to_core(C)
    return any(table.holds(core, t) for t in table.types)
