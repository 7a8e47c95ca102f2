"""Finite interpretations, model checking and model constructions.

Element sets are handled internally as Python ints used as bitsets over the
domain order; the public API speaks element ids.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ConstructionError, DLSyntaxError, ResourceError
from .syntax import (
    And,
    Bot,
    Concept,
    Exists,
    Forall,
    Name,
    Nominal,
    Not,
    Or,
    Role,
    Signature,
    TBox,
    Top,
)

DEFAULT_MAX_ELEMS = 10**6


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int):
    """Indices of set bits, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class Interpretation:
    """A finite interpretation.

    ``labels`` maps element -> names, ``edges`` maps role -> pairs,
    ``individuals`` maps individual name -> element.  Instances are treated
    as immutable.  Dangling references are tolerated at construction time so
    :func:`validate` can report them; evaluation refuses such inputs.
    """

    def __init__(
        self,
        domain: Iterable[str],
        labels: Optional[Mapping[str, Iterable[str]]] = None,
        edges: Optional[Mapping[str, Iterable[Tuple[str, str]]]] = None,
        individuals: Optional[Mapping[str, str]] = None,
        provenance: Optional[Mapping[str, object]] = None,
        sig: Optional[Signature] = None,
    ):
        dom = list(dict.fromkeys(str(d) for d in domain))
        self.domain: Tuple[str, ...] = tuple(dom)
        self.labels: Dict[str, frozenset] = {
            d: frozenset((labels or {}).get(d, ())) for d in itertools.chain(dom, (labels or {}))
        }
        self.edges: Dict[str, frozenset] = {
            r: frozenset((str(a), str(b)) for a, b in ps) for r, ps in sorted((edges or {}).items())
        }
        self.individuals: Dict[str, str] = dict(sorted((individuals or {}).items()))
        self.provenance = dict(provenance or {})
        self._sig = sig
        self.index = {d: i for i, d in enumerate(self.domain)}
        self._built = False

    # -- construction helpers
    @classmethod
    def from_extensions(cls, domain, concepts=None, roles=None, individuals=None, **kw):
        """Build from name -> elements and role -> pairs maps."""
        labels: Dict[str, set] = {}
        for a, elems in (concepts or {}).items():
            for d in elems:
                labels.setdefault(d, set()).add(a)
        return cls(domain, labels, roles or {}, individuals, **kw)

    def replace(self, **kw) -> "Interpretation":
        args = dict(
            domain=self.domain,
            labels=self.labels,
            edges=self.edges,
            individuals=self.individuals,
            provenance=self.provenance,
            sig=self._sig,
        )
        args.update(kw)
        return Interpretation(**args)

    # -- basic views
    def __len__(self):
        return len(self.domain)

    def __eq__(self, other):
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.labels == other.labels
            and {r: p for r, p in self.edges.items() if p} == {r: p for r, p in other.edges.items() if p}
            and self.individuals == other.individuals
        )

    def __hash__(self):
        return hash((self.domain, frozenset(self.labels.items())))

    def __repr__(self):
        return f"Interpretation({len(self.domain)} elements)"

    def __str__(self):
        return render_interpretation(self)

    @property
    def concept_names(self) -> frozenset:
        used = frozenset(a for s in self.labels.values() for a in s)
        if self._sig is not None:
            used |= self._sig.concept_names
        return used

    @property
    def role_names(self) -> frozenset:
        used = frozenset(r for r, p in self.edges.items() if p)
        if self._sig is not None:
            used |= self._sig.role_names
        return used

    @property
    def signature(self) -> Signature:
        inds = frozenset(self.individuals)
        if self._sig is not None:
            inds |= self._sig.individual_names
        return Signature(self.concept_names, self.role_names, inds)

    def label(self, d) -> frozenset:
        return self.labels.get(d, frozenset())

    def successors(self, d, role) -> List[str]:
        """Successors in domain order; ``role`` is a name or a Role."""
        self._build()
        i = self.index[d]
        return [self.domain[j] for j in bits(self.succ_mask(role)[i])]

    def predecessors(self, d, role) -> List[str]:
        self._build()
        r = role if isinstance(role, str) else role.name
        i = self.index[d]
        return [self.domain[j] for j in bits(self._pred.get(r, [0] * len(self.domain))[i])]

    # -- bitset index
    def _build(self):
        if self._built:
            return
        n = len(self.domain)
        for d, names in self.labels.items():
            if names and d not in self.index:
                raise ConstructionError(f"label on undeclared element {d!r}")
        self._lab: Dict[str, int] = {}
        for d, names in self.labels.items():
            if d in self.index:
                for a in names:
                    self._lab[a] = self._lab.get(a, 0) | (1 << self.index[d])
        self._succ: Dict[str, List[int]] = {}
        self._pred: Dict[str, List[int]] = {}
        for r, pairs in self.edges.items():
            s = [0] * n
            p = [0] * n
            for a, b in pairs:
                if a not in self.index or b not in self.index:
                    raise ConstructionError(f"edge {r}({a},{b}) mentions an undeclared element")
                ia, ib = self.index[a], self.index[b]
                s[ia] |= 1 << ib
                p[ib] |= 1 << ia
            self._succ[r] = s
            self._pred[r] = p
        for a, d in self.individuals.items():
            if d not in self.index:
                raise ConstructionError(f"individual {a} denotes undeclared element {d!r}")
        self.full = (1 << n) - 1
        self._built = True

    def succ_mask(self, role) -> List[int]:
        """Per-element successor bitsets for a role name or Role."""
        self._build()
        if isinstance(role, str):
            role = Role("direct", role) if role != "u" else Role("universal")
        n = len(self.domain)
        if role.universal:
            return [self.full] * n
        table = self._pred if role.inverse else self._succ
        return table.get(role.name, [0] * n)

    def label_mask(self, name: str) -> int:
        self._build()
        return self._lab.get(name, 0)

    def mask_of(self, elems: Iterable[str]) -> int:
        m = 0
        for d in elems:
            m |= 1 << self.index[d]
        return m

    def elems_of(self, mask: int) -> List[str]:
        return [self.domain[i] for i in bits(mask)]


@dataclass(frozen=True)
class Pointed:
    interp: Interpretation
    point: str

    def __post_init__(self):
        if self.point not in self.interp.index:
            raise ConstructionError(f"point {self.point!r} not in domain")


# ---------------------------------------------------------------------------
# file format


def parse_interpretation(text: str) -> Interpretation:
    """Parse the line-based interpretation format."""
    domain: List[str] = []
    declared = set()
    labels: Dict[str, set] = {}
    edges: Dict[str, set] = {}
    inds: Dict[str, str] = {}
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    for no, raw in enumerate(lines, 1):
        ln = raw.split("#", 1)[0]
        parts = ln.split()
        if not parts:
            continue
        kw = parts[0]
        col = raw.index(kw) + 1

        def need(k):
            if len(parts) != k:
                raise DLSyntaxError(f"'{kw}' expects {k - 1} arguments", no, col)

        def known(x):
            if x not in declared:
                raise DLSyntaxError(f"element {x!r} used before its 'elem' line", no, raw.index(x) + 1)

        if kw == "elem":
            need(2)
            if parts[1] not in declared:
                declared.add(parts[1])
                domain.append(parts[1])
        elif kw == "label":
            need(3)
            known(parts[1])
            labels.setdefault(parts[1], set()).add(parts[2])
        elif kw == "edge":
            need(4)
            if parts[1] == "u":
                raise DLSyntaxError('"u" is reserved for the universal role', no, col)
            known(parts[2])
            known(parts[3])
            edges.setdefault(parts[1], set()).add((parts[2], parts[3]))
        elif kw == "ind":
            need(3)
            known(parts[2])
            prev = inds.get(parts[1])
            if prev is not None and prev != parts[2]:
                raise DLSyntaxError(f"individual {parts[1]} assigned twice", no, col)
            inds[parts[1]] = parts[2]
        else:
            raise DLSyntaxError(f"unknown directive {kw!r}", no, col)
    if not domain:
        raise DLSyntaxError("an interpretation needs at least one element", len(lines), 1)
    return Interpretation(domain, labels, edges, inds)


def render_interpretation(I: Interpretation, header: Sequence[str] = ()) -> str:
    out = [f"# {h}" for h in header]
    for d in I.domain:
        out.append(f"elem {d}")
    for d in I.domain:
        for a in sorted(I.label(d)):
            out.append(f"label {d} {a}")
    for r in sorted(I.edges):
        for a, b in sorted(I.edges[r], key=lambda p: (I.index.get(p[0], -1), I.index.get(p[1], -1))):
            out.append(f"edge {r} {a} {b}")
    for a, d in I.individuals.items():
        out.append(f"ind {a} {d}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# validation and evaluation


def validate(I: Interpretation, require_K: bool = False, sig: Optional[Signature] = None) -> List[str]:
    """Return a list of diagnostics; empty means well formed."""
    diags = []
    if not I.domain:
        diags.append("structural: empty domain")
    known = set(I.domain)
    for d, names in I.labels.items():
        if names and d not in known:
            diags.append(f"structural: label on undeclared element {d}")
    for r, pairs in I.edges.items():
        if r == "u":
            diags.append("structural: 'u' may not carry stored edges")
        for a, b in sorted(pairs):
            for x in (a, b):
                if x not in known:
                    diags.append(f"structural: edge {r}({a},{b}) mentions undeclared element {x}")
    for a, d in I.individuals.items():
        if d not in known:
            diags.append(f"structural: individual {a} denotes undeclared element {d}")
    if require_K:
        names = set(sig.individual_names) if sig is not None else set()
        for a in sorted(names):
            if a not in I.individuals:
                diags.append(f"{a} uninterpreted")
    return diags


def ext_mask(I: Interpretation, c: Concept, memo: Optional[dict] = None) -> int:
    """Extension of ``c`` as a bitset."""
    if memo is None:
        memo = {}
    hit = memo.get(c)
    if hit is not None:
        return hit
    I._build()
    if isinstance(c, Top):
        m = I.full
    elif isinstance(c, Bot):
        m = 0
    elif isinstance(c, Name):
        m = I.label_mask(c.name)
    elif isinstance(c, Nominal):
        d = I.individuals.get(c.name)
        m = 0 if d is None else 1 << I.index[d]
    elif isinstance(c, Not):
        m = I.full & ~ext_mask(I, c.arg, memo)
    elif isinstance(c, And):
        m = I.full
        for a in c.args:
            m &= ext_mask(I, a, memo)
    elif isinstance(c, Or):
        m = 0
        for a in c.args:
            m |= ext_mask(I, a, memo)
    elif isinstance(c, Exists):
        m = _count_at_least(I, c.role, c.bound, ext_mask(I, c.arg, memo))
    elif isinstance(c, Forall):
        inner = I.full & ~ext_mask(I, c.arg, memo)
        m = I.full & ~_count_at_least(I, c.role, c.bound, inner)
    else:
        raise TypeError(f"not a concept: {c!r}")
    memo[c] = m
    return m


def _count_at_least(I: Interpretation, role: Role, k: int, target: int) -> int:
    if k <= 0:
        return I.full
    succ = I.succ_mask(role)
    m = 0
    if k == 1:
        for i, s in enumerate(succ):
            if s & target:
                m |= 1 << i
    else:
        for i, s in enumerate(succ):
            if popcount(s & target) >= k:
                m |= 1 << i
    return m


def extension(I: Interpretation, c: Concept) -> List[str]:
    """Elements satisfying ``c``, in domain order."""
    return I.elems_of(ext_mask(I, c))


def holds(I: Interpretation, d: str, c: Concept) -> bool:
    return bool(ext_mask(I, c) >> I.index[d] & 1)


@dataclass
class SatResult:
    ok: bool
    element: Optional[str] = None
    axiom: Optional[int] = None

    def __bool__(self):
        return self.ok


def satisfies(I: Interpretation, T: TBox) -> SatResult:
    """Model check a TBox; on failure report the first (element, axiom)."""
    memo: dict = {}
    for k, (lhs, rhs) in enumerate(T.axioms):
        bad = ext_mask(I, lhs, memo) & ~ext_mask(I, rhs, memo)
        if bad:
            low = (bad & -bad).bit_length() - 1
            return SatResult(False, I.domain[low], k)
    return SatResult(True)


# ---------------------------------------------------------------------------
# unions, products, subinterpretations, quotients


def disjoint_union(items: Sequence[Interpretation], diagnostics: Optional[list] = None) -> Interpretation:
    """Tagged disjoint union; element ``d`` of input ``k`` becomes ``k:d``.

    A single argument is returned unchanged.  Individuals carried by more
    than one input are dropped (reported through ``diagnostics``)."""
    if not items:
        raise ConstructionError("disjoint union of nothing")
    if len(items) == 1:
        return items[0]
    domain, labels, edges, prov = [], {}, {}, {}
    count: Dict[str, int] = {}
    for I in items:
        for a in I.individuals:
            count[a] = count.get(a, 0) + 1
    inds = {}
    for k, I in enumerate(items):
        tag = lambda d, k=k: f"{k}:{d}"
        for d in I.domain:
            domain.append(tag(d))
            labels[tag(d)] = I.label(d)
            prov[tag(d)] = (k, d)
        for r, pairs in I.edges.items():
            edges.setdefault(r, set()).update((tag(a), tag(b)) for a, b in pairs)
        for a, d in I.individuals.items():
            if count[a] == 1:
                inds[a] = tag(d)
    if diagnostics is not None:
        for a in sorted(a for a, c in count.items() if c > 1):
            diagnostics.append(f"individual {a} carried by several inputs; dropped")
    return Interpretation(domain, labels, edges, inds, provenance=prov)


def direct_product(
    items: Sequence[Interpretation],
    points: Optional[Sequence[str]] = None,
    max_elems: int = DEFAULT_MAX_ELEMS,
):
    """Direct product.  Elements are written ``(d1,d2,...)``.

    Returns the interpretation, or a :class:`Pointed` when ``points`` is
    given."""
    if not items:
        raise ConstructionError("product of nothing")
    size = 1
    for I in items:
        size *= len(I)
    if size > max_elems:
        raise ResourceError(f"product would have {size} elements (cap {max_elems})")

    def name(t):
        return "(" + ",".join(t) + ")"

    tuples = list(itertools.product(*(I.domain for I in items)))
    domain = [name(t) for t in tuples]
    labels = {}
    for t in tuples:
        common = frozenset.intersection(*(I.label(d) for I, d in zip(items, t)))
        labels[name(t)] = common
    roles = set(items[0].edges)
    for I in items[1:]:
        roles &= set(I.edges)
    edges = {}
    for r in sorted(roles):
        per = [sorted(I.edges[r]) for I in items]
        edges[r] = {
            (name(tuple(p[0] for p in combo)), name(tuple(p[1] for p in combo)))
            for combo in itertools.product(*per)
        }
    inds = {}
    common_inds = set(items[0].individuals)
    for I in items[1:]:
        common_inds &= set(I.individuals)
    for a in sorted(common_inds):
        inds[a] = name(tuple(I.individuals[a] for I in items))
    prov = {name(t): t for t in tuples}
    P = Interpretation(domain, labels, edges, inds, provenance=prov)
    if points is not None:
        return Pointed(P, name(tuple(points)))
    return P


def restrict(I: Interpretation, keep: Iterable[str]) -> Interpretation:
    """Substructure induced on ``keep`` (kept in domain order)."""
    ks = set(keep)
    dom = [d for d in I.domain if d in ks]
    edges = {r: {(a, b) for a, b in ps if a in ks and b in ks} for r, ps in I.edges.items()}
    inds = {a: d for a, d in I.individuals.items() if d in ks}
    prov = {d: I.provenance[d] for d in dom if d in I.provenance}
    return Interpretation(dom, {d: I.label(d) for d in dom}, edges, inds, provenance=prov, sig=I._sig)


def generated_sub(I: Interpretation, G: Iterable[str]) -> Interpretation:
    """Union of the connected components (edges in both directions) of G."""
    adj: Dict[str, set] = {d: set() for d in I.domain}
    for ps in I.edges.values():
        for a, b in ps:
            adj[a].add(b)
            adj[b].add(a)
    seen = set(G)
    todo = deque(seen)
    while todo:
        d = todo.popleft()
        for e in adj[d]:
            if e not in seen:
                seen.add(e)
                todo.append(e)
    return restrict(I, seen)


def forward_reachable(I: Interpretation, starts: Iterable[str]) -> set:
    adj: Dict[str, set] = {d: set() for d in I.domain}
    for ps in I.edges.values():
        for a, b in ps:
            adj[a].add(b)
    seen = set(starts)
    todo = deque(seen)
    while todo:
        d = todo.popleft()
        for e in adj[d]:
            if e not in seen:
                seen.add(e)
                todo.append(e)
    return seen


def forward_generated_sub(I: Interpretation, d) -> Interpretation:
    """Elements reachable from ``d`` (or from each element of a collection)."""
    starts = [d] if isinstance(d, str) else list(d)
    return restrict(I, forward_reachable(I, starts))


def _blocks_from(I: Interpretation, E) -> List[List[str]]:
    """Normalize an equivalence given as blocks, a key function/map or pairs."""
    parent = {d: d for d in I.domain}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            if I.index[ra] < I.index[rb]:
                parent[rb] = ra
            else:
                parent[ra] = rb

    if callable(E) and not isinstance(E, Mapping):
        groups: Dict[object, str] = {}
        for d in I.domain:
            k = E(d)
            if k in groups:
                union(groups[k], d)
            else:
                groups[k] = d
    elif isinstance(E, Mapping):
        groups = {}
        for d in I.domain:
            k = E.get(d, ("__self__", d))
            if k in groups:
                union(groups[k], d)
            else:
                groups[k] = d
    else:
        for item in E:
            item = list(item)
            for x in item[1:]:
                union(item[0], x)
    out: Dict[str, List[str]] = {}
    for d in I.domain:
        out.setdefault(find(d), []).append(d)
    return list(out.values())


def quotient(I: Interpretation, E) -> Interpretation:
    """Factor interpretation.  Each class is named by its first member."""
    blocks = _blocks_from(I, E)
    rep = {}
    for b in blocks:
        for d in b:
            rep[d] = b[0]
    dom = [b[0] for b in blocks]
    labels = {b[0]: frozenset().union(*(I.label(d) for d in b)) for b in blocks}
    edges = {r: {(rep[a], rep[b]) for a, b in ps} for r, ps in I.edges.items()}
    inds = {a: rep[d] for a, d in I.individuals.items()}
    prov = {b[0]: tuple(b) for b in blocks}
    return Interpretation(dom, labels, edges, inds, provenance=prov, sig=I._sig)


# ---------------------------------------------------------------------------
# unravellings

SEP = "·"


def _path_id(path: Sequence[str]) -> str:
    return SEP.join(path)


def tree_unravel(I: Interpretation, d: str, depth: int, max_elems: int = DEFAULT_MAX_ELEMS) -> Pointed:
    """Tree unravelling at ``d`` cut at ``depth`` role steps.  Elements are
    path words ``d·r·e·...``; provenance records the last element."""
    domain, labels, edges, prov = [], {}, {}, {}
    frontier = [(d,)]
    while frontier:
        nxt = []
        for path in frontier:
            pid = _path_id(path)
            domain.append(pid)
            labels[pid] = I.label(path[-1])
            prov[pid] = (path[-1], path)
            if len(domain) > max_elems:
                raise ResourceError(f"unravelling exceeds {max_elems} elements")
            if (len(path) - 1) // 2 >= depth:
                continue
            for r in sorted(I.edges):
                for e in I.successors(path[-1], r):
                    child = path + (r, e)
                    edges.setdefault(r, set()).add((pid, _path_id(child)))
                    nxt.append(child)
        frontier = nxt
    return Pointed(Interpretation(domain, labels, edges, provenance=prov), d)


def forest_unravel(I: Interpretation, depth: int, max_elems: int = DEFAULT_MAX_ELEMS) -> Interpretation:
    """Union of the tree unravellings at every element (path words are
    distinct across roots, so no tagging is needed)."""
    domain, labels, edges, prov = [], {}, {}, {}
    for d in I.domain:
        T = tree_unravel(I, d, depth, max_elems).interp
        domain.extend(T.domain)
        labels.update(T.labels)
        prov.update(T.provenance)
        for r, ps in T.edges.items():
            edges.setdefault(r, set()).update(ps)
        if len(domain) > max_elems:
            raise ResourceError(f"unravelling exceeds {max_elems} elements")
    return Interpretation(domain, labels, edges, provenance=prov)


def partial_tree_unravel(I: Interpretation, max_elems: int = DEFAULT_MAX_ELEMS) -> Interpretation:
    """Paths starting anywhere that stop at the first repeated element: an
    element may occur twice in a path only as its last entry."""
    domain, labels, edges, prov = [], {}, {}, {}

    def visit(path, seen):
        pid = _path_id(path)
        domain.append(pid)
        labels[pid] = I.label(path[-1])
        prov[pid] = (path[-1], path)
        if len(domain) > max_elems:
            raise ResourceError(f"partial unravelling exceeds {max_elems} elements")
        if path[-1] in seen:
            return
        seen = seen | {path[-1]}
        for r in sorted(I.edges):
            for e in I.successors(path[-1], r):
                child = path + (r, e)
                edges.setdefault(r, set()).add((pid, _path_id(child)))
                visit(child, seen)

    for d in I.domain:
        visit((d,), frozenset())
    return Interpretation(domain, labels, edges, provenance=prov)


# ---------------------------------------------------------------------------
# class K machinery


def _carriers(items: Sequence[Interpretation]) -> Dict[str, List[Tuple[int, str]]]:
    out: Dict[str, List[Tuple[int, str]]] = {}
    for k, I in enumerate(items):
        for a, d in I.individuals.items():
            out.setdefault(a, []).append((k, d))
    return out


def coherence_check(items: Sequence[Interpretation]) -> bool:
    """Every two carriers of the same individual are ALC-bisimilar."""
    from .games import greatest_relation

    carriers = _carriers(items)
    cache = {}
    for a, cs in carriers.items():
        for (k1, d1), (k2, d2) in itertools.combinations(cs, 2):
            key = (k1, k2)
            if key not in cache:
                cache[key] = greatest_relation("alc-bisim", items[k1], items[k2]).pairs
            if (d1, d2) not in cache[key]:
                return False
    return True


def coherent_union_alco(items: Sequence[Interpretation]) -> Interpretation:
    """Disjoint union with the carriers of each individual merged."""
    if not coherence_check(items):
        raise ConstructionError("family is not coherent")
    if len(items) == 1:
        return items[0]
    U = disjoint_union(items)
    carriers = _carriers(items)
    blocks = [[f"{k}:{d}" for k, d in cs] for cs in carriers.values()]
    Q = quotient(U, blocks)
    rep = {}
    for cls, members in Q.provenance.items():
        for m in members:
            rep[m] = cls
    inds = {a: rep[f"{cs[0][0]}:{cs[0][1]}"] for a, cs in carriers.items()}
    return Q.replace(individuals=inds)


def nominal_union_alcqio(items: Sequence[Interpretation], individual_names: Optional[Iterable[str]] = None) -> Interpretation:
    """Plain disjoint union of inputs with pairwise disjoint individuals."""
    seen: Dict[str, int] = {}
    for k, I in enumerate(items):
        for a in I.individuals:
            if a in seen:
                raise ConstructionError(f"individual {a} carried by inputs {seen[a]} and {k}")
            seen[a] = k
    if individual_names is not None:
        missing = sorted(set(individual_names) - set(seen))
        if missing:
            raise ConstructionError(f"individuals not covered: {', '.join(missing)}")
    U = disjoint_union(items)
    if len(items) > 1:
        inds = {a: f"{seen[a]}:{items[seen[a]].individuals[a]}" for a in seen}
        U = U.replace(individuals=inds)
    return U
