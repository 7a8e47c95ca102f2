"""Concept and TBox syntax: AST, parser, printer, measures, closure sets and
normal forms.

Concepts are immutable, hashable dataclasses so they can be used as set
members and dictionary keys.  Plain ``some``/``all`` are stored with bound 1;
any other bound marks a counting quantifier.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional

from .errors import DialectError, DLSyntaxError

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"top", "bot", "not", "and", "or", "some", "all", "min", "max"})


# ---------------------------------------------------------------------------
# roles and concepts


@dataclass(frozen=True, order=True)
class Role:
    """A role: ``kind`` is ``"direct"``, ``"inverse"`` or ``"universal"``."""

    kind: str
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("direct", "inverse", "universal"):
            raise ValueError(f"bad role kind {self.kind!r}")
        if self.kind == "universal" and self.name not in ("", "u"):
            raise ValueError("universal role carries no name")
        if self.kind != "universal" and self.name == "u":
            raise DialectError('"u" is reserved for the universal role')

    @property
    def universal(self) -> bool:
        return self.kind == "universal"

    @property
    def inverse(self) -> bool:
        return self.kind == "inverse"

    def __str__(self):
        if self.kind == "universal":
            return "u"
        if self.kind == "inverse":
            return f"inv({self.name})"
        return self.name


def Direct(name: str) -> Role:
    return Role("direct", name)


def Inverse(name: str) -> Role:
    return Role("inverse", name)


UNIVERSAL = Role("universal")


class Concept:
    """Base class of the concept AST."""

    __slots__ = ()

    def __str__(self):
        return render(self)

    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Top(Concept):
    pass


@dataclass(frozen=True)
class Bot(Concept):
    pass


TOP = Top()
BOT = Bot()


@dataclass(frozen=True)
class Name(Concept):
    name: str


@dataclass(frozen=True)
class Nominal(Concept):
    name: str


@dataclass(frozen=True)
class Not(Concept):
    arg: Concept

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class And(Concept):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands")

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Concept):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands")

    def children(self):
        return self.args


@dataclass(frozen=True)
class Exists(Concept):
    """``min bound role . arg``; bound 1 is the plain existential."""

    role: Role
    bound: int
    arg: Concept

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("negative counting bound")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Forall(Concept):
    """Dual of :class:`Exists`: ``not min bound role . not arg``."""

    role: Role
    bound: int
    arg: Concept

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("negative counting bound")

    def children(self):
        return (self.arg,)


def some(role, arg, bound=1) -> Exists:
    if isinstance(role, str):
        role = UNIVERSAL if role == "u" else Direct(role)
    return Exists(role, bound, arg)


def every(role, arg, bound=1) -> Forall:
    if isinstance(role, str):
        role = UNIVERSAL if role == "u" else Direct(role)
    return Forall(role, bound, arg)


def conj(items: Iterable[Concept]) -> Concept:
    """Conjunction with the conventions: empty gives top, singleton unwraps."""
    out = []
    for c in items:
        if isinstance(c, Top):
            continue
        if isinstance(c, Bot):
            return BOT
        if isinstance(c, And):
            out.extend(c.args)
        else:
            out.append(c)
    out = list(dict.fromkeys(out))
    if not out:
        return TOP
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(items: Iterable[Concept]) -> Concept:
    """Disjunction with the conventions: empty gives bot, singleton unwraps."""
    out = []
    for c in items:
        if isinstance(c, Bot):
            continue
        if isinstance(c, Top):
            return TOP
        if isinstance(c, Or):
            out.extend(c.args)
        else:
            out.append(c)
    out = list(dict.fromkeys(out))
    if not out:
        return BOT
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(c: Concept) -> Concept:
    if isinstance(c, Not):
        return c.arg
    return Not(c)


def subconcepts(c: Concept) -> Iterator[Concept]:
    yield c
    for ch in c.children():
        yield from subconcepts(ch)


# ---------------------------------------------------------------------------
# signatures and TBoxes


@dataclass(frozen=True)
class Signature:
    concept_names: frozenset = frozenset()
    role_names: frozenset = frozenset()
    individual_names: frozenset = frozenset()

    def __post_init__(self):
        for attr in ("concept_names", "role_names", "individual_names"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        for n in itertools.chain(self.concept_names, self.role_names, self.individual_names):
            if not IDENT_RE.match(n):
                raise DLSyntaxError(f"bad identifier {n!r}")
        if "u" in self.role_names:
            raise DLSyntaxError('"u" is reserved and cannot be a role name')
        a, b, c = self.concept_names, self.role_names, self.individual_names
        clash = (a & b) | (a & c) | (b & c)
        if clash:
            raise DLSyntaxError(f"names used in two sorts: {sorted(clash)}")

    def union(self, other: "Signature") -> "Signature":
        return Signature(
            self.concept_names | other.concept_names,
            self.role_names | other.role_names,
            self.individual_names | other.individual_names,
        )

    def __str__(self):
        def fmt(xs):
            return ",".join(sorted(xs))

        return (
            f"concepts={{{fmt(self.concept_names)}}} roles={{{fmt(self.role_names)}}} "
            f"individuals={{{fmt(self.individual_names)}}}"
        )


def signature_of(*items) -> Signature:
    """Collect the symbols used by concepts and TBoxes."""
    cn, rn, inds = set(), set(), set()

    def visit(c):
        for s in subconcepts(c):
            if isinstance(s, Name):
                cn.add(s.name)
            elif isinstance(s, Nominal):
                inds.add(s.name)
            elif isinstance(s, (Exists, Forall)) and not s.role.universal:
                rn.add(s.role.name)

    for it in items:
        if isinstance(it, TBox):
            for lhs, rhs in it.axioms:
                visit(lhs)
                visit(rhs)
        elif isinstance(it, Concept):
            visit(it)
        else:
            for c in it:
                visit(c)
    return Signature(frozenset(cn), frozenset(rn), frozenset(inds))


@dataclass(frozen=True)
class TBox:
    axioms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple((l, r) for l, r in self.axioms))

    def __len__(self):
        return len(self.axioms)

    def __iter__(self):
        return iter(self.axioms)

    def __str__(self):
        return "\n".join(f"{render(l)} [= {render(r)}" for l, r in self.axioms)

    def as_concept(self) -> Concept:
        """The single concept C with the TBox equivalent to top [= C."""
        return conj(disj([neg(l), r]) for l, r in self.axioms)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<nat>[0-9]+)|(?P<sym>\[=|[(){}.]))")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int = 1, col0: int = 1) -> list:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise DLSyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        start = m.start(m.lastgroup)
        toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), line, col0 + start))
        pos = m.end()
    toks.append(_Tok("eof", "", line, col0 + n))
    return toks


class _Parser:
    def __init__(self, toks, sig: Optional[Signature], seen: dict):
        self.toks = toks
        self.i = 0
        self.sig = sig
        self.seen = seen  # identifier -> sort, for inferred signatures

    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise DLSyntaxError(msg, tok.line, tok.col)

    def expect(self, text):
        t = self.next()
        if t.text != text:
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def declare(self, tok: _Tok, sort: str):
        name = tok.text
        if name in KEYWORDS:
            self.fail(f"keyword {name!r} used as a name", tok)
        if self.sig is not None:
            pool = {
                "concept": self.sig.concept_names,
                "role": self.sig.role_names,
                "individual": self.sig.individual_names,
            }[sort]
            if name not in pool:
                self.fail(f"undeclared {sort} name {name!r}", tok)
        else:
            prev = self.seen.setdefault(name, sort)
            if prev != sort:
                self.fail(f"{name!r} used both as {prev} and {sort} name", tok)

    def role(self) -> Role:
        t = self.next()
        if t.kind != "id":
            self.fail("expected a role", t)
        if t.text == "inv" and self.peek().text == "(":
            self.next()
            r = self.next()
            if r.kind != "id":
                self.fail("expected a role name inside inv(...)", r)
            if r.text == "u":
                self.fail("the universal role has no inverse", r)
            self.declare(r, "role")
            self.expect(")")
            return Inverse(r.text)
        if t.text == "u":
            return UNIVERSAL
        self.declare(t, "role")
        return Direct(t.text)

    def concept(self) -> Concept:
        t = self.peek()
        if t.kind == "id":
            w = t.text
            if w == "top":
                self.next()
                return TOP
            if w == "bot":
                self.next()
                return BOT
            if w == "not":
                self.next()
                return Not(self.concept())
            if w in ("some", "all"):
                self.next()
                r = self.role()
                self.expect(".")
                body = self.concept()
                return Exists(r, 1, body) if w == "some" else Forall(r, 1, body)
            if w in ("min", "max"):
                self.next()
                nt = self.next()
                if nt.kind != "nat":
                    self.fail("expected a natural number", nt)
                k = int(nt.text)
                r = self.role()
                self.expect(".")
                body = self.concept()
                if w == "min":
                    return Exists(r, k, body)
                return Not(Exists(r, k + 1, body))
            if w in ("and", "or"):
                self.fail(f"unexpected {w!r}")
            self.next()
            self.declare(t, "concept")
            return Name(w)
        if t.text == "{":
            self.next()
            a = self.next()
            if a.kind != "id":
                self.fail("expected an individual name", a)
            self.declare(a, "individual")
            self.expect("}")
            return Nominal(a.text)
        if t.text == "(":
            self.next()
            first = self.concept()
            op = self.peek()
            if op.text == ")":
                # redundant grouping, e.g. "min 3 r.(min 5 s.top)"
                self.next()
                return first
            if op.text not in ("and", "or"):
                self.fail("expected 'and' or 'or' inside parentheses", op)
            args = [first]
            while self.peek().text == op.text:
                self.next()
                args.append(self.concept())
            if self.peek().text in ("and", "or"):
                self.fail("mixing 'and' and 'or' needs parentheses")
            self.expect(")")
            return And(tuple(args)) if op.text == "and" else Or(tuple(args))
        self.fail(f"unexpected {t.text or 'end of input'!r}", t)


def _split_lines(text: str) -> list:
    return text.replace("\r\n", "\n").replace("\r", "\n").split("\n")


def parse_concept(text: str, sig: Optional[Signature] = None) -> Concept:
    """Parse one concept.  With ``sig=None`` the signature is inferred."""
    lines = _split_lines(text)
    toks = []
    for no, ln in enumerate(lines, 1):
        toks.extend(t for t in _tokenize(ln, no) if t.kind != "eof")
    last = len(lines)
    toks.append(_Tok("eof", "", last, len(lines[-1]) + 1))
    p = _Parser(toks, sig, {})
    c = p.concept()
    if p.peek().kind != "eof":
        p.fail(f"trailing input {p.peek().text!r}")
    return c


def parse_tbox(text: str, sig: Optional[Signature] = None) -> TBox:
    """Parse a TBox file: one ``C [= D`` per line, ``#`` comments."""
    axioms = []
    seen: dict = {}
    for no, raw in enumerate(_split_lines(text), 1):
        ln = raw.split("#", 1)[0]
        if not ln.strip():
            continue
        toks = _tokenize(ln, no)
        p = _Parser(toks, sig, seen)
        lhs = p.concept()
        p.expect("[=")
        rhs = p.concept()
        if p.peek().kind != "eof":
            p.fail(f"trailing input {p.peek().text!r}")
        axioms.append((lhs, rhs))
    return TBox(tuple(axioms))


# ---------------------------------------------------------------------------
# printing and canonical form


def render(c: Concept) -> str:
    return _render(c)


@lru_cache(maxsize=200_000)
def _render(c: Concept) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bot):
        return "bot"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Nominal):
        return "{" + c.name + "}"
    if isinstance(c, Not):
        return "not " + _render(c.arg)
    if isinstance(c, And):
        return "(" + " and ".join(_render(a) for a in c.args) + ")"
    if isinstance(c, Or):
        return "(" + " or ".join(_render(a) for a in c.args) + ")"
    if isinstance(c, Exists):
        if c.bound == 1:
            return f"some {c.role}.{_render(c.arg)}"
        return f"min {c.bound} {c.role}.{_render(c.arg)}"
    if isinstance(c, Forall):
        if c.bound == 1:
            return f"all {c.role}.{_render(c.arg)}"
        return f"not min {c.bound} {c.role}.{_render(neg(c.arg))}"
    raise TypeError(f"not a concept: {c!r}")


@lru_cache(maxsize=200_000)
def canonical(c: Concept) -> Concept:
    """Stable representative: operands flattened, deduplicated and sorted by
    rendered text, double negation collapsed, unit laws for top/bot applied.
    Graded universals become negated counting existentials."""
    if isinstance(c, (Top, Bot, Name, Nominal)):
        return c
    if isinstance(c, Not):
        a = canonical(c.arg)
        if isinstance(a, Not):
            return a.arg
        if isinstance(a, Top):
            return BOT
        if isinstance(a, Bot):
            return TOP
        return Not(a)
    if isinstance(c, (And, Or)):
        is_and = isinstance(c, And)
        unit, zero = (Top, Bot) if is_and else (Bot, Top)
        items = []
        for a in c.args:
            a = canonical(a)
            if isinstance(a, type(c)):
                items.extend(a.args)
            elif isinstance(a, unit):
                continue
            elif isinstance(a, zero):
                return a
            else:
                items.append(a)
        uniq = {render(a): a for a in items}
        keys = sorted(uniq)
        if not keys:
            return TOP if is_and else BOT
        if len(keys) == 1:
            return uniq[keys[0]]
        args = tuple(uniq[k] for k in keys)
        return And(args) if is_and else Or(args)
    if isinstance(c, Exists):
        a = canonical(c.arg)
        if c.bound >= 1 and isinstance(a, Bot):
            return BOT
        if c.role.universal and c.bound == 1 and isinstance(a, Top):
            return TOP
        return Exists(c.role, c.bound, a)
    if isinstance(c, Forall):
        a = canonical(c.arg)
        if c.bound != 1:
            return canonical(Not(Exists(c.role, c.bound, neg(a))))
        if isinstance(a, Top):
            return TOP
        return Forall(c.role, 1, a)
    raise TypeError(f"not a concept: {c!r}")


def canonical_tbox(t: TBox) -> TBox:
    return TBox(tuple((canonical(l), canonical(r)) for l, r in t.axioms))


# ---------------------------------------------------------------------------
# measures and dialects

DIALECTS = ("EL", "EL⊔", "EL¬", "ALC", "ALCI", "ALCQ", "ALCO", "ALCQO", "ALCQIO")


@dataclass(frozen=True)
class Dialect:
    base: str
    u: Optional[str] = None  # None, "u1" or "graded-u"

    def __str__(self):
        if self.u is None:
            return self.base
        return self.base + ("u₁" if self.u == "u1" else "u")

    def allows(self, other: "Dialect") -> bool:
        """Syntactic inclusion of dialects."""
        if not _base_leq(other.base, self.base):
            return False
        order = {None: 0, "u1": 1, "graded-u": 2}
        return order[other.u] <= order[self.u]


_BASE_ABOVE = {
    "EL": {"EL", "EL⊔", "EL¬", "ALC", "ALCI", "ALCQ", "ALCO", "ALCQO", "ALCQIO"},
    "EL⊔": {"EL⊔", "ALC", "ALCI", "ALCQ", "ALCO", "ALCQO", "ALCQIO"},
    "EL¬": {"EL¬", "ALC", "ALCI", "ALCQ", "ALCO", "ALCQO", "ALCQIO"},
    "ALC": {"ALC", "ALCI", "ALCQ", "ALCO", "ALCQO", "ALCQIO"},
    "ALCI": {"ALCI", "ALCQIO"},
    "ALCQ": {"ALCQ", "ALCQO", "ALCQIO"},
    "ALCO": {"ALCO", "ALCQO", "ALCQIO"},
    "ALCQO": {"ALCQO", "ALCQIO"},
    "ALCQIO": {"ALCQIO"},
}


def _base_leq(a: str, b: str) -> bool:
    return b in _BASE_ABOVE[a]


@dataclass(frozen=True)
class Measure:
    rank: int
    grade: int
    length: int
    min_dialect: Dialect


def rank(c) -> int:
    if isinstance(c, TBox):
        return max((max(rank(l), rank(r)) for l, r in c.axioms), default=0)
    if isinstance(c, (Exists, Forall)):
        return rank(c.arg) + (0 if c.role.universal else 1)
    return max((rank(a) for a in c.children()), default=0)


def grade(c) -> int:
    if isinstance(c, TBox):
        return max((max(grade(l), grade(r)) for l, r in c.axioms), default=1)
    if isinstance(c, (Exists, Forall)):
        return max(c.bound, grade(c.arg))
    return max((grade(a) for a in c.children()), default=1)


def length(c) -> int:
    if isinstance(c, TBox):
        return sum(length(l) + length(r) for l, r in c.axioms)
    if isinstance(c, (And, Or)):
        return len(c.args) - 1 + sum(length(a) for a in c.args)
    if isinstance(c, (Not, Exists, Forall)):
        return 1 + length(c.arg)
    return 1


def _features(c: Concept, inside: bool, acc: set):
    """Collect constructor features.  ``inside`` marks positions under a
    quantifier, which matters for the EL-negation dialect."""
    if isinstance(c, Top):
        return
    if isinstance(c, Name):
        return
    if isinstance(c, Nominal):
        acc.add("nominal")
        return
    if isinstance(c, Bot):
        acc.add("or-inside" if inside else "or")
        return
    if isinstance(c, Not):
        acc.add("not-inside" if inside else "not")
        _features(c.arg, inside, acc)
        return
    if isinstance(c, And):
        for a in c.args:
            _features(a, inside, acc)
        return
    if isinstance(c, Or):
        acc.add("or-inside" if inside else "or")
        for a in c.args:
            _features(a, inside, acc)
        return
    if isinstance(c, (Exists, Forall)):
        if isinstance(c, Forall):
            acc.add("forall")
        if c.role.universal:
            acc.add("u-graded" if c.bound != 1 else "u")
        else:
            if c.bound != 1:
                acc.add("counting")
            if c.role.inverse:
                acc.add("inverse")
        _features(c.arg, True, acc)
        return
    raise TypeError(c)


def dialect_of(x) -> Dialect:
    """Least dialect whose constructors cover ``x`` (a concept or TBox)."""
    acc: set = set()
    if isinstance(x, TBox):
        for l, r in x.axioms:
            _features(l, False, acc)
            _features(r, False, acc)
    else:
        _features(x, False, acc)
    q = "counting" in acc
    i = "inverse" in acc
    o = "nominal" in acc
    if "u-graded" in acc:
        q_any = True
    else:
        q_any = q
    if i and (q_any or o):
        base = "ALCQIO"
    elif i:
        base = "ALCI"
    elif q_any and o:
        base = "ALCQO"
    elif q_any:
        base = "ALCQ"
    elif o:
        base = "ALCO"
    else:
        boolean_inside = acc & {"not-inside", "forall"}
        has_not = "not" in acc
        has_or = bool(acc & {"or", "or-inside"})
        if boolean_inside:
            base = "ALC"
        elif has_not and "or-inside" in acc:
            base = "ALC"
        elif has_not:
            base = "EL¬"
        elif has_or:
            base = "EL⊔"
        else:
            base = "EL"
    uflag = None
    if "u-graded" in acc:
        uflag = "graded-u"
    elif "u" in acc:
        uflag = "u1"
    return Dialect(base, uflag)


def measure(x) -> Measure:
    return Measure(rank(x), grade(x), length(x), dialect_of(x))


# ---------------------------------------------------------------------------
# core form and closure sets


def _require_alci(c: Concept):
    for s in subconcepts(c):
        if isinstance(s, Nominal):
            raise DialectError("closure sets are defined for ALC/ALCI only (nominal found)")
        if isinstance(s, (Exists, Forall)):
            if s.role.universal:
                raise DialectError("closure sets are defined for ALC/ALCI only (universal role found)")
            if s.bound != 1:
                raise DialectError("closure sets are defined for ALC/ALCI only (counting found)")


@lru_cache(maxsize=200_000)
def to_core(c: Concept) -> Concept:
    """Rewrite into top/bot/names/not/and/some only (ALCI input)."""
    if isinstance(c, (Top, Bot, Name)):
        return c
    if isinstance(c, Not):
        return neg(to_core(c.arg))
    if isinstance(c, And):
        return canonical(And(tuple(to_core(a) for a in c.args)))
    if isinstance(c, Or):
        return neg(canonical(And(tuple(neg(to_core(a)) for a in c.args))))
    if isinstance(c, Exists):
        _require_alci(c)
        return Exists(c.role, 1, to_core(c.arg))
    if isinstance(c, Forall):
        _require_alci(c)
        return neg(Exists(c.role, 1, neg(to_core(c.arg))))
    if isinstance(c, Nominal):
        raise DialectError("closure sets are defined for ALC/ALCI only (nominal found)")
    raise TypeError(c)


def _clos_pos(c: Concept, acc: dict):
    if isinstance(c, (Top, Bot)):
        return
    if isinstance(c, Not):
        _clos_pos(c.arg, acc)
        return
    if isinstance(c, Name):
        acc.setdefault(c, None)
        return
    if isinstance(c, And):
        acc.setdefault(c, None)
        for a in c.args:
            _clos_pos(a, acc)
        return
    if isinstance(c, Exists):
        acc.setdefault(c, None)
        _clos_pos(c.arg, acc)
        return
    raise TypeError(c)


def clos_positive(items) -> list:
    """Positive members of the closure, in first-occurrence order, in core
    form.  ``items`` is a TBox, a concept, or an iterable of either."""
    acc: dict = {}

    def add(x):
        if isinstance(x, TBox):
            for l, r in x.axioms:
                _require_alci(l)
                _require_alci(r)
                _clos_pos(to_core(l), acc)
                _clos_pos(to_core(r), acc)
        elif isinstance(x, Concept):
            _require_alci(x)
            _clos_pos(to_core(x), acc)
        else:
            for y in x:
                add(y)

    add(items)
    return list(acc)


def clos(t) -> set:
    """The closure set: positive members together with their negations."""
    pos = clos_positive(t)
    return set(pos) | {Not(p) for p in pos}


# ---------------------------------------------------------------------------
# normal forms


def nnf(c: Concept) -> Concept:
    """Negation normal form; counting existentials under negation stay
    negated since the grammar has no at-most constructor of its own."""
    return _nnf(c, True)


def _nnf(c: Concept, pos: bool) -> Concept:
    if isinstance(c, Top):
        return TOP if pos else BOT
    if isinstance(c, Bot):
        return BOT if pos else TOP
    if isinstance(c, (Name, Nominal)):
        return c if pos else Not(c)
    if isinstance(c, Not):
        return _nnf(c.arg, not pos)
    if isinstance(c, And):
        args = [_nnf(a, pos) for a in c.args]
        return conj(args) if pos else disj(args)
    if isinstance(c, Or):
        args = [_nnf(a, pos) for a in c.args]
        return disj(args) if pos else conj(args)
    if isinstance(c, Exists):
        if c.bound == 1:
            return Exists(c.role, 1, _nnf(c.arg, True)) if pos else Forall(c.role, 1, _nnf(c.arg, False))
        if c.bound == 0:
            return TOP if pos else BOT
        e = Exists(c.role, c.bound, _nnf(c.arg, True))
        return e if pos else Not(e)
    if isinstance(c, Forall):
        if c.bound == 1:
            return Forall(c.role, 1, _nnf(c.arg, True)) if pos else Exists(c.role, 1, _nnf(c.arg, False))
        return _nnf(Not(Exists(c.role, c.bound, Not(c.arg))), pos)
    raise TypeError(c)


def is_el(c: Concept) -> bool:
    return dialect_of(c).base == "EL" and dialect_of(c).u is None


def _elneg_check(c: Concept):
    d = dialect_of(c)
    if d.u is not None or d.base not in ("EL", "EL⊔", "EL¬"):
        if not (d.base == "EL¬" or d.base == "EL" or d.base == "EL⊔"):
            raise DialectError(f"expected an EL-negation concept, got {d}")


def elneg_nnf(c: Concept) -> Concept:
    """Push negations down to maximal EL subconcepts."""
    _elneg_check(c)
    return _elneg_nnf(c, True)


def _elneg_nnf(c: Concept, pos: bool) -> Concept:
    if is_el(c):
        return c if pos else Not(c)
    if isinstance(c, Bot):
        return BOT if pos else TOP
    if isinstance(c, Not):
        return _elneg_nnf(c.arg, not pos)
    if isinstance(c, And):
        args = [_elneg_nnf(a, pos) for a in c.args]
        return conj(args) if pos else disj(args)
    if isinstance(c, Or):
        args = [_elneg_nnf(a, pos) for a in c.args]
        return disj(args) if pos else conj(args)
    raise DialectError(f"not an EL-negation concept: {render(c)}")


def _cnf_clauses(c: Concept) -> list:
    """Clauses of an NNF concept whose literals are EL concepts or their
    negations.  Each clause is a list of literals."""
    if isinstance(c, And):
        out = []
        for a in c.args:
            out.extend(_cnf_clauses(a))
        return out
    if isinstance(c, Or):
        parts = [_cnf_clauses(a) for a in c.args]
        out = []
        for combo in itertools.product(*parts):
            out.append([lit for cl in combo for lit in cl])
        return out
    if isinstance(c, Top):
        return []
    if isinstance(c, Bot):
        return [[]]
    return [[c]]


def elneg_tbox_to_elsqcup(t: TBox) -> TBox:
    """Rewrite an EL-negation TBox into an equivalent one whose axioms read
    ``conjunction of EL concepts [= disjunction of EL concepts``."""
    out = []
    seen = set()
    for lhs, rhs in t.axioms:
        body = elneg_nnf(disj([Not(lhs), rhs]) if not isinstance(lhs, Top) else rhs)
        for clause in _cnf_clauses(canonical(body)):
            negs, poss = [], []
            for lit in clause:
                if isinstance(lit, Not):
                    negs.append(lit.arg)
                else:
                    poss.append(lit)
            negs = [canonical(n) for n in negs if not isinstance(n, Top)]
            poss = [canonical(p) for p in poss]
            if any(isinstance(p, Top) for p in poss):
                continue
            if set(map(render, negs)) & set(map(render, poss)):
                continue
            ax = (canonical(conj(negs)), canonical(disj(poss)))
            if ax not in seen:
                seen.add(ax)
                out.append(ax)
    return TBox(tuple(out))


def el_disjuncts(c: Concept) -> list:
    """EL concepts whose disjunction is equivalent to the EL-join concept."""
    if isinstance(c, (Top, Name)):
        return [c]
    if isinstance(c, Bot):
        return []
    if isinstance(c, Or):
        out = []
        for a in c.args:
            out.extend(el_disjuncts(a))
        return out
    if isinstance(c, And):
        parts = [el_disjuncts(a) for a in c.args]
        return [canonical(conj(combo)) for combo in itertools.product(*parts)]
    if isinstance(c, Exists) and c.bound == 1 and c.role.kind == "direct":
        return [Exists(c.role, 1, d) for d in el_disjuncts(c.arg)]
    raise DialectError(f"not an EL-join concept: {render(c)}")


def elsqcup_split(c: Concept) -> Concept:
    return canonical(disj(el_disjuncts(c)))


def _has_u(c: Concept) -> bool:
    return any(isinstance(s, (Exists, Forall)) and s.role.universal for s in subconcepts(c))


def _alcu_dnf(c: Concept) -> list:
    """Disjuncts as pairs (local part, tuple of (quantifier, role-u body))."""
    if not _has_u(c):
        return [(c, ())]
    if isinstance(c, And):
        parts = [_alcu_dnf(a) for a in c.args]
        out = []
        for combo in itertools.product(*parts):
            out.append((conj(p[0] for p in combo), tuple(g for p in combo for g in p[1])))
        return out
    if isinstance(c, Or):
        out = []
        for a in c.args:
            out.extend(_alcu_dnf(a))
        return out
    if isinstance(c, (Exists, Forall)):
        inner = _alcu_dnf(c.arg)
        q = "some" if isinstance(c, Exists) else "all"
        if c.role.universal:
            if q == "some":
                return [(TOP, (("some", d0),) + gs) for d0, gs in inner]
            out = []
            for k in range(1, len(inner) + 1):
                for sub in itertools.combinations(inner, k):
                    gs = tuple(g for _, g_list in sub for g in g_list)
                    body = disj(d0 for d0, _ in sub)
                    out.append((TOP, (("all", body),) + gs))
            return out
        if q == "some":
            return [(Exists(c.role, c.bound, d0), gs) for d0, gs in inner]
        out = []
        for k in range(0, len(inner) + 1):
            for sub in itertools.combinations(inner, k):
                gs = tuple(g for _, g_list in sub for g in g_list)
                out.append((Forall(c.role, c.bound, disj(d0 for d0, _ in sub)), gs))
        return out
    raise DialectError(f"unexpected constructor in ALCu normal form: {render(c)}")


def alcu_dnf(c: Concept) -> Concept:
    """Disjunction of conjunctions ``D0 and Q1 u.D1 and ...`` with u-free Di."""
    for s in subconcepts(c):
        if isinstance(s, Nominal) or (isinstance(s, (Exists, Forall)) and s.bound != 1):
            raise DialectError("ALCu normal form expects an ALCu concept")
    out = []
    for d0, gs in _alcu_dnf(nnf(c)):
        parts = [d0] + [Exists(UNIVERSAL, 1, b) if q == "some" else Forall(UNIVERSAL, 1, b) for q, b in gs]
        out.append(conj(parts))
    return canonical(disj(out))


NORMAL_FORMS = ("elneg-nnf", "elneg-tbox-to-elsqcup", "elsqcup-split", "alcu-dnf")


def normalize(x, form: str):
    if form == "elneg-nnf":
        return canonical(elneg_nnf(x))
    if form == "elneg-tbox-to-elsqcup":
        if not isinstance(x, TBox):
            raise DialectError("elneg-tbox-to-elsqcup expects a TBox")
        return elneg_tbox_to_elsqcup(x)
    if form == "elsqcup-split":
        return elsqcup_split(x)
    if form == "alcu-dnf":
        return alcu_dnf(x)
    raise ValueError(f"unknown normal form {form!r}")


# ---------------------------------------------------------------------------
# first-order translation


def fo_translate(c: Concept, i: int = 0) -> str:
    """Standard translation with free variable ``x{i}``.

    Plain quantifiers alternate between two variables; a counting bound k>1
    uses k fresh variables with pairwise inequalities."""
    return _fo(c, i)


def _var(i):
    return f"x{i}"


def _fo(c: Concept, i: int) -> str:
    x = _var(i)
    if isinstance(c, Top):
        return "⊤"
    if isinstance(c, Bot):
        return "⊥"
    if isinstance(c, Name):
        return f"{c.name}({x})"
    if isinstance(c, Nominal):
        return f"({x} = {c.name})"
    if isinstance(c, Not):
        return "¬" + _fo(c.arg, i)
    if isinstance(c, And):
        return "(" + " ∧ ".join(_fo(a, i) for a in c.args) + ")"
    if isinstance(c, Or):
        if len(c.args) == 2 and sum(isinstance(a, Not) for a in c.args) == 1:
            ant, con = (c.args[0], c.args[1]) if isinstance(c.args[0], Not) else (c.args[1], c.args[0])
            return f"({_fo(ant.arg, i)} → {_fo(con, i)})"
        return "(" + " ∨ ".join(_fo(a, i) for a in c.args) + ")"
    if isinstance(c, Forall) and c.bound != 1:
        return _fo(Not(Exists(c.role, c.bound, neg(c.arg))), i)
    if isinstance(c, (Exists, Forall)):
        if c.bound == 0:
            return "⊤" if isinstance(c, Exists) else "⊥"
        if c.role.universal and c.bound == 1:
            q = "∃" if isinstance(c, Exists) else "∀"
            return f"{q}{x}.{_fo(c.arg, i)}"
        if c.bound == 1:
            j = 1 - i if i in (0, 1) else 0
            y = _var(j)
            atom = _edge(c.role, x, y)
            if isinstance(c, Exists):
                return f"∃{y}.({atom} ∧ {_fo(c.arg, j)})"
            return f"∀{y}.({atom} → {_fo(c.arg, j)})"
        # counting: k distinct witnesses
        k = c.bound
        idx = [j for j in range(k + 1) if j != i][:k]
        quant = "".join(f"∃{_var(j)}." for j in idx)
        parts = []
        for a, b in itertools.combinations(idx, 2):
            parts.append(f"{_var(a)} ≠ {_var(b)}")
        for j in idx:
            if not c.role.universal:
                parts.append(_edge(c.role, x, _var(j)))
            parts.append(_fo(c.arg, j))
        return f"{quant}(" + " ∧ ".join(parts) + ")"
    raise TypeError(c)


def _edge(role: Role, x: str, y: str) -> str:
    if role.inverse:
        return f"{role.name}({y},{x})"
    return f"{role.name}({x},{y})"
