"""Syntax trees shared by every stage of the toolchain.

Terms are first order: a variable, or a functor applied to subterms.
Integer literals and atoms are zero-arity functors whose functor text is the
literal itself.  Formulas carry a type name on every quantifier; the
distinguished name ``term`` is the universal type, so an untyped formula is
exactly one whose quantifier annotations are all ``term``.

All values are immutable after construction and safe to share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .diagnostics import SourcePos
from .errors import NonGroundSubstituteError, UnboundVariableError

UNIVERSAL_TYPE = "term"

INT_RE = re.compile(r"-?\d+\Z")
FLOAT_RE = re.compile(r"-?\d+\.\d+([eE][+-]?\d+)?\Z")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name or not (self.name[0].isupper() or self.name[0] == "_"):
            raise ValueError(f"invalid variable name: {self.name!r}")

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __hash__(self) -> int:
        # cached: terms are hashed heavily by the evaluator's memo tables
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.functor, self.args))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({', '.join(map(repr, self.args))})"


Term = Union[Var, Struct]

NIL = Struct("[]")
CONS = "[|]"


def atom(name: str) -> Struct:
    return Struct(name)


def intlit(value: int) -> Struct:
    return Struct(str(value))


def cons(head: Term, tail: Term) -> Struct:
    return Struct(CONS, (head, tail))


def listterm(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def int_value(t: Term):
    """The integer a zero-arity functor denotes, or None."""
    if isinstance(t, Struct) and not t.args and INT_RE.match(t.functor):
        return int(t.functor)
    return None


def is_int_literal(t: Term) -> bool:
    return isinstance(t, Struct) and not t.args and bool(INT_RE.match(t.functor))


def is_float_literal(t: Term) -> bool:
    return isinstance(t, Struct) and not t.args and bool(FLOAT_RE.match(t.functor))


def ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    g = t.__dict__.get("_ground")
    if g is None:
        g = all(ground(a) for a in t.args)
        object.__setattr__(t, "_ground", g)
    return g


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def term_vars(t: Term) -> tuple[str, ...]:
    """Variable names in left-to-right first-occurrence order."""
    out: dict[str, None] = {}

    def walk(u: Term):
        if isinstance(u, Var):
            out.setdefault(u.name)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return tuple(out)


def subst_term(t: Term, binding: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return binding.get(t.name, t)
    if not t.args or ground(t):
        return t
    return Struct(t.functor, tuple(subst_term(a, binding) for a in t.args))


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrueF:
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FalseF:
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()
    pos: SourcePos | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class And:
    items: tuple
    pos: SourcePos | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("And needs at least two conjuncts")


@dataclass(frozen=True)
class Or:
    items: tuple
    pos: SourcePos | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("Or needs at least two disjuncts")


@dataclass(frozen=True)
class Not:
    body: "Formula"
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    var: str
    type_name: str
    body: "Formula"
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Forall:
    var: str
    type_name: str
    body: "Formula"
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


Formula = Union[TrueF, FalseF, Eq, Atom, And, Or, Not, Implies, Iff, Exists, Forall]

TRUE = TrueF()
FALSE = FalseF()


def conj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(items)


def exists_all(pairs: Iterable[tuple[str, str]], body: Formula) -> Formula:
    """Wrap body in Exists binders, first pair outermost."""
    out = body
    for name, type_name in reversed(list(pairs)):
        out = Exists(name, type_name, out)
    return out


def subformulas(f: Formula):
    """Direct children of a formula node."""
    if isinstance(f, (And, Or)):
        return f.items
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def formula_size(f: Formula) -> int:
    return 1 + sum(formula_size(g) for g in subformulas(f))


def has_quantifier(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return True
    return any(has_quantifier(g) for g in subformulas(f))


def free_names(f: Formula) -> tuple[str, ...]:
    """Free variable names in first-occurrence order."""
    seen: dict[str, None] = {}

    def walk(g: Formula, bound: frozenset):
        if isinstance(g, Eq):
            for name in term_vars(g.left) + term_vars(g.right):
                if name not in bound:
                    seen.setdefault(name)
        elif isinstance(g, Atom):
            for a in g.args:
                for name in term_vars(a):
                    if name not in bound:
                        seen.setdefault(name)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, bound | {g.var})
        else:
            for child in subformulas(g):
                walk(child, bound)

    walk(f, frozenset())
    return tuple(seen)


def all_names(f: Formula) -> frozenset:
    """Every variable name occurring in the formula, free or bound."""
    out: set = set()

    def walk(g: Formula):
        if isinstance(g, Eq):
            out.update(term_vars(g.left))
            out.update(term_vars(g.right))
        elif isinstance(g, Atom):
            for a in g.args:
                out.update(term_vars(a))
        elif isinstance(g, (Exists, Forall)):
            out.add(g.var)
            walk(g.body)
        else:
            for child in subformulas(g):
                walk(child)

    walk(f)
    return frozenset(out)


def free_variables(f: Formula, env: Mapping[str, str] | None = None) -> tuple[tuple[str, str], ...]:
    """Free variables with their types, in first-occurrence order.

    Types come from the supplied environment; quantified occurrences take the
    binder's annotation and are excluded.  Raises UnboundVariableError for a
    free variable missing from the environment.
    """
    env = env or {}
    out = []
    for name in free_names(f):
        if name not in env:
            raise UnboundVariableError(f"no type for free variable {name}")
        out.append((name, env[name]))
    return tuple(out)


def substitute(f: Formula, binding: Mapping[str, Term]) -> Formula:
    """Replace free occurrences of the bound names by ground terms."""
    for name, value in binding.items():
        if not ground(value):
            raise NonGroundSubstituteError(f"replacement for {name} is not ground")
    return _substitute(f, dict(binding))


def rename_free(f: Formula, old: str, new: str) -> Formula:
    """Alpha-rename free occurrences of one variable."""
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Eq):
        m = {old: Var(new)}
        return Eq(subst_term(f.left, m), subst_term(f.right, m), pos=f.pos)
    if isinstance(f, Atom):
        m = {old: Var(new)}
        return Atom(f.predicate, tuple(subst_term(a, m) for a in f.args), pos=f.pos)
    if isinstance(f, And):
        return And(tuple(rename_free(g, old, new) for g in f.items), pos=f.pos)
    if isinstance(f, Or):
        return Or(tuple(rename_free(g, old, new) for g in f.items), pos=f.pos)
    if isinstance(f, Not):
        return Not(rename_free(f.body, old, new), pos=f.pos)
    if isinstance(f, Implies):
        return Implies(rename_free(f.left, old, new), rename_free(f.right, old, new), pos=f.pos)
    if isinstance(f, Iff):
        return Iff(rename_free(f.left, old, new), rename_free(f.right, old, new), pos=f.pos)
    if isinstance(f, (Exists, Forall)):
        if f.var == old:
            return f
        return type(f)(f.var, f.type_name, rename_free(f.body, old, new), pos=f.pos)
    raise TypeError(f"not a formula: {f!r}")


def _substitute(f: Formula, binding: dict) -> Formula:
    if not binding:
        return f
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, binding), subst_term(f.right, binding), pos=f.pos)
    if isinstance(f, Atom):
        return Atom(f.predicate, tuple(subst_term(a, binding) for a in f.args), pos=f.pos)
    if isinstance(f, And):
        return And(tuple(_substitute(g, binding) for g in f.items), pos=f.pos)
    if isinstance(f, Or):
        return Or(tuple(_substitute(g, binding) for g in f.items), pos=f.pos)
    if isinstance(f, Not):
        return Not(_substitute(f.body, binding), pos=f.pos)
    if isinstance(f, Implies):
        return Implies(_substitute(f.left, binding), _substitute(f.right, binding), pos=f.pos)
    if isinstance(f, Iff):
        return Iff(_substitute(f.left, binding), _substitute(f.right, binding), pos=f.pos)
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in binding.items() if k != f.var}
        body = _substitute(f.body, inner)
        return type(f)(f.var, f.type_name, body, pos=f.pos)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Descriptions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypedLogicDescription:
    """p(X1:t1, ..., Xn:tn) <=> definition, with implicit existentials made explicit."""

    predicate: str
    params: tuple  # of (name, type_name)
    definition: Formula
    pos: SourcePos | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.params, tuple):
            object.__setattr__(self, "params", tuple(self.params))
        names = [n for n, _ in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {self.predicate}")

    @property
    def arity(self) -> int:
        return len(self.params)

    def param_env(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class LogicDescription:
    """p(X1, ..., Xn) <=> definition, over untyped first order logic."""

    predicate: str
    params: tuple  # of name
    definition: Formula

    def __post_init__(self):
        if not isinstance(self.params, tuple):
            object.__setattr__(self, "params", tuple(self.params))

    @property
    def arity(self) -> int:
        return len(self.params)


# ---------------------------------------------------------------------------
# Clauses and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Unify:
    left: Term
    right: Term


@dataclass(frozen=True)
class Call:
    predicate: str
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class TypeCheck:
    type_name: str
    arg: Term


@dataclass(frozen=True)
class NafNot:
    literal: "Literal"


Literal = Union[Unify, Call, TypeCheck, NafNot]


def literal_vars(lit: Literal) -> tuple[str, ...]:
    if isinstance(lit, Unify):
        out: dict[str, None] = {}
        for name in term_vars(lit.left) + term_vars(lit.right):
            out.setdefault(name)
        return tuple(out)
    if isinstance(lit, Call):
        out = {}
        for a in lit.args:
            for name in term_vars(a):
                out.setdefault(name)
        return tuple(out)
    if isinstance(lit, TypeCheck):
        return term_vars(lit.arg)
    return literal_vars(lit.literal)


@dataclass(frozen=True)
class Clause:
    predicate: str
    head_args: tuple  # of Term, distinct variables after derivation
    body: tuple  # of Literal, order significant
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        if not isinstance(self.head_args, tuple):
            object.__setattr__(self, "head_args", tuple(self.head_args))
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))

    @property
    def arity(self) -> int:
        return len(self.head_args)


@dataclass(frozen=True)
class Program:
    predicate: str
    arity: int
    clauses: tuple  # of Clause

    def __post_init__(self):
        if not isinstance(self.clauses, tuple):
            object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if c.predicate != self.predicate or c.arity != self.arity:
                raise ValueError("clause head does not match program predicate")
