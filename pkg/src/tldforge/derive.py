"""Deriving executable clauses from an untyped logic description.

The definition is brought to disjunctive normal form: equivalences and
implications expand classically, negation is pushed down to atomic literals
(negation as failure), existentials are hoisted outward with fresh renaming,
and each resulting disjunct becomes one clause.  A universal quantifier that
survives in a body position falls outside the derivable fragment and is
rejected loudly.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .ast import (And, Atom, Call, Clause, Eq, Exists, FalseF, Forall, Formula,
                  Iff, Implies, LogicDescription, NafNot, Not, Or, Program,
                  TrueF, TypeCheck, Unify, Var)
from .errors import NotDerivableError


@dataclass(frozen=True)
class Disjunct:
    exvars: tuple  # of (name, type_name), clause-local after hoisting
    literals: tuple  # of Literal, order significant


@dataclass(frozen=True)
class NormalizedBody:
    disjuncts: tuple  # of Disjunct


def _where(f: Formula) -> str:
    return f" at {f.pos}" if getattr(f, "pos", None) else ""


def _nnf(f: Formula, positive: bool) -> Formula:
    if isinstance(f, TrueF):
        return ast.TRUE if positive else ast.FALSE
    if isinstance(f, FalseF):
        return ast.FALSE if positive else ast.TRUE
    if isinstance(f, (Eq, Atom)):
        return f if positive else Not(f, pos=f.pos)
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, And):
        parts = tuple(_nnf(g, positive) for g in f.items)
        return And(parts, pos=f.pos) if positive else Or(parts, pos=f.pos)
    if isinstance(f, Or):
        parts = tuple(_nnf(g, positive) for g in f.items)
        return Or(parts, pos=f.pos) if positive else And(parts, pos=f.pos)
    if isinstance(f, Implies):
        if positive:
            return Or((_nnf(f.left, False), _nnf(f.right, True)), pos=f.pos)
        return And((_nnf(f.left, True), _nnf(f.right, False)), pos=f.pos)
    if isinstance(f, Iff):
        if positive:
            return Or((And((_nnf(f.left, True), _nnf(f.right, True))),
                       And((_nnf(f.left, False), _nnf(f.right, False)))), pos=f.pos)
        return Or((And((_nnf(f.left, True), _nnf(f.right, False))),
                   And((_nnf(f.left, False), _nnf(f.right, True)))), pos=f.pos)
    if isinstance(f, Exists):
        if not positive:
            raise NotDerivableError(
                "negation over an existential quantifier leaves a universal "
                f"in a body position{_where(f)}")
        return Exists(f.var, f.type_name, _nnf(f.body, True), pos=f.pos)
    if isinstance(f, Forall):
        if positive:
            raise NotDerivableError(
                f"universal quantifier in a body position{_where(f)}")
        return Exists(f.var, f.type_name, _nnf(f.body, False), pos=f.pos)
    raise TypeError(f"not a formula: {f!r}")


def _fresh(base: str, used: set) -> str:
    if base not in used:
        return base
    k = 1
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def _hoist(f: Formula, used: set) -> tuple[list, Formula]:
    """Pull existentials to the front, renaming on collision so that no
    binder name repeats anywhere in the matrix."""
    if isinstance(f, Exists):
        name = f.var
        body = f.body
        if name in used:
            name = _fresh(f.var, used)
            body = ast.rename_free(body, f.var, name)
        used.add(name)
        inner, matrix = _hoist(body, used)
        return [(name, f.type_name)] + inner, matrix
    if isinstance(f, (And, Or)):
        binders: list = []
        parts = []
        for g in f.items:
            b, m = _hoist(g, used)
            binders.extend(b)
            parts.append(m)
        return binders, type(f)(tuple(parts), pos=f.pos)
    return [], f


def _dnf(f: Formula) -> list[list[Formula]]:
    if isinstance(f, TrueF):
        return [[]]
    if isinstance(f, FalseF):
        return []
    if isinstance(f, Or):
        out: list[list[Formula]] = []
        for g in f.items:
            out.extend(_dnf(g))
        return out
    if isinstance(f, And):
        out = [[]]
        for g in f.items:
            branches = _dnf(g)
            out = [left + right for left in out for right in branches]
        return out
    return [[f]]


def _rename_literal(lit, renaming: dict):
    if isinstance(lit, Unify):
        return Unify(ast.subst_term(lit.left, renaming),
                     ast.subst_term(lit.right, renaming))
    if isinstance(lit, Call):
        return Call(lit.predicate, tuple(ast.subst_term(a, renaming) for a in lit.args))
    if isinstance(lit, TypeCheck):
        return TypeCheck(lit.type_name, ast.subst_term(lit.arg, renaming))
    return NafNot(_rename_literal(lit.literal, renaming))


def _to_literal(f: Formula, type_names: frozenset):
    if isinstance(f, Eq):
        return Unify(f.left, f.right)
    if isinstance(f, Atom):
        if len(f.args) == 1 and f.predicate in type_names:
            return TypeCheck(f.predicate, f.args[0])
        return Call(f.predicate, f.args)
    if isinstance(f, Not):
        if isinstance(f.body, (Eq, Atom)):
            return NafNot(_to_literal(f.body, type_names))
        raise NotDerivableError(
            f"negation landed on a non-atomic residue{_where(f)}")
    raise NotDerivableError(
        f"formula cannot become a body literal: {f!r}{_where(f)}")


def normalize(ld: LogicDescription, type_names: frozenset = frozenset()) -> NormalizedBody:
    """Flatten the definition to ordered disjuncts of literals.

    Duplicate type-check literals within one disjunct collapse to the first
    occurrence (conjunction idempotence).
    """
    nnf = _nnf(ld.definition, True)
    used = set(ld.params) | set(ast.free_names(ld.definition))
    binders, matrix = _hoist(nnf, used)
    taken = set(ld.params) | set(ast.free_names(ld.definition))
    disjuncts = []
    for conjuncts in _dnf(matrix):
        literals = []
        seen_checks = set()
        for c in conjuncts:
            lit = _to_literal(c, type_names)
            if isinstance(lit, TypeCheck):
                if lit in seen_checks:
                    continue
                seen_checks.add(lit)
            literals.append(lit)
        occurring = set()
        for lit in literals:
            occurring.update(ast.literal_vars(lit))
        # a binder shared across disjuncts through distribution gets a fresh
        # name per disjunct: no clause-local name repeats across clauses
        exvars = []
        renaming: dict = {}
        for n, t in binders:
            if n not in occurring:
                continue
            name = n
            if name in taken:
                name = _fresh(n, taken | occurring)
                renaming[n] = Var(name)
            taken.add(name)
            exvars.append((name, t))
        if renaming:
            literals = [_rename_literal(lit, renaming) for lit in literals]
        disjuncts.append(Disjunct(tuple(exvars), tuple(literals)))
    return NormalizedBody(tuple(disjuncts))


def derive_clauses(ld: LogicDescription, type_names: frozenset = frozenset()) -> Program:
    """One clause per disjunct, head over the original parameter variables."""
    nb = normalize(ld, type_names)
    head = tuple(Var(p) for p in ld.params)
    clauses = []
    total = len(nb.disjuncts)
    for i, d in enumerate(nb.disjuncts, start=1):
        clauses.append(Clause(ld.predicate, head, d.literals,
                              provenance=f"disjunct {i} of {total}"))
    return Program(ld.predicate, len(ld.params), tuple(clauses))


# ---------------------------------------------------------------------------
# Back to formulas (for bounded-instance comparison and stage dumps)
# ---------------------------------------------------------------------------

def literal_formula(lit) -> Formula:
    if isinstance(lit, Unify):
        return Eq(lit.left, lit.right)
    if isinstance(lit, Call):
        return Atom(lit.predicate, lit.args)
    if isinstance(lit, TypeCheck):
        return Atom(lit.type_name, (lit.arg,))
    if isinstance(lit, NafNot):
        return Not(literal_formula(lit.literal))
    raise TypeError(f"not a literal: {lit!r}")


def body_formula(clause: Clause) -> Formula:
    """The clause body as a closed-off formula: locals become existentials."""
    body = ast.conj([literal_formula(lit) for lit in clause.body])
    head_names = set()
    for t in clause.head_args:
        head_names.update(ast.term_vars(t))
    locals_ = [n for n in ast.free_names(body) if n not in head_names]
    return ast.exists_all([(n, ast.UNIVERSAL_TYPE) for n in locals_], body)


def program_formula(prog: Program) -> Formula:
    """The whole program read as a definition: the disjunction of its
    clause bodies (heads must share one variable tuple)."""
    return ast.disj([body_formula(c) for c in prog.clauses])


def normalized_formula(nb: NormalizedBody) -> Formula:
    return ast.disj([
        ast.exists_all(d.exvars, ast.conj([literal_formula(lit) for lit in d.literals]))
        for d in nb.disjuncts])
