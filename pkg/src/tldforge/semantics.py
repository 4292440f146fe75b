"""Bounded-universe evaluation of typed and untyped formulas.

Evaluation is three valued: ``unknown`` arises only when a predicate
unfolding bound is hit, and it is viral through connectives except where
absorption applies (false /\\ _ = false, true \\/ _ = true).  Quantifiers
range over the bounded enumeration of their annotated type; the universal
type ranges over all terms of the environment's signature up to the depth
bound, so a true/false verdict is a fact about the bounded universe.

The evaluator solves determining equations inside exists blocks and the
equivalence checker sweeps free variables with partial evaluation and bulk
counting.  Both are pure speedups: results are identical to brute-force
enumeration (see evaluate_reference, which the tests compare against).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Mapping

from . import ast
from .ast import (And, Atom, Eq, Exists, FalseF, Forall, Formula, Iff, Implies,
                  Not, Or, Struct, Term, TrueF, TypedLogicDescription,
                  UNIVERSAL_TYPE, Var)
from .errors import MissingBindingError, UnknownPredicateError
from .typesys import TypeEnv

TYPED = "typed"
UNTYPED = "untyped"


class Truth(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


TRUE, FALSE, UNKNOWN = Truth.TRUE, Truth.FALSE, Truth.UNKNOWN


def truth_not(v: Truth) -> Truth:
    if v is TRUE:
        return FALSE
    if v is FALSE:
        return TRUE
    return UNKNOWN


def _ints(args):
    vals = [ast.int_value(a) for a in args]
    return None if any(v is None for v in vals) else vals


def _arith3(op):
    def run(args):
        vals = _ints(args)
        if vals is None:
            return FALSE
        return TRUE if op(vals[0], vals[1]) == vals[2] else FALSE
    return run


def _cmp2(op):
    def run(args):
        vals = _ints(args)
        if vals is None:
            return FALSE
        return TRUE if op(vals[0], vals[1]) else FALSE
    return run


BUILTIN_PREDICATES = {
    "plus": _arith3(lambda a, b: a + b),
    "minus": _arith3(lambda a, b: a - b),
    "times": _arith3(lambda a, b: a * b),
    "max": _arith3(max),
    "min": _arith3(min),
    "lt": _cmp2(lambda a, b: a < b),
    "le": _cmp2(lambda a, b: a <= b),
    "gt": _cmp2(lambda a, b: a > b),
    "ge": _cmp2(lambda a, b: a >= b),
}

_NO_SOLUTION = object()
_NOT_DETERMINED = object()
_INVERTIBLE = ("plus", "minus", "times", "max", "min")


def _invert_builtin(name: str, known: list, hole: int):
    """The unique integer making the builtin true, if exactly one exists.

    ``known`` lists the two ground argument values (ints or None when not an
    integer literal); ``hole`` is the open position 0..2.  Returns
    _NO_SOLUTION when nothing can satisfy the call, _NOT_DETERMINED when the
    solution is not unique or unknown.
    """
    if any(v is None for v in known):
        return _NO_SOLUTION  # ground non-integer arguments never satisfy
    a, b = known
    if name == "plus":
        return (b - a) if hole == 0 else (b - a) if hole == 1 else a + b
    if name == "minus":
        # a - b = c, known values in argument order around the hole
        if hole == 0:
            return b + a  # X - a = b
        if hole == 1:
            return a - b  # a - X = b
        return a - b
    if name == "times":
        if hole == 2:
            return a * b
        if a == 0:
            return _NOT_DETERMINED if b == 0 else _NO_SOLUTION
        return b // a if b % a == 0 else _NO_SOLUTION
    if name in ("max", "min"):
        if hole == 2:
            return max(a, b) if name == "max" else min(a, b)
        other, result = a, b
        if name == "max":
            if other > result:
                return _NO_SOLUTION
            if other == result:
                return _NOT_DETERMINED  # any value up to the result works
            return result
        if other < result:
            return _NO_SOLUTION
        if other == result:
            return _NOT_DETERMINED
        return result
    return _NOT_DETERMINED


@dataclass(frozen=True)
class EvalContext:
    """Types, predicate meanings, and the two bounds.

    ``predicates`` maps a name to a typed description, an untyped
    description, or a (typed, untyped) pair; with a pair, the typed side of
    an equivalence check unfolds the first and the untyped side the second.
    """

    types: TypeEnv
    predicates: Mapping[str, object] = field(default_factory=dict)
    universe_depth: int = 2
    unfold_depth: int = 4

    def __post_init__(self):
        if self.universe_depth < 1 or self.unfold_depth < 1:
            raise ValueError("bounds must be at least 1")


def _pick_description(entry, side: str):
    if isinstance(entry, tuple):
        return entry[0] if side == TYPED else entry[1]
    return entry


def _fresh_name(base: str, used) -> str:
    k = 1
    while f"{base}_{k}" in used:
        k += 1
    return f"{base}_{k}"


def _mandatory_conjuncts(kernel: Formula, forbidden: frozenset = frozenset()):
    """Conjuncts that must hold for the kernel to hold, also looking through
    nested existential conjuncts (whose binders become forbidden names)."""
    parts = kernel.items if isinstance(kernel, And) else (kernel,)
    for c in parts:
        if isinstance(c, Exists):
            inner = set(forbidden)
            body: Formula = c
            while isinstance(body, Exists):
                inner.add(body.var)
                body = body.body
            yield from _mandatory_conjuncts(body, frozenset(inner))
        elif isinstance(c, And):
            yield from _mandatory_conjuncts(c, forbidden)
        else:
            yield (c, forbidden)


def _match(pattern: Term, value: Term, out: dict) -> bool:
    """One-way match of a pattern with variables against a ground term."""
    if isinstance(pattern, Var):
        seen = out.get(pattern.name)
        if seen is None:
            out[pattern.name] = value
            return True
        return seen == value
    if not isinstance(value, Struct):
        return False
    if pattern.functor != value.functor or pattern.arity != value.arity:
        return False
    return all(_match(p, v, out) for p, v in zip(pattern.args, value.args))


class _Evaluator:
    def __init__(self, ctx: EvalContext, side: str = TYPED, partial: bool = False):
        self.ctx = ctx
        self.side = side
        self.partial = partial
        self._memo: dict = {}
        self._free_cache: dict = {}
        self._order_cache: dict = {}
        self._keepalive: list = []

    # -- caches -------------------------------------------------------------

    def _free(self, f: Formula) -> frozenset:
        key = id(f)
        hit = self._free_cache.get(key)
        if hit is None:
            hit = frozenset(ast.free_names(f))
            self._free_cache[key] = hit
            self._keepalive.append(f)
        return hit

    def _ordered_items(self, f) -> tuple:
        key = id(f)
        hit = self._order_cache.get(key)
        if hit is None:
            hit = tuple(sorted(
                f.items,
                key=lambda g: (ast.has_quantifier(g), ast.formula_size(g))))
            self._order_cache[key] = hit
            self._keepalive.append(f)
        return hit

    def universe(self, type_name: str) -> tuple:
        return self.ctx.types.enumerate_type(type_name, self.ctx.universe_depth)

    def universe_set(self, type_name: str) -> frozenset:
        key = ("uset", type_name)
        hit = self._order_cache.get(key)
        if hit is None:
            hit = frozenset(self.universe(type_name))
            self._order_cache[key] = hit
        return hit

    # -- terms ---------------------------------------------------------------

    def _subst(self, t: Term, binding: Mapping[str, Term]) -> Term:
        out = ast.subst_term(t, binding)
        if not self.partial and not ast.ground(out):
            missing = ast.term_vars(out)[0]
            raise MissingBindingError(f"no binding for variable {missing}")
        return out

    # -- formulas -------------------------------------------------------------

    def eval(self, f: Formula, binding: Mapping[str, Term], budget: int | None = None) -> Truth:
        if budget is None:
            budget = self.ctx.unfold_depth
        return self._eval(f, binding, budget)

    def _eval(self, f: Formula, binding, budget: int) -> Truth:
        if isinstance(f, TrueF):
            return TRUE
        if isinstance(f, FalseF):
            return FALSE
        if isinstance(f, Eq):
            left = self._subst(f.left, binding)
            right = self._subst(f.right, binding)
            if ast.ground(left) and ast.ground(right):
                return TRUE if left == right else FALSE
            return UNKNOWN
        if isinstance(f, Atom):
            return self._atom(f, binding, budget)
        if isinstance(f, And):
            result = TRUE
            for g in self._ordered_items(f):
                v = self._eval(g, binding, budget)
                if v is FALSE:
                    return FALSE
                if v is UNKNOWN:
                    result = UNKNOWN
            return result
        if isinstance(f, Or):
            result = FALSE
            for g in self._ordered_items(f):
                v = self._eval(g, binding, budget)
                if v is TRUE:
                    return TRUE
                if v is UNKNOWN:
                    result = UNKNOWN
            return result
        if isinstance(f, Not):
            return truth_not(self._eval(f.body, binding, budget))
        if isinstance(f, Implies):
            va = self._eval(f.left, binding, budget)
            if va is FALSE:
                return TRUE
            vb = self._eval(f.right, binding, budget)
            if vb is TRUE:
                return TRUE
            if va is TRUE and vb is FALSE:
                return FALSE
            return UNKNOWN
        if isinstance(f, Iff):
            va = self._eval(f.left, binding, budget)
            vb = self._eval(f.right, binding, budget)
            if va is UNKNOWN or vb is UNKNOWN:
                return UNKNOWN
            return TRUE if va is vb else FALSE
        if isinstance(f, (Exists, Forall)):
            # memo keyed by the values of the node's free variables: block
            # evaluation is expensive and sweeps revisit the same projections
            proj = tuple(binding.get(n) for n in sorted(self._free(f)))
            key = (id(f), budget, proj)
            hit = self._memo.get(key)
            if hit is not None:
                return hit
            if isinstance(f, Exists):
                out = self._exists_block([], f, dict(binding), budget)
            else:
                out = self._forall_block([], f, dict(binding), budget)
            self._memo[key] = out
            self._keepalive.append(f)
            return out
        raise TypeError(f"not a formula: {f!r}")

    def _atom(self, f: Atom, binding, budget: int) -> Truth:
        name = f.predicate
        args = tuple(self._subst(a, binding) for a in f.args)
        if len(args) == 1 and name in self.ctx.types:
            if not ast.ground(args[0]):
                return UNKNOWN
            return TRUE if self.ctx.types.is_member(name, args[0]) else FALSE
        if not all(ast.ground(a) for a in args):
            return UNKNOWN
        entry = self.ctx.predicates.get(name)
        if entry is not None:
            if budget <= 0:
                return UNKNOWN
            key = (name, args, budget)
            hit = self._memo.get(key)
            if hit is not None:
                return hit
            desc = _pick_description(entry, self.side)
            if isinstance(desc, TypedLogicDescription):
                params = [n for n, _ in desc.params]
            else:
                params = list(desc.params)
            if len(params) != len(args):
                raise UnknownPredicateError(
                    f"{name} called with {len(args)} args, defined with {len(params)}")
            out = self._eval(desc.definition, dict(zip(params, args)), budget - 1)
            self._memo[key] = out
            return out
        builtin = BUILTIN_PREDICATES.get(name)
        if builtin is not None:
            return builtin(args)
        raise UnknownPredicateError(f"no description for predicate {name}/{len(args)}")

    # -- quantifier blocks ----------------------------------------------------

    def _absorb(self, block: list, kernel: Formula, binding: dict, cls) -> Formula:
        """Fold a leading chain of same-kind quantifiers into the block,
        renaming a binder that would collide with an existing name."""
        while isinstance(kernel, cls):
            name = kernel.var
            body = kernel.body
            taken = {n for n, _ in block} | set(binding)
            if name in taken:
                fresh = _fresh_name(name, taken | ast.all_names(body))
                body = ast.rename_free(body, name, fresh)
                name = fresh
            block.append((name, kernel.type_name))
            kernel = body
        return kernel

    def _exists_block(self, block, kernel: Formula, binding: dict, budget: int) -> Truth:
        kernel = self._absorb(block, kernel, binding, Exists)
        if isinstance(kernel, Or):
            result = FALSE
            for d in kernel.items:
                v = self._exists_block(list(block), d, dict(binding), budget)
                if v is TRUE:
                    return TRUE
                if v is UNKNOWN:
                    result = UNKNOWN
            return result
        free = self._free(kernel)
        live = []
        for name, tname in block:
            if name in free:
                live.append((name, tname))
            elif not self.universe(tname):
                return FALSE  # exists over an empty domain
        if not live:
            return self._eval(kernel, binding, budget)
        solved = self._solve_equation(live, kernel, binding)
        if solved is FALSE:
            return FALSE
        if solved is not None:
            bound_here, remaining = solved
            return self._exists_block(remaining, kernel, {**binding, **bound_here}, budget)
        if self.partial:
            live_names = {n for n, _ in live}
            outer = free - live_names - set(binding)
            if outer:
                # enumeration cannot settle anything that depends on an
                # unbound outer variable; refute via decidable mandatory
                # conjuncts or give up conservatively
                for c, forbidden in _mandatory_conjuncts(kernel):
                    cvars = self._free(c)
                    if cvars & (forbidden | live_names):
                        continue
                    if not cvars <= set(binding):
                        continue
                    if self._eval(c, binding, budget) is FALSE:
                        return FALSE
                return UNKNOWN
        (name, tname), rest = live[0], live[1:]
        result = FALSE
        for value in self._narrowed_domain(name, tname, kernel):
            v = self._exists_block(list(rest), kernel, {**binding, name: value}, budget)
            if v is TRUE:
                return TRUE
            if v is UNKNOWN:
                result = UNKNOWN
        return result

    def _narrowed_domain(self, name: str, tname: str, kernel: Formula):
        """A membership conjunct on the variable restricts its enumeration;
        values outside the check would falsify the kernel anyway."""
        for c, forbidden in _mandatory_conjuncts(kernel):
            if (isinstance(c, Atom) and len(c.args) == 1
                    and isinstance(c.args[0], Var) and c.args[0].name == name
                    and name not in forbidden and c.predicate in self.ctx.types):
                allowed = self.universe_set(tname)
                return tuple(v for v in self.universe(c.predicate) if v in allowed)
        return self.universe(tname)

    def _solve_equation(self, live, kernel: Formula, binding):
        """Find a mandatory equation forcing values for block variables.

        Equations under nested existential conjuncts count as mandatory as
        long as they avoid the inner binders.  Returns FALSE when such an
        equation is unsatisfiable inside the bounded universe, a
        (bound, remaining) pair when variables were determined, or None.
        """
        live_names = {n for n, _ in live}
        types = dict(live)
        for c, forbidden in _mandatory_conjuncts(kernel):
            if isinstance(c, Atom) and c.predicate in _INVERTIBLE \
                    and len(c.args) == 3 and c.predicate not in self.ctx.predicates:
                if forbidden and any(set(ast.term_vars(a)) & forbidden
                                     for a in c.args):
                    continue
                args = [ast.subst_term(a, binding) for a in c.args]
                open_positions = [i for i, a in enumerate(args) if not ast.ground(a)]
                if len(open_positions) != 1:
                    continue
                hole = open_positions[0]
                target = args[hole]
                if not isinstance(target, Var) or target.name not in live_names:
                    continue
                known = [ast.int_value(a) for i, a in enumerate(args) if i != hole]
                solved = _invert_builtin(c.predicate, known, hole)
                if solved is _NOT_DETERMINED:
                    continue
                if solved is _NO_SOLUTION:
                    return FALSE
                value = Struct(str(solved))
                if value not in self.universe_set(types[target.name]):
                    return FALSE  # the only satisfying value is out of reach
                remaining = [(n, t) for n, t in live if n != target.name]
                return ({target.name: value}, remaining)
            if not isinstance(c, Eq):
                continue
            if forbidden and (set(ast.term_vars(c.left))
                              | set(ast.term_vars(c.right))) & forbidden:
                continue
            left = ast.subst_term(c.left, binding)
            right = ast.subst_term(c.right, binding)
            lg, rg = ast.ground(left), ast.ground(right)
            if lg and rg:
                if left != right:
                    return FALSE
                continue
            if lg:
                pattern, value = right, left
            elif rg:
                pattern, value = left, right
            else:
                continue
            sol: dict = {}
            if not _match(pattern, value, sol):
                return FALSE
            bound_here = {k: v for k, v in sol.items() if k in live_names}
            if not bound_here:
                continue
            for k, v in bound_here.items():
                # a witness must come from the enumerated domain itself
                if v not in self.universe_set(types[k]):
                    return FALSE
            remaining = [(n, t) for n, t in live if n not in bound_here]
            return (bound_here, remaining)
        return None

    def _forall_block(self, block, kernel: Formula, binding: dict, budget: int) -> Truth:
        kernel = self._absorb(block, kernel, binding, Forall)
        if isinstance(kernel, And):
            result = TRUE
            for c in kernel.items:
                v = self._forall_block(list(block), c, dict(binding), budget)
                if v is FALSE:
                    return FALSE
                if v is UNKNOWN:
                    result = UNKNOWN
            return result
        free = self._free(kernel)
        live = [(n, t) for n, t in block if n in free]
        if not live:
            for name, tname in block:
                if not self.universe(tname):
                    return TRUE  # vacuous over an empty domain
            return self._eval(kernel, binding, budget)
        if self.partial and free - {n for n, _ in live} - set(binding):
            return UNKNOWN
        (name, tname), rest = live[0], live[1:]
        result = TRUE
        for value in self.universe(tname):
            v = self._forall_block(list(rest), kernel, {**binding, name: value}, budget)
            if v is FALSE:
                return FALSE
            if v is UNKNOWN:
                result = UNKNOWN
        return result


def evaluate(ctx: EvalContext, f: Formula, binding: Mapping[str, Term],
             side: str = TYPED) -> Truth:
    """Evaluate a formula under a ground binding of its free variables."""
    for name, value in binding.items():
        if not ast.ground(value):
            raise MissingBindingError(f"binding for {name} is not ground")
    return _Evaluator(ctx, side=side).eval(f, dict(binding))


def evaluate_reference(ctx: EvalContext, f: Formula, binding: Mapping[str, Term],
                       side: str = TYPED, budget: int | None = None) -> Truth:
    """Naive enumeration-only evaluator; the oracle the fast one must agree with."""
    if budget is None:
        budget = ctx.unfold_depth

    def run(g: Formula, b: dict, k: int) -> Truth:
        if isinstance(g, TrueF):
            return TRUE
        if isinstance(g, FalseF):
            return FALSE
        if isinstance(g, Eq):
            return TRUE if ast.subst_term(g.left, b) == ast.subst_term(g.right, b) else FALSE
        if isinstance(g, Atom):
            args = tuple(ast.subst_term(a, b) for a in g.args)
            if len(args) == 1 and g.predicate in ctx.types:
                return TRUE if ctx.types.is_member(g.predicate, args[0]) else FALSE
            entry = ctx.predicates.get(g.predicate)
            if entry is not None:
                if k <= 0:
                    return UNKNOWN
                desc = _pick_description(entry, side)
                if isinstance(desc, TypedLogicDescription):
                    params = [n for n, _ in desc.params]
                else:
                    params = list(desc.params)
                return run(desc.definition, dict(zip(params, args)), k - 1)
            builtin = BUILTIN_PREDICATES.get(g.predicate)
            if builtin is None:
                raise UnknownPredicateError(g.predicate)
            return builtin(args)
        if isinstance(g, And):
            vs = [run(x, b, k) for x in g.items]
            if FALSE in vs:
                return FALSE
            return UNKNOWN if UNKNOWN in vs else TRUE
        if isinstance(g, Or):
            vs = [run(x, b, k) for x in g.items]
            if TRUE in vs:
                return TRUE
            return UNKNOWN if UNKNOWN in vs else FALSE
        if isinstance(g, Not):
            return truth_not(run(g.body, b, k))
        if isinstance(g, Implies):
            return run(Or((Not(g.left), g.right)), b, k)
        if isinstance(g, Iff):
            va, vb = run(g.left, b, k), run(g.right, b, k)
            if UNKNOWN in (va, vb):
                return UNKNOWN
            return TRUE if va is vb else FALSE
        if isinstance(g, (Exists, Forall)):
            domain = ctx.types.enumerate_type(g.type_name, ctx.universe_depth)
            vs = []
            for value in domain:
                vs.append(run(g.body, {**b, g.var: value}, k))
            if isinstance(g, Exists):
                if TRUE in vs:
                    return TRUE
                return UNKNOWN if UNKNOWN in vs else FALSE
            if FALSE in vs:
                return FALSE
            return UNKNOWN if UNKNOWN in vs else TRUE
        raise TypeError(f"not a formula: {g!r}")

    return run(f, dict(binding), budget)


# ---------------------------------------------------------------------------
# Equivalence checking
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceReport:
    depth: int
    total: int = 0
    outside: int = 0
    outside_false: int = 0
    inside: int = 0
    inside_agree: int = 0
    violations: int = 0
    inconclusive: int = 0
    first_violation: dict | None = None
    first_violation_kind: str | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def describe(self) -> str:
        lines = [
            f"depth {self.depth}: checked {self.total} bindings "
            f"({self.outside} outside the types, {self.inside} inside)",
            f"  outside-type bindings with the untyped formula false: {self.outside_false}",
            f"  inside-type bindings where both sides agree: {self.inside_agree}",
            f"  violations: {self.violations}, inconclusive: {self.inconclusive}",
        ]
        if self.first_violation is not None:
            pretty = ", ".join(f"{k} = {v!r}" for k, v in self.first_violation.items())
            lines.append(f"  first violation ({self.first_violation_kind}): {pretty}")
        return "\n".join(lines)


def check_equivalence(ctx: EvalContext, typed_f: Formula, untyped_f: Formula,
                      freevars, depth: int | None = None) -> EquivalenceReport:
    """Check the typed/untyped equivalence contract over the bounded universe.

    For every binding of the free variables over the term universe: if some
    variable falls outside its declared type the untyped formula must be
    false; inside the types both formulas must evaluate alike.  ``unknown``
    outcomes are reported as inconclusive, not as violations.
    """
    if depth is not None:
        ctx = replace(ctx, universe_depth=depth)
    freevars = list(freevars)
    names = [n for n, _ in freevars]
    n = len(names)
    ev_t = _Evaluator(ctx, side=TYPED, partial=True)
    ev_u = _Evaluator(ctx, side=UNTYPED, partial=True)
    universe = list(ctx.types.enumerate_type(UNIVERSAL_TYPE, ctx.universe_depth))
    in_lists = []
    in_sets = []
    for _, tname in freevars:
        members = set(ctx.types.enumerate_type(tname, ctx.universe_depth))
        ordered = [v for v in universe if v in members]
        in_lists.append(ordered)
        in_sets.append(members)
    U = len(universe)
    report = EquivalenceReport(depth=ctx.universe_depth)

    def record_violation(binding: dict, kind: str):
        report.violations += 1
        if report.first_violation is None:
            report.first_violation = dict(binding)
            report.first_violation_kind = kind

    def leaf(binding: dict, all_in: bool):
        report.total += 1
        ru = ev_u.eval(untyped_f, binding)
        if all_in:
            report.inside += 1
            rt = ev_t.eval(typed_f, binding)
            if ru is UNKNOWN or rt is UNKNOWN:
                report.inconclusive += 1
            elif ru is rt:
                report.inside_agree += 1
            else:
                record_violation(binding, "inside-disagree")
        else:
            report.outside += 1
            if ru is FALSE:
                report.outside_false += 1
            elif ru is TRUE:
                record_violation(binding, "outside-true")
            else:
                report.inconclusive += 1

    def out_completion(i: int, binding: dict, all_in: bool) -> dict:
        out = dict(binding)
        forced = False
        for j in range(i, n):
            if not all_in or forced or len(in_sets[j]) == U:
                out[names[j]] = universe[0]
            else:
                extra = next((v for v in universe if v not in in_sets[j]), None)
                if extra is None:
                    out[names[j]] = universe[0]
                else:
                    out[names[j]] = extra
                    forced = True
        return out

    def in_completions(i: int, binding: dict):
        for combo in product(*in_lists[i:]):
            full = dict(binding)
            for name, value in zip(names[i:], combo):
                full[name] = value
            yield full

    def sweep(i: int, binding: dict, all_in: bool):
        if i == n:
            leaf(binding, all_in)
            return
        ru = ev_u.eval(untyped_f, binding)
        rem_total = U ** (n - i)
        rem_in = math.prod(len(s) for s in in_lists[i:]) if all_in else 0
        rem_out = rem_total - rem_in
        if ru is FALSE:
            report.total += rem_out
            report.outside += rem_out
            report.outside_false += rem_out
            if rem_in:
                rt = ev_t.eval(typed_f, binding)
                if rt is FALSE:
                    report.total += rem_in
                    report.inside += rem_in
                    report.inside_agree += rem_in
                else:
                    for full in in_completions(i, binding):
                        leaf(full, True)
            return
        if ru is TRUE:
            if rem_out:
                report.total += rem_out
                report.outside += rem_out
                record_violation(out_completion(i, binding, all_in), "outside-true")
                report.violations += rem_out - 1
            if rem_in:
                rt = ev_t.eval(typed_f, binding)
                if rt is TRUE:
                    report.total += rem_in
                    report.inside += rem_in
                    report.inside_agree += rem_in
                elif rt is FALSE:
                    report.total += rem_in
                    report.inside += rem_in
                    first = next(iter(in_completions(i, binding)))
                    record_violation(first, "inside-disagree")
                    report.violations += rem_in - 1
                else:
                    for full in in_completions(i, binding):
                        leaf(full, True)
            return
        for value in universe:
            binding[names[i]] = value
            sweep(i + 1, binding, all_in and value in in_sets[i])
        del binding[names[i]]

    sweep(0, {}, True)
    return report


@dataclass
class AgreementReport:
    depth: int
    total: int = 0
    agree: int = 0
    disagree: int = 0
    inconclusive: int = 0
    first_disagreement: dict | None = None

    @property
    def ok(self) -> bool:
        return self.disagree == 0


def check_agreement(ctx: EvalContext, f: Formula, g: Formula, freevars,
                    depth: int | None = None, side: str = TYPED) -> AgreementReport:
    """Compare two formulas on all bindings drawn from the declared types."""
    if depth is not None:
        ctx = replace(ctx, universe_depth=depth)
    ev = _Evaluator(ctx, side=side, partial=True)
    freevars = list(freevars)
    names = [n for n, _ in freevars]
    pools = [ctx.types.enumerate_type(t, ctx.universe_depth) for _, t in freevars]
    report = AgreementReport(depth=ctx.universe_depth)
    for combo in product(*pools):
        binding = dict(zip(names, combo))
        va = ev.eval(f, binding)
        vb = ev.eval(g, binding)
        report.total += 1
        if va is UNKNOWN or vb is UNKNOWN:
            report.inconclusive += 1
        elif va is vb:
            report.agree += 1
        else:
            report.disagree += 1
            if report.first_disagreement is None:
                report.first_disagreement = binding
    return report
