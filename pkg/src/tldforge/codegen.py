"""Prolog and Mercury emission from analyzed programs.

Prolog gets flattened arithmetic (nested arithmetic functors become fresh
variables defined by builtin calls) and optional cut introduction when a
complete exclusive switch was verified.  Mercury is printed straight from
the typed description: pred/mode declarations follow the fixed
mode/determinism correspondence tables, bodies keep functional arithmetic
inline, and no type-check literals appear.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import ast
from .ast import (And, Atom, Call, Clause, Eq, Exists, Forall, Iff, Implies,
                  NafNot, Not, Or, Program, Struct, Term, TypeCheck,
                  TypedLogicDescription, Unify, Var)
from .analysis import (Registry, SPLIT_SUGGESTION, SwitchInfo, abstract_step,
                       detect_switch, initial_state, _outs_satisfied)
from .errors import MultipleOrdersError, NotCallableError
from .modes import GROUND, INF, Mode, Multiplicity, Spec, STAR, VAR
from .printer import format_term

ARITHMETIC_BUILTINS = {"+": "plus", "-": "minus", "*": "times"}

# constants the Mercury backend rewrites into goals producing a fresh variable
MERCURY_CONSTANT_GOALS = {"-infinite": "min_int"}


@dataclass(frozen=True)
class EmitOptions:
    target: str = "prolog"  # prolog | mercury
    cut_introduction: bool = False
    comment_header: bool = False
    split_directionalities: bool = False

    def __post_init__(self):
        if self.cut_introduction and self.target != "prolog":
            raise ValueError("cut introduction is a Prolog-only option")


# ---------------------------------------------------------------------------
# Arithmetic flattening
# ---------------------------------------------------------------------------

def _fresh_arith_names(used: set):
    k = 1
    while True:
        name = f"A{k}"
        k += 1
        if name not in used:
            used.add(name)
            yield name


def flatten_arithmetic(clause: Clause) -> Clause:
    """Replace nested arithmetic functors by fresh variables defined by
    builtin calls inserted before their first use; syntactically identical
    subterms share one variable."""
    used = set()
    for t in clause.head_args:
        used.update(ast.term_vars(t))
    for lit in clause.body:
        used.update(ast.literal_vars(lit))
    names = _fresh_arith_names(used)
    memo: dict = {}
    out: list = []

    def flat(t: Term, prelude: list) -> Term:
        if isinstance(t, Var) or not t.args:
            return t
        args = tuple(flat(a, prelude) for a in t.args)
        rebuilt = Struct(t.functor, args)
        if t.functor in ARITHMETIC_BUILTINS and t.arity == 2:
            hit = memo.get(rebuilt)
            if hit is None:
                hit = next(names)
                memo[rebuilt] = hit
                prelude.append(Call(ARITHMETIC_BUILTINS[t.functor],
                                    (args[0], args[1], Var(hit))))
            return Var(hit)
        return rebuilt

    def flat_literal(lit, prelude: list):
        if isinstance(lit, Unify):
            return Unify(flat(lit.left, prelude), flat(lit.right, prelude))
        if isinstance(lit, Call):
            return Call(lit.predicate, tuple(flat(a, prelude) for a in lit.args))
        if isinstance(lit, TypeCheck):
            return TypeCheck(lit.type_name, flat(lit.arg, prelude))
        if isinstance(lit, NafNot):
            return NafNot(flat_literal(lit.literal, prelude))
        raise TypeError(f"not a literal: {lit!r}")

    for lit in clause.body:
        prelude: list = []
        lit2 = flat_literal(lit, prelude)
        out.extend(prelude)
        out.append(lit2)
    return replace(clause, body=tuple(out))


def flatten_program(prog: Program) -> Program:
    return Program(prog.predicate, prog.arity,
                   tuple(flatten_arithmetic(c) for c in prog.clauses))


# ---------------------------------------------------------------------------
# Multiplicity <-> Mercury determinism
# ---------------------------------------------------------------------------

_DET_ROWS = (
    ("det", ((1, 1),)),
    ("semidet", ((0, 1),)),
    ("nondet", ((0, STAR), (0, INF))),
    ("multi", ((1, STAR), (1, INF), (STAR, STAR))),
    ("failure", ((0, 0),)),
    ("erroneous", ((1, 0),)),
)

_EXACT = {pair: name for name, pairs in _DET_ROWS for pair in pairs}
_CANONICAL = {name: pairs[0] for name, pairs in _DET_ROWS}


@dataclass(frozen=True)
class DeterminismMapping:
    name: str
    widened: Multiplicity | None = None  # set when the input had no exact row


def mult_to_mercury_determinism(m: Multiplicity) -> DeterminismMapping:
    """The fixed table, with conservative widening for other intervals:
    try (Min,Max), then (0,Max), then (Min,inf), then (0,inf)."""
    exact = _EXACT.get((m.min, m.max))
    if exact is not None:
        return DeterminismMapping(exact)
    for lo, hi in ((0, m.max), (m.min, INF), (0, INF)):
        name = _EXACT.get((lo, hi))
        if name is not None:
            return DeterminismMapping(name, Multiplicity(lo, hi))
    raise ValueError(f"unmappable multiplicity {m}")


def mercury_determinism_to_multiplicity(name: str) -> Multiplicity:
    pair = _CANONICAL.get(name)
    if pair is None:
        raise ValueError(f"unknown determinism name {name!r}")
    return Multiplicity(*pair)


def determinism_class(name: str) -> tuple:
    for n, pairs in _DET_ROWS:
        if n == name:
            return tuple(Multiplicity(*p) for p in pairs)
    raise ValueError(f"unknown determinism name {name!r}")


# mode correspondence, both directions
def mode_to_mercury(m_in: Mode, m_out: Mode) -> str:
    if (m_in, m_out) == (GROUND, GROUND):
        return "in"
    if (m_in, m_out) == (VAR, GROUND):
        return "out"
    return f"m_{m_in.name}_{m_out.name}"  # user-defined mode stub


MERCURY_MODE_TO_DIRECTION = {
    "in": (GROUND, GROUND),
    "out": (VAR, GROUND),
    "di": (GROUND, GROUND),
    "uo": (VAR, GROUND),
}


# ---------------------------------------------------------------------------
# Prolog emission
# ---------------------------------------------------------------------------

def _prolog_literal(lit) -> str:
    if isinstance(lit, Unify):
        return f"{format_term(lit.left)} = {format_term(lit.right)}"
    if isinstance(lit, Call):
        if not lit.args:
            return lit.predicate
        return f"{lit.predicate}({', '.join(format_term(a) for a in lit.args)})"
    if isinstance(lit, TypeCheck):
        return f"{lit.type_name}({format_term(lit.arg)})"
    if isinstance(lit, NafNot):
        inner = _prolog_literal(lit.literal)
        if isinstance(lit.literal, Unify):
            inner = f"({inner})"
        return f"\\+ {inner}"
    raise TypeError(f"not a literal: {lit!r}")


def _prolog_clause(clause: Clause, name: str, cut_after: int | None) -> str:
    head_args = ", ".join(format_term(a) for a in clause.head_args)
    head = f"{name}({head_args})" if clause.head_args else name
    if not clause.body:
        return f"{head}."
    parts = [_prolog_literal(lit) for lit in clause.body]
    if cut_after is not None:
        parts.insert(cut_after + 1, "!")
    body = ",\n    ".join(parts)
    return f"{head} :-\n    {body}."


def check_order_compatibility(prog: Program, spec: Spec, registry: Registry,
                              emitted_dir_index: int) -> list[int]:
    """Indices of declared directionalities that cannot execute the emitted
    literal order."""
    bad = []
    for k, d in enumerate(spec.directionalities):
        if k == emitted_dir_index:
            continue
        for clause in prog.clauses:
            state = initial_state(clause, d)
            try:
                for lit in clause.body:
                    state = abstract_step(state, lit, registry)
            except NotCallableError:
                bad.append(k)
                break
            if not _outs_satisfied(state, clause, d):
                bad.append(k)
                break
    return bad


def emit_prolog(prog: Program, spec: Spec, opts: EmitOptions,
                registry: Registry | None = None,
                dir_programs: list | None = None,
                dir_index: int = 0) -> str:
    """Clause text for one directionality's ordering (the first by default).

    With multiple inconsistent directionalities and no split, this raises
    MultipleOrdersError; with split emission, later directionalities become
    suffixed procedures.
    """
    chunks: list[str] = []
    if opts.comment_header and spec.relation:
        for line in spec.relation.splitlines():
            chunks.append(f"% {line}")
        chunks.append("")
    if registry is not None and len(spec.directionalities) > 1 \
            and not opts.split_directionalities:
        bad = check_order_compatibility(prog, spec, registry, dir_index)
        if bad:
            which = ", ".join(str(spec.directionalities[k]) for k in bad)
            raise MultipleOrdersError(
                f"{spec.name}: the emitted literal order does not satisfy "
                f"directionality {which}; {SPLIT_SUGGESTION}")
    switch = None
    if opts.cut_introduction and registry is not None and spec.directionalities:
        switch = detect_switch(prog, spec.directionalities[dir_index], spec,
                               registry.env)

    def emit_one(p: Program, name: str, sw: SwitchInfo | None):
        if not p.clauses:
            chunks.append(f"% {name}/{p.arity} has no clauses: "
                          "the definition is unsatisfiable.")
            return
        for i, clause in enumerate(p.clauses):
            cut_at = None
            if sw is not None and i < len(p.clauses) - 1:
                cut_at = sw.positions[i]
            chunks.append(_prolog_clause(clause, name, cut_at))
            chunks.append("")

    emit_one(prog, prog.predicate, switch)
    if opts.split_directionalities and dir_programs:
        for k, p in enumerate(dir_programs):
            if k == dir_index or p is None:
                continue
            emit_one(p, f"{prog.predicate}__d{k + 1}", None)
    while chunks and chunks[-1] == "":
        chunks.pop()
    return "\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# Mercury emission
# ---------------------------------------------------------------------------

def _strip_exists(f):
    while isinstance(f, Exists):
        f = f.body
    return f


def _mercury_term(t: Term) -> str:
    return format_term(t)


def _mercury_goal(f) -> str:
    if isinstance(f, ast.TrueF):
        return "true"
    if isinstance(f, ast.FalseF):
        return "fail"
    if isinstance(f, Eq):
        return f"{_mercury_term(f.left)} = {_mercury_term(f.right)}"
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({', '.join(_mercury_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"not ({_mercury_goal(_strip_exists(f.body))})"
    if isinstance(f, And):
        return ", ".join(_mercury_goal(g) for g in f.items)
    if isinstance(f, Or):
        return "( " + " ; ".join(_mercury_goal(_strip_exists(g)) for g in f.items) + " )"
    if isinstance(f, Implies):
        return f"( {_mercury_goal(f.left)} => {_mercury_goal(f.right)} )"
    if isinstance(f, Iff):
        return f"( {_mercury_goal(f.left)} <=> {_mercury_goal(f.right)} )"
    if isinstance(f, Forall):
        return f"all [{f.var}] ({_mercury_goal(f.body)})"
    raise TypeError(f"cannot print goal: {f!r}")


def _contains_constant(t: Term, name: str) -> bool:
    if isinstance(t, Var):
        return False
    if t.functor == name and not t.args:
        return True
    return any(_contains_constant(a, name) for a in t.args)


def _replace_constant(t: Term, name: str, var: Var) -> Term:
    if isinstance(t, Var):
        return t
    if t.functor == name and not t.args:
        return var
    if not t.args:
        return t
    return Struct(t.functor, tuple(_replace_constant(a, name, var) for a in t.args))


def _rewrite_constants(goals: list, used: set) -> list:
    """Apply the special-constant table: each occurrence becomes a fresh
    variable produced by the table's goal, inserted before first use."""
    out = []
    fresh_for: dict = {}
    for g in goals:
        for const, goal_pred in MERCURY_CONSTANT_GOALS.items():
            terms = []
            if isinstance(g, Eq):
                terms = [g.left, g.right]
            elif isinstance(g, Atom):
                terms = list(g.args)
            if not any(_contains_constant(t, const) for t in terms):
                continue
            if const not in fresh_for:
                base = "X"
                name = base
                k = 0
                while name in used:
                    k += 1
                    name = f"{base}{k}"
                used.add(name)
                fresh_for[const] = Var(name)
                out.append(Atom(goal_pred, (fresh_for[const],)))
            v = fresh_for[const]
            if isinstance(g, Eq):
                g = Eq(_replace_constant(g.left, const, v),
                       _replace_constant(g.right, const, v))
            else:
                g = Atom(g.predicate,
                         tuple(_replace_constant(t, const, v) for t in g.args))
        out.append(g)
    return out


def _disjunct_goals(f) -> list:
    f = _strip_exists(f)
    if isinstance(f, And):
        items = []
        for g in f.items:
            items.extend(_disjunct_goals(g)) if isinstance(g, And) else items.append(g)
        return items
    return [f]


def emit_mercury(tld: TypedLogicDescription, spec: Spec,
                 analysis: list) -> tuple[str, list]:
    """Mercury text for one procedure, plus emission warnings.

    ``analysis`` supplies one determinism verdict per directionality
    (objects with .directionality and .determinism.computed).
    """
    warnings: list[str] = []
    lines: list[str] = []
    types = ", ".join(t for _, t in tld.params)
    lines.append(f":- pred {tld.predicate}({types}).")
    stubs: dict = {}
    mode_lines = []
    for res in analysis:
        d = res.directionality
        mercury_modes = []
        for m_in, m_out in d.modes:
            name = mode_to_mercury(m_in, m_out)
            if name.startswith("m_") and name not in stubs:
                stubs[name] = f":- mode {name} == {m_in.name} >> {m_out.name}."
            mercury_modes.append(name)
        mapping = mult_to_mercury_determinism(res.determinism.computed)
        if mapping.widened is not None:
            warnings.append(
                f"{tld.predicate}: multiplicity {res.determinism.computed} has no "
                f"exact determinism; widened to {mapping.widened} ({mapping.name})")
        mode_lines.append(
            f":- mode {tld.predicate}({', '.join(mercury_modes)}) is {mapping.name}.")
    for stub in stubs.values():
        lines.append(stub)
    lines.extend(mode_lines)
    lines.append("")

    used = set(ast.all_names(tld.definition)) | {n for n, _ in tld.params}
    head = f"{tld.predicate}({', '.join(n for n, _ in tld.params)})"
    body = _strip_exists(tld.definition)
    if isinstance(body, Or):
        lines.append(f"{head} :-")
        lines.append("(   " + _format_goal_block(body.items[0], used))
        for disjunct in body.items[1:]:
            lines.append(";")
            lines.append("    " + _format_goal_block(disjunct, used))
        lines.append(").")
    else:
        goals = _rewrite_constants(_disjunct_goals(body), used)
        text = ",\n    ".join(_mercury_goal(g) for g in goals)
        lines.append(f"{head} :-\n    {text}.")
    return "\n".join(lines) + "\n", warnings


def _format_goal_block(disjunct, used: set) -> str:
    goals = _rewrite_constants(_disjunct_goals(disjunct), used)
    return ",\n    ".join(_mercury_goal(g) for g in goals)
