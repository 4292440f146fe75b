"""The type system: named sets of ground terms.

A type definition is either a union of constructor cases (possibly recursive
in itself), an alias for another type, or one of the built-in primitives.
Types may not be mutually recursive.  Membership is decided by definition
unfolding; bounded enumeration provides the brute-force oracle used by the
semantics tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import ast
from .ast import Struct, Term, Var
from .diagnostics import SourceDiagnostic, SourcePos, error, warning
from .errors import NonGroundTermError, NotStructuralError, UnknownTypeError

INTEGER_SAMPLE = tuple(Struct(str(i)) for i in range(-2, 3))
FLOAT_SAMPLE = (Struct("-1.0"), Struct("0.0"), Struct("1.0"))

BUILTIN_KINDS = ("integer", "float", "atom", "term")


@dataclass(frozen=True)
class Case:
    functor: str
    components: tuple = ()  # of type names

    def __post_init__(self):
        if not isinstance(self.components, tuple):
            object.__setattr__(self, "components", tuple(self.components))

    @property
    def arity(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class Cases:
    cases: tuple

    def __post_init__(self):
        if not isinstance(self.cases, tuple):
            object.__setattr__(self, "cases", tuple(self.cases))


@dataclass(frozen=True)
class Alias:
    target: str


@dataclass(frozen=True)
class Builtin:
    kind: str  # integer | float | atom | term


@dataclass(frozen=True)
class TypeDef:
    name: str
    body: Cases | Alias | Builtin
    pos: SourcePos | None = field(default=None, compare=False, repr=False)


def builtin_defs() -> dict:
    defs = {kind: TypeDef(kind, Builtin(kind)) for kind in BUILTIN_KINDS}
    defs["list"] = TypeDef("list", Cases((Case("[]"), Case("[|]", ("term", "list")))))
    return defs


class TypeEnv:
    """Immutable map of type names to definitions, built-ins always present."""

    def __init__(self, user_defs: Iterable[TypeDef] = ()):
        defs = builtin_defs()
        for d in user_defs:
            defs[d.name] = d
        self._defs = defs
        self._member_cache: dict = {}
        self._enum_cache: dict = {}

    @property
    def defs(self) -> Mapping[str, TypeDef]:
        return self._defs

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def lookup(self, name: str) -> TypeDef:
        try:
            return self._defs[name]
        except KeyError:
            raise UnknownTypeError(f"unknown type: {name}") from None

    def resolve(self, name: str) -> TypeDef:
        """Follow aliases to the underlying definition."""
        seen = set()
        d = self.lookup(name)
        while isinstance(d.body, Alias):
            if d.name in seen:
                raise UnknownTypeError(f"alias cycle at type {d.name}")
            seen.add(d.name)
            d = self.lookup(d.body.target)
        return d

    def same_type(self, a: str, b: str) -> bool:
        """Equality modulo alias resolution."""
        if a == b:
            return True
        try:
            return self.resolve(a).name == self.resolve(b).name
        except UnknownTypeError:
            return False

    # -- membership --------------------------------------------------------

    def is_member(self, type_name: str, t: Term) -> bool:
        if not ast.ground(t):
            raise NonGroundTermError(f"term is not ground: {t!r}")
        return self._member(type_name, t)

    def _member(self, type_name: str, t: Term) -> bool:
        key = (type_name, t)
        hit = self._member_cache.get(key)
        if hit is not None:
            return hit
        d = self.lookup(type_name)
        if isinstance(d.body, Builtin):
            kind = d.body.kind
            if kind == "term":
                out = True
            elif kind == "integer":
                out = ast.is_int_literal(t)
            elif kind == "float":
                out = ast.is_float_literal(t)
            else:  # atom
                out = (isinstance(t, Struct) and not t.args
                       and not ast.is_int_literal(t) and not ast.is_float_literal(t))
        elif isinstance(d.body, Alias):
            out = self._member(d.body.target, t)
        else:
            out = False
            for case in d.body.cases:
                if (isinstance(t, Struct) and t.functor == case.functor
                        and t.arity == case.arity
                        and all(self._member(ct, arg)
                                for ct, arg in zip(case.components, t.args))):
                    out = True
                    break
        self._member_cache[key] = out
        return out

    # -- bounded enumeration ------------------------------------------------

    def signature(self) -> tuple[tuple[str, int], ...]:
        """All declared constructors (functor, arity), deterministically ordered."""
        sig = set()
        for d in self._defs.values():
            if isinstance(d.body, Cases):
                for case in d.body.cases:
                    sig.add((case.functor, case.arity))
        return tuple(sorted(sig, key=lambda fa: (fa[1], fa[0])))

    def enumerate_type(self, type_name: str, depth: int) -> tuple:
        """Exactly the members of the type with term depth <= depth.

        Builtin integer/float enumerate a fixed sample; ``atom`` the declared
        zero-arity constructors; ``term`` all terms over the declared
        signature plus the integer sample.
        """
        if depth < 0:
            return ()
        key = (type_name, depth)
        hit = self._enum_cache.get(key)
        if hit is not None:
            return hit
        self.lookup(type_name)  # UnknownTypeError early
        out = tuple(self._enumerate(type_name, depth))
        self._enum_cache[key] = out
        return out

    def _enumerate(self, type_name: str, depth: int):
        if depth <= 0:
            return []
        d = self.lookup(type_name)
        if isinstance(d.body, Alias):
            return self.enumerate_type(d.body.target, depth)
        if isinstance(d.body, Builtin):
            kind = d.body.kind
            if kind == "integer":
                return list(INTEGER_SAMPLE)
            if kind == "float":
                return list(FLOAT_SAMPLE)
            if kind == "atom":
                return [Struct(f) for f, n in self.signature() if n == 0]
            return self._enumerate_terms(depth)
        out = []
        seen = set()
        for case in d.body.cases:
            if case.arity == 0:
                t = Struct(case.functor)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
                continue
            pools = [self.enumerate_type(ct, depth - 1) for ct in case.components]
            for args in itertools.product(*pools):
                t = Struct(case.functor, args)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
        return out

    def _enumerate_terms(self, depth: int) -> list:
        sig = self.signature()
        consts = [Struct(f) for f, n in sig if n == 0] + list(INTEGER_SAMPLE)
        consts = list(dict.fromkeys(consts))
        layers = [list(consts)]
        universe = list(consts)
        seen = set(universe)
        for _ in range(depth - 1):
            new: list = []
            for f, n in sig:
                if n == 0:
                    continue
                for args in itertools.product(universe, repeat=n):
                    t = Struct(f, args)
                    if t not in seen:
                        seen.add(t)
                        new.append(t)
            layers.append(new)
            universe = universe + new
        return universe

    # -- structural forms ---------------------------------------------------

    def structural_forms(self, type_name: str, var: str) -> tuple:
        """One equality formula per constructor case, fresh components bound."""
        d = self.resolve(type_name)
        if not isinstance(d.body, Cases):
            raise NotStructuralError(f"type {type_name} has no structural cases")
        forms = []
        for case in d.body.cases:
            names = _component_names(self, case, avoid={var})
            eq = ast.Eq(Var(var), Struct(case.functor, tuple(Var(n) for n in names)))
            forms.append(ast.exists_all(zip(names, case.components), eq))
        return tuple(forms)


def _component_names(env: TypeEnv, case: Case, avoid: set) -> list[str]:
    if case.functor == "[|]" and case.arity == 2:
        base = ["H", "T"]
    else:
        base = []
        for ct in case.components:
            try:
                resolved = env.resolve(ct).name
            except UnknownTypeError:
                resolved = ct
            base.append(resolved[0].upper() if resolved else "X")
    names: list[str] = []
    used = set(avoid)
    for b in base:
        cand = b
        k = 0
        while cand in used or cand in names:
            k += 1
            cand = f"{b}{k}"
        names.append(cand)
        used.add(cand)
    return names


# ---------------------------------------------------------------------------
# Environment checking
# ---------------------------------------------------------------------------

def check_env(env: TypeEnv) -> list[SourceDiagnostic]:
    """Report mutual recursion, unknown references, and empty types."""
    diags: list[SourceDiagnostic] = []
    defs = env.defs

    def refs(d: TypeDef) -> list[str]:
        if isinstance(d.body, Alias):
            return [d.body.target]
        if isinstance(d.body, Cases):
            return [ct for case in d.body.cases for ct in case.components]
        return []

    for d in defs.values():
        for ref in refs(d):
            if ref not in defs:
                diags.append(error("unknown-type",
                                   f"type {d.name} refers to unknown type {ref}", d.pos))

    # alias self-loops are never legal
    for d in defs.values():
        if isinstance(d.body, Alias) and d.body.target == d.name:
            diags.append(error("mutual-recursion",
                               f"type {d.name} is an alias of itself", d.pos))

    # any dependency cycle of length >= 2 is mutual recursion
    for scc in _sccs({d.name: [r for r in refs(d) if r in defs and r != d.name]
                      for d in defs.values()}):
        if len(scc) >= 2:
            names = ", ".join(sorted(scc))
            pos = next((defs[n].pos for n in sorted(scc) if defs[n].pos), None)
            diags.append(error("mutual-recursion",
                               f"mutually recursive types: {names}", pos))

    # inhabitedness fixpoint: a Cases type with no reachable base case is empty
    inhabited = {name for name, d in defs.items() if isinstance(d.body, Builtin)}
    changed = True
    while changed:
        changed = False
        for name, d in defs.items():
            if name in inhabited:
                continue
            if isinstance(d.body, Alias):
                ok = d.body.target in inhabited
            elif isinstance(d.body, Cases):
                ok = any(all(ct in inhabited for ct in case.components)
                         for case in d.body.cases)
            else:
                ok = True
            if ok:
                inhabited.add(name)
                changed = True
    for name, d in defs.items():
        if isinstance(d.body, Cases) and name not in inhabited:
            diags.append(warning("empty-type",
                                 f"type {name} has no ground members", d.pos))
    return diags


def _sccs(graph: dict) -> list[set]:
    """Tarjan's strongly connected components, iterative."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[set] = []
    counter = itertools.count()

    for root in graph:
        if root in index:
            continue
        work = [(root, iter(graph[root]))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = next(counter)
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(graph[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return out


# module-level conveniences matching the operation surface
def is_member(env: TypeEnv, type_name: str, t: Term) -> bool:
    return env.is_member(type_name, t)


def enumerate_type(env: TypeEnv, type_name: str, depth: int) -> tuple:
    return env.enumerate_type(type_name, depth)


def structural_forms(env: TypeEnv, type_name: str, var: str) -> tuple:
    return env.structural_forms(type_name, var)
