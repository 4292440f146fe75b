"""On-disk workspaces and the staged pipeline.

A workspace is described by a manifest: one declaration per line naming the
type, specification and description files, plus an optional output
directory.  Loading parses everything, registers the built-in callee
preamble, and validates the environment, the directionalities and all
cross-references; any error makes the load fail as a whole.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

from . import typesys
from .analysis import Registry, analyze_procedure
from .ast import Atom, subformulas
from .codegen import (EmitOptions, emit_mercury, emit_prolog, flatten_program)
from .derive import derive_clauses, normalize, normalized_formula
from .diagnostics import SourceDiagnostic, SourcePos, error, has_errors, warning
from .errors import WorkspaceError
from .modes import Spec, check_directionality
from .parser import parse_specs, parse_tlds, parse_type_defs
from .printer import (format_clause, format_formula, format_ld, format_literal,
                      format_tld)
from .semantics import EvalContext, check_equivalence
from .transform import simplify_description, transform_tld
from .typesys import TypeEnv

STAGE_NAMES = ("tld", "untyped", "simplified", "normalized", "derived",
               "ordered", "eliminated")


def builtin_specs() -> list[Spec]:
    text = (importlib.resources.files("tldforge") / "data" / "builtins.spec").read_text()
    specs, diags = parse_specs(text, "<builtins>")
    if has_errors(diags):
        raise WorkspaceError("builtin callee registry failed to parse")
    return specs


@dataclass(frozen=True)
class Workspace:
    manifest: Path
    env: TypeEnv
    specs: dict  # name -> Spec, builtins included
    tlds: dict  # name -> TypedLogicDescription
    out_dir: Path | None = None

    @property
    def registry(self) -> Registry:
        return Registry(self.env, self.specs)

    def eval_context(self, universe_depth: int = 2, unfold_depth: int = 4) -> EvalContext:
        preds = {}
        for name, tld in self.tlds.items():
            preds[name] = (tld, simplify_description(transform_tld(tld)))
        return EvalContext(self.env, preds, universe_depth, unfold_depth)


@dataclass
class LoadResult:
    workspace: Workspace | None
    diagnostics: list

    @property
    def ok(self) -> bool:
        return self.workspace is not None


def load_workspace(manifest: str | Path) -> LoadResult:
    manifest = Path(manifest)
    diags: list[SourceDiagnostic] = []
    if not manifest.is_file():
        return LoadResult(None, [error("missing-file", f"manifest not found: {manifest}")])
    root = manifest.parent
    type_files: list[Path] = []
    spec_files: list[Path] = []
    tld_files: list[Path] = []
    out_dir: Path | None = None
    for lineno, raw in enumerate(manifest.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        pos = SourcePos(str(manifest), lineno, 1)
        parts = line.split(None, 1)
        if len(parts) != 2:
            diags.append(error("manifest", f"malformed manifest line: {raw!r}", pos))
            continue
        kind, arg = parts
        path = root / arg.strip()
        if kind == "types":
            type_files.append(path)
        elif kind == "spec":
            spec_files.append(path)
        elif kind == "tld":
            tld_files.append(path)
        elif kind == "out":
            out_dir = path
        else:
            diags.append(error("manifest", f"unknown declaration {kind!r}", pos))
    missing = [p for p in type_files + spec_files + tld_files if not p.is_file()]
    for p in missing:
        diags.append(error("missing-file", f"file not found: {p}"))
    if has_errors(diags):
        return LoadResult(None, diags)

    defs = []
    seen_types: dict = {}
    for p in type_files:
        file_defs, file_diags = parse_type_defs(p.read_text(), str(p))
        diags.extend(file_diags)
        for d in file_defs:
            if d.name in seen_types:
                diags.append(error("dup-type",
                                   f"type {d.name} already defined in {seen_types[d.name]}",
                                   d.pos))
            else:
                seen_types[d.name] = str(p)
                defs.append(d)
    env = TypeEnv(defs)
    diags.extend(typesys.check_env(env))

    specs: dict = {s.name: s for s in builtin_specs()}
    for p in spec_files:
        file_specs, file_diags = parse_specs(p.read_text(), str(p))
        diags.extend(file_diags)
        for s in file_specs:
            if s.name in specs:
                diags.append(error("dup-spec",
                                   f"procedure {s.name} is specified twice", s.pos))
                continue
            specs[s.name] = s
            diags.extend(check_directionality(s))
            for t in s.param_types:
                if t not in env:
                    diags.append(error("unknown-type",
                                       f"{s.name}: unknown parameter type {t}", s.pos))

    tlds: dict = {}
    for p in tld_files:
        file_tlds, file_diags = parse_tlds(p.read_text(), str(p))
        diags.extend(file_diags)
        for t in file_tlds:
            if t.predicate in tlds:
                diags.append(error("dup-tld",
                                   f"{t.predicate} is described twice", t.pos))
                continue
            tlds[t.predicate] = t
            for _, tname in t.params:
                if tname not in env:
                    diags.append(error("unknown-type",
                                       f"{t.predicate}: unknown parameter type {tname}",
                                       t.pos))

    # cross references: descriptions must match their specs, callees must
    # resolve, and call-site annotations must agree with the callee's types
    # (the typed-to-untyped conversion leaves atoms alone, so a mismatched
    # call site would escape the equivalence contract)
    for name, tld in tlds.items():
        spec = specs.get(name)
        if spec is None:
            diags.append(error("unresolved-ref",
                               f"{name} has a description but no specification", tld.pos))
        elif spec.arity != tld.arity:
            diags.append(error("unresolved-ref",
                               f"{name}: specification arity {spec.arity} but "
                               f"description arity {tld.arity}", tld.pos))
        for callee, arity, arg_types in _called_predicates(tld, env):
            callee_spec = specs.get(callee)
            if callee_spec is None:
                diags.append(error("unresolved-ref",
                                   f"{name} calls {callee}/{arity}, which has no "
                                   "specification", tld.pos))
                continue
            if callee_spec.arity != arity:
                diags.append(error("unresolved-ref",
                                   f"{name} calls {callee}/{arity}, but its "
                                   f"specification has arity {callee_spec.arity}",
                                   tld.pos))
                continue
            for i, (got, declared) in enumerate(zip(arg_types,
                                                    callee_spec.param_types), start=1):
                if got is None or got == "term" or declared == "term":
                    continue
                if not env.same_type(got, declared):
                    diags.append(warning(
                        "call-site-type",
                        f"{name}: argument {i} of {callee} is annotated {got} "
                        f"but the callee declares {declared}", tld.pos))
    if has_errors(diags):
        return LoadResult(None, diags)
    return LoadResult(Workspace(manifest, env, specs, tlds, out_dir), diags)


def _called_predicates(tld, env: TypeEnv):
    """Predicate atoms with the annotated type of each variable argument."""
    out = []

    def walk(g, scope: dict):
        if isinstance(g, Atom):
            if len(g.args) == 1 and g.predicate in env:
                return  # a membership check, not a call
            arg_types = []
            for a in g.args:
                from .ast import Var
                arg_types.append(scope.get(a.name) if isinstance(a, Var) else None)
            out.append((g.predicate, len(g.args), tuple(arg_types)))
            return
        from .ast import Exists, Forall
        if isinstance(g, (Exists, Forall)):
            walk(g.body, {**scope, g.var: g.type_name})
            return
        for child in subformulas(g):
            walk(child, scope)

    walk(tld.definition, tld.param_env())
    return out


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineResult:
    predicate: str
    code: str = ""
    report: str = ""
    warnings: list = field(default_factory=list)
    failure: str | None = None
    stages: dict = field(default_factory=dict)
    analysis: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure is None


def run_pipeline(ws: Workspace, predicate: str, target: str = "prolog",
                 level: str = "paper-compat", dir_index: int = 0,
                 cuts: bool = False, split: bool = False,
                 stage: str | None = None) -> PipelineResult:
    """transform -> simplify -> derive -> reorder -> eliminate -> analyze -> emit."""
    tld = ws.tlds.get(predicate)
    spec = ws.specs.get(predicate)
    if tld is None or spec is None:
        raise WorkspaceError(f"{predicate} needs both a specification and a description")
    if not spec.directionalities:
        raise WorkspaceError(f"{predicate} declares no directionalities")
    if not 0 <= dir_index < len(spec.directionalities):
        raise WorkspaceError(f"{predicate} has no directionality {dir_index + 1}")
    result = PipelineResult(predicate)
    type_names = frozenset(ws.env.defs)
    registry = ws.registry

    ld_raw = transform_tld(tld)
    ld = simplify_description(ld_raw)
    nb = normalize(ld, type_names)
    prog = flatten_program(derive_clauses(ld, type_names))
    result.stages["tld"] = format_tld(tld)
    result.stages["untyped"] = format_ld(ld_raw)
    result.stages["simplified"] = format_ld(ld)
    result.stages["normalized"] = format_formula(normalized_formula(nb)) + "\n"
    result.stages["derived"] = "\n".join(format_clause(c) for c in prog.clauses) + "\n"
    if stage is not None and stage in result.stages:
        result.code = result.stages[stage]
        return result

    analysis = analyze_procedure(prog, spec, registry, level)
    result.analysis = analysis
    lines = [f"procedure {predicate}/{spec.arity}"]
    for k, res in enumerate(analysis, start=1):
        lines.append(f"  directionality {k}: {res.directionality}")
        if not res.ok:
            lines.append(f"    no executable literal order: {res.failure.reason}")
            continue
        for i, clause in enumerate(res.eliminated.clauses, start=1):
            body = ", ".join(format_literal(lit) for lit in clause.body) or "true"
            lines.append(f"    order (clause {i}): {body}")
        removed = ", ".join(
            f"clause {rc.clause_index + 1}: {format_literal(rc.literal)}"
            for rc in res.removed) or "none"
        lines.append(f"    removed checks: {removed}")
        verdict = "ok" if res.determinism.ok else "outside the declared bounds"
        lines.append(f"    computed multiplicity: {res.determinism.computed} "
                     f"(declared {res.determinism.declared}) [{verdict}]")
        if not res.determinism.ok:
            result.warnings.append(
                f"{predicate}: directionality {k} computed {res.determinism.computed}, "
                f"declared {res.determinism.declared}")
    result.report = "\n".join(lines) + "\n"

    failures = [r for r in analysis if not r.ok]
    if failures:
        f = failures[0].failure
        result.failure = (
            f"{predicate}: {f.reason} for {f.directionality}; alternatives: "
            + "; or ".join(f.suggestions))
        return result

    result.stages["ordered"] = "\n".join(
        format_clause(c) for c in analysis[dir_index].ordered.clauses) + "\n"
    result.stages["eliminated"] = "\n".join(
        format_clause(c) for c in analysis[dir_index].eliminated.clauses) + "\n"
    if stage is not None:
        if stage not in result.stages:
            raise WorkspaceError(f"unknown stage {stage!r}; "
                                 f"choose from {', '.join(STAGE_NAMES)}")
        result.code = result.stages[stage]
        return result

    if target == "prolog":
        opts = EmitOptions("prolog", cut_introduction=cuts,
                           split_directionalities=split)
        result.code = emit_prolog(analysis[dir_index].eliminated, spec, opts,
                                  registry,
                                  [r.eliminated for r in analysis], dir_index)
    elif target == "mercury":
        text, warnings = emit_mercury(tld, spec, analysis)
        result.code = text
        result.warnings.extend(warnings)
    else:
        raise WorkspaceError(f"unknown target {target!r}")
    return result


def run_oracle(ws: Workspace, predicate: str, depth: int = 2,
               unfold_depth: int = 4):
    """Typed/untyped equivalence for one description, over its parameters."""
    tld = ws.tlds.get(predicate)
    if tld is None:
        raise WorkspaceError(f"no description for {predicate}")
    ctx = ws.eval_context(universe_depth=depth, unfold_depth=unfold_depth)
    ld = ctx.predicates[predicate][1]
    return check_equivalence(ctx, tld.definition, ld.definition, list(tld.params))


def suggest_skeleton(ws: Workspace, spec_name: str, induction_param: str) -> str:
    """A description skeleton built from the induction parameter's
    structural forms, one hole marker per case."""
    spec = ws.specs.get(spec_name)
    if spec is None:
        raise WorkspaceError(f"no specification for {spec_name}")
    if induction_param not in spec.params:
        raise WorkspaceError(f"{spec_name} has no parameter {induction_param}")
    ptype = spec.param_types[spec.params.index(induction_param)]
    forms = ws.env.structural_forms(ptype, induction_param)
    header = ", ".join(f"{p}: {t}" for p, t in zip(spec.params, spec.param_types))
    lines = [f"# skeleton for {spec_name}; replace each #hole with the case's formula",
             f"{spec_name}({header}) <=>"]
    for i, form in enumerate(forms):
        sep = "   " if i == 0 else "\\/ "
        lines.append(f"    {sep}{format_formula(form)} /\\ #hole")
    lines.append("    .")
    return "\n".join(lines) + "\n"
