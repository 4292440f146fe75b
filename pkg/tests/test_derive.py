import pytest

from tldforge.ast import (Call, LogicDescription, NafNot, Struct, TypeCheck,
                          Unify, Var)
from tldforge.derive import (body_formula, derive_clauses, normalize,
                             normalized_formula, program_formula)
from tldforge.errors import NotDerivableError
from tldforge.parser import parse_formula, parse_types
from tldforge.semantics import EvalContext, check_equivalence
from tldforge.transform import simplify_description, transform_tld

a = Struct("a")
b = Struct("b")
TYPES = frozenset(("nat", "fruit", "integer", "integer_list", "term"))


def ld(params, text):
    return LogicDescription("p", tuple(params), parse_formula(text))


def test_already_disjunctive_input():
    nb = normalize(ld(["X"], "X = a \\/ (X = b /\\ q(X))"), TYPES)
    assert [d.literals for d in nb.disjuncts] == [
        (Unify(Var("X"), a),),
        (Unify(Var("X"), b), Call("q", (Var("X"),))),
    ]


def test_negated_disjunction_becomes_two_failures():
    nb = normalize(ld(["X"], "~(X = a \\/ X = b)"), TYPES)
    assert [d.literals for d in nb.disjuncts] == [
        (NafNot(Unify(Var("X"), a)), NafNot(Unify(Var("X"), b))),
    ]


def test_implication_expands_classically():
    nb = normalize(ld(["X"], "q(X) => r(X)"), TYPES)
    assert [d.literals for d in nb.disjuncts] == [
        (NafNot(Call("q", (Var("X"),))),),
        (Call("r", (Var("X"),)),),
    ]


def test_equivalence_expands_to_both_cases():
    nb = normalize(ld(["X"], "q(X) <=> r(X)"), TYPES)
    assert len(nb.disjuncts) == 2
    assert nb.disjuncts[0].literals == (Call("q", (Var("X"),)), Call("r", (Var("X"),)))
    assert nb.disjuncts[1].literals == (NafNot(Call("q", (Var("X"),))),
                                        NafNot(Call("r", (Var("X"),))))


def test_type_atoms_become_checks():
    nb = normalize(ld(["X"], "nat(X) /\\ q(X)"), TYPES)
    assert nb.disjuncts[0].literals == (TypeCheck("nat", Var("X")),
                                        Call("q", (Var("X"),)))


def test_duplicate_checks_collapse_within_a_disjunct():
    nb = normalize(ld(["X"], "nat(X) /\\ (q(X) /\\ nat(X))"), TYPES)
    assert nb.disjuncts[0].literals == (TypeCheck("nat", Var("X")),
                                        Call("q", (Var("X"),)))


def test_existentials_hoist_and_rename_on_collision():
    nb = normalize(ld(["X"], "(exists Y: term . q(X, Y)) /\\ (exists Y: term . r(X, Y))"),
                   TYPES)
    (d,) = nb.disjuncts
    names = [n for n, _ in d.exvars]
    assert len(names) == len(set(names)) == 2
    assert d.literals[0] == Call("q", (Var("X"), Var(names[0])))
    assert d.literals[1] == Call("r", (Var("X"), Var(names[1])))


def test_fresh_names_do_not_collide_across_disjuncts():
    nb = normalize(ld(["X"], "(exists Y: term . q(X, Y)) \\/ (exists Y: term . r(X, Y))"),
                   TYPES)
    all_names = [n for d in nb.disjuncts for n, _ in d.exvars]
    assert len(all_names) == len(set(all_names))


def test_shared_binder_splits_into_fresh_names_per_disjunct():
    nb = normalize(ld(["X"], "exists Y: term . q(X, Y) \\/ r(X, Y)"), TYPES)
    all_names = [n for d in nb.disjuncts for n, _ in d.exvars]
    assert len(all_names) == len(set(all_names)) == 2


def test_negation_of_exists_is_not_derivable():
    with pytest.raises(NotDerivableError):
        normalize(ld(["X"], "~(exists Y: term . q(X, Y))"), TYPES)


def test_universal_in_body_is_not_derivable():
    with pytest.raises(NotDerivableError) as exc:
        normalize(ld(["X"], "forall Y: term . q(X, Y)"), TYPES)
    assert "at <formula>:1:" in str(exc.value)  # carries the source position


def test_negated_universal_is_derivable():
    nb = normalize(ld(["X"], "~(forall Y: term . q(X, Y))"), TYPES)
    (d,) = nb.disjuncts
    assert d.literals == (NafNot(Call("q", (Var("X"), Var("Y")))),)
    assert d.exvars == (("Y", "term"),)


def test_normalize_is_idempotent():
    for text in ("X = a \\/ (X = b /\\ q(X))",
                 "q(X) => r(X)",
                 "exists Y: term . q(X, Y) \\/ r(X, Y)"):
        first = normalize(ld(["X"], text), TYPES)
        again = normalize(LogicDescription("p", ("X",), normalized_formula(first)), TYPES)
        assert again == first


def test_two_clauses_for_the_accumulator_fixture(maxprefix_ws):
    tld = maxprefix_ws.tlds["max_prefix_gen"]
    untyped = simplify_description(transform_tld(tld))
    prog = derive_clauses(untyped, frozenset(maxprefix_ws.env.defs))
    assert len(prog.clauses) == 2
    assert prog.clauses[0].head_args == (Var("L"), Var("M"), Var("A"))
    assert prog.clauses[0].provenance == "disjunct 1 of 2"


def test_false_definition_yields_no_clauses():
    prog = derive_clauses(ld(["X"], "false"), TYPES)
    assert prog.clauses == ()
    assert prog.predicate == "p" and prog.arity == 1


def test_single_check_clause():
    prog = derive_clauses(ld(["X"], "fruit(X)"), TYPES)
    assert len(prog.clauses) == 1
    assert prog.clauses[0].body == (TypeCheck("fruit", Var("X")),)


def test_true_definition_yields_a_fact():
    prog = derive_clauses(ld(["X"], "true"), TYPES)
    assert len(prog.clauses) == 1
    assert prog.clauses[0].body == ()


# -- bounded faithfulness ---------------------------------------------------------

def clark_agrees(env_text, tld_text, depth=2, unfold=4):
    from tldforge.parser import parse_tlds
    env, _ = parse_types(env_text)
    tld = parse_tlds(tld_text)[0][0]
    untyped = simplify_description(transform_tld(tld))
    prog = derive_clauses(untyped, frozenset(env.defs))
    ctx = EvalContext(env, {tld.predicate: untyped},
                      universe_depth=depth, unfold_depth=unfold)
    freevars = [(n, "term") for n in untyped.params]
    return check_equivalence(ctx, program_formula(prog), untyped.definition,
                             freevars, depth=depth)


def test_clauses_agree_with_their_description():
    rep = clark_agrees("letter ::= a | b.",
                       "p(X: letter) <=> X = a \\/ X = b /\\ ~(X = a).")
    assert rep.ok and rep.violations == 0


def test_clauses_agree_for_the_recursive_fixture(maxprefix_ws):
    tld = maxprefix_ws.tlds["max_prefix_gen"]
    untyped = simplify_description(transform_tld(tld))
    prog = derive_clauses(untyped, frozenset(maxprefix_ws.env.defs))
    ctx = EvalContext(maxprefix_ws.env, {"max_prefix_gen": untyped},
                      universe_depth=2, unfold_depth=4)
    rep = check_equivalence(ctx, program_formula(prog), untyped.definition,
                            [(n, "term") for n in untyped.params], depth=2)
    assert rep.violations == 0
