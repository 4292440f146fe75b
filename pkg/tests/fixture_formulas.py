"""Typed formula fixtures for the equivalence oracle, covering every
transformation row: both equality shapes, both quantifiers, conjunction,
disjunction, negation, implication, equivalence, plus the pass-through
atoms and constants."""

from tldforge.parser import parse_formula, parse_tlds, parse_types
from tldforge.semantics import EvalContext
from tldforge.transform import transform_tld

FIXTURE_TYPES = """
nat ::= zero | s(nat).
fruit ::= enum {orange, apple, banana}.
"""

FIXTURE_PREDICATES = """
q(X: nat) <=> X = zero \\/ X = s(zero).
"""

# (name, typed formula, free variables with their types)
ROW_FIXTURES = [
    ("eq-var-var", "X = Y", (("X", "nat"), ("Y", "nat"))),
    ("eq-var-var-mixed", "X = Y", (("X", "nat"), ("Y", "fruit"))),
    ("eq-same-var", "X = X", (("X", "nat"),)),
    ("eq-compound", "X = s(Y)", (("X", "nat"), ("Y", "nat"))),
    ("eq-constant", "X = s(zero)", (("X", "nat"),)),
    ("eq-undeclared-functor", "Y = mk(X, X)", (("X", "nat"), ("Y", "nat"))),
    ("exists-witness", "exists Y: nat . X = s(Y)", (("X", "nat"),)),
    ("exists-equal", "exists Y: fruit . Y = X", (("X", "fruit"),)),
    ("exists-call", "exists Y: term . q(Y) /\\ X = Y", (("X", "nat"),)),
    ("forall-guarded", "forall Y: fruit . Y = orange => X = zero", (("X", "nat"),)),
    ("forall-and", "(forall Y: nat . q(Y) => Y = Y) /\\ X = zero", (("X", "nat"),)),
    ("and-chain", "X = zero /\\ Y = s(X)", (("X", "nat"), ("Y", "nat"))),
    ("or-same-var", "X = zero \\/ X = s(zero)", (("X", "nat"),)),
    ("or-split-vars", "X = zero \\/ Y = orange", (("X", "nat"), ("Y", "fruit"))),
    ("not-eq", "~(X = zero)", (("X", "nat"),)),
    ("not-eq-two", "~(X = Y)", (("X", "nat"), ("Y", "nat"))),
    ("not-call", "~q(X)", (("X", "nat"),)),
    ("implies", "X = zero => Y = orange", (("X", "nat"), ("Y", "fruit"))),
    ("implies-call", "q(X) => X = zero", (("X", "nat"),)),
    ("iff", "X = zero <=> Y = orange", (("X", "nat"), ("Y", "fruit"))),
    ("iff-call", "q(X) <=> X = zero", (("X", "nat"),)),
    ("atom-passthrough", "q(X)", (("X", "nat"),)),
    ("true-conjunct", "true /\\ X = zero", (("X", "nat"),)),
    ("false-disjunct", "false \\/ X = zero", (("X", "nat"),)),
    ("nested-exists-not", "exists Y: nat . X = s(Y) /\\ ~(Y = zero)", (("X", "nat"),)),
]


def fixture_context(universe_depth=2, unfold_depth=4) -> EvalContext:
    env, diags = parse_types(FIXTURE_TYPES)
    assert not diags
    tlds, diags = parse_tlds(FIXTURE_PREDICATES)
    assert not diags
    preds = {t.predicate: (t, transform_tld(t)) for t in tlds}
    return EvalContext(env, preds, universe_depth, unfold_depth)


def fixture_cases():
    for name, text, freevars in ROW_FIXTURES:
        yield name, parse_formula(text), freevars
