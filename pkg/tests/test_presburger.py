"""Formula layer: parser, simplifier, elimination, decision procedure."""

import random

import pytest

from curated import CURATED_SENTENCES
from oracles import brute_eval, random_family_formula, window_eval
from wsts.errors import BudgetExceededError, ParseError, UsageError
from wsts.presburger import (
    FALSE,
    TRUE,
    And,
    Dvd,
    Eq,
    Exists,
    Forall,
    Le,
    Not,
    NotDvd,
    Or,
    Term,
    conj,
    decide_sentence,
    disj,
    dvd,
    eq,
    eval_assignment,
    exists,
    forall,
    format_formula,
    free_vars,
    ge,
    implies,
    le,
    lt,
    ne,
    neg,
    num,
    parse_formula,
    qe_cooper,
    simplify,
    var,
)
from wsts.presburger.cooper import nnf


def random_env(rng, names, lo=0, hi=50):
    return {n: rng.randint(lo, hi) for n in names}


def random_qf(rng, names, depth=3):
    if depth == 0 or rng.random() < 0.3:
        t = Term((), rng.randint(-8, 8))
        for n in names:
            if rng.random() < 0.6:
                t = t.add(var(n).scale(rng.choice([-6, -3, -2, -1, 1, 2, 3, 6])))
        kind = rng.random()
        if kind < 0.4:
            return Le(t)
        if kind < 0.6:
            return Eq(t)
        if kind < 0.8:
            return dvd(rng.choice([2, 3, 4, 5]), t)
        return NotDvd(rng.choice([2, 3, 4, 5]), t)
    roll = rng.random()
    if roll < 0.4:
        return conj([random_qf(rng, names, depth - 1) for _ in range(2)])
    if roll < 0.8:
        return disj([random_qf(rng, names, depth - 1) for _ in range(2)])
    return neg(random_qf(rng, names, depth - 1))


class TestTerms:
    def test_canonical_form(self):
        t = var("b").add(var("a")).add(var("b")).add(num(3))
        assert t.coeffs == (("a", 1), ("b", 2))
        assert t.const == 3
        assert t.sub(t).coeffs == ()

    def test_substitution(self):
        t = var("x").scale(2).add(var("y")).add(num(1))
        s = t.subst("x", var("y").add(num(5)))
        assert s.evaluate({"y": 3}) == 2 * 8 + 3 + 1

    def test_missing_variable(self):
        with pytest.raises(UsageError):
            var("x").evaluate({})


class TestParser:
    def test_precedence_and_shapes(self):
        f = parse_formula("x <= 1 /\\ y <= 2 \\/ z <= 3")
        assert isinstance(f, Or)
        g = parse_formula("x <= 1 -> y <= 2 -> z <= 3")
        # implication associates to the right
        assert isinstance(g, Or) and isinstance(g.args[0], Not)

    def test_quantifier_scope_is_maximal(self):
        f = parse_formula("E x. x = y /\\ x = z")
        assert isinstance(f, Exists)
        assert free_vars(f) == {"y", "z"}

    def test_parenthesized_term_vs_formula(self):
        f = parse_formula("(x + 1) <= y")
        assert isinstance(f, Le)
        g = parse_formula("(x <= y) /\\ (y <= x)")
        assert isinstance(g, And)

    def test_primed_variables(self):
        f = parse_formula("x1' = x1 + 1")
        assert free_vars(f) == {"x1", "x1'"}

    def test_divisibility(self):
        f = parse_formula("3 | x + 2")
        assert isinstance(f, Dvd) and f.k == 3
        with pytest.raises(ParseError):
            parse_formula("1 | x")
        with pytest.raises(ParseError):
            parse_formula("x | 3")

    def test_errors_carry_position(self):
        with pytest.raises(ParseError) as info:
            parse_formula("x <= $")
        assert "line 1" in str(info.value)
        with pytest.raises(ParseError):
            parse_formula("x <= 1 extra extra")
        with pytest.raises(ParseError):
            parse_formula("E 3. x = 0")

    def test_comments_and_newlines(self):
        f = parse_formula("x <= 1 /\\  # trailing note\n y <= 2")
        assert isinstance(f, And)

    def test_multiplication_restricted_to_constants(self):
        assert parse_formula("2*x = x + x \\/ 0 = 1") is not None
        with pytest.raises(ParseError):
            parse_formula("x*y = 1")

    def test_roundtrip_through_formatter(self):
        rng = random.Random(31)
        names = ["x", "y"]
        for _ in range(200):
            f = random_qf(rng, names)
            g = parse_formula(format_formula(f))
            for _ in range(10):
                env = random_env(rng, names, -10, 10)
                assert eval_assignment(f, env) == eval_assignment(g, env)

    def test_quantified_roundtrip(self):
        for text, expected, _ in CURATED_SENTENCES:
            f = parse_formula(text)
            g = parse_formula(format_formula(f))
            assert decide_sentence(g) == expected


class TestSimplify:
    def test_preserves_truth(self):
        rng = random.Random(32)
        names = ["x", "y", "z"]
        for _ in range(400):
            f = random_qf(rng, names)
            g = simplify(f)
            for _ in range(8):
                env = random_env(rng, names, -12, 12)
                assert eval_assignment(f, env) == eval_assignment(g, env)

    def test_idempotent(self):
        rng = random.Random(33)
        for _ in range(300):
            f = random_qf(rng, ["x", "y"])
            g = simplify(f)
            assert simplify(g) == g

    def test_folds_ground_atoms(self):
        assert simplify(Le(num(-1))) == TRUE
        assert simplify(Le(num(1))) == FALSE
        assert simplify(eq(num(2), num(2))) == TRUE
        assert simplify(dvd(3, num(7))) == FALSE

    def test_contradiction_and_tautology(self):
        x = var("x")
        assert simplify(conj([le(x, num(0)), ge(x, num(1))])) == FALSE
        assert simplify(disj([le(x, num(3)), ge(x, num(2))])) == TRUE
        assert simplify(conj([dvd(2, x), Not(Dvd(2, x))])) == FALSE

    def test_gcd_reduction(self):
        f = simplify(Le(var("x").scale(4).add(num(-6))))
        # 4x - 6 <= 0 over the integers is x <= 1
        assert f == Le(var("x").add(num(-1)))


class TestNnf:
    def test_no_negations_remain(self):
        def clean(f):
            if isinstance(f, Not):
                return False
            if isinstance(f, (And, Or)):
                return all(clean(a) for a in f.args)
            if isinstance(f, (Exists, Forall)):
                return clean(f.body)
            return True

        rng = random.Random(34)
        for _ in range(300):
            f = random_qf(rng, ["x", "y"])
            assert clean(nnf(f))

    def test_preserves_truth(self):
        rng = random.Random(35)
        for _ in range(300):
            f = random_qf(rng, ["x", "y"])
            g = nnf(f)
            for _ in range(8):
                env = random_env(rng, ["x", "y"], -9, 9)
                assert eval_assignment(f, env) == eval_assignment(g, env)


class TestQuantifierElimination:
    def test_direct_witness_formulas(self):
        assert qe_cooper(parse_formula("E y. y = x + 1")) == TRUE
        assert decide_sentence(parse_formula("E x. 2*x = 3")) is False
        g = qe_cooper(parse_formula("E y. (x = 2*y \\/ x = 2*y + 1)"))
        for v in range(-6, 7):
            assert eval_assignment(g, {"x": v})

    def test_output_is_quantifier_free(self):
        rng = random.Random(36)
        for _ in range(150):
            f, names = random_family_formula(rng)
            g = qe_cooper(f)

            def qf(h):
                if isinstance(h, (Exists, Forall)):
                    return False
                if isinstance(h, (And, Or)):
                    return all(qf(a) for a in h.args)
                if isinstance(h, Not):
                    return qf(h.body)
                return True

            assert qf(g)
            assert free_vars(g) <= set(names)

    def test_agreement_with_evaluation(self):
        rng = random.Random(37)
        for _ in range(80):
            f, names = random_family_formula(rng)
            g = qe_cooper(f)
            for _ in range(20):
                env = random_env(rng, names)
                assert eval_assignment(g, env) == window_eval(f, env)

    def test_budget_is_an_error_not_a_wrong_answer(self):
        f = parse_formula(
            "A x. E y. E z. 7*y + 11*z <= x /\\ 5*y - 3*z >= x /\\ 13 | y + z"
        )
        with pytest.raises(BudgetExceededError):
            qe_cooper(f, node_budget=40)

    def test_forall_via_negation(self):
        assert decide_sentence(parse_formula("A x. 2 | x \\/ 2 | x + 1")) is True
        assert decide_sentence(parse_formula("A x. 2 | x")) is False


class TestDecideSentence:
    def test_curated_suite(self):
        for text, expected, _ in CURATED_SENTENCES:
            assert decide_sentence(parse_formula(text)) == expected, text

    def test_curated_suite_against_brute_force(self):
        for text, expected, bound in CURATED_SENTENCES:
            if bound is None:
                continue
            f = parse_formula(text)
            assert brute_eval(f, {}, bound) == expected, text

    def test_rejects_open_formulas(self):
        with pytest.raises(UsageError):
            decide_sentence(parse_formula("x <= 1"))

    def test_eval_assignment_contract(self):
        f = parse_formula("x <= 3")
        assert eval_assignment(f, {"x": 2}) is True
        assert eval_assignment(parse_formula("3 | x"), {"x": 4}) is False
        assert eval_assignment(parse_formula("x = y"), {"x": 7, "y": 7}) is True
        with pytest.raises(UsageError):
            eval_assignment(f, {})
        with pytest.raises(UsageError):
            eval_assignment(parse_formula("E x. x = 0"), {})


class TestConstructors:
    def test_connective_shortcuts(self):
        assert conj([]) == TRUE
        assert disj([]) == FALSE
        assert conj([TRUE, FALSE]) == FALSE
        assert neg(neg(Le(var("x")))) == Le(var("x"))
        assert implies(FALSE, Le(var("x"))) == TRUE

    def test_quantifier_helpers(self):
        f = exists(["a", "b"], eq(var("a"), var("b")))
        assert isinstance(f, Exists) and isinstance(f.body, Exists)
        g = forall("a", le(var("a"), var("a")))
        assert isinstance(g, Forall)

    def test_strict_and_difference_sugar(self):
        assert lt(num(1), num(2)) == TRUE or simplify(lt(num(1), num(2))) == TRUE
        assert simplify(ne(num(1), num(1))) == FALSE
        assert simplify(ge(var("x"), var("x"))) == TRUE
