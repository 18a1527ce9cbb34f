import pytest
from hypothesis import given, settings

from bqltl import formula as fm
from bqltl.errors import FormulaSyntaxError
from bqltl.trace import eval_ltl

from conftest import lassos, matrices

x, y, z = fm.Atom("x"), fm.Atom("y"), fm.Atom("z")


class TestParse:
    def test_two_blocks(self):
        f = fm.parse("A{x} E{y} (G (x <-> y))")
        assert [(b.kind, b.vars) for b in f.prefix] == [(fm.FORALL, {"x"}), (fm.EXISTS, {"y"})]
        assert f.matrix == fm.Globally(fm.Iff(x, y))

    def test_footnote_formula(self):
        f = fm.parse("E{y} (G (y & X !y))")
        assert f.prefix == (fm.QuantBlock(fm.EXISTS, {"y"}),)
        assert f.matrix == fm.Globally(fm.And(y, fm.Next(fm.Not(y))))

    def test_quantifier_inside_matrix_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            fm.parse("G (E{y} y)")

    def test_rebinding_rejected(self):
        with pytest.raises((FormulaSyntaxError, ValueError)):
            fm.parse("E{y} A{x} E{y} (x & y)")

    def test_error_position(self):
        with pytest.raises(FormulaSyntaxError) as e:
            fm.parse("A{x}\nE{y} (x &")
        assert e.value.line == 2

    def test_same_kind_blocks_merge(self):
        f = fm.parse("E{a} E{b} A{x} x & a & b")
        assert f.prefix == (fm.QuantBlock(fm.EXISTS, {"a", "b"}), fm.QuantBlock(fm.FORALL, {"x"}))

    def test_comments_and_whitespace(self):
        f = fm.parse("# a comment\nE{y}   # trailing\n  F y")
        assert f.matrix == fm.Eventually(y)

    @pytest.mark.parametrize("text, expected", [
        ("x & y | z", fm.Or(fm.And(x, y), z)),
        ("x -> y -> z", fm.Implies(x, fm.Implies(y, z))),
        ("x U y U z", fm.Until(x, fm.Until(y, z))),
        ("!x U y", fm.Until(fm.Not(x), y)),
        ("x <-> y & z", fm.Iff(x, fm.And(y, z))),
        ("X F G x", fm.Next(fm.Eventually(fm.Globally(x)))),
    ])
    def test_precedence(self, text, expected):
        assert fm.parse_matrix(text) == expected

    @settings(max_examples=200, deadline=None)
    @given(matrices(("x", "y", "z")))
    def test_print_parse_round_trip(self, m):
        f = fm.QuantifiedFormula((fm.QuantBlock(fm.FORALL, {"x"}), fm.QuantBlock(fm.EXISTS, {"y"})), m)
        assert fm.parse(fm.to_text(f)) == f


class TestStructure:
    @pytest.mark.parametrize("text, free", [
        ("A{x} E{y} (x <-> y & z)", {"z"}),
        ("A{x} E{y} ((G x) <-> y)", set()),
        ("x & y", {"x", "y"}),
    ])
    def test_free_vars(self, text, free):
        assert fm.free_vars(fm.parse(text)) == free

    def test_negate_swaps_blocks(self):
        f = fm.parse("A{x} E{y} G (x <-> y)")
        n = fm.negate(f)
        assert [b.kind for b in n.prefix] == [fm.EXISTS, fm.FORALL]
        assert n.matrix == fm.Not(f.matrix)

    def test_negate_involution_on_prefix(self):
        f = fm.parse("E{y} A{x} E{z} G (x | y | z)")
        assert fm.negate(fm.negate(f)).prefix == f.prefix

    @pytest.mark.parametrize("text, tag, count", [
        ("E{y} A{x} G (x | y)", fm.SIGMA1, 0),
        ("A{x} E{y} G (x | y)", fm.GENERAL, 1),
        ("A{x1} E{y} A{x2} G (x1 | y | x2)", fm.GENERAL, 1),
        ("E{y} G y", fm.SIGMA0, 0),
        ("A{x} G x", fm.PI0, 0),
        ("E{z} A{x1} E{y1} A{x2} E{y2} G (z | x1 | y1 | x2 | y2)", fm.GENERAL, 2),
    ])
    def test_classify(self, text, tag, count):
        assert fm.classify(fm.parse(text)) == fm.FragmentClass(tag, count)

    def test_classify_rejects_open(self):
        with pytest.raises(ValueError):
            fm.classify(fm.parse("E{y} x & y"))

    def test_negated_sigma1_is_pi_shaped(self):
        f = fm.parse("E{y} A{x} G (x | y)")
        assert [b.kind for b in fm.negate(f).prefix] == [fm.FORALL, fm.EXISTS]

    def test_dep(self):
        p = fm.parse("A{x1} E{y} A{x2} (x1 | y | x2)").prefix
        assert fm.dep(p, p[1], frozenset({"z"})) == {"z", "x1"}
        p2 = fm.parse("E{y} A{x} (x | y)").prefix
        assert fm.dep(p2, p2[0]) == frozenset()
        p3 = fm.parse("A{x} E{y} (x | y)").prefix
        assert fm.dep(p3, p3[1]) == {"x"}

    def test_dep_rejects_universal_block(self):
        p = fm.parse("A{x} E{y} (x | y)").prefix
        with pytest.raises(ValueError):
            fm.dep(p, p[0])

    def test_dep_monotone(self):
        p = fm.parse("E{a} A{x1} E{b} A{x2} E{c} (a | x1 | b | x2 | c)").prefix
        ex = [b for b in p if b.existential]
        deps = [fm.dep(p, b) for b in ex]
        assert deps[0] <= deps[1] <= deps[2]


class TestNnf:
    @pytest.mark.parametrize("m, expected", [
        (fm.Not(fm.Until(x, y)), fm.Release(fm.Not(x), fm.Not(y))),
        (fm.Not(fm.Globally(x)), fm.Until(fm.TRUE, fm.Not(x))),
        (fm.Not(fm.Not(x)), x),
    ])
    def test_examples(self, m, expected):
        assert fm.to_nnf(m) == expected

    @settings(max_examples=300, deadline=None)
    @given(matrices(), lassos())
    def test_equivalent_on_lassos(self, m, pi):
        assert eval_ltl(fm.to_nnf(m), pi) == eval_ltl(m, pi)

    @settings(max_examples=200, deadline=None)
    @given(matrices())
    def test_negations_only_on_atoms(self, m):
        for n in fm.subformulas(fm.to_nnf(m)):
            if isinstance(n, fm.Not):
                assert isinstance(n.arg, fm.Atom)
            assert not isinstance(n, (fm.Eventually, fm.Globally, fm.Implies, fm.Iff))
