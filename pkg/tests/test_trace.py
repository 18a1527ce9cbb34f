import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bqltl import formula as fm
from bqltl.trace import (LassoTrace, all_lassos, combine, constant, eval_ltl, normalize, project, project_out,
                         random_lasso, rotate)

from conftest import lassos, matrices, naive_eval

X, Y = frozenset({"x"}), frozenset({"y"})
E = frozenset()


def lasso(universe, stem, loop):
    return LassoTrace(frozenset(universe), tuple(map(frozenset, stem)), tuple(map(frozenset, loop)))


class TestLetters:
    def test_constant(self):
        assert lasso("x", [], [X]).letter(7) == X

    def test_stem_then_loop(self):
        pi = lasso("x", [X], [E])
        assert pi.letter(0) == X and pi.letter(3) == E

    def test_period_two(self):
        assert lasso("x", [], [X, E]).letter(2) == X

    def test_empty_loop_rejected(self):
        with pytest.raises(ValueError):
            lasso("x", [X], [])

    def test_letter_outside_universe_rejected(self):
        with pytest.raises(ValueError):
            lasso("x", [], [Y])

    def test_json_round_trip(self):
        pi = lasso({"x", "y"}, [X], [X | Y, E])
        assert LassoTrace.from_json(pi.to_json()) == pi
        assert pi.to_json() == {"universe": ["x", "y"], "stem": [["x"]], "loop": [["x", "y"], []]}


class TestAlgebra:
    def test_project(self):
        pi = constant({"x", "y"}, {"x", "y"})
        assert project(pi, {"x"}) == constant({"x"}, {"x"})
        assert project_out(pi, {"x"}) == constant({"y"}, {"y"})
        assert project(pi, set()) == constant(set(), set())

    def test_combine_examples(self):
        assert combine(constant({"x"}, {"x"}), constant({"y"}, set())) == constant({"x", "y"}, {"x"})
        got = combine(lasso("x", [X], [E]), lasso("y", [E], [Y]))
        assert got == lasso({"x", "y"}, [X], [Y])

    def test_combine_overlap_rejected(self):
        with pytest.raises(ValueError):
            combine(constant({"x"}, set()), constant({"x"}, set()))

    def test_combine_project_round_trip(self):
        rng = random.Random(7)
        for _ in range(200):
            p1 = random_lasso(rng, {"x"}, 3, 3)
            p2 = random_lasso(rng, {"y", "z"}, 3, 4)
            c = combine(p1, p2)
            for i in range(12):
                assert c.letter(i) & p1.universe == p1.letter(i)
                assert c.letter(i) & p2.universe == p2.letter(i)

    @settings(max_examples=200, deadline=None)
    @given(lassos())
    def test_normalize_preserves_letters(self, pi):
        n = normalize(pi)
        assert len(n) <= len(pi)
        assert all(n.letter(i) == pi.letter(i) for i in range(3 * len(pi)))

    def test_all_lassos_count(self):
        # 2 letters; stems 0..1, loops 1..2: (1 + 2) * (2 + 4)
        assert sum(1 for _ in all_lassos({"x"}, 1, 2)) == 18


class TestEval:
    def test_examples(self):
        assert eval_ltl(fm.parse_matrix("G x"), constant({"x"}, {"x"}))
        both = constant({"x", "y"}, {"x", "y"})
        assert eval_ltl(fm.parse_matrix("(G x) <-> y"), both)
        m = fm.parse_matrix("y & X !y")
        assert eval_ltl(m, lasso("y", [Y, E], [E]), 0)

    def test_footnote_formula_false_everywhere(self):
        m = fm.parse_matrix("G (y & X !y)")
        assert not any(eval_ltl(m, pi) for pi in all_lassos({"y"}, 2, 3))

    @settings(max_examples=400, deadline=None)
    @given(matrices(), lassos())
    def test_matches_naive_unrolling(self, m, pi):
        assert eval_ltl(m, pi) == naive_eval(m, pi)

    @settings(max_examples=200, deadline=None)
    @given(matrices(), lassos(), st.integers(0, 6))
    def test_negation_and_positions(self, m, pi, i):
        assert eval_ltl(fm.Not(m), pi, i) == (not eval_ltl(m, pi, i))

    @settings(max_examples=200, deadline=None)
    @given(matrices(max_leaves=3), matrices(max_leaves=3), lassos(), st.integers(0, 5))
    def test_until_unfolds(self, a, b, pi, i):
        u = fm.Until(a, b)
        assert eval_ltl(u, pi, i) == (eval_ltl(b, pi, i) or (eval_ltl(a, pi, i) and eval_ltl(u, pi, i + 1)))

    @settings(max_examples=200, deadline=None)
    @given(matrices(), lassos(), st.integers(0, 4), st.integers(0, 4))
    def test_rotation(self, m, pi, k, i):
        assert eval_ltl(m, rotate(pi, k), i) == eval_ltl(m, pi, i + k)
