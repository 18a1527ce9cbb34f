import json
import random

import pytest
from hypothesis import given, settings

from bqltl import formula as fm
from bqltl import skolem as sk
from bqltl.automata import tree as ta
from bqltl.errors import AlphabetMismatch, ConformanceError
from bqltl.trace import LassoTrace, all_lassos, constant, eval_ltl, powerset, project

from conftest import lassos

E, X, Y = frozenset(), frozenset({"x"}), frozenset({"y"})


def copy_machine(delay=False):
    """y copies x now, or with one step of delay."""
    if delay:
        return sk.MealyMachine(Y, X, E, 2, 0, [{E: 0, X: 1}, {E: 0, X: 1}], [{E: E}, {E: Y}])
    return sk.MealyMachine(Y, X, X, 1, 0, [{E: 0, X: 0}], [{E: E, X: Y}])


def family(*machines, universe=X, mode=sk.BEHAVIORAL):
    return sk.MealySkolem(universe, list(machines), mode)


def lasso(universe, stem, loop):
    return LassoTrace(frozenset(universe), tuple(map(frozenset, stem)), tuple(map(frozenset, loop)))


class TestApply:
    def test_copy(self):
        out = sk.apply(family(copy_machine()), lasso("x", [X], [E, X]))
        assert all(("y" in out.letter(i)) == ("x" in out.letter(i)) for i in range(10))

    def test_delay(self):
        pi = lasso("x", [], [X, E, E])
        out = sk.apply(family(copy_machine(delay=True)), pi)
        assert "y" not in out.letter(0)
        assert all(("y" in out.letter(i + 1)) == ("x" in pi.letter(i)) for i in range(12))

    @settings(max_examples=100, deadline=None)
    @given(lassos(("x",)))
    def test_inputs_preserved(self, pi):
        out = sk.apply(family(copy_machine(delay=True)), pi)
        assert all(out.letter(i) & X == pi.letter(i) for i in range(3 * len(pi) + 3))

    def test_universe_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            sk.apply(family(copy_machine()), constant({"z"}, set()))

    def test_machine_reads_checked(self):
        with pytest.raises(AlphabetMismatch):
            family(copy_machine(), universe=E)

    def test_json_round_trip(self):
        th = family(copy_machine(delay=True), mode=sk.WEAK_BEHAVIORAL)
        back = sk.MealySkolem.from_json(json.loads(json.dumps(th.to_json())))
        assert back == th

    def test_dot(self):
        assert family(copy_machine()).to_dot().startswith("digraph mealy")


class TestConformance:
    @pytest.mark.parametrize("text, mode, past, now", [
        ("A{x} E{y} G (x <-> y)", sk.BEHAVIORAL, {"x"}, {"x"}),
        ("E{y} A{x} G (x <-> y)", sk.BEHAVIORAL, set(), set()),
        ("E{y} A{x} G (x <-> y)", sk.WEAK_BEHAVIORAL, {"x"}, set()),
    ])
    def test_licensed(self, text, mode, past, now):
        f = fm.parse(text)
        b = next(b for b in f.prefix if b.existential)
        assert sk.licensed(f.prefix, b, mode) == (past, now)

    def test_copy_conforms_after_forall(self):
        f = fm.parse("A{x} E{y} G (x <-> y)")
        assert sk.check_conformance(family(copy_machine()), f.prefix, sk.BEHAVIORAL)

    def test_copy_illegal_before_forall(self):
        f = fm.parse("E{y} A{x} G (x <-> y)")
        assert not sk.check_conformance(family(copy_machine()), f.prefix, sk.WEAK_BEHAVIORAL)

    def test_weak_reads_past_of_later_universals(self):
        f = fm.parse("E{y} A{x} G (X y <-> x)")
        th = family(copy_machine(delay=True), mode=sk.WEAK_BEHAVIORAL)
        assert sk.check_conformance(th, f.prefix, sk.WEAK_BEHAVIORAL)
        assert not sk.check_conformance(th, f.prefix, sk.BEHAVIORAL)

    def test_block_count_checked(self):
        f = fm.parse("A{x} E{y} G (x <-> y)")
        assert not sk.check_conformance(family(), f.prefix, sk.BEHAVIORAL)


class TestValidate:
    def test_copy_valid(self):
        assert sk.validate(family(copy_machine()), fm.parse_matrix("G (x <-> y)")).ok

    def test_delay_invalid_with_counterexample(self):
        m = fm.parse_matrix("G (x <-> y)")
        v = sk.validate(family(copy_machine(delay=True)), m)
        assert not v.ok
        assert not eval_ltl(m, sk.apply(family(copy_machine(delay=True)), v.counterexample))

    def test_delay_valid_for_shifted_matrix(self):
        assert sk.validate(family(copy_machine(delay=True)), fm.parse_matrix("G (X y <-> x)")).ok

    def test_agrees_with_sampling(self):
        # exact validation is sound and complete against evaluation on all small lassos
        rng = random.Random(8)
        mats = [fm.parse_matrix(t) for t in ("G (x -> y)", "G F y", "F (x & y)", "G (y -> X x)", "y U x")]
        machines = list(sk.enumerate_machines(Y, X, X, 1)) + list(sk.enumerate_machines(Y, X, X, 2))
        for _ in range(60):
            mc = rng.choice(machines)
            m = rng.choice(mats)
            th = family(mc)
            sampled = all(eval_ltl(m, sk.apply(th, pi)) for pi in all_lassos({"x"}, 3, 3))
            exact = sk.validate(th, m).ok
            if exact:
                assert sampled
            elif sampled:
                # the counterexample is longer than the sampled lassos
                cex = sk.validate(th, m).counterexample
                assert len(cex) > 3

    def test_constant_machine(self):
        pi = lasso("y", [Y], [E])
        th = sk.MealySkolem(E, [sk.constant_machine(Y, pi)])
        out = sk.apply(th, constant(set(), set()))
        assert project(out, {"y"}).letter(0) == Y and project(out, {"y"}).letter(5) == E
        assert sk.validate(th, fm.parse_matrix("y & X G !y")).ok


class TestOracle:
    def test_copy_found_small(self):
        r = sk.enumerate_oracle(fm.parse("A{x} E{y} G (x <-> y)"), sk.BEHAVIORAL, 2)
        assert r.status == sk.SAT and r.witness.memory_size() == 1
        assert sk.validate(r.witness, fm.parse_matrix("G (x <-> y)")).ok

    def test_prediction_unknown(self):
        r = sk.enumerate_oracle(fm.parse("A{x} E{y} G (y <-> X x)"), sk.BEHAVIORAL, 2)
        assert r.status == sk.UNKNOWN and r.exhausted_bound

    def test_never_unsat(self):
        r = sk.enumerate_oracle(fm.parse("E{y} G (y & !y)"), sk.BEHAVIORAL, 2)
        assert r.status == sk.UNKNOWN

    def test_candidate_budget(self):
        r = sk.enumerate_oracle(fm.parse("A{x} E{y} G (y <-> X x)"), sk.BEHAVIORAL, 3, max_candidates=10)
        assert r.status == sk.UNKNOWN and not r.exhausted_bound and r.candidates == 10

    def test_memory_two_needed(self):
        # y must alternate: one state cannot do it
        f = fm.parse("E{y} G (y <-> X !y)")
        assert sk.enumerate_oracle(f, sk.BEHAVIORAL, 1).status == sk.UNKNOWN
        r = sk.enumerate_oracle(f, sk.BEHAVIORAL, 2)
        assert r.status == sk.SAT and r.witness.memory_size() == 2

    def test_weak_sees_past(self):
        f = fm.parse("E{y} A{x} G (X y <-> x)")
        assert sk.enumerate_oracle(f, sk.BEHAVIORAL, 2).status == sk.UNKNOWN
        assert sk.enumerate_oracle(f, sk.WEAK_BEHAVIORAL, 2).status == sk.SAT

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            sk.enumerate_oracle(fm.parse("E{y} G y"), sk.BEHAVIORAL, 0)
        with pytest.raises(ValueError):
            sk.enumerate_oracle(fm.parse("E{y} G (x & y)"), sk.BEHAVIORAL, 1)

    def test_enumeration_counts(self):
        # one state: one update, 2^2 output tables over the current x
        assert sum(1 for _ in sk.enumerate_machines(Y, X, X, 1)) == 4
        ms = list(sk.enumerate_machines(Y, X, X, 2))
        assert len({json.dumps(m.to_json(), sort_keys=True) for m in ms}) == len(ms)


class TestTrees:
    def test_machine_tree_round_trip(self):
        for mc in list(sk.enumerate_machines(Y, X, X, 1)) + list(sk.enumerate_machines(Y, X, X, 2)):
            back = sk.machine_from_tree(sk.tree_from_machine(mc), Y)
            th, th2 = family(mc), family(back)
            for pi in all_lassos({"x"}, 2, 2):
                a, b = sk.apply(th, pi), sk.apply(th2, pi)
                assert all(a.letter(i) == b.letter(i) for i in range(len(a) + len(b)))

    def test_tree_from_weak_machine_rejected(self):
        with pytest.raises(ValueError):
            sk.tree_from_machine(copy_machine(delay=True))

    def test_copy_tree_labels(self):
        t = sk.tree_from_machine(copy_machine())
        assert t.label_at([]) == E and t.label_at([X]) == Y and t.label_at([X, E]) == E

    def test_decompose_recompose(self):
        prefix = fm.parse("A{x1} E{y} A{x2} E{z} G (x1 | x2 | y | z)").prefix
        dirs = frozenset({"x1", "x2"})
        # y copies x1; z copies x1 and x2
        y_part = ta.RegularTree({"y"}, {"x1"}, 2, 0, [{E: 0, frozenset({"x1"}): 1}] * 2, [E, Y])
        ds = powerset(dirs)
        z_part = ta.RegularTree({"z"}, dirs, 2, 0, [{d: int(d == dirs) for d in ds}] * 2, [E, frozenset({"z"})])
        joint = sk.recompose([y_part, z_part], dirs)
        parts = sk.decompose(joint, prefix)
        assert [p.direction_vars for p in parts] == [{"x1"}, dirs]
        assert sk.same_labels(parts[0], y_part) and sk.same_labels(parts[1], z_part)
        assert parts[1].label_at([dirs]) == {"z"} and parts[1].label_at([X]) == E

    def test_decompose_rejects_peeking(self):
        prefix = fm.parse("A{x1} E{y} A{x2} G (x1 | x2 | y)").prefix
        dirs = frozenset({"x1", "x2"})
        peek = ta.RegularTree({"y"}, dirs, 2, 0, [{d: int("x2" in d) for d in powerset(dirs)}] * 2, [E, Y])
        with pytest.raises(ConformanceError):
            sk.decompose(peek, prefix)

    def test_same_labels_directions_checked(self):
        a = ta.constant_tree({"y"}, {"x"}, set())
        b = ta.constant_tree({"y"}, set(), set())
        with pytest.raises(AlphabetMismatch):
            sk.same_labels(a, b)
