import json

import pytest

from bqltl import formula as fm
from bqltl.automata import tree as ta
from bqltl.automata import word as wa
from bqltl.errors import AlphabetMismatch
from bqltl.generate import micro_apts
from bqltl.trace import powerset

MICRO = dict(micro_apts())
E, X, Y = frozenset(), frozenset({"x"}), frozenset({"y"})


def synthesis(text, inputs=("x",), outputs=("y",)):
    m = fm.parse_matrix(text)
    d = wa.nbw_to_dpw(wa.ltl_to_nbw(m, set(inputs) | set(outputs)))
    return ta.build_synthesis_apt(d, inputs, outputs)


def tree(update, labels, label_vars=("y",), direction_vars=("x",)):
    return ta.RegularTree(frozenset(label_vars), frozenset(direction_vars), len(labels), 0,
                          [{frozenset(k): v for k, v in row.items()} for row in update],
                          [frozenset(l) for l in labels])


# node reached by direction x carries y, the other child does not
COPY = tree([{(): 0, ("x",): 1}, {(): 0, ("x",): 1}], [(), ("y",)])


class TestRegularTree:
    def test_memory_and_labels(self):
        assert COPY.label_at([X, X, E]) == E
        assert COPY.label_at([E, X]) == Y

    def test_trimmed_drops_unreachable(self):
        t = tree([{(): 0, ("x",): 0}, {(): 1, ("x",): 1}], [("y",), ()])
        assert t.trimmed().n_memory == 1

    def test_json_round_trip(self):
        data = json.loads(json.dumps(COPY.to_json()))
        assert ta.RegularTree.from_json(data) == COPY

    def test_all_trees_counts(self):
        # memory 1: 2 labels; memory 2: 4 label pairs times the 3 canonical updates reaching state 1
        assert sum(1 for _ in ta.all_trees({"y"}, {"x"}, 1)) == 2
        assert sum(1 for _ in ta.all_trees({"y"}, {"x"}, 2)) == 2 + 4 * 12

    def test_all_trees_distinct(self):
        seen = {json.dumps(t.to_json(), sort_keys=True) for t in ta.all_trees({"y"}, {"x"}, 2)}
        assert len(seen) == 50

    def test_hide(self):
        assert ta.hide({"x", "z"}, {"z"}) == X
        assert ta.hide_path([X | {"z"}, {"z"}], {"z"}) == (X, E)

    def test_compose_reads_own_directions(self):
        outer = tree([{(): 0}], [("z",)], label_vars=("z",), direction_vars=())
        c = ta.tree_compose(COPY, outer)
        assert c.label_vars == {"y", "z"} and c.direction_vars == X
        assert c.label_at([X]) == {"y", "z"} and c.label_at([E]) == {"z"}

    def test_compose_overlapping_labels_rejected(self):
        with pytest.raises(AlphabetMismatch):
            ta.tree_compose(COPY, COPY)

    def test_dot(self):
        assert COPY.to_dot().startswith("digraph tree")


class TestSynthesisAutomaton:
    def test_copy_tree_accepted(self):
        assert ta.membership(synthesis("G (y <-> x)"), COPY)

    def test_constant_tree_rejected(self):
        a = synthesis("G (y <-> x)")
        assert not ta.membership(a, ta.constant_tree({"y"}, {"x"}, {"y"}))

    @pytest.mark.parametrize("text, inputs, outputs", [
        ("G (y <-> X x)", ("x",), ("y",)),
        ("G x", ("x",), ("y",)),
        ("G (y & X !y)", (), ("y",)),
    ])
    def test_unrealizable_is_empty(self, text, inputs, outputs):
        assert ta.apt_emptiness(synthesis(text, inputs, outputs)) is None

    def test_witness_is_member(self):
        a = synthesis("G (y <-> x)")
        w = ta.apt_emptiness(a)
        assert w is not None and ta.membership(a, w)

    def test_partition_required(self):
        d = wa.nbw_to_dpw(wa.ltl_to_nbw(fm.parse_matrix("G (x <-> y)"), {"x", "y"}))
        with pytest.raises(AlphabetMismatch):
            ta.build_synthesis_apt(d, {"x"}, {"x", "y"})

    def test_membership_alphabet_checked(self):
        with pytest.raises(AlphabetMismatch):
            ta.membership(synthesis("G (y <-> x)"), ta.constant_tree({"y"}, {"z"}, set()))

    def test_json_round_trip(self):
        a = synthesis("G (y <-> x)")
        b = ta.Apt.from_json(json.loads(json.dumps(a.to_json())))
        assert all(ta.membership(a, t) == ta.membership(b, t) for t in ta.all_trees({"y"}, {"x"}, 2))


class TestMicroAutomata:
    def test_at_least_ten(self):
        assert len(MICRO) >= 10
        assert any(not a.is_nondeterministic() for a in MICRO.values())

    def test_npt_rejects_alternation(self):
        a = MICRO["and-same-dir"]
        with pytest.raises(ValueError):
            ta.Npt(a.label_vars, a.direction_vars, a.n_states, a.initial, a.delta, a.color)

    @pytest.mark.parametrize("name, members", [
        ("always-y", 12 + 1), ("true", 50), ("false", 0), ("odd-loop", 0), ("copy-dir-root", 1),
    ])
    def test_member_counts(self, name, members):
        a = MICRO[name]
        assert sum(ta.membership(a, t) for t in ta.all_trees({"y"}, {"x"}, 2)) == members

    @pytest.mark.parametrize("name", sorted(MICRO))
    def test_ndet_preserves_language(self, name):
        a = MICRO[name]
        n = ta.ndet(a)
        assert n.is_nondeterministic()
        for t in ta.all_trees(a.label_vars, a.direction_vars, 2):
            assert ta.membership(n, t) == ta.membership(a, t), t.to_json()

    @pytest.mark.parametrize("name", sorted(MICRO))
    def test_emptiness_matches_enumeration(self, name):
        # alt-disj has members, but none below memory 3
        a = MICRO[name]
        w = ta.apt_emptiness(a)
        found = any(ta.membership(a, t) for t in ta.all_trees(a.label_vars, a.direction_vars, 3))
        assert (w is not None) == found
        if w is not None:
            assert ta.membership(a, w)

    @pytest.mark.parametrize("name", sorted(MICRO))
    def test_reduce_preserves_language(self, name):
        a = MICRO[name]
        r = ta.reduce(a)
        assert r.n_states <= a.n_states
        for t in ta.all_trees(a.label_vars, a.direction_vars, 2):
            assert ta.membership(r, t) == ta.membership(a, t)

    def test_reduce_cuts_sinks(self):
        # after y the ev-y automaton accepts everything, so one state remains
        assert ta.reduce(MICRO["ev-y"]).n_states == 1
        assert ta.reduce(MICRO["true"]).delta[0][Y] == ta.TRUE_DNF
        assert ta.reduce(MICRO["odd-loop"]).delta[0][Y] == ta.FALSE_DNF

    @pytest.mark.parametrize("name, true, false", [
        ("true", {0}, set()), ("false", set(), {0}), ("odd-loop", set(), {0}),
        ("ev-y", {1}, set()), ("root-y", {1}, set()), ("inf-y", set(), set()),
    ])
    def test_sink_states(self, name, true, false):
        assert ta.sink_states(MICRO[name]) == (true, false)

    @pytest.mark.parametrize("name", sorted(MICRO))
    def test_sinks_are_sound(self, name):
        a = MICRO[name]
        true, false = ta.sink_states(a)
        for q in true | false:
            b = ta.Apt(a.label_vars, a.direction_vars, a.n_states, q, a.delta, a.color)
            for t in ta.all_trees(a.label_vars, a.direction_vars, 2):
                assert ta.membership(b, t) == (q in true)


class TestChange:
    @pytest.mark.parametrize("name", sorted(MICRO))
    def test_matches_brute_force_shape(self, name):
        # hidden trees are searched up to memory 3: some accepted trees need it
        n = ta.ndet(MICRO[name])
        for xi in powerset(n.label_vars):
            for ups in powerset(n.direction_vars):
                c = ta.change(n, xi, ups)
                assert c.label_vars == n.label_vars - xi and c.direction_vars == ups
                for t in ta.all_trees(n.label_vars - xi, ups, 2):
                    assert ta.membership(c, t) == ta.in_shape(n, t, xi, 3), (sorted(xi), sorted(ups), t.to_json())

    @pytest.mark.parametrize("name", sorted(MICRO))
    def test_trivial_change_keeps_emptiness(self, name):
        a = MICRO[name]
        triv = ta.change(ta.ndet(a), frozenset(), a.direction_vars)
        assert (ta.apt_emptiness(triv) is None) == (ta.apt_emptiness(a) is None)

    def test_projection_of_constant_y_is_universal(self):
        c = ta.change(MICRO["always-y"], {"y"}, set())
        assert c.label_vars == E and c.direction_vars == E
        assert ta.membership(c, ta.constant_tree((), (), ()))

    def test_hidden_direction_guess_sees_all_directions(self):
        # the guessed labeling reads the hidden direction, so it can copy it
        c = ta.change(MICRO["copy-dir-root"], {"y"}, set())
        assert ta.apt_emptiness(c) is not None
        assert ta.in_shape(MICRO["copy-dir-root"], ta.constant_tree((), (), ()), {"y"}, 2)

    def test_hidden_direction_visible_label_is_empty(self):
        # a label that only sees depth cannot match both branches
        c = ta.change(MICRO["copy-dir-root"], set(), set())
        assert ta.apt_emptiness(c) is None

    def test_requires_nondeterministic_input(self):
        with pytest.raises(ValueError):
            ta.change(MICRO["and-same-dir"], set(), set())

    def test_unknown_variables_rejected(self):
        with pytest.raises(AlphabetMismatch):
            ta.change(MICRO["always-y"], {"z"}, set())
        with pytest.raises(AlphabetMismatch):
            ta.change(MICRO["always-y"], set(), {"z"})

    def test_unary_lasso(self):
        stem, loop = ta.unary_lasso(tree([{(): 1}, {(): 1}], [(), ("y",)], direction_vars=()))
        assert stem == [E] and loop == [Y]
