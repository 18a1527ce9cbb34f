import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bqltl import formula as fm
from bqltl.automata import word as wa
from bqltl.errors import ResourceExceeded
from bqltl.games import (EVEN, ODD, GameBuilder, ParityGame, attractor, brute_force_winners, build_multi_game,
                         check_strategy, extract_team_strategy, random_game, sequentialize, zielonka_solve)


def game_from(owner, moves, color):
    return ParityGame(list(owner), [list(m) for m in moves], list(color))


@st.composite
def games(draw, max_positions=6):
    n = draw(st.integers(1, max_positions))
    owner = draw(st.lists(st.sampled_from([EVEN, ODD]), min_size=n, max_size=n))
    color = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    moves = [draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=2, unique=True)) for _ in range(n)]
    return game_from(owner, moves, color)


class TestZielonka:
    def test_single_even_loop(self):
        g = game_from([EVEN], [[0]], [2])
        assert zielonka_solve(g).win_even == {0}

    def test_single_odd_loop(self):
        g = game_from([EVEN], [[0]], [1])
        assert zielonka_solve(g).win_odd == {0}

    def test_choice_matters(self):
        # Even at 0 picks between an even loop (1) and an odd loop (2)
        g = game_from([EVEN, ODD, ODD], [[1, 2], [1], [2]], [0, 2, 1])
        sol = zielonka_solve(g)
        assert sol.win_even == {0, 1} and sol.strategy_even[0] == 1

    def test_highest_color_decides(self):
        # forced cycle 0 -> 1 -> 0 with colors 3 and 2: max 3 is odd
        g = game_from([EVEN, EVEN], [[1], [0]], [3, 2])
        assert zielonka_solve(g).win_odd == {0, 1}

    def test_attractor_strategy_moves_towards_target(self):
        g = game_from([EVEN, ODD, EVEN], [[0, 1], [2], [2]], [0, 0, 0])
        region, strat = attractor(g, {2}, EVEN, {0, 1, 2})
        assert region == {0, 1, 2}
        assert strat[0] == 1

    def test_fifty_random_games_match_enumeration(self):
        rng = random.Random(2024)
        for _ in range(50):
            g = random_game(rng, rng.randint(2, 8), max_color=4, max_out=2)
            sol = zielonka_solve(g)
            assert sol.win_even == brute_force_winners(g)
            assert sol.win_even | sol.win_odd == set(range(len(g)))

    @settings(max_examples=150, deadline=None)
    @given(games())
    def test_partition_and_strategies(self, g):
        sol = zielonka_solve(g)
        assert not (sol.win_even & sol.win_odd)
        assert sol.win_even | sol.win_odd == set(range(len(g)))
        check_strategy(g, sol.win_even, sol.strategy_even, EVEN)
        check_strategy(g, sol.win_odd, sol.strategy_odd, ODD)

    def test_check_strategy_rejects_losing_strategy(self):
        g = game_from([EVEN, ODD, ODD], [[1, 2], [1], [2]], [0, 2, 1])
        with pytest.raises(AssertionError):
            check_strategy(g, {0, 2}, {0: 2}, EVEN)

    def test_brute_force_limit(self):
        g = game_from([EVEN] * 20, [[0, 1]] * 20, [0] * 20)
        with pytest.raises(ResourceExceeded):
            brute_force_winners(g, limit=1000)

    def test_dead_ends_repaired(self):
        gb = GameBuilder()
        v, _ = gb.add("a", EVEN, 2)
        g = gb.build(v)
        assert g.moves[0] == [0] and zielonka_solve(g).win_odd == {0}

    def test_position_without_moves_rejected(self):
        with pytest.raises(ValueError):
            game_from([EVEN], [[]], [0])


def multi(text):
    f = fm.parse(text)
    d = wa.nbw_to_dpw(wa.ltl_to_nbw(f.matrix, f.all_vars))
    m = build_multi_game(d, f.prefix)
    seq = sequentialize(m)
    return f, m, seq, zielonka_solve(seq)


class TestMultiPlayer:
    def test_copy_wins(self):
        _, m, seq, sol = multi("A{x} E{y} G (y <-> x)")
        assert seq.initial in sol.win_even
        p = extract_team_strategy(m, seq, sol)
        q = m.dpw.initial
        assert p.round(q, frozenset({"x"})) == {"x", "y"}
        assert p.round(q, frozenset()) == frozenset()

    def test_prediction_loses(self):
        _, _, seq, sol = multi("A{x} E{y} G (y <-> X x)")
        assert seq.initial in sol.win_odd

    def test_player_order_follows_prefix(self):
        _, m, _, _ = multi("E{y} A{x} (F x <-> F y)")
        assert m.teams == [EVEN, ODD] and m.blocks == [{"y"}, {"x"}]

    def test_existential_first_sees_past_only(self):
        # y is chosen before x each round, so y cannot copy the current x
        _, _, seq, sol = multi("E{y} A{x} G (y <-> x)")
        assert seq.initial in sol.win_odd

    def test_alphabet_must_match_prefix(self):
        f = fm.parse("A{x} E{y} G (y <-> x)")
        d = wa.nbw_to_dpw(wa.ltl_to_nbw(f.matrix, {"x", "y", "z"}))
        with pytest.raises(ValueError):
            build_multi_game(d, f.prefix)

    def test_extract_rejects_lost_game(self):
        _, m, seq, sol = multi("A{x} E{y} G (y <-> X x)")
        with pytest.raises(ValueError):
            extract_team_strategy(m, seq, sol)

    def test_chain_positions_carry_base_color(self):
        _, m, seq, _ = multi("A{x} E{y} G F (x & y)")
        for v, key in enumerate(seq.names):
            q, i, partial = key
            if i > 0 and seq.moves[v] != [v]:
                assert seq.color[v] == m.dpw.color[q]
