"""Two-player max-even parity games and the multi-player team game.

Positions are the integers ``0..n-1``. Player 0 is Even, player 1 is Odd.
Strategies are dicts from owned positions to a chosen successor; ties are
broken towards the lowest-numbered successor so results are reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from . import deadline
from .errors import ResourceExceeded
from .trace import powerset

EVEN, ODD = 0, 1


@dataclass
class ParityGame:
    owner: List[int]
    moves: List[List[int]]
    color: List[int]
    initial: int = 0
    names: Optional[list] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        self.moves = [sorted(set(m)) for m in self.moves]
        for v, m in enumerate(self.moves):
            if not m:
                raise ValueError(f"position {v} has no move")

    def __len__(self):
        return len(self.owner)

    def to_dot(self) -> str:
        lines = ["digraph game {"]
        for v in range(len(self)):
            shape = "circle" if self.owner[v] == EVEN else "box"
            lines.append(f'  {v} [shape={shape}, label="{v}:{self.color[v]}"];')
        for v in range(len(self)):
            for w in self.moves[v]:
                lines.append(f"  {v} -> {w};")
        lines.append("}")
        return "\n".join(lines)


class GameBuilder:
    """Incremental construction with keyed positions and dead-end repair.

    A position without moves gets a self-loop colored to lose for its owner.
    """

    def __init__(self):
        self.index = {}
        self.keys = []
        self.owner = []
        self.color = []
        self.moves = []

    def add(self, key, owner, color) -> Tuple[int, bool]:
        v = self.index.get(key)
        if v is not None:
            return v, False
        v = self.index[key] = len(self.keys)
        self.keys.append(key)
        self.owner.append(owner)
        self.color.append(color)
        self.moves.append([])
        return v, True

    def edge(self, v, w):
        self.moves[v].append(w)

    def build(self, initial=0) -> ParityGame:
        moves = [list(m) for m in self.moves]
        color = list(self.color)
        for v, m in enumerate(moves):
            if not m:
                m.append(v)
                # owner stuck: make the loop odd for Even, even for Odd
                color[v] = 1 if self.owner[v] == EVEN else 0
        return ParityGame(list(self.owner), moves, color, initial, names=list(self.keys))


# ------------------------------------------------------------------ Zielonka

def attractor(game: ParityGame, target: Set[int], player: int, arena: Set[int]):
    """Attractor of ``target`` for ``player`` inside ``arena``.

    Returns (region, strategy) where the strategy maps the player's newly
    attracted positions to a successor leading into the region.
    """
    region = set(target)
    strategy = {}
    preds = {v: [] for v in arena}
    for v in arena:
        for w in game.moves[v]:
            if w in arena:
                preds[w].append(v)
    count = {v: sum(1 for w in game.moves[v] if w in arena) for v in arena}
    queue = sorted(region)
    i = 0
    while i < len(queue):
        w = queue[i]
        i += 1
        for v in sorted(preds[w]):
            if v in region:
                continue
            if game.owner[v] == player:
                strategy[v] = w
                region.add(v)
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    region.add(v)
                    queue.append(v)
    return region, strategy


def _zielonka(game: ParityGame, arena: Set[int]):
    """Returns (win_even, win_odd, strat_even, strat_odd) on the subarena."""
    if not arena:
        return set(), set(), {}, {}
    top = max(game.color[v] for v in arena)
    p = top % 2
    q = 1 - p
    tops = {v for v in arena if game.color[v] == top}
    attr, attr_strat = attractor(game, tops, p, arena)
    sub = _zielonka(game, arena - attr)
    win = [sub[0], sub[1]]
    strat = [dict(sub[2]), dict(sub[3])]
    if not win[q]:
        region = set(arena)
        s = strat[p]
        s.update(attr_strat)
        for v in tops:
            if game.owner[v] == p:
                s[v] = min(w for w in game.moves[v] if w in arena)
        out = [set(), set()]
        out[p] = region
        strats = [{}, {}]
        strats[p] = {v: w for v, w in s.items() if v in region and game.owner[v] == p}
        return out[0], out[1], strats[0], strats[1]
    battr, battr_strat = attractor(game, win[q], q, arena)
    sub2 = _zielonka(game, arena - battr)
    out = [set(sub2[0]), set(sub2[1])]
    strats = [dict(sub2[2]), dict(sub2[3])]
    out[q] |= battr
    strats[q].update({v: w for v, w in strat[q].items() if v in win[q]})
    strats[q].update(battr_strat)
    for k in (0, 1):
        strats[k] = {v: w for v, w in strats[k].items() if v in out[k] and game.owner[v] == k}
    return out[0], out[1], strats[0], strats[1]


@dataclass
class Solution:
    win_even: FrozenSet[int]
    win_odd: FrozenSet[int]
    strategy_even: Dict[int, int]
    strategy_odd: Dict[int, int]

    def winner(self, v) -> int:
        return EVEN if v in self.win_even else ODD


def zielonka_solve(game: ParityGame) -> Solution:
    we, wo, se, so = _zielonka(game, set(range(len(game))))
    # complete strategies on won positions where any move stays winning
    for v in we:
        if game.owner[v] == EVEN and v not in se:
            se[v] = min(w for w in game.moves[v] if w in we)
    for v in wo:
        if game.owner[v] == ODD and v not in so:
            so[v] = min(w for w in game.moves[v] if w in wo)
    sol = Solution(frozenset(we), frozenset(wo), se, so)
    check_strategy(game, sol.win_even, se, EVEN)
    check_strategy(game, sol.win_odd, so, ODD)
    return sol


def check_strategy(game: ParityGame, region, strategy, player):
    """Verify that ``strategy`` keeps plays in ``region`` and wins them.

    The restricted graph must have no cycle whose top color has the wrong
    parity; raises AssertionError otherwise.
    """
    from .graphs import nontrivial_sccs

    region = set(region)

    def succ(v):
        if game.owner[v] == player:
            return [strategy[v]]
        return game.moves[v]

    for v in region:
        for w in succ(v):
            if w not in region:
                raise AssertionError(f"strategy leaves winning region at {v}")
    # a losing cycle exists iff some SCC restricted to colors <= c (c of the
    # wrong parity) contains a cycle through color c
    colors = sorted({game.color[v] for v in region if game.color[v] % 2 != player})
    for c in colors:
        sub = {v for v in region if game.color[v] <= c}
        for comp in nontrivial_sccs(sub, lambda v: [w for w in succ(v) if w in sub]):
            if any(game.color[v] == c for v in comp):
                raise AssertionError(f"strategy for player {player} admits a losing cycle of color {c}")


# -------------------------------------------------------------- brute force

def play_winner(game: ParityGame, start, choice) -> int:
    """Winner of the unique play when every position follows ``choice``."""
    seen = {}
    trail = []
    v = start
    while v not in seen:
        seen[v] = len(trail)
        trail.append(v)
        v = choice[v]
    top = max(game.color[w] for w in trail[seen[v]:])
    return top % 2


def brute_force_winners(game: ParityGame, limit=200_000) -> FrozenSet[int]:
    """Even's winning region by enumerating all positional strategy pairs."""
    n = len(game)
    even = [v for v in range(n) if game.owner[v] == EVEN]
    odd = [v for v in range(n) if game.owner[v] == ODD]
    total = 1
    for v in range(n):
        total *= len(game.moves[v])
    if total > limit:
        raise ResourceExceeded("brute_force_game", limit)
    odd_choices = list(itertools.product(*(game.moves[v] for v in odd)))
    wins = set()
    for es in itertools.product(*(game.moves[v] for v in even)):
        base = dict(zip(even, es))
        for v in range(n):
            if v in wins:
                continue
            ok = True
            for os_ in odd_choices:
                choice = dict(base)
                choice.update(zip(odd, os_))
                if play_winner(game, v, choice) != EVEN:
                    ok = False
                    break
            if ok:
                wins.add(v)
    return frozenset(wins)


def random_game(rng, n_positions, max_color=3, max_out=2) -> ParityGame:
    owner = [rng.randint(0, 1) for _ in range(n_positions)]
    color = [rng.randint(0, max_color - 1) for _ in range(n_positions)]
    moves = []
    for _ in range(n_positions):
        k = rng.randint(1, max_out)
        moves.append(rng.sample(range(n_positions), min(k, n_positions)))
    return ParityGame(owner, moves, color, 0)


# ------------------------------------------------------ multi-player games

@dataclass
class MultiParityGame:
    """Round-based game on a DPW: players act in index order each round.

    ``blocks[i]`` is the variable set player ``i`` assigns; ``teams[i]`` is
    EVEN for existential blocks.
    """
    dpw: object
    blocks: List[FrozenSet[str]]
    teams: List[int]

    @property
    def players(self):
        return range(len(self.blocks))

    def actions(self, i):
        return powerset(self.blocks[i])


def build_multi_game(dpw, prefix) -> MultiParityGame:
    """One player per prefix block, in prefix order."""
    blocks, teams = [], []
    covered = frozenset()
    for b in prefix:
        blocks.append(frozenset(b.vars))
        teams.append(EVEN if b.existential else ODD)
        covered |= b.vars
    if covered != dpw.alphabet_vars:
        raise ValueError(f"prefix variables {sorted(covered)} do not partition the alphabet "
                         f"{sorted(dpw.alphabet_vars)}")
    return MultiParityGame(dpw, blocks, teams)


def sequentialize(m: MultiParityGame, cap=500_000) -> ParityGame:
    """Unfold each round into a chain of single-player choices.

    Position keys are (dpw state, player index, actions so far); chain
    positions carry the color of the round's base state.
    """
    d = m.dpw
    gb = GameBuilder()
    n = len(m.blocks)
    init, _ = gb.add((d.initial, 0, ()), m.teams[0] if n else EVEN, d.color[d.initial])
    work = [(d.initial, 0, ())]
    while work:
        deadline.check("sequentialize")
        key = work.pop()
        q, i, partial = key
        v = gb.index[key]
        if n == 0:
            nxt = [(d.step(q, frozenset()), 0, ())]
        elif i == n - 1:
            nxt = []
            for a in m.actions(i):
                letter = frozenset().union(*partial, a)
                nxt.append((d.step(q, letter), 0, ()))
        else:
            nxt = [(q, i + 1, partial + (a,)) for a in m.actions(i)]
        for k2 in nxt:
            q2, i2, _ = k2
            w, new = gb.add(k2, m.teams[i2] if n else EVEN, d.color[q2])
            gb.edge(v, w)
            if new:
                if len(gb.keys) > cap:
                    raise ResourceExceeded("sequentialize", cap)
                work.append(k2)
    return gb.build(init)


@dataclass
class TeamStrategyProfile:
    """Positional choices of the Even players on sequentialized positions.

    ``choose(i, q, partial)`` returns the action of Even player ``i`` at DPW
    state ``q`` after the lower-indexed players played ``partial``.
    """
    game: MultiParityGame
    table: Dict[Tuple, FrozenSet[str]]

    def choose(self, i, q, partial) -> FrozenSet[str]:
        return self.table[(q, i, tuple(partial))]

    def round(self, q, universal_letter) -> FrozenSet[str]:
        """All actions of one round given the universal players' letter."""
        partial = []
        for i in self.game.players:
            if self.game.teams[i] == EVEN:
                a = self.choose(i, q, partial)
            else:
                a = universal_letter & self.game.blocks[i]
            partial.append(a)
        return frozenset().union(*partial) if partial else frozenset()


def extract_team_strategy(m: MultiParityGame, seq: ParityGame, sol: Solution) -> TeamStrategyProfile:
    if seq.initial not in sol.win_even:
        raise ValueError("Even team does not win this game")
    table = {}
    for v, w in sol.strategy_even.items():
        q, i, partial = seq.names[v]
        if m.teams[i] != EVEN:
            continue
        if i == len(m.blocks) - 1:
            # last player: recover the action from the successor's DPW state
            q2 = seq.names[w][0]
            for a in m.actions(i):
                if m.dpw.step(q, frozenset().union(*partial, a)) == q2:
                    table[(q, i, partial)] = a
                    break
        else:
            table[(q, i, partial)] = seq.names[w][2][-1]
    profile = TeamStrategyProfile(m, table)
    _check_profile(m, profile, seq, sol)
    return profile


def _check_profile(m: MultiParityGame, profile: TeamStrategyProfile, seq, sol):
    """Restrict the game to the profile and check Odd cannot win anywhere."""
    d = m.dpw
    universal = frozenset().union(*(b for b, t in zip(m.blocks, m.teams) if t == ODD)) if m.blocks else frozenset()
    gb = GameBuilder()
    start, _ = gb.add(d.initial, ODD, d.color[d.initial])
    work = [d.initial]
    while work:
        q = work.pop()
        v = gb.index[q]
        for u in powerset(universal):
            try:
                q2 = d.step(q, profile.round(q, u))
            except KeyError:
                raise AssertionError("team strategy undefined on a reachable position")
            w, new = gb.add(q2, ODD, d.color[q2])
            gb.edge(v, w)
            if new:
                work.append(q2)
    restricted = gb.build(start)
    res = zielonka_solve(restricted)
    if res.win_odd:
        raise AssertionError("extracted team strategy is not winning")
