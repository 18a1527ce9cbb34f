"""Parity tree automata over finite-memory labeled trees.

Trees branch over the subsets of ``direction_vars`` and carry subsets of
``label_vars``. Transition formulas are kept in disjunctive normal form: a
tuple of clauses, each clause a frozenset of ``(state, direction)`` atoms.
``()`` is false and ``(frozenset(),)`` is true. An automaton is
nondeterministic when every clause has at most one atom per direction; a
direction without an atom is unconstrained.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .. import deadline
from ..errors import AlphabetMismatch, ResourceExceeded
from ..games import EVEN, ODD, GameBuilder, zielonka_solve
from ..trace import letter_key, powerset
from .safra import SafraStepper, max_color
from .word import DEFAULT_STATE_CAP, Dpw, _check_alphabet

Clause = FrozenSet[Tuple[int, FrozenSet[str]]]
TRUE_DNF: Tuple[Clause, ...] = (frozenset(),)
FALSE_DNF: Tuple[Clause, ...] = ()
# transitions may hold this many atoms per allowed state on average
ATOMS_PER_STATE = 16
DEFAULT_TREE_STATE_CAP = 25_000


# ------------------------------------------------------------------ trees

@dataclass
class RegularTree:
    """A labeled tree given by a finite memory machine over directions."""
    label_vars: FrozenSet[str]
    direction_vars: FrozenSet[str]
    n_memory: int
    initial: int
    update: List[Dict[FrozenSet[str], int]]
    labels: List[FrozenSet[str]]

    def __post_init__(self):
        self.label_vars = frozenset(self.label_vars)
        self.direction_vars = frozenset(self.direction_vars)

    def memory_at(self, path) -> int:
        m = self.initial
        for d in path:
            m = self.update[m][frozenset(d) & self.direction_vars]
        return m

    def label_at(self, path) -> FrozenSet[str]:
        return self.labels[self.memory_at(path)]

    def directions(self):
        return powerset(self.direction_vars)

    def trimmed(self) -> "RegularTree":
        """Reachable memory only, renumbered in breadth-first order."""
        order = [self.initial]
        index = {self.initial: 0}
        i = 0
        while i < len(order):
            m = order[i]
            i += 1
            for d in self.directions():
                t = self.update[m][d]
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
        update = [{d: index[self.update[m][d]] for d in self.directions()} for m in order]
        return RegularTree(self.label_vars, self.direction_vars, len(order), 0, update,
                           [self.labels[m] for m in order])

    def to_json(self) -> dict:
        return {
            "labelVars": sorted(self.label_vars),
            "directionVars": sorted(self.direction_vars),
            "memory": list(range(self.n_memory)),
            "initial": self.initial,
            "update": {str(m): {letter_key(d): t for d, t in sorted(self.update[m].items(), key=lambda kv: letter_key(kv[0]))}
                       for m in range(self.n_memory)},
            "labels": {str(m): sorted(self.labels[m]) for m in range(self.n_memory)},
        }

    @classmethod
    def from_json(cls, data) -> "RegularTree":
        if isinstance(data, str):
            data = json.loads(data)
        n = len(data["memory"])
        update = [{frozenset(k.split(",")) - {""}: t for k, t in data["update"][str(m)].items()} for m in range(n)]
        labels = [frozenset(data["labels"][str(m)]) for m in range(n)]
        return cls(frozenset(data["labelVars"]), frozenset(data["directionVars"]), n, data["initial"], update, labels)

    def to_dot(self) -> str:
        lines = ["digraph tree {", "  init [shape=point];", f"  init -> {self.initial};"]
        for m in range(self.n_memory):
            lines.append(f'  {m} [label="{m}: {{{",".join(sorted(self.labels[m]))}}}"];')
        for m in range(self.n_memory):
            for d, t in sorted(self.update[m].items(), key=lambda kv: letter_key(kv[0])):
                lines.append(f'  {m} -> {t} [label="{{{letter_key(d)}}}"];')
        lines.append("}")
        return "\n".join(lines)


def constant_tree(label_vars, direction_vars, label) -> RegularTree:
    dirs = powerset(direction_vars)
    return RegularTree(frozenset(label_vars), frozenset(direction_vars), 1, 0,
                       [{d: 0 for d in dirs}], [frozenset(label)])


def all_trees(label_vars, direction_vars, max_memory: int):
    """Every tree of memory at most ``max_memory``, each listed once.

    Only machines whose memory is numbered in breadth-first discovery order
    are produced, which removes renamings of the same machine.
    """
    dirs = powerset(direction_vars)
    labels = powerset(label_vars)
    for n in range(1, max_memory + 1):
        cells = [(m, d) for m in range(n) for d in dirs]
        for targets in itertools.product(range(n), repeat=len(cells)):
            update = [dict() for _ in range(n)]
            for (m, d), t in zip(cells, targets):
                update[m][d] = t
            if not _bfs_canonical(update, dirs, n):
                continue
            for labs in itertools.product(labels, repeat=n):
                yield RegularTree(frozenset(label_vars), frozenset(direction_vars), n, 0, update, list(labs))


def _bfs_canonical(update, dirs, n) -> bool:
    seen = [0]
    i = 0
    while i < len(seen):
        m = seen[i]
        i += 1
        for d in dirs:
            t = update[m][d]
            if t not in seen:
                if t != len(seen):
                    return False
                seen.append(t)
    return len(seen) == n


def hide(direction, theta) -> FrozenSet[str]:
    """Drop the ``theta`` components of a direction letter."""
    return frozenset(direction) - frozenset(theta)


def hide_path(path, theta):
    return tuple(hide(d, theta) for d in path)


def tree_compose(*trees: RegularTree) -> RegularTree:
    """Label-union of trees; each tree reads only its own directions."""
    if not trees:
        raise ValueError("nothing to compose")
    labels = frozenset()
    for t in trees:
        if labels & t.label_vars:
            raise AlphabetMismatch(f"overlapping labels {sorted(labels & t.label_vars)}")
        labels |= t.label_vars
    dirs_all = frozenset().union(*(t.direction_vars for t in trees))
    dirs = powerset(dirs_all)
    start = tuple(t.initial for t in trees)
    index = {start: 0}
    order = [start]
    update = []
    i = 0
    while i < len(order):
        key = order[i]
        i += 1
        row = {}
        for d in dirs:
            nxt = tuple(t.update[m][d & t.direction_vars] for t, m in zip(trees, key))
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row[d] = index[nxt]
        update.append(row)
    lab = [frozenset().union(*(t.labels[m] for t, m in zip(trees, key))) for key in order]
    return RegularTree(labels, dirs_all, len(order), 0, update, lab)


# -------------------------------------------------------------- automata

@dataclass
class Apt:
    label_vars: FrozenSet[str]
    direction_vars: FrozenSet[str]
    n_states: int
    initial: int
    delta: List[Dict[FrozenSet[str], Tuple[Clause, ...]]]
    color: List[int]
    names: Optional[list] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        self.label_vars = frozenset(self.label_vars)
        self.direction_vars = frozenset(self.direction_vars)

    def labels(self):
        return powerset(self.label_vars)

    def directions(self):
        return powerset(self.direction_vars)

    def dnf(self, q, label) -> Tuple[Clause, ...]:
        return self.delta[q].get(frozenset(label), FALSE_DNF)

    def is_nondeterministic(self) -> bool:
        for row in self.delta:
            for clauses in row.values():
                for c in clauses:
                    dirs = [d for _, d in c]
                    if len(dirs) != len(set(dirs)):
                        return False
        return True

    def size(self) -> int:
        return self.n_states

    def to_json(self) -> dict:
        return {
            "type": "npt" if self.is_nondeterministic() else "apt",
            "labelVars": sorted(self.label_vars),
            "directionVars": sorted(self.direction_vars),
            "states": list(range(self.n_states)),
            "initial": self.initial,
            "delta": {
                str(q): {letter_key(l): [sorted([s, sorted(d)] for s, d in c) for c in cl]
                         for l, cl in sorted(self.delta[q].items(), key=lambda kv: letter_key(kv[0]))}
                for q in range(self.n_states)
            },
            "color": list(self.color),
        }

    @classmethod
    def from_json(cls, data) -> "Apt":
        if isinstance(data, str):
            data = json.loads(data)
        n = len(data["states"])
        delta = []
        for q in range(n):
            row = {}
            for k, cl in data["delta"][str(q)].items():
                row[frozenset(k.split(",")) - {""}] = tuple(
                    frozenset((s, frozenset(d)) for s, d in c) for c in cl)
            delta.append(row)
        return cls(frozenset(data["labelVars"]), frozenset(data["directionVars"]), n, data["initial"],
                   delta, list(data["color"]))

    def to_dot(self) -> str:
        lines = ["digraph apt {", "  init [shape=point];", f"  init -> {self.initial};"]
        for q in range(self.n_states):
            lines.append(f'  {q} [label="{q}\\nc={self.color[q]}"];')
        for q in range(self.n_states):
            for l, cl in sorted(self.delta[q].items(), key=lambda kv: letter_key(kv[0])):
                for i, c in enumerate(cl):
                    for s, d in sorted(c, key=lambda a: (a[0], letter_key(a[1]))):
                        lines.append(f'  {q} -> {s} [label="{{{letter_key(l)}}}#{i} dir {{{letter_key(d)}}}"];')
        lines.append("}")
        return "\n".join(lines)


def Npt(label_vars, direction_vars, n_states, initial, delta, color, names=None) -> Apt:
    """An Apt checked to be in nondeterministic form."""
    a = Apt(label_vars, direction_vars, n_states, initial, delta, color, names)
    if not a.is_nondeterministic():
        raise ValueError("transition has two atoms on one direction; not a nondeterministic automaton")
    return a


def _explore_apt(label_vars, direction_vars, initial_key, transitions, color_of, cap, stage) -> Apt:
    """BFS construction; ``transitions(key, label)`` returns clauses over keys."""
    _check_alphabet(frozenset(label_vars) | frozenset(direction_vars))
    labels = powerset(label_vars)
    index = {initial_key: 0}
    keys = [initial_key]
    delta = []
    atoms_left = ATOMS_PER_STATE * cap
    i = 0
    while i < len(keys):
        deadline.check(stage)
        key = keys[i]
        i += 1
        row = {}
        for l in labels:
            clauses = []
            seen = set()
            for c in transitions(key, l):
                atoms = []
                for k2, d in c:
                    j = index.get(k2)
                    if j is None:
                        j = index[k2] = len(keys)
                        keys.append(k2)
                        if len(keys) > cap:
                            raise ResourceExceeded(stage, cap)
                    atoms.append((j, frozenset(d)))
                fc = frozenset(atoms)
                if fc not in seen:
                    seen.add(fc)
                    clauses.append(fc)
                    atoms_left -= len(fc) + 1
                    if atoms_left < 0:
                        raise ResourceExceeded(stage, cap, f"transition size limit of {ATOMS_PER_STATE} "
                                                           f"atoms per allowed state exceeded at stage '{stage}'")
            row[l] = tuple(sorted(clauses, key=_clause_order))
        delta.append(row)
    return Apt(frozenset(label_vars), frozenset(direction_vars), len(keys), 0, delta,
               [color_of(k) for k in keys], names=keys)


def _clause_order(c):
    return sorted((s, letter_key(d)) for s, d in c)


# --------------------------------------------------------------- synthesis

def build_synthesis_apt(d: Dpw, inputs, outputs) -> Apt:
    """Trees labeled by ``outputs`` whose every branch over ``inputs`` is in L(d).

    The node reached by x(0)..x(k) carries y(k); the root label is ignored.
    """
    inputs, outputs = frozenset(inputs), frozenset(outputs)
    if inputs & outputs or inputs | outputs != d.alphabet_vars:
        raise AlphabetMismatch(f"inputs {sorted(inputs)} and outputs {sorted(outputs)} "
                               f"must partition {sorted(d.alphabet_vars)}")
    dirs = powerset(inputs)
    least = min(d.color)

    def transitions(key, label):
        if key == "init":
            return [[((d.initial, x), x) for x in dirs]]
        q, x = key
        t = d.step(q, x | label)
        return [[((t, x2), x2) for x2 in dirs]]

    return _explore_apt(outputs, inputs, "init", transitions,
                        lambda k: least if k == "init" else d.color[k[0]], DEFAULT_STATE_CAP, "synthesis_apt")


# ------------------------------------------------------------ membership

def membership(a: Apt, t: RegularTree) -> bool:
    """Acceptance game of ``a`` on ``t``: Automaton picks a clause, Pathfinder an atom."""
    if t.direction_vars != a.direction_vars or not t.label_vars <= a.label_vars:
        raise AlphabetMismatch("tree and automaton disagree on directions or labels")
    gb = GameBuilder()
    start, _ = gb.add(("s", a.initial, t.initial), EVEN, a.color[a.initial])
    work = [("s", a.initial, t.initial)]
    while work:
        key = work.pop()
        v = gb.index[key]
        if key[0] == "s":
            _, q, m = key
            for i, c in enumerate(a.dnf(q, t.labels[m])):
                k2 = ("c", q, m, i)
                w, new = gb.add(k2, ODD, a.color[q])
                gb.edge(v, w)
                if new:
                    work.append(k2)
        else:
            _, q, m, i = key
            for s, d in sorted(a.dnf(q, t.labels[m])[i], key=lambda x: (x[0], letter_key(x[1]))):
                k2 = ("s", s, t.update[m][d])
                w, new = gb.add(k2, EVEN, a.color[s])
                gb.edge(v, w)
                if new:
                    work.append(k2)
    game = gb.build(start)
    return start in zielonka_solve(game).win_even


# -------------------------------------------------------------- emptiness

def npt_emptiness(n: Apt) -> Optional[RegularTree]:
    """Emptiness game for a nondeterministic automaton; a witness tree or None.

    Automaton chooses a label and a clause, Pathfinder chooses a direction.
    """
    if not n.is_nondeterministic():
        raise ValueError("npt_emptiness needs a nondeterministic automaton; apply ndet first")
    dirs = n.directions()
    gb = GameBuilder()
    top = ("top",)
    start, _ = gb.add(("s", n.initial), EVEN, n.color[n.initial])
    work = [("s", n.initial)]
    while work:
        key = work.pop()
        v = gb.index[key]
        if key == top:
            gb.edge(v, v)
            continue
        if key[0] == "s":
            q = key[1]
            for l in n.labels():
                for i, _c in enumerate(n.dnf(q, l)):
                    k2 = ("c", q, l, i)
                    w, new = gb.add(k2, ODD, n.color[q])
                    gb.edge(v, w)
                    if new:
                        work.append(k2)
        else:
            _, q, l, i = key
            c = dict((d, s) for s, d in n.dnf(q, l)[i])
            for d in dirs:
                k2 = ("s", c[d]) if d in c else top
                w, new = gb.add(k2, EVEN, n.color[c[d]] if d in c else 0)
                gb.edge(v, w)
                if new:
                    work.append(k2)
    game = gb.build(start)
    sol = zielonka_solve(game)
    if start not in sol.win_even:
        return None
    # memory = automaton states visited under Even's strategy, plus a free sink
    choice = {}
    for v, w in sol.strategy_even.items():
        key = game.names[v]
        if key[0] == "s":
            choice[key[1]] = game.names[w]
    order = [n.initial]
    index = {n.initial: 0}
    update, labels = [], []
    sink = None
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        if q == "top":
            update.append({d: index["top"] for d in dirs})
            labels.append(frozenset())
            continue
        _, _, l, ci = choice[q]
        c = dict((d, s) for s, d in n.dnf(q, l)[ci])
        row = {}
        for d in dirs:
            tgt = c.get(d, "top")
            if tgt not in index:
                index[tgt] = len(order)
                order.append(tgt)
            row[d] = index[tgt]
        update.append(row)
        labels.append(l)
    return RegularTree(n.label_vars, n.direction_vars, len(order), 0, update, labels)


def apt_emptiness(a: Apt, cap=DEFAULT_TREE_STATE_CAP) -> Optional[RegularTree]:
    """Witness tree or None; alternating automata go through ndet first.

    Without label variables there is a single candidate tree, so emptiness
    is decided by membership of that tree.
    """
    if not a.label_vars and not a.is_nondeterministic():
        t = constant_tree(a.label_vars, a.direction_vars, frozenset())
        return t if membership(a, t) else None
    if a.is_nondeterministic():
        return npt_emptiness(a)
    return npt_emptiness(ndet(a, cap))


# ---------------------------------------------------------- alternation removal

def ndet(a: Apt, cap=DEFAULT_TREE_STATE_CAP) -> Apt:
    """Nondeterministic automaton with the same language.

    A run of ``a`` is guessed node by node as a memoryless choice of one
    clause per active state; this gives, per direction, a relation between
    the states at a node and those at the child. Infinite sequences of such
    relations are checked against traces whose top recurring color is odd by
    a deterministic (Safra) automaton; its dual colors the new states.
    States are (Safra tree, color); the tree's root holds the active states.
    """
    if a.is_nondeterministic():
        return a
    odd_colors = sorted({c for c in a.color if c % 2 == 1})
    bad_states = a.n_states * (1 + len(odd_colors))

    def bad_succ(node, rel):
        q, phase = node
        out = []
        for (p, q2) in rel:
            if p != q:
                continue
            c2 = a.color[q2]
            if phase is None:
                out.append((q2, None))
                out.extend((q2, c) for c in odd_colors if c2 <= c)
            elif c2 <= phase:
                out.append((q2, phase))
        return out

    bad_acc = {(q, c) for q in range(a.n_states) for c in odd_colors if a.color[q] == c}
    stepper = SafraStepper((a.initial, None), bad_succ, bad_acc, bad_states)
    dirs = a.directions()
    dir_index = {d: i for i, d in enumerate(dirs)}
    size = a.n_states
    n = stepper.n

    def active(tree):
        if tree is None:
            return []
        return sorted({q for q, ph in tree[1] if ph is None})

    def transitions(key, label):
        tree, _col = key
        states = active(tree)
        if not states:
            return [[((None, 2), d) for d in dirs]]
        options = [_minimal_clauses(a.dnf(q, label)) for q in states]
        if any(not o for o in options):
            return []
        # a choice of clauses is encoded as a bitmask with one bit per
        # (direction, state, successor); choices whose bits contain another
        # choice's only add obligations and are dropped
        partial = {0}
        for q, clauses in zip(states, options):
            masks = [sum(1 << ((dir_index[d] * size + q) * size + t) for t, d in c) for c in clauses]
            partial = _minimal_masks({p | m for p in partial for m in masks})
        out = []
        for mask in sorted(partial):
            atoms = []
            for di, d in enumerate(dirs):
                rel = _decode(mask, di, size)
                t2, prio = stepper.step(tree, rel)
                atoms.append(((t2, max_color(prio, n) + 1), d))
            out.append(atoms)
        return out

    return _explore_apt(a.label_vars, a.direction_vars, (stepper.initial_tree, 2), transitions,
                        lambda k: k[1], cap, "ndet")


def _minimal_clauses(clauses):
    """Drop clauses that contain another clause (they are implied)."""
    return tuple(c for c in clauses if not any(o < c for o in clauses))


def _minimal_masks(masks):
    kept = []
    for m in sorted(masks, key=lambda x: (bin(x).count("1"), x)):
        if not any(k & ~m == 0 for k in kept):
            kept.append(m)
    return set(kept)


def _decode(mask, di, size) -> FrozenSet[Tuple[int, int]]:
    """Pairs (state, successor) set in ``mask`` for direction index ``di``."""
    block = (mask >> (di * size * size)) & ((1 << (size * size)) - 1)
    pairs = []
    while block:
        low = block & -block
        bit = low.bit_length() - 1
        pairs.append(divmod(bit, size))
        block ^= low
    return frozenset(pairs)


# ----------------------------------------------------------------- change

def change(n: Apt, xi, upsilon) -> Apt:
    """Guess the ``xi`` labels and read the rest of the label on ``upsilon`` only.

    The result runs on trees labeled by the remaining label variables that
    branch over ``upsilon``; it accepts a tree iff some ``xi``-labeling over
    all original directions composes with it into a tree accepted by ``n``.
    Each copy guesses its own ``xi`` letter and clause, then sends, for every
    original direction, the clause's successor along that direction's
    ``upsilon`` part.
    """
    xi, upsilon = frozenset(xi), frozenset(upsilon)
    if not xi <= n.label_vars:
        raise AlphabetMismatch(f"guessed labels {sorted(xi - n.label_vars)} are not labels")
    if not upsilon <= n.direction_vars:
        raise AlphabetMismatch(f"kept directions {sorted(upsilon - n.direction_vars)} are not directions")
    if not n.is_nondeterministic():
        raise ValueError("change needs a nondeterministic automaton; apply ndet first")
    sigma = n.label_vars - xi
    guesses = powerset(xi)
    delta = []
    for q in range(n.n_states):
        row = {}
        for s in powerset(sigma):
            seen = set()
            clauses = []
            for g in guesses:
                for c in n.dnf(q, s | g):
                    c2 = frozenset((t, d & upsilon) for t, d in c)
                    if c2 not in seen:
                        seen.add(c2)
                        clauses.append(c2)
            row[s] = tuple(sorted(_minimal_clauses(clauses), key=_clause_order))
        delta.append(row)
    return Apt(sigma, upsilon, n.n_states, n.initial, delta, list(n.color), n.names)


def in_shape(n: Apt, t: RegularTree, xi, max_memory=2) -> bool:
    """Brute force: does some ``xi``-labeled tree of bounded memory over all of
    ``n``'s directions compose with ``t`` into L(n)?"""
    for g in all_trees(xi, n.direction_vars, max_memory):
        if membership(n, tree_compose(t, g)):
            return True
    return False


def unary_lasso(t: RegularTree):
    """Label sequence of a tree without directions, as (stem, loop)."""
    if t.direction_vars:
        raise ValueError("tree has branching directions")
    seen = {}
    seq = []
    m = t.initial
    while m not in seen:
        seen[m] = len(seq)
        seq.append(m)
        m = t.update[m][frozenset()]
    k = seen[m]
    return [t.labels[x] for x in seq[:k]], [t.labels[x] for x in seq[k:]]


def sink_states(a: Apt) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """(states accepting every tree, states accepting no tree), found syntactically.

    A set of even-colored states where every label has a clause staying in
    the set accepts everything: the run never leaves it. Dually, a set of
    odd-colored or stuck states where every clause touches the set accepts
    nothing: Pathfinder can stay inside.
    """
    labels = a.labels()
    states = range(a.n_states)
    stuck = {q for q in states if all(not a.dnf(q, l) for l in labels)}

    def gfp(ok, candidates):
        s = set(candidates)
        while True:
            keep = {q for q in s if ok(q, s)}
            if keep == s:
                return frozenset(s)
            s = keep

    true = gfp(lambda q, s: all(any(all(t in s for t, _ in c) for c in a.dnf(q, l)) for l in labels),
               [q for q in states if a.color[q] % 2 == 0])
    false = gfp(lambda q, s: all(all(any(t in s for t, _ in c) for c in a.dnf(q, l)) for l in labels),
                [q for q in states if a.color[q] % 2 == 1 or q in stuck])
    return true, false


def _drop_sinks(a: Apt) -> Apt:
    """Remove atoms on accept-all states and clauses touching reject-all states."""
    true, false = sink_states(a)
    if not true and not false:
        return a
    if a.initial in true or a.initial in false:
        dnf = TRUE_DNF if a.initial in true else FALSE_DNF
        return Apt(a.label_vars, a.direction_vars, 1, 0, [{l: dnf for l in a.labels()}],
                   [0 if a.initial in true else 1])
    delta = []
    for q in range(a.n_states):
        row = {}
        for l, clauses in a.delta[q].items():
            kept = [frozenset(x for x in c if x[0] not in true) for c in clauses
                    if not any(t in false for t, _ in c)]
            row[l] = tuple(sorted(set(_minimal_clauses(tuple(set(kept)))), key=_clause_order))
        delta.append(row)
    return Apt(a.label_vars, a.direction_vars, a.n_states, a.initial, delta, list(a.color), a.names)


def reduce(a: Apt) -> Apt:
    """Merge bisimilar states (same color, same transitions up to merging).

    Accept-all and reject-all states are first cut out of the transitions,
    then the coarsest stable partition is found by iterated refinement; the
    language is unchanged. Unreachable states are dropped.
    """
    a = _drop_sinks(a)
    block = {q: a.color[q] for q in range(a.n_states)}
    labels = a.labels()
    while True:
        sig = {}
        for q in range(a.n_states):
            rows = []
            for l in labels:
                cl = frozenset(frozenset((block[s], d) for s, d in c) for c in a.dnf(q, l))
                rows.append(cl)
            sig[q] = (block[q], tuple(rows))
        ids = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in range(a.n_states)}
        if len(ids) == len(set(block.values())):
            block = new
            break
        block = new
    # rebuild on block representatives, reachable from the initial block
    rep = {}
    for q in range(a.n_states):
        rep.setdefault(block[q], q)

    def transitions(b, l):
        return [[(block[s], d) for s, d in c] for c in a.dnf(rep[b], l)]

    return _explore_apt(a.label_vars, a.direction_vars, block[a.initial], transitions,
                        lambda b: a.color[rep[b]], DEFAULT_STATE_CAP, "reduce")
