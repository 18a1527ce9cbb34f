"""Explicit-alphabet Büchi and parity word automata.

Letters are frozensets of variable names; the alphabet of an automaton is
every subset of its ``alphabet_vars``. States are the integers
``0..n_states-1``. Parity automata use the max-even convention throughout.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .. import formula as fm
from .. import deadline
from ..errors import AlphabetMismatch, ResourceExceeded
from ..graphs import cycle_through, nontrivial_sccs, reachable, shortest_path
from ..trace import LassoTrace, letter_from_key, letter_key, powerset
from .safra import SafraStepper, max_color

MAX_ALPHABET_VARS = 6
DEFAULT_STATE_CAP = 200_000


def _check_alphabet(vars_):
    if len(vars_) > MAX_ALPHABET_VARS:
        raise ResourceExceeded("alphabet", MAX_ALPHABET_VARS,
                               f"{len(vars_)} alphabet variables exceed the cap of {MAX_ALPHABET_VARS}")


@dataclass
class Nbw:
    alphabet_vars: FrozenSet[str]
    n_states: int
    initial: int
    delta: List[Dict[FrozenSet[str], FrozenSet[int]]]
    accepting: FrozenSet[int]
    names: Optional[List[str]] = field(default=None, compare=False, repr=False)

    def letters(self):
        return powerset(self.alphabet_vars)

    def succ(self, q, letter) -> FrozenSet[int]:
        return self.delta[q].get(letter, frozenset())

    def edges(self, q):
        for a, targets in self.delta[q].items():
            for t in targets:
                yield a, t

    def accepts(self, pi: LassoTrace) -> bool:
        """Membership of a lasso (letters are cut down to the alphabet)."""
        n = len(pi)
        letters = [pi.letter(p) & self.alphabet_vars for p in range(n)]

        def succ(node):
            q, p = node
            return [(t, pi.successor(p)) for t in self.succ(q, letters[p])]

        nodes = reachable((self.initial, 0), succ)
        for comp in nontrivial_sccs(nodes, succ):
            if any(q in self.accepting for q, _ in comp):
                return True
        return False

    def to_json(self) -> dict:
        return {
            "type": "nbw",
            "alphabetVars": sorted(self.alphabet_vars),
            "states": list(range(self.n_states)),
            "initial": self.initial,
            "transitions": [
                {"from": q, "letter": sorted(a), "to": sorted(ts)}
                for q in range(self.n_states) for a, ts in sorted(self.delta[q].items(), key=lambda kv: letter_key(kv[0])) if ts
            ],
            "accepting": sorted(self.accepting),
        }

    @classmethod
    def from_json(cls, data) -> "Nbw":
        if isinstance(data, str):
            data = json.loads(data)
        n = len(data["states"])
        delta = [dict() for _ in range(n)]
        for t in data["transitions"]:
            a = frozenset(t["letter"])
            delta[t["from"]][a] = delta[t["from"]].get(a, frozenset()) | frozenset(t["to"])
        return cls(frozenset(data["alphabetVars"]), n, data["initial"], delta, frozenset(data["accepting"]))

    def to_dot(self) -> str:
        lines = ["digraph nbw {", "  rankdir=LR;", "  init [shape=point];", f"  init -> {self.initial};"]
        for q in range(self.n_states):
            shape = "doublecircle" if q in self.accepting else "circle"
            label = self.names[q] if self.names else str(q)
            lines.append(f'  {q} [shape={shape}, label="{_esc(label)}"];')
        for q in range(self.n_states):
            grouped = {}
            for a, t in self.edges(q):
                grouped.setdefault(t, []).append("{" + ",".join(sorted(a)) + "}")
            for t, labs in sorted(grouped.items()):
                lines.append(f'  {q} -> {t} [label="{" ".join(sorted(labs))}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass
class Dpw:
    alphabet_vars: FrozenSet[str]
    n_states: int
    initial: int
    delta: List[Dict[FrozenSet[str], int]]
    color: List[int]
    names: Optional[list] = field(default=None, compare=False, repr=False)

    def letters(self):
        return powerset(self.alphabet_vars)

    def step(self, q, letter) -> int:
        return self.delta[q][letter & self.alphabet_vars]

    def accepts(self, pi: LassoTrace) -> bool:
        n = len(pi)
        q, p = self.initial, 0
        seen = {}
        trail = []
        while (q, p) not in seen:
            seen[(q, p)] = len(trail)
            trail.append(q)
            q = self.step(q, pi.letter(p))
            p = pi.successor(p)
        cyc = trail[seen[(q, p)]:]
        return max(self.color[s] for s in cyc) % 2 == 0

    def dual(self) -> "Dpw":
        """Complement: shift every color by one."""
        return Dpw(self.alphabet_vars, self.n_states, self.initial, self.delta, [c + 1 for c in self.color])

    def check_structure(self):
        letters = self.letters()
        for q in range(self.n_states):
            for a in letters:
                t = self.delta[q].get(a)
                if not isinstance(t, int) or not 0 <= t < self.n_states:
                    raise AssertionError(f"transition of state {q} on {sorted(a)} missing or invalid")

    def to_json(self) -> dict:
        return {
            "type": "dpw",
            "alphabetVars": sorted(self.alphabet_vars),
            "states": list(range(self.n_states)),
            "initial": self.initial,
            "transitions": [
                {"from": q, "letter": sorted(a), "to": t}
                for q in range(self.n_states) for a, t in sorted(self.delta[q].items(), key=lambda kv: letter_key(kv[0]))
            ],
            "color": list(self.color),
        }

    @classmethod
    def from_json(cls, data) -> "Dpw":
        if isinstance(data, str):
            data = json.loads(data)
        n = len(data["states"])
        delta = [dict() for _ in range(n)]
        for t in data["transitions"]:
            delta[t["from"]][frozenset(t["letter"])] = t["to"]
        return cls(frozenset(data["alphabetVars"]), n, data["initial"], delta, list(data["color"]))

    def to_dot(self) -> str:
        lines = ["digraph dpw {", "  rankdir=LR;", "  init [shape=point];", f"  init -> {self.initial};"]
        for q in range(self.n_states):
            lines.append(f'  {q} [shape=circle, label="{q}\\nc={self.color[q]}"];')
        for q in range(self.n_states):
            grouped = {}
            for a, t in self.delta[q].items():
                grouped.setdefault(t, []).append("{" + ",".join(sorted(a)) + "}")
            for t, labs in sorted(grouped.items()):
                lines.append(f'  {q} -> {t} [label="{" ".join(sorted(labs))}"];')
        lines.append("}")
        return "\n".join(lines)


def _esc(s):
    return str(s).replace('"', '\\"')


# ------------------------------------------------------------- exploration

def explore_nbw(alphabet_vars, initial_key, successors, is_accepting, cap=DEFAULT_STATE_CAP,
                stage="nbw") -> Nbw:
    """Build the reachable part of an NBW given on keys.

    ``successors(key, letter)`` yields successor keys.
    """
    _check_alphabet(alphabet_vars)
    letters = powerset(alphabet_vars)
    index = {initial_key: 0}
    keys = [initial_key]
    delta = []
    i = 0
    while i < len(keys):
        deadline.check(stage)
        key = keys[i]
        row = {}
        for a in letters:
            targets = set()
            for k2 in successors(key, a):
                j = index.get(k2)
                if j is None:
                    j = index[k2] = len(keys)
                    keys.append(k2)
                    if len(keys) > cap:
                        raise ResourceExceeded(stage, cap)
                targets.add(j)
            if targets:
                row[a] = frozenset(targets)
        delta.append(row)
        i += 1
    accepting = frozenset(j for j, k in enumerate(keys) if is_accepting(k))
    return Nbw(frozenset(alphabet_vars), len(keys), 0, delta, accepting, names=[str(k) for k in keys])


# ------------------------------------------------------------------ LTL->NBW

def _expand(obligations):
    """Tableau expansion of a set of NNF formulas for one instant.

    Returns a list of (positive, negative, next, postponed) tuples, one per
    consistent branch. ``postponed`` holds the Until formulas whose
    eventuality was deferred on that branch.
    """
    results = set()
    work = [(tuple(obligations), frozenset(), frozenset(), frozenset(), frozenset(), frozenset())]
    while work:
        todo, done, pos, neg, nxt, post = work.pop()
        if not todo:
            results.add((pos, neg, nxt, post))
            continue
        f, rest = todo[0], todo[1:]
        if f in done:
            work.append((rest, done, pos, neg, nxt, post))
            continue
        done = done | {f}
        if isinstance(f, fm.Const):
            if f.value:
                work.append((rest, done, pos, neg, nxt, post))
        elif isinstance(f, fm.Atom):
            if f.name not in neg:
                work.append((rest, done, pos | {f.name}, neg, nxt, post))
        elif isinstance(f, fm.Not):
            name = f.arg.name
            if name not in pos:
                work.append((rest, done, pos, neg | {name}, nxt, post))
        elif isinstance(f, fm.And):
            work.append(((f.left, f.right) + rest, done, pos, neg, nxt, post))
        elif isinstance(f, fm.Or):
            work.append(((f.left,) + rest, done, pos, neg, nxt, post))
            work.append(((f.right,) + rest, done, pos, neg, nxt, post))
        elif isinstance(f, fm.Next):
            work.append((rest, done, pos, neg, nxt | {f.arg}, post))
        elif isinstance(f, fm.Until):
            work.append(((f.right,) + rest, done, pos, neg, nxt, post))
            work.append(((f.left,) + rest, done, pos, neg, nxt | {f}, post | {f}))
        elif isinstance(f, fm.Release):
            work.append(((f.right, f.left) + rest, done, pos, neg, nxt, post))
            work.append(((f.right,) + rest, done, pos, neg, nxt | {f}, post))
        else:
            raise TypeError(f"matrix not in NNF: {f!r}")
    return sorted(results, key=lambda r: (sorted(r[0]), sorted(r[1]), sorted(map(str, r[2])), sorted(map(str, r[3]))))


def ltl_to_nbw(m: fm.Matrix, alphabet_vars=None, cap=DEFAULT_STATE_CAP) -> Nbw:
    """Tableau translation; the result accepts exactly the models of ``m``.

    Generalized acceptance (one set per Until subformula) is degeneralized
    with a round-robin counter kept in the state.
    """
    m = fm.to_nnf(m)
    if alphabet_vars is None:
        alphabet_vars = fm.matrix_vars(m)
    alphabet_vars = frozenset(alphabet_vars)
    if not fm.matrix_vars(m) <= alphabet_vars:
        raise AlphabetMismatch("matrix mentions variables outside the alphabet")
    untils = sorted({f for f in fm.subformulas(m) if isinstance(f, fm.Until)}, key=str)
    k = len(untils)
    cache = {}

    def expansions(obl):
        if obl not in cache:
            cache[obl] = _expand(obl)
        return cache[obl]

    def successors(key, letter):
        obl, count, _flag = key
        for pos, neg, nxt, post in expansions(obl):
            if not pos <= letter or neg & letter:
                continue
            j = count
            while j < k and untils[j] not in post:
                j += 1
            if j == k:
                yield (frozenset(nxt), 0, True)
            else:
                yield (frozenset(nxt), j, False)

    init = (frozenset([m]), 0, k == 0)
    return explore_nbw(alphabet_vars, init, successors, lambda key: key[2], cap, "ltl_to_nbw")


# ------------------------------------------------------------ operations

def product(a: Nbw, b: Nbw, cap=DEFAULT_STATE_CAP) -> Nbw:
    """Intersection (two-track construction)."""
    if a.alphabet_vars != b.alphabet_vars:
        raise AlphabetMismatch(f"{sorted(a.alphabet_vars)} vs {sorted(b.alphabet_vars)}")

    def successors(key, letter):
        p, q, t = key
        if t == 0 and p in a.accepting:
            t2 = 1
        elif t == 1 and q in b.accepting:
            t2 = 0
        else:
            t2 = t
        for p2 in a.succ(p, letter):
            for q2 in b.succ(q, letter):
                yield (p2, q2, t2)

    return explore_nbw(a.alphabet_vars, (a.initial, b.initial, 0), successors,
                       lambda k: k[2] == 0 and k[0] in a.accepting, cap, "product")


def project_exists(a: Nbw, hidden) -> Nbw:
    hidden = frozenset(hidden)
    if not hidden <= a.alphabet_vars:
        raise AlphabetMismatch(f"cannot project {sorted(hidden - a.alphabet_vars)}: not in alphabet")
    keep = a.alphabet_vars - hidden
    delta = []
    for q in range(a.n_states):
        row = {}
        for letter, targets in a.delta[q].items():
            short = letter & keep
            row[short] = row.get(short, frozenset()) | targets
        delta.append(row)
    return Nbw(keep, a.n_states, a.initial, delta, a.accepting, a.names)


def extend_alphabet(a: Nbw, extra) -> Nbw:
    """Same language, read over a larger alphabet that ignores ``extra``."""
    extra = frozenset(extra) - a.alphabet_vars
    wider = a.alphabet_vars | extra
    _check_alphabet(wider)
    extras = powerset(extra)
    delta = [{l | e: t for l, t in row.items() for e in extras} for row in a.delta]
    return Nbw(wider, a.n_states, a.initial, delta, a.accepting, a.names)


def emptiness(a: Nbw) -> Optional[LassoTrace]:
    """None if the language is empty, otherwise a witness lasso."""
    succ = lambda q: {t for _, t in a.edges(q)}
    nodes = reachable(a.initial, succ)
    edges = lambda q: sorted(a.edges(q), key=lambda e: (letter_key(e[0]), e[1]))
    for comp in sorted(nontrivial_sccs(nodes, succ), key=min):
        if comp & a.accepting:
            target = min(comp & a.accepting)
            stem, _ = shortest_path(a.initial, lambda q: q == target, edges)
            loop = cycle_through(target, edges, comp)
            return LassoTrace(a.alphabet_vars, tuple(stem), tuple(loop))
    return None


def is_empty(a: Nbw) -> bool:
    return emptiness(a) is None


# ----------------------------------------------------- rank-based complement

def complement(a: Nbw, cap=DEFAULT_STATE_CAP) -> Nbw:
    """Level-ranking complementation with ranks bounded by 2*|states|.

    A state is a pair (ranking, owing set): the ranking maps each tracked
    NBW state to a rank (accepting states never odd); the owing set holds the
    even-ranked states still to pass through an odd rank. Accepting states are
    those with an empty owing set.
    """
    n = a.n_states
    top = 2 * n
    acc = a.accepting

    def successors(key, letter):
        ranking, owing = key
        rank_of = dict(ranking)
        bound = {}
        for q, r in ranking:
            for t in a.succ(q, letter):
                bound[t] = min(bound.get(t, top), r)
        targets = sorted(bound)
        choices = []
        for t in targets:
            opts = [r for r in range(bound[t] + 1) if not (t in acc and r % 2)]
            if not opts:
                return
            choices.append(opts)
        if owing:
            owed_next = set()
            for q in owing:
                owed_next |= a.succ(q, letter)
        for ranks in itertools.product(*choices):
            new = tuple(zip(targets, ranks))
            evens = {t for t, r in new if r % 2 == 0}
            o2 = frozenset(owed_next & evens) if owing else frozenset(evens)
            yield (new, o2)

    init = (((a.initial, top),), frozenset())
    return explore_nbw(a.alphabet_vars, init, successors, lambda k: not k[1], cap, "complement")


# -------------------------------------------------------- determinization

def nbw_to_dpw(a: Nbw, cap=DEFAULT_STATE_CAP) -> Dpw:
    """Safra-tree determinization; colors on the max-even scale."""
    _check_alphabet(a.alphabet_vars)
    stepper = SafraStepper(a.initial, a.succ, a.accepting, max(a.n_states, 1))
    return _explore_dpw(a.alphabet_vars, stepper, cap)


def _explore_dpw(alphabet_vars, stepper, cap, stage="nbw_to_dpw") -> Dpw:
    n = stepper.n
    letters = powerset(alphabet_vars)
    init = (stepper.initial_tree, 1)
    index = {init: 0}
    keys = [init]
    delta = []
    i = 0
    while i < len(keys):
        deadline.check(stage)
        tree = keys[i][0]
        row = {}
        for letter in letters:
            t2, prio = stepper.step(tree, letter)
            k2 = (t2, max_color(prio, n))
            j = index.get(k2)
            if j is None:
                j = index[k2] = len(keys)
                keys.append(k2)
                if len(keys) > cap:
                    raise ResourceExceeded(stage, cap)
            row[letter] = j
        delta.append(row)
        i += 1
    return Dpw(frozenset(alphabet_vars), len(keys), 0, delta, [k[1] for k in keys], names=keys)


def dpw_to_nbw(d: Dpw) -> Nbw:
    """Büchi automaton for a max-even parity automaton.

    Phase ``None`` wanders freely; phase ``c`` (even) commits to never seeing
    a color above ``c`` and accepts on color exactly ``c``.
    """
    evens = sorted({c for c in d.color if c % 2 == 0})

    def successors(key, letter):
        q, phase = key
        t = d.step(q, letter)
        if phase is None:
            yield (t, None)
            for c in evens:
                if d.color[t] <= c:
                    yield (t, c)
        elif d.color[t] <= phase:
            yield (t, phase)

    return explore_nbw(d.alphabet_vars, (d.initial, None), successors,
                       lambda k: k[1] is not None and d.color[k[0]] == k[1], stage="dpw_to_nbw")


def dpw_emptiness(d: Dpw) -> Optional[LassoTrace]:
    """Witness lasso for a max-even DPW, or None when empty."""
    nodes = reachable(d.initial, lambda q: set(d.delta[q].values()))
    edges = lambda q: sorted(d.delta[q].items(), key=lambda e: (letter_key(e[0]), e[1]))
    for c in sorted({d.color[q] for q in nodes if d.color[q] % 2 == 0}):
        allowed = {q for q in nodes if d.color[q] <= c}
        succ = lambda q: [t for t in d.delta[q].values() if t in allowed]
        for comp in sorted(nontrivial_sccs(allowed, succ), key=min):
            tops = [q for q in comp if d.color[q] == c]
            if not tops:
                continue
            target = min(tops)
            stem, _ = shortest_path(d.initial, lambda q: q == target, edges)
            loop = cycle_through(target, edges, comp)
            return LassoTrace(d.alphabet_vars, tuple(stem), tuple(loop))
    return None


def complement_via_dpw(a: Nbw, cap=DEFAULT_STATE_CAP) -> Nbw:
    """Complement through determinization; used where ranks would explode."""
    return dpw_to_nbw(nbw_to_dpw(a, cap).dual())


def is_universal(a: Nbw, cap=DEFAULT_STATE_CAP) -> bool:
    return dpw_emptiness(nbw_to_dpw(a, cap).dual()) is None


def trim(a: Nbw) -> Nbw:
    """Drop states that cannot reach an accepting cycle (language preserved)."""
    succ = lambda q: {t for _, t in a.edges(q)}
    nodes = reachable(a.initial, succ)
    live = set()
    for comp in nontrivial_sccs(nodes, succ):
        if comp & a.accepting:
            live |= comp
    # backward closure
    changed = True
    while changed:
        changed = False
        for q in nodes:
            if q not in live and succ(q) & live:
                live.add(q)
                changed = True
    if a.initial not in live:
        return Nbw(a.alphabet_vars, 1, 0, [{}], frozenset())
    order = sorted(live)
    idx = {q: i for i, q in enumerate(order)}
    delta = []
    for q in order:
        row = {}
        for l, ts in a.delta[q].items():
            ts2 = frozenset(idx[t] for t in ts if t in live)
            if ts2:
                row[l] = ts2
        delta.append(row)
    names = [a.names[q] for q in order] if a.names else None
    return Nbw(a.alphabet_vars, len(order), idx[a.initial], delta,
               frozenset(idx[q] for q in a.accepting if q in live), names)
