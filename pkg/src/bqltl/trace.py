"""Ultimately periodic interpretations and classic LTL evaluation on them."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import FrozenSet, List, Tuple

from . import formula as fm

Letter = FrozenSet[str]


def powerset(variables) -> List[Letter]:
    """All subsets of ``variables`` in a fixed order (binary counting over sorted names)."""
    names = sorted(variables)
    out = []
    for mask in range(1 << len(names)):
        out.append(frozenset(n for i, n in enumerate(names) if mask >> i & 1))
    return out


def letter_key(letter) -> str:
    return ",".join(sorted(letter))


def letter_from_key(key: str) -> Letter:
    return frozenset(k for k in key.split(",") if k)


@dataclass(frozen=True)
class LassoTrace:
    universe: FrozenSet[str]
    stem: Tuple[Letter, ...]
    loop: Tuple[Letter, ...]

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(self, "stem", tuple(frozenset(a) for a in self.stem))
        object.__setattr__(self, "loop", tuple(frozenset(a) for a in self.loop))
        if not self.loop:
            raise ValueError("loop must be nonempty")
        for a in self.stem + self.loop:
            if not a <= self.universe:
                raise ValueError(f"letter {sorted(a)} not within universe {sorted(self.universe)}")

    def __len__(self):
        return len(self.stem) + len(self.loop)

    def letter(self, i: int) -> Letter:
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def successor(self, p: int) -> int:
        """Next canonical position (positions range over 0..len-1)."""
        return p + 1 if p + 1 < len(self) else len(self.stem)

    def canonical(self, i: int) -> int:
        if i < len(self.stem):
            return i
        return len(self.stem) + (i - len(self.stem)) % len(self.loop)

    def to_json(self) -> dict:
        return {
            "universe": sorted(self.universe),
            "stem": [sorted(a) for a in self.stem],
            "loop": [sorted(a) for a in self.loop],
        }

    @classmethod
    def from_json(cls, data) -> "LassoTrace":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(frozenset(data["universe"]), tuple(map(frozenset, data["stem"])),
                   tuple(map(frozenset, data["loop"])))

    def __str__(self):
        fmt = lambda a: "{" + ",".join(sorted(a)) + "}"
        return " ".join(map(fmt, self.stem)) + " (" + " ".join(map(fmt, self.loop)) + ")^w"


def constant(universe, letter) -> LassoTrace:
    return LassoTrace(frozenset(universe), (), (frozenset(letter),))


def project(pi: LassoTrace, keep) -> LassoTrace:
    keep = frozenset(keep) & pi.universe
    return LassoTrace(keep, tuple(a & keep for a in pi.stem), tuple(a & keep for a in pi.loop))


def project_out(pi: LassoTrace, drop) -> LassoTrace:
    return project(pi, pi.universe - frozenset(drop))


def combine(p1: LassoTrace, p2: LassoTrace) -> LassoTrace:
    """The unique trace over both universes whose projections are ``p1`` and ``p2``."""
    if p1.universe & p2.universe:
        raise ValueError(f"universes overlap on {sorted(p1.universe & p2.universe)}")
    stem_len = max(len(p1.stem), len(p2.stem))
    period = math.lcm(len(p1.loop), len(p2.loop))
    stem = tuple(p1.letter(i) | p2.letter(i) for i in range(stem_len))
    loop = tuple(p1.letter(i) | p2.letter(i) for i in range(stem_len, stem_len + period))
    return LassoTrace(p1.universe | p2.universe, stem, loop)


def rotate(pi: LassoTrace, k: int) -> LassoTrace:
    """The suffix of ``pi`` starting at position ``k``."""
    stem = tuple(pi.letter(i) for i in range(k, max(k, len(pi.stem))))
    start = max(k, len(pi.stem))
    loop = tuple(pi.letter(i) for i in range(start, start + len(pi.loop)))
    return LassoTrace(pi.universe, stem, loop)


def normalize(pi: LassoTrace) -> LassoTrace:
    """Shortest equivalent stem/loop (minimal period, stem folded into loop)."""
    loop = list(pi.loop)
    n = len(loop)
    for d in range(1, n + 1):
        if n % d == 0 and all(loop[i] == loop[i % d] for i in range(n)):
            loop = loop[:d]
            break
    stem = list(pi.stem)
    while stem and stem[-1] == loop[-1]:
        loop = [stem.pop()] + loop[:-1]
    return LassoTrace(pi.universe, tuple(stem), tuple(loop))


def all_lassos(universe, max_stem: int, max_loop: int):
    """Every lasso with |stem| <= max_stem and 1 <= |loop| <= max_loop."""
    letters = powerset(universe)
    for s in range(max_stem + 1):
        for l in range(1, max_loop + 1):
            for stem in itertools.product(letters, repeat=s):
                for loop in itertools.product(letters, repeat=l):
                    yield LassoTrace(frozenset(universe), stem, loop)


def random_lasso(rng, universe, max_stem=3, max_loop=3) -> LassoTrace:
    letters = powerset(universe)
    stem = tuple(rng.choice(letters) for _ in range(rng.randint(0, max_stem)))
    loop = tuple(rng.choice(letters) for _ in range(rng.randint(1, max_loop)))
    return LassoTrace(frozenset(universe), stem, loop)


# ---------------------------------------------------------------- evaluation

def label_positions(m: fm.Matrix, pi: LassoTrace) -> dict:
    """Truth vector over canonical positions for every subformula of ``m``."""
    n = len(pi)
    succ = [pi.successor(p) for p in range(n)]
    table = {}

    def vec(node):
        if node in table:
            return table[node]
        if isinstance(node, fm.Atom):
            if node.name not in pi.universe:
                raise KeyError(f"unknown variable {node.name!r}")
            v = [node.name in pi.letter(p) for p in range(n)]
        elif isinstance(node, fm.Const):
            v = [node.value] * n
        elif isinstance(node, fm.Not):
            v = [not b for b in vec(node.arg)]
        elif isinstance(node, fm.And):
            a, b = vec(node.left), vec(node.right)
            v = [x and y for x, y in zip(a, b)]
        elif isinstance(node, fm.Or):
            a, b = vec(node.left), vec(node.right)
            v = [x or y for x, y in zip(a, b)]
        elif isinstance(node, fm.Implies):
            a, b = vec(node.left), vec(node.right)
            v = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(node, fm.Iff):
            a, b = vec(node.left), vec(node.right)
            v = [x == y for x, y in zip(a, b)]
        elif isinstance(node, fm.Next):
            a = vec(node.arg)
            v = [a[succ[p]] for p in range(n)]
        elif isinstance(node, (fm.Until, fm.Eventually)):
            a = [True] * n if isinstance(node, fm.Eventually) else vec(node.left)
            b = vec(node.arg if isinstance(node, fm.Eventually) else node.right)
            v = _fixpoint(n, succ, lambda p, cur: b[p] or (a[p] and cur[succ[p]]), False)
        elif isinstance(node, (fm.Release, fm.Globally)):
            a = [False] * n if isinstance(node, fm.Globally) else vec(node.left)
            b = vec(node.arg if isinstance(node, fm.Globally) else node.right)
            v = _fixpoint(n, succ, lambda p, cur: b[p] and (a[p] or cur[succ[p]]), True)
        else:
            raise TypeError(node)
        table[node] = v
        return v

    vec(m)
    return table


def _fixpoint(n, succ, step, init):
    # least (init False) or greatest (init True) fixpoint; n+1 sweeps suffice
    cur = [init] * n
    for _ in range(n + 1):
        new = [step(p, cur) for p in range(n)]
        if new == cur:
            break
        cur = new
    return cur


def eval_ltl(m: fm.Matrix, pi: LassoTrace, i: int = 0) -> bool:
    return label_positions(m, pi)[m][pi.canonical(i)]
